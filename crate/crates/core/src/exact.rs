//! Exact arithmetic: big rationals and elements of cyclotomic fields.
//!
//! A [`Cyclotomic`] of order `m` is stored in the power basis
//! `1, z, z^2, ..., z^(phi(m)-1)` where `z = exp(2 pi i / m)`, reduced modulo the
//! `m`-th cyclotomic polynomial. Values are never minimized to a smaller order
//! automatically; binary operations and equality promote both operands to the
//! least common multiple of their orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision reduced fraction.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("order {order} needs {expected} coefficients, got {got}")]
    CoefficientCount {
        order: u64,
        expected: usize,
        got: usize,
    },
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical `"p/q"` text form; the denominator is always written.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    let parsed = if t.contains('/') {
        Rational::from_str(t).ok()
    } else {
        BigInt::from_str(t).ok().map(Rational::from_integer)
    };
    match parsed {
        Some(q) => Ok(q),
        None => Err(ExactError::MalformedRational(s.to_string())),
    }
}

pub fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (lowest degree first) of the `m`-th cyclotomic polynomial,
/// from `x^m - 1 = prod_{d | m} Phi_d(x)`.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<i64>> {
    assert!(m >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = poly_cache().read().unwrap().get(&m) {
        return p.clone();
    }
    let mut dividend: Vec<i128> = vec![0; m as usize + 1];
    dividend[0] = -1;
    dividend[m as usize] = 1;
    for d in divisors(m).into_iter().filter(|&d| d < m) {
        let divisor = cyclotomic_polynomial(d);
        dividend = divide_monic(&dividend, &divisor);
    }
    let poly: Vec<i64> = dividend
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect();
    let poly = Arc::new(poly);
    poly_cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| poly.clone())
        .clone()
}

// exact quotient of integer polynomials by a monic divisor
fn divide_monic(dividend: &[i128], divisor: &[i64]) -> Vec<i128> {
    let mut rem = dividend.to_vec();
    let dd = divisor.len() - 1;
    let qlen = rem.len() - dd;
    let mut quot = vec![0i128; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &b) in divisor.iter().enumerate() {
                rem[i + j] -= c * b as i128;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Reduces an integer polynomial in `z = zeta_m` to the canonical basis.
fn reduce_int(m: u64, mut c: Vec<BigInt>) -> Vec<BigInt> {
    let m_us = m as usize;
    if c.len() > m_us {
        for j in m_us..c.len() {
            let v = std::mem::take(&mut c[j]);
            c[j % m_us] += v;
        }
        c.truncate(m_us);
    }
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    if c.len() > deg {
        for d in (deg..c.len()).rev() {
            let lead = std::mem::take(&mut c[d]);
            if lead.is_zero() {
                continue;
            }
            for (i, &p) in phi.iter().take(deg).enumerate() {
                if p != 0 {
                    c[d - deg + i] -= &lead * p;
                }
            }
        }
    }
    c.resize(deg, BigInt::zero());
    c
}

/// Clears denominators: returns integers `n_i` and `den` with `q_i = n_i / den`.
fn integer_form(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let nums = coeffs
        .iter()
        .map(|q| q.numer() * (&den / q.denom()))
        .collect();
    (nums, den)
}

fn from_integer_form(nums: Vec<BigInt>, den: &BigInt) -> Vec<Rational> {
    nums.into_iter()
        .map(|n| Rational::new(n, den.clone()))
        .collect()
}

fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Element of the cyclotomic field `Q(zeta_order)`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1);
        let phi = totient(order) as usize;
        Cyclotomic {
            order,
            coeffs: vec![Rational::zero(); phi],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, Rational::one())
    }

    pub fn from_rational(order: u64, q: Rational) -> Self {
        let mut c = Self::zero(order);
        c.coeffs[0] = q;
        c
    }

    pub fn from_int(order: u64, n: i64) -> Self {
        Self::from_rational(order, rational_int(n))
    }

    pub fn from_bigint(order: u64, n: BigInt) -> Self {
        Self::from_rational(order, Rational::from_integer(n))
    }

    /// `zeta_order^exponent`.
    pub fn root_of_unity(order: u64, exponent: u64) -> Self {
        let mut sums = vec![BigInt::zero(); order as usize];
        sums[(exponent % order) as usize] = BigInt::one();
        Self::from_exponent_sums_int(order, sums)
    }

    /// Builds `sum_j sums[j] * zeta^j` for `j` in `0..order`.
    pub fn from_exponent_sums(order: u64, sums: Vec<Rational>) -> Self {
        assert_eq!(sums.len() as u64, order, "exponent sums must cover Z/order");
        let (nums, den) = integer_form(&sums);
        let reduced = reduce_int(order, nums);
        Cyclotomic {
            order,
            coeffs: from_integer_form(reduced, &den),
        }
    }

    pub fn from_exponent_sums_int(order: u64, sums: Vec<BigInt>) -> Self {
        assert_eq!(sums.len() as u64, order, "exponent sums must cover Z/order");
        let reduced = reduce_int(order, sums);
        Cyclotomic {
            order,
            coeffs: reduced.into_iter().map(Rational::from_integer).collect(),
        }
    }

    /// Builds an element from canonical power-basis coefficients.
    pub fn from_coeffs(order: u64, coeffs: Vec<Rational>) -> Result<Self, ExactError> {
        if order == 0 {
            return Err(ExactError::ZeroOrder);
        }
        let expected = totient(order) as usize;
        if coeffs.len() != expected {
            return Err(ExactError::CoefficientCount {
                order,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Cyclotomic { order, coeffs })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Re-expresses the element in `Q(zeta_target)`; `order` must divide `target`.
    pub fn promote(&self, target: u64) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "cannot promote order {} to {}",
            self.order,
            target
        );
        if target == self.order {
            return self.clone();
        }
        let step = target / self.order;
        let mut sums = vec![Rational::zero(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            sums[i * step as usize] = c.clone();
        }
        Self::from_exponent_sums(target, sums)
    }

    /// Inverse of [`promote`](Self::promote): returns `None` when the element does
    /// not lie in `Q(zeta_target)`.
    pub fn demote(&self, target: u64) -> Option<Self> {
        if !self.order.is_multiple_of(target) {
            return None;
        }
        if target == self.order {
            return Some(self.clone());
        }
        let small = totient(target) as usize;
        let big = self.coeffs.len();
        // columns: images of the small power basis
        let columns: Vec<Cyclotomic> = (0..small)
            .map(|i| Self::root_of_unity(target, i as u64).promote(self.order))
            .collect();
        let mut rows: Vec<Vec<Rational>> = (0..big)
            .map(|r| {
                let mut row: Vec<Rational> = columns.iter().map(|c| c.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let solution = solve_consistent(&mut rows, small)?;
        Some(Cyclotomic {
            order: target,
            coeffs: solution,
        })
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut sums = vec![Rational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            sums[(m - i) % m] = c.clone();
        }
        Self::from_exponent_sums(self.order, sums)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        let q = Rational::from_integer(n.clone());
        self.scale(&q)
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(self.order, q.recip()));
        }
        let modulus: Vec<Rational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|&c| rational_int(c))
            .collect();
        let (gcd, s) = ext_gcd_inverse(modulus, self.coeffs.clone());
        // gcd is a nonzero constant because Phi_m is irreducible
        let inv_g = gcd[0].recip();
        let mut sums: Vec<Rational> = s.into_iter().map(|c| c * &inv_g).collect();
        let m = self.order as usize;
        if sums.len() < m {
            sums.resize(m, Rational::zero());
        }
        let (nums, den) = integer_form(&sums);
        Ok(Cyclotomic {
            order: self.order,
            coeffs: from_integer_form(reduce_int(self.order, nums), &den),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Value at `zeta = exp(2 pi i / order)` in double precision.
    pub fn embed(&self) -> Complex64 {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / m;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }

    /// `sum_i w_i * x_i * y_i` computed at `order` with a single reduction.
    pub fn sum_of_products<'a, I>(order: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (BigInt, &'a Cyclotomic, &'a Cyclotomic)>,
    {
        let phi = totient(order) as usize;
        let mut acc = vec![BigInt::zero(); (2 * phi).saturating_sub(1).max(1)];
        let mut den = BigInt::one();
        for (w, x, y) in terms {
            if w.is_zero() || x.is_zero() || y.is_zero() {
                continue;
            }
            let xp;
            let x = if x.order == order {
                x
            } else {
                xp = x.promote(order);
                &xp
            };
            let yp;
            let y = if y.order == order {
                y
            } else {
                yp = y.promote(order);
                &yp
            };
            let (a, da) = integer_form(&x.coeffs);
            let (b, db) = integer_form(&y.coeffs);
            let term_den = da * db;
            let prod = convolve(&a, &b);
            let new_den = den.lcm(&term_den);
            if new_den != den {
                let f = &new_den / &den;
                for c in acc.iter_mut() {
                    *c *= &f;
                }
                den = new_den;
            }
            let f = &den / &term_den * &w;
            for (slot, p) in acc.iter_mut().zip(prod) {
                *slot += p * &f;
            }
        }
        Cyclotomic {
            order,
            coeffs: from_integer_form(reduce_int(order, acc), &den),
        }
    }

    pub fn sum<'a, I>(order: u64, items: I) -> Self
    where
        I: IntoIterator<Item = &'a Cyclotomic>,
    {
        items
            .into_iter()
            .fold(Self::zero(order), |acc, x| &acc + x)
    }

    fn binary<F>(&self, other: &Self, f: F) -> Self
    where
        F: Fn(&Rational, &Rational) -> Rational,
    {
        if self.order == other.order {
            return Cyclotomic {
                order: self.order,
                coeffs: self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(a, b)| f(a, b))
                    .collect(),
            };
        }
        let l = self.order.lcm(&other.order);
        self.promote(l).binary(&other.promote(l), f)
    }

    fn multiply(&self, other: &Self) -> Self {
        if self.order != other.order {
            let l = self.order.lcm(&other.order);
            return self.promote(l).multiply(&other.promote(l));
        }
        if let Some(q) = self.as_rational() {
            return other.scale(q);
        }
        if let Some(q) = other.as_rational() {
            return self.scale(q);
        }
        let (a, da) = integer_form(&self.coeffs);
        let (b, db) = integer_form(&other.coeffs);
        let reduced = reduce_int(self.order, convolve(&a, &b));
        Cyclotomic {
            order: self.order,
            coeffs: from_integer_form(reduced, &(da * db)),
        }
    }
}

// Gaussian elimination on an augmented system; None when inconsistent.
fn solve_consistent(rows: &mut [Vec<Rational>], unknowns: usize) -> Option<Vec<Rational>> {
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..=unknowns {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = rows[i][unknowns].clone();
    }
    Some(x)
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![Rational::zero()], rem);
    }
    let lead_inv = den[dd].recip();
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dd] * &lead_inv;
        if !c.is_zero() {
            for (j, b) in den.iter().enumerate() {
                let delta = &c * b;
                rem[i + j] -= delta;
            }
        }
        quot[i] = c;
    }
    rem.truncate(dd.max(1));
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

fn is_zero_poly(p: &[Rational]) -> bool {
    p.iter().all(Zero::is_zero)
}

// Extended Euclid: returns (g, s) with s * a = g (mod modulus).
fn ext_gcd_inverse(modulus: Vec<Rational>, a: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let mut r0 = modulus;
    let mut r1 = a;
    trim(&mut r1);
    let mut s0 = vec![Rational::zero()];
    let mut s1 = vec![Rational::one()];
    while !is_zero_poly(&r1) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    (r0, s0)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            let l = self.order.lcm(&other.order);
            self.promote(l).coeffs == other.promote(l).coeffs
        }
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.multiply(rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: &Cyclotomic) -> Cyclotomic {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "z{}", self.order)?;
                    } else {
                        write!(f, "z{}^{}", self.order, i)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicRepr {
    order: u64,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CyclotomicRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(rational_to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CyclotomicRepr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Cyclotomic::from_coeffs(repr.order, coeffs).map_err(serde::de::Error::custom)
    }
}
