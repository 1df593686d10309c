//! Dirichlet characters modulo odd square-free integers.
//!
//! A character mod `D = p_1 ... p_r` (primes ascending) is a tuple of exponents
//! `e_i` in `[0, p_i - 2]`; the component at `p_i` sends the least primitive root
//! `g_i` to `exp(2 pi i e_i / (p_i - 1))`. The label of a character is the
//! mixed-radix integer `sum e_i * prod_{j<i} (p_j - 1)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::exact::Cyclotomic;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("unsupported modulus {0}: must be odd, square-free and positive")]
    UnsupportedModulus(u64),
    #[error("invalid factorization {d1} * {d2} of modulus {modulus}")]
    InvalidFactorization { modulus: u64, d1: u64, d2: u64 },
    #[error("character {label} mod {modulus} is not primitive")]
    Imprimitive { modulus: u64, label: u64 },
    #[error("label {label} out of range for modulus {modulus}")]
    InvalidLabel { modulus: u64, label: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharFilter {
    All,
    Primitive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn of_weight(k: u32) -> Parity {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Debug)]
struct Component {
    prime: u64,
    exponent: u64,
    dlog: Arc<Vec<u64>>,
}

impl Component {
    fn local_order(&self) -> u64 {
        let pm1 = self.prime - 1;
        pm1 / self.exponent.gcd(&pm1)
    }
}

/// A Dirichlet character modulo an odd square-free integer.
#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    components: Vec<Component>,
    order: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_odd_prime(p: u64) -> bool {
    p > 2 && is_prime(p)
}

/// Prime factors of an odd square-free `d`, ascending.
pub fn odd_squarefree_primes(d: u64) -> Result<Vec<u64>, CharError> {
    if d == 0 || d.is_multiple_of(2) {
        return Err(CharError::UnsupportedModulus(d));
    }
    let mut n = d;
    let mut primes = Vec::new();
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Err(CharError::UnsupportedModulus(d));
            }
            primes.push(p);
        }
        p += 2;
    }
    if n > 1 {
        primes.push(n);
    }
    Ok(primes)
}

pub fn is_odd_squarefree(d: u64) -> bool {
    odd_squarefree_primes(d).is_ok()
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub fn least_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let pm1 = p - 1;
    let mut factors = Vec::new();
    let mut n = pm1;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            factors.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, pm1 / q, p) != 1))
        .expect("every prime has a primitive root")
}

fn dlog_table(p: u64) -> Arc<Vec<u64>> {
    static TABLES: OnceLock<RwLock<HashMap<u64, Arc<Vec<u64>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = tables.read().unwrap().get(&p) {
        return t.clone();
    }
    let g = least_primitive_root(p);
    let mut table = vec![0u64; p as usize];
    let mut x = 1u64;
    for e in 0..p - 1 {
        table[x as usize] = e;
        x = x * g % p;
    }
    let table = Arc::new(table);
    tables
        .write()
        .unwrap()
        .entry(p)
        .or_insert_with(|| table.clone())
        .clone()
}

impl DirichletCharacter {
    /// The character mod 1.
    pub fn trivial() -> Self {
        DirichletCharacter {
            modulus: 1,
            components: Vec::new(),
            order: 1,
        }
    }

    fn from_exponents(modulus: u64, primes: &[u64], exponents: &[u64]) -> Self {
        let components: Vec<Component> = primes
            .iter()
            .zip(exponents)
            .map(|(&p, &e)| Component {
                prime: p,
                exponent: e % (p - 1),
                dlog: dlog_table(p),
            })
            .collect();
        let order = components
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&c.local_order()));
        DirichletCharacter {
            modulus,
            components,
            order,
        }
    }

    pub fn from_label(modulus: u64, label: u64) -> Result<Self, CharError> {
        let primes = odd_squarefree_primes(modulus)?;
        let phi: u64 = primes.iter().map(|p| p - 1).product();
        if label >= phi {
            return Err(CharError::InvalidLabel { modulus, label });
        }
        let mut rest = label;
        let exponents: Vec<u64> = primes
            .iter()
            .map(|p| {
                let e = rest % (p - 1);
                rest /= p - 1;
                e
            })
            .collect();
        Ok(Self::from_exponents(modulus, &primes, &exponents))
    }

    /// All characters (or the primitive ones) mod `modulus`, ordered by label.
    pub fn enumerate(modulus: u64, filter: CharFilter) -> Result<Vec<Self>, CharError> {
        let primes = odd_squarefree_primes(modulus)?;
        let phi: u64 = primes.iter().map(|p| p - 1).product();
        let all = (0..phi).map(|label| Self::from_label(modulus, label).expect("label in range"));
        Ok(match filter {
            CharFilter::All => all.collect(),
            CharFilter::Primitive => all.filter(|c| c.is_primitive()).collect(),
        })
    }

    /// The real primitive character mod `modulus` (the trivial one for `modulus = 1`).
    pub fn quadratic(modulus: u64) -> Result<Self, CharError> {
        let primes = odd_squarefree_primes(modulus)?;
        let exponents: Vec<u64> = primes.iter().map(|p| (p - 1) / 2).collect();
        Ok(Self::from_exponents(modulus, &primes, &exponents))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn primes(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.prime).collect()
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.exponent).collect()
    }

    pub fn label(&self) -> u64 {
        let mut radix = 1;
        let mut label = 0;
        for c in &self.components {
            label += c.exponent * radix;
            radix *= c.prime - 1;
        }
        label
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(|c| c.exponent == 0)
    }

    pub fn conductor(&self) -> u64 {
        self.components
            .iter()
            .filter(|c| c.exponent != 0)
            .map(|c| c.prime)
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn parity(&self) -> Parity {
        let odd = self.components.iter().filter(|c| c.exponent % 2 == 1).count();
        if odd % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `e` with `chi(a) = zeta_order^e`, or `None` when `gcd(a, D) > 1`.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        let mut total = 0u64;
        for c in &self.components {
            let r = a.rem_euclid(c.prime as i64) as u64;
            if r == 0 {
                return None;
            }
            if c.exponent == 0 {
                continue;
            }
            let pm1 = c.prime - 1;
            let g = c.exponent.gcd(&pm1);
            let local = pm1 / g;
            let step = self.order / local;
            let e = (c.exponent / g) * c.dlog[r as usize] % local;
            total = (total + e * step) % self.order;
        }
        Some(total)
    }

    /// `value_exponent` re-expressed at a multiple `target` of the order.
    pub fn value_exponent_at(&self, a: i64, target: u64) -> Option<u64> {
        debug_assert!(target.is_multiple_of(self.order));
        self.value_exponent(a).map(|e| e * (target / self.order))
    }

    pub fn evaluate(&self, a: i64) -> Cyclotomic {
        match self.value_exponent(a) {
            Some(e) => Cyclotomic::root_of_unity(self.order, e),
            None => Cyclotomic::zero(self.order),
        }
    }

    pub fn conj(&self) -> Self {
        let primes = self.primes();
        let exponents: Vec<u64> = self
            .components
            .iter()
            .map(|c| (c.prime - 1 - c.exponent) % (c.prime - 1))
            .collect();
        Self::from_exponents(self.modulus, &primes, &exponents)
    }

    /// The product character on the same modulus.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        if self.modulus != other.modulus {
            return None;
        }
        let primes = self.primes();
        let exponents: Vec<u64> = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a.exponent + b.exponent) % (a.prime - 1))
            .collect();
        Some(Self::from_exponents(self.modulus, &primes, &exponents))
    }

    /// Splits `chi = chi_1 chi_2` with `chi_i` mod `d_i`, `d_1 d_2 = D`.
    pub fn decompose(&self, d1: u64, d2: u64) -> Result<(Self, Self), CharError> {
        let bad = CharError::InvalidFactorization {
            modulus: self.modulus,
            d1,
            d2,
        };
        if d1 == 0 || d2 == 0 || d1.checked_mul(d2) != Some(self.modulus) || d1.gcd(&d2) != 1 {
            return Err(bad);
        }
        let split = |d: u64| {
            let comps: Vec<&Component> =
                self.components.iter().filter(|c| d.is_multiple_of(c.prime)).collect();
            let primes: Vec<u64> = comps.iter().map(|c| c.prime).collect();
            let exps: Vec<u64> = comps.iter().map(|c| c.exponent).collect();
            Self::from_exponents(d, &primes, &exps)
        };
        Ok((split(d1), split(d2)))
    }

    /// All splittings `(D_2, chi_1, chi_2)` over divisors `D_2 | D`, by increasing `D_2`.
    pub fn factorizations(&self) -> Vec<(u64, Self, Self)> {
        let primes = self.primes();
        let mut d2s: Vec<u64> = (0..1u64 << primes.len())
            .map(|mask| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p)
                    .product()
            })
            .collect();
        d2s.sort_unstable();
        d2s.into_iter()
            .map(|d2| {
                let (c1, c2) = self
                    .decompose(self.modulus / d2, d2)
                    .expect("divisor of a square-free modulus");
                (d2, c1, c2)
            })
            .collect()
    }

    /// `G(chi) = sum_{a=1}^{D} chi(a) zeta_D^a` at order `lcm(D, order)`.
    pub fn gauss_sum(&self) -> Result<Cyclotomic, CharError> {
        if !self.is_primitive() {
            return Err(CharError::Imprimitive {
                modulus: self.modulus,
                label: self.label(),
            });
        }
        let d = self.modulus;
        let l = d.lcm(&self.order);
        let mut sums = vec![BigInt::zero(); l as usize];
        for a in 1..=d {
            if let Some(e) = self.value_exponent(a as i64) {
                let idx = (e * (l / self.order) + a * (l / d)) % l;
                sums[idx as usize] += 1;
            }
        }
        Ok(Cyclotomic::from_exponent_sums_int(l, sums))
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.exponents() == other.exponents()
    }
}

impl Eq for DirichletCharacter {}

impl std::hash::Hash for DirichletCharacter {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.exponents().hash(state);
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[{}:{}]", self.modulus, self.label())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.modulus, self.label())
    }
}
