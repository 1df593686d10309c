//! Truncated q-series, twisted divisor sums, Eisenstein series, Rankin-Cohen
//! brackets, the `U_m` operator and a level-one cusp form basis.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bernoulli::{sigma0, zeta_neg};
use crate::chars::{DirichletCharacter, Parity};
use crate::exact::{rational, rational_int, Cyclotomic, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QFormError {
    #[error("parity mismatch: character parity {parity:?} against weight {weight}")]
    Parity { weight: u32, parity: Parity },
    #[error("weight {0} outside the supported range")]
    Weight(u32),
    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(usize, usize),
    #[error("U_{m} needs {needed} input coefficients for {requested} outputs, have {available}")]
    InsufficientPrecision {
        m: usize,
        requested: usize,
        needed: usize,
        available: usize,
    },
}

/// `sum_{n < N} c_n q^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QSeries {
    pub coeffs: Vec<Cyclotomic>,
    pub weight: Option<i64>,
}

impl QSeries {
    pub fn new(coeffs: Vec<Cyclotomic>, weight: Option<i64>) -> Self {
        QSeries { coeffs, weight }
    }

    pub fn zero(order: u64, precision: usize) -> Self {
        QSeries::new(vec![Cyclotomic::zero(order); precision], None)
    }

    pub fn from_rationals(coeffs: Vec<Rational>, weight: Option<i64>) -> Self {
        QSeries::new(
            coeffs.into_iter().map(|c| Cyclotomic::from_rational(1, c)).collect(),
            weight,
        )
    }

    pub fn from_ints(coeffs: &[i64], weight: Option<i64>) -> Self {
        QSeries::from_rationals(coeffs.iter().map(|&c| rational_int(c)).collect(), weight)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &Cyclotomic {
        &self.coeffs[n]
    }

    pub fn truncate(&self, precision: usize) -> Self {
        QSeries::new(self.coeffs[..precision.min(self.precision())].to_vec(), self.weight)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        QSeries::new(
            (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
            self.weight,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        QSeries::new(
            (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
            self.weight,
        )
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        QSeries::new(self.coeffs.iter().map(|x| x * c).collect(), self.weight)
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        QSeries::new(self.coeffs.iter().map(|x| x.scale(q)).collect(), self.weight)
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        let coeffs = (0..n)
            .map(|m| {
                let order = self.coeffs[..=m]
                    .iter()
                    .chain(&other.coeffs[..=m])
                    .fold(1u64, |acc, c| acc.lcm(&c.order()));
                Cyclotomic::sum_of_products(
                    order,
                    (0..=m).map(|i| (BigInt::one(), &self.coeffs[i], &other.coeffs[m - i])),
                )
            })
            .collect();
        let weight = match (self.weight, other.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        QSeries::new(coeffs, weight)
    }

    pub fn pow(&self, e: u32) -> Self {
        let order = self.coeffs.iter().fold(1u64, |acc, c| acc.lcm(&c.order()));
        let mut one = QSeries::zero(order, self.precision());
        if self.precision() > 0 {
            one.coeffs[0] = Cyclotomic::one(order);
        }
        one.weight = Some(0);
        (0..e).fold(one, |acc, _| acc.mul(self))
    }

    /// `(q d/dq)^r`: coefficient `n` is multiplied by `n^r`.
    pub fn derivative(&self, r: u32) -> Self {
        QSeries::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale_int(&BigInt::from(n).pow(r)))
                .collect(),
            self.weight.map(|w| w + 2 * r as i64),
        )
    }
}

/// `sigma_{w,chi}(n) = sum_{d | n} chi(d) d^w`; `n = 0` gives the Eisenstein constant.
pub fn sigma_twisted(w: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    if n == 0 {
        return sigma0(w + 1, chi);
    }
    let order = chi.order();
    let mut buckets = vec![BigInt::zero(); order as usize];
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        if let Some(e) = chi.value_exponent(d as i64) {
            buckets[e as usize] += BigInt::from(d).pow(w);
        }
    }
    Cyclotomic::from_exponent_sums_int(order, buckets)
}

/// `sigma_{w,chi1,chi2}(n) = sum_{d1 d2 = n} chi1(d1) chi2(d2) d1^w`.
pub fn sigma_double(
    w: u32,
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    n: u64,
) -> Cyclotomic {
    let order = chi1.order().lcm(&chi2.order());
    if n == 0 {
        return if chi2.modulus() != 1 {
            Cyclotomic::zero(order)
        } else {
            sigma0(w + 1, chi1).promote(order)
        };
    }
    let mut buckets = vec![BigInt::zero(); order as usize];
    for d1 in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        let (Some(e1), Some(e2)) = (
            chi1.value_exponent_at(d1 as i64, order),
            chi2.value_exponent_at((n / d1) as i64, order),
        ) else {
            continue;
        };
        buckets[((e1 + e2) % order) as usize] += BigInt::from(d1).pow(w);
    }
    Cyclotomic::from_exponent_sums_int(order, buckets)
}

/// Classical `sigma_w(n)` for `n >= 1`.
pub fn sigma_classical(w: u32, n: u64) -> BigInt {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d).pow(w))
        .sum()
}

/// `sigma_{w,chi1,chi2}(a)` for `a = 0..=n_max` by a divisor sieve, expressed at
/// `order` (a multiple of both character orders).
pub fn sigma_table(
    w: u32,
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    n_max: usize,
    order: u64,
) -> Vec<Cyclotomic> {
    assert!(order.is_multiple_of(chi1.order()) && order.is_multiple_of(chi2.order()));
    let ord = order as usize;
    let mut buckets: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); ord]; n_max + 1];
    let e2: Vec<Option<u64>> = (0..=n_max)
        .map(|m| chi2.value_exponent_at(m as i64, order))
        .collect();
    for d1 in 1..=n_max {
        let Some(e1) = chi1.value_exponent_at(d1 as i64, order) else {
            continue;
        };
        let p = BigInt::from(d1).pow(w);
        for m in 1..=n_max / d1 {
            if let Some(e2) = e2[m] {
                buckets[d1 * m][((e1 + e2) % order) as usize] += &p;
            }
        }
    }
    let mut out: Vec<Cyclotomic> = buckets
        .into_iter()
        .map(|b| Cyclotomic::from_exponent_sums_int(order, b))
        .collect();
    out[0] = sigma_double(w, chi1, chi2, 0).promote(order);
    out
}

#[derive(Clone, Debug)]
pub enum EisensteinKind {
    Twisted { k: u32, chi: DirichletCharacter },
    Double {
        k: u32,
        chi1: DirichletCharacter,
        chi2: DirichletCharacter,
    },
    Level1 { k: u32 },
}

fn check_parity(k: u32, parity: Parity) -> Result<(), QFormError> {
    if Parity::of_weight(k) != parity {
        return Err(QFormError::Parity { weight: k, parity });
    }
    Ok(())
}

fn combined_parity(a: Parity, b: Parity) -> Parity {
    if a == b {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// q-expansion of `G_{k,chi}`, `G_{k,chi1,chi2}` or `G_K` to `precision` terms.
pub fn eisenstein_series(kind: &EisensteinKind, precision: usize) -> Result<QSeries, QFormError> {
    match kind {
        EisensteinKind::Twisted { k, chi } => {
            if *k < 3 {
                return Err(QFormError::Weight(*k));
            }
            check_parity(*k, chi.parity())?;
            let coeffs = (0..precision)
                .map(|n| sigma_twisted(k - 1, chi, n as u64))
                .collect();
            Ok(QSeries::new(coeffs, Some(*k as i64)))
        }
        EisensteinKind::Double { k, chi1, chi2 } => {
            if *k < 3 {
                return Err(QFormError::Weight(*k));
            }
            check_parity(*k, combined_parity(chi1.parity(), chi2.parity()))?;
            let coeffs = (0..precision)
                .map(|n| sigma_double(k - 1, chi1, chi2, n as u64))
                .collect();
            Ok(QSeries::new(coeffs, Some(*k as i64)))
        }
        EisensteinKind::Level1 { k } => {
            if *k < 4 || k % 2 == 1 {
                return Err(QFormError::Weight(*k));
            }
            let zeta = zeta_neg(*k).map_err(|_| QFormError::Weight(*k))?;
            let mut coeffs = vec![zeta / rational_int(2)];
            coeffs.extend((1..precision).map(|n| Rational::from_integer(sigma_classical(k - 1, n as u64))));
            coeffs.truncate(precision);
            Ok(QSeries::from_rationals(coeffs, Some(*k as i64)))
        }
    }
}

fn binom_i(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    binomial(BigInt::from(n), BigInt::from(k))
}

/// `e`-th Rankin-Cohen bracket of `f` (weight `a`) and `g` (weight `b`).
pub fn rc_bracket(f: &QSeries, a: i64, g: &QSeries, b: i64, e: u32) -> Result<QSeries, QFormError> {
    if f.precision() != g.precision() {
        return Err(QFormError::PrecisionMismatch(f.precision(), g.precision()));
    }
    let e_i = e as i64;
    let mut acc: Option<QSeries> = None;
    for r in 0..=e {
        let r_i = r as i64;
        let c = binom_i(e_i + a - 1, e_i - r_i) * binom_i(e_i + b - 1, r_i);
        let c = if r % 2 == 1 { -c } else { c };
        if c.is_zero() {
            continue;
        }
        let term = f.derivative(r).mul(&g.derivative(e - r));
        let term = QSeries::new(
            term.coeffs.iter().map(|x| x.scale_int(&c)).collect(),
            None,
        );
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    let mut out = acc.unwrap_or_else(|| QSeries::zero(1, f.precision()));
    out.weight = Some(a + b + 2 * e_i);
    Ok(out)
}

/// `U_m f = sum a(mn) q^n`, returning `precision` terms.
pub fn u_operator(m: usize, f: &QSeries, precision: usize) -> Result<QSeries, QFormError> {
    assert!(m >= 1, "U_0 is undefined");
    let needed = if precision == 0 { 0 } else { (precision - 1) * m + 1 };
    if needed > f.precision() {
        return Err(QFormError::InsufficientPrecision {
            m,
            requested: precision,
            needed,
            available: f.precision(),
        });
    }
    Ok(QSeries::new(
        (0..precision).map(|n| f.coeffs[n * m].clone()).collect(),
        f.weight,
    ))
}

/// `dim S_K` at level one.
pub fn cusp_dim(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let q = (k / 12) as usize;
    if k % 12 == 2 {
        q - 1
    } else {
        q
    }
}

/// `floor(K/12) + 1` leading coefficients determine a level-one form of weight `K`.
pub fn coeff_count(k: u32) -> usize {
    (k / 12) as usize + 1
}

pub fn e4(precision: usize) -> QSeries {
    let mut c: Vec<Rational> = (0..precision)
        .map(|n| Rational::from_integer(sigma_classical(3, n as u64) * 240))
        .collect();
    if precision > 0 {
        c[0] = Rational::one();
    }
    QSeries::from_rationals(c, Some(4))
}

pub fn e6(precision: usize) -> QSeries {
    let mut c: Vec<Rational> = (0..precision)
        .map(|n| Rational::from_integer(sigma_classical(5, n as u64) * -504))
        .collect();
    if precision > 0 {
        c[0] = Rational::one();
    }
    QSeries::from_rationals(c, Some(6))
}

/// `(E_4^3 - E_6^2) / 1728`.
pub fn delta(precision: usize) -> QSeries {
    let e4c = e4(precision).pow(3);
    let e6s = e6(precision).pow(2);
    let mut d = e4c.sub(&e6s).scale_rational(&rational(1, 1728));
    d.weight = Some(12);
    d
}

#[derive(Clone, Debug)]
pub struct Level1Toolkit {
    pub weight: u32,
    pub dim: usize,
    pub coeff_count: usize,
    pub precision: usize,
    /// Echelon basis: `basis[i]` has `q^(i+1)` leading term and vanishes at `q^(j+1)` for `j != i`, `j < dim`.
    pub basis: Vec<QSeries>,
}

fn build_toolkit(k: u32, precision: usize) -> Level1Toolkit {
    let dim = cusp_dim(k);
    let precision = precision.max(dim + 1);
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(dim);
    if dim > 0 {
        let d = delta(precision);
        let e4s = e4(precision);
        let e6s = e6(precision);
        for i in 1..=dim {
            let rest = k as usize - 12 * i;
            let (a, b) = (0..=rest / 6)
                .find_map(|b| {
                    let r = rest - 6 * b;
                    r.is_multiple_of(4).then_some((r / 4, b))
                })
                .expect("weights other than 2 are sums of 4 and 6");
            let f = d.pow(i as u32).mul(&e4s.pow(a as u32)).mul(&e6s.pow(b as u32));
            rows.push(
                f.coeffs
                    .iter()
                    .map(|c| c.as_rational().expect("rational q-expansion").clone())
                    .collect(),
            );
        }
        // leading terms are q^i with coefficient 1; clear above the diagonal
        for i in (0..dim).rev() {
            for r in 0..i {
                let f = rows[r][i + 1].clone();
                if !f.is_zero() {
                    for c in 0..precision {
                        let delta = &f * &rows[i][c];
                        rows[r][c] -= delta;
                    }
                }
            }
        }
    }
    Level1Toolkit {
        weight: k,
        dim,
        coeff_count: coeff_count(k),
        precision,
        basis: rows
            .into_iter()
            .map(|r| QSeries::from_rationals(r, Some(k as i64)))
            .collect(),
    }
}

/// Memoized level-one toolkit with the basis known to at least `precision` terms.
pub fn level1_toolkit_with_precision(k: u32, precision: usize) -> Arc<Level1Toolkit> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Level1Toolkit>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache.read().unwrap().get(&k) {
        if t.precision >= precision {
            return t.clone();
        }
    }
    let built = Arc::new(build_toolkit(k, precision));
    let mut w = cache.write().unwrap();
    let entry = w.entry(k).or_insert_with(|| built.clone());
    if entry.precision < built.precision {
        *entry = built;
    }
    entry.clone()
}

/// Toolkit with the basis to `coeff_count + 11` terms.
pub fn level1_toolkit(k: u32) -> Arc<Level1Toolkit> {
    level1_toolkit_with_precision(k, coeff_count(k) + 11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::CharFilter;
    use proptest::prelude::*;

    fn ints(s: &QSeries) -> Vec<i64> {
        s.coeffs
            .iter()
            .map(|c| {
                let q = c.as_rational().unwrap();
                assert!(q.is_integer());
                i64::try_from(q.to_integer()).unwrap()
            })
            .collect()
    }

    #[test]
    fn delta_expansion() {
        let d = delta(11);
        assert_eq!(
            ints(&d),
            vec![0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
        );
    }

    #[test]
    fn dimensions() {
        let dims: Vec<usize> = (0..=40).step_by(2).map(cusp_dim).collect();
        assert_eq!(
            dims,
            vec![0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 3, 2, 3]
        );
        assert_eq!(cusp_dim(26), 1);
        assert_eq!(coeff_count(12), 2);
        assert_eq!(coeff_count(11), 1);
    }

    #[test]
    fn toolkit_basis_is_echelon() {
        for k in (12..=60).step_by(2) {
            let t = level1_toolkit(k);
            assert_eq!(t.basis.len(), t.dim);
            for (i, b) in t.basis.iter().enumerate() {
                assert!(b.coeffs[0].is_zero());
                for j in 0..t.dim {
                    let expected = if i == j { 1 } else { 0 };
                    assert_eq!(b.coeffs[j + 1], Cyclotomic::from_int(1, expected), "K={k}");
                }
            }
        }
        let t = level1_toolkit(12);
        assert_eq!(ints(&t.basis[0])[..4], [0, 1, -24, 252]);
        assert_eq!(level1_toolkit(14).dim, 0);
    }

    #[test]
    fn toolkit_basis_spans_level_one_cusp_forms() {
        // Delta * E_4^2 * E_6 ... any weight-K cusp form reduces to zero residual
        let t = level1_toolkit(36);
        let f = delta(t.precision).pow(2).mul(&e6(t.precision).pow(2));
        let mut residual = f.clone();
        for (i, b) in t.basis.iter().enumerate() {
            residual = residual.sub(&b.scale(&f.coeffs[i + 1]));
        }
        assert!(residual.coeffs.iter().all(Cyclotomic::is_zero));
    }

    #[test]
    fn divisor_sums() {
        let chi = DirichletCharacter::quadratic(3).unwrap();
        let one = DirichletCharacter::trivial();
        assert!(sigma_twisted(5, &chi, 1).is_one());
        assert_eq!(sigma_twisted(2, &chi, 4), Cyclotomic::from_int(1, 13));
        assert_eq!(sigma_twisted(2, &chi, 0), sigma0(3, &chi));
        assert_eq!(sigma_double(2, &one, &chi, 2), Cyclotomic::from_int(1, 3));
        assert!(sigma_double(2, &one, &chi, 0).is_zero());
        for n in 0..30 {
            assert_eq!(sigma_double(4, &chi, &one, n), sigma_twisted(4, &chi, n));
        }
    }

    #[test]
    fn sieve_matches_direct_sums() {
        for d in [1u64, 3, 5, 15, 21] {
            for chi in DirichletCharacter::enumerate(d, CharFilter::Primitive).unwrap() {
                for (_, c1, c2) in chi.factorizations() {
                    let order = chi.order();
                    let table = sigma_table(3, &c1, &c2.conj(), 40, order);
                    for (n, v) in table.iter().enumerate() {
                        assert_eq!(*v, sigma_double(3, &c1, &c2.conj(), n as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn eisenstein_examples() {
        let g = eisenstein_series(&EisensteinKind::Level1 { k: 12 }, 3).unwrap();
        assert_eq!(g.coeffs[0], Cyclotomic::from_rational(1, rational(691, 65520)));
        let chi = DirichletCharacter::quadratic(3).unwrap();
        let g = eisenstein_series(&EisensteinKind::Twisted { k: 3, chi: chi.clone() }, 3).unwrap();
        assert!(g.coeffs[1].is_one());
        let one = DirichletCharacter::trivial();
        let g = eisenstein_series(
            &EisensteinKind::Double { k: 3, chi1: one, chi2: chi.clone() },
            3,
        )
        .unwrap();
        assert!(g.coeffs[0].is_zero());
        assert!(matches!(
            eisenstein_series(&EisensteinKind::Twisted { k: 4, chi }, 3),
            Err(QFormError::Parity { .. })
        ));
    }

    #[test]
    fn bracket_examples() {
        let f = e4(8);
        let g = e6(8);
        assert_eq!(rc_bracket(&f, 4, &g, 6, 0).unwrap().coeffs, f.mul(&g).coeffs);
        let b = rc_bracket(&f, 4, &g, 6, 1).unwrap();
        assert!(b.coeffs[0].is_zero());
        for n in 0..8 {
            let direct: Rational = (0..=n)
                .map(|a1| {
                    let a2 = n - a1;
                    rational_int(4 * a2 as i64 - 6 * a1 as i64)
                        * f.coeffs[a1].as_rational().unwrap()
                        * g.coeffs[a2].as_rational().unwrap()
                })
                .sum();
            assert_eq!(b.coeffs[n], Cyclotomic::from_rational(1, direct));
        }
        // [E4, E6]_1 = -2 * 1728 * ... is a weight-12 cusp form, so proportional to Delta
        let d = delta(8);
        let c = b.coeffs[1].clone();
        assert_eq!(b.coeffs, d.scale(&c).coeffs);
        assert_eq!(rc_bracket(&f, 4, &g.truncate(5), 6, 1), Err(QFormError::PrecisionMismatch(8, 5)));
    }

    #[test]
    fn u_operator_examples() {
        let f = QSeries::from_ints(&[1, 2, 3, 4, 5, 6, 7], None);
        assert_eq!(u_operator(1, &f, 7).unwrap(), f);
        assert_eq!(u_operator(2, &f, 4).unwrap(), QSeries::from_ints(&[1, 3, 5, 7], None));
        let q3 = QSeries::from_ints(&[0, 0, 0, 1, 0, 0, 0], None);
        assert_eq!(u_operator(3, &q3, 3).unwrap(), QSeries::from_ints(&[0, 1, 0], None));
        assert!(matches!(u_operator(3, &f, 4), Err(QFormError::InsufficientPrecision { .. })));
    }

    proptest! {
        #[test]
        fn bracket_antisymmetry(v in prop::collection::vec(-50i64..50, 1..12), w in 1i64..20) {
            let f = QSeries::from_ints(&v, None);
            let b = rc_bracket(&f, w, &f, w, 1).unwrap();
            prop_assert!(b.coeffs.iter().all(Cyclotomic::is_zero));
        }

        #[test]
        fn u_operator_composes(v in prop::collection::vec(-50i64..50, 60), m in 1usize..5, m2 in 1usize..5, n in 1usize..4) {
            let f = QSeries::from_ints(&v, None);
            let lhs = u_operator(m, &u_operator(m2, &f, n * m).unwrap(), n).unwrap();
            let rhs = u_operator(m * m2, &f, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
