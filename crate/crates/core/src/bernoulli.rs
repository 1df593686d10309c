//! Bernoulli numbers, Bernoulli polynomials and generalized Bernoulli numbers.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chars::DirichletCharacter;
use crate::exact::{rational_int, Cyclotomic, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BernoulliError {
    #[error("zeta(1-K) is only provided for even K >= 2, got K = {0}")]
    OddWeight(u32),
}

type CharKey = (u32, u64, Vec<u64>);

/// Memo tables shared by all threads.
pub struct BernoulliCache {
    ordinary: RwLock<Vec<Rational>>,
    generalized: RwLock<HashMap<CharKey, Cyclotomic>>,
}

impl BernoulliCache {
    pub fn global() -> &'static BernoulliCache {
        static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
        CACHE.get_or_init(|| BernoulliCache {
            ordinary: RwLock::new(vec![Rational::one()]),
            generalized: RwLock::new(HashMap::new()),
        })
    }

    pub fn number(&self, n: u32) -> Rational {
        let n = n as usize;
        if let Some(b) = self.ordinary.read().unwrap().get(n) {
            return b.clone();
        }
        let mut table = self.ordinary.write().unwrap();
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        while table.len() <= n {
            let m = table.len();
            let mut acc = Rational::zero();
            for (j, b) in table.iter().enumerate() {
                if !b.is_zero() {
                    acc += b * Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j)));
                }
            }
            table.push(-acc / rational_int(m as i64 + 1));
        }
        table[n].clone()
    }

    pub fn generalized(&self, n: u32, chi: &DirichletCharacter) -> Cyclotomic {
        let key = (n, chi.modulus(), chi.exponents());
        if let Some(v) = self.generalized.read().unwrap().get(&key) {
            return v.clone();
        }
        let value = generalized_closed_form(n, chi);
        self.generalized
            .write()
            .unwrap()
            .entry(key)
            .or_insert(value)
            .clone()
    }
}

/// `B_n` with `B_1 = -1/2`.
pub fn bernoulli_number(n: u32) -> Rational {
    BernoulliCache::global().number(n)
}

/// `B_n(x) = sum_j C(n, j) B_j x^(n-j)`.
pub fn bernoulli_poly(n: u32, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for j in (0..=n).rev() {
        let b = bernoulli_number(j);
        if !b.is_zero() {
            let c = Rational::from_integer(binomial(BigInt::from(n), BigInt::from(j)));
            acc += c * b * &xp;
        }
        xp *= x;
    }
    acc
}

fn generalized_closed_form(n: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let d = chi.modulus();
    let order = chi.order();
    let mut buckets = vec![Rational::zero(); order as usize];
    let dq = rational_int(d as i64);
    for a in 1..=d {
        if let Some(e) = chi.value_exponent(a as i64) {
            buckets[e as usize] += bernoulli_poly(n, &(rational_int(a as i64) / &dq));
        }
    }
    let scale = if n == 0 {
        dq.recip()
    } else {
        Rational::from_integer(BigInt::from(d).pow(n - 1))
    };
    Cyclotomic::from_exponent_sums(order, buckets).scale(&scale)
}

/// `B_{n,chi} = D^(n-1) sum_{a=1}^{D} chi(a) B_n(a/D)`; the trivial character gives
/// `B_{1,1} = +1/2`.
pub fn generalized_bernoulli(n: u32, chi: &DirichletCharacter) -> Cyclotomic {
    BernoulliCache::global().generalized(n, chi)
}

/// `zeta(1 - K) = -B_K / K`.
pub fn zeta_neg(k: u32) -> Result<Rational, BernoulliError> {
    if k < 2 || k % 2 == 1 {
        return Err(BernoulliError::OddWeight(k));
    }
    Ok(-bernoulli_number(k) / rational_int(k as i64))
}

/// Constant term of `G_{k,chi}`: `-B_{k,chi} / (2k)`.
pub fn sigma0(k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    generalized_bernoulli(k, chi).scale(&Rational::new(BigInt::from(-1), BigInt::from(2 * k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::{CharFilter, Parity};
    use crate::exact::rational;

    #[test]
    fn small_bernoulli_numbers() {
        assert_eq!(bernoulli_number(0), rational(1, 1));
        assert_eq!(bernoulli_number(1), rational(-1, 2));
        assert_eq!(bernoulli_number(2), rational(1, 6));
        assert_eq!(bernoulli_number(12), rational(-691, 2730));
        for n in (3..40).step_by(2) {
            assert!(bernoulli_number(n).is_zero());
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_neg(12).unwrap(), rational(691, 32760));
        assert_eq!(zeta_neg(2).unwrap(), rational(-1, 12));
        assert_eq!(zeta_neg(4).unwrap(), rational(1, 120));
        assert_eq!(zeta_neg(7), Err(BernoulliError::OddWeight(7)));
    }

    #[test]
    fn trivial_character_conventions() {
        let one = DirichletCharacter::trivial();
        assert_eq!(generalized_bernoulli(1, &one), Cyclotomic::from_rational(1, rational(1, 2)));
        for n in [0, 2, 4, 6, 12] {
            assert_eq!(generalized_bernoulli(n, &one), Cyclotomic::from_rational(1, bernoulli_number(n)));
        }
        assert_eq!(sigma0(4, &one), Cyclotomic::from_rational(1, rational(1, 240)));
    }

    #[test]
    fn quadratic_mod_three() {
        let chi = DirichletCharacter::quadratic(3).unwrap();
        assert_eq!(generalized_bernoulli(1, &chi), Cyclotomic::from_rational(1, rational(-1, 3)));
        assert_eq!(generalized_bernoulli(3, &chi), Cyclotomic::from_rational(1, rational(2, 3)));
        assert_eq!(sigma0(3, &chi), Cyclotomic::from_rational(1, rational(-1, 9)));
    }

    #[test]
    fn parity_vanishing() {
        for d in [3u64, 5, 7, 15, 21] {
            for chi in DirichletCharacter::enumerate(d, CharFilter::Primitive).unwrap() {
                for n in 1..10 {
                    if Parity::of_weight(n) != chi.parity() {
                        assert!(generalized_bernoulli(n, &chi).is_zero(), "{chi:?} n={n}");
                        if n >= 2 {
                            assert!(sigma0(n, &chi).is_zero());
                        }
                    } else {
                        assert!(!generalized_bernoulli(n, &chi).is_zero(), "{chi:?} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn bernoulli_polynomial_values() {
        // B_n(0) = B_n, B_n(1) = B_n for n != 1
        for n in 0..12 {
            assert_eq!(bernoulli_poly(n, &rational(0, 1)), bernoulli_number(n));
            if n != 1 {
                assert_eq!(bernoulli_poly(n, &rational(1, 1)), bernoulli_number(n));
            }
        }
        assert_eq!(bernoulli_poly(2, &rational(1, 2)), rational(-1, 12));
    }
}
