//! Error terms of the normalized coefficient decompositions, computed from their
//! defining finite sums with direct divisor sums.

use num_bigint::BigInt;

use tperiods::bernoulli::{sigma0, zeta_neg};
use tperiods::chars::DirichletCharacter;
use tperiods::exact::{rational, rational_int, Cyclotomic, Rational};
use tperiods::qforms::{sigma_double, sigma_twisted};

/// `s_{l-1,chi}(0) / s_{k-1,chibar}(0)`.
pub fn sigma_ratio(ell: u32, k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let den = sigma0(k, &chi.conj());
    &sigma0(ell, chi) * &den.inv().expect("nonzero constant term")
}

/// `2 s_{l-1,chi}(0) / zeta(1-K)`.
pub fn zeta_ratio(weight: u32, ell: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let z = zeta_neg(weight).expect("even weight");
    sigma0(ell, chi).scale(&(rational_int(2) / z))
}

fn inv_const(k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    sigma0(k, &chi.conj()).inv().expect("nonzero constant term")
}

// sum over 0 < a1 < n of w(a1) s_{l-1,chi}(a1) s_{k-1,chibar}(n - a1)
fn middle(ell: u32, k: u32, chi: &DirichletCharacter, n: u64, w: impl Fn(u64) -> i64) -> Cyclotomic {
    let order = chi.order();
    let chib = chi.conj();
    let mut acc = Cyclotomic::zero(order);
    for a1 in 1..n {
        let t = &sigma_twisted(ell - 1, chi, a1) * &sigma_twisted(k - 1, &chib, n - a1);
        acc = &acc + &t.scale_int(&BigInt::from(w(a1)));
    }
    acc
}

// sum over D2 != 1 of chibar_2(-1) D2^{-e} sum_{a1 + a2 = n D2} w(a1, a2) s(a1) s(a2)
fn level(
    ell: u32,
    k: u32,
    chi: &DirichletCharacter,
    n: u64,
    divide: bool,
    w: impl Fn(u64, u64) -> i64,
) -> Cyclotomic {
    let order = chi.order();
    let mut acc = Cyclotomic::zero(order);
    for (d2, c1, c2) in chi.factorizations() {
        if d2 == 1 {
            continue;
        }
        let m = n * d2;
        let mut inner = Cyclotomic::zero(order);
        for a1 in 0..=m {
            let a2 = m - a1;
            let weight = w(a1, a2);
            if weight == 0 {
                continue;
            }
            let t = &sigma_double(ell - 1, &c1, &c2.conj(), a1) * &sigma_double(k - 1, &c1.conj(), &c2, a2);
            inner = &inner + &t.scale_int(&BigInt::from(weight));
        }
        let mut s = rational_int(c2.parity().sign());
        if divide {
            s /= rational_int(d2 as i64);
        }
        acc = &acc + &inner.scale(&s);
    }
    acc
}

/// Product-kernel small term with `k = K - l`.
pub fn e_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - ell;
    &middle(ell, k, chi, n, |_| 1) * &inv_const(k, chi)
}

/// Product-kernel level term with `k = K - l`.
pub fn script_e_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - ell;
    &level(ell, k, chi, n, false, |_, _| 1) * &inv_const(k, chi)
}

fn ell_over_k(ell: u32, k: u32) -> Rational {
    rational(-(ell as i64), k as i64)
}

/// Bracket-kernel small term (weight `a1`) with `k = K - 2 - l`.
pub fn r_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - 2 - ell;
    &middle(ell, k, chi, n, |a1| a1 as i64) * &inv_const(k, chi)
}

/// Bracket-kernel small term (weight `-(l/k)(n - a1)`).
pub fn r_prime_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - 2 - ell;
    (&middle(ell, k, chi, n, |a1| (n - a1) as i64) * &inv_const(k, chi)).scale(&ell_over_k(ell, k))
}

/// Bracket-kernel level term (weight `a1`, divided by `D2`).
pub fn script_r_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - 2 - ell;
    &level(ell, k, chi, n, true, |a1, _| a1 as i64) * &inv_const(k, chi)
}

/// Bracket-kernel level term (weight `-(l/k) a2`, divided by `D2`).
pub fn script_r_prime_term(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - 2 - ell;
    (&level(ell, k, chi, n, true, |_, a2| a2 as i64) * &inv_const(k, chi)).scale(&ell_over_k(ell, k))
}

/// `eps_{K,D} = a_{K,K/2,chi}(1) / (2 s_{K/2-1,chi}(0)) - 1` from the defining sums.
pub fn epsilon_maeda(weight: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let k = weight / 2;
    let s0 = sigma0(k, chi);
    let level_part = level(k, k, chi, 1, false, |_, _| 1);
    let half_inv = s0.inv().expect("nonzero constant term").scale(&rational(1, 2));
    let z = zeta_neg(weight).expect("even weight");
    &(&level_part * &half_inv) - &s0.scale(&z.recip())
}

/// Normalized product coefficient at `n` reassembled from the decomposition.
pub fn normalized_product(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - ell;
    let r = sigma_ratio(ell, k, chi);
    let z = zeta_ratio(weight, ell, chi);
    let one = Cyclotomic::one(chi.order());
    let sk = Cyclotomic::from_bigint(1, tperiods::qforms::sigma_classical(weight - 1, n));
    let num = &(&(&sigma_twisted(ell - 1, chi, n) + &(&r * &sigma_twisted(k - 1, &chi.conj(), n)))
        - &(&z * &sk))
        + &(&e_term(weight, ell, chi, n) + &script_e_term(weight, ell, chi, n));
    let den = &(&(&one + &r) - &z) + &script_e_term(weight, ell, chi, 1);
    num.checked_div(&den).expect("nonzero first coefficient")
}

/// Normalized bracket coefficient at `n` reassembled from the decomposition.
pub fn normalized_bracket(weight: u32, ell: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    let k = weight - 2 - ell;
    let rl = sigma_ratio(ell, k, chi).scale(&ell_over_k(ell, k));
    let nn = rational_int(n as i64);
    let one = Cyclotomic::one(chi.order());
    let head = &sigma_twisted(ell - 1, chi, n).scale(&nn)
        + &(&rl * &sigma_twisted(k - 1, &chi.conj(), n).scale(&nn));
    let tail = [
        r_term(weight, ell, chi, n),
        r_prime_term(weight, ell, chi, n),
        script_r_term(weight, ell, chi, n),
        script_r_prime_term(weight, ell, chi, n),
    ];
    let num = tail.iter().fold(head, |acc, t| &acc + t);
    let den = &(&one + &rl) + &(&script_r_term(weight, ell, chi, 1) + &script_r_prime_term(weight, ell, chi, 1));
    num.checked_div(&den).expect("nonzero first coefficient")
}
