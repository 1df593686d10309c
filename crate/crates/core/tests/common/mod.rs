//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

pub mod error_terms;
pub mod series;

use num_bigint::BigInt;
use num_integer::lcm;
use tperiods::chars::{CharFilter, DirichletCharacter};
use tperiods::exact::{Cyclotomic, Rational};

/// Odd square-free moduli up to `max`.
pub fn moduli(max: u64) -> Vec<u64> {
    (1..=max).filter(|&d| tperiods::chars::is_odd_squarefree(d)).collect()
}

pub fn primitive(modulus: u64) -> Vec<DirichletCharacter> {
    DirichletCharacter::enumerate(modulus, CharFilter::Primitive).unwrap()
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `B_{n,chi}` for `n = 0..=n_max` from the expansion
/// `sum_a chi(a) t e^{at} / (e^{Dt} - 1) = sum_n B_{n,chi} t^n / n!`,
/// computed as the power-series quotient of `sum_a chi(a) e^{at}` by
/// `sum_j D^{j+1} t^j / (j+1)!`.
pub fn bernoulli_generating_function(chi: &DirichletCharacter, n_max: u32) -> Vec<Cyclotomic> {
    let d = chi.modulus();
    let order = chi.order();
    let num: Vec<Cyclotomic> = (0..=n_max)
        .map(|j| {
            let fj = Rational::from_integer(factorial(j));
            (1..=d).fold(Cyclotomic::zero(order), |acc, a| {
                let term = chi.evaluate(a as i64).scale(&Rational::from_integer(BigInt::from(a).pow(j)));
                &acc + &term
            })
            .scale(&fj.recip())
        })
        .collect();
    let den: Vec<Rational> = (0..=n_max)
        .map(|j| Rational::new(BigInt::from(d).pow(j + 1), factorial(j + 1)))
        .collect();
    let mut quot: Vec<Cyclotomic> = Vec::new();
    for j in 0..=n_max as usize {
        let mut r = num[j].clone();
        for i in 0..j {
            r = &r - &quot[i].scale(&den[j - i]);
        }
        quot.push(r.scale(&den[0].recip()));
    }
    quot.into_iter()
        .enumerate()
        .map(|(n, q)| q.scale(&Rational::from_integer(factorial(n as u32))))
        .collect()
}

/// Determinant by Laplace expansion along the first row.
pub fn det_cofactor(m: &[Vec<Cyclotomic>]) -> Cyclotomic {
    let n = m.len();
    let order = m.iter().flatten().fold(1, |acc, e| lcm(acc, e.order()));
    if n == 0 {
        return Cyclotomic::one(order);
    }
    let mut acc = Cyclotomic::zero(order);
    for j in 0..n {
        let minor: Vec<Vec<Cyclotomic>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let t = &m[0][j] * &det_cofactor(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// `tau(1..=n)` from `q prod (1 - q^m)^24`.
pub fn tau_product(n: usize) -> Vec<i128> {
    // coefficients of prod (1 - q^m)^24 up to q^(n-1)
    let mut p = vec![0i128; n];
    p[0] = 1;
    for m in 1..n {
        for _ in 0..24 {
            for i in (m..n).rev() {
                p[i] -= p[i - m];
            }
        }
    }
    p
}

/// `sum_{a=1}^{D} chi(a) zeta_D^a` assembled in the field of order `lcm(ord chi, D)`.
pub fn gauss_sum_direct(chi: &DirichletCharacter) -> Cyclotomic {
    let d = chi.modulus();
    let big = lcm(chi.order(), d);
    let mut acc = Cyclotomic::zero(big);
    for a in 1..=d {
        if let Some(e) = chi.value_exponent(a as i64) {
            let value = Cyclotomic::root_of_unity(big, e * (big / chi.order()));
            let twist = Cyclotomic::root_of_unity(big, a * (big / d));
            acc = &acc + &(&value * &twist);
        }
    }
    acc
}

/// Line printed by the acceptance suite for one criterion.
pub fn report_line(index: usize, title: &str, passed: bool, detail: &str) -> String {
    format!(
        "criterion {index:>2} [{title}]: {} {detail}",
        if passed { "PASS" } else { "FAIL" }
    )
}
