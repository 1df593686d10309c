//! Explicit bounds in double precision, weight thresholds, and the exact error
//! terms they control.

use std::f64::consts::{E as EULER, PI};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::chars::is_odd_squarefree;
use crate::cycmat::MatrixKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("{name}: hypothesis violated: {hypothesis}")]
    Hypothesis { name: BoundName, hypothesis: String },
    #[error("maeda: hypothesis violated: {0}")]
    Maeda(String),
    #[error("{name}: missing parameter {param}")]
    Missing { name: BoundName, param: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundName {
    #[serde(rename = "sigma_ratio")]
    SigmaRatio,
    #[serde(rename = "zeta_ratio")]
    ZetaRatio,
    E,
    R,
    Rprime,
    #[serde(rename = "scriptE")]
    ScriptE,
    #[serde(rename = "scriptR")]
    ScriptR,
    #[serde(rename = "scriptRprime")]
    ScriptRprime,
    #[serde(rename = "det_lb_M")]
    DetLbM,
    #[serde(rename = "det_lb_N")]
    DetLbN,
    #[serde(rename = "det_lb_P")]
    DetLbP,
    #[serde(rename = "det_lb_Q")]
    DetLbQ,
    #[serde(rename = "f_env")]
    FEnv,
}

impl BoundName {
    pub const ALL: [BoundName; 13] = [
        BoundName::SigmaRatio,
        BoundName::ZetaRatio,
        BoundName::E,
        BoundName::R,
        BoundName::Rprime,
        BoundName::ScriptE,
        BoundName::ScriptR,
        BoundName::ScriptRprime,
        BoundName::DetLbM,
        BoundName::DetLbN,
        BoundName::DetLbP,
        BoundName::DetLbQ,
        BoundName::FEnv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::SigmaRatio => "sigma_ratio",
            BoundName::ZetaRatio => "zeta_ratio",
            BoundName::E => "E",
            BoundName::R => "R",
            BoundName::Rprime => "Rprime",
            BoundName::ScriptE => "scriptE",
            BoundName::ScriptR => "scriptR",
            BoundName::ScriptRprime => "scriptRprime",
            BoundName::DetLbM => "det_lb_M",
            BoundName::DetLbN => "det_lb_N",
            BoundName::DetLbP => "det_lb_P",
            BoundName::DetLbQ => "det_lb_Q",
            BoundName::FEnv => "f_env",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown bound {s:?}"))
    }
}

/// Parameters shared by all bounds; each bound reads the fields it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    /// Second Eisenstein weight for `sigma_ratio`; defaults to `K - l`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Coefficient index for the error terms, matrix size for the determinant bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ells: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

impl BoundParams {
    pub fn new(modulus: u64) -> Self {
        BoundParams {
            modulus,
            ..Default::default()
        }
    }

    pub fn weight(mut self, k: u32) -> Self {
        self.weight = Some(k);
        self
    }

    pub fn ell(mut self, l: u32) -> Self {
        self.ell = Some(l);
        self
    }

    pub fn k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn j(mut self, j: u32) -> Self {
        self.j = Some(j);
        self
    }

    pub fn ells(mut self, ells: Vec<u32>) -> Self {
        self.ells = ells;
        self
    }

    pub fn m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: BoundName,
    pub params: BoundParams,
    pub value: f64,
    pub certified: bool,
}

impl BoundReport {
    pub fn eval(name: BoundName, params: BoundParams) -> Result<Self, BoundError> {
        let value = bound_eval(name, &params)?;
        Ok(BoundReport {
            name,
            params,
            value,
            certified: value < 1.0,
        })
    }
}

/// Riemann zeta for real `s > 1`: direct sum plus an Euler-Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta({s}) outside the half-plane of convergence");
    const N: usize = 16;
    let n = N as f64;
    let head: f64 = (1..N).map(|m| (m as f64).powf(-s)).sum();
    // tail from N: N^{1-s}/(s-1) + N^{-s}/2 + Bernoulli corrections
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let b2k = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut fact = 2.0; // (2k)!
    for (i, b) in b2k.iter().enumerate() {
        let k2 = 2 * i + 1; // 2k - 1
        tail += b / fact * rising * n.powf(-s - k2 as f64);
        rising *= (s + k2 as f64) * (s + k2 as f64 + 1.0);
        fact *= ((k2 + 2) * (k2 + 3)) as f64;
    }
    head + tail
}

fn need<T: Copy>(name: BoundName, v: Option<T>, param: &'static str) -> Result<T, BoundError> {
    v.ok_or(BoundError::Missing { name, param })
}

fn hyp(name: BoundName, ok: bool, hypothesis: impl Into<String>) -> Result<(), BoundError> {
    if ok {
        Ok(())
    } else {
        Err(BoundError::Hypothesis {
            name,
            hypothesis: hypothesis.into(),
        })
    }
}

fn check_modulus(name: BoundName, d: u64) -> Result<(), BoundError> {
    hyp(name, is_odd_squarefree(d), format!("D = {d} odd square-free"))
}

fn product_range(name: BoundName, weight: u32, ell: u32) -> Result<(), BoundError> {
    hyp(name, weight.is_multiple_of(2), format!("K = {weight} even"))?;
    hyp(name, ell >= 3 && 2 * ell <= weight, format!("3 <= l = {ell} <= K/2 = {}", weight / 2))
}

fn bracket_range(name: BoundName, weight: u32, ell: u32) -> Result<(), BoundError> {
    hyp(name, weight.is_multiple_of(2), format!("K = {weight} even"))?;
    hyp(
        name,
        ell >= 3 && 2 * ell + 4 <= weight,
        format!("3 <= l = {ell} <= (K-4)/2 = {}", weight.saturating_sub(4) / 2),
    )
}

fn small_term(c: f64, n: u64, weight: u32, d: u64) -> f64 {
    let n2 = (n as f64).powi(2);
    c * (PI * EULER * n2 / ((weight as f64 - 2.0) * d as f64)).powf((weight as f64 - 1.0) / 2.0)
}

fn level_term(c: f64, n: u64, weight: u32, d: u64) -> f64 {
    let n2 = (n as f64).powi(2);
    c * (PI * EULER * d as f64 * n2 / (weight as f64 - 2.0)).powf((weight as f64 - 1.0) / 2.0)
}

fn ell_product(name: BoundName, ells: &[u32]) -> Result<f64, BoundError> {
    hyp(name, !ells.is_empty(), "n >= 1 indices")?;
    hyp(
        name,
        ells.windows(2).all(|w| w[0] < w[1] && (w[1] - w[0]) % 2 == 0),
        format!("indices {ells:?} strictly increasing with equal parity"),
    )?;
    hyp(name, ells[0] >= 2, "l_1 >= 2")?;
    Ok(ells
        .iter()
        .enumerate()
        .map(|(i, &l)| 2f64.powf((i as f64) * (l as f64 - 1.0)))
        .product())
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Right-hand side of the named inequality.
pub fn bound_eval(name: BoundName, p: &BoundParams) -> Result<f64, BoundError> {
    use BoundName::*;
    let d = p.modulus;
    match name {
        SigmaRatio => {
            check_modulus(name, d)?;
            let l = need(name, p.ell, "ell")?;
            let k = match p.k {
                Some(k) => k,
                None => need(name, p.weight, "weight or k")?.saturating_sub(l),
            };
            hyp(name, k >= l && l >= 2, format!("k = {k} >= l = {l} >= 2"))?;
            if k == l {
                return Ok(6.0);
            }
            let (l, k) = (l as f64, k as f64);
            Ok(6.0 * ((l - 1.0) / (k - 1.0)).powf(l - 0.5) * (2.0 * PI * EULER / ((k - 1.0) * d as f64)).powf(k - l))
        }
        ZetaRatio => {
            check_modulus(name, d)?;
            let w = need(name, p.weight, "weight")?;
            let l = need(name, p.ell, "ell")?;
            product_range(name, w, l)?;
            let (l, w) = (l as f64, w as f64);
            Ok(2.0 * ((l - 1.0) * d as f64 / (w - 1.0)).powf(l - 0.5) * (2.0 * PI * EULER / (w - 1.0)).powf(w - l))
        }
        E | ScriptE => {
            check_modulus(name, d)?;
            let w = need(name, p.weight, "weight")?;
            let l = need(name, p.ell, "ell")?;
            let n = need(name, p.n, "n")?;
            product_range(name, w, l)?;
            hyp(name, n >= 1, "n >= 1")?;
            Ok(if name == E {
                small_term(9.25, n, w, d)
            } else {
                level_term(16.0, n, w, d)
            })
        }
        R | Rprime | ScriptR | ScriptRprime => {
            check_modulus(name, d)?;
            let w = need(name, p.weight, "weight")?;
            let l = need(name, p.ell, "ell")?;
            let n = need(name, p.n, "n")?;
            bracket_range(name, w, l)?;
            hyp(name, n >= 1, "n >= 1")?;
            Ok(match name {
                R => small_term(9.25, n, w, d),
                Rprime => small_term(18.5, n, w, d),
                ScriptR => level_term(16.0, n, w, d),
                _ => level_term(31.0, n, w, d),
            })
        }
        DetLbM | DetLbN => {
            let prod = ell_product(name, &p.ells)?;
            let n = p.ells.len() as u64;
            let base: f64 = if name == DetLbM { 0.75 } else { 1.5 };
            Ok(base.powf(pairs(n)) * prod)
        }
        DetLbP | DetLbQ => {
            hyp(name, d >= 1, "D >= 1")?;
            let l = need(name, p.ell, "ell")?;
            let n = need(name, p.n, "n")?;
            hyp(name, n >= 1, "n >= 1")?;
            let shift = if name == DetLbP { 1 } else { 2 };
            Ok((2f64.powi((l + shift) as i32) / d as f64).powf(pairs(n)))
        }
        FEnv => {
            let m = need(name, p.m, "m")?;
            let n = need(name, p.n, "n")?;
            hyp(name, m >= 0.0, format!("M = {m} >= 0"))?;
            Ok((1.0 + m).powf(n as f64) - 1.0)
        }
    }
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Largest admissible `sup |f(eps)|` in the non-singularity criterion for a matrix of size `n`.
pub fn perturbation_budget(kind: MatrixKind, n: u64, modulus: u64) -> f64 {
    let base = match kind {
        MatrixKind::M | MatrixKind::N => 0.75,
        MatrixKind::P | MatrixKind::Q => 4.0 / modulus as f64,
        other => panic!("no perturbation budget for {other:?}"),
    };
    base.powf(pairs(n)) * 2f64.powf(1.0 - n as f64) / factorial(n)
}

/// Certified lower bound for `|det|` of an `M` or `N` matrix whose relative
/// perturbations are at most `max_eps` in modulus.
pub fn det_lower_bound(kind: MatrixKind, ells: &[u32], max_eps: f64) -> Result<f64, BoundError> {
    let (name, scale) = match kind {
        MatrixKind::M => (BoundName::DetLbM, 1.0),
        MatrixKind::N => (BoundName::DetLbN, 2f64.powf(pairs(ells.len() as u64))),
        other => panic!("no index-list lower bound for {other:?}"),
    };
    let n = ells.len() as u64;
    let params = BoundParams::new(1).ells(ells.to_vec());
    let main = bound_eval(name, &params)?;
    let f = bound_eval(BoundName::FEnv, &BoundParams::new(1).m(max_eps).n(n))?;
    let prod = ell_product(name, ells)?;
    Ok(main - factorial(n) * f * scale * 2f64.powf(n as f64 - 1.0) * prod)
}

/// Upper bound for `|eps_{K,D}|` with `a_{K,K/2,chi}(1) = 2 s_{K/2-1,chi}(0) (1 + eps)`.
pub fn epsilon_maeda(weight: u32, modulus: u64) -> Result<f64, BoundError> {
    if weight % 2 == 1 || weight < 6 {
        return Err(BoundError::Maeda(format!("K = {weight} even with K/2 >= 3")));
    }
    if !is_odd_squarefree(modulus) {
        return Err(BoundError::Maeda(format!("D = {modulus} odd square-free")));
    }
    let (w, d) = (weight as f64, modulus as f64);
    let k = w / 2.0;
    let first = zeta(k - 1.0).powi(2) * zeta(w - 1.0) / (EULER.sqrt() * (2.0 - zeta(k)))
        * (PI * EULER * d / (w - 2.0)).powf((w - 1.0) / 2.0);
    let second = EULER * zeta(k) / (2.0 * (2.0 * PI).sqrt()) * (3.0 / d).sqrt() * (PI * EULER * d / (w - 1.0)).powf(k);
    Ok(first + second)
}

/// The estimate valid uniformly for `K - 2 >= 10 D`: the two summands with
/// `pi e D / (K-2)` and `pi e D / (K-1)` replaced by `pi e / 10` and the zeta
/// factors taken at `K = 12`.
pub fn epsilon_maeda_limit() -> f64 {
    let base = PI * EULER / 10.0;
    zeta(5.0).powi(2) * zeta(11.0) / (EULER.sqrt() * (2.0 - zeta(6.0))) * base.powf(5.5)
        + EULER * zeta(6.0) / (2.0 * (2.0 * PI).sqrt()) * 3f64.sqrt() * base.powi(6)
}

/// Term-by-term bound on `|ratio - 1|` where `ratio = (1 + sum t) / (1 + sum u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub numerator: Vec<BoundReport>,
    pub denominator: Vec<BoundReport>,
    pub value: f64,
}

impl Aggregate {
    fn assemble(numerator: Vec<(BoundReport, f64)>, denominator: Vec<(BoundReport, f64)>) -> Self {
        let t: f64 = numerator.iter().map(|(_, s)| s).sum();
        let u: f64 = denominator.iter().map(|(_, s)| s).sum();
        let value = if u < 1.0 { (t + u) / (1.0 - u) } else { f64::INFINITY };
        let strip = |v: Vec<(BoundReport, f64)>| {
            v.into_iter()
                .map(|(mut r, scaled)| {
                    r.value = scaled;
                    r.certified = scaled < 1.0;
                    r
                })
                .collect()
        };
        Aggregate {
            numerator: strip(numerator),
            denominator: strip(denominator),
            value,
        }
    }
}

fn scaled(name: BoundName, params: BoundParams, factor: f64) -> Result<(BoundReport, f64), BoundError> {
    let r = BoundReport::eval(name, params)?;
    let v = r.value * factor;
    Ok((r, v))
}

/// Bound on `|a(2^j) / s_{l-1,chi}(2^j) - 1|` for the normalized product kernel.
pub fn asym_product(weight: u32, ell: u32, j: u32, modulus: u64) -> Result<Aggregate, BoundError> {
    let k = weight - ell;
    let base = BoundParams::new(modulus).weight(weight).ell(ell);
    let p2 = 2f64.powi(j as i32);
    let lower = 2.0 * p2.powf(-(ell as f64 - 1.0));
    let num = vec![
        scaled(BoundName::SigmaRatio, base.clone().k(k), 4.0 * p2.powf((k - ell) as f64))?,
        scaled(BoundName::ZetaRatio, base.clone(), 4.0 * p2.powf((weight - ell) as f64))?,
        scaled(BoundName::E, base.clone().n(1 << j), lower)?,
        scaled(BoundName::ScriptE, base.clone().n(1 << j), lower)?,
    ];
    let den = vec![
        scaled(BoundName::SigmaRatio, base.clone().k(k), 1.0)?,
        scaled(BoundName::ZetaRatio, base.clone(), 1.0)?,
        scaled(BoundName::ScriptE, base.n(1), 1.0)?,
    ];
    Ok(Aggregate::assemble(num, den))
}

/// Bound on `|b(2^j) / (2^j s_{l-1,chi}(2^j)) - 1|` for the normalized bracket kernel.
pub fn asym_bracket(weight: u32, ell: u32, j: u32, modulus: u64) -> Result<Aggregate, BoundError> {
    let k = weight - 2 - ell;
    let base = BoundParams::new(modulus).weight(weight).ell(ell);
    let p2 = 2f64.powi(j as i32);
    let ratio = ell as f64 / k as f64;
    let lower = 2.0 * p2.powf(-(ell as f64 - 1.0)) / p2;
    let at = |name| scaled(name, base.clone().n(1 << j), lower);
    let num = vec![
        scaled(BoundName::SigmaRatio, base.clone().k(k), ratio * 4.0 * p2.powf((k - ell) as f64))?,
        at(BoundName::R)?,
        at(BoundName::Rprime)?,
        at(BoundName::ScriptR)?,
        at(BoundName::ScriptRprime)?,
    ];
    let den = vec![
        scaled(BoundName::SigmaRatio, base.clone().k(k), ratio)?,
        scaled(BoundName::ScriptR, base.clone().n(1), 1.0)?,
        scaled(BoundName::ScriptRprime, base.n(1), 1.0)?,
    ];
    Ok(Aggregate::assemble(num, den))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "predicate", rename_all = "snake_case")]
pub enum Threshold {
    AsymProduct { j: u32, modulus: u64, tol: f64 },
    AsymBracket { j: u32, modulus: u64, tol: f64 },
    Maeda { modulus: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MinWeight {
    Found {
        weight: u32,
        value: f64,
        /// Worst aggregate over the index range (empty for the Maeda predicate).
        certificate: Option<Aggregate>,
    },
    NotFound { cap: u32 },
}

pub const DEFAULT_WEIGHT_CAP: u32 = 2000;

/// Worst aggregate over every index of the kind's range at weight `K`.
fn sup_aggregate(
    max_ell: u32,
    eval: impl Fn(u32) -> Result<Aggregate, BoundError>,
) -> Result<Option<Aggregate>, BoundError> {
    let mut worst: Option<Aggregate> = None;
    for ell in 3..=max_ell {
        let a = eval(ell)?;
        if worst.as_ref().is_none_or(|w| a.value > w.value) {
            worst = Some(a);
        }
    }
    Ok(worst)
}

/// Smallest even weight at which the predicate is certified, scanning up to `cap`.
pub fn min_weight(predicate: Threshold, cap: u32) -> Result<MinWeight, BoundError> {
    let start = match predicate {
        Threshold::AsymProduct { .. } => 8,
        Threshold::AsymBracket { .. } => 10,
        Threshold::Maeda { .. } => 6,
    };
    for weight in (start..=cap).step_by(2) {
        match predicate {
            Threshold::AsymProduct { j, modulus, tol } | Threshold::AsymBracket { j, modulus, tol } => {
                let product = matches!(predicate, Threshold::AsymProduct { .. });
                let worst = if product {
                    sup_aggregate((weight - 2) / 2, |l| asym_product(weight, l, j, modulus))?
                } else {
                    sup_aggregate((weight - 4) / 2, |l| asym_bracket(weight, l, j, modulus))?
                };
                if let Some(agg) = worst {
                    if agg.value < tol {
                        return Ok(MinWeight::Found {
                            weight,
                            value: agg.value,
                            certificate: Some(agg),
                        });
                    }
                }
            }
            Threshold::Maeda { modulus } => {
                let value = epsilon_maeda(weight, modulus)?;
                if value < 1.0 {
                    return Ok(MinWeight::Found {
                        weight,
                        value,
                        certificate: None,
                    });
                }
            }
        }
    }
    Ok(MinWeight::NotFound { cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zeta_values() {
        assert!(close(zeta(2.0), PI * PI / 6.0, 1e-12));
        assert!(close(zeta(4.0), PI.powi(4) / 90.0, 1e-12));
        assert!(close(zeta(3.0), 1.202_056_903_159_594_2, 1e-12));
        assert!(close(zeta(2.5), 1.341_487_257_250_917, 1e-12));
    }

    #[test]
    fn named_examples() {
        let f = bound_eval(BoundName::FEnv, &BoundParams::new(1).m(0.0).n(5)).unwrap();
        assert_eq!(f, 0.0);
        let e = bound_eval(BoundName::E, &BoundParams::new(1).weight(16).ell(3).n(1)).unwrap();
        assert!(close(e, 9.25 * (PI * EULER / 14.0).powf(7.5), 1e-12));
        assert!(close(e, 0.227, 5e-4), "{e}");
        let m1 = bound_eval(BoundName::DetLbM, &BoundParams::new(1).ells(vec![5])).unwrap();
        assert_eq!(m1, 1.0);
        let m2 = bound_eval(BoundName::DetLbM, &BoundParams::new(1).ells(vec![4, 6])).unwrap();
        assert_eq!(m2, 0.75 * 32.0);
        let q = bound_eval(BoundName::DetLbQ, &BoundParams::new(5).ell(3).n(2)).unwrap();
        assert!(close(q, 32.0 / 5.0, 1e-12));
    }

    #[test]
    fn hypotheses_are_named() {
        let err = bound_eval(BoundName::R, &BoundParams::new(1).weight(16).ell(7).n(1)).unwrap_err();
        assert!(err.to_string().contains("(K-4)/2"), "{err}");
        let err = bound_eval(BoundName::E, &BoundParams::new(9).weight(16).ell(3).n(1)).unwrap_err();
        assert!(err.to_string().contains("square-free"));
        let err = bound_eval(BoundName::ScriptE, &BoundParams::new(1).weight(16).ell(3)).unwrap_err();
        assert_eq!(err, BoundError::Missing { name: BoundName::ScriptE, param: "n" });
        assert!(bound_eval(BoundName::FEnv, &BoundParams::new(1).m(-1.0).n(2)).is_err());
        assert!(bound_eval(BoundName::DetLbM, &BoundParams::new(1).ells(vec![4, 5])).is_err());
    }

    #[test]
    fn maeda_values() {
        assert!(close(epsilon_maeda_limit(), 0.65, 0.01));
        for d in [1u64, 3, 5, 7] {
            let vals: Vec<f64> = [0, 10, 20]
                .iter()
                .map(|s| epsilon_maeda(10 * d as u32 + 2 + s, d).unwrap())
                .collect();
            assert!(vals[0] < 1.0, "D={d}: {}", vals[0]);
            assert!(vals[0] <= epsilon_maeda_limit() + 1e-9);
            assert!(vals[0] > vals[1] && vals[1] > vals[2]);
        }
    }

    #[test]
    fn thresholds() {
        match min_weight(Threshold::Maeda { modulus: 1 }, 100).unwrap() {
            MinWeight::Found { weight, .. } => assert!(weight <= 12),
            other => panic!("{other:?}"),
        }
        let found = min_weight(Threshold::AsymProduct { j: 0, modulus: 1, tol: 0.5 }, 400).unwrap();
        let MinWeight::Found { weight, value, certificate } = found else {
            panic!("not found")
        };
        assert!(value < 0.5 && weight % 2 == 0 && certificate.is_some());
        if weight > 8 {
            let below = (3..=(weight - 4) / 2)
                .map(|l| asym_product(weight - 2, l, 0, 1).unwrap().value)
                .fold(0.0, f64::max);
            assert!(below >= 0.5);
        }
        assert_eq!(
            min_weight(Threshold::AsymProduct { j: 0, modulus: 1, tol: 0.0 }, 60).unwrap(),
            MinWeight::NotFound { cap: 60 }
        );
        assert!(matches!(
            min_weight(Threshold::AsymBracket { j: 1, modulus: 3, tol: 0.5 }, 600).unwrap(),
            MinWeight::Found { .. }
        ));
    }
}
