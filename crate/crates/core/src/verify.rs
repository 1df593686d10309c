//! Verification tasks producing machine-readable reports.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bernoulli::{bernoulli_number, generalized_bernoulli, sigma0};
use crate::bounds;
use crate::chars::{is_odd_prime, is_odd_squarefree, CharError, CharFilter, DirichletCharacter, Parity};
use crate::cycmat::{conjecture_matrix_from_tables, MatrixKind};
use crate::exact::{rational, rational_int, Cyclotomic};
use crate::kernels::{self, CoeffTable, KernelKind, KernelSpec};
use crate::qforms::{cusp_dim, sigma_double};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("dim S_{weight} = {dim}, expected 0")]
    NonzeroDimension { weight: u32, dim: usize },
    #[error("weight {0} must be even")]
    OddWeight(u32),
    #[error("{0:?} is not a conjecture matrix")]
    NotConjecture(MatrixKind),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Chars(#[from] CharError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Counterexample,
    Degenerate,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub case: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Cyclotomic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Cyclotomic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det: Option<Cyclotomic>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub values: Map<String, Value>,
}

impl Witness {
    fn new(case: String, passed: bool) -> Self {
        Witness {
            case,
            passed,
            lhs: None,
            rhs: None,
            det: None,
            values: Map::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.values
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skipped {
    pub case: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub task: String,
    pub params: Value,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub skipped: Vec<Skipped>,
    pub timing_ms: u64,
}

impl VerificationReport {
    fn finish(task: &str, params: Value, witnesses: Vec<Witness>, skipped: Vec<Skipped>, start: Instant) -> Self {
        let status = if witnesses.iter().all(|w| w.passed) {
            Status::Verified
        } else {
            Status::Counterexample
        };
        VerificationReport {
            task: task.to_string(),
            params,
            status,
            witnesses,
            skipped,
            timing_ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn failures(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| !w.passed)
    }

    /// Same report with the wall-clock field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            timing_ms: 0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentitySet {
    Product,
    Bracket,
    All,
}

impl std::str::FromStr for IdentitySet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(IdentitySet::Product),
            "bracket" => Ok(IdentitySet::Bracket),
            "all" => Ok(IdentitySet::All),
            other => Err(format!("unknown identity set {other:?}")),
        }
    }
}

/// `(l, k)` with `l + k = K`, `3 <= l <= K/2` and `dim S_K = 0`.
pub const PRODUCT_PAIRS: [(u32, u32); 10] = [
    (3, 3),
    (3, 5),
    (3, 7),
    (3, 11),
    (4, 4),
    (4, 6),
    (4, 10),
    (5, 5),
    (5, 9),
    (7, 7),
];

/// `(l, k)` with `l + k = K - 2`, `l <= (K-4)/2` and `dim S_K = 0`.
pub const BRACKET_PAIRS: [(u32, u32); 4] = [(3, 5), (3, 9), (4, 8), (5, 7)];

// s_{w,1,chi} with the trivial character mod 1 in the first slot
fn sigma_1chi(w: u32, chi: &DirichletCharacter, n: u64) -> Cyclotomic {
    sigma_double(w, &DirichletCharacter::trivial(), chi, n)
}

/// `sum_{n=1}^{p} s_{l-1,1,chibar}(n) s_{k-1,1,chi}(p-n)`.
pub fn product_identity_lhs(ell: u32, k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let p = chi.modulus();
    let chib = chi.conj();
    let order = chi.order();
    (1..=p).fold(Cyclotomic::zero(order), |acc, n| {
        &acc + &(&sigma_1chi(ell - 1, &chib, n) * &sigma_1chi(k - 1, chi, p - n))
    })
}

/// `-chi(-1) (-B_{k,chibar}/2k - B_{l,chi}/2l + K B_{k,chibar} B_{l,chi} / (2 k l B_K))`.
pub fn product_identity_rhs(ell: u32, k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let weight = ell + k;
    let bk = generalized_bernoulli(k, &chi.conj());
    let bl = generalized_bernoulli(ell, chi);
    let cross = (&bk * &bl).scale(
        &(rational_int(weight as i64) / (rational_int(2 * (k * ell) as i64) * bernoulli_number(weight))),
    );
    let inner = &(&cross - &bk.scale(&rational(1, 2 * k as i64))) - &bl.scale(&rational(1, 2 * ell as i64));
    inner.scale(&rational_int(-chi.parity().sign()))
}

/// `sum_{n=1}^{p-1} s_{l-1,1,chibar}(n) s_{k-1,1,chi}(p-n) (l (p-n) - k n)`.
pub fn bracket_identity_lhs(ell: u32, k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let p = chi.modulus();
    let chib = chi.conj();
    let order = chi.order();
    (1..p).fold(Cyclotomic::zero(order), |acc, n| {
        let w = (ell as i64) * (p - n) as i64 - (k as i64) * n as i64;
        let t = &sigma_1chi(ell - 1, &chib, n) * &sigma_1chi(k - 1, chi, p - n);
        &acc + &t.scale(&rational_int(w))
    })
}

/// `-chi(-1) p (B_{k,chibar} - B_{l,chi}) / 2`.
pub fn bracket_identity_rhs(ell: u32, k: u32, chi: &DirichletCharacter) -> Cyclotomic {
    let p = chi.modulus() as i64;
    let diff = &generalized_bernoulli(k, &chi.conj()) - &generalized_bernoulli(ell, chi);
    diff.scale(&rational(-chi.parity().sign() * p, 2))
}

fn primitive_characters(modulus: u64) -> Result<Vec<DirichletCharacter>, VerifyError> {
    Ok(DirichletCharacter::enumerate(modulus, CharFilter::Primitive)?)
}

/// Convolution identities for every primitive character mod `p`.
pub fn verify_identities(p: u64, set: IdentitySet) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if !is_odd_prime(p) {
        return Err(VerifyError::NotPrime(p));
    }
    let chars = primitive_characters(p)?;
    let mut families: Vec<(&str, &[(u32, u32)])> = Vec::new();
    if set != IdentitySet::Bracket {
        families.push(("product", &PRODUCT_PAIRS));
    }
    if set != IdentitySet::Product {
        families.push(("bracket", &BRACKET_PAIRS));
    }
    let mut witnesses = Vec::new();
    let mut skipped = Vec::new();
    for (family, pairs) in families {
        for chi in &chars {
            for &(ell, k) in pairs {
                let case = format!("{family} (l,k)=({ell},{k}) chi={chi}");
                if chi.parity() != Parity::of_weight(ell) {
                    skipped.push(Skipped {
                        case,
                        reason: format!("chi(-1) = {} differs from (-1)^{ell}", chi.parity().sign()),
                    });
                    continue;
                }
                let (lhs, rhs) = if family == "product" {
                    (product_identity_lhs(ell, k, chi), product_identity_rhs(ell, k, chi))
                } else {
                    (bracket_identity_lhs(ell, k, chi), bracket_identity_rhs(ell, k, chi))
                };
                let mut w = Witness::new(case, lhs == rhs);
                w.lhs = Some(lhs);
                w.rhs = Some(rhs);
                witnesses.push(w);
            }
        }
    }
    let task = match set {
        IdentitySet::Product => "identities_product",
        IdentitySet::Bracket => "identities_bracket",
        IdentitySet::All => "identities",
    };
    Ok(VerificationReport::finish(
        task,
        json!({"p": p, "set": set}),
        witnesses,
        skipped,
        start,
    ))
}

pub fn verify_identities_product(p: u64) -> Result<VerificationReport, VerifyError> {
    verify_identities(p, IdentitySet::Product)
}

pub fn verify_identities_bracket(p: u64) -> Result<VerificationReport, VerifyError> {
    verify_identities(p, IdentitySet::Bracket)
}

fn all_specs(weight: u32, modulus: u64) -> Result<Vec<KernelSpec>, VerifyError> {
    let chars = primitive_characters(modulus)?;
    let mut specs = KernelSpec::all_valid(KernelKind::Product, weight, &chars);
    specs.extend(KernelSpec::all_valid(KernelKind::Bracket, weight, &chars));
    Ok(specs)
}

fn spec_case(spec: &KernelSpec) -> String {
    format!(
        "{} K={} l={} chi={}",
        match spec.kind() {
            KernelKind::Product => "product",
            KernelKind::Bracket => "bracket",
        },
        spec.weight(),
        spec.ell(),
        spec.chi()
    )
}

/// Every kernel coefficient up to `n_max` vanishes when `S_K = 0`.
pub fn verify_zero_space(weight: u32, modulus: u64, n_max: usize) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if weight % 2 == 1 {
        return Err(VerifyError::OddWeight(weight));
    }
    let dim = cusp_dim(weight);
    if dim != 0 {
        return Err(VerifyError::NonzeroDimension { weight, dim });
    }
    let specs = all_specs(weight, modulus)?;
    let witnesses = specs
        .par_iter()
        .map(|spec| {
            let t = kernels::coefficients(spec, n_max);
            let nonzero: Vec<usize> = (1..=n_max).filter(|&n| !t.coeff(n).is_zero()).collect();
            Witness::new(spec_case(spec), nonzero.is_empty()).with("nonzero_at", nonzero)
        })
        .collect();
    Ok(VerificationReport::finish(
        "zero_space",
        json!({"K": weight, "D": modulus, "n_max": n_max}),
        witnesses,
        Vec::new(),
        start,
    ))
}

/// Level-one cusp form certificates for every valid spec of weight `K` and modulus `D`.
pub fn verify_cuspidality(weight: u32, modulus: u64) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if weight % 2 == 1 {
        return Err(VerifyError::OddWeight(weight));
    }
    let specs = all_specs(weight, modulus)?;
    let witnesses = specs
        .par_iter()
        .map(|spec| {
            let cert = kernels::cuspidality_certificate(spec);
            Witness::new(spec_case(spec), cert.in_span)
                .with("dim", cert.dim)
                .with("coeff_count", cert.coeff_count)
                .with("residual_zero_through", cert.residual_zero_through)
        })
        .collect();
    Ok(VerificationReport::finish(
        "cuspidality",
        json!({"K": weight, "D": modulus}),
        witnesses,
        Vec::new(),
        start,
    ))
}

/// Selection policy for conjecture scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanOptions {
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Enumerate every `n`-subset when `dim S_K` is at most this; otherwise use
    /// windows of consecutive rows.
    pub exhaustive_dim: usize,
    /// Optional bound on selections per cell.
    pub cap_per_cell: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            jobs: 0,
            exhaustive_dim: 4,
            cap_per_cell: None,
        }
    }
}

/// Lexicographic `n`-subsets of `0..m`.
pub fn subsets(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..n).rev().find(|&i| idx[i] < m - n + i) else {
            return out;
        };
        idx[i] += 1;
        for t in i + 1..n {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn selections(m: usize, n: usize, dim: usize, opts: &ScanOptions) -> Vec<Vec<usize>> {
    let mut sel = if dim <= opts.exhaustive_dim {
        subsets(m, n)
    } else {
        (0..=m - n).map(|s| (s..s + n).collect()).collect()
    };
    if let Some(cap) = opts.cap_per_cell {
        sel.truncate(cap);
    }
    sel
}

struct Cell {
    weight: u32,
    modulus: u64,
}

fn scan_cell(which: MatrixKind, cell: &Cell, opts: &ScanOptions) -> Result<Vec<Witness>, VerifyError> {
    let Cell { weight, modulus } = *cell;
    let dim = cusp_dim(weight);
    let kind = which.kernel_kind();
    let max_ell = which.max_ell(weight);
    let chars = primitive_characters(modulus)?;
    // groups of row specs sharing the fixed parameter
    let mut groups: Vec<(String, Vec<KernelSpec>)> = Vec::new();
    if which.rows_over_characters() {
        for ell in 3..=max_ell {
            let rows: Vec<KernelSpec> = chars
                .iter()
                .filter_map(|c| KernelSpec::new(kind, weight, ell, c.clone()).ok())
                .collect();
            groups.push((format!("l={ell}"), rows));
        }
    } else {
        for chi in &chars {
            let rows: Vec<KernelSpec> = (3..=max_ell)
                .filter_map(|ell| KernelSpec::new(kind, weight, ell, chi.clone()).ok())
                .collect();
            groups.push((format!("chi={chi}"), rows));
        }
    }
    let mut witnesses = Vec::new();
    for (label, rows) in groups {
        let n = rows.len().min(dim);
        if n == 0 {
            continue;
        }
        let tables: Vec<CoeffTable> = rows.iter().map(|s| kernels::coefficients(s, n)).collect();
        for sel in selections(rows.len(), n, dim, opts) {
            let picked: Vec<&CoeffTable> = sel.iter().map(|&i| &tables[i]).collect();
            let det = conjecture_matrix_from_tables(&picked, n)
                .and_then(|m| m.det_exact())
                .expect("square matrix");
            let rows_desc: Vec<String> = if which.rows_over_characters() {
                sel.iter().map(|&i| rows[i].chi().to_string()).collect()
            } else {
                sel.iter().map(|&i| rows[i].ell().to_string()).collect()
            };
            let case = format!("{which:?} K={weight} D={modulus} {label} rows=[{}]", rows_desc.join(","));
            let mut w = Witness::new(case, !det.is_zero()).with("n", n);
            w.det = Some(det);
            witnesses.push(w);
        }
    }
    Ok(witnesses)
}

/// Non-singularity of conjecture matrices over every even `K <= k_max` and odd
/// square-free `D <= d_max`.
pub fn scan_conjectures(
    which: MatrixKind,
    k_max: u32,
    d_max: u64,
    opts: ScanOptions,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if !which.is_conjecture() {
        return Err(VerifyError::NotConjecture(which));
    }
    let mut cells = Vec::new();
    for weight in (4..=k_max).step_by(2) {
        if cusp_dim(weight) == 0 {
            continue;
        }
        for modulus in (1..=d_max).filter(|&d| is_odd_squarefree(d)) {
            cells.push(Cell { weight, modulus });
        }
    }
    let run = || -> Result<Vec<Vec<Witness>>, VerifyError> {
        cells.par_iter().map(|c| scan_cell(which, c, &opts)).collect()
    };
    let per_cell = if opts.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| VerifyError::Pool(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    Ok(VerificationReport::finish(
        "scan_conjectures",
        json!({
            "matrix": which,
            "K_max": k_max,
            "D_max": d_max,
            "exhaustive_dim": opts.exhaustive_dim,
            "cap_per_cell": opts.cap_per_cell,
        }),
        per_cell.into_iter().flatten().collect(),
        Vec::new(),
        start,
    ))
}

fn maeda_case(weight: u32, chi: &DirichletCharacter) -> Witness {
    let modulus = chi.modulus();
    let spec = KernelSpec::new(KernelKind::Product, weight, weight / 2, chi.clone()).expect("sign hypothesis holds");
    let a1 = kernels::coefficients(&spec, 1).values.remove(0);
    let two_s0 = sigma0(weight / 2, chi).scale(&rational_int(2));
    let eps = (&a1.checked_div(&two_s0).expect("nonzero constant term") - &Cyclotomic::one(1))
        .embed()
        .norm();
    let bound = bounds::epsilon_maeda(weight, modulus).expect("valid weight");
    let passed = !a1.is_zero() && eps < 1.0 && eps <= bound + 1e-9;
    let mut w = Witness::new(format!("K={weight} D={modulus}"), passed)
        .with("eps", eps)
        .with("bound", bound);
    w.values.insert("a1".into(), serde_json::to_value(&a1).expect("serializable"));
    w
}

/// Nonvanishing of `a_{K,K/2,chi}(1)` for quadratic `chi` over explicit weight ranges.
fn maeda_over(
    task: &str,
    params: Value,
    ranges: Vec<(u64, Vec<u32>)>,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for (modulus, weights) in ranges {
        let chi = DirichletCharacter::quadratic(modulus)?;
        for weight in weights {
            let sign = if (weight / 2) % 2 == 0 { 1 } else { -1 } * chi.parity().sign();
            if sign < 0 {
                skipped.push(Skipped {
                    case: format!("K={weight} D={modulus}"),
                    reason: "(-1)^(K/2) chi(-1) < 0".into(),
                });
            } else {
                jobs.push((weight, chi.clone()));
            }
        }
    }
    let witnesses = jobs.par_iter().map(|(w, chi)| maeda_case(*w, chi)).collect();
    Ok(VerificationReport::finish(task, params, witnesses, skipped, start))
}

/// Every odd square-free `D <= d_max` and even `K` from `max(12, 10D+2)` to `k_cap`.
pub fn maeda_scan(d_max: u64, k_cap: u32) -> Result<VerificationReport, VerifyError> {
    let ranges = (1..=d_max)
        .filter(|&d| is_odd_squarefree(d))
        .map(|d| {
            let lo = (10 * d as u32 + 2).max(12);
            (d, (lo..=k_cap).step_by(2).collect())
        })
        .collect();
    maeda_over("maeda_scan", json!({"D_max": d_max, "K_cap": k_cap}), ranges)
}

/// The given moduli with even `K` in `[10D+2, 10D+2+span]`.
pub fn maeda_scan_window(moduli: &[u64], span: u32) -> Result<VerificationReport, VerifyError> {
    let ranges = moduli
        .iter()
        .map(|&d| {
            let lo = (10 * d as u32 + 2).max(12);
            (d, (lo..=10 * d as u32 + 2 + span).step_by(2).collect())
        })
        .collect();
    maeda_over("maeda_window", json!({"moduli": moduli, "span": span}), ranges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_product_identity_mod_three() {
        let chi = DirichletCharacter::quadratic(3).unwrap();
        let six = Cyclotomic::from_int(1, 6);
        assert_eq!(product_identity_lhs(3, 3, &chi), six);
        assert_eq!(product_identity_rhs(3, 3, &chi), six);
    }

    #[test]
    fn identity_reports() {
        let r = verify_identities_product(3).unwrap();
        assert!(r.is_verified());
        assert_eq!(r.witnesses.len(), 7);
        assert_eq!(r.skipped.len(), 3);
        let r = verify_identities_bracket(3).unwrap();
        assert!(r.is_verified());
        assert_eq!(r.witnesses.len(), 3);
        let r = verify_identities(7, IdentitySet::All).unwrap();
        assert!(r.is_verified(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(matches!(verify_identities_product(9), Err(VerifyError::NotPrime(9))));
        assert!(matches!(verify_identities_product(2), Err(VerifyError::NotPrime(2))));
    }

    #[test]
    fn zero_space_reports() {
        assert!(verify_zero_space(10, 3, 20).unwrap().is_verified());
        assert!(verify_zero_space(14, 1, 20).unwrap().is_verified());
        assert!(matches!(
            verify_zero_space(12, 1, 5),
            Err(VerifyError::NonzeroDimension { weight: 12, dim: 1 })
        ));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(subsets(3, 1), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn small_scans() {
        let r = scan_conjectures(MatrixKind::C1, 14, 15, ScanOptions::default()).unwrap();
        assert!(r.is_verified());
        assert!(r.witnesses.iter().all(|w| w.case.contains("K=12")));
        let r = scan_conjectures(MatrixKind::C3, 12, 3, ScanOptions::default()).unwrap();
        assert!(r.is_verified());
        // D = 3 has one primitive character: the determinant is a(1)
        let w = r.witnesses.iter().find(|w| w.case.contains("D=3")).unwrap();
        let spec = KernelSpec::new(KernelKind::Product, 12, 3, DirichletCharacter::quadratic(3).unwrap()).unwrap();
        assert_eq!(w.det.as_ref().unwrap(), &kernels::f_coeff(&spec, 1));
        assert!(scan_conjectures(MatrixKind::M, 12, 3, ScanOptions::default()).is_err());
    }

    #[test]
    fn maeda_small() {
        let r = maeda_scan(3, 40).unwrap();
        assert!(r.is_verified());
        assert!(r.witnesses.iter().any(|w| w.case == "K=34 D=3"));
        assert!(r.skipped.iter().any(|s| s.case == "K=32 D=3"));
        assert!(r.skipped.iter().any(|s| s.case == "K=14 D=1"));
    }
}
