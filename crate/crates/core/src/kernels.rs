//! Fourier coefficients of the kernel forms.
//!
//! For a primitive `chi` mod `D` and `k = K - l`, the product kernel is the cusp
//! projection of the trace of `G_{l,chi} G_{k,chibar}` to level one; its `q^n`
//! coefficient is
//!
//! ```text
//! a(n) = sum_{D = D1 D2} chibar_2(-1) sum_{a1 + a2 = n D2} s_{l-1,chi1,chibar2}(a1) s_{k-1,chibar1,chi2}(a2)
//!        - 2 s_{l-1,chi}(0) s_{k-1,chibar}(0) / zeta(1-K) * sigma_{K-1}(n)
//! ```
//!
//! The bracket kernel (with `k = K - 2 - l`) is the trace of `[G_{l,chi}, G_{k,chibar}]_1`:
//!
//! ```text
//! b(n) = sum_{D = D1 D2} chibar_2(-1) / D2 sum_{a1 + a2 = n D2} s(a1) s(a2) (l a2 - k a1)
//! ```

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bernoulli::{sigma0, zeta_neg};
use crate::chars::{DirichletCharacter, Parity};
use crate::exact::{rational, rational_int, Cyclotomic, Rational};
use crate::qforms::{self, sigma_classical, sigma_table};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("weight {0} must be even and at least 4")]
    Weight(u32),
    #[error("index l = {ell} outside [{min}, {max}] for weight {weight}")]
    Range {
        weight: u32,
        ell: u32,
        min: u32,
        max: u32,
    },
    #[error("character parity {parity:?} does not match (-1)^{ell}")]
    Parity { ell: u32, parity: Parity },
    #[error("character {0} is not primitive")]
    Imprimitive(String),
    #[error("first coefficient vanishes; cannot normalize")]
    Degenerate,
    #[error(transparent)]
    QForm(#[from] qforms::QFormError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Product,
    Bracket,
}

impl std::str::FromStr for KernelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(KernelKind::Product),
            "bracket" => Ok(KernelKind::Bracket),
            other => Err(format!("unknown kernel kind {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    weight: u32,
    ell: u32,
    chi: DirichletCharacter,
    kind: KernelKind,
}

/// Admissible `l` range for a weight and kind (possibly empty).
pub fn ell_range(kind: KernelKind, weight: u32) -> std::ops::RangeInclusive<u32> {
    let max = match kind {
        KernelKind::Product => weight / 2,
        KernelKind::Bracket => weight.saturating_sub(4) / 2,
    };
    3..=max
}

impl KernelSpec {
    pub fn new(
        kind: KernelKind,
        weight: u32,
        ell: u32,
        chi: DirichletCharacter,
    ) -> Result<Self, KernelError> {
        if weight < 4 || weight % 2 == 1 {
            return Err(KernelError::Weight(weight));
        }
        let range = ell_range(kind, weight);
        if !range.contains(&ell) {
            return Err(KernelError::Range {
                weight,
                ell,
                min: *range.start(),
                max: *range.end(),
            });
        }
        if !chi.is_primitive() {
            return Err(KernelError::Imprimitive(chi.to_string()));
        }
        if chi.parity() != Parity::of_weight(ell) {
            return Err(KernelError::Parity {
                ell,
                parity: chi.parity(),
            });
        }
        Ok(KernelSpec {
            weight,
            ell,
            chi,
            kind,
        })
    }

    /// Every valid spec of the given kind and weight over the primitive characters mod `d`.
    pub fn all_valid(kind: KernelKind, weight: u32, chars: &[DirichletCharacter]) -> Vec<Self> {
        let mut out = Vec::new();
        for ell in ell_range(kind, weight) {
            for chi in chars {
                if let Ok(s) = KernelSpec::new(kind, weight, ell, chi.clone()) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Weight of the second Eisenstein factor.
    pub fn k(&self) -> u32 {
        match self.kind {
            KernelKind::Product => self.weight - self.ell,
            KernelKind::Bracket => self.weight - 2 - self.ell,
        }
    }

    /// Order of the cyclotomic field holding every coefficient.
    pub fn order(&self) -> u64 {
        self.chi.order()
    }

    /// Same spec with `chi` replaced by its conjugate.
    pub fn conj(&self) -> Self {
        KernelSpec {
            chi: self.chi.conj(),
            ..self.clone()
        }
    }
}

/// Coefficient vector of a kernel; `values[i]` is the `q^(i+1)` coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffTable {
    #[serde(skip)]
    pub spec: KernelSpec,
    pub values: Vec<Cyclotomic>,
    pub normalized: Option<Vec<Cyclotomic>>,
}

impl CoeffTable {
    pub fn coeff(&self, n: usize) -> &Cyclotomic {
        &self.values[n - 1]
    }

    pub fn normalized_coeff(&self, n: usize) -> Option<&Cyclotomic> {
        self.normalized.as_ref().map(|v| &v[n - 1])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

struct Factor {
    d2: u64,
    sign: i64,
    left: Vec<Cyclotomic>,
    right: Vec<Cyclotomic>,
}

// sigma tables for every factorization, long enough for coefficients up to n_max
fn factor_tables(spec: &KernelSpec, n_max: usize) -> Vec<Factor> {
    let order = spec.order();
    let (l, k) = (spec.ell, spec.k());
    spec.chi
        .factorizations()
        .into_iter()
        .map(|(d2, chi1, chi2)| {
            let len = n_max * d2 as usize;
            Factor {
                d2,
                sign: chi2.parity().sign(),
                left: sigma_table(l - 1, &chi1, &chi2.conj(), len, order),
                right: sigma_table(k - 1, &chi1.conj(), &chi2, len, order),
            }
        })
        .collect()
}

fn trace_from_tables(spec: &KernelSpec, factors: &[Factor], n: usize) -> Cyclotomic {
    let order = spec.order();
    let (l, k) = (spec.ell as i64, spec.k() as i64);
    let mut total = Cyclotomic::zero(order);
    for f in factors {
        let m = n * f.d2 as usize;
        let weight = |a1: usize| -> BigInt {
            match spec.kind {
                KernelKind::Product => BigInt::one(),
                KernelKind::Bracket => BigInt::from(l * (m - a1) as i64 - k * a1 as i64),
            }
        };
        let s = Cyclotomic::sum_of_products(
            order,
            (0..=m).map(|a1| (weight(a1), &f.left[a1], &f.right[m - a1])),
        );
        let mut scale = rational_int(f.sign);
        if spec.kind == KernelKind::Bracket {
            scale /= rational_int(f.d2 as i64);
        }
        total = &total + &s.scale(&scale);
    }
    total
}

/// `2 s_{l-1,chi}(0) s_{k-1,chibar}(0) / zeta(1-K)`.
pub fn projection_constant(spec: &KernelSpec) -> Cyclotomic {
    let s_l = sigma0(spec.ell, &spec.chi);
    let s_k = sigma0(spec.k(), &spec.chi.conj());
    let z = zeta_neg(spec.weight).expect("even weight");
    (&s_l * &s_k).scale(&(rational_int(2) / z))
}

/// `q^n` coefficient of the trace of `G_{l,chi} G_{k,chibar}`.
pub fn trace_product_coeff(spec: &KernelSpec, n: usize) -> Cyclotomic {
    assert_eq!(spec.kind, KernelKind::Product);
    let factors = factor_tables(spec, n.max(1));
    trace_from_tables(spec, &factors, n)
}

/// `q^n` coefficient of the product kernel.
pub fn f_coeff(spec: &KernelSpec, n: usize) -> Cyclotomic {
    assert_eq!(spec.kind, KernelKind::Product);
    if n == 0 {
        return Cyclotomic::zero(spec.order());
    }
    let c = projection_constant(spec);
    let s = Rational::from_integer(sigma_classical(spec.weight - 1, n as u64));
    &trace_product_coeff(spec, n) - &c.scale(&s)
}

/// `q^n` coefficient of the bracket kernel.
pub fn trace_bracket_coeff(spec: &KernelSpec, n: usize) -> Cyclotomic {
    assert_eq!(spec.kind, KernelKind::Bracket);
    if n == 0 {
        return Cyclotomic::zero(spec.order());
    }
    let factors = factor_tables(spec, n);
    trace_from_tables(spec, &factors, n)
}

/// Coefficients `n = 1..=n_max` of the kernel form.
pub fn coefficients(spec: &KernelSpec, n_max: usize) -> CoeffTable {
    let factors = factor_tables(spec, n_max);
    let proj = match spec.kind {
        KernelKind::Product => Some(projection_constant(spec)),
        KernelKind::Bracket => None,
    };
    let values = (1..=n_max)
        .map(|n| {
            let t = trace_from_tables(spec, &factors, n);
            match &proj {
                Some(c) => {
                    let s = Rational::from_integer(sigma_classical(spec.weight - 1, n as u64));
                    &t - &c.scale(&s)
                }
                None => t,
            }
        })
        .collect();
    CoeffTable {
        spec: spec.clone(),
        values,
        normalized: None,
    }
}

/// Divides by the `q^1` coefficient.
pub fn normalize(table: &CoeffTable) -> Result<CoeffTable, KernelError> {
    let first = table.values.first().ok_or(KernelError::Degenerate)?;
    let inv = first.inv().map_err(|_| KernelError::Degenerate)?;
    let normalized = table.values.iter().map(|v| v * &inv).collect();
    Ok(CoeffTable {
        normalized: Some(normalized),
        ..table.clone()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspCertificate {
    pub weight: u32,
    pub dim: usize,
    pub coeff_count: usize,
    pub in_span: bool,
    /// Largest `N` with the residual vanishing at `q^0..=q^N` (capped at `checked_through`).
    pub residual_zero_through: usize,
    pub checked_through: usize,
    pub coordinates: Vec<Cyclotomic>,
}

/// Expresses `sum_{n>=0} values[n] q^n` in the echelon basis of `S_K`.
pub fn certificate_for_values(weight: u32, values: &[Cyclotomic]) -> CuspCertificate {
    let checked_through = values.len().saturating_sub(1);
    let toolkit = qforms::level1_toolkit_with_precision(weight, values.len());
    let order = values.iter().fold(1, |acc, v| num_integer::lcm(acc, v.order()));
    let coordinates: Vec<Cyclotomic> = (0..toolkit.dim)
        .map(|i| values.get(i + 1).cloned().unwrap_or_else(|| Cyclotomic::zero(order)))
        .collect();
    let mut residual_zero_through = None;
    for (n, v) in values.iter().enumerate() {
        let fitted = toolkit
            .basis
            .iter()
            .zip(&coordinates)
            .fold(Cyclotomic::zero(order), |acc, (b, c)| &acc + &(c * &b.coeffs[n]));
        if (v - &fitted).is_zero() {
            residual_zero_through = Some(n);
        } else {
            break;
        }
    }
    let coeff_count = qforms::coeff_count(weight);
    let in_span = residual_zero_through.is_some_and(|n| n >= coeff_count);
    CuspCertificate {
        weight,
        dim: toolkit.dim,
        coeff_count,
        in_span,
        residual_zero_through: residual_zero_through.unwrap_or(0),
        checked_through,
        coordinates,
    }
}

/// Extra coefficients checked beyond the determining count.
pub const CERTIFICATE_MARGIN: usize = 5;

/// Certifies that the kernel is a level-one cusp form: its constant term and
/// `q^1..q^(coeff_count + margin)` coefficients agree with a combination of the
/// `S_K` basis.
pub fn cuspidality_certificate(spec: &KernelSpec) -> CuspCertificate {
    let through = qforms::coeff_count(spec.weight) + CERTIFICATE_MARGIN;
    let table = coefficients(spec, through);
    let constant = match spec.kind {
        KernelKind::Product => {
            let t0 = trace_product_coeff(spec, 0);
            let c = projection_constant(spec);
            let z = zeta_neg(spec.weight).expect("even weight");
            &t0 - &c.scale(&(z * rational(1, 2)))
        }
        KernelKind::Bracket => Cyclotomic::zero(spec.order()),
    };
    let mut values = vec![constant];
    values.extend(table.values);
    certificate_for_values(spec.weight, &values)
}
