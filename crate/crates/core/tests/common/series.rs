//! q-series pipeline for the kernel coefficients: double Eisenstein series,
//! products or brackets, `U_{D2}`, summed over factorizations of the modulus.

use tperiods::bernoulli::{sigma0, zeta_neg};
use tperiods::exact::{rational, rational_int, Cyclotomic};
use tperiods::kernels::{KernelKind, KernelSpec};
use tperiods::qforms::{eisenstein_series, rc_bracket, u_operator, EisensteinKind, QFormError, QSeries};

/// Trace coefficients `q^0..q^(terms-1)` computed from q-expansions.
pub fn trace_series(spec: &KernelSpec, terms: usize) -> Result<Vec<Cyclotomic>, QFormError> {
    let order = spec.order();
    let (l, k) = (spec.ell(), spec.k());
    let mut total = QSeries::zero(order, terms);
    for (d2, chi1, chi2) in spec.chi().factorizations() {
        let precision = (terms.max(1) - 1) * d2 as usize + 1;
        let g1 = eisenstein_series(
            &EisensteinKind::Double {
                k: l,
                chi1: chi1.clone(),
                chi2: chi2.conj(),
            },
            precision,
        )?;
        let g2 = eisenstein_series(
            &EisensteinKind::Double {
                k,
                chi1: chi1.conj(),
                chi2: chi2.clone(),
            },
            precision,
        )?;
        let combined = match spec.kind() {
            KernelKind::Product => g1.mul(&g2),
            KernelKind::Bracket => rc_bracket(&g1, l as i64, &g2, k as i64, 1)?
                .scale_rational(&rational(1, d2 as i64)),
        };
        let lifted = u_operator(d2 as usize, &combined, terms)?;
        let signed = lifted.scale_rational(&rational_int(chi2.parity().sign()));
        total = total.add(&signed);
    }
    Ok(total.coeffs)
}

/// Kernel coefficients `q^0..q^(terms-1)` from the pipeline, including the
/// Eisenstein projection for the product kind.
pub fn kernel_series(spec: &KernelSpec, terms: usize) -> Result<Vec<Cyclotomic>, QFormError> {
    let trace = trace_series(spec, terms)?;
    if spec.kind() == KernelKind::Bracket {
        return Ok(trace);
    }
    let gk = eisenstein_series(&EisensteinKind::Level1 { k: spec.weight() }, terms)?;
    // 2 s_{l-1,chi}(0) s_{k-1,chibar}(0) / zeta(1-K)
    let c = (&sigma0(spec.ell(), spec.chi()) * &sigma0(spec.k(), &spec.chi().conj()))
        .scale(&(rational_int(2) / zeta_neg(spec.weight()).unwrap()));
    Ok(trace
        .iter()
        .zip(&gk.coeffs)
        .map(|(t, g)| t - &(&c * g))
        .collect())
}
