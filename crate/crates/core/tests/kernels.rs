mod common;

use common::series::{kernel_series, trace_series};
use proptest::prelude::*;
use tperiods::bounds::{asym_bracket, asym_product};
use tperiods::chars::DirichletCharacter;
use tperiods::exact::{rational_int, Cyclotomic};
use tperiods::kernels::{
    coefficients, normalize, trace_bracket_coeff, trace_product_coeff, KernelKind, KernelSpec,
};
use tperiods::qforms::sigma_twisted;

fn all_chars(d_max: u64) -> Vec<DirichletCharacter> {
    common::moduli(d_max).into_iter().flat_map(common::primitive).collect()
}

#[test]
fn closed_form_matches_series_pipeline() {
    let chars = all_chars(15);
    let mut checked = 0;
    for weight in (4..=16).step_by(2) {
        for kind in [KernelKind::Product, KernelKind::Bracket] {
            for spec in KernelSpec::all_valid(kind, weight, &chars) {
                let trace = trace_series(&spec, 11).unwrap();
                for (n, t) in trace.iter().enumerate() {
                    let closed = match kind {
                        KernelKind::Product => trace_product_coeff(&spec, n),
                        KernelKind::Bracket => trace_bracket_coeff(&spec, n),
                    };
                    assert_eq!(closed, *t, "{spec:?} trace n={n}");
                }
                let series = kernel_series(&spec, 11).unwrap();
                assert!(series[0].is_zero(), "{spec:?} constant term");
                assert_eq!(coefficients(&spec, 10).values, series[1..].to_vec(), "{spec:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "{checked}");
}

#[test]
fn level_one_weight_twelve_is_tau() {
    let spec = KernelSpec::new(KernelKind::Product, 12, 4, DirichletCharacter::trivial()).unwrap();
    let t = normalize(&coefficients(&spec, 10)).unwrap();
    let tau = common::tau_product(10);
    for n in 1..=10 {
        let expected = Cyclotomic::from_bigint(1, tau[n - 1].into());
        assert_eq!(*t.normalized_coeff(n).unwrap(), expected, "n={n}");
    }
    assert_eq!(*t.normalized_coeff(2).unwrap(), Cyclotomic::from_int(1, -24));
}

#[test]
fn normalized_coefficients_follow_asymptotics() {
    for chi in all_chars(7) {
        for weight in (40..=120).step_by(20) {
            for kind in [KernelKind::Product, KernelKind::Bracket] {
                let specs = KernelSpec::all_valid(kind, weight, std::slice::from_ref(&chi));
                let sample: Vec<&KernelSpec> = specs.iter().filter(|s| s.ell() <= 8 || s.ell() % 9 == 0).collect();
                for spec in sample {
                    let t = normalize(&coefficients(spec, 8)).unwrap();
                    let ell = spec.ell();
                    for j in 0..=3u32 {
                        let n = 1u64 << j;
                        let main = sigma_twisted(ell - 1, &chi, n);
                        let (main, bound) = match kind {
                            KernelKind::Product => {
                                if 2 * ell > weight - 2 {
                                    continue;
                                }
                                (main, asym_product(weight, ell, j, chi.modulus()).unwrap().value)
                            }
                            KernelKind::Bracket => (
                                main.scale(&rational_int(n as i64)),
                                asym_bracket(weight, ell, j, chi.modulus()).unwrap().value,
                            ),
                        };
                        if !bound.is_finite() {
                            continue;
                        }
                        let a = t.normalized_coeff(n as usize).unwrap();
                        let dev = (&a.checked_div(&main).unwrap() - &Cyclotomic::one(1)).embed().norm();
                        assert!(dev <= bound + 1e-9, "{spec:?} j={j}: {dev} > {bound}");
                    }
                }
            }
        }
    }
}

fn arb_spec() -> impl Strategy<Value = KernelSpec> {
    let chars = all_chars(15);
    (0..chars.len(), prop::sample::select(vec![12u32, 16, 18, 20, 22]), any::<bool>(), 0usize..8).prop_filter_map(
        "no valid l",
        move |(i, weight, bracket, pick)| {
            let kind = if bracket { KernelKind::Bracket } else { KernelKind::Product };
            let specs = KernelSpec::all_valid(kind, weight, std::slice::from_ref(&chars[i]));
            (!specs.is_empty()).then(|| specs[pick % specs.len()].clone())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugate_character_conjugates_coefficients(spec in arb_spec()) {
        let a = coefficients(&spec, 6);
        let b = coefficients(&spec.conj(), 6);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert_eq!(x.conj(), y.clone());
        }
    }

    #[test]
    fn single_coefficient_agrees_with_table(spec in arb_spec(), n in 1usize..8) {
        let table = coefficients(&spec, 8);
        let direct = match spec.kind() {
            KernelKind::Product => trace_product_coeff(&spec, n),
            KernelKind::Bracket => trace_bracket_coeff(&spec, n),
        };
        let trace = trace_series(&spec, n + 1).unwrap();
        prop_assert_eq!(&direct, &trace[n]);
        if spec.kind() == KernelKind::Bracket {
            prop_assert_eq!(table.coeff(n), &direct);
        }
    }
}
