mod common;

use tperiods::chars::Parity;
use tperiods::cycmat::MatrixKind;
use tperiods::exact::Cyclotomic;
use tperiods::verify::{
    maeda_scan_window, product_identity_lhs, product_identity_rhs, scan_conjectures, verify_identities,
    IdentitySet, ScanOptions, Status, PRODUCT_PAIRS,
};

#[test]
fn scans_are_reproducible_across_worker_counts() {
    let run = |jobs| {
        let opts = ScanOptions { jobs, ..ScanOptions::default() };
        scan_conjectures(MatrixKind::C2, 20, 7, opts).unwrap().without_timing()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&run(1)).unwrap()
    );
}

#[test]
fn report_json_shape() {
    let r = verify_identities(5, IdentitySet::Product).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["task", "params", "status", "witnesses", "timing_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["status"], "verified");
    let w = &v["witnesses"][0];
    assert!(w["lhs"].is_string() || w["lhs"].is_object() || w["lhs"].is_array(), "{w}");
    assert_eq!(w["lhs"], w["rhs"]);
}

#[test]
fn identity_sides_are_conjugation_equivariant() {
    for p in [5u64, 7, 11] {
        for chi in common::primitive(p) {
            for &(l, k) in PRODUCT_PAIRS.iter().filter(|(l, _)| Parity::of_weight(*l) == chi.parity()) {
                let lhs = product_identity_lhs(l, k, &chi);
                let rhs = product_identity_rhs(l, k, &chi);
                assert_eq!(lhs, rhs, "p={p} chi={chi} ({l},{k})");
                assert_eq!(lhs.conj(), product_identity_lhs(l, k, &chi.conj()));
            }
        }
    }
}

#[test]
fn maeda_window_records_sign_skips() {
    let r = maeda_scan_window(&[3], 10).unwrap();
    assert_eq!(r.status, Status::Verified);
    assert!(r.skipped.iter().all(|s| s.reason.contains("chi(-1)")));
    assert!(!r.witnesses.is_empty());
    let zero = Cyclotomic::zero(1);
    for w in &r.witnesses {
        assert_ne!(w.values["a1"], serde_json::to_value(&zero).unwrap());
    }
}
