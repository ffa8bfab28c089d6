use qgroupoid::builders::{constant_bundle, trivial_algebroid};
use qgroupoid::exactla::SparseMatrix;
use qgroupoid::laq::{check_multiplicative, validate_la, LaCheck, LaGroupoid};
use qgroupoid::liealg::LieAlgebra;
use qgroupoid::selftest::mutations;

/// Target map of a trivial sl2 square replaced by the non-automorphism
/// `e ↔ f, h ↦ h`.
#[test]
fn non_automorphism_target_is_rejected() {
    let mut parts = trivial_algebroid(&constant_bundle(&["*"], &LieAlgebra::sl2())).into_parts();
    parts.tgt_lin[0] = SparseMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
    let l = LaGroupoid::from_parts(parts).unwrap();
    let err = validate_la(&l).unwrap_err();
    assert!(matches!(err.check, LaCheck::Projections | LaCheck::Multiplication), "{err}");
    assert!(check_multiplicative(&l).is_err());
}

#[test]
fn documented_mutations_fail() {
    for (name, l) in mutations() {
        assert!(check_multiplicative(&l).is_err(), "{name}");
    }
}
