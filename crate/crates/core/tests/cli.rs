use std::path::PathBuf;

use qgroupoid::cli::run;
use qgroupoid::report::{Report, Table};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn laq(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("laq").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Report) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, _) = laq(&full);
    let report = Report::from_json(&out).expect("json report");
    assert_eq!(report.exit_status, code);
    (code, report)
}

fn cohomology_of(r: &Report) -> Vec<usize> {
    r.tables
        .iter()
        .find_map(|t| match t {
            Table::Cohomology { dims, .. } => Some(dims.clone()),
            _ => None,
        })
        .expect("cohomology table")
}

#[test]
fn validate_exit_codes() {
    let (code, r) = json(&["validate", &fixture("trivial_sl2.laq")]);
    assert_eq!(code, 0);
    assert!(r.all_ok());
    let (code, r) = json(&["validate", &fixture("broken_jacobi.laq")]);
    assert_eq!(code, 1);
    let failed = r.verdicts.iter().find(|v| !v.ok).unwrap();
    assert!(failed.witness.as_ref().unwrap().contains("Jacobi identity fails on (e1, e2, e3)"), "{failed:?}");
    assert_eq!(json(&["validate", &fixture("missing_format.laq")]).0, 2);
    let (code, r) = json(&["validate", &fixture("bad_syntax.laq")]);
    assert_eq!(code, 2);
    assert!(r.verdicts[0].witness.as_ref().unwrap().starts_with("line 4, column"));
    assert_eq!(json(&["validate", &fixture("no_such_file.laq")]).0, 2);
    assert_eq!(json(&["validate", &fixture("core_line.laq")]).0, 0);
}

#[test]
fn cohomology_tables() {
    for (file, n, expected) in [
        ("trivial_abelian2.laq", "3", vec![1, 2, 1, 0]),
        ("z2_group.laq", "2", vec![1, 0, 0]),
        ("equivariant_swap.laq", "2", vec![1, 1, 0]),
        ("equivariant_sl2.laq", "3", vec![1, 0, 0, 1]),
        ("trivial_sl2.laq", "3", vec![1, 0, 0, 1]),
        ("pair_2.laq", "3", vec![1, 0, 0, 0]),
    ] {
        let (code, r) = json(&["cohomology", &fixture(file), "--max-degree", n]);
        assert_eq!(code, 0, "{file}");
        assert_eq!(cohomology_of(&r), expected, "{file}");
    }
}

#[test]
fn window_override() {
    let (code, r) = json(&["cohomology", &fixture("trivial_abelian2.laq"), "--max-degree", "2", "--window", "5,4"]);
    assert_eq!(code, 0);
    assert_eq!(cohomology_of(&r), vec![1, 2, 1]);
    assert!(matches!(r.tables[0], Table::Cohomology { window: (5, 4), .. }));
    let (code, r) = json(&["cohomology", &fixture("trivial_abelian2.laq"), "--max-degree", "3", "--window", "3,4"]);
    assert_eq!(code, 1);
    assert!(r.verdicts.last().unwrap().witness.as_ref().unwrap().contains("need at least (4, 4)"));
}

#[test]
fn spectral_pages() {
    let (code, r) = json(&["spectral", &fixture("trivial_sl2.laq"), "--page", "2", "--orientation", "delta-first"]);
    assert_eq!(code, 0);
    let Table::Spectral { dims, valid, .. } = &r.tables[0] else { panic!() };
    for p in 0..=3 {
        assert!(valid[p][0]);
        assert_eq!(dims[p][0], [1, 0, 0, 1][p]);
        for q in 1..dims[p].len() {
            assert_eq!(dims[p][q], 0);
        }
    }
    let (_, r) = json(&["spectral", &fixture("equivariant_swap.laq"), "--page", "1", "--window", "3,3"]);
    let Table::Spectral { dims, valid, .. } = &r.tables[0] else { panic!() };
    assert_eq!((0..3).map(|p| dims[p][0]).collect::<Vec<_>>(), vec![1, 1, 0]);
    assert!(valid.iter().all(|row| !row[3]), "outermost q band is masked");
    let (_, r) = json(&["spectral", &fixture("equivariant_swap.laq"), "--page", "1", "--orientation", "psi-first"]);
    let Table::Spectral { valid, .. } = &r.tables[0] else { panic!() };
    assert!(valid[4].iter().all(|v| !v), "outermost p band is masked");
    assert_eq!(laq(&["spectral", &fixture("trivial_sl2.laq"), "--page", "3"]).0, 2);
    assert_eq!(laq(&["spectral", &fixture("trivial_sl2.laq"), "--orientation", "sideways"]).0, 2);
}

#[test]
fn nerve_levels() {
    for (file, q, count, dim) in
        [("pair_2.laq", "3", 16, 0), ("trivial_sl2.laq", "2", 1, 3), ("equivariant_swap.laq", "1", 2, 2)]
    {
        let (code, r) = json(&["nerve", &fixture(file), "-q", q]);
        assert_eq!(code, 0);
        let Table::Nerve { tuples, .. } = &r.tables[0] else { panic!() };
        assert_eq!(tuples.len(), count, "{file}");
        assert!(tuples.iter().all(|t| t.fiber_dim == dim), "{file}");
    }
}

#[test]
fn reports_round_trip_on_fixtures() {
    for file in [
        "trivial_sl2.laq",
        "broken_jacobi.laq",
        "trivial_abelian2.laq",
        "z2_group.laq",
        "equivariant_swap.laq",
        "pair_2.laq",
        "core_line.laq",
        "missing_format.laq",
    ] {
        for cmd in [&["validate"][..], &["cohomology", "--max-degree", "2"], &["spectral", "--page", "1", "--window", "2,2"], &["nerve", "-q", "2"]] {
            let mut args = vec!["--format", "json", cmd[0]];
            let path = fixture(file);
            args.push(&path);
            args.extend_from_slice(&cmd[1..]);
            let (_, out, _) = laq(&args);
            let r = Report::from_json(&out).unwrap();
            assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
            assert_eq!(serde_json::from_str::<serde_json::Value>(&r.to_json()).unwrap(), serde_json::from_str::<serde_json::Value>(&out).unwrap());
        }
    }
}

#[test]
fn text_output() {
    let (code, out, err) = laq(&["cohomology", &fixture("trivial_abelian2.laq")]);
    assert_eq!(code, 0);
    assert!(out.contains("total cohomology, window (4, 4)"));
    assert!(out.contains("  dim H^n  1  2  1  0\n"), "{out}");
    assert!(err.is_empty());
    let (code, _, err) = laq(&["validate", &fixture("broken_jacobi.laq")]);
    assert_eq!(code, 1);
    assert!(err.contains("fiber brackets failed"));
    assert_eq!(laq(&["--help"]).0, 0);
    assert_eq!(laq(&["frobnicate"]).0, 2);
}
