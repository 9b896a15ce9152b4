use qsing_cli::{exit_code, run, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK};
use qsing_core::io::{deserialize_report_json, deserialize_table_csv, deserialize_table_json};
use qsing_core::rational::{int, rat};
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn qsing(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qsing").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Outcome) -> Value {
    assert_eq!(o.code, EXIT_OK, "stderr: {}", o.err);
    serde_json::from_str(&o.out).unwrap()
}

#[test]
fn class_fourteen_eleven_ten() {
    let o = qsing(&["class", "14", "11", "10"]);
    assert_eq!(o.code, EXIT_OK);
    let r = deserialize_report_json(&o.out).unwrap();
    assert_eq!(r.delta_cap, rat(4, 7));
    assert_eq!(r.mu, rat(15, 7));
    assert_eq!(r.kappa, 1);
    assert_eq!(r.k, 10);
}

#[test]
fn smooth_point_has_trivial_invariants() {
    let r = deserialize_report_json(&qsing(&["class", "1", "0", "0"]).out).unwrap();
    assert_eq!((r.d, r.q, r.k, r.kappa), (1, 0, 0, 0));
    assert_eq!(r.delta, int(0));
    assert_eq!(r.delta_cap, int(0));
    // The unit germ is not a curve; its class value is −1 by convention.
    assert_eq!(r.mu, int(-1));
    assert!(r.discrepancy.is_empty());
}

#[test]
fn five_term_germ_is_not_generic() {
    let v = json(&qsing(&[
        "germ",
        "14",
        "11",
        "x^24+x^13*y+x^3*y^7+x*y^11+y^20",
    ]));
    assert_eq!(v["k"], 10);
    assert_eq!(v["mu"], serde_json::json!({"num": 64, "den": 7}));
    assert_eq!(v["generic"], false);
    assert_eq!(v["support"].as_array().unwrap().len(), 5);
}

#[test]
fn germ_with_leading_minus_after_separator() {
    let v = json(&qsing(&["germ", "5", "2", "--", "-x^2+y"]));
    assert_eq!(v["k"], 2);
    assert_eq!(v["generic"], true);
}

#[test]
fn table_round_trips_in_both_formats() {
    let j = qsing(&["table", "14", "11"]);
    let from_json = deserialize_table_json(&j.out).unwrap();
    let c = qsing(&["table", "14", "11", "--format", "csv"]);
    assert_eq!(c.code, EXIT_OK);
    let from_csv = deserialize_table_csv(&c.out).unwrap();
    assert_eq!(from_json.len(), 14);
    assert_eq!(from_json, from_csv);
    assert!(from_json.iter().enumerate().all(|(k, r)| r.k == k as i64));
}

#[test]
fn verification_levels_agree() {
    let base = qsing(&["class", "14", "11", "3"]).out;
    assert_eq!(
        qsing(&["class", "14", "11", "3", "--verify", "off"]).out,
        base
    );
    let report = qsing(&["--verify", "report", "class", "14", "11", "3"]);
    assert_eq!(report.code, EXIT_OK);
    assert_eq!(report.out, base);
    assert!(report.err.contains("0 disagree"), "{}", report.err);
}

#[test]
fn info_reports_resolution_data() {
    let v = json(&qsing(&["info", "14", "11"]));
    assert_eq!(v["cseq"], serde_json::json!([2, 2, 2, 2, 3, 2, 2]));
    assert_eq!(
        v["self_intersections"],
        serde_json::json!([-2, -2, -2, -3, -2])
    );
    assert_eq!(v["q_matrix"][0], serde_json::json!([1, 2, 3, 4, 9, 14]));
    assert_eq!(
        v["discrepancy"][3],
        serde_json::json!({"num": -4, "den": 7})
    );
}

#[test]
fn raw_types_are_normalized_first() {
    let v = json(&qsing(&["info", "--raw", "28", "7", "1"]));
    assert_eq!((v["d"].as_i64(), v["q"].as_i64()), (Some(4), Some(1)));
    assert_eq!(v["raw"]["y_scale"], 7);
    let r = deserialize_report_json(&qsing(&["class", "--raw", "28", "7", "1", "2"]).out).unwrap();
    assert_eq!((r.d, r.q, r.k), (4, 1, 2));
}

#[test]
fn reconstruction_recovers_an_equivalent_singularity() {
    // Δ(1) = 13/28 and Δ(2) = 4/7 for X(14;1,11); its dual X(14;1,9) comes back.
    let v = json(&qsing(&["reconstruct", "13/28", "4/7"]));
    assert_eq!((v["d"].as_i64(), v["q"].as_i64()), (Some(14), Some(9)));
    // X(14;1,9) itself has Δ(2) = 5/7 and reconstructs X(14;1,11).
    let v = json(&qsing(&["reconstruct", "13/28", "5/7"]));
    assert_eq!(v["q"], 11);
    let bad = qsing(&["reconstruct", "13/28", "3/14"]);
    assert_eq!(bad.code, EXIT_INVALID);
    assert!(bad.out.is_empty());
}

#[test]
fn newton_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.svg");
    let p = path.to_str().unwrap();
    let v = json(&qsing(&[
        "newton",
        "5",
        "2",
        "2",
        "--germ",
        "x^7 + x*y^3 + y^6",
        "--svg",
        p,
    ]));
    assert_eq!(v["svg"], p);
    assert!(v["germ_vertices"].is_array());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("L(2)") && svg.contains("N(f)"));
    let stdout = qsing(&["newton", "5", "2", "2", "--germ", "x^7 + x*y^3 + y^6"]);
    assert_eq!(stdout.out.trim_end(), svg.trim_end());
}

#[test]
fn newton_rejects_germ_of_another_class() {
    let o = qsing(&["newton", "5", "2", "1", "--germ", "x^2-y"]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.err.contains("class 2"), "{}", o.err);
}

#[test]
fn check_sweep_passes() {
    let v = json(&qsing(&["check", "--dmax", "16"]));
    assert_eq!(v["failures"], serde_json::json!([]));
    assert!(v["singularities"].as_u64().unwrap() > 70);
    assert_eq!(
        qsing(&["check", "3", "1", "--dmax", "4"]).code,
        EXIT_INVALID
    );
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        &["class", "14", "12", "1"][..],
        &["class", "0", "0", "0"],
        &["class", "14", "11"],
        &["class", "14", "11", "ten"],
        &["germ", "5", "2", "x^2 + y^5"],
        &["germ", "5", "2", "--x"],
        &["germ", "5", "2", "0"],
        &["info", "--raw", "28", "2", "22"],
        &["info", "14", "11", "--format", "csv"],
        &["bogus"],
        &["class", "14", "11", "3", "--format", "xml"],
    ] {
        let o = qsing(args);
        assert_eq!(o.code, EXIT_INVALID, "{args:?}: {}", o.err);
        assert!(o.out.is_empty(), "{args:?}");
        assert!(!o.err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_is_not_an_error() {
    let o = qsing(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.out.contains("reconstruct"));
}

#[test]
fn route_mismatches_map_to_exit_two() {
    let mismatch = qsing_core::Error::RouteMismatch {
        what: "δ".into(),
        left: "1".into(),
        right: "2".into(),
    };
    assert_eq!(exit_code(&mismatch), EXIT_MISMATCH);
    assert_eq!(exit_code(&qsing_core::Error::ZeroPolynomial), EXIT_INVALID);
}
