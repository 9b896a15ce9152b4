use qsing_core::io::{deserialize_report_json, deserialize_table_json};
use qsing_core::rational::rat;
use qsing_demo::{class_report_json, delta_table_json, newton_svg, DEMO_MAX_ORDER};

#[test]
fn class_report_matches_worked_example() {
    let r = deserialize_report_json(&class_report_json(14, 11, 10).unwrap()).unwrap();
    assert_eq!((r.mu, r.delta_cap, r.kappa), (rat(15, 7), rat(4, 7), 1));
}

#[test]
fn table_has_one_row_per_class() {
    let t = deserialize_table_json(&delta_table_json(5, 4).unwrap()).unwrap();
    assert_eq!(t.len(), 5);
    assert_eq!(t[2].delta_cap, rat(3, 5));
}

#[test]
fn svg_with_and_without_germ() {
    let bare = newton_svg(5, 2, 2, "  ").unwrap();
    assert!(bare.contains("L(2)") && !bare.contains("N(f)"));
    let both = newton_svg(5, 2, 2, "x^7 + x*y^3 + y^6").unwrap();
    assert!(both.contains("N(f)"));
    assert_eq!(both, newton_svg(5, 2, 7, "x^7 + x*y^3 + y^6").unwrap());
}

#[test]
fn errors_are_messages() {
    assert!(newton_svg(5, 2, 1, "x^2 - y")
        .unwrap_err()
        .contains("class 2"));
    assert!(newton_svg(5, 2, 2, "x^").is_err());
    assert!(class_report_json(6, 3, 1).is_err());
    assert!(delta_table_json(DEMO_MAX_ORDER + 1, 1).is_err());
}
