//! Browser bindings for the static page in `www/`. Errors come back as
//! strings so the same functions run under native tests.

use wasm_bindgen::prelude::wasm_bindgen;

use qsing_core::invariants::{class_report, delta_table, Verify};
use qsing_core::io::{
    parse_germ, render_svg, serialize_report, serialize_table, Format, SvgOptions,
};
use qsing_core::lattice::{hull_of_class, ClassLattice};
use qsing_core::NormalizedSingularity;

/// Largest order the page accepts; keeps tables and pictures responsive.
pub const DEMO_MAX_ORDER: i64 = 2000;

fn singularity(d: i64, q: i64) -> Result<NormalizedSingularity, String> {
    if d > DEMO_MAX_ORDER {
        return Err(format!("the demo is limited to d <= {DEMO_MAX_ORDER}"));
    }
    NormalizedSingularity::new(d, q).map_err(|e| e.to_string())
}

/// SVG of the class polygon `L(k)`, plus the Newton polygon of `germ` when it
/// is non-blank. The germ must lie in class `k`.
#[wasm_bindgen]
pub fn newton_svg(d: i64, q: i64, k: i64, germ: &str) -> Result<String, String> {
    let x = singularity(d, q)?;
    let k = x.reduce(k);
    let mut polys = vec![(hull_of_class(&x, k), format!("L({k})"))];
    if !germ.trim().is_empty() {
        let g = parse_germ(germ, &x).map_err(|e| e.to_string())?;
        if g.k != k {
            return Err(format!("the germ lies in class {}, not {k}", g.k));
        }
        polys.push((g.support.hull(), "N(f)".into()));
    }
    render_svg(
        &polys,
        Some(&ClassLattice::new(&x, k)),
        &SvgOptions::default(),
    )
    .map_err(|e| e.to_string())
}

/// One invariant report as JSON, both routes checked.
#[wasm_bindgen]
pub fn class_report_json(d: i64, q: i64, k: i64) -> Result<String, String> {
    let x = singularity(d, q)?;
    class_report(&x, k, Verify::Assert)
        .map(|r| serialize_report(&r, Format::Json))
        .map_err(|e| e.to_string())
}

/// All classes as a JSON array.
#[wasm_bindgen]
pub fn delta_table_json(d: i64, q: i64) -> Result<String, String> {
    let x = singularity(d, q)?;
    delta_table(&x, Verify::Assert)
        .map(|t| serialize_table(&t, Format::Json))
        .map_err(|e| e.to_string())
}
