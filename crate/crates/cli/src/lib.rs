//! The `qsing` command line. [`run`] does all the work so tests can drive it
//! without spawning a process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsing_core::arith::{normalize_type, q_matrix, q_matrix_by_definition, RawType};
use qsing_core::germs::{is_generic, valuation_vector};
use qsing_core::invariants::{
    check_suite, class_checks, class_report, delta_cap, delta_table, newton_number, reconstruct,
    singularity_checks, RouteCheck, Verify,
};
use qsing_core::io::{
    parse_germ, rational_json, render_svg, serialize_report, serialize_table, write_svg, Format,
    SvgOptions,
};
use qsing_core::lattice::{hull_of_class, ClassLattice, LatticePoint, NewtonPolygon};
use qsing_core::rational::parse_rational;
use qsing_core::resolution::{discrepancy, discrepancy_closed, hj_chain};
use qsing_core::{Error, NormalizedSingularity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "qsing",
    version,
    about = "Exact invariants of cyclic quotient surface singularities X(d;1,q)",
    after_help = "Positional D Q name X(D;1,Q). With --raw D A B they are omitted and the \
                  raw type is normalized first; classes and germs then refer to the normalized \
                  X(d;1,q) printed by `info`. Put `--` before a polynomial that starts with '-'."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; `csv` applies to `class` and `table`.
    #[arg(long, global = true, env = "QSING_FORMAT", default_value = "json")]
    format: Format,

    /// `assert` recomputes each invariant by its second route and exits 2 on
    /// disagreement; `report` prints the route comparisons to stderr instead.
    #[arg(long, global = true, value_enum, default_value_t = VerifyLevel::Assert)]
    verify: VerifyLevel,

    /// Singularity given as the raw type (D; A, B).
    #[arg(
        long,
        global = true,
        num_args = 3,
        value_names = ["D", "A", "B"],
        allow_negative_numbers = true
    )]
    raw: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    Off,
    Assert,
    Report,
}

impl VerifyLevel {
    fn core(self) -> Verify {
        match self {
            VerifyLevel::Assert => Verify::Assert,
            VerifyLevel::Off | VerifyLevel::Report => Verify::Off,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolution data, Q matrix and discrepancies.
    Info {
        #[arg(value_name = "D Q", allow_negative_numbers = true)]
        args: Vec<String>,
    },
    /// Invariant reports for every class k = 0..d.
    Table {
        #[arg(value_name = "D Q", allow_negative_numbers = true)]
        args: Vec<String>,
    },
    /// Invariant report for one class.
    Class {
        #[arg(value_name = "D Q K", allow_negative_numbers = true)]
        args: Vec<String>,
    },
    /// Parse a germ; print its class, genericity, Newton number and valuations.
    Germ {
        #[arg(value_name = "D Q POLY", allow_negative_numbers = true)]
        args: Vec<String>,
    },
    /// Draw the class polygon, and optionally a germ polygon, as SVG.
    Newton {
        #[arg(value_name = "D Q K", allow_negative_numbers = true)]
        args: Vec<String>,
        /// Germ whose Newton polygon is drawn over the class polygon.
        #[arg(long)]
        germ: Option<String>,
        /// Destination file; without it the SVG goes to stdout.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Compare every invariant along both routes.
    Check {
        #[arg(value_name = "D Q", allow_negative_numbers = true)]
        args: Vec<String>,
        /// Sweep every X(d;1,q) with d ≤ N instead of one singularity.
        #[arg(long, value_name = "N")]
        dmax: Option<i64>,
    },
    /// Recover X(d;1,q) from Δ(1) and Δ(2), given as NUM/DEN.
    Reconstruct {
        #[arg(value_name = "DELTA1", allow_hyphen_values = true)]
        delta1: String,
        #[arg(value_name = "DELTA2", allow_hyphen_values = true)]
        delta2: String,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Routes(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Core(Error::invalid(msg))
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Data goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INVALID;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "qsing: {e}");
            exit_code(&e)
        }
        Err(Failure::Routes(n)) => {
            let _ = writeln!(err, "qsing: {n} route comparison(s) disagree");
            EXIT_MISMATCH
        }
    }
}

/// Route disagreements are bugs (2); everything else is bad input (1).
pub fn exit_code(e: &Error) -> i32 {
    if e.is_internal() {
        EXIT_MISMATCH
    } else {
        EXIT_INVALID
    }
}

struct Target {
    x: NormalizedSingularity,
    raw: Option<(RawType, i64, i64)>,
}

fn int_arg(name: &str, text: &str) -> Result<i64, Failure> {
    text.trim()
        .parse()
        .map_err(|_| invalid(format!("{name} must be an integer, got {text:?}")))
}

/// Splits the singularity off the positionals and checks how many remain.
fn target<'a>(
    cli: &Cli,
    args: &'a [String],
    rest: &[&str],
) -> Result<(Target, &'a [String]), Failure> {
    let want = rest.join(" ");
    let (t, tail) = match &cli.raw {
        Some(v) => {
            let ty = RawType::new(v[0], v[1], v[2])?;
            let norm = normalize_type(ty)?;
            let t = Target {
                x: norm.singularity,
                raw: Some((ty, norm.x_scale, norm.y_scale)),
            };
            (t, args)
        }
        None => {
            if args.len() < 2 {
                return Err(invalid(format!("expected D Q {want}").trim().to_string()));
            }
            let d = int_arg("D", &args[0])?;
            let q = int_arg("Q", &args[1])?;
            let t = Target {
                x: NormalizedSingularity::new(d, q)?,
                raw: None,
            };
            (t, &args[2..])
        }
    };
    if tail.len() != rest.len() {
        let lead = if cli.raw.is_some() { "" } else { "D Q " };
        return Err(invalid(
            format!("expected {lead}{want}, got {} argument(s)", args.len()).replace("  ", " "),
        ));
    }
    Ok((t, tail))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    let text = text.trim_end_matches('\n');
    writeln!(out, "{text}").map_err(|e| Failure::Core(e.into()))
}

fn json_only(cli: &Cli, command: &str) -> Outcome {
    match cli.format {
        Format::Json => Ok(()),
        Format::Csv => Err(invalid(format!(
            "`{command}` only has JSON output; csv is for `class` and `table`"
        ))),
    }
}

/// In `report` mode, lists the disagreeing routes and fails when there are any.
fn report_routes(
    cli: &Cli,
    checks: impl FnOnce() -> Vec<RouteCheck>,
    err: &mut dyn Write,
) -> Outcome {
    if cli.verify != VerifyLevel::Report {
        return Ok(());
    }
    let checks = checks();
    let failed: Vec<&RouteCheck> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        let _ = writeln!(
            err,
            "route mismatch: {}{}: {} != {}",
            c.name,
            c.k.map(|k| format!(" (k = {k})")).unwrap_or_default(),
            c.left,
            c.right
        );
    }
    let _ = writeln!(
        err,
        "verify: {} routes compared, {} disagree",
        checks.len(),
        failed.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Routes(failed.len()))
    }
}

fn points_json(points: &[LatticePoint]) -> Value {
    Value::Array(points.iter().map(|p| json!([p.r, p.s])).collect())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let verify = cli.verify.core();
    match &cli.command {
        Command::Info { args } => {
            json_only(cli, "info")?;
            let (t, _) = target(cli, args, &[])?;
            let x = &t.x;
            let (matrix, disc, self_int) = if verify == Verify::Assert {
                let chain = hj_chain(x)?;
                (
                    q_matrix(x)?,
                    discrepancy(x)?,
                    chain.self_intersections().to_vec(),
                )
            } else {
                let c = x.cseq()[1..=x.n()].iter().map(|c| -c).collect();
                (q_matrix_by_definition(x), discrepancy_closed(x), c)
            };
            let mut v = json!({
                "d": x.d(),
                "q": x.q(),
                "n": x.n(),
                "qseq": x.qseq(),
                "cseq": x.cseq(),
                "qbarseq": x.qbarseq(),
                "canonical_class": x.canonical_class(),
                "self_intersections": self_int,
                "q_matrix": matrix.rows(),
                "discrepancy": disc.iter().map(rational_json).collect::<Vec<_>>(),
            });
            if let Some((ty, xs, ys)) = t.raw {
                v["raw"] = json!({"d": ty.d, "a": ty.a, "b": ty.b, "x_scale": xs, "y_scale": ys});
            }
            emit(out, &v.to_string())?;
            report_routes(cli, || singularity_checks(x), err)
        }
        Command::Table { args } => {
            let (t, _) = target(cli, args, &[])?;
            let table = delta_table(&t.x, verify)?;
            emit(out, &serialize_table(&table, cli.format))?;
            report_routes(cli, || check_suite(&t.x), err)
        }
        Command::Class { args } => {
            let (t, rest) = target(cli, args, &["K"])?;
            let k = int_arg("K", &rest[0])?;
            let report = class_report(&t.x, k, verify)?;
            emit(out, &serialize_report(&report, cli.format))?;
            report_routes(
                cli,
                || {
                    let mut c = singularity_checks(&t.x);
                    c.extend(class_checks(&t.x, k));
                    c
                },
                err,
            )
        }
        Command::Germ { args } => {
            json_only(cli, "germ")?;
            let (t, rest) = target(cli, args, &["POLY"])?;
            let x = &t.x;
            let germ = parse_germ(&rest[0], x)?;
            let nn = newton_number(x, &germ.support)?;
            let vals = valuation_vector(x, &germ.support)?;
            let v = json!({
                "d": x.d(),
                "q": x.q(),
                "polynomial": germ.polynomial.to_string(),
                "k": germ.k,
                "support": points_json(germ.support.points()),
                "generic": is_generic(x, &germ.support)?,
                "mu": rational_json(&nn.mu),
                "edges": nn.edges,
                "segments": nn.segments,
                "orders": vals.orders.iter().map(rational_json).collect::<Vec<_>>(),
                "alpha": vals.alpha.interior(),
            });
            emit(out, &v.to_string())?;
            report_routes(cli, || class_checks(x, germ.k), err)
        }
        Command::Newton { args, germ, svg } => {
            json_only(cli, "newton")?;
            let (t, rest) = target(cli, args, &["K"])?;
            let x = &t.x;
            let k = x.reduce(int_arg("K", &rest[0])?);
            let class_hull = hull_of_class(x, k);
            let mut polys = vec![(class_hull.clone(), format!("L({k})"))];
            let mut germ_hull: Option<NewtonPolygon> = None;
            if let Some(text) = germ {
                let g = parse_germ(text, x)?;
                if g.k != k {
                    return Err(invalid(format!(
                        "germ {} is in class {}, not {k}",
                        g.polynomial, g.k
                    )));
                }
                let h = g.support.hull();
                polys.push((h.clone(), "N(f)".into()));
                germ_hull = Some(h);
            }
            let picture = render_svg(
                &polys,
                Some(&ClassLattice::new(x, k)),
                &SvgOptions::default(),
            )?;
            match svg {
                Some(path) => {
                    write_svg(path, &picture)?;
                    let mut v = json!({
                        "d": x.d(),
                        "q": x.q(),
                        "k": k,
                        "class_vertices": points_json(class_hull.vertices()),
                        "svg": path.display().to_string(),
                    });
                    if let Some(h) = germ_hull {
                        v["germ_vertices"] = points_json(h.vertices());
                    }
                    emit(out, &v.to_string())
                }
                None => emit(out, &picture),
            }
        }
        Command::Check { args, dmax } => {
            json_only(cli, "check")?;
            let targets: Vec<NormalizedSingularity> = match dmax {
                Some(_) if !args.is_empty() || cli.raw.is_some() => {
                    return Err(invalid("give either D Q or --dmax, not both"))
                }
                Some(n) if *n < 1 => return Err(invalid("--dmax must be at least 1")),
                Some(n) => (1..=*n)
                    .flat_map(|d| (0..d.max(1)).map(move |q| (d, q)))
                    .filter_map(|(d, q)| NormalizedSingularity::new(d, q).ok())
                    .collect(),
                None => vec![target(cli, args, &[])?.0.x],
            };
            let mut routes = 0;
            let mut failures = Vec::new();
            for x in &targets {
                for c in check_suite(x) {
                    routes += 1;
                    if !c.passed {
                        let _ = writeln!(
                            err,
                            "route mismatch in X({};1,{}): {}",
                            x.d(),
                            x.q(),
                            c.name
                        );
                        failures.push(json!({
                            "d": x.d(), "q": x.q(), "name": c.name, "k": c.k,
                            "left": c.left, "right": c.right,
                        }));
                    }
                }
            }
            let n = failures.len();
            let v = json!({
                "singularities": targets.len(),
                "routes": routes,
                "failures": failures,
            });
            emit(out, &v.to_string())?;
            if n > 0 {
                Err(Failure::Routes(n))
            } else {
                Ok(())
            }
        }
        Command::Reconstruct { delta1, delta2 } => {
            json_only(cli, "reconstruct")?;
            let read = |name: &str, s: &str| {
                parse_rational(s)
                    .ok_or_else(|| invalid(format!("{name} must be NUM/DEN, got {s:?}")))
            };
            let (d1, d2) = (read("DELTA1", delta1)?, read("DELTA2", delta2)?);
            let x = reconstruct(&d1, &d2)?;
            // The formula returns the dual presentation of the singularity the
            // values came from; any pair passing its divisibility tests yields
            // some X, so only realized pairs are accepted.
            let realizes = |y: &NormalizedSingularity| -> Result<bool, Failure> {
                Ok(delta_cap(y, 1, Verify::Off)? == d1 && delta_cap(y, 2, Verify::Off)? == d2)
            };
            if !realizes(&x)? && !realizes(&x.dual())? {
                return Err(invalid(format!(
                    "Δ(1) = {d1}, Δ(2) = {d2} are not realized by X({};1,{}) or its dual",
                    x.d(),
                    x.q()
                )));
            }
            let v = json!({"d": x.d(), "q": x.q()});
            emit(out, &v.to_string())
        }
    }
}
