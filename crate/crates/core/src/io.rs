//! Germ parsing, report serialization and SVG rendering.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{Decomposition, NormalizedSingularity};
use crate::error::{Error, Result};
use crate::germs::{GermSupport, Polynomial};
use crate::invariants::InvariantReport;
use crate::lattice::{ClassLattice, LatticePoint, NewtonPolygon};
use crate::rational::{fmt_rational, parse_rational, Rational};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 4096;

/// A polynomial together with the class all of its monomials share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGerm {
    pub polynomial: Polynomial,
    pub support: GermSupport,
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|p| p.1).collect();
                out.push((pos, Tok::Num(digits.parse().expect("digits"))));
                continue;
            }
            'x' | 'X' => Tok::X,
            'y' | 'Y' => Tok::Y,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{b7}' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character '{other}'"),
                });
            }
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    /// expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial> {
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// term := power (('*' | '/' | juxtaposition) power)*
    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let divisor = self.power()?;
                    let terms = divisor.terms();
                    let constant = match terms.as_slice() {
                        [(p, c)] if *p == LatticePoint::new(0, 0) => c.clone(),
                        [] => {
                            return Err(Error::Syntax {
                                pos,
                                msg: "division by zero".into(),
                            })
                        }
                        _ => {
                            return Err(Error::Syntax {
                                pos,
                                msg: "can only divide by a nonzero constant".into(),
                            })
                        }
                    };
                    acc = acc.mul(&Polynomial::constant(constant.recip()));
                }
                Some(Tok::Num(_) | Tok::X | Tok::Y | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// power := atom ['^' integer]
    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Tok::Num(n)) => match n.to_u32().filter(|&e| e <= MAX_EXPONENT) {
                Some(e) => Ok(base.pow(e)),
                None => {
                    self.at -= 1;
                    self.err(format!("exponent exceeds {MAX_EXPONENT}"))
                }
            },
            _ => {
                self.at -= 1;
                self.err("expected a non-negative integer exponent")
            }
        }
    }

    /// atom := integer | 'x' | 'y' | '(' expr ')'
    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Num(_)) => {
                let Some(Tok::Num(n)) = self.bump() else {
                    unreachable!()
                };
                Ok(Polynomial::constant(Rational::from_integer(n)))
            }
            Some(Tok::X) => {
                self.bump();
                Ok(Polynomial::x())
            }
            Some(Tok::Y) => {
                self.bump();
                Ok(Polynomial::y())
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Some(Tok::Minus | Tok::Plus) => self.err("sign not allowed here; use parentheses"),
            Some(_) => self.err("expected a number, x, y or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a polynomial in `x, y` with rational coefficients, expanding
/// products and powers exactly.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let poly = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("unexpected token");
    }
    Ok(poly)
}

/// Parses a germ and checks that all monomials lie in one class, taken from
/// the leading monomial in canonical order.
pub fn parse_germ(text: &str, x: &NormalizedSingularity) -> Result<ParsedGerm> {
    let polynomial = parse_polynomial(text)?;
    let terms = polynomial.terms();
    let Some((first, _)) = terms.first() else {
        return Err(Error::ZeroPolynomial);
    };
    let k = x.class_of(first.r, first.s);
    for (p, _) in &terms[1..] {
        let c = x.class_of(p.r, p.s);
        if c != k {
            return Err(Error::MixedClasses {
                first: first.monomial(),
                first_class: k,
                second: p.monomial(),
                second_class: c,
            });
        }
    }
    let support = GermSupport::new(x, k, &polynomial.support())?;
    Ok(ParsedGerm {
        polynomial,
        support,
        k,
    })
}

/// Output format for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::invalid(format!(
                "unknown format '{other}' (expected json or csv)"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BigNum {
    Small(i64),
    Big(String),
}

impl BigNum {
    fn from_big(n: &BigInt) -> Self {
        n.to_i64()
            .map_or_else(|| BigNum::Big(n.to_string()), BigNum::Small)
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            BigNum::Small(v) => Ok(BigInt::from(*v)),
            BigNum::Big(s) => s
                .parse()
                .map_err(|_| Error::invalid(format!("bad integer '{s}'"))),
        }
    }
}

/// `{"num": …, "den": …}` with a positive denominator.
#[derive(Serialize, Deserialize)]
struct RatJson {
    num: BigNum,
    den: BigNum,
}

impl RatJson {
    fn from(r: &Rational) -> Self {
        RatJson {
            num: BigNum::from_big(r.numer()),
            den: BigNum::from_big(r.denom()),
        }
    }

    fn to_rational(&self) -> Result<Rational> {
        let den = self.den.to_big()?;
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(Rational::new(self.num.to_big()?, den))
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    d: i64,
    q: i64,
    k: i64,
    mu: RatJson,
    delta: RatJson,
    kappa: i64,
    #[serde(rename = "Delta")]
    delta_cap: RatJson,
    mnul: Vec<i64>,
    greedy: Vec<i64>,
    qseq: Vec<i64>,
    cseq: Vec<i64>,
    qbarseq: Vec<i64>,
    discrepancy: Vec<RatJson>,
}

impl ReportJson {
    fn from(r: &InvariantReport) -> Self {
        ReportJson {
            d: r.d,
            q: r.q,
            k: r.k,
            mu: RatJson::from(&r.mu),
            delta: RatJson::from(&r.delta),
            kappa: r.kappa,
            delta_cap: RatJson::from(&r.delta_cap),
            mnul: r.mnul.entries().to_vec(),
            greedy: r.greedy.entries().to_vec(),
            qseq: r.qseq.clone(),
            cseq: r.cseq.clone(),
            qbarseq: r.qbarseq.clone(),
            discrepancy: r.discrepancy.iter().map(RatJson::from).collect(),
        }
    }

    fn into_report(self) -> Result<InvariantReport> {
        Ok(InvariantReport {
            d: self.d,
            q: self.q,
            k: self.k,
            mu: self.mu.to_rational()?,
            delta: self.delta.to_rational()?,
            kappa: self.kappa,
            delta_cap: self.delta_cap.to_rational()?,
            mnul: Decomposition::new(self.mnul),
            greedy: Decomposition::new(self.greedy),
            qseq: self.qseq,
            cseq: self.cseq,
            qbarseq: self.qbarseq,
            discrepancy: self
                .discrepancy
                .iter()
                .map(RatJson::to_rational)
                .collect::<Result<_>>()?,
        })
    }
}

/// A rational as a JSON value `{"num": …, "den": …}`.
pub fn rational_json(r: &Rational) -> serde_json::Value {
    serde_json::to_value(RatJson::from(r)).expect("plain data")
}

pub fn report_json(r: &InvariantReport) -> serde_json::Value {
    serde_json::to_value(ReportJson::from(r)).expect("plain data")
}

const CSV_HEADER: [&str; 13] = [
    "d",
    "q",
    "k",
    "mu",
    "delta",
    "kappa",
    "Delta",
    "mnul",
    "greedy",
    "qseq",
    "cseq",
    "qbarseq",
    "discrepancy",
];

fn vec_cell<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    format!("[{}]", v.iter().map(f).collect::<Vec<_>>().join(","))
}

fn csv_row(r: &InvariantReport) -> Vec<String> {
    vec![
        r.d.to_string(),
        r.q.to_string(),
        r.k.to_string(),
        fmt_rational_slash(&r.mu),
        fmt_rational_slash(&r.delta),
        r.kappa.to_string(),
        fmt_rational_slash(&r.delta_cap),
        vec_cell(r.mnul.entries(), i64::to_string),
        vec_cell(r.greedy.entries(), i64::to_string),
        vec_cell(&r.qseq, i64::to_string),
        vec_cell(&r.cseq, i64::to_string),
        vec_cell(&r.qbarseq, i64::to_string),
        vec_cell(&r.discrepancy, fmt_rational_slash),
    ]
}

/// Always `num/den`, also for integers.
fn fmt_rational_slash(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn write_csv(reports: &[InvariantReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(csv_row(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// One report as a JSON object or a CSV table with a header row.
pub fn serialize_report(r: &InvariantReport, format: Format) -> String {
    match format {
        Format::Json => report_json(r).to_string(),
        Format::Csv => write_csv(std::slice::from_ref(r)),
    }
}

/// Several reports as a JSON array or a CSV table.
pub fn serialize_table(reports: &[InvariantReport], format: Format) -> String {
    match format {
        Format::Json => {
            serde_json::Value::Array(reports.iter().map(report_json).collect()).to_string()
        }
        Format::Csv => write_csv(reports),
    }
}

pub fn deserialize_report_json(text: &str) -> Result<InvariantReport> {
    let raw: ReportJson =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad report JSON: {e}")))?;
    raw.into_report()
}

/// Reads a JSON array of reports, or a single report object.
pub fn deserialize_table_json(text: &str) -> Result<Vec<InvariantReport>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad report JSON: {e}")))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        single => vec![single],
    };
    items
        .into_iter()
        .map(|v| {
            serde_json::from_value::<ReportJson>(v)
                .map_err(|e| Error::invalid(format!("bad report JSON: {e}")))?
                .into_report()
        })
        .collect()
}

fn parse_cell_rational(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::invalid(format!("bad rational '{s}'")))
}

fn parse_cell_vec<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::invalid(format!("bad vector '{s}'")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|p| f(p.trim())).collect()
}

fn parse_cell_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad integer '{s}'")))
}

pub fn deserialize_table_csv(text: &str) -> Result<Vec<InvariantReport>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd
        .headers()
        .map_err(|e| Error::invalid(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::invalid("unexpected CSV header"));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::invalid(e.to_string()))?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        out.push(InvariantReport {
            d: parse_cell_int(f(0))?,
            q: parse_cell_int(f(1))?,
            k: parse_cell_int(f(2))?,
            mu: parse_cell_rational(f(3))?,
            delta: parse_cell_rational(f(4))?,
            kappa: parse_cell_int(f(5))?,
            delta_cap: parse_cell_rational(f(6))?,
            mnul: Decomposition::new(parse_cell_vec(f(7), parse_cell_int)?),
            greedy: Decomposition::new(parse_cell_vec(f(8), parse_cell_int)?),
            qseq: parse_cell_vec(f(9), parse_cell_int)?,
            cseq: parse_cell_vec(f(10), parse_cell_int)?,
            qbarseq: parse_cell_vec(f(11), parse_cell_int)?,
            discrepancy: parse_cell_vec(f(12), parse_cell_rational)?,
        });
    }
    Ok(out)
}

/// Viewport and styling of [`render_svg`].
#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Visible exponent range; `None` fits all polygons with some room.
    pub max_r: Option<i64>,
    pub max_s: Option<i64>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 480.0,
            height: 480.0,
            margin: 36.0,
            max_r: None,
            max_s: None,
        }
    }
}

const PALETTE: [&str; 4] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"];

/// Draws polygon chains (with their two rays) over the lattice points of
/// `overlay`. The output depends only on the inputs.
pub fn render_svg(
    polygons: &[(NewtonPolygon, String)],
    overlay: Option<&ClassLattice>,
    opts: &SvgOptions,
) -> Result<String> {
    if polygons.is_empty() {
        return Err(Error::invalid("nothing to draw"));
    }
    let far_r = polygons.iter().map(|(p, _)| p.last().r).max().unwrap();
    let far_s = polygons.iter().map(|(p, _)| p.first().s).max().unwrap();
    let max_r = opts.max_r.unwrap_or(far_r + 2 + far_r / 5).max(1);
    let max_s = opts.max_s.unwrap_or(far_s + 2 + far_s / 5).max(1);
    let (w, h, m) = (opts.width, opts.height, opts.margin);
    let ux = (w - 2.0 * m) / max_r as f64;
    let uy = (h - 2.0 * m) / max_s as f64;
    let px = |r: f64| m + r * ux;
    let py = |s: f64| h - m - s * uy;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0.000" y="0.000" width="{w:.3}" height="{h:.3}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<path d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" stroke="black" stroke-width="1.000"/>"#,
        px(0.0),
        py(0.0),
        px(max_r as f64),
        py(0.0),
        px(0.0),
        py(0.0),
        px(0.0),
        py(max_s as f64)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="12" font-family="sans-serif">r</text>"#,
        px(max_r as f64) + 4.0,
        py(0.0) + 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="12" font-family="sans-serif">s</text>"#,
        px(0.0) - 4.0,
        py(max_s as f64) - 6.0
    );
    if let Some(lat) = overlay {
        let _ = writeln!(out, r##"<g fill="#777777">"##);
        for p in lat.points_in_box(max_r, max_s) {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="2.000"/>"#,
                px(p.r as f64),
                py(p.s as f64)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    for (idx, (poly, label)) in polygons.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut pts = vec![(poly.first().r as f64, max_s as f64)];
        pts.extend(poly.vertices().iter().map(|v| (v.r as f64, v.s as f64)));
        pts.push((max_r as f64, poly.last().s as f64));
        let coords: Vec<String> = pts
            .iter()
            .map(|&(r, s)| format!("{:.3},{:.3}", px(r), py(s)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2.000"/>"#,
            coords.join(" ")
        );
        for v in poly.vertices() {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3.500" fill="{color}"/>"#,
                px(v.r as f64),
                py(v.s as f64)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="13" font-family="sans-serif" fill="{color}">{}</text>"#,
            w - m - 150.0,
            m + 16.0 * (idx as f64 + 1.0),
            escape(label)
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Display helper shared by the front ends: `15/7`, `-1`, `0`.
pub fn show_rational(r: &Rational) -> String {
    fmt_rational(r)
}
