//! μ, δ, κ, Δ and friends, each computed along two independent routes.

use std::fmt::Debug;

use num_traits::{CheckedAdd, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    canonical_decomposition, greedy_decomposition, q_matrix, q_matrix_by_completion,
    q_matrix_by_definition, sum_with_canonical_closed, Decomposition, NormalizedSingularity,
};
use crate::error::{agree, Error, Result};
use crate::germs::{
    generic_germ, germ_support, intersection_multiplicity, is_generic, GenericGerm, GermSupport,
};
use crate::lattice::{
    hull_of_class, kappa_pi_count, minimal_elements, module_generators, product_generators,
    quotient_dimension, region_count, ClassLattice, LatticePoint, RegionCount,
};
use crate::rational::{as_i64, int, rat, widen, Rational, SmallRational};
use crate::resolution::{discrepancy_by_solve, discrepancy_closed, hj_chain, nu};

/// How much redundant work a computation does.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Verify {
    /// Closed forms only.
    Off,
    /// Recompute every value along its second route and fail on disagreement.
    #[default]
    Assert,
}

/// `μ_X(k) = (d − 1 + (k−1)(k̄−1))/d − [0,k]·Q·[k,0]ᵗ`, and `−1` for `k = 0`.
pub fn mu_class_closed(x: &NormalizedSingularity, k: i64) -> Result<Rational> {
    let k = x.reduce(k);
    if k == 0 {
        return Ok(int(-1));
    }
    let dec = greedy_decomposition(x, k);
    let kbar = dec.bar(x);
    let q = q_matrix(x)?;
    let n = x.n();
    let e = dec.entries();
    let mut quad = 0i64;
    for a in 0..=n {
        for b in 0..=n {
            quad += e[a] * q.get(a, b) * e[b + 1];
        }
    }
    Ok(rat(x.d() - 1 + (k - 1) * (kbar - 1), x.d()) - int(quad))
}

/// `μ_X(k) = 1 + (2V − k − k̄)/d` with `2V` twice the area under the class polygon.
pub fn mu_class_by_volume(x: &NormalizedSingularity, k: i64) -> Rational {
    let k = x.reduce(k);
    if k == 0 {
        return int(-1);
    }
    let hull = hull_of_class(x, k);
    let kbar = hull.first().s;
    int(1) + rat(hull.twice_area_under() - k - kbar, x.d())
}

pub fn mu_class(x: &NormalizedSingularity, k: i64) -> Result<Rational> {
    agree(
        "μ of the class",
        mu_class_closed(x, k)?,
        mu_class_by_volume(x, k),
    )
}

/// Newton number of a germ support together with the counts behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonNumber {
    pub mu: Rational,
    pub region: RegionCount,
    /// Compact segments of the germ polygon between consecutive points of `L`.
    pub segments: i64,
    /// Maximal compact edges of the germ polygon.
    pub edges: usize,
}

/// `μ = 2V_N − V_{1,N} − V_{2,N} + μ_X(k)` from the region between the class
/// polygon and the germ polygon, checked against Pick's formula per piece
/// and, when the region is a single piece bounded by both full chains,
/// against `2I_N + ‖k‖_1 + r_N − 2 + μ_X(k)`.
pub fn newton_number(x: &NormalizedSingularity, support: &GermSupport) -> Result<NewtonNumber> {
    let k = support.k();
    let inner = support.hull();
    if inner.first().r != 0 {
        return Err(Error::NotConvenient("y"));
    }
    if inner.last().s != 0 {
        return Err(Error::NotConvenient("x"));
    }
    let lat = ClassLattice::new(x, k);
    let region = region_count(&hull_of_class(x, k), &inner, &lat)?;
    let base = mu_class(x, k)?;
    let d = x.d();
    let axes = rat(region.axis1 + region.axis2, d);
    let mu = rat(region.area2, d) - &axes + &base;
    let by_pick =
        int(region.pick_boundary + 2 * region.interior - 2 * region.pieces) - &axes + &base;
    agree("Newton number (area vs lattice points)", &mu, &by_pick)?;
    let segments = inner.primitive_segments(&ClassLattice::structure(x));
    if region.is_simple() {
        let norm1 = greedy_decomposition(x, k).one_norm();
        let closed = int(2 * region.interior + norm1 + segments - 2) + &base;
        agree("Newton number (closed form)", &mu, &closed)?;
    }
    Ok(NewtonNumber {
        mu,
        region,
        segments,
        edges: inner.edge_count(),
    })
}

/// `δ(d, q, k) = k(k−1−q+d)/(2dq) + δ(q, q_2, k mod q)`, ending at `k = 0` or `d = 1`.
pub fn delta_generic(x: &NormalizedSingularity, k: i64) -> Rational {
    let (mut d, mut q, mut k) = (x.d(), x.q(), x.reduce(k));
    let mut terms = Vec::new();
    while k != 0 && d != 1 {
        terms.push((k * (k - 1 - q + d), 2 * d * q));
        let q2 = num_integer::Integer::div_ceil(&d, &q) * q - d;
        (d, q, k) = (q, q2, k % q);
    }
    let small = terms
        .iter()
        .try_fold(SmallRational::zero(), |acc, &(n, m)| {
            acc.checked_add(&SmallRational::new(n.into(), m.into()))
        });
    match small {
        Some(v) => widen(&v),
        None => terms.iter().map(|&(n, m)| rat(n, m)).sum(),
    }
}

/// `δ` of a product of curvettes: the single-branch values plus all pairwise
/// intersection multiplicities.
pub fn delta_curvette_sum(x: &NormalizedSingularity, g: &GenericGerm) -> Result<Rational> {
    let mut acc = Rational::zero();
    let f = g.factors();
    for (i, c) in f.iter().enumerate() {
        acc += delta_generic(x, x.qseq()[c.index()]);
        for other in &f[i + 1..] {
            acc += intersection_multiplicity(x, c, other)?;
        }
    }
    Ok(acc)
}

pub fn delta(x: &NormalizedSingularity, k: i64) -> Result<Rational> {
    agree(
        "δ",
        delta_generic(x, k),
        delta_curvette_sum(x, &generic_germ(x, k, 0))?,
    )
}

/// `κ = ‖k‖_1 − 1`, and 0 for the unit class.
pub fn kappa_closed(x: &NormalizedSingularity, k: i64) -> i64 {
    let k = x.reduce(k);
    if k == 0 {
        0
    } else {
        greedy_decomposition(x, k).one_norm() - 1
    }
}

/// `κ` as the sum of the counts `κ_π` of the successive HJ blow-ups, following
/// the strict transform of the generic germ to the next singular point.
pub fn kappa_by_blowups(x: &NormalizedSingularity, k: i64) -> Result<i64> {
    let chain = hj_chain(x)?;
    let mut class = x.reduce(k);
    let mut total = 0;
    for (t, stage) in chain.stages().iter().enumerate() {
        if class == 0 {
            break;
        }
        let local = x.stage(t);
        let weight = stage.charts.qw;
        let nu_f = nu(1, weight, hull_of_class(&local, class).vertices())?;
        total += kappa_pi_count(stage.ambient, 1, weight, class, nu_f);
        class %= weight;
    }
    Ok(total)
}

pub fn kappa(x: &NormalizedSingularity, k: i64) -> Result<i64> {
    agree("κ", kappa_closed(x, k), kappa_by_blowups(x, k)?)
}

/// `Δ_X(k) = δ − κ`, with `Δ_X(0) = 0`.
pub fn delta_cap(x: &NormalizedSingularity, k: i64, verify: Verify) -> Result<Rational> {
    let k = x.reduce(k);
    if k == 0 {
        return Ok(Rational::zero());
    }
    Ok(match verify {
        Verify::Off => delta_generic(x, k) - int(kappa_closed(x, k)),
        Verify::Assert => delta(x, k)? - int(kappa(x, k)?),
    })
}

/// `R_X(k) = −Δ_X(−k)`.
pub fn r_blache(x: &NormalizedSingularity, k: i64, verify: Verify) -> Result<Rational> {
    Ok(-delta_cap(x, -k, verify)?)
}

/// Generators of `⊗ O_X(q_i)^{α_i}`.
pub fn coin_product_generators(
    x: &NormalizedSingularity,
    alpha: &Decomposition,
) -> Vec<LatticePoint> {
    let mut gens = vec![LatticePoint::new(0, 0)];
    for i in 1..=x.n() {
        let coin = module_generators(x, x.qseq()[i]);
        for _ in 0..alpha.get(i) {
            gens = product_generators(&gens, &coin);
        }
    }
    gens
}

/// `dim O_X(k) / ⊗ O_X(q_i)^{k_i}`, which vanishes.
pub fn descomp_quotient(x: &NormalizedSingularity, k: i64) -> Result<i64> {
    let gens = coin_product_generators(x, &greedy_decomposition(x, k));
    quotient_dimension(&ClassLattice::new(x, k), &gens)
}

/// `M^nul = O_X(k) ⊗ O_X(w) = ⊕ O_X(q_i)^{k_i + c_i − 2}`, returned as the
/// exponent vector `[k] + [w]`, with `dim O_X(k+w)/M^nul` from lattice counting.
pub fn mnul_decomposition(
    x: &NormalizedSingularity,
    k: i64,
    verify: Verify,
) -> Result<(Decomposition, i64)> {
    let k = x.reduce(k);
    if k == 0 {
        return Err(Error::Domain("M^nul is only defined for k ≠ 0".into()));
    }
    let w = x.canonical_class();
    let dec = greedy_decomposition(x, k).add(&canonical_decomposition(x)?);
    let gens = product_generators(&module_generators(x, k), &module_generators(x, w));
    let dim = quotient_dimension(&ClassLattice::new(x, k + w), &gens)?;
    if verify == Verify::Assert {
        agree(
            "M^nul generators",
            minimal_elements(&coin_product_generators(x, &dec)),
            gens,
        )?;
        agree("κ from M^nul", dim, kappa_closed(x, k))?;
    }
    Ok((dec, dim))
}

/// `X(d; 1, q)` with `d = 1/(1 − 2d_1)` and `q = d·d_2 + 1`, from
/// `d_1 = Δ_X(1)` and `d_2 = Δ_X(2)`.
pub fn reconstruct(d1: &Rational, d2: &Rational) -> Result<NormalizedSingularity> {
    let inconsistent =
        |why: &str| Error::invalid(format!("inconsistent Δ values ({d1}, {d2}): {why}"));
    let denom = int(1) - int(2) * d1;
    if denom <= Rational::zero() {
        return Err(inconsistent("1 − 2·d1 must be positive"));
    }
    let d = denom.recip();
    if !d.is_integer() {
        return Err(inconsistent("1/(1 − 2·d1) is not an integer"));
    }
    let q = &d * d2 + int(1);
    if !q.is_integer() {
        return Err(inconsistent("d·d2 + 1 is not an integer"));
    }
    let d = as_i64(&d).ok_or_else(|| inconsistent("d is too large"))?;
    let q = as_i64(&q).ok_or_else(|| inconsistent("q is too large"))?;
    NormalizedSingularity::new(d, q).map_err(|e| match e {
        Error::InvalidInput(why) => inconsistent(&why),
        other => other,
    })
}

/// Everything known about one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub d: i64,
    pub q: i64,
    pub k: i64,
    pub mu: Rational,
    pub delta: Rational,
    pub kappa: i64,
    pub delta_cap: Rational,
    /// `[k] + [w]`; for `k = 0` this is `[w]`.
    pub mnul: Decomposition,
    pub greedy: Decomposition,
    pub qseq: Vec<i64>,
    pub cseq: Vec<i64>,
    pub qbarseq: Vec<i64>,
    pub discrepancy: Vec<Rational>,
}

pub fn class_report(x: &NormalizedSingularity, k: i64, verify: Verify) -> Result<InvariantReport> {
    let discrepancy = match verify {
        Verify::Off => discrepancy_closed(x),
        Verify::Assert => crate::resolution::discrepancy(x)?,
    };
    class_report_with(x, k, verify, discrepancy)
}

fn class_report_with(
    x: &NormalizedSingularity,
    k: i64,
    verify: Verify,
    discrepancy: Vec<Rational>,
) -> Result<InvariantReport> {
    let k = x.reduce(k);
    let (mu, delta_v, kappa_v) = match verify {
        Verify::Off => (
            mu_class_by_volume(x, k),
            delta_generic(x, k),
            kappa_closed(x, k),
        ),
        Verify::Assert => (mu_class(x, k)?, delta(x, k)?, kappa(x, k)?),
    };
    let greedy = greedy_decomposition(x, k);
    let mnul = if k == 0 {
        canonical_decomposition(x)?
    } else {
        mnul_decomposition(x, k, verify)?.0
    };
    let delta_cap = if k == 0 {
        Rational::zero()
    } else {
        &delta_v - int(kappa_v)
    };
    Ok(InvariantReport {
        d: x.d(),
        q: x.q(),
        k,
        mu,
        delta: delta_v,
        kappa: kappa_v,
        delta_cap,
        mnul,
        greedy,
        qseq: x.qseq().to_vec(),
        cseq: x.cseq().to_vec(),
        qbarseq: x.qbarseq().to_vec(),
        discrepancy,
    })
}

/// One report per class `k = 0..d`, computed in parallel, in class order.
pub fn delta_table(x: &NormalizedSingularity, verify: Verify) -> Result<Vec<InvariantReport>> {
    let discrepancy = match verify {
        Verify::Off => discrepancy_closed(x),
        Verify::Assert => crate::resolution::discrepancy(x)?,
    };
    (0..x.d())
        .into_par_iter()
        .map(|k| class_report_with(x, k, verify, discrepancy.clone()))
        .collect()
}

/// Outcome of comparing the two routes to one quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteCheck {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    pub left: String,
    pub right: String,
    pub passed: bool,
}

fn route<T: PartialEq + Debug>(
    name: &str,
    k: Option<i64>,
    left: Result<T>,
    right: Result<T>,
) -> RouteCheck {
    let show = |v: &Result<T>| match v {
        Ok(v) => format!("{v:?}"),
        Err(e) => format!("error: {e}"),
    };
    let passed = matches!((&left, &right), (Ok(a), Ok(b)) if a == b);
    RouteCheck {
        name: name.into(),
        k,
        left: show(&left),
        right: show(&right),
        passed,
    }
}

/// Route comparisons that depend only on the singularity.
pub fn singularity_checks(x: &NormalizedSingularity) -> Vec<RouteCheck> {
    let mut out = vec![
        route(
            "Q matrix",
            None,
            Ok(q_matrix_by_definition(x)),
            q_matrix_by_completion(x),
        ),
        route(
            "discrepancy",
            None,
            Ok(discrepancy_closed(x)),
            hj_chain(x).and_then(|c| discrepancy_by_solve(&c)),
        ),
        route(
            "Δ(0) = 0",
            None,
            delta_cap(x, 0, Verify::Off),
            Ok(Rational::zero()),
        ),
    ];
    if x.d() > 1 {
        let w = x.canonical_class();
        let closed = Decomposition::new(
            std::iter::once(0)
                .chain(x.cseq()[1..=x.n()].iter().map(|c| c - 2))
                .chain(std::iter::once(0))
                .collect(),
        );
        out.push(route(
            "[w]",
            None,
            Ok(closed),
            Ok(greedy_decomposition(x, w)),
        ));
        out.push(route(
            "Δ(1) = (d−1)/(2d)",
            None,
            delta_cap(x, 1, Verify::Off),
            Ok(rat(x.d() - 1, 2 * x.d())),
        ));
        let rebuilt = delta_cap(x, 1, Verify::Off)
            .and_then(|d1| delta_cap(x, 2, Verify::Off).map(|d2| (d1, d2)))
            .and_then(|(d1, d2)| reconstruct(&d1, &d2))
            .map(|y| crate::arith::equivalent(&y, x));
        out.push(route("reconstruction", None, rebuilt, Ok(true)));
    }
    out
}

/// Route comparisons for one class.
pub fn class_checks(x: &NormalizedSingularity, k: i64) -> Vec<RouteCheck> {
    let k = x.reduce(k);
    let some = Some(k);
    let g = generic_germ(x, k, 0);
    let mut out = vec![
        route(
            "μ of the class",
            some,
            mu_class_closed(x, k),
            Ok(mu_class_by_volume(x, k)),
        ),
        route(
            "δ",
            some,
            Ok(delta_generic(x, k)),
            delta_curvette_sum(x, &g),
        ),
        route(
            "δ seed independence",
            some,
            delta_curvette_sum(x, &g),
            delta_curvette_sum(x, &generic_germ(x, k, 5)),
        ),
        route("κ", some, Ok(kappa_closed(x, k)), kappa_by_blowups(x, k)),
        route("O(k) = ⊗O(q_i)^k_i", some, descomp_quotient(x, k), Ok(0)),
        route(
            "R(k) = −Δ(−k)",
            some,
            r_blache(x, k, Verify::Off)
                .map(|r| r + delta_cap(x, -k, Verify::Off).unwrap_or_else(|_| int(1))),
            Ok(Rational::zero()),
        ),
        route(
            "generic germ is generic",
            some,
            germ_support(&g).and_then(|s| is_generic(x, &s)),
            Ok(true),
        ),
    ];
    if k != 0 {
        out.push(route(
            "κ from M^nul",
            some,
            mnul_decomposition(x, k, Verify::Off).map(|(_, dim)| dim),
            Ok(kappa_closed(x, k)),
        ));
        out.push(route(
            "[k + w]",
            some,
            sum_with_canonical_closed(x, k),
            Ok(greedy_decomposition(x, k + x.canonical_class())),
        ));
    }
    out
}

/// All route checks for a singularity and every class.
pub fn check_suite(x: &NormalizedSingularity) -> Vec<RouteCheck> {
    let mut out = singularity_checks(x);
    let per_class: Vec<Vec<RouteCheck>> = (0..x.d())
        .into_par_iter()
        .map(|k| class_checks(x, k))
        .collect();
    out.extend(per_class.into_iter().flatten());
    out
}

/// Newton number of a generic germ; equals `μ_X(k)`.
pub fn generic_newton_number(x: &NormalizedSingularity, k: i64) -> Result<NewtonNumber> {
    newton_number(x, &germ_support(&generic_germ(x, k, 0))?)
}
