//! Deliberately naive second implementations used to cross-check the closed
//! forms. Nothing here calls into `arith`, `lattice`, `germs`, `resolution`
//! or `invariants` algorithms; only their value types are shared.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::germs::GermSupport;
use crate::lattice::{LatticePoint, NewtonPolygon};
use crate::rational::Rational;

/// Largest order for exponential genericity searches.
pub const SEARCH_MAX_ORDER: i64 = 12;
/// Supports up to this size are taken from the whole search box.
pub const SEARCH_MAX_SUPPORT: usize = 2;
/// Orders up to this value also get every support of size three.
pub const SEARCH_TRIPLES_MAX_ORDER: i64 = 7;

/// Fewest coins summing to `k`, by dynamic programming over `0..=k`.
/// Returns `None` when `k` is not representable.
pub fn dp_coin_optimal(denominations: &[i64], k: i64) -> Option<u64> {
    let k = usize::try_from(k).ok()?;
    dp_coin_table(denominations, k as i64)[k]
}

/// Optimal coin counts for every amount in `0..=kmax`.
pub fn dp_coin_table(denominations: &[i64], kmax: i64) -> Vec<Option<u64>> {
    let kmax = usize::try_from(kmax).unwrap_or(0);
    let mut best: Vec<Option<u64>> = vec![None; kmax + 1];
    best[0] = Some(0);
    for v in 1..=kmax {
        best[v] = denominations
            .iter()
            .filter_map(|&c| usize::try_from(c).ok().filter(|&c| c >= 1 && c <= v))
            .filter_map(|c| best[v - c].map(|n| n + 1))
            .min();
    }
    best
}

/// Coins used by largest-first change making.
pub fn greedy_coins(denominations: &[i64], k: i64) -> Option<u64> {
    let mut coins: Vec<i64> = denominations.iter().copied().filter(|&c| c > 0).collect();
    coins.sort_unstable_by(|a, b| b.cmp(a));
    let (mut left, mut used) = (k, 0u64);
    for c in coins {
        used += (left / c) as u64;
        left %= c;
    }
    (left == 0).then_some(used)
}

/// Remainder sequence `q_0 = d, q_1 = q, …, 0` and the companion sequence
/// `0, 1, …, d`, from the plain recursion.
pub fn hj_sequences(d: i64, q: i64) -> (Vec<i64>, Vec<i64>) {
    let mut qs = vec![d, q];
    let mut qb = vec![0, 1];
    while *qs.last().unwrap() > 0 {
        let n = qs.len();
        let (a, b) = (qs[n - 2], qs[n - 1]);
        let c = (a + b - 1) / b;
        qs.push(c * b - a);
        qb.push(c * qb[n - 1] - qb[n - 2]);
    }
    (qs, qb)
}

fn in_class(d: i64, q: i64, k: i64, r: i64, s: i64) -> bool {
    (r + q * s - k).rem_euclid(d) == 0
}

/// Points of class `k` in `[0, bound)²`.
pub fn class_points(d: i64, q: i64, k: i64, bound: i64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for r in 0..bound {
        for s in 0..bound {
            if in_class(d, q, k, r, s) {
                out.push(LatticePoint::new(r, s));
            }
        }
    }
    out
}

fn dominated(p: &LatticePoint, by: &LatticePoint) -> bool {
    by.r <= p.r && by.s <= p.s
}

/// Points not dominated by a different point, by pairwise comparison.
pub fn brute_minimal(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut out: Vec<LatticePoint> = Vec::new();
    for p in points {
        if points.iter().any(|o| o != p && dominated(p, o)) || out.contains(p) {
            continue;
        }
        out.push(*p);
    }
    out.sort_by_key(|p| (p.r, p.s));
    out
}

/// Generators of the class-`k` module: the minimal points in a box large
/// enough to hold all of them.
pub fn brute_generators(d: i64, q: i64, k: i64) -> Vec<LatticePoint> {
    brute_minimal(&class_points(d, q, k, d + 1))
}

/// Vertices of the convex hull of `points + R²₊`, testing each minimal
/// point against every pair that straddles it.
pub fn brute_hull(points: &[LatticePoint]) -> Result<NewtonPolygon> {
    let cand = brute_minimal(points);
    let mut verts = Vec::new();
    for (i, p) in cand.iter().enumerate() {
        let hidden = cand.iter().any(|u| {
            u.r < p.r
                && cand.iter().any(|v| {
                    v.r > p.r && (v.r - u.r) * (p.s - u.s) - (v.s - u.s) * (p.r - u.r) >= 0
                })
        });
        if i == 0 || i + 1 == cand.len() || !hidden {
            verts.push(*p);
        }
    }
    NewtonPolygon::from_vertices(verts)
}

/// Class-`k` points in `[0, bound)²` outside the module spanned by
/// `generators`.
pub fn brute_staircase(d: i64, q: i64, k: i64, generators: &[LatticePoint], bound: i64) -> u64 {
    class_points(d, q, k, bound)
        .iter()
        .filter(|p| !generators.iter().any(|g| dominated(p, g)))
        .count() as u64
}

/// Product of sparse factors through a dense coefficient grid.
pub fn expand_product(
    factors: &[Vec<(LatticePoint, Rational)>],
) -> BTreeMap<LatticePoint, Rational> {
    let mut grid: Vec<Vec<Rational>> = vec![vec![Rational::from_integer(1.into())]];
    for f in factors {
        let dr = f.iter().map(|t| t.0.r).max().unwrap_or(0) as usize;
        let ds = f.iter().map(|t| t.0.s).max().unwrap_or(0) as usize;
        let mut next = vec![vec![Rational::zero(); grid[0].len() + ds]; grid.len() + dr];
        for (r, row) in grid.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (p, a) in f {
                    next[r + p.r as usize][s + p.s as usize] += c * a;
                }
            }
        }
        grid = next;
    }
    let mut out = BTreeMap::new();
    for (r, row) in grid.into_iter().enumerate() {
        for (s, c) in row.into_iter().enumerate() {
            if !c.is_zero() {
                out.insert(LatticePoint::new(r as i64, s as i64), c);
            }
        }
    }
    out
}

/// Orders along the interior exceptional curves of a monomial, from the
/// recursion sequences.
pub fn monomial_orders(d: i64, q: i64, p: &LatticePoint) -> Vec<Rational> {
    let (qs, qb) = hj_sequences(d, q);
    orders_from(d, &qs, &qb, p)
}

fn orders_from(d: i64, qs: &[i64], qb: &[i64], p: &LatticePoint) -> Vec<Rational> {
    (1..qs.len() - 1)
        .map(|i| Rational::new((p.r * qb[i] + p.s * qs[i]).into(), d.into()))
        .collect()
}

fn support_orders(d: i64, qs: &[i64], qb: &[i64], support: &[LatticePoint]) -> Vec<Rational> {
    let mut acc: Option<Vec<Rational>> = None;
    for p in support {
        let v = orders_from(d, qs, qb, p);
        acc = Some(match acc {
            None => v,
            Some(a) => a.into_iter().zip(v).map(|(x, y)| x.min(y)).collect(),
        });
    }
    acc.unwrap_or_default()
}

fn leq(a: &[Rational], b: &[Rational]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// One enumerated support with its valuation and the two verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchedSupport {
    pub points: Vec<LatticePoint>,
    pub orders: Vec<Rational>,
    pub minimal: bool,
    pub hull_generic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericitySearch {
    pub minimal: Vec<Vec<Rational>>,
    pub supports: Vec<SearchedSupport>,
}

impl GenericitySearch {
    /// Supports where minimality and the hull criterion disagree.
    pub fn disagreements(&self) -> Vec<&SearchedSupport> {
        self.supports
            .iter()
            .filter(|s| s.minimal != s.hull_generic)
            .collect()
    }
}

/// Minimal elements under the componentwise order. When the componentwise
/// minimum is attained it is the only one.
fn minimal_vectors(all: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let Some(first) = all.first() else {
        return Vec::new();
    };
    let floor: Vec<Rational> = all.iter().fold(first.clone(), |acc, v| {
        acc.into_iter()
            .zip(v)
            .map(|(a, b)| a.min(b.clone()))
            .collect()
    });
    if all.contains(&floor) {
        return vec![floor];
    }
    let mut distinct = all.to_vec();
    distinct.sort();
    distinct.dedup();
    distinct
        .iter()
        .filter(|v| !distinct.iter().any(|w| w != *v && leq(w, v)))
        .cloned()
        .collect()
}

fn subsets_up_to<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for it in items {
        let grown: Vec<Vec<T>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut t = s.clone();
                t.push(it.clone());
                t
            })
            .collect();
        out.extend(grown);
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Valuations of every small support in `[0, box_size)²` and every set of
/// module generators, with the minimal ones marked. `hull_generic` is the
/// polygon criterion supplied by the caller, so the search itself stays
/// free of the hull code it is checking.
pub fn genericity_search(
    d: i64,
    q: i64,
    k: i64,
    box_size: i64,
    max_support: usize,
    hull_generic: impl Fn(&[LatticePoint]) -> Result<bool>,
) -> Result<GenericitySearch> {
    let pts = class_points(d, q, k, box_size);
    let mut sets = subsets_up_to(&pts, max_support);
    for s in subsets_up_to(&brute_generators(d, q, k), usize::MAX) {
        if s.len() > max_support {
            sets.push(s);
        }
    }
    let (qs, qb) = hj_sequences(d, q);
    let orders: Vec<Vec<Rational>> = sets
        .iter()
        .map(|s| support_orders(d, &qs, &qb, s))
        .collect();
    let minimal = minimal_vectors(&orders);
    let mut supports = Vec::with_capacity(sets.len());
    for (points, orders) in sets.into_iter().zip(orders) {
        let is_min = minimal.contains(&orders);
        let hull = hull_generic(&points)?;
        supports.push(SearchedSupport {
            points,
            orders,
            minimal: is_min,
            hull_generic: hull,
        });
    }
    Ok(GenericitySearch { minimal, supports })
}

/// The polygon criterion for a raw support, for use with
/// [`genericity_search`].
pub fn hull_criterion(
    x: &crate::arith::NormalizedSingularity,
    k: i64,
) -> impl Fn(&[LatticePoint]) -> Result<bool> + '_ {
    move |pts| crate::germs::is_generic(x, &GermSupport::new(x, k, pts)?)
}
