//! Class lattices `L(k)`, their Newton polygons and lattice point counts.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    decomposition_norms, greedy_decomposition, modulo, NormalizedSingularity, RawType,
};
use crate::error::{agree, Error, Result};
use crate::rational::{int, Rational};

/// Exponent vector of the monomial `x^r y^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub r: i64,
    pub s: i64,
}

impl LatticePoint {
    pub const fn new(r: i64, s: i64) -> Self {
        LatticePoint { r, s }
    }

    /// Componentwise `self ≤ other`, i.e. `other ∈ self + R²₊`.
    pub fn divides(&self, other: &LatticePoint) -> bool {
        self.r <= other.r && self.s <= other.s
    }

    pub fn plus(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint::new(self.r + other.r, self.s + other.s)
    }

    /// The monomial in `x, y` notation, e.g. `x^3*y`.
    pub fn monomial(&self) -> String {
        let part = |v: &str, e: i64| match e {
            0 => None,
            1 => Some(v.to_string()),
            e => Some(format!("{v}^{e}")),
        };
        let parts: Vec<String> = [part("x", self.r), part("y", self.s)]
            .into_iter()
            .flatten()
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

fn cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i64 {
    (a.r - o.r) * (b.s - o.s) - (a.s - o.s) * (b.r - o.r)
}

/// `L(k) = {(r, s) ∈ N² : r + q·s ≡ k (mod d)}`; `k = 0` is the structure lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassLattice {
    d: i64,
    q: i64,
    k: i64,
}

impl ClassLattice {
    pub fn new(x: &NormalizedSingularity, k: i64) -> Self {
        ClassLattice {
            d: x.d(),
            q: x.q(),
            k: x.reduce(k),
        }
    }

    pub fn structure(x: &NormalizedSingularity) -> Self {
        Self::new(x, 0)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn class_of(&self, p: &LatticePoint) -> i64 {
        modulo(p.r + self.q * modulo(p.s, self.d), self.d)
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        p.r >= 0 && p.s >= 0 && self.class_of(p) == self.k
    }

    /// Least `r ≥ 0` with `(r, s) ∈ L(k)`.
    pub fn first_r(&self, s: i64) -> i64 {
        modulo(self.k - self.q * modulo(s, self.d), self.d)
    }

    /// Whether the displacement `v` lies in the structure lattice.
    pub fn is_step(&self, r: i64, s: i64) -> bool {
        modulo(r + self.q * modulo(s, self.d), self.d) == 0
    }

    /// All points of the lattice in `[0, rmax] × [0, smax]`.
    pub fn points_in_box(&self, rmax: i64, smax: i64) -> impl Iterator<Item = LatticePoint> + '_ {
        let d = self.d;
        (0..=smax).flat_map(move |s| {
            let start = self.first_r(s);
            (0..)
                .map(move |t| start + t * d)
                .take_while(move |&r| r <= rmax)
                .map(move |r| LatticePoint::new(r, s))
        })
    }
}

/// Minimal elements of a point set under the componentwise order, sorted by
/// increasing `r`.
pub fn minimal_elements(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<LatticePoint> = Vec::new();
    for p in sorted {
        if out.last().map_or(true, |last| p.s < last.s) {
            out.push(p);
        }
    }
    out
}

/// Staircase generators of `O_X(k)`: the minimal points of `L(k)`, sorted by
/// increasing `r`. All of them satisfy `r, s < d`.
pub fn module_generators(x: &NormalizedSingularity, k: i64) -> Vec<LatticePoint> {
    let lat = ClassLattice::new(x, k);
    let mut gens = Vec::new();
    let mut best = i64::MAX;
    for s in 0..x.d() {
        let r = lat.first_r(s);
        if r < best {
            best = r;
            gens.push(LatticePoint::new(r, s));
            if r == 0 {
                break;
            }
        }
    }
    gens.reverse();
    gens
}

/// Minimal points of the pointwise sums `a + b`: generators of the product
/// of two monomial modules.
pub fn product_generators(a: &[LatticePoint], b: &[LatticePoint]) -> Vec<LatticePoint> {
    let sums: Vec<LatticePoint> = a
        .iter()
        .flat_map(|p| b.iter().map(move |g| p.plus(g)))
        .collect();
    minimal_elements(&sums)
}

/// Compact boundary chain of `conv(support) + R²₊`, from the vertex nearest
/// the `s`-axis (smallest `r`) to the one nearest the `r`-axis (smallest `s`).
/// Rays up from the first vertex and right from the last are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NewtonPolygon {
    vertices: Vec<LatticePoint>,
}

impl NewtonPolygon {
    /// Validates a vertex chain: `r` strictly increasing, `s` strictly
    /// decreasing, strictly convex.
    pub fn from_vertices(vertices: Vec<LatticePoint>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("a Newton polygon needs at least one vertex"));
        }
        if vertices.iter().any(|p| p.r < 0 || p.s < 0) {
            return Err(Error::invalid(
                "vertices must have non-negative coordinates",
            ));
        }
        for w in vertices.windows(2) {
            if !(w[0].r < w[1].r && w[0].s > w[1].s) {
                return Err(Error::invalid(format!(
                    "vertices {} and {} are out of order",
                    w[0], w[1]
                )));
            }
        }
        for w in vertices.windows(3) {
            if cross(w[0], w[1], w[2]) <= 0 {
                return Err(Error::invalid(format!(
                    "chain is not strictly convex at {}",
                    w[1]
                )));
            }
        }
        Ok(NewtonPolygon { vertices })
    }

    /// `conv(points) + R²₊`.
    pub fn from_points(points: &[LatticePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot take the hull of an empty support"));
        }
        let mut sorted = points.to_vec();
        sorted.sort();
        sorted.dedup();
        let mut hull: Vec<LatticePoint> = Vec::new();
        for p in sorted {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        let min_s = hull.iter().map(|p| p.s).min().unwrap();
        let end = hull.iter().position(|p| p.s == min_s).unwrap();
        hull.truncate(end + 1);
        Ok(NewtonPolygon { vertices: hull })
    }

    /// `(a, b) + R²₊`.
    pub fn quadrant(at: LatticePoint) -> Self {
        NewtonPolygon { vertices: vec![at] }
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn first(&self) -> LatticePoint {
        self.vertices[0]
    }

    pub fn last(&self) -> LatticePoint {
        *self.vertices.last().unwrap()
    }

    /// Edge vectors `(Δr, Δs)`, with `Δr > 0 > Δs`.
    pub fn edges(&self) -> Vec<(i64, i64)> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].r - w[0].r, w[1].s - w[0].s))
            .collect()
    }

    /// Number of maximal compact edges.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `r_N`: number of compact segments between consecutive points of the
    /// structure lattice `L` on the chain.
    pub fn primitive_segments(&self, lat: &ClassLattice) -> i64 {
        self.edges()
            .into_iter()
            .map(|(dr, ds)| {
                let g = dr.gcd(&ds);
                (1..=g)
                    .rev()
                    .find(|m| g % m == 0 && lat.is_step(dr / m, ds / m))
                    .unwrap_or(1)
            })
            .sum()
    }

    /// Touches both coordinate axes.
    pub fn is_convenient(&self) -> bool {
        self.first().r == 0 && self.last().s == 0
    }

    pub fn translate(&self, by: LatticePoint) -> NewtonPolygon {
        NewtonPolygon {
            vertices: self.vertices.iter().map(|p| p.plus(&by)).collect(),
        }
    }

    /// Membership in the closed region `conv + R²₊`.
    pub fn contains(&self, p: &LatticePoint) -> bool {
        p.r >= self.first().r
            && p.s >= self.last().s
            && self.vertices.windows(2).all(|w| cross(w[0], w[1], *p) >= 0)
    }

    /// Membership in the open interior of the region.
    pub fn strictly_contains(&self, p: &LatticePoint) -> bool {
        p.r > self.first().r
            && p.s > self.last().s
            && self.vertices.windows(2).all(|w| cross(w[0], w[1], *p) > 0)
    }

    /// Whether `p` lies on the compact chain.
    pub fn on_chain(&self, p: &LatticePoint) -> bool {
        if self.vertices.len() == 1 {
            return *p == self.first();
        }
        self.vertices
            .windows(2)
            .any(|w| cross(w[0], w[1], *p) == 0 && w[0].r <= p.r && p.r <= w[1].r)
    }

    /// Height of the boundary over `r`, for `r ≥ first().r`: the chain, then 0
    /// once past the last vertex of a convenient polygon.
    pub fn height(&self, r: i64) -> Rational {
        assert!(r >= self.first().r, "height queried left of the polygon");
        for w in self.vertices.windows(2) {
            if r <= w[1].r {
                let (a, b) = (w[0], w[1]);
                return int(a.s)
                    + Rational::new((r - a.r).into(), (b.r - a.r).into()) * int(b.s - a.s);
            }
        }
        int(self.last().s)
    }

    /// Twice the area between the chain and the `r`-axis, over `[first.r, last.r]`.
    pub fn twice_area_under(&self) -> i64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1].r - w[0].r) * (w[0].s + w[1].s))
            .sum()
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(LatticePoint::to_string).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// The Newton polygon of the whole class, from the partial norms of `[k]`:
/// vertices `(‖[k]‖_j, ‖[k]‖^{j−1})`, from `(0, k̄)` to `(k, 0)`.
pub fn hull_of_class(x: &NormalizedSingularity, k: i64) -> NewtonPolygon {
    let norms = decomposition_norms(x, &greedy_decomposition(x, k));
    let mut vertices: Vec<LatticePoint> = (1..=x.n() + 1)
        .rev()
        .map(|j| LatticePoint::new(norms.tail[j], norms.head[j - 1]))
        .collect();
    vertices.dedup();
    let poly = NewtonPolygon { vertices };
    if cfg!(debug_assertions) {
        let generic = NewtonPolygon::from_points(&module_generators(x, k)).unwrap();
        assert_eq!(poly, generic, "class hull routes disagree for {x}, k={k}");
    }
    poly
}

/// `Γ_L(f)` of a support, after checking every point lies in `L(k)`.
pub fn hull_of_diagram(
    x: &NormalizedSingularity,
    k: i64,
    support: &[LatticePoint],
) -> Result<NewtonPolygon> {
    let lat = ClassLattice::new(x, k);
    for p in support {
        if p.r < 0 || p.s < 0 {
            return Err(Error::invalid(format!("negative exponent in {p}")));
        }
        if !lat.contains(p) {
            return Err(Error::ClassMismatch {
                monomial: p.monomial(),
                found: lat.class_of(p),
                expected: lat.k(),
            });
        }
    }
    NewtonPolygon::from_points(support)
}

/// Minkowski sum by merging the edge sequences by slope.
pub fn minkowski_sum(a: &NewtonPolygon, b: &NewtonPolygon) -> NewtonPolygon {
    let (ea, eb) = (a.edges(), b.edges());
    let mut merged: Vec<(i64, i64)> = Vec::with_capacity(ea.len() + eb.len());
    let (mut i, mut j) = (0, 0);
    while i < ea.len() || j < eb.len() {
        let take_a = if i == ea.len() {
            false
        } else if j == eb.len() {
            true
        } else {
            // steeper (more negative slope) edges come first
            ea[i].1 * eb[j].0 <= eb[j].1 * ea[i].0
        };
        let e = if take_a {
            i += 1;
            ea[i - 1]
        } else {
            j += 1;
            eb[j - 1]
        };
        match merged.last_mut() {
            Some(last) if last.1 * e.0 == e.1 * last.0 => {
                last.0 += e.0;
                last.1 += e.1;
            }
            _ => merged.push(e),
        }
    }
    let mut vertices = vec![a.first().plus(&b.first())];
    for (dr, ds) in merged {
        let p = *vertices.last().unwrap();
        vertices.push(LatticePoint::new(p.r + dr, p.s + ds));
    }
    NewtonPolygon { vertices }
}

/// Lattice point counts of the region `Γ(outer) ∖ Γ(inner)`.
///
/// `area2` is twice its Euclidean area, `axis1`/`axis2` the lengths of the
/// gaps it leaves on the `r`- and `s`-axis. `boundary` counts every lattice
/// point on the outer chain, the inner chain or the axis gaps; `interior` the
/// points strictly inside. The region may fall apart into `pieces` where the
/// two chains touch; `pick_boundary` sums the boundary counts of the pieces,
/// so that Pick's formula reads `area2 = d·(pick_boundary + 2·interior − 2·pieces)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCount {
    pub interior: i64,
    pub boundary: i64,
    pub area2: i64,
    pub axis1: i64,
    pub axis2: i64,
    pub pieces: i64,
    pub pick_boundary: i64,
}

impl RegionCount {
    /// `V_N`, the area normalized by the covolume `d`.
    pub fn normalized_area(&self, d: i64) -> Rational {
        Rational::new(self.area2.into(), (2 * d).into())
    }

    /// A single piece whose boundary is everything counted in `boundary`.
    pub fn is_simple(&self) -> bool {
        self.pieces == 1 && self.boundary == self.pick_boundary
    }
}

/// Counts by enumerating the lattice over the bounding box of the inner
/// polygon's intercepts, and checks Pick's formula against the shoelace area.
pub fn region_count(
    outer: &NewtonPolygon,
    inner: &NewtonPolygon,
    lat: &ClassLattice,
) -> Result<RegionCount> {
    for (poly, name) in [(outer, "outer"), (inner, "inner")] {
        if poly.first().r != 0 {
            return Err(Error::NotConvenient(if name == "outer" {
                "s (outer)"
            } else {
                "s"
            }));
        }
        if poly.last().s != 0 {
            return Err(Error::NotConvenient(if name == "outer" {
                "r (outer)"
            } else {
                "r"
            }));
        }
    }
    if let Some(v) = inner.vertices().iter().find(|v| !outer.contains(v)) {
        return Err(Error::NotContained(v.to_string()));
    }
    let (big_r, big_s) = (inner.last().r, inner.first().s);
    let (outer_r, outer_s) = (outer.last().r, outer.first().s);
    let on_r_gap = |p: &LatticePoint| p.s == 0 && outer_r <= p.r && p.r <= big_r;
    let on_s_gap = |p: &LatticePoint| p.r == 0 && outer_s <= p.s && p.s <= big_s;

    let mut interior = 0;
    let mut boundary_points = Vec::new();
    for p in lat.points_in_box(big_r, big_s) {
        let on_boundary = outer.on_chain(&p) || inner.on_chain(&p) || on_r_gap(&p) || on_s_gap(&p);
        if on_boundary {
            boundary_points.push(p);
        } else if outer.strictly_contains(&p) && !inner.contains(&p) {
            interior += 1;
        }
    }

    // Split [0, R] at every vertex abscissa; the region is open over an
    // interval exactly when the height gap is positive somewhere on it.
    let mut breaks: Vec<i64> = outer
        .vertices()
        .iter()
        .chain(inner.vertices())
        .map(|p| p.r)
        .collect();
    breaks.push(0);
    breaks.push(big_r);
    breaks.retain(|&r| r <= big_r);
    breaks.sort_unstable();
    breaks.dedup();
    let gap = |r: i64| inner.height(r) - outer.height(r);
    let gaps: Vec<Rational> = breaks.iter().map(|&r| gap(r)).collect();
    if let Some(g) = gaps.iter().find(|g| g.is_negative()) {
        return Err(Error::NotContained(format!("height gap {g}")));
    }
    let mut ranges: Vec<(i64, i64)> = Vec::new();
    for w in 0..breaks.len().saturating_sub(1) {
        if (&gaps[w] + &gaps[w + 1]).is_zero() {
            continue;
        }
        match ranges.last_mut() {
            Some(last) if last.1 == breaks[w] && !gaps[w].is_zero() => last.1 = breaks[w + 1],
            _ => ranges.push((breaks[w], breaks[w + 1])),
        }
    }
    let pick_boundary = ranges
        .iter()
        .map(|&(a, b)| {
            boundary_points
                .iter()
                .filter(|p| {
                    a <= p.r
                        && p.r <= b
                        && (outer.on_chain(p)
                            || inner.on_chain(p)
                            || on_r_gap(p)
                            || (a == 0 && on_s_gap(p)))
                })
                .count() as i64
        })
        .sum();

    let count = RegionCount {
        interior,
        boundary: boundary_points.len() as i64,
        area2: inner.twice_area_under() - outer.twice_area_under(),
        axis1: big_r - outer_r,
        axis2: big_s - outer_s,
        pieces: ranges.len() as i64,
        pick_boundary,
    };
    agree(
        "Pick's formula",
        count.area2,
        lat.d() * (count.pick_boundary + 2 * count.interior - 2 * count.pieces),
    )?;
    Ok(count)
}

/// `#{(i, j) : i, j ≥ 1, p·i + q_w·j ≤ ν, a·i + b·j ≡ k (mod d)}`.
pub fn kappa_pi_count(ambient: RawType, p: i64, qw: i64, k: i64, nu: i64) -> i64 {
    assert!(p >= 1 && qw >= 1, "weights must be positive");
    let mut count = 0;
    for i in 1..=nu.max(0) / p {
        for j in 1..=(nu - p * i) / qw {
            if ambient.class_of(i, j) == modulo(k, ambient.d) {
                count += 1;
            }
        }
    }
    count
}

/// Like [`kappa_pi_count`] but additionally requiring `p·i + q_w·j ≡ ν (mod e)`
/// with `e = gcd(d, p·b − q_w·a)`.
pub fn kappa_pi_count_congruent(ambient: RawType, p: i64, qw: i64, k: i64, nu: i64) -> i64 {
    let e = ambient.d.gcd(&(p * ambient.b - qw * ambient.a));
    let mut count = 0;
    for i in 1..=nu.max(0) / p {
        for j in 1..=(nu - p * i) / qw {
            if ambient.class_of(i, j) == modulo(k, ambient.d) && modulo(p * i + qw * j - nu, e) == 0
            {
                count += 1;
            }
        }
    }
    count
}

/// `dim O_X(k') / M` for the monomial submodule `M` generated by `generators`:
/// the number of points of `L(k')` outside every `g + R²₊`.
pub fn quotient_dimension(lat: &ClassLattice, generators: &[LatticePoint]) -> Result<i64> {
    for g in generators {
        if !lat.contains(g) {
            return Err(Error::ClassMismatch {
                monomial: g.monomial(),
                found: lat.class_of(g),
                expected: lat.k(),
            });
        }
    }
    let on_r = generators
        .iter()
        .filter(|g| g.s == 0)
        .map(|g| g.r)
        .min()
        .ok_or(Error::InfiniteQuotient("x"))?;
    let on_s = generators
        .iter()
        .filter(|g| g.r == 0)
        .map(|g| g.s)
        .min()
        .ok_or(Error::InfiniteQuotient("y"))?;
    let gens = minimal_elements(generators);
    Ok(lat
        .points_in_box(on_r - 1, on_s - 1)
        .filter(|p| !gens.iter().any(|g| g.divides(p)))
        .count() as i64)
}
