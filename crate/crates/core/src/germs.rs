//! Polynomials, curvettes, generic germs and their valuation vectors.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{greedy_decomposition, Decomposition, NormalizedSingularity};
use crate::error::{agree, Error, Result};
use crate::lattice::{
    hull_of_class, hull_of_diagram, minkowski_sum, ClassLattice, LatticePoint, NewtonPolygon,
};
use crate::rational::{fmt_rational, int, Rational};

/// A polynomial in `x, y` with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<LatticePoint, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(LatticePoint::new(0, 0), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(LatticePoint::new(0, 0), c)
    }

    pub fn monomial(at: LatticePoint, coeff: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(at, coeff);
        p
    }

    pub fn x() -> Self {
        Self::monomial(LatticePoint::new(1, 0), Rational::one())
    }

    pub fn y() -> Self {
        Self::monomial(LatticePoint::new(0, 1), Rational::one())
    }

    fn add_term(&mut self, at: LatticePoint, coeff: Rational) {
        let entry = self.terms.entry(at).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&at);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, at: &LatticePoint) -> Rational {
        self.terms.get(at).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in the canonical order: decreasing `s`, then decreasing `r`.
    pub fn terms(&self) -> Vec<(LatticePoint, Rational)> {
        let mut v: Vec<(LatticePoint, Rational)> =
            self.terms.iter().map(|(p, c)| (*p, c.clone())).collect();
        v.sort_by(|a, b| (b.0.s, b.0.r).cmp(&(a.0.s, a.0.r)));
        v
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.keys().copied().collect()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(p, c)| (*p, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let integral = |p: &Polynomial| p.terms.values().all(|c| c.is_integer());
        if integral(self) && integral(other) {
            // Skips the gcd normalization of every rational product.
            let mut acc: BTreeMap<LatticePoint, BigInt> = BTreeMap::new();
            for (p, c) in &self.terms {
                for (q, e) in &other.terms {
                    *acc.entry(p.plus(q)).or_default() += c.numer() * e.numer();
                }
            }
            return Polynomial {
                terms: acc
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(p, c)| (p, Rational::from_integer(c)))
                    .collect(),
            };
        }
        let mut out = Polynomial::zero();
        for (p, c) in &self.terms {
            for (q, e) in &other.terms {
                out.add_term(p.plus(q), c * e);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (p, c)) in self.terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = p.monomial();
            if mono == "1" {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

/// `x^{q_i} − λ·y^{q̄_i}`, a curvette transversal to `E_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvette {
    index: usize,
    lambda: Rational,
}

impl Curvette {
    pub fn new(x: &NormalizedSingularity, index: usize, lambda: Rational) -> Result<Self> {
        if index == 0 || index > x.n() {
            return Err(Error::invalid(format!(
                "curvette index {index} outside 1..={}",
                x.n()
            )));
        }
        if lambda.is_zero() {
            return Err(Error::invalid("curvette coefficient must be nonzero"));
        }
        Ok(Curvette { index, lambda })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn polynomial(&self, x: &NormalizedSingularity) -> Polynomial {
        let (q, qb) = (x.qseq()[self.index], x.qbarseq()[self.index]);
        Polynomial::monomial(LatticePoint::new(q, 0), Rational::one()).sub(&Polynomial::monomial(
            LatticePoint::new(0, qb),
            self.lambda.clone(),
        ))
    }

    /// `(q_i, 0)` and `(0, q̄_i)`.
    pub fn support(&self, x: &NormalizedSingularity) -> [LatticePoint; 2] {
        [
            LatticePoint::new(x.qseq()[self.index], 0),
            LatticePoint::new(0, x.qbarseq()[self.index]),
        ]
    }
}

/// Product of curvettes with multiplicities `[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericGerm {
    x: NormalizedSingularity,
    k: i64,
    factors: Vec<Curvette>,
}

/// The curvettes of index `i` get `λ = seed + 1, seed + 2, …`, so they are
/// pairwise distinct.
pub fn generic_germ(x: &NormalizedSingularity, k: i64, seed: u64) -> GenericGerm {
    let k = x.reduce(k);
    let g = greedy_decomposition(x, k);
    let mut factors = Vec::new();
    for i in 1..=x.n() {
        for j in 0..g.get(i) {
            let lambda = int(seed as i64 + j + 1);
            factors.push(Curvette::new(x, i, lambda).expect("index in range and λ > 0"));
        }
    }
    GenericGerm {
        x: x.clone(),
        k,
        factors,
    }
}

impl GenericGerm {
    pub fn singularity(&self) -> &NormalizedSingularity {
        &self.x
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn factors(&self) -> &[Curvette] {
        &self.factors
    }

    pub fn expand(&self) -> Polynomial {
        self.factors
            .iter()
            .fold(Polynomial::one(), |acc, c| acc.mul(&c.polynomial(&self.x)))
    }
}

impl fmt::Display for GenericGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|c| format!("({})", c.polynomial(&self.x)))
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A non-empty set of exponents, all in the same class lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermSupport {
    lattice: ClassLattice,
    points: Vec<LatticePoint>,
}

impl GermSupport {
    pub fn new(x: &NormalizedSingularity, k: i64, points: &[LatticePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let lattice = ClassLattice::new(x, k);
        for p in points {
            if p.r < 0 || p.s < 0 {
                return Err(Error::invalid(format!("negative exponent in {p}")));
            }
            if !lattice.contains(p) {
                return Err(Error::ClassMismatch {
                    monomial: p.monomial(),
                    found: lattice.class_of(p),
                    expected: lattice.k(),
                });
            }
        }
        let mut points = points.to_vec();
        points.sort();
        points.dedup();
        Ok(GermSupport { lattice, points })
    }

    pub fn k(&self) -> i64 {
        self.lattice.k()
    }

    pub fn lattice(&self) -> &ClassLattice {
        &self.lattice
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn hull(&self) -> NewtonPolygon {
        NewtonPolygon::from_points(&self.points).expect("support is non-empty")
    }
}

/// Support of the expanded product. The hull vertices must be the Minkowski
/// sum of the factor hulls, which holds whenever no vertex coefficient cancels.
pub fn germ_support(g: &GenericGerm) -> Result<GermSupport> {
    let x = g.singularity();
    let poly = g.expand();
    let support = GermSupport::new(x, g.k(), &poly.support())?;
    let expected = g.factors().iter().fold(hull_of_class(x, 0), |acc, c| {
        minkowski_sum(
            &acc,
            &NewtonPolygon::from_points(&c.support(x)).expect("two points"),
        )
    });
    agree("generic germ hull", support.hull(), expected)?;
    Ok(support)
}

/// Newton-diagram valuations of a germ and its intersection vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationVector {
    /// `v_1, …, v_n`: the least monomial valuation over the support.
    pub orders: Vec<Rational>,
    /// `α_j = D̃·E_j`, where `D̃` is the strict transform; `‖α‖_X = d·v_1`.
    pub alpha: Decomposition,
}

/// Orders `v_i = min (r·q̄_i + s·q_i)/d` and the strict-transform vector
/// `α_j = c_j·v_j·d − d·v_{j−1} − d·v_{j+1}` over `d` (with `v_0 = v_{n+1} = 0`).
pub fn valuation_vector(
    x: &NormalizedSingularity,
    support: &GermSupport,
) -> Result<ValuationVector> {
    let n = x.n();
    let (d, qs, qb, cs) = (x.d(), x.qseq(), x.qbarseq(), x.cseq());
    let mut m = vec![0i64; n + 2];
    for i in 1..=n {
        m[i] = support
            .points()
            .iter()
            .map(|p| p.r * qb[i] + p.s * qs[i])
            .min()
            .expect("non-empty");
    }
    let mut alpha = vec![0i64; n + 2];
    for j in 1..=n {
        let num = cs[j] * m[j] - m[j - 1] - m[j + 1];
        if num % d != 0 {
            return Err(Error::RouteMismatch {
                what: format!("strict transform coefficient α_{j}"),
                left: format!("{num}/{d}"),
                right: "an integer".into(),
            });
        }
        alpha[j] = num / d;
    }
    let alpha = Decomposition::new(alpha);
    if n > 0 {
        agree("‖α‖_X", alpha.x_norm(x), m[1])?;
        agree("class of ‖α‖_X", x.reduce(m[1]), support.k())?;
    }
    let orders = m[1..=n]
        .iter()
        .map(|&v| Rational::new(v.into(), d.into()))
        .collect();
    Ok(ValuationVector { orders, alpha })
}

/// The support spans the whole class polygon.
pub fn is_generic(x: &NormalizedSingularity, support: &GermSupport) -> Result<bool> {
    Ok(hull_of_diagram(x, support.k(), support.points())? == hull_of_class(x, support.k()))
}

/// `(f, g)_X = min(q_i·q̄_j, q̄_i·q_j)/d` for curvettes of indices `i, j`.
pub fn intersection_multiplicity(
    x: &NormalizedSingularity,
    a: &Curvette,
    b: &Curvette,
) -> Result<Rational> {
    if a == b {
        return Err(Error::InfiniteIntersection);
    }
    let (i, j) = (a.index(), b.index());
    let (qs, qb) = (x.qseq(), x.qbarseq());
    Ok(Rational::new(
        (qs[i] * qb[j]).min(qb[i] * qs[j]).into(),
        x.d().into(),
    ))
}
