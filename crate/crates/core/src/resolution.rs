//! Weighted blow-ups, the Hirzebruch–Jung chain, valuations and discrepancies.

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, Zero};

use crate::arith::{equivalent, mod_inverse, normalize_type, NormalizedSingularity, RawType};
use crate::error::{agree, Error, Result};
use crate::lattice::LatticePoint;
use crate::rational::{int, narrow, widen, Rational, SmallRational};

/// The two charts of the `(p, q_w)`-weighted blow-up of a quotient point.
///
/// Chart 1 substitutes `x = u^p, y = u^{q_w}·v` and chart 2 `x = u·v^p,
/// y = v^{q_w}`; the exceptional divisor is `u = 0` resp. `v = 0`, read in
/// the invariant coordinate `u^e` resp. `v^e`. Chart 2 lists the
/// non-exceptional coordinate first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlowupCharts {
    pub ambient: RawType,
    pub p: i64,
    pub qw: i64,
    pub e: i64,
    pub chart1: RawType,
    pub chart2: RawType,
}

impl BlowupCharts {
    /// `ν_{p,q}(x^r y^s) / e`: the order of `x^r y^s` along the exceptional divisor.
    pub fn exceptional_order(&self, r: &Rational, s: &Rational) -> Rational {
        (r * int(self.p) + s * int(self.qw)) / int(self.e)
    }

    /// Exponents of the total transform of `x^r y^s` in chart 1.
    pub fn chart1_exponents(&self, r: &Rational, s: &Rational) -> (Rational, Rational) {
        (self.exceptional_order(r, s), s.clone())
    }

    /// Exponents of the total transform of `x^r y^s` in chart 2.
    pub fn chart2_exponents(&self, r: &Rational, s: &Rational) -> (Rational, Rational) {
        (r.clone(), self.exceptional_order(r, s))
    }

    /// `(ν(h) − ν(f) + p + q_w − e) / e`, the exceptional exponent of the
    /// pulled back form `h/f·dx∧dy`, when it is an integer.
    pub fn two_form_exponent(&self, nu_h: i64, nu_f: i64) -> Option<i64> {
        let num = nu_h - nu_f + self.p + self.qw - self.e;
        (num % self.e == 0).then(|| num / self.e)
    }
}

/// Chart types of the `(p, q_w)` blow-up of a small quotient type.
pub fn blowup_charts(ambient: RawType, p: i64, qw: i64) -> Result<BlowupCharts> {
    if p < 1 || qw < 1 {
        return Err(Error::invalid(format!(
            "blow-up weights must be positive, got ({p},{qw})"
        )));
    }
    let RawType { d, a, b } = RawType::new(ambient.d, ambient.a, ambient.b)?;
    if !ambient.is_small() {
        return Err(Error::NonSmallAction { d, a, b });
    }
    let e = d.gcd(&(p * b - qw * a));
    let a_inv = mod_inverse(a, d).unwrap_or(0);
    let b_inv = mod_inverse(b, d).unwrap_or(0);
    let num1 = -qw + a_inv * p * b;
    let num2 = -p + b_inv * qw * a;
    debug_assert!(
        num1 % e == 0 && num2 % e == 0,
        "chart weights not divisible by e"
    );
    Ok(BlowupCharts {
        ambient: RawType { d, a, b },
        p,
        qw,
        e,
        chart1: RawType::new(p * d / e, 1, num1 / e)?,
        chart2: RawType::new(qw * d / e, num2 / e, 1)?,
    })
}

/// `ν_{p,q}(f) = min (p·r + q_w·s)` over the support.
pub fn nu(p: i64, qw: i64, support: &[LatticePoint]) -> Result<i64> {
    support
        .iter()
        .map(|pt| p * pt.r + qw * pt.s)
        .min()
        .ok_or_else(|| Error::invalid("ν of an empty support"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub ambient: RawType,
    pub charts: BlowupCharts,
}

/// Minimal resolution as a sequence of weighted blow-ups, each centred at the
/// chart-2 origin of the previous one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionChain {
    stages: Vec<Stage>,
    self_intersections: Vec<i64>,
}

impl ResolutionChain {
    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `E_i·E_i = −c_i`, for `i = 1..=n`.
    pub fn self_intersections(&self) -> &[i64] {
        &self.self_intersections
    }

    /// The bamboo intersection matrix: `−c_i` on the diagonal, 1 beside it.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            m[i][i] = self.self_intersections[i];
            if i + 1 < n {
                m[i][i + 1] = 1;
                m[i + 1][i] = 1;
            }
        }
        m
    }

    /// `v_1, …, v_n` of `x^r y^s`, by pushing the exponents through chart 2 of
    /// every stage.
    pub fn valuations(&self, r: &Rational, s: &Rational) -> Vec<Rational> {
        if let (Some(r), Some(s)) = (narrow(r), narrow(s)) {
            if let Some(v) = self.track_small(r, s) {
                return v.iter().map(widen).collect();
            }
        }
        let (mut r, mut s) = (r.clone(), s.clone());
        let mut out = Vec::with_capacity(self.len());
        for stage in &self.stages {
            let v = stage.charts.exceptional_order(&r, &s);
            (r, s) = stage.charts.chart2_exponents(&r, &s);
            out.push(v);
        }
        out
    }

    /// [`Self::valuations`] for integer exponents without heap arithmetic.
    /// `None` on overflow.
    pub fn valuations_small(&self, r: i64, s: i64) -> Option<Vec<SmallRational>> {
        self.track_small(
            SmallRational::from_integer(r.into()),
            SmallRational::from_integer(s.into()),
        )
    }

    fn track_small(&self, r: SmallRational, mut s: SmallRational) -> Option<Vec<SmallRational>> {
        let mut out = Vec::with_capacity(self.len());
        for stage in &self.stages {
            let c = &stage.charts;
            let weighted = r
                .checked_mul(&SmallRational::from_integer(c.p.into()))?
                .checked_add(&s.checked_mul(&SmallRational::from_integer(c.qw.into()))?)?;
            s = weighted.checked_div(&SmallRational::from_integer(c.e.into()))?;
            out.push(s);
        }
        Some(out)
    }
}

/// The HJ resolution chain of `X(d; 1, q)`: stage `i` blows up the point of
/// type `(q_{i−1}; 1, q_i)` with weights `(1, q_i)`.
pub fn hj_chain(x: &NormalizedSingularity) -> Result<ResolutionChain> {
    let mut stages = Vec::with_capacity(x.n());
    let mut ambient = x.raw();
    while ambient.d > 1 {
        let i = stages.len() + 1;
        let charts = blowup_charts(ambient, 1, ambient.b)?;
        let next = normalize_type(charts.chart2)?;
        let expected = x.stage(i);
        if !(next.x_scale == 1 && next.y_scale == 1 && next.singularity == expected) {
            return Err(Error::RouteMismatch {
                what: format!("chart-2 singularity after blow-up {i}"),
                left: next.singularity.to_string(),
                right: expected.to_string(),
            });
        }
        debug_assert!(equivalent(&next.singularity, &expected));
        stages.push(Stage { ambient, charts });
        ambient = next.singularity.raw();
    }
    agree("resolution length", stages.len(), x.n())?;
    let self_intersections = x.cseq()[1..=x.n()].iter().map(|c| -c).collect();
    Ok(ResolutionChain {
        stages,
        self_intersections,
    })
}

/// `v_i(x^r y^s) = (r·q̄_i + s·q_i)/d` for `i = 1..=n`.
pub fn monomial_valuations(x: &NormalizedSingularity, r: &Rational, s: &Rational) -> Vec<Rational> {
    (1..=x.n())
        .map(|i| (r * int(x.qbarseq()[i]) + s * int(x.qseq()[i])) / int(x.d()))
        .collect()
}

/// [`monomial_valuations`] for integer exponents without heap arithmetic.
pub fn monomial_valuations_small(x: &NormalizedSingularity, r: i64, s: i64) -> Vec<SmallRational> {
    (1..=x.n())
        .map(|i| {
            let num = i128::from(r) * i128::from(x.qbarseq()[i])
                + i128::from(s) * i128::from(x.qseq()[i]);
            SmallRational::new(num, x.d().into())
        })
        .collect()
}

/// Closed form checked against chart tracking.
pub fn verified_valuations(
    x: &NormalizedSingularity,
    chain: &ResolutionChain,
    r: &Rational,
    s: &Rational,
) -> Result<Vec<Rational>> {
    agree(
        "monomial valuations",
        monomial_valuations(x, r, s),
        chain.valuations(r, s),
    )
}

/// `ε_i = (q_i + q̄_i)/d − 1`.
pub fn discrepancy_closed(x: &NormalizedSingularity) -> Vec<Rational> {
    (1..=x.n())
        .map(|i| Rational::new((x.qseq()[i] + x.qbarseq()[i] - x.d()).into(), x.d().into()))
        .collect()
}

/// Solves the adjunction system `K·E_j = −2 − E_j² = c_j − 2`, i.e.
/// `M·ε = c − 2`, with the tridiagonal (Thomas) elimination.
pub fn discrepancy_by_solve(chain: &ResolutionChain) -> Result<Vec<Rational>> {
    let diag: Vec<Rational> = chain.self_intersections().iter().map(|&c| int(c)).collect();
    let rhs: Vec<Rational> = chain
        .self_intersections()
        .iter()
        .map(|&c| int(-c - 2))
        .collect();
    solve_tridiagonal(&diag, &rhs)
}

/// Solves `T·x = rhs` where `T` has the given diagonal and 1 on both
/// neighbouring diagonals.
pub fn solve_tridiagonal(diag: &[Rational], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = diag.len();
    let mut upper: Vec<Rational> = Vec::with_capacity(n);
    let mut mid: Vec<Rational> = Vec::with_capacity(n);
    for i in 0..n {
        let (pivot, acc) = if i == 0 {
            (diag[0].clone(), rhs[0].clone())
        } else {
            (&diag[i] - &upper[i - 1], &rhs[i] - &mid[i - 1])
        };
        if pivot.is_zero() {
            return Err(Error::Domain("singular intersection matrix".into()));
        }
        upper.push(pivot.recip());
        mid.push(acc / pivot);
    }
    let mut out = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        out[i] = if i + 1 == n {
            mid[i].clone()
        } else {
            &mid[i] - &upper[i] * &out[i + 1]
        };
    }
    Ok(out)
}

/// Discrepancies, closed form checked against the linear solve.
pub fn discrepancy(x: &NormalizedSingularity) -> Result<Vec<Rational>> {
    agree(
        "discrepancy",
        discrepancy_closed(x),
        discrepancy_by_solve(&hj_chain(x)?)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x(d: i64, q: i64) -> NormalizedSingularity {
        NormalizedSingularity::new(d, q).unwrap()
    }

    #[test]
    fn small_and_big_valuations_agree() {
        let s = x(14, 11);
        let chain = hj_chain(&s).unwrap();
        for (r, t) in [(0, 0), (3, 7), (24, 0), (1, 11)] {
            let small: Vec<Rational> = chain
                .valuations_small(r, t)
                .unwrap()
                .iter()
                .map(widen)
                .collect();
            assert_eq!(small, monomial_valuations(&s, &int(r), &int(t)));
            let closed: Vec<Rational> = monomial_valuations_small(&s, r, t)
                .iter()
                .map(widen)
                .collect();
            assert_eq!(closed, small);
        }
        let half = rat(1, 2);
        assert_eq!(
            chain.valuations(&half, &half),
            monomial_valuations(&s, &half, &half)
        );
        let huge = Rational::new(num_bigint::BigInt::from(i128::MAX) * 4, 1.into());
        assert_eq!(
            chain.valuations(&huge, &int(0)),
            monomial_valuations(&s, &huge, &int(0))
        );
    }

    #[test]
    fn charts_of_an_hj_step() {
        for (d, q) in [(14, 11), (7, 3), (5, 2), (9, 2)] {
            let c = blowup_charts(RawType::new(d, 1, q).unwrap(), 1, q).unwrap();
            assert_eq!(c.e, d);
            assert_eq!(c.chart1.d, 1);
            let s = x(d, q);
            let norm = normalize_type(c.chart2).unwrap().singularity;
            assert_eq!((norm.d(), norm.q()), (q, s.qseq()[2]));
        }
    }

    #[test]
    fn charts_examples() {
        let smooth = blowup_charts(RawType::new(1, 0, 0).unwrap(), 1, 1).unwrap();
        assert_eq!((smooth.chart1.d, smooth.chart2.d), (1, 1));
        let c = blowup_charts(RawType::new(5, 1, 2).unwrap(), 1, 2).unwrap();
        assert_eq!((c.e, c.chart1.d), (5, 1));
        assert_eq!(c.chart2, RawType::new(2, 1, 1).unwrap());
        assert_eq!(
            blowup_charts(RawType::new(6, 2, 1).unwrap(), 1, 1).unwrap_err(),
            Error::NonSmallAction { d: 6, a: 2, b: 1 }
        );
        assert!(blowup_charts(RawType::new(5, 1, 2).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn charts_have_positive_orders() {
        for d in 1..=30i64 {
            for a in 1..=d {
                for b in 1..=d {
                    let t = RawType::new(d, a, b).unwrap();
                    if !t.is_small() {
                        continue;
                    }
                    for p in 1..=5 {
                        for qw in 1..=5 {
                            let c = blowup_charts(t, p, qw).unwrap();
                            assert_eq!((d * p) % c.e, 0);
                            assert!(c.chart1.d >= 1 && c.chart2.d >= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chain_stages() {
        let chain = hj_chain(&x(14, 11)).unwrap();
        let ambients: Vec<(i64, i64, i64)> = chain
            .stages()
            .iter()
            .map(|s| (s.ambient.d, s.ambient.a, s.ambient.b))
            .collect();
        assert_eq!(
            ambients,
            vec![(14, 1, 11), (11, 1, 8), (8, 1, 5), (5, 1, 2), (2, 1, 1)]
        );
        assert_eq!(hj_chain(&x(9, 1)).unwrap().len(), 1);
        let m = hj_chain(&x(5, 2)).unwrap().intersection_matrix();
        assert_eq!(m, vec![vec![-3, 1], vec![1, -2]]);
        assert!(hj_chain(&x(1, 0)).unwrap().is_empty());
    }

    #[test]
    fn valuation_examples() {
        let s = x(5, 2);
        let chain = hj_chain(&s).unwrap();
        let (one, zero) = (int(1), int(0));
        assert_eq!(
            verified_valuations(&s, &chain, &one, &zero).unwrap(),
            vec![rat(1, 5), rat(3, 5)]
        );
        assert_eq!(
            verified_valuations(&s, &chain, &zero, &one).unwrap(),
            vec![rat(2, 5), rat(1, 5)]
        );
        let t = x(14, 11);
        let v = monomial_valuations(&t, &int(14), &zero);
        assert_eq!(
            v,
            t.qbarseq()[1..=5]
                .iter()
                .map(|&b| int(b))
                .collect::<Vec<_>>()
        );
        let v1 = monomial_valuations(&t, &zero, &one);
        assert_eq!(v1[0], rat(11, 14));
    }

    #[test]
    fn tracked_valuations_match() {
        for d in 2..=25i64 {
            for q in (1..d).filter(|q| d.gcd(q) == 1) {
                let s = x(d, q);
                let chain = hj_chain(&s).unwrap();
                for r in 0..=2 * d {
                    for t in [0, 1, d - 1, 2 * d] {
                        verified_valuations(&s, &chain, &int(r), &int(t)).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(
            discrepancy(&x(14, 11)).unwrap(),
            vec![rat(-1, 7), rat(-2, 7), rat(-3, 7), rat(-4, 7), rat(-2, 7)]
        );
        for d in 2..30 {
            assert!(discrepancy(&x(d, d - 1)).unwrap().iter().all(Zero::is_zero));
        }
        assert_eq!(discrepancy(&x(5, 2)).unwrap(), vec![rat(-2, 5), rat(-1, 5)]);
        assert!(discrepancy(&x(1, 0)).unwrap().is_empty());
    }

    #[test]
    fn nu_examples() {
        let s = x(14, 11);
        for i in 1..=s.n() {
            let (qi, qb) = (s.qseq()[i], s.qbarseq()[i]);
            let sup = [LatticePoint::new(qi, 0), LatticePoint::new(0, qb)];
            assert_eq!(nu(qb, qi, &sup).unwrap(), qi * qb);
        }
        let hull = crate::lattice::hull_of_class(&s, 10);
        assert_eq!(nu(1, 11, hull.vertices()).unwrap(), 10);
        assert_eq!(nu(3, 5, &[LatticePoint::new(2, 7)]).unwrap(), 41);
        assert!(nu(1, 1, &[]).is_err());
    }

    #[test]
    fn tridiagonal_solver() {
        let diag = vec![int(2), int(2)];
        let rhs = vec![int(3), int(3)];
        assert_eq!(
            solve_tridiagonal(&diag, &rhs).unwrap(),
            vec![int(1), int(1)]
        );
        assert!(solve_tridiagonal(&[int(1), int(1)], &[int(0), int(0)]).is_err());
    }
}
