//! Hirzebruch–Jung continued fractions, greedy decompositions and the Q matrix.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{agree, Error, Result};

/// Largest group order accepted anywhere in the library. Keeps every product
/// of two sequence entries (at most `d²`) and every decomposition norm well
/// inside `i64`.
pub const MAX_ORDER: i64 = 1 << 20;

pub(crate) fn modulo(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

/// Inverse of `a` modulo `m`, when it exists. `m = 1` yields 0.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = modulo(a, m).extended_gcd(&m);
    (e.gcd == 1).then(|| modulo(e.x, m))
}

fn check_order(d: i64) -> Result<()> {
    if d < 1 {
        return Err(Error::invalid(format!(
            "group order must be positive, got {d}"
        )));
    }
    if d > MAX_ORDER {
        return Err(Error::invalid(format!(
            "group order {d} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// A cyclic quotient type `(d; a, b)`: `ξ·(x, y) = (ξ^a x, ξ^b y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawType {
    pub d: i64,
    pub a: i64,
    pub b: i64,
}

impl RawType {
    pub fn new(d: i64, a: i64, b: i64) -> Result<Self> {
        check_order(d)?;
        Ok(RawType {
            d,
            a: modulo(a, d),
            b: modulo(b, d),
        })
    }

    /// Small means no pseudo-reflections: both weights are units.
    pub fn is_small(&self) -> bool {
        self.d.gcd(&self.a) == 1 && self.d.gcd(&self.b) == 1
    }

    /// Whether `x^r y^s` is in the eigenmodule of class `k`.
    pub fn class_of(&self, r: i64, s: i64) -> i64 {
        modulo(
            self.a * modulo(r, self.d) + self.b * modulo(s, self.d),
            self.d,
        )
    }
}

impl fmt::Display for RawType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{},{})", self.d, self.a, self.b)
    }
}

/// Result of [`normalize_type`]. A point `(r, s)` of the output's invariant
/// lattice corresponds to `(x_scale·r, y_scale·s)` in the input's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub singularity: NormalizedSingularity,
    pub x_scale: i64,
    pub y_scale: i64,
}

/// Quotients out pseudo-reflections (first `gcd(d,a)`, then `gcd(d,b)`, until
/// nothing changes) and rewrites the small action as `X(d; 1, q)`.
pub fn normalize_type(t: RawType) -> Result<Normalization> {
    let RawType {
        mut d,
        mut a,
        mut b,
    } = RawType::new(t.d, t.a, t.b)?;
    let common = d.gcd(&a).gcd(&b);
    if common > 1 {
        return Err(Error::invalid(format!(
            "action {t} is not faithful: gcd(d,a,b) = {common}"
        )));
    }
    let (mut x_scale, mut y_scale) = (1, 1);
    loop {
        let g = d.gcd(&a);
        if g > 1 {
            // The subgroup of order g fixes x and acts on y by reflections.
            if g.gcd(&b) > 1 {
                return Err(Error::invalid(format!(
                    "reduction by gcd(d,a) = {g} fails for {t}: the weight b shares a factor"
                )));
            }
            d /= g;
            a = modulo(a / g, d);
            b = modulo(b, d);
            y_scale *= g;
            continue;
        }
        let g = d.gcd(&b);
        if g > 1 {
            if g.gcd(&a) > 1 {
                return Err(Error::invalid(format!(
                    "reduction by gcd(d,b) = {g} fails for {t}: the weight a shares a factor"
                )));
            }
            d /= g;
            b = modulo(b / g, d);
            a = modulo(a, d);
            x_scale *= g;
            continue;
        }
        break;
    }
    let q = if d == 1 {
        0
    } else {
        let inv = mod_inverse(a, d).expect("small action has unit weights");
        modulo(inv * b, d)
    };
    Ok(Normalization {
        singularity: NormalizedSingularity::new(d, q)?,
        x_scale,
        y_scale,
    })
}

/// `X(d; 1, q)` together with its resolution data.
///
/// `qseq = [q_0, …, q_{n+1}]` with `q_0 = d`, `q_1 = q`, `q_n = 1`,
/// `q_{n+1} = 0`; `cseq` holds the HJ coefficients padded by `c_0 = c_{n+1} = 2`;
/// `qbarseq` is the dual sequence with `q·q̄_i ≡ q_i (mod d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalizedSingularity {
    d: i64,
    q: i64,
    qseq: Vec<i64>,
    cseq: Vec<i64>,
    qbarseq: Vec<i64>,
}

/// Alias of [`NormalizedSingularity::new`].
pub fn hj_expansion(d: i64, q: i64) -> Result<NormalizedSingularity> {
    NormalizedSingularity::new(d, q)
}

impl NormalizedSingularity {
    /// `q` is taken modulo `d`; `d = 1` gives the smooth point with `n = 0`.
    pub fn new(d: i64, q: i64) -> Result<Self> {
        check_order(d)?;
        let q = modulo(q, d);
        if d.gcd(&q) != 1 {
            return Err(Error::invalid(format!("gcd({d},{q}) != 1")));
        }
        let mut qseq = vec![d, q];
        let mut cseq = vec![2];
        while *qseq.last().unwrap() != 0 {
            let (prev, cur) = (qseq[qseq.len() - 2], qseq[qseq.len() - 1]);
            let c = ceil_div(prev, cur);
            cseq.push(c);
            qseq.push(c * cur - prev);
        }
        if d == 1 {
            qseq = vec![1, 0];
        }
        cseq.push(2);
        let qbarseq = qbar_by_recurrence(&cseq);
        let x = NormalizedSingularity {
            d,
            q,
            qseq,
            cseq,
            qbarseq,
        };
        if cfg!(debug_assertions) {
            let check = qbar_by_congruence(d, q, &x.qseq);
            assert_eq!(x.qbarseq, check, "q̄ routes disagree for X({d};1,{q})");
        }
        Ok(x)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Length of the resolution bamboo.
    pub fn n(&self) -> usize {
        self.qseq.len() - 2
    }

    pub fn qseq(&self) -> &[i64] {
        &self.qseq
    }

    pub fn cseq(&self) -> &[i64] {
        &self.cseq
    }

    pub fn qbarseq(&self) -> &[i64] {
        &self.qbarseq
    }

    /// The dual singularity `X(d; 1, q̄_2)` with `q·q̄_2 ≡ 1`.
    pub fn dual(&self) -> NormalizedSingularity {
        NormalizedSingularity::new(self.d, mod_inverse(self.q, self.d).unwrap_or(0))
            .expect("inverse is coprime")
    }

    /// The class `w = −1 − q` of the canonical divisor, reduced mod `d`.
    pub fn canonical_class(&self) -> i64 {
        modulo(-1 - self.q, self.d)
    }

    pub fn reduce(&self, k: i64) -> i64 {
        modulo(k, self.d)
    }

    /// Class of the monomial `x^r y^s`.
    pub fn class_of(&self, r: i64, s: i64) -> i64 {
        modulo(modulo(r, self.d) + self.q * modulo(s, self.d), self.d)
    }

    /// The singularity `X_i = X(q_i; 1, q_{i+1})` met after `i` blow-ups.
    pub fn stage(&self, i: usize) -> NormalizedSingularity {
        assert!(i <= self.n(), "stage index out of range");
        NormalizedSingularity::new(self.qseq[i], self.qseq[i + 1])
            .expect("consecutive q_i are coprime")
    }

    pub fn raw(&self) -> RawType {
        RawType {
            d: self.d,
            a: modulo(1, self.d),
            b: self.q,
        }
    }
}

impl fmt::Display for NormalizedSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X({};1,{})", self.d, self.q)
    }
}

fn qbar_by_recurrence(cseq: &[i64]) -> Vec<i64> {
    let len = cseq.len();
    let mut qbar = vec![0, 1];
    for i in 2..len {
        qbar.push(cseq[i - 1] * qbar[i - 1] - qbar[i - 2]);
    }
    qbar.truncate(len);
    qbar
}

/// `q̄_i` as the least positive solution of `q·t ≡ q_i (mod d)` for `1 ≤ i ≤ n`,
/// with `q̄_0 = 0` and `q̄_{n+1} = d`.
pub fn qbar_by_congruence(d: i64, q: i64, qseq: &[i64]) -> Vec<i64> {
    let last = qseq.len() - 1;
    let inv = mod_inverse(q, d).unwrap_or(0);
    (0..qseq.len())
        .map(|i| match i {
            0 => 0,
            i if i == last => d,
            i => {
                let t = modulo(inv * qseq[i], d);
                if t == 0 {
                    d
                } else {
                    t
                }
            }
        })
        .collect()
}

/// `X ≅ X'` iff the orders agree and `q' ∈ {q, q^{-1}}`.
pub fn equivalent(x: &NormalizedSingularity, y: &NormalizedSingularity) -> bool {
    x.d == y.d && (x.q == y.q || modulo(x.q * y.q, x.d) == modulo(1, x.d))
}

/// Non-negative integer vector `[k_0, …, k_{n+1}]` indexed like `qseq`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    entries: Vec<i64>,
}

/// All norms of a decomposition `α`. `tail[j] = ‖α‖_j = Σ_{i≥j} α_i q_i` and
/// `head[j] = ‖α‖^j = Σ_{i≤j} α_i q̄_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Norms {
    pub x_norm: i64,
    pub one_norm: i64,
    pub bar: i64,
    pub tail: Vec<i64>,
    pub head: Vec<i64>,
}

impl Decomposition {
    pub fn new(entries: Vec<i64>) -> Self {
        Decomposition { entries }
    }

    pub fn zeros(x: &NormalizedSingularity) -> Self {
        Decomposition {
            entries: vec![0; x.n() + 2],
        }
    }

    /// The vector with a single 1 at position `i`.
    pub fn unit(x: &NormalizedSingularity, i: usize) -> Self {
        let mut z = Self::zeros(x);
        z.entries[i] = 1;
        z
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> i64 {
        self.entries[i]
    }

    /// `‖α‖_X = α·q`.
    pub fn x_norm(&self, x: &NormalizedSingularity) -> i64 {
        dot(&self.entries, x.qseq())
    }

    /// `‖α‖_1`.
    pub fn one_norm(&self) -> i64 {
        self.entries.iter().sum()
    }

    /// `k̄ = α·q̄`.
    pub fn bar(&self, x: &NormalizedSingularity) -> i64 {
        dot(&self.entries, x.qbarseq())
    }

    /// First and last nonzero positions.
    pub fn support(&self) -> Option<(usize, usize)> {
        let first = self.entries.iter().position(|&e| e != 0)?;
        let last = self.entries.iter().rposition(|&e| e != 0)?;
        Some((first, last))
    }

    pub fn add(&self, other: &Decomposition) -> Decomposition {
        assert_eq!(
            self.len(),
            other.len(),
            "decompositions of different singularities"
        );
        Decomposition {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Number of distinct indices with a nonzero entry.
    pub fn distinct(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    /// Entries `k_1, …, k_n` with the two sentinels dropped.
    pub fn interior(&self) -> &[i64] {
        &self.entries[1..self.entries.len() - 1]
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.interior().iter().map(i64::to_string).collect();
        write!(f, "[{}]", inner.join(","))
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn decomposition_norms(x: &NormalizedSingularity, alpha: &Decomposition) -> Norms {
    let e = alpha.entries();
    let len = e.len();
    let mut tail = vec![0; len];
    let mut acc = 0;
    for j in (0..len).rev() {
        acc += e[j] * x.qseq()[j];
        tail[j] = acc;
    }
    let mut head = vec![0; len];
    acc = 0;
    for j in 0..len {
        acc += e[j] * x.qbarseq()[j];
        head[j] = acc;
    }
    Norms {
        x_norm: tail[0],
        one_norm: alpha.one_norm(),
        bar: head[len - 1],
        tail,
        head,
    }
}

/// `[k]`: divide `k mod d` successively by `q_1, …, q_n`.
pub fn greedy_decomposition(x: &NormalizedSingularity, k: i64) -> Decomposition {
    let mut rest = x.reduce(k);
    let mut entries = vec![0; x.n() + 2];
    for i in 1..=x.n() {
        entries[i] = rest / x.qseq()[i];
        rest %= x.qseq()[i];
    }
    debug_assert_eq!(rest, 0);
    Decomposition { entries }
}

/// `[w] = [0, c_1 − 2, …, c_n − 2, 0]`, checked against the greedy route.
pub fn canonical_decomposition(x: &NormalizedSingularity) -> Result<Decomposition> {
    let n = x.n();
    let mut entries = vec![0; n + 2];
    for i in 1..=n {
        entries[i] = x.cseq()[i] - 2;
    }
    agree(
        "canonical decomposition",
        Decomposition { entries },
        greedy_decomposition(x, x.canonical_class()),
    )
}

/// Closed form of `[k + w]` from the support `r..s` of `[k]`.
///
/// Outside `r−1..s+1` the entries are `c_i − 2`, at `r−1` and `s+1` they are
/// `c_i − 1`, and inside `k_i` drops by one at each end. The sentinels stay
/// 0, and a single coin (`r = s`, `k_r = 1`) gives `[w] + e_r`.
pub fn sum_with_canonical_closed(x: &NormalizedSingularity, k: i64) -> Result<Decomposition> {
    let k = x.reduce(k);
    if k == 0 {
        return Err(Error::Domain(
            "k ≡ 0 has no [k + w] closed form; use the canonical decomposition".into(),
        ));
    }
    let kd = greedy_decomposition(x, k);
    let (r, s) = kd.support().expect("k ≠ 0");
    let n = x.n();
    let c = x.cseq();
    let mut entries = vec![0; n + 2];
    if r == s && kd.get(r) == 1 {
        for i in 1..=n {
            entries[i] = c[i] - 2;
        }
        entries[r] += 1;
        return Ok(Decomposition { entries });
    }
    for (i, e) in entries.iter_mut().enumerate().take(n + 1).skip(1) {
        *e = if i + 1 < r {
            c[i] - 2
        } else if i + 1 == r {
            c[i] - 1
        } else if i <= s {
            kd.get(i) - i64::from(i == r) - i64::from(i == s)
        } else if i == s + 1 {
            c[i] - 1
        } else {
            c[i] - 2
        };
    }
    Ok(Decomposition { entries })
}

/// `[k + w]`, closed form checked against the greedy decomposition.
pub fn sum_with_canonical(x: &NormalizedSingularity, k: i64) -> Result<Decomposition> {
    let closed = sum_with_canonical_closed(x, k)?;
    agree(
        "[k + w]",
        closed,
        greedy_decomposition(x, k + x.canonical_class()),
    )
}

/// Upper triangular `(n+1) × (n+1)` integer matrix, indices `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    size: usize,
    entries: Vec<i64>,
}

impl QMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.size + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.size + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.size)
            .map(<[i64]>::to_vec)
            .collect()
    }
}

/// `Q_{ij} = (q̄ of X_i)_{j−i+1}` for `j ≥ i`.
pub fn q_matrix_by_definition(x: &NormalizedSingularity) -> QMatrix {
    let size = x.n() + 1;
    let mut m = QMatrix {
        size,
        entries: vec![0; size * size],
    };
    for i in 0..size {
        let stage = x.stage(i);
        for j in i..size {
            m.set(i, j, stage.qbarseq()[j - i + 1]);
        }
    }
    m
}

/// Rebuilds `Q` from its diagonal, superdiagonal `c_{i+1}` and the rule that
/// adjacent 2×2 minors equal 1, filling rows bottom-up. The last column must
/// come out as `q_i`.
pub fn q_matrix_by_completion(x: &NormalizedSingularity) -> Result<QMatrix> {
    let size = x.n() + 1;
    let mut m = QMatrix {
        size,
        entries: vec![0; size * size],
    };
    for i in (0..size).rev() {
        m.set(i, i, 1);
        if i + 1 < size {
            m.set(i, i + 1, x.cseq()[i + 1]);
        }
        for col in i + 1..size.saturating_sub(1) {
            let num = m.get(i, col) * m.get(i + 1, col + 1) - 1;
            let den = m.get(i + 1, col);
            if den == 0 || num % den != 0 {
                return Err(Error::RouteMismatch {
                    what: "Q matrix completion".into(),
                    left: format!("{num}"),
                    right: format!("not divisible by {den}"),
                });
            }
            m.set(i, col + 1, num / den);
        }
    }
    for i in 0..size {
        agree("Q matrix last column", m.get(i, size - 1), x.qseq()[i])?;
    }
    Ok(m)
}

/// The Q matrix, built by definition and checked against the completion rule.
pub fn q_matrix(x: &NormalizedSingularity) -> Result<QMatrix> {
    agree(
        "Q matrix",
        q_matrix_by_definition(x),
        q_matrix_by_completion(x)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(d: i64, q: i64) -> NormalizedSingularity {
        NormalizedSingularity::new(d, q).unwrap()
    }

    fn coprime_pairs(dmax: i64) -> impl Iterator<Item = (i64, i64)> {
        (2..=dmax).flat_map(|d| (1..d).filter(move |q| d.gcd(q) == 1).map(move |q| (d, q)))
    }

    #[test]
    fn x14_11_sequences() {
        let s = x(14, 11);
        assert_eq!(s.qseq(), &[14, 11, 8, 5, 2, 1, 0]);
        assert_eq!(s.cseq(), &[2, 2, 2, 2, 3, 2, 2]);
        assert_eq!(s.qbarseq(), &[0, 1, 2, 3, 4, 9, 14]);
        assert_eq!(s.n(), 5);
    }

    #[test]
    fn smooth_point() {
        let s = x(1, 0);
        assert_eq!(
            (s.qseq(), s.cseq(), s.qbarseq(), s.n()),
            (&[1, 0][..], &[2, 2][..], &[0, 1][..], 0)
        );
        assert_eq!(greedy_decomposition(&s, 5), Decomposition::new(vec![0, 0]));
        assert_eq!(q_matrix(&s).unwrap().rows(), vec![vec![1]]);
        assert_eq!(
            canonical_decomposition(&s).unwrap(),
            Decomposition::new(vec![0, 0])
        );
    }

    #[test]
    fn q_equal_one() {
        for d in 2..30 {
            let s = x(d, 1);
            assert_eq!(s.qseq(), &[d, 1, 0]);
            assert_eq!(s.cseq(), &[2, d, 2]);
            assert_eq!(q_matrix(&s).unwrap().rows(), vec![vec![1, d], vec![0, 1]]);
        }
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(NormalizedSingularity::new(6, 4).is_err());
        assert!(NormalizedSingularity::new(0, 1).is_err());
        assert!(NormalizedSingularity::new(MAX_ORDER + 1, 1).is_err());
    }

    #[test]
    fn sequence_invariants() {
        for (d, q) in coprime_pairs(80) {
            let s = x(d, q);
            let (qs, cs, qb, n) = (s.qseq(), s.cseq(), s.qbarseq(), s.n());
            assert_eq!((qs[0], qs[1], qs[n], qs[n + 1]), (d, q, 1, 0));
            assert_eq!((cs[0], cs[n + 1], cs[n]), (2, 2, qs[n - 1]));
            for i in 1..=n {
                assert_eq!(qs[i - 1], cs[i] * qs[i] - qs[i + 1]);
                assert!(cs[i] >= 2 && 0 < qb[i] && qb[i] < d);
                assert_eq!(modulo(q * qb[i] - qs[i], d), 0);
            }
            for i in 0..=n {
                assert_eq!(qb[i + 1] * qs[i] - qs[i + 1] * qb[i], d);
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_type(RawType::new(5, 2, 3).unwrap()).unwrap();
        assert_eq!((n.singularity.d(), n.singularity.q()), (5, 4));
        let n = normalize_type(RawType::new(4, 2, 1).unwrap()).unwrap();
        assert_eq!((n.singularity.d(), n.singularity.q()), (2, 1));
        let n = normalize_type(RawType::new(7, 1, 3).unwrap()).unwrap();
        assert_eq!(
            (n.singularity.d(), n.singularity.q(), n.x_scale, n.y_scale),
            (7, 3, 1, 1)
        );
        assert!(normalize_type(RawType::new(6, 2, 4).unwrap()).is_err());
        assert!(RawType::new(0, 1, 1).is_err());
    }

    /// Invariant monomials of the input are exactly the rescaled invariant
    /// monomials of the output.
    #[test]
    fn normalize_preserves_invariant_lattice() {
        for d in 1..=24i64 {
            for a in 0..d {
                for b in 0..d {
                    let t = RawType::new(d, a, b).unwrap();
                    let Ok(norm) = normalize_type(t) else {
                        assert!(d.gcd(&a).gcd(&b) > 1, "{t} rejected");
                        continue;
                    };
                    let out = &norm.singularity;
                    let bound = 2 * d;
                    for r in 0..bound {
                        for s in 0..bound {
                            let lhs = t.class_of(r, s) == 0;
                            let rhs = r % norm.x_scale == 0
                                && s % norm.y_scale == 0
                                && out.class_of(r / norm.x_scale, s / norm.y_scale) == 0;
                            assert_eq!(lhs, rhs, "{t} -> {out} at ({r},{s})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let s = x(14, 11);
        assert_eq!(
            greedy_decomposition(&s, 10).entries(),
            &[0, 0, 1, 0, 1, 0, 0]
        );
        assert_eq!(
            greedy_decomposition(&s, 12).entries(),
            &[0, 1, 0, 0, 0, 1, 0]
        );
        assert_eq!(greedy_decomposition(&s, 10).to_string(), "[0,1,0,1,0]");
        for i in 1..=s.n() {
            assert_eq!(
                greedy_decomposition(&s, s.qseq()[i]),
                Decomposition::unit(&s, i)
            );
        }
        assert_eq!(greedy_decomposition(&s, 24), greedy_decomposition(&s, 10));
        assert_eq!(greedy_decomposition(&s, -4), greedy_decomposition(&s, 10));
    }

    #[test]
    fn norms_examples() {
        let s = x(14, 11);
        let n10 = decomposition_norms(&s, &greedy_decomposition(&s, 10));
        assert_eq!((n10.x_norm, n10.one_norm, n10.bar), (10, 2, 6));
        let n12 = decomposition_norms(&s, &greedy_decomposition(&s, 12));
        assert_eq!((n12.one_norm, n12.bar), (2, 10));
        assert_eq!(n10.tail[0], n10.x_norm);
        assert_eq!(n10.head[s.n() + 1], n10.bar);
        let z = decomposition_norms(&s, &Decomposition::zeros(&s));
        assert_eq!((z.x_norm, z.one_norm, z.bar), (0, 0, 0));
        assert!(z.tail.iter().chain(&z.head).all(|&v| v == 0));
    }

    #[test]
    fn greedy_reconstructs_k() {
        for (d, q) in coprime_pairs(60) {
            let s = x(d, q);
            for k in 0..d {
                let g = greedy_decomposition(&s, k);
                assert_eq!(g.get(0), 0);
                assert_eq!(g.get(s.n() + 1), 0);
                assert_eq!(g.x_norm(&s), k);
            }
        }
    }

    #[test]
    fn q_matrix_examples() {
        let rows = q_matrix(&x(14, 11)).unwrap().rows();
        assert_eq!(
            rows,
            vec![
                vec![1, 2, 3, 4, 9, 14],
                vec![0, 1, 2, 3, 7, 11],
                vec![0, 0, 1, 2, 5, 8],
                vec![0, 0, 0, 1, 3, 5],
                vec![0, 0, 0, 0, 1, 2],
                vec![0, 0, 0, 0, 0, 1],
            ]
        );
        assert_eq!(
            q_matrix(&x(5, 2)).unwrap().rows(),
            vec![vec![1, 3, 5], vec![0, 1, 2], vec![0, 0, 1]]
        );
    }

    #[test]
    fn q_matrix_routes_and_minors() {
        for (d, q) in coprime_pairs(70) {
            let s = x(d, q);
            let m = q_matrix(&s).unwrap();
            let size = m.size();
            for j in 0..size {
                assert_eq!(m.get(0, j), s.qbarseq()[j + 1]);
            }
            for i in 0..size.saturating_sub(1) {
                for c in i..size - 1 {
                    assert_eq!(
                        m.get(i, c) * m.get(i + 1, c + 1) - m.get(i, c + 1) * m.get(i + 1, c),
                        1
                    );
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            canonical_decomposition(&x(14, 11)).unwrap().entries(),
            &[0, 0, 0, 0, 1, 0, 0]
        );
        assert_eq!(
            canonical_decomposition(&x(5, 2)).unwrap().entries(),
            &[0, 1, 0, 0]
        );
        for d in 2..40 {
            assert!(canonical_decomposition(&x(d, d - 1)).unwrap().is_empty());
        }
    }

    #[test]
    fn sum_with_canonical_examples() {
        let s = x(14, 11);
        assert_eq!(
            sum_with_canonical(&s, 10).unwrap().entries(),
            &[0, 1, 0, 0, 0, 1, 0]
        );
        assert!(matches!(sum_with_canonical(&s, 0), Err(Error::Domain(_))));
        sum_with_canonical(&x(5, 2), 3).unwrap();
        for (d, q) in coprime_pairs(90) {
            let s = x(d, q);
            for k in 1..d {
                sum_with_canonical(&s, k).unwrap();
            }
        }
    }

    #[test]
    fn equivalence() {
        assert!(equivalent(&x(5, 2), &x(5, 3)));
        assert!(equivalent(&x(5, 2), &x(5, 2)));
        assert!(!equivalent(&x(5, 2), &x(5, 4)));
        assert!(!equivalent(&x(5, 2), &x(7, 2)));
        assert!(equivalent(&x(14, 11).dual(), &x(14, 11)));
    }

    #[test]
    fn stages_follow_the_chain() {
        let s = x(14, 11);
        let orders: Vec<(i64, i64)> = (0..=s.n())
            .map(|i| (s.stage(i).d(), s.stage(i).q()))
            .collect();
        assert_eq!(
            orders,
            vec![(14, 11), (11, 8), (8, 5), (5, 2), (2, 1), (1, 0)]
        );
    }
}
