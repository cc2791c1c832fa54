//! Uniform and `t`-sparse line metrics and the separation window.
//!
//! A sparse metric over `[l, r]` with width `t` cuts the range into cells
//! `[l + (i-1)t, l + it - 1]` of exactly `t` integers each, so `r = l + nt - 1`
//! for `n` cells. Each cell holds exactly one representative point.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eps::Eps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("a line metric needs at least one point")]
    Empty,
    #[error("interval width must be positive")]
    ZeroWidth,
    #[error("representatives are not strictly increasing at position {index}")]
    NotSorted { index: usize },
    #[error("representative {point} lies outside interval {index} = [{lo}, {hi}]")]
    OutOfInterval { index: usize, point: i64, lo: i64, hi: i64 },
    #[error("point {point} lies outside [{l}, {r}]")]
    OutOfRange { point: i64, l: i64, r: i64 },
    #[error("{point} is not a point of the base metric")]
    NotAMember { point: i64 },
    #[error("left boundary {l} exceeds right boundary {r}")]
    InvertedRange { l: i64, r: i64 },
}

/// A `t`-sparse line metric. Serializes as `{"l": .., "t": .., "points": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SparseLineMetric {
    l: i64,
    t: u64,
    points: Vec<i64>,
}

impl SparseLineMetric {
    /// `U(n)`: the integers `1..=n`.
    pub fn uniform(n: usize) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        Ok(SparseLineMetric { l: 1, t: 1, points: (1..=n as i64).collect() })
    }

    pub fn sparse(l: i64, t: u64, reps: Vec<i64>) -> Result<Self, MetricError> {
        if reps.is_empty() {
            return Err(MetricError::Empty);
        }
        if t == 0 {
            return Err(MetricError::ZeroWidth);
        }
        if let Some(index) = reps.windows(2).position(|w| w[0] >= w[1]) {
            return Err(MetricError::NotSorted { index: index + 1 });
        }
        for (i, &p) in reps.iter().enumerate() {
            let lo = l + i as i64 * t as i64;
            let hi = lo + t as i64 - 1;
            if p < lo || p > hi {
                return Err(MetricError::OutOfInterval { index: i + 1, point: p, lo, hi });
            }
        }
        Ok(SparseLineMetric { l, t, points: reps })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn r(&self) -> i64 {
        self.l + (self.points.len() as u64 * self.t) as i64 - 1
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn contains_coord(&self, p: i64) -> bool {
        self.l <= p && p <= self.r()
    }

    /// 1-based cell of `p`: `1 + floor((p - l) / t)`.
    pub fn interval_index(&self, p: i64) -> Result<usize, MetricError> {
        if !self.contains_coord(p) {
            return Err(MetricError::OutOfRange { point: p, l: self.l, r: self.r() });
        }
        Ok(1 + ((p - self.l) as u64 / self.t) as usize)
    }

    /// Inclusive bounds of the 1-based cell `i`.
    pub fn interval(&self, i: usize) -> (i64, i64) {
        let lo = self.l + (i as i64 - 1) * self.t as i64;
        (lo, lo + self.t as i64 - 1)
    }

    /// An edge is global when its endpoints sit in two different cells.
    pub fn is_global_edge(&self, a: i64, b: i64) -> Result<bool, MetricError> {
        Ok(self.interval_index(a)? != self.interval_index(b)?)
    }

    /// Like [`is_global_edge`](Self::is_global_edge) but false for edges leaving `[l, r]`.
    pub fn classifies_global(&self, a: i64, b: i64) -> bool {
        self.is_global_edge(a, b).unwrap_or(false)
    }
}

#[derive(Deserialize)]
struct RawMetric {
    l: i64,
    t: u64,
    points: Vec<i64>,
}

impl<'de> Deserialize<'de> for SparseLineMetric {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawMetric::deserialize(deserializer)?;
        SparseLineMetric::sparse(raw.l, raw.t, raw.points).map_err(serde::de::Error::custom)
    }
}

/// A subset of a sparse metric's representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace<'a> {
    base: &'a SparseLineMetric,
    members: Vec<i64>,
}

impl<'a> Subspace<'a> {
    pub fn new(base: &'a SparseLineMetric, mut members: Vec<i64>) -> Result<Self, MetricError> {
        members.sort_unstable();
        members.dedup();
        if let Some(&point) = members.iter().find(|p| base.points.binary_search(p).is_err()) {
            return Err(MetricError::NotAMember { point });
        }
        Ok(Subspace { base, members })
    }

    pub fn full(base: &'a SparseLineMetric) -> Self {
        Subspace { base, members: base.points.clone() }
    }

    pub fn base(&self) -> &SparseLineMetric {
        self.base
    }

    pub fn members(&self) -> &[i64] {
        &self.members
    }

    /// `|members| / |base points|`.
    pub fn fraction(&self) -> Ratio<u64> {
        Ratio::new(self.members.len() as u64, self.base.n() as u64)
    }
}

/// The window `(i, j)` of `[l, r]` inside which every `(1 + eps)`-path between
/// two metric points must stay strictly within `[l, r]`. Empty when `i > j`,
/// which happens for short ranges with `eps > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWindow {
    pub i: i64,
    pub j: i64,
}

impl SeparationWindow {
    pub fn is_empty(&self) -> bool {
        self.i > self.j
    }

    pub fn contains(&self, p: i64) -> bool {
        self.i <= p && p <= self.j
    }
}

/// `i = ceil(((1 + eps/2) l + (eps/2) r) / (1 + eps))`,
/// `j = floor(((eps/2) l + (1 + eps/2) r) / (1 + eps))`.
pub fn separation_window(l: i64, r: i64, eps: Eps) -> Result<SeparationWindow, MetricError> {
    if l > r {
        return Err(MetricError::InvertedRange { l, r });
    }
    // Scale by 2q for eps = p/q.
    let (p, q) = (eps.numer() as i128, eps.denom() as i128);
    let (l128, r128) = (l as i128, r as i128);
    let den = 2 * (q + p);
    let i_num = (2 * q + p) * l128 + p * r128;
    let j_num = p * l128 + (2 * q + p) * r128;
    let i = -((-i_num).div_euclid(den));
    let j = j_num.div_euclid(den);
    Ok(SeparationWindow { i: i as i64, j: j as i64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(p: i64, q: i64) -> Eps {
        Eps::new(p, q).unwrap()
    }

    #[test]
    fn uniform_metric_basics() {
        let u1 = SparseLineMetric::uniform(1).unwrap();
        assert_eq!(u1.points(), &[1]);
        assert_eq!(u1.r(), 1);
        let u5 = SparseLineMetric::uniform(5).unwrap();
        assert_eq!(u5.points(), &[1, 2, 3, 4, 5]);
        assert_eq!((u5.l(), u5.r(), u5.t()), (1, 5, 1));
        assert_eq!(SparseLineMetric::uniform(0), Err(MetricError::Empty));
    }

    #[test]
    fn sparse_metric_construction() {
        assert_eq!(
            SparseLineMetric::sparse(1, 1, vec![1, 2, 3]).unwrap(),
            SparseLineMetric::uniform(3).unwrap()
        );
        let m = SparseLineMetric::sparse(1, 2, vec![2, 3, 6]).unwrap();
        assert_eq!(m.r(), 6);
        assert_eq!((1..=3).map(|i| m.interval(i)).collect::<Vec<_>>(), [(1, 2), (3, 4), (5, 6)]);
        assert_eq!(
            SparseLineMetric::sparse(1, 2, vec![2, 5, 6]),
            Err(MetricError::OutOfInterval { index: 2, point: 5, lo: 3, hi: 4 })
        );
        assert_eq!(
            SparseLineMetric::sparse(1, 3, vec![3, 3]),
            Err(MetricError::NotSorted { index: 1 })
        );
        assert_eq!(SparseLineMetric::sparse(1, 0, vec![1]), Err(MetricError::ZeroWidth));
    }

    #[test]
    fn interval_indexing() {
        let m = SparseLineMetric::sparse(1, 2, vec![1, 3, 5, 7]).unwrap();
        assert_eq!(m.interval_index(2), Ok(1));
        assert_eq!(m.interval_index(3), Ok(2));
        assert!(matches!(m.interval_index(0), Err(MetricError::OutOfRange { .. })));
        assert!(matches!(m.interval_index(9), Err(MetricError::OutOfRange { .. })));
        let m = SparseLineMetric::sparse(5, 3, vec![5, 8, 11]).unwrap();
        assert_eq!(m.interval_index(10), Ok(2));
    }

    #[test]
    fn global_edges() {
        let m = SparseLineMetric::sparse(1, 2, vec![1, 3, 5, 7]).unwrap();
        assert_eq!(m.is_global_edge(2, 3), Ok(true));
        assert_eq!(m.is_global_edge(3, 4), Ok(false));
        assert!(m.is_global_edge(3, 12).is_err());
        assert!(!m.classifies_global(3, 12));
        let u = SparseLineMetric::uniform(6).unwrap();
        for a in 1..=6 {
            for b in 1..=6 {
                assert_eq!(u.is_global_edge(a, b), Ok(a != b));
            }
        }
    }

    #[test]
    fn subspace_fraction() {
        let m = SparseLineMetric::uniform(8).unwrap();
        let x = Subspace::new(&m, vec![1, 2, 3, 5, 8, 2]).unwrap();
        assert_eq!(x.members(), &[1, 2, 3, 5, 8]);
        assert_eq!(x.fraction(), Ratio::new(5, 8));
        assert_eq!(Subspace::full(&m).fraction(), Ratio::new(1, 1));
        assert_eq!(Subspace::new(&m, vec![9]), Err(MetricError::NotAMember { point: 9 }));
    }

    #[test]
    fn window_examples() {
        assert_eq!(separation_window(1, 13, eps(1, 2)), Ok(SeparationWindow { i: 3, j: 11 }));
        for (l, r) in [(1, 1), (-4, 9), (3, 100)] {
            assert_eq!(separation_window(l, r, Eps::ZERO), Ok(SeparationWindow { i: l, j: r }));
        }
        let w = separation_window(1, 34, eps(1, 2)).unwrap();
        assert!(w.i <= 8 && w.j >= 26);
        assert!(separation_window(1, 2, eps(1, 2)).unwrap().is_empty());
        assert!(separation_window(5, 4, Eps::ZERO).is_err());
    }

    #[test]
    fn window_covers_the_middle_half_at_three_halves() {
        let half = eps(1, 2);
        for n in 34..=10_000i64 {
            let w = separation_window(1, n, half).unwrap();
            assert!(w.i <= n / 4, "n = {n}: i = {}", w.i);
            assert!(w.j >= (3 * n + 3) / 4, "n = {n}: j = {}", w.j);
        }
    }

    #[test]
    fn window_is_shift_invariant_and_inside_the_range() {
        for e in [eps(0, 1), eps(1, 4), eps(1, 2), eps(3, 1)] {
            for width in 0..50i64 {
                let base = separation_window(0, width, e).unwrap();
                for l in [-7i64, 1, 13] {
                    let w = separation_window(l, l + width, e).unwrap();
                    assert_eq!((w.i - l, w.j - l), (base.i, base.j));
                    if !w.is_empty() {
                        assert!(l <= w.i && w.j <= l + width);
                        // (j - i)(1 + eps) <= r - l
                        let (p, q) = (e.numer() as i64, e.denom() as i64);
                        assert!((w.j - w.i) * (p + q) <= width * q);
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let m = SparseLineMetric::sparse(1, 2, vec![2, 3, 6]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"l":1,"t":2,"points":[2,3,6]}"#);
        assert_eq!(serde_json::from_str::<SparseLineMetric>(&s).unwrap(), m);
        assert!(serde_json::from_str::<SparseLineMetric>(r#"{"l":1,"t":2,"points":[2,5,6]}"#).is_err());
    }
}
