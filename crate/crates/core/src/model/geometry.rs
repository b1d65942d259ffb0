//! Axis-aligned boxes built from half-open intervals `(lo, hi]`.
//!
//! A sample goes left at a split when `x[t] <= threshold`, so every region a
//! tree routes to a leaf is a product of intervals that exclude their lower
//! end and include their upper end. Endpoints may be infinite.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Half-open interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Left child of a split at `threshold`: `(lo, min(hi, threshold)]`.
    pub fn clip_left(&self, threshold: f64) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi.min(threshold),
        }
    }

    /// Right child of a split at `threshold`: `(max(lo, threshold), hi]`.
    pub fn clip_right(&self, threshold: f64) -> Interval {
        Interval {
            lo: self.lo.max(threshold),
            hi: self.hi,
        }
    }

    /// Smallest move that brings `v` into the interval, as an infimum.
    ///
    /// Zero inside, `v - hi` above, `lo - v` at or below the open end.
    pub fn distance(&self, v: f64) -> f64 {
        if self.contains(v) {
            0.0
        } else if v > self.hi {
            v - self.hi
        } else {
            self.lo - v
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}

/// Product of per-dimension half-open intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    intervals: Vec<Interval>,
}

impl AxisBox {
    /// The whole space `(-inf, inf]^d`.
    pub fn unbounded(dims: usize) -> Self {
        AxisBox {
            intervals: vec![Interval::UNBOUNDED; dims],
        }
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        AxisBox { intervals }
    }

    pub fn dims(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, dim: usize) -> Interval {
        self.intervals[dim]
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().any(Interval::is_empty)
    }

    /// Membership with `(lo, hi]` semantics. Coordinates past the end of
    /// `x` read as zero, matching sparse inputs.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.intervals
            .iter()
            .enumerate()
            .all(|(t, iv)| iv.contains(coord(x, t)))
    }

    pub fn is_subset_of(&self, other: &AxisBox) -> bool {
        self.is_empty()
            || self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.lo >= b.lo && a.hi <= b.hi)
    }

    pub(crate) fn with_interval(&self, dim: usize, iv: Interval) -> AxisBox {
        let mut out = self.clone();
        out.intervals[dim] = iv;
        out
    }

    /// Per-dimension intersection; `None` when any dimension is empty.
    pub fn intersect(&self, other: &AxisBox) -> Result<Option<AxisBox>, ModelError> {
        if self.dims() != other.dims() {
            return Err(ModelError::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(self.intersect_same_dims(other))
    }

    /// Intersection for boxes already known to share dimensionality.
    pub(crate) fn intersect_same_dims(&self, other: &AxisBox) -> Option<AxisBox> {
        debug_assert_eq!(self.dims(), other.dims());
        let mut intervals = Vec::with_capacity(self.dims());
        for (a, b) in self.intervals.iter().zip(&other.intervals) {
            let iv = a.intersect(b);
            if iv.is_empty() {
                return None;
            }
            intervals.push(iv);
        }
        Some(AxisBox { intervals })
    }

    pub(crate) fn intersects(&self, other: &AxisBox) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|(a, b)| a.lo.max(b.lo) < a.hi.min(b.hi))
    }
}

/// Coordinate `t` of a dense vector, zero past its end.
#[inline]
pub fn coord(x: &[f64], t: usize) -> f64 {
    x.get(t).copied().unwrap_or(0.0)
}

/// Intersection of two boxes, `None` when empty.
pub fn box_intersect(a: &AxisBox, b: &AxisBox) -> Result<Option<AxisBox>, ModelError> {
    a.intersect(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(lo: f64, hi: f64) -> AxisBox {
        AxisBox::from_intervals(vec![Interval::new(lo, hi)])
    }

    #[test]
    fn touching_half_open_intervals_do_not_intersect() {
        let a = one(f64::NEG_INFINITY, 0.5);
        let b = one(0.5, f64::INFINITY);
        assert_eq!(box_intersect(&a, &b).unwrap(), None);
        assert!(!a.intersects(&b));
    }

    #[test]
    fn overlapping_intervals() {
        let got = box_intersect(&one(0.0, 1.0), &one(0.5, 2.0)).unwrap();
        assert_eq!(got, Some(one(0.5, 1.0)));
    }

    #[test]
    fn intersect_is_idempotent() {
        let b = AxisBox::from_intervals(vec![Interval::new(0.1, 0.4), Interval::UNBOUNDED]);
        assert_eq!(box_intersect(&b, &b).unwrap(), Some(b.clone()));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = box_intersect(&AxisBox::unbounded(2), &AxisBox::unbounded(3)).unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn membership_follows_half_open_convention() {
        let iv = Interval::new(0.1, 0.5);
        assert!(!iv.contains(0.1));
        assert!(iv.contains(0.5));
        assert_eq!(iv.distance(0.7), 0.7 - 0.5);
        assert_eq!(iv.distance(0.1), 0.0);
        assert_eq!(iv.distance(0.3), 0.0);
    }
}
