//! Finite unions of intervals with open or closed ends.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo))
            && (x < self.hi || (self.hi_closed && x == self.hi))
    }
}

/// Where a point sits relative to an interval set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    pub parts: Vec<Interval>,
}

impl IntervalSet {
    /// Overlapping parts are merged. Two closed ends meeting at a point stay
    /// separate so the point keeps its boundary locus.
    pub fn new(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| p.lo < p.hi || (p.lo == p.hi && p.lo_closed && p.hi_closed));
        parts.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(q) if p.lo < q.hi || (p.lo == q.hi && q.hi_closed != p.lo_closed) => {
                    if p.lo == q.lo {
                        q.lo_closed |= p.lo_closed;
                    }
                    if p.hi > q.hi {
                        q.hi = p.hi;
                        q.hi_closed = p.hi_closed;
                    } else if p.hi == q.hi {
                        q.hi_closed |= p.hi_closed;
                    }
                }
                _ => merged.push(p),
            }
        }
        IntervalSet { parts: merged }
    }

    /// Open interval `(lo, hi)`.
    pub fn open(lo: f64, hi: f64) -> Self {
        IntervalSet::new(vec![Interval::new(lo, hi, false, false)])
    }

    /// Pairs `[lo, hi]`; ends equal to the window edges are open, all other
    /// ends closed.
    pub fn from_pairs(pairs: &[[f64; 2]], window: (f64, f64)) -> Self {
        IntervalSet::new(
            pairs
                .iter()
                .map(|&[lo, hi]| Interval::new(lo, hi, lo > window.0, hi < window.1))
                .collect(),
        )
    }

    pub fn pairs(&self) -> Vec<[f64; 2]> {
        self.parts.iter().map(|p| [p.lo, p.hi]).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Closed ends, i.e. boundary points that belong to the set.
    pub fn closed_ends(&self) -> Vec<f64> {
        let mut v = vec![];
        for p in &self.parts {
            if p.lo_closed {
                v.push(p.lo);
            }
            if p.hi_closed {
                v.push(p.hi);
            }
        }
        v
    }

    pub fn locus(&self, x: f64, tol: f64) -> Locus {
        if self.closed_ends().iter().any(|&e| (x - e).abs() <= tol) {
            return Locus::Boundary;
        }
        for p in &self.parts {
            let open_end = |e: f64, closed: bool| !closed && (x - e).abs() <= tol;
            if open_end(p.lo, p.lo_closed) || open_end(p.hi, p.hi_closed) {
                continue;
            }
            if p.contains(x) {
                return Locus::Interior;
            }
        }
        Locus::Outside
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = vec![];
        for a in &self.parts {
            for b in &other.parts {
                let (lo, lo_closed) = if a.lo > b.lo {
                    (a.lo, a.lo_closed)
                } else if b.lo > a.lo {
                    (b.lo, b.lo_closed)
                } else {
                    (a.lo, a.lo_closed && b.lo_closed)
                };
                let (hi, hi_closed) = if a.hi < b.hi {
                    (a.hi, a.hi_closed)
                } else if b.hi < a.hi {
                    (b.hi, b.hi_closed)
                } else {
                    (a.hi, a.hi_closed && b.hi_closed)
                };
                if lo < hi || (lo == hi && lo_closed && hi_closed) {
                    out.push(Interval::new(lo, hi, lo_closed, hi_closed));
                }
            }
        }
        IntervalSet::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locus_and_intersection() {
        let s = IntervalSet::from_pairs(&[[-0.5, -0.2], [0.1, 0.5]], (-0.5, 0.5));
        assert_eq!(s.locus(-0.2, 1e-9), Locus::Boundary);
        assert_eq!(s.locus(0.3, 1e-9), Locus::Interior);
        assert_eq!(s.locus(0.0, 1e-9), Locus::Outside);
        assert_eq!(s.locus(0.5, 1e-9), Locus::Outside);
        let t = s.intersect(&IntervalSet::open(-0.3, 0.2));
        assert_eq!(t.parts.len(), 2);
        assert!(t.contains(-0.2) && !t.contains(-0.3) && t.contains(0.1));
    }
}
