use serde::{Deserialize, Serialize};
use std::fmt;

/// A closed interval `[lo, hi]` certified to contain an exact real value.
///
/// Endpoints serialize as decimal strings with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "crate::real")]
    pub lo: f64,
    #[serde(with = "crate::real")]
    pub hi: f64,
}

/// Outcome of comparing a bracket against a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Below,
    Above,
    Undecided,
}

impl Bracket {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "bracket endpoints out of order: [{lo}, {hi}]");
        Bracket { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Bracket { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Bracket) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Bracket) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersection of two brackets around the same value.
    pub fn intersect(&self, other: &Bracket) -> Option<Bracket> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Bracket { lo, hi })
    }

    /// Square root of a bracket on a non-negative quantity.
    pub fn sqrt(&self) -> Bracket {
        Bracket {
            lo: self.lo.max(0.0).sqrt(),
            hi: self.hi.max(0.0).sqrt(),
        }
    }

    /// Square of a bracket on a non-negative quantity.
    pub fn square(&self) -> Bracket {
        let lo = self.lo.max(0.0);
        Bracket {
            lo: lo * lo,
            hi: self.hi * self.hi,
        }
    }

    /// Euclidean distance from a complex value to the bracket on the real axis.
    pub fn distance_to(&self, re: f64, im: f64) -> f64 {
        let dx = if re < self.lo {
            self.lo - re
        } else if re > self.hi {
            re - self.hi
        } else {
            0.0
        };
        dx.hypot(im)
    }

    pub fn compare(&self, threshold: f64) -> Decision {
        if self.hi < threshold {
            Decision::Below
        } else if self.lo > threshold {
            Decision::Above
        } else {
            Decision::Undecided
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}
