use serde::{Serialize, Serializer};

use crate::scalar::{max_of, min_of, Scalar};
use crate::{Error, Result};

/// Effect scale an interval is expressed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scale {
    #[serde(rename = "rr")]
    RiskRatio,
    #[serde(rename = "rd")]
    RiskDifference,
}

/// A nonnegative-or-signed value that may also be `+inf`.
///
/// Variant order matters: every finite value compares below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64_lossy(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `numerator / denominator` with a zero denominator mapping to `+inf`.
    /// The numerator must be positive in that case.
    pub(crate) fn ratio(numerator: T, denominator: T, what: &str) -> Result<Self> {
        if denominator == T::zero() {
            if numerator > T::zero() {
                Ok(Extended::Infinite)
            } else {
                Err(Error::ZeroDenominator(what.to_string()))
            }
        } else {
            Ok(Extended::Finite(numerator / denominator))
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T: Serialize> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => v.serialize(serializer),
            Extended::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// A lower/upper bound pair on an effect scale.
///
/// The lower end is always finite; the upper end may be `+inf` on the risk
/// ratio scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    lower: T,
    upper: Extended<T>,
    scale: Scale,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lower: T, upper: Extended<T>, scale: Scale) -> Result<Self> {
        let tol = T::tolerance();
        if let Extended::Finite(u) = upper {
            if lower > u + tol {
                return Err(Error::InvalidParameter(format!(
                    "interval lower {} exceeds upper {}",
                    lower.to_f64_lossy(),
                    u.to_f64_lossy()
                )));
            }
        } else if scale == Scale::RiskDifference {
            return Err(Error::InvalidParameter(
                "risk-difference intervals are always finite".into(),
            ));
        }
        Ok(Self::raw(lower, upper, scale))
    }

    pub fn finite(lower: T, upper: T, scale: Scale) -> Result<Self> {
        Self::new(lower, Extended::Finite(upper), scale)
    }

    pub(crate) fn raw(lower: T, upper: Extended<T>, scale: Scale) -> Self {
        Self {
            lower,
            upper,
            scale,
        }
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> Extended<T> {
        self.upper
    }

    /// Upper end, or `None` when it is `+inf`.
    pub fn upper_finite(&self) -> Option<T> {
        self.upper.finite()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// Whether `value` lies in the interval widened by `slack` on both sides.
    pub fn contains(&self, value: T, slack: T) -> bool {
        if value < self.lower - slack {
            return false;
        }
        match self.upper {
            Extended::Finite(u) => value <= u + slack,
            Extended::Infinite => true,
        }
    }

    /// Whether `inner` is a subset of `self` up to `slack`.
    pub fn contains_interval(&self, inner: &Interval<T>, slack: T) -> bool {
        if inner.lower < self.lower - slack {
            return false;
        }
        match (self.upper, inner.upper) {
            (Extended::Infinite, _) => true,
            (Extended::Finite(_), Extended::Infinite) => false,
            (Extended::Finite(outer), Extended::Finite(inner)) => inner <= outer + slack,
        }
    }

    /// Intersection of two intervals on the same scale; `None` when empty.
    pub fn intersect(&self, other: &Interval<T>) -> Option<Interval<T>> {
        debug_assert_eq!(self.scale, other.scale);
        let lower = max_of(self.lower, other.lower);
        let upper = self.upper.min(other.upper);
        match upper {
            Extended::Finite(u) if lower > u => None,
            _ => Some(Self::raw(lower, upper, self.scale)),
        }
    }

    /// Smallest interval covering both.
    pub fn hull(&self, other: &Interval<T>) -> Interval<T> {
        Self::raw(
            min_of(self.lower, other.lower),
            self.upper.max(other.upper),
            self.scale,
        )
    }

    pub fn to_f64(&self) -> Interval<f64> {
        Interval {
            lower: self.lower.to_f64_lossy(),
            upper: match self.upper {
                Extended::Finite(u) => Extended::Finite(u.to_f64_lossy()),
                Extended::Infinite => Extended::Infinite,
            },
            scale: self.scale,
        }
    }
}

impl Interval<f64> {
    /// Upper end as an `f64`, with `+inf` for an unbounded interval.
    pub fn upper_f64(&self) -> f64 {
        self.upper.to_f64()
    }
}
