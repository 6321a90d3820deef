//! Numeric scalar abstraction shared by every bound and oracle.
//!
//! All closed-form bounds in this crate are rational functions of the observed
//! law and the sensitivity parameters, so they are written once against
//! [`Scalar`] and evaluated either in floating point or in exact rational
//! arithmetic.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A field-like number type the bounds can be evaluated in.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Slack allowed when checking simplex and unit-interval constraints.
    fn tolerance() -> Self;

    /// Deviation from 1 that a normalized vector may carry from rounding alone.
    fn rounding_slack() -> Self {
        Self::zero()
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar")
    }

    fn from_u64_exact(n: u64) -> Self {
        Self::from_u64(n).expect("u64 representable in scalar")
    }

    /// Lossy conversion used for reporting and logarithms.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn rounding_slack() -> Self {
        8.0 * f64::EPSILON
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-6
    }

    fn rounding_slack() -> Self {
        8.0 * f32::EPSILON
    }
}

impl Scalar for Ratio<i64> {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for Ratio<i128> {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Checks `value` lies in [0, 1] up to [`Scalar::tolerance`], clamping values
/// that sit inside the slack.
pub(crate) fn unit_interval<T: Scalar>(name: &str, value: T) -> crate::Result<T> {
    let tol = T::tolerance();
    if value < T::zero() - tol || value > T::one() + tol {
        return Err(crate::Error::InvalidProbability {
            name: name.to_string(),
            value: value.to_f64_lossy(),
        });
    }
    Ok(min_of(max_of(value, T::zero()), T::one()))
}

/// Validates a probability vector and renormalizes it when its sum is off by
/// no more than the tolerance. Vectors already normalized up to rounding are
/// returned unchanged, so validation is idempotent.
pub(crate) fn simplex<T: Scalar>(name: &str, values: &[T]) -> crate::Result<Vec<T>> {
    if values.is_empty() {
        return Err(crate::Error::Shape(format!("{name} is empty")));
    }
    let clamped = values
        .iter()
        .enumerate()
        .map(|(i, &v)| unit_interval(&format!("{name}[{i}]"), v))
        .collect::<crate::Result<Vec<T>>>()?;
    let sum = clamped.iter().fold(T::zero(), |acc, &v| acc + v);
    if (sum - T::one()).abs() > T::tolerance() {
        return Err(crate::Error::NotNormalized {
            name: name.to_string(),
            sum: sum.to_f64_lossy(),
        });
    }
    if (sum - T::one()).abs() <= T::rounding_slack() {
        Ok(clamped)
    } else {
        Ok(clamped.into_iter().map(|v| v / sum).collect())
    }
}
