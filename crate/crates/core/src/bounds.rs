//! Two-parameter bounds on the causal risk ratio and risk difference.
//!
//! With `M` and `m` the largest and smallest values of `p(D=1|E,U)`, each
//! counterfactual risk is bracketed by mixing the observed arm with `m` or
//! `M` for the unobserved arm:
//!
//! ```text
//! p(D=1,E=1) + p(E=0) m  <=  p(D_1=1)  <=  p(D=1,E=1) + p(E=0) M
//! p(D=1,E=0) + p(E=1) m  <=  p(D_0=1)  <=  p(D=1,E=0) + p(E=1) M
//! ```
//!
//! The risk-ratio and risk-difference bounds combine those brackets; they are
//! arbitrarily sharp and always contain the null effect.

use serde::Serialize;

use crate::distributions::{ObservedBinary, StratifiedObserved};
use crate::interval::{Extended, Interval, Scale};
use crate::scalar::{max_of, min_of, unit_interval, Scalar};
use crate::{Error, Result};

/// Upper (`M`) and lower (`m`) limits on `p(D=1|E=e,U=u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityParams<T> {
    #[serde(rename = "M")]
    max_risk: T,
    #[serde(rename = "m")]
    min_risk: T,
}

impl<T: Scalar> SensitivityParams<T> {
    pub fn new(max_risk: T, min_risk: T) -> Result<Self> {
        let max_risk = unit_interval("M", max_risk)?;
        let min_risk = unit_interval("m", min_risk)?;
        if min_risk > max_risk {
            return Err(Error::InvalidParameter(format!(
                "m = {} exceeds M = {}",
                min_risk.to_f64_lossy(),
                max_risk.to_f64_lossy()
            )));
        }
        Ok(Self { max_risk, min_risk })
    }

    /// The least informative choice, `M = 1` and `m = 0`.
    pub fn uninformative() -> Self {
        Self {
            max_risk: T::one(),
            min_risk: T::zero(),
        }
    }

    pub fn max_risk(&self) -> T {
        self.max_risk
    }

    pub fn min_risk(&self) -> T {
        self.min_risk
    }
}

/// The smallest admissible `M` and largest admissible `m` given the observed law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleRegion<T> {
    #[serde(rename = "M_star")]
    max_star: T,
    #[serde(rename = "m_star")]
    min_star: T,
}

impl<T: Scalar> FeasibleRegion<T> {
    pub(crate) fn from_risks(risks: impl IntoIterator<Item = T>) -> Self {
        let mut iter = risks.into_iter();
        let first = iter.next().expect("at least one observed risk");
        let (max_star, min_star) =
            iter.fold((first, first), |(hi, lo), r| (max_of(hi, r), min_of(lo, r)));
        Self { max_star, min_star }
    }

    pub fn max_star(&self) -> T {
        self.max_star
    }

    pub fn min_star(&self) -> T {
        self.min_star
    }

    /// Errors unless `M* <= M` and `m <= m*`.
    pub fn check(&self, sp: &SensitivityParams<T>) -> Result<()> {
        self.check_raw(sp.max_risk, sp.min_risk)
    }

    /// Builds `(M, m)` after checking it against the region, so that an
    /// infeasible `M` is reported as such even when it also lies below `m`.
    pub fn params(&self, max_risk: T, min_risk: T) -> Result<SensitivityParams<T>> {
        self.check_raw(max_risk, min_risk)?;
        SensitivityParams::new(max_risk, min_risk)
    }

    fn check_raw(&self, max_risk: T, min_risk: T) -> Result<()> {
        let tol = T::tolerance();
        let fail = |requirement: String| Error::InfeasibleParams {
            requirement,
            max_star: self.max_star.to_f64_lossy(),
            min_star: self.min_star.to_f64_lossy(),
            stratum: None,
        };
        if max_risk < self.max_star - tol {
            return Err(fail(format!(
                "M >= {}, got M = {}",
                self.max_star.to_f64_lossy(),
                max_risk.to_f64_lossy()
            )));
        }
        if min_risk > self.min_star + tol {
            return Err(fail(format!(
                "m <= {}, got m = {}",
                self.min_star.to_f64_lossy(),
                min_risk.to_f64_lossy()
            )));
        }
        Ok(())
    }
}

pub fn feasible_region<T: Scalar>(obs: &ObservedBinary<T>) -> FeasibleRegion<T> {
    FeasibleRegion::from_risks([obs.p_d1_e1(), obs.p_d1_e0()])
}

/// Lower and upper brackets on `p(D_1=1)` and `p(D_0=1)`.
struct Brackets<T> {
    treated_lo: T,
    treated_hi: T,
    control_lo: T,
    control_hi: T,
}

fn brackets<T: Scalar>(obs: &ObservedBinary<T>, sp: &SensitivityParams<T>) -> Brackets<T> {
    let (a, b) = (obs.p_d1_and_e1(), obs.p_d1_and_e0());
    let (p1, p0) = (obs.p_e1(), obs.p_e0());
    Brackets {
        treated_lo: a + p0 * sp.min_risk,
        treated_hi: a + p0 * sp.max_risk,
        control_lo: b + p1 * sp.min_risk,
        control_hi: b + p1 * sp.max_risk,
    }
}

/// Risk-ratio interval; the upper end is `+inf` exactly when
/// `p(D=1,E=0) + p(E=1) m = 0`.
pub fn rr_bounds<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    feasible_region(obs).check(sp)?;
    let br = brackets(obs, sp);
    if br.control_hi == T::zero() {
        return Err(Error::ZeroDenominator("risk-ratio lower bound".into()));
    }
    let lower = br.treated_lo / br.control_hi;
    let upper = Extended::ratio(br.treated_hi, br.control_lo, "risk-ratio upper bound")?;
    Ok(Interval::raw(lower, upper, Scale::RiskRatio))
}

pub fn rd_bounds<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    feasible_region(obs).check(sp)?;
    let br = brackets(obs, sp);
    Ok(Interval::raw(
        br.treated_lo - br.control_hi,
        Extended::Finite(br.treated_hi - br.control_lo),
        Scale::RiskDifference,
    ))
}

/// Risk-ratio bounds within each covariate stratum, one parameter pair per stratum.
pub fn conditional_rr_bounds<T: Scalar>(
    strat: &StratifiedObserved<T>,
    sp_per_stratum: &[SensitivityParams<T>],
) -> Result<Vec<Interval<T>>> {
    if sp_per_stratum.len() != strat.len() {
        return Err(Error::Shape(format!(
            "{} strata but {} parameter pairs",
            strat.len(),
            sp_per_stratum.len()
        )));
    }
    strat
        .strata()
        .iter()
        .zip(sp_per_stratum)
        .map(|(s, sp)| rr_bounds(&s.observed, sp).map_err(|e| e.in_stratum(&s.label)))
        .collect()
}

/// Population risk-ratio bounds `(min_c LB_c, max_c UB_c)`.
pub fn averaged_rr_bounds<T: Scalar>(
    strat: &StratifiedObserved<T>,
    sp_per_stratum: &[SensitivityParams<T>],
) -> Result<Interval<T>> {
    let per = conditional_rr_bounds(strat, sp_per_stratum)?;
    Ok(per[1..].iter().fold(per[0], |acc, iv| acc.hull(iv)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow<T> {
    #[serde(rename = "M")]
    pub max_risk: T,
    #[serde(rename = "m")]
    pub min_risk: T,
    pub interval: Interval<T>,
}

/// Risk-ratio bounds over an evenly spaced grid of the feasible region.
///
/// `M` runs over `n_max` points from `M*` to 1 and `m` over `n_min` points
/// from `m*` down to 0, endpoints included. Rows are ordered with `m` in the
/// outer loop (descending) and `M` in the inner loop (ascending).
pub fn bounds_grid<T: Scalar>(
    obs: &ObservedBinary<T>,
    n_max: usize,
    n_min: usize,
) -> Result<Vec<GridRow<T>>> {
    if n_max < 2 || n_min < 2 {
        return Err(Error::InvalidParameter(
            "grid needs at least two points per axis".into(),
        ));
    }
    let region = feasible_region(obs);
    let (max_star, min_star) = (region.max_star(), region.min_star());
    let step = |i: usize, n: usize| T::from_usize_exact(i) / T::from_usize_exact(n - 1);
    let max_axis: Vec<T> = (0..n_max)
        .map(|j| match j {
            0 => max_star,
            j if j == n_max - 1 => T::one(),
            j => max_star + (T::one() - max_star) * step(j, n_max),
        })
        .collect();
    let min_axis: Vec<T> = (0..n_min)
        .map(|i| match i {
            0 => min_star,
            i if i == n_min - 1 => T::zero(),
            i => min_star * (T::one() - step(i, n_min)),
        })
        .collect();

    let mut rows = Vec::with_capacity(n_max * n_min);
    for &min_risk in &min_axis {
        for &max_risk in &max_axis {
            let sp = SensitivityParams::new(max_risk, min_risk)?;
            rows.push(GridRow {
                max_risk,
                min_risk,
                interval: rr_bounds(obs, &sp)?,
            });
        }
    }
    Ok(rows)
}
