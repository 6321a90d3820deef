//! Comparator methods: bounding-factor bounds and the E-value, parameter-free
//! bounds on both scales, and Manski's bounds for bounded outcomes.

use num_traits::Float;
use serde::Serialize;

use crate::bounds::{rd_bounds, rr_bounds, SensitivityParams};
use crate::distributions::{JointDEU, ObservedBinary};
use crate::interval::{Extended, Interval, Scale};
use crate::scalar::{max_of, min_of, Scalar};
use crate::{Error, Result};

/// Confounding-strength ratios `RR_UD`, `RR_E0U` and `RR_E1U`, each at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DvParams<T> {
    rr_ud: T,
    rr_e0u: T,
    rr_e1u: T,
}

impl<T: Scalar> DvParams<T> {
    pub fn new(rr_ud: T, rr_e0u: T, rr_e1u: T) -> Result<Self> {
        for (name, v) in [("RR_UD", rr_ud), ("RR_E0U", rr_e0u), ("RR_E1U", rr_e1u)] {
            if v < T::one() - T::tolerance() {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {} must be at least 1",
                    v.to_f64_lossy()
                )));
            }
        }
        Ok(Self {
            rr_ud: max_of(rr_ud, T::one()),
            rr_e0u: max_of(rr_e0u, T::one()),
            rr_e1u: max_of(rr_e1u, T::one()),
        })
    }

    pub fn rr_ud(&self) -> T {
        self.rr_ud
    }

    /// `RR_EeU` for exposure level `e`.
    pub fn rr_eu(&self, e: usize) -> T {
        if e == 1 {
            self.rr_e1u
        } else {
            self.rr_e0u
        }
    }

    /// Multiplies every ratio by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::new(self.rr_ud * factor, self.rr_e0u * factor, self.rr_e1u * factor)
    }

    /// `BF_e = RR_EeU RR_UD / (RR_EeU + RR_UD - 1)`.
    pub fn bounding_factor(&self, e: usize) -> T {
        bounding_factor(self.rr_eu(e), self.rr_ud)
    }
}

pub fn bounding_factor<T: Scalar>(rr_eu: T, rr_ud: T) -> T {
    rr_eu * rr_ud / (rr_eu + rr_ud - T::one())
}

/// True bounding-factor parameters of a joint, scanning mass-bearing levels.
pub fn dv_params_from_joint<T: Scalar>(joint: &JointDEU<T>) -> Result<DvParams<T>> {
    let levels: Vec<usize> = (0..joint.levels())
        .filter(|&u| joint.p_u()[u] > T::zero())
        .collect();

    let mut rr_ud = T::one();
    for e in 0..2 {
        let slice = joint.risk_slice(e);
        let hi = levels.iter().map(|&u| slice[u]).fold(slice[levels[0]], max_of);
        let lo = levels.iter().map(|&u| slice[u]).fold(slice[levels[0]], min_of);
        if lo == T::zero() {
            if hi == T::zero() {
                continue;
            }
            return Err(Error::ZeroDenominator(format!(
                "RR_UD: min_u p(D=1|E={e},U=u) is zero"
            )));
        }
        rr_ud = max_of(rr_ud, hi / lo);
    }

    let posteriors = [joint.p_u_given_e(0), joint.p_u_given_e(1)];
    let mut rr_eu = [T::one(); 2];
    for e in 0..2 {
        for &u in &levels {
            let other = posteriors[1 - e][u];
            if other == T::zero() {
                return Err(Error::ZeroDenominator(format!(
                    "RR_E{e}U: p(U={u}|E={}) is zero",
                    1 - e
                )));
            }
            rr_eu[e] = max_of(rr_eu[e], posteriors[e][u] / other);
        }
    }
    DvParams::new(rr_ud, rr_eu[0], rr_eu[1])
}

/// `(RR_obs / BF_1, RR_obs * BF_0)`.
pub fn dv_bounds<T: Scalar>(rr_obs: T, dp: &DvParams<T>) -> Result<Interval<T>> {
    if rr_obs <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "observed risk ratio {} must be positive",
            rr_obs.to_f64_lossy()
        )));
    }
    Ok(Interval::raw(
        rr_obs / dp.bounding_factor(1),
        Extended::Finite(rr_obs * dp.bounding_factor(0)),
        Scale::RiskRatio,
    ))
}

/// `RR + sqrt(RR (RR - 1))`, applied to `1 / RR` when the ratio is below 1.
pub fn e_value<F: Float>(rr_obs: F) -> Result<F> {
    if rr_obs.is_nan() || rr_obs <= F::zero() || rr_obs.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "observed risk ratio {:?} must be positive and finite",
            rr_obs.to_f64()
        )));
    }
    let rr = if rr_obs < F::one() {
        rr_obs.recip()
    } else {
        rr_obs
    };
    Ok(rr + (rr * (rr - F::one())).sqrt())
}

/// Parameter-free risk-ratio bounds `(RR_obs / BF~_1, RR_obs * BF~_0)`.
///
/// When an observed risk is zero the bounding-factor form is indeterminate;
/// the limit is evaluated directly.
pub fn as_bounds_rr<T: Scalar>(obs: &ObservedBinary<T>) -> Result<Interval<T>> {
    let (p1, p0) = (obs.p_d1_e1(), obs.p_d1_e0());
    let (pe1, pe0) = (obs.p_e1(), obs.p_e0());
    let zero = T::zero();

    let lower = if p0 > zero {
        let bf1 = (p0 * pe0 + pe1) / (p0 * pe1);
        (p1 / p0) / bf1
    } else {
        p1 * pe1 / (p0 * pe0 + pe1)
    };
    let upper = if p0 == zero {
        Extended::Infinite
    } else if p1 > zero {
        let bf0 = (p1 * pe1 + pe0) / (p1 * pe0);
        Extended::Finite((p1 / p0) * bf0)
    } else {
        Extended::Finite((p1 * pe1 + pe0) / (p0 * pe0))
    };
    Ok(Interval::raw(lower, upper, Scale::RiskRatio))
}

/// Parameter-free risk-difference bounds `(RD_obs - BF~†_1, RD_obs + BF~†_0)`.
pub fn as_bounds_rd<T: Scalar>(obs: &ObservedBinary<T>) -> Interval<T> {
    let (p1, p0) = (obs.p_d1_e1(), obs.p_d1_e0());
    let (pe1, pe0) = (obs.p_e1(), obs.p_e0());
    let bf1 = pe0 * p1 + pe1 * (T::one() - p0);
    let bf0 = pe1 * p0 + pe0 * (T::one() - p1);
    let rd = obs.rd_obs();
    Interval::raw(rd - bf1, Extended::Finite(rd + bf0), Scale::RiskDifference)
}

/// Known support intervals `[k00, k01]` for `D_0` and `[k10, k11]` for `D_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManskiSupports<T> {
    k00: T,
    k01: T,
    k10: T,
    k11: T,
}

impl<T: Scalar> ManskiSupports<T> {
    pub fn new(k00: T, k01: T, k10: T, k11: T) -> Result<Self> {
        if k00 > k01 || k10 > k11 {
            return Err(Error::InvalidParameter(
                "support intervals must satisfy k00 <= k01 and k10 <= k11".into(),
            ));
        }
        Ok(Self { k00, k01, k10, k11 })
    }

    /// Supports of a binary outcome.
    pub fn binary() -> Self {
        Self {
            k00: T::zero(),
            k01: T::one(),
            k10: T::zero(),
            k11: T::one(),
        }
    }
}

/// Manski's bounds on `E[D_1] - E[D_0]` for outcomes with known supports.
pub fn manski_rd_bounds<T: Scalar>(
    mean_d_e1: T,
    mean_d_e0: T,
    p_e1: T,
    ks: &ManskiSupports<T>,
) -> Result<Interval<T>> {
    for (mean, low, high) in [(mean_d_e1, ks.k10, ks.k11), (mean_d_e0, ks.k00, ks.k01)] {
        if mean < low || mean > high {
            return Err(Error::SupportViolation {
                mean: mean.to_f64_lossy(),
                low: low.to_f64_lossy(),
                high: high.to_f64_lossy(),
            });
        }
    }
    let p_e1 = crate::scalar::unit_interval("p(E=1)", p_e1)?;
    let p_e0 = T::one() - p_e1;
    let observed_part = mean_d_e1 * p_e1 - mean_d_e0 * p_e0;
    Ok(Interval::raw(
        ks.k10 * p_e0 + observed_part - ks.k01 * p_e1,
        Extended::Finite(ks.k11 * p_e0 + observed_part - ks.k00 * p_e1),
        Scale::RiskDifference,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodInterval<T> {
    pub name: &'static str,
    pub scale: Scale,
    pub lower: T,
    pub upper: Extended<T>,
}

impl<T: Scalar> MethodInterval<T> {
    fn new(name: &'static str, iv: Interval<T>) -> Self {
        Self {
            name,
            scale: iv.scale(),
            lower: iv.lower(),
            upper: iv.upper(),
        }
    }

    pub fn interval(&self) -> Interval<T> {
        Interval::raw(self.lower, self.upper, self.scale)
    }
}

/// Side-by-side intervals from every method plus the tightest combination
/// per scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison<T> {
    pub rr_obs: Extended<T>,
    pub methods: Vec<MethodInterval<T>>,
    /// Intersection of the risk-ratio rows; `None` if they are disjoint.
    pub tightest: Option<MethodInterval<T>>,
    /// Intersection of the risk-difference rows.
    pub tightest_rd: Option<MethodInterval<T>>,
}

pub const TWO_PARAM: &str = "two_param";
pub const PARAMETER_FREE: &str = "as";
pub const MANSKI: &str = "manski";
pub const BOUNDING_FACTOR: &str = "dv";
pub const TIGHTEST: &str = "tightest";

/// Evaluates every method on the same observed law.
///
/// Risk-ratio rows: two-parameter, parameter-free, and bounding-factor when
/// `dp` is given. Risk-difference rows: two-parameter, parameter-free and
/// binary Manski.
pub fn compare_methods<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
    dp: Option<&DvParams<T>>,
) -> Result<Comparison<T>> {
    let rr_obs = obs.rr_obs()?;
    let mut rr_rows = vec![
        MethodInterval::new(TWO_PARAM, rr_bounds(obs, sp)?),
        MethodInterval::new(PARAMETER_FREE, as_bounds_rr(obs)?),
    ];
    if let Some(dp) = dp {
        let rr = rr_obs.finite().ok_or_else(|| {
            Error::ZeroDenominator("bounding-factor bounds need a finite observed risk ratio".into())
        })?;
        rr_rows.push(MethodInterval::new(BOUNDING_FACTOR, dv_bounds(rr, dp)?));
    }
    let rd_rows = vec![
        MethodInterval::new(TWO_PARAM, rd_bounds(obs, sp)?),
        MethodInterval::new(PARAMETER_FREE, as_bounds_rd(obs)),
        MethodInterval::new(
            MANSKI,
            manski_rd_bounds(
                obs.p_d1_e1(),
                obs.p_d1_e0(),
                obs.p_e1(),
                &ManskiSupports::binary(),
            )?,
        ),
    ];
    let tightest_of = |rows: &[MethodInterval<T>]| {
        rows[1..]
            .iter()
            .try_fold(rows[0].interval(), |acc, row| acc.intersect(&row.interval()))
            .map(|iv| MethodInterval::new(TIGHTEST, iv))
    };
    let tightest = tightest_of(&rr_rows);
    let tightest_rd = tightest_of(&rd_rows);
    let mut methods = rr_rows;
    methods.extend(rd_rows);
    Ok(Comparison {
        rr_obs,
        methods,
        tightest,
        tightest_rd,
    })
}

impl<T: Scalar> Comparison<T> {
    pub fn method(&self, name: &str, scale: Scale) -> Option<&MethodInterval<T>> {
        self.methods
            .iter()
            .find(|row| row.name == name && row.scale == scale)
    }
}
