//! Near-attaining witness distributions for the two-parameter bounds.
//!
//! Each witness uses a binary confounder that almost determines exposure,
//! `p(U=1|E=1) = p(U=0|E=0) = 1 - ε`, keeps `p(E)` at its observed value, and
//! assigns the outcome slices so that the true effect approaches the chosen
//! bound as `ε -> 0` while the observed law is reproduced up to `O(ε)`. The
//! sensitivity parameters of the witness equal `(M, m)` exactly for every `ε`.
//!
//! Natural indirect effect witnesses are not provided.

use serde::Serialize;

use crate::bounds::{rd_bounds, rr_bounds, SensitivityParams};
use crate::distributions::{observed_from_joint, true_rd, true_rr, JointDEU, JointDEZU, ObservedBinary};
use crate::interval::Interval;
use crate::mediation::{
    mediation_feasible_region, mediation_observed_from_joint, nde_bounds, true_nde,
    MediationObserved,
};
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessScale {
    #[serde(rename = "rr")]
    RiskRatio,
    #[serde(rename = "rd")]
    RiskDifference,
    #[serde(rename = "nde")]
    NaturalDirect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec<T> {
    epsilon: T,
    target: Target,
    scale: WitnessScale,
}

impl<T: Scalar> WitnessSpec<T> {
    pub fn new(epsilon: T, target: Target, scale: WitnessScale) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {}",
                epsilon.to_f64_lossy()
            )));
        }
        Ok(Self {
            epsilon,
            target,
            scale,
        })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn scale(&self) -> WitnessScale {
        self.scale
    }

    fn expect_scale(&self, scale: WitnessScale) -> Result<()> {
        if self.scale != scale {
            return Err(Error::InvalidParameter(format!(
                "witness spec is for {:?}, not {:?}",
                self.scale, scale
            )));
        }
        Ok(())
    }
}

/// Default `ε`.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Bound computed on the input law next to the effect on the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub bound_value: f64,
    pub true_value_on_witness: f64,
    /// `|log bound - log true|` on ratio scales, `|bound - true|` on the
    /// difference scale.
    pub log_gap: f64,
    /// Largest absolute deviation between the input observed law and the
    /// witness's observed law.
    pub marginal_discrepancy: f64,
}

fn ratio_gap<T: Scalar>(bound: T, truth: T) -> f64 {
    if bound == truth {
        return 0.0;
    }
    (bound.to_f64_lossy().ln() - truth.to_f64_lossy().ln()).abs()
}

fn pick<T: Scalar>(iv: &Interval<T>, target: Target, what: &str) -> Result<T> {
    match target {
        Target::Lower => Ok(iv.lower()),
        Target::Upper => iv.upper_finite().ok_or_else(|| {
            Error::ZeroDenominator(format!("{what} upper bound is infinite; no finite witness"))
        }),
    }
}

/// Binary confounder law with `p(U=1|E=1) = p(U=0|E=0) = 1 - ε` and the given
/// `p(E=1)`. Returns `(p(U), p(E=1|U))`, indexed by `u`.
fn near_deterministic_confounder<T: Scalar>(p_e1: T, eps: T) -> (Vec<T>, Vec<T>) {
    let one = T::one();
    let p_e0 = one - p_e1;
    let p_u1 = p_e1 * (one - eps) + p_e0 * eps;
    let p_u0 = one - p_u1;
    (
        vec![p_u0, p_u1],
        vec![p_e1 * eps / p_u0, p_e1 * (one - eps) / p_u1],
    )
}

/// Outcome slices `[e][u]` for one observed pair of risks.
fn slices<T: Scalar>(risk1: T, risk0: T, sp: &SensitivityParams<T>, target: Target) -> [Vec<T>; 2] {
    let (hi, lo) = (sp.max_risk(), sp.min_risk());
    match target {
        Target::Lower => [vec![risk0, hi], vec![lo, risk1]],
        Target::Upper => [vec![risk0, lo], vec![hi, risk1]],
    }
}

fn total_effect_witness<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
    spec: &WitnessSpec<T>,
) -> Result<JointDEU<T>> {
    let (p_u, p_e1_u) = near_deterministic_confounder(obs.p_e1(), spec.epsilon);
    JointDEU::new(
        p_u,
        p_e1_u,
        slices(obs.p_d1_e1(), obs.p_d1_e0(), sp, spec.target),
    )
}

fn marginal_discrepancy<T: Scalar>(obs: &ObservedBinary<T>, joint: &JointDEU<T>) -> Result<f64> {
    Ok(observed_from_joint(joint)?.max_abs_diff(obs).to_f64_lossy())
}

/// Witness approaching the risk-ratio bound selected by `spec.target()`.
pub fn rr_witness<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
    spec: &WitnessSpec<T>,
) -> Result<(JointDEU<T>, WitnessReport)> {
    spec.expect_scale(WitnessScale::RiskRatio)?;
    let bound = pick(&rr_bounds(obs, sp)?, spec.target, "risk-ratio")?;
    let joint = total_effect_witness(obs, sp, spec)?;
    let truth = true_rr(&joint)?;
    let report = WitnessReport {
        bound_value: bound.to_f64_lossy(),
        true_value_on_witness: truth.to_f64_lossy(),
        log_gap: ratio_gap(bound, truth),
        marginal_discrepancy: marginal_discrepancy(obs, &joint)?,
    };
    Ok((joint, report))
}

/// Witness approaching the risk-difference bound selected by `spec.target()`.
pub fn rd_witness<T: Scalar>(
    obs: &ObservedBinary<T>,
    sp: &SensitivityParams<T>,
    spec: &WitnessSpec<T>,
) -> Result<(JointDEU<T>, WitnessReport)> {
    spec.expect_scale(WitnessScale::RiskDifference)?;
    let bound = pick(&rd_bounds(obs, sp)?, spec.target, "risk-difference")?;
    let joint = total_effect_witness(obs, sp, spec)?;
    let truth = true_rd(&joint);
    let report = WitnessReport {
        bound_value: bound.to_f64_lossy(),
        true_value_on_witness: truth.to_f64_lossy(),
        log_gap: (bound - truth).abs().to_f64_lossy(),
        marginal_discrepancy: marginal_discrepancy(obs, &joint)?,
    };
    Ok((joint, report))
}

/// Witness approaching the natural direct effect bound selected by
/// `spec.target()`; `U` is independent of `Z` given `E`.
pub fn nde_witness<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
    spec: &WitnessSpec<T>,
) -> Result<(JointDEZU<T>, WitnessReport)> {
    spec.expect_scale(WitnessScale::NaturalDirect)?;
    mediation_feasible_region(med).check(sp)?;
    let bound = pick(&nde_bounds(med, sp)?, spec.target, "natural direct effect")?;
    let (p_u, p_e1_u) = near_deterministic_confounder(med.p_e1(), spec.epsilon);
    let mut risks: [Vec<Vec<T>>; 2] = [Vec::new(), Vec::new()];
    for z in 0..med.mediator_levels() {
        let [r0, r1] = slices(med.risks(1)[z], med.risks(0)[z], sp, spec.target);
        risks[0].push(r0);
        risks[1].push(r1);
    }
    let joint = JointDEZU::new(
        p_u,
        p_e1_u,
        [med.p_z_given_e(0).to_vec(), med.p_z_given_e(1).to_vec()],
        risks,
    )?;
    let truth = true_nde(&joint)?;
    let report = WitnessReport {
        bound_value: bound.to_f64_lossy(),
        true_value_on_witness: truth.to_f64_lossy(),
        log_gap: ratio_gap(bound, truth),
        marginal_discrepancy: mediation_observed_from_joint(&joint)?
            .max_abs_diff(med)
            .to_f64_lossy(),
    };
    Ok((joint, report))
}

/// Input law for a sweep.
#[derive(Debug, Clone, Copy)]
pub enum WitnessInput<'a, T> {
    Total(&'a ObservedBinary<T>),
    Mediation(&'a MediationObserved<T>),
}

/// Witness reports for each `ε`, in input order. `epsilons` must be strictly
/// decreasing inside `(0, 1)`.
pub fn sharpness_sweep<T: Scalar>(
    input: WitnessInput<'_, T>,
    sp: &SensitivityParams<T>,
    epsilons: &[T],
    target: Target,
    scale: WitnessScale,
) -> Result<Vec<WitnessReport>> {
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "epsilons must be strictly decreasing".into(),
        ));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let spec = WitnessSpec::new(eps, target, scale)?;
            match (input, scale) {
                (WitnessInput::Total(obs), WitnessScale::RiskRatio) => {
                    rr_witness(obs, sp, &spec).map(|w| w.1)
                }
                (WitnessInput::Total(obs), WitnessScale::RiskDifference) => {
                    rd_witness(obs, sp, &spec).map(|w| w.1)
                }
                (WitnessInput::Mediation(med), WitnessScale::NaturalDirect) => {
                    nde_witness(med, sp, &spec).map(|w| w.1)
                }
                _ => Err(Error::InvalidParameter(format!(
                    "scale {scale:?} does not match the input law"
                ))),
            }
        })
        .collect()
}
