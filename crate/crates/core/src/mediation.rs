//! Bounds on natural direct and indirect effects when a measured mediator `Z`
//! carries part of the effect and only exposure-outcome confounding is present.
//!
//! The risk-difference and covariate-stratified variants at the bottom are a
//! mechanical extension of the risk-ratio construction (the same per-`z`
//! brackets on `p(D_{ez}=1)` combined additively, or per stratum). They are
//! valid bounds; their sharpness is not established.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::{FeasibleRegion, SensitivityParams};
use crate::distributions::{dot, mediator_row, CountTable, JointDEZU, ObservedBinary};
use crate::interval::{Extended, Interval, Scale};
use crate::scalar::{unit_interval, Scalar};
use crate::{Error, Result};

/// Observed law `p(E) p(Z|E) p(D|E,Z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawMediation<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct MediationObserved<T> {
    p_e1: T,
    /// Indexed `[e][z]`.
    p_z_e: [Vec<T>; 2],
    /// Indexed `[e][z]`.
    p_d1_ez: [Vec<T>; 2],
}

#[derive(Deserialize)]
struct RawMediation<T> {
    p_e1: T,
    p_z_e: Vec<Vec<T>>,
    p_d1_ez: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<RawMediation<T>> for MediationObserved<T> {
    type Error = Error;
    fn try_from(raw: RawMediation<T>) -> Result<Self> {
        let pair = |v: Vec<Vec<T>>, name: &str| -> Result<[Vec<T>; 2]> {
            <[Vec<T>; 2]>::try_from(v)
                .map_err(|_| Error::Shape(format!("{name} must have exactly two rows")))
        };
        Self::new(raw.p_e1, pair(raw.p_z_e, "p_z_e")?, pair(raw.p_d1_ez, "p_d1_ez")?)
    }
}

impl<T: Scalar> MediationObserved<T> {
    pub fn new(p_e1: T, p_z_e: [Vec<T>; 2], p_d1_ez: [Vec<T>; 2]) -> Result<Self> {
        let l = p_z_e[0].len();
        if p_z_e[1].len() != l || p_d1_ez.iter().any(|row| row.len() != l) {
            return Err(Error::Shape(format!(
                "every mediator row must have {l} levels"
            )));
        }
        let p_e1 = unit_interval("p(E=1)", p_e1)?;
        if p_e1 <= T::zero() || p_e1 >= T::one() {
            return Err(Error::Positivity("p(E=1) must lie strictly inside (0, 1)".into()));
        }
        let p_z_e = [
            mediator_row("p(Z|E=0)", &p_z_e[0])?,
            mediator_row("p(Z|E=1)", &p_z_e[1])?,
        ];
        let mut risks: [Vec<T>; 2] = [Vec::with_capacity(l), Vec::with_capacity(l)];
        for e in 0..2 {
            for (z, &p) in p_d1_ez[e].iter().enumerate() {
                risks[e].push(unit_interval(&format!("p(D=1|E={e},Z={z})"), p)?);
            }
        }
        Ok(Self {
            p_e1,
            p_z_e,
            p_d1_ez: risks,
        })
    }

    pub fn mediator_levels(&self) -> usize {
        self.p_z_e[0].len()
    }

    pub fn p_e1(&self) -> T {
        self.p_e1
    }

    pub fn p_e0(&self) -> T {
        T::one() - self.p_e1
    }

    pub fn p_z_given_e(&self, e: usize) -> &[T] {
        &self.p_z_e[e]
    }

    /// `p(D=1|E=e,Z=·)`.
    pub fn risks(&self, e: usize) -> &[T] {
        &self.p_d1_ez[e]
    }

    /// Total-effect observed law, `p(D=1|E=e) = Σ_z p(D=1|E=e,Z=z) p(Z=z|E=e)`.
    pub fn total_observed(&self) -> Result<ObservedBinary<T>> {
        ObservedBinary::new(
            self.p_e1,
            dot(&self.p_d1_ez[1], &self.p_z_e[1]),
            dot(&self.p_d1_ez[0], &self.p_z_e[0]),
        )
    }

    /// Largest absolute difference over every defining probability.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = (self.p_e1 - other.p_e1).abs();
        for e in 0..2 {
            for (a, b) in self.p_z_e[e].iter().zip(&other.p_z_e[e]) {
                worst = crate::scalar::max_of(worst, (*a - *b).abs());
            }
            for (a, b) in self.p_d1_ez[e].iter().zip(&other.p_d1_ez[e]) {
                worst = crate::scalar::max_of(worst, (*a - *b).abs());
            }
        }
        worst
    }
}

pub fn mediation_observed_from_joint<T: Scalar>(
    joint: &JointDEZU<T>,
) -> Result<MediationObserved<T>> {
    let l = joint.mediator_levels();
    let posteriors = [joint.p_u_given_e(0), joint.p_u_given_e(1)];
    let risks = |e: usize| -> Vec<T> {
        (0..l)
            .map(|z| dot(joint.risk_slice(e, z), &posteriors[e]))
            .collect()
    };
    MediationObserved::new(
        joint.p_e1(),
        [
            joint.p_z_given_e(0).to_vec(),
            joint.p_z_given_e(1).to_vec(),
        ],
        [risks(0), risks(1)],
    )
}

/// Plug-in mediation law from counts with a `z` column.
///
/// Mediator levels are ordered by their numeric label.
pub fn mediation_observed_from_counts<T: Scalar>(
    table: &CountTable,
) -> Result<MediationObserved<T>> {
    if !table.has_mediator() {
        return Err(Error::InvalidCount("mediation input needs a z column".into()));
    }
    if table.has_covariate() {
        return Err(Error::InvalidCount(
            "stratified mediation counts are not supported; split the table by c".into(),
        ));
    }
    let levels: Vec<u32> = table
        .rows()
        .iter()
        .filter_map(|r| r.z)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let l = levels.len();
    // cells[e][z][d]
    let mut cells = [vec![[0u64; 2]; l], vec![[0u64; 2]; l]];
    for row in table.rows() {
        let z = levels.binary_search(&row.z.expect("z column")).expect("known level");
        cells[row.e as usize][z][row.d as usize] += row.count;
    }
    let n = T::from_u64_exact;
    let arm = |e: usize| cells[e].iter().map(|c| c[0] + c[1]).sum::<u64>();
    for (e, arm_cells) in cells.iter().enumerate() {
        if arm(e) == 0 {
            return Err(Error::EmptyArm {
                stratum: "all".into(),
                missing: e as u8,
            });
        }
        if let Some(z) = arm_cells.iter().position(|c| c[0] + c[1] == 0) {
            return Err(Error::Positivity(format!(
                "no observations with E={e}, Z={}",
                levels[z]
            )));
        }
    }
    let total = n(arm(0) + arm(1));
    let p_z = |e: usize| -> Vec<T> {
        cells[e]
            .iter()
            .map(|c| n(c[0] + c[1]) / n(arm(e)))
            .collect()
    };
    let risk = |e: usize| -> Vec<T> {
        cells[e]
            .iter()
            .map(|c| n(c[1]) / n(c[0] + c[1]))
            .collect()
    };
    MediationObserved::new(n(arm(1)) / total, [p_z(0), p_z(1)], [risk(0), risk(1)])
}

/// `M* = max_{e,z} p(D=1|E=e,Z=z)`, `m* = min_{e,z} p(D=1|E=e,Z=z)`.
pub fn mediation_feasible_region<T: Scalar>(med: &MediationObserved<T>) -> FeasibleRegion<T> {
    FeasibleRegion::from_risks(med.p_d1_ez.iter().flat_map(|row| row.iter().copied()))
}

/// Per-`z` brackets on `p(D_{1z}=1)` and `p(D_{0z}=1)`.
struct Brackets<T> {
    treated_lo: Vec<T>,
    treated_hi: Vec<T>,
    control_lo: Vec<T>,
    control_hi: Vec<T>,
}

fn brackets<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
) -> Result<Brackets<T>> {
    mediation_feasible_region(med).check(sp)?;
    let (pe1, pe0) = (med.p_e1(), med.p_e0());
    let (hi, lo) = (sp.max_risk(), sp.min_risk());
    let treated = |extra: T| -> Vec<T> {
        med.p_d1_ez[1].iter().map(|&p| p * pe1 + pe0 * extra).collect()
    };
    let control = |extra: T| -> Vec<T> {
        med.p_d1_ez[0].iter().map(|&p| p * pe0 + pe1 * extra).collect()
    };
    Ok(Brackets {
        treated_lo: treated(lo),
        treated_hi: treated(hi),
        control_lo: control(lo),
        control_hi: control(hi),
    })
}

fn ratio_interval<T: Scalar>(
    num_lo: T,
    den_hi: T,
    num_hi: T,
    den_lo: T,
    what: &str,
) -> Result<Interval<T>> {
    if den_hi == T::zero() {
        return Err(Error::ZeroDenominator(format!("{what} lower bound")));
    }
    let upper = Extended::ratio(num_hi, den_lo, &format!("{what} upper bound"))?;
    Ok(Interval::raw(num_lo / den_hi, upper, Scale::RiskRatio))
}

/// Natural direct effect bounds, weighting each `z` by `p(Z=z|E=0)`.
pub fn nde_bounds<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    let br = brackets(med, sp)?;
    let w0 = med.p_z_given_e(0);
    ratio_interval(
        dot(&br.treated_lo, w0),
        dot(&br.control_hi, w0),
        dot(&br.treated_hi, w0),
        dot(&br.control_lo, w0),
        "natural direct effect",
    )
}

/// Natural indirect effect bounds: numerator weighted by `p(Z|E=1)`,
/// denominator by `p(Z|E=0)`.
pub fn nie_bounds<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    let br = brackets(med, sp)?;
    let (w0, w1) = (med.p_z_given_e(0), med.p_z_given_e(1));
    ratio_interval(
        dot(&br.treated_lo, w1),
        dot(&br.treated_hi, w0),
        dot(&br.treated_hi, w1),
        dot(&br.treated_lo, w0),
        "natural indirect effect",
    )
}

fn nested_ratio<T: Scalar>(num: T, den: T, what: &str) -> Result<T> {
    if den == T::zero() {
        return Err(Error::ZeroDenominator(what.to_string()));
    }
    Ok(num / den)
}

fn mixed_risk<T: Scalar>(joint: &JointDEZU<T>, e: usize, weights_from: usize) -> T {
    let w = joint.p_z_given_e(weights_from);
    (0..joint.mediator_levels())
        .map(|z| joint.counterfactual_risk(e, z) * w[z])
        .fold(T::zero(), |acc, x| acc + x)
}

/// `p(D_{1 Z_0}=1) / p(D_{0 Z_0}=1)`.
pub fn true_nde<T: Scalar>(joint: &JointDEZU<T>) -> Result<T> {
    nested_ratio(
        mixed_risk(joint, 1, 0),
        mixed_risk(joint, 0, 0),
        "true natural direct effect",
    )
}

/// `p(D_{1 Z_1}=1) / p(D_{1 Z_0}=1)`.
pub fn true_nie<T: Scalar>(joint: &JointDEZU<T>) -> Result<T> {
    nested_ratio(
        mixed_risk(joint, 1, 1),
        mixed_risk(joint, 1, 0),
        "true natural indirect effect",
    )
}

/// `p(D_{1 Z_1}=1) / p(D_{0 Z_0}=1)`, which equals `true_nde * true_nie`.
pub fn true_total_effect<T: Scalar>(joint: &JointDEZU<T>) -> Result<T> {
    nested_ratio(
        mixed_risk(joint, 1, 1),
        mixed_risk(joint, 0, 0),
        "true total effect",
    )
}

pub fn true_nde_rd<T: Scalar>(joint: &JointDEZU<T>) -> T {
    mixed_risk(joint, 1, 0) - mixed_risk(joint, 0, 0)
}

pub fn true_nie_rd<T: Scalar>(joint: &JointDEZU<T>) -> T {
    mixed_risk(joint, 1, 1) - mixed_risk(joint, 1, 0)
}

/// Risk-difference natural direct effect bounds.
pub fn nde_rd_bounds<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    let br = brackets(med, sp)?;
    let w0 = med.p_z_given_e(0);
    Ok(Interval::raw(
        dot(&br.treated_lo, w0) - dot(&br.control_hi, w0),
        Extended::Finite(dot(&br.treated_hi, w0) - dot(&br.control_lo, w0)),
        Scale::RiskDifference,
    ))
}

/// Risk-difference natural indirect effect bounds.
pub fn nie_rd_bounds<T: Scalar>(
    med: &MediationObserved<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    let br = brackets(med, sp)?;
    let (w0, w1) = (med.p_z_given_e(0), med.p_z_given_e(1));
    Ok(Interval::raw(
        dot(&br.treated_lo, w1) - dot(&br.treated_hi, w0),
        Extended::Finite(dot(&br.treated_hi, w1) - dot(&br.treated_lo, w0)),
        Scale::RiskDifference,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediatedEffect {
    Direct,
    Indirect,
}

/// Mediation laws conditional on a measured categorical covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedMediation<T> {
    strata: Vec<(String, T, MediationObserved<T>)>,
}

impl<T: Scalar> StratifiedMediation<T> {
    pub fn new(strata: Vec<(String, T, MediationObserved<T>)>) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::Shape("no strata".into()));
        }
        let weights: Vec<T> = strata.iter().map(|s| s.1).collect();
        let weights = crate::scalar::simplex("p(C)", &weights)?;
        Ok(Self {
            strata: strata
                .into_iter()
                .zip(weights)
                .map(|((label, _, med), w)| (label, w, med))
                .collect(),
        })
    }

    pub fn strata(&self) -> &[(String, T, MediationObserved<T>)] {
        &self.strata
    }
}

/// Risk-ratio NDE or NIE bounds within each stratum.
pub fn conditional_mediation_bounds<T: Scalar>(
    strat: &StratifiedMediation<T>,
    sp_per_stratum: &[SensitivityParams<T>],
    effect: MediatedEffect,
) -> Result<Vec<Interval<T>>> {
    if sp_per_stratum.len() != strat.strata.len() {
        return Err(Error::Shape(format!(
            "{} strata but {} parameter pairs",
            strat.strata.len(),
            sp_per_stratum.len()
        )));
    }
    strat
        .strata
        .iter()
        .zip(sp_per_stratum)
        .map(|((label, _, med), sp)| {
            match effect {
                MediatedEffect::Direct => nde_bounds(med, sp),
                MediatedEffect::Indirect => nie_bounds(med, sp),
            }
            .map_err(|e| e.in_stratum(label))
        })
        .collect()
}

/// Population bounds `(min_c LB_c, max_c UB_c)` for the NDE or NIE.
pub fn averaged_mediation_bounds<T: Scalar>(
    strat: &StratifiedMediation<T>,
    sp_per_stratum: &[SensitivityParams<T>],
    effect: MediatedEffect,
) -> Result<Interval<T>> {
    let per = conditional_mediation_bounds(strat, sp_per_stratum, effect)?;
    Ok(per[1..].iter().fold(per[0], |acc, iv| acc.hull(iv)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::bounds::{feasible_region, rr_bounds};
    use crate::distributions::{observed_from_joint, true_rr, JointDEU};
    use num_rational::Rational64;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// Reference mediation joint with `p(D=1|e,z,u) = 0.1 + 0.3e + 0.2z + 0.2u`.
    pub(crate) fn j2() -> JointDEZU<Rational64> {
        let risk = |e: i64, z: i64| -> Vec<Rational64> {
            (0..2)
                .map(|u| q(1, 10) + q(3, 10) * e + q(2, 10) * z + q(2, 10) * u)
                .collect()
        };
        JointDEZU::new(
            vec![q(1, 2), q(1, 2)],
            vec![q(1, 5), q(4, 5)],
            [vec![q(7, 10), q(3, 10)], vec![q(3, 10), q(7, 10)]],
            [vec![risk(0, 0), risk(0, 1)], vec![risk(1, 0), risk(1, 1)]],
        )
        .unwrap()
    }

    #[test]
    fn j2_observed_law() {
        let m2 = mediation_observed_from_joint(&j2()).unwrap();
        assert_eq!(m2.risks(1), &[q(56, 100), q(76, 100)]);
        assert_eq!(m2.risks(0), &[q(14, 100), q(34, 100)]);
        let region = mediation_feasible_region(&m2);
        assert_eq!((region.max_star(), region.min_star()), (q(76, 100), q(14, 100)));
    }

    #[test]
    fn j2_bounds_and_truths() {
        let j = j2();
        let m2 = mediation_observed_from_joint(&j).unwrap();
        let sp = SensitivityParams::new(q(4, 5), q(1, 10)).unwrap();
        let nde = nde_bounds(&m2, &sp).unwrap();
        assert_eq!(nde.lower(), q(36, 50));
        assert_eq!(nde.upper_finite(), Some(q(71, 15)));
        let nie = nie_bounds(&m2, &sp).unwrap();
        assert_eq!(nie.lower(), q(40, 71));
        assert_eq!(nie.upper_finite(), Some(q(75, 36)));

        assert_eq!(true_nde(&j).unwrap(), q(56, 26));
        assert_eq!(true_nie(&j).unwrap(), q(64, 56));
        assert!(nde.contains(true_nde(&j).unwrap(), q(0, 1)));
        assert!(nie.contains(true_nie(&j).unwrap(), q(0, 1)));
        assert_eq!(
            true_nde(&j).unwrap() * true_nie(&j).unwrap(),
            true_total_effect(&j).unwrap()
        );
    }

    #[test]
    fn tightest_feasible_point_still_contains_null() {
        let m2 = mediation_observed_from_joint(&j2()).unwrap();
        let sp = SensitivityParams::new(q(76, 100), q(14, 100)).unwrap();
        assert!(nde_bounds(&m2, &sp).unwrap().contains(q(1, 1), q(0, 1)));
    }

    #[test]
    fn infeasible_mediation_params() {
        let m2 = mediation_observed_from_joint(&j2()).unwrap();
        let sp = SensitivityParams::new(q(7, 10), q(1, 10)).unwrap();
        assert!(matches!(nde_bounds(&m2, &sp), Err(Error::InfeasibleParams { .. })));
        assert!(matches!(nie_bounds(&m2, &sp), Err(Error::InfeasibleParams { .. })));
    }

    fn collapsed(joint: &JointDEU<f64>) -> JointDEZU<f64> {
        let k = joint.levels();
        JointDEZU::new(
            joint.p_u().to_vec(),
            joint.p_e1_u().to_vec(),
            [vec![1.0], vec![1.0]],
            [vec![joint.risk_slice(0).to_vec()], vec![joint.risk_slice(1).to_vec()]],
        )
        .inspect(|j| assert_eq!(j.confounder_levels(), k))
        .unwrap()
    }

    #[test]
    fn single_mediator_level_reduces_to_total_effect() {
        for seed in 0..200 {
            let joint = crate::distributions::random_joint(seed, 3);
            let med_joint = collapsed(&joint);
            let med = mediation_observed_from_joint(&med_joint).unwrap();
            let obs = observed_from_joint(&joint).unwrap();
            assert_eq!(med.risks(1)[0], obs.p_d1_e1());
            assert_eq!(med.risks(0)[0], obs.p_d1_e0());
            let region = mediation_feasible_region(&med);
            assert_eq!(region, feasible_region(&obs));
            let sp = crate::distributions::true_sens_params(&joint);
            assert_eq!(nde_bounds(&med, &sp).unwrap(), rr_bounds(&obs, &sp).unwrap());
            assert_eq!(true_nde(&med_joint).unwrap(), true_rr(&joint).unwrap());
        }
    }

    #[test]
    fn no_mediated_path_with_collapsed_params() {
        let med = MediationObserved::new(
            0.4,
            [vec![0.3, 0.7], vec![0.3, 0.7]],
            [vec![0.25, 0.25], vec![0.25, 0.25]],
        )
        .unwrap();
        let sp = SensitivityParams::new(0.25, 0.25).unwrap();
        let nie = nie_bounds(&med, &sp).unwrap();
        assert!((nie.lower() - 1.0_f64).abs() < 1e-15);
        assert!((nie.upper_f64() - 1.0).abs() < 1e-15);

        let single =
            MediationObserved::new(0.4, [vec![1.0], vec![1.0]], [vec![0.3], vec![0.3]]).unwrap();
        let sp = SensitivityParams::new(0.3, 0.3).unwrap();
        let nie = nie_bounds(&single, &sp).unwrap();
        assert_eq!((nie.lower(), nie.upper_f64()), (1.0, 1.0));
    }

    #[test]
    fn null_effects_on_joints() {
        let risk = vec![0.2, 0.6];
        let no_direct = JointDEZU::new(
            vec![0.5, 0.5],
            vec![0.3, 0.6],
            [vec![0.4, 0.6], vec![0.2, 0.8]],
            [vec![risk.clone(), vec![0.3, 0.5]], vec![risk, vec![0.3, 0.5]]],
        )
        .unwrap();
        assert!((true_nde(&no_direct).unwrap() - 1.0_f64).abs() < 1e-15);
        let no_mediation = JointDEZU::new(
            vec![0.5, 0.5],
            vec![0.3, 0.6],
            [vec![0.4, 0.6], vec![0.4, 0.6]],
            [vec![vec![0.1, 0.2], vec![0.3, 0.5]], vec![vec![0.2, 0.4], vec![0.6, 0.7]]],
        )
        .unwrap();
        assert_eq!(true_nie(&no_mediation).unwrap(), 1.0);
    }

    #[test]
    fn unconfounded_observed_risks_average_over_u() {
        let j = JointDEZU::new(
            vec![0.25, 0.75],
            vec![0.5, 0.5],
            [vec![0.5, 0.5], vec![0.2, 0.8]],
            [vec![vec![0.1, 0.3], vec![0.2, 0.6]], vec![vec![0.4, 0.8], vec![0.5, 0.9]]],
        )
        .unwrap();
        let med = mediation_observed_from_joint(&j).unwrap();
        assert!((med.risks(0)[1] - (0.25_f64 * 0.2 + 0.75 * 0.6)).abs() < 1e-15);
        assert!((med.risks(1)[0] - (0.25_f64 * 0.4 + 0.75 * 0.8)).abs() < 1e-15);
    }

    #[test]
    fn counts_with_mediator() {
        let csv = "z,e,d,count\n0,0,1,7\n0,0,0,63\n1,0,1,6\n1,0,0,24\n0,1,1,9\n0,1,0,21\n1,1,1,42\n1,1,0,28\n";
        let table = CountTable::from_csv_reader(csv.as_bytes()).unwrap();
        let med: MediationObserved<Rational64> = mediation_observed_from_counts(&table).unwrap();
        assert_eq!(med.p_e1(), q(1, 2));
        assert_eq!(med.p_z_given_e(0), &[q(7, 10), q(3, 10)]);
        assert_eq!(med.risks(0), &[q(1, 10), q(1, 5)]);
        assert_eq!(med.risks(1), &[q(3, 10), q(3, 5)]);

        let no_z = CountTable::from_csv_reader("e,d,count\n1,1,1\n0,0,1\n".as_bytes()).unwrap();
        assert!(mediation_observed_from_counts::<f64>(&no_z).is_err());
        let hole = "z,e,d,count\n0,0,1,7\n1,0,0,3\n0,1,1,9\n".as_bytes();
        let hole = CountTable::from_csv_reader(hole).unwrap();
        assert!(matches!(
            mediation_observed_from_counts::<f64>(&hole),
            Err(Error::Positivity(_))
        ));
    }

    #[test]
    fn json_input_is_validated() {
        let ok = r#"{"p_e1": 0.5, "p_z_e": [[0.7, 0.3], [0.3, 0.7]], "p_d1_ez": [[0.14, 0.34], [0.56, 0.76]]}"#;
        let med: MediationObserved<f64> = serde_json::from_str(ok).unwrap();
        assert_eq!(med.mediator_levels(), 2);
        let bad = r#"{"p_e1": 0.5, "p_z_e": [[0.7, 0.2], [0.3, 0.7]], "p_d1_ez": [[0.1, 0.3], [0.5, 0.7]]}"#;
        assert!(serde_json::from_str::<MediationObserved<f64>>(bad).is_err());
    }
}
