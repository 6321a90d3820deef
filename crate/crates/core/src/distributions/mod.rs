//! Probability laws over exposure `E`, outcome `D`, confounder `U` and
//! mediator `Z`, plus exact oracles for the (normally unidentifiable) causal
//! quantities of a fully specified joint.
//!
//! Every type validates on construction and is immutable afterwards.

mod counts;
mod random;

pub use counts::{observed_from_counts, CountRow, CountTable, Observed};
pub use random::{random_joint, random_mediation_joint, random_stratified_joint};

use serde::{Deserialize, Serialize};

use crate::bounds::SensitivityParams;
use crate::interval::Extended;
use crate::scalar::{max_of, min_of, simplex, unit_interval, Scalar};
use crate::{Error, Result};

/// Sum of element-wise products.
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn strictly_inside<T: Scalar>(name: &str, value: T) -> Result<T> {
    let v = unit_interval(name, value)?;
    if v <= T::zero() || v >= T::one() {
        return Err(Error::Positivity(format!(
            "{name} = {} must lie strictly inside (0, 1)",
            v.to_f64_lossy()
        )));
    }
    Ok(v)
}

/// Observed law of a binary exposure and binary outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObserved<T>", bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ObservedBinary<T> {
    p_e1: T,
    p_d1_e1: T,
    p_d1_e0: T,
}

#[derive(Deserialize)]
struct RawObserved<T> {
    p_e1: T,
    p_d1_e1: T,
    p_d1_e0: T,
}

impl<T: Scalar> TryFrom<RawObserved<T>> for ObservedBinary<T> {
    type Error = Error;
    fn try_from(raw: RawObserved<T>) -> Result<Self> {
        Self::new(raw.p_e1, raw.p_d1_e1, raw.p_d1_e0)
    }
}

impl<T: Scalar> ObservedBinary<T> {
    /// `p_e1 = p(E=1)`, `p_d1_e1 = p(D=1|E=1)`, `p_d1_e0 = p(D=1|E=0)`.
    pub fn new(p_e1: T, p_d1_e1: T, p_d1_e0: T) -> Result<Self> {
        Ok(Self {
            p_e1: strictly_inside("p(E=1)", p_e1)?,
            p_d1_e1: unit_interval("p(D=1|E=1)", p_d1_e1)?,
            p_d1_e0: unit_interval("p(D=1|E=0)", p_d1_e0)?,
        })
    }

    pub fn p_e1(&self) -> T {
        self.p_e1
    }

    pub fn p_e0(&self) -> T {
        T::one() - self.p_e1
    }

    pub fn p_e(&self, e: usize) -> T {
        if e == 1 {
            self.p_e1
        } else {
            self.p_e0()
        }
    }

    /// `p(D=1|E=e)`.
    pub fn risk(&self, e: usize) -> T {
        if e == 1 {
            self.p_d1_e1
        } else {
            self.p_d1_e0
        }
    }

    pub fn p_d1_e1(&self) -> T {
        self.p_d1_e1
    }

    pub fn p_d1_e0(&self) -> T {
        self.p_d1_e0
    }

    /// `p(D=1, E=1)`.
    pub fn p_d1_and_e1(&self) -> T {
        self.p_d1_e1 * self.p_e1
    }

    /// `p(D=1, E=0)`.
    pub fn p_d1_and_e0(&self) -> T {
        self.p_d1_e0 * self.p_e0()
    }

    /// `p(D=1|E=1) / p(D=1|E=0)`; `+inf` when only the baseline risk is zero.
    pub fn rr_obs(&self) -> Result<Extended<T>> {
        Extended::ratio(self.p_d1_e1, self.p_d1_e0, "observed risk ratio")
    }

    pub fn rd_obs(&self) -> T {
        self.p_d1_e1 - self.p_d1_e0
    }

    pub fn to_f64(&self) -> ObservedBinary<f64> {
        ObservedBinary {
            p_e1: self.p_e1.to_f64_lossy(),
            p_d1_e1: self.p_d1_e1.to_f64_lossy(),
            p_d1_e0: self.p_d1_e0.to_f64_lossy(),
        }
    }

    /// Largest absolute difference between the three defining probabilities.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            self.p_e1 - other.p_e1,
            self.p_d1_e1 - other.p_d1_e1,
            self.p_d1_e0 - other.p_d1_e0,
        ]
        .into_iter()
        .fold(T::zero(), |acc, d| max_of(acc, d.abs()))
    }
}

/// Full joint law `p(U) p(E|U) p(D|E,U)` over a categorical confounder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDEU<T> {
    p_u: Vec<T>,
    p_e1_u: Vec<T>,
    /// Indexed `[e][u]`.
    p_d1_eu: [Vec<T>; 2],
}

impl<T: Scalar> JointDEU<T> {
    pub fn new(p_u: Vec<T>, p_e1_u: Vec<T>, p_d1_eu: [Vec<T>; 2]) -> Result<Self> {
        let k = p_u.len();
        if p_e1_u.len() != k || p_d1_eu.iter().any(|row| row.len() != k) {
            return Err(Error::Shape(format!(
                "joint over {k} confounder levels has mismatched conditional lengths"
            )));
        }
        let p_u = simplex("p(U)", &p_u)?;
        let p_e1_u = check_exposure_given_u(&p_u, &p_e1_u)?;
        let p_d1_eu = [
            unit_vec("p(D=1|E=0,U)", &p_d1_eu[0])?,
            unit_vec("p(D=1|E=1,U)", &p_d1_eu[1])?,
        ];
        Ok(Self {
            p_u,
            p_e1_u,
            p_d1_eu,
        })
    }

    pub fn levels(&self) -> usize {
        self.p_u.len()
    }

    pub fn p_u(&self) -> &[T] {
        &self.p_u
    }

    pub fn p_e1_u(&self) -> &[T] {
        &self.p_e1_u
    }

    /// `p(D=1|E=e,U=·)`.
    pub fn risk_slice(&self, e: usize) -> &[T] {
        &self.p_d1_eu[e]
    }

    pub fn p_e1(&self) -> T {
        dot(&self.p_u, &self.p_e1_u)
    }

    /// `p(U=·|E=e)` by Bayes' rule.
    pub fn p_u_given_e(&self, e: usize) -> Vec<T> {
        posterior_u(&self.p_u, &self.p_e1_u, e)
    }

    /// `Σ_u p(D=1|E=e,U=u) p(U=u)`, the interventional risk `p(D_e=1)`.
    pub fn counterfactual_risk(&self, e: usize) -> T {
        dot(&self.p_d1_eu[e], &self.p_u)
    }

    fn mass_bearing(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.levels()).filter(|&u| self.p_u[u] > T::zero())
    }

    pub fn to_f64(&self) -> JointDEU<f64> {
        JointDEU {
            p_u: to_f64_vec(&self.p_u),
            p_e1_u: to_f64_vec(&self.p_e1_u),
            p_d1_eu: [to_f64_vec(&self.p_d1_eu[0]), to_f64_vec(&self.p_d1_eu[1])],
        }
    }
}

fn to_f64_vec<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn unit_vec<T: Scalar>(name: &str, v: &[T]) -> Result<Vec<T>> {
    v.iter()
        .enumerate()
        .map(|(i, &x)| unit_interval(&format!("{name}[{i}]"), x))
        .collect()
}

fn check_exposure_given_u<T: Scalar>(p_u: &[T], p_e1_u: &[T]) -> Result<Vec<T>> {
    p_e1_u
        .iter()
        .enumerate()
        .map(|(u, &p)| {
            let p = unit_interval(&format!("p(E=1|U={u})"), p)?;
            if p_u[u] > T::zero() && (p <= T::zero() || p >= T::one()) {
                return Err(Error::Positivity(format!(
                    "p(E=1|U={u}) = {} for a confounder level with positive mass",
                    p.to_f64_lossy()
                )));
            }
            Ok(p)
        })
        .collect()
}

fn posterior_u<T: Scalar>(p_u: &[T], p_e1_u: &[T], e: usize) -> Vec<T> {
    let lik: Vec<T> = p_e1_u
        .iter()
        .map(|&p| if e == 1 { p } else { T::one() - p })
        .collect();
    let p_e = dot(p_u, &lik);
    p_u.iter().zip(&lik).map(|(&pu, &l)| pu * l / p_e).collect()
}

/// Full joint law for the mediation graph `U -> E`, `U -> D`, `E -> Z -> D`,
/// `E -> D`. `Z` is independent of `U` given `E` by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDEZU<T> {
    p_u: Vec<T>,
    p_e1_u: Vec<T>,
    /// Indexed `[e][z]`.
    p_z_e: [Vec<T>; 2],
    /// Indexed `[e][z][u]`.
    p_d1_ezu: [Vec<Vec<T>>; 2],
}

impl<T: Scalar> JointDEZU<T> {
    pub fn new(
        p_u: Vec<T>,
        p_e1_u: Vec<T>,
        p_z_e: [Vec<T>; 2],
        p_d1_ezu: [Vec<Vec<T>>; 2],
    ) -> Result<Self> {
        let k = p_u.len();
        let l = p_z_e[0].len();
        let shape_ok = p_e1_u.len() == k
            && p_z_e[1].len() == l
            && p_d1_ezu
                .iter()
                .all(|by_z| by_z.len() == l && by_z.iter().all(|by_u| by_u.len() == k));
        if !shape_ok {
            return Err(Error::Shape(format!(
                "mediation joint expects {k} confounder and {l} mediator levels throughout"
            )));
        }
        let p_u = simplex("p(U)", &p_u)?;
        let p_e1_u = check_exposure_given_u(&p_u, &p_e1_u)?;
        let p_z_e = [
            mediator_row("p(Z|E=0)", &p_z_e[0])?,
            mediator_row("p(Z|E=1)", &p_z_e[1])?,
        ];
        let mut risks: [Vec<Vec<T>>; 2] = [Vec::with_capacity(l), Vec::with_capacity(l)];
        for (e, by_z) in p_d1_ezu.iter().enumerate() {
            for (z, by_u) in by_z.iter().enumerate() {
                risks[e].push(unit_vec(&format!("p(D=1|E={e},Z={z},U)"), by_u)?);
            }
        }
        Ok(Self {
            p_u,
            p_e1_u,
            p_z_e,
            p_d1_ezu: risks,
        })
    }

    pub fn confounder_levels(&self) -> usize {
        self.p_u.len()
    }

    pub fn mediator_levels(&self) -> usize {
        self.p_z_e[0].len()
    }

    pub fn p_u(&self) -> &[T] {
        &self.p_u
    }

    pub fn p_e1_u(&self) -> &[T] {
        &self.p_e1_u
    }

    /// `p(Z=·|E=e)`.
    pub fn p_z_given_e(&self, e: usize) -> &[T] {
        &self.p_z_e[e]
    }

    /// `p(D=1|E=e,Z=z,U=·)`.
    pub fn risk_slice(&self, e: usize, z: usize) -> &[T] {
        &self.p_d1_ezu[e][z]
    }

    pub fn p_e1(&self) -> T {
        dot(&self.p_u, &self.p_e1_u)
    }

    pub fn p_u_given_e(&self, e: usize) -> Vec<T> {
        posterior_u(&self.p_u, &self.p_e1_u, e)
    }

    /// `p(D_{ez}=1) = Σ_u p(D=1|E=e,Z=z,U=u) p(U=u)`.
    pub fn counterfactual_risk(&self, e: usize, z: usize) -> T {
        dot(&self.p_d1_ezu[e][z], &self.p_u)
    }

    /// Largest and smallest `p(D=1|E,Z,U)` over mass-bearing confounder levels.
    pub fn true_sens_params(&self) -> SensitivityParams<T> {
        let mut hi = None;
        let mut lo = None;
        for by_z in &self.p_d1_ezu {
            for by_u in by_z {
                for (u, &p) in by_u.iter().enumerate() {
                    if self.p_u[u] > T::zero() {
                        hi = Some(hi.map_or(p, |h| max_of(h, p)));
                        lo = Some(lo.map_or(p, |l| min_of(l, p)));
                    }
                }
            }
        }
        SensitivityParams::new(hi.expect("mass-bearing level"), lo.expect("mass-bearing level"))
            .expect("risks lie in [0, 1]")
    }

    pub fn to_f64(&self) -> JointDEZU<f64> {
        JointDEZU {
            p_u: to_f64_vec(&self.p_u),
            p_e1_u: to_f64_vec(&self.p_e1_u),
            p_z_e: [to_f64_vec(&self.p_z_e[0]), to_f64_vec(&self.p_z_e[1])],
            p_d1_ezu: [
                self.p_d1_ezu[0].iter().map(|v| to_f64_vec(v)).collect(),
                self.p_d1_ezu[1].iter().map(|v| to_f64_vec(v)).collect(),
            ],
        }
    }
}

pub(crate) fn mediator_row<T: Scalar>(name: &str, row: &[T]) -> Result<Vec<T>> {
    let row = simplex(name, row)?;
    if let Some(z) = row.iter().position(|&p| p <= T::zero()) {
        return Err(Error::Positivity(format!("{name} has zero mass at Z={z}")));
    }
    Ok(row)
}

/// One covariate stratum `C = c` of an observed law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum<T> {
    pub label: String,
    pub weight: T,
    pub observed: ObservedBinary<T>,
}

/// Observed laws conditional on a measured categorical covariate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratifiedObserved<T> {
    strata: Vec<Stratum<T>>,
}

impl<T: Scalar> StratifiedObserved<T> {
    pub fn new(strata: Vec<Stratum<T>>) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::Shape("no strata".into()));
        }
        let weights: Vec<T> = strata.iter().map(|s| s.weight).collect();
        let weights = simplex("p(C)", &weights)?;
        let strata = strata
            .into_iter()
            .zip(weights)
            .map(|(s, weight)| Stratum { weight, ..s })
            .collect();
        Ok(Self { strata })
    }

    pub fn strata(&self) -> &[Stratum<T>] {
        &self.strata
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Observed law after marginalizing the covariate.
    pub fn pooled(&self) -> Result<ObservedBinary<T>> {
        let mut p_e1 = T::zero();
        let mut d1e1 = T::zero();
        let mut d1e0 = T::zero();
        for s in &self.strata {
            p_e1 = p_e1 + s.weight * s.observed.p_e1();
            d1e1 = d1e1 + s.weight * s.observed.p_d1_and_e1();
            d1e0 = d1e0 + s.weight * s.observed.p_d1_and_e0();
        }
        ObservedBinary::new(p_e1, d1e1 / p_e1, d1e0 / (T::one() - p_e1))
    }
}

/// A full joint per covariate stratum, used as a ground-truth oracle for
/// stratum-conditional and covariate-averaged bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedJoint<T> {
    pub strata: Vec<(String, T, JointDEU<T>)>,
}

impl<T: Scalar> StratifiedJoint<T> {
    pub fn observed(&self) -> Result<StratifiedObserved<T>> {
        StratifiedObserved::new(
            self.strata
                .iter()
                .map(|(label, weight, joint)| {
                    Ok(Stratum {
                        label: label.clone(),
                        weight: *weight,
                        observed: observed_from_joint(joint)?,
                    })
                })
                .collect::<Result<_>>()?,
        )
    }

    pub fn sens_params(&self) -> Vec<SensitivityParams<T>> {
        self.strata.iter().map(|(_, _, j)| true_sens_params(j)).collect()
    }

    /// Whole-population `p(D_1=1) / p(D_0=1)`.
    pub fn true_rr(&self) -> Result<T> {
        let (num, den) = self.strata.iter().fold((T::zero(), T::zero()), |(n, d), (_, w, j)| {
            (n + *w * j.counterfactual_risk(1), d + *w * j.counterfactual_risk(0))
        });
        if den == T::zero() {
            return Err(Error::ZeroDenominator("population true risk ratio".into()));
        }
        Ok(num / den)
    }
}

/// Observed law implied by a full joint.
pub fn observed_from_joint<T: Scalar>(joint: &JointDEU<T>) -> Result<ObservedBinary<T>> {
    let p_e1 = joint.p_e1();
    let risk = |e: usize| dot(joint.risk_slice(e), &joint.p_u_given_e(e));
    ObservedBinary::new(p_e1, risk(1), risk(0))
}

/// `Σ_u p(D=1|1,u)p(u) / Σ_u p(D=1|0,u)p(u)`.
pub fn true_rr<T: Scalar>(joint: &JointDEU<T>) -> Result<T> {
    let den = joint.counterfactual_risk(0);
    if den == T::zero() {
        return Err(Error::ZeroDenominator("true risk ratio baseline".into()));
    }
    Ok(joint.counterfactual_risk(1) / den)
}

pub fn true_rd<T: Scalar>(joint: &JointDEU<T>) -> T {
    joint.counterfactual_risk(1) - joint.counterfactual_risk(0)
}

/// Max and min of `p(D=1|E=e,U=u)` over `e` and mass-bearing `u`.
pub fn true_sens_params<T: Scalar>(joint: &JointDEU<T>) -> SensitivityParams<T> {
    let mut values = joint
        .mass_bearing()
        .flat_map(|u| [joint.p_d1_eu[0][u], joint.p_d1_eu[1][u]]);
    let first = values.next().expect("at least one mass-bearing level");
    let (hi, lo) = values.fold((first, first), |(h, l), p| (max_of(h, p), min_of(l, p)));
    SensitivityParams::new(hi, lo).expect("risks lie in [0, 1]")
}
