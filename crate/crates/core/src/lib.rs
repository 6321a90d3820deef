//! Sharp bounds on causal effects under unmeasured confounding.
//!
//! Given the observed law of a binary exposure `E` and outcome `D`, and two
//! sensitivity parameters `M` and `m` bounding `p(D=1|E,U)` over the
//! unmeasured confounder `U`, the crate computes arbitrarily sharp bounds on
//! the causal risk ratio and risk difference, covariate-stratified versions,
//! and bounds on natural direct and indirect effects through a measured
//! mediator. Comparator methods (bounding-factor bounds and the E-value,
//! parameter-free bounds, Manski's bounds), near-attaining witness
//! distributions, and a logistic-model simulation harness are included.
//!
//! Every bound is generic over [`Scalar`], so the same code runs in `f64` and
//! in exact rational arithmetic. Aliases for both are defined below.
//!
//! ```
//! use sensbound::{rr_bounds, Observed64, Params64};
//!
//! let obs = Observed64::new(0.5, 0.54, 0.16).unwrap();
//! let sp = Params64::new(0.6, 0.1).unwrap();
//! let iv = rr_bounds(&obs, &sp).unwrap();
//! assert!((iv.lower() - 0.842105).abs() < 1e-6);
//! assert!((iv.upper_f64() - 4.384615).abs() < 1e-6);
//! ```

pub mod bounds;
pub mod comparators;
pub mod distributions;
mod error;
pub mod interval;
pub mod mediation;
mod scalar;
pub mod sharpness;
pub mod simulation;

pub use bounds::{
    averaged_rr_bounds, bounds_grid, conditional_rr_bounds, feasible_region, rd_bounds,
    rr_bounds, FeasibleRegion, GridRow, SensitivityParams,
};
pub use comparators::{
    as_bounds_rd, as_bounds_rr, compare_methods, dv_bounds, dv_params_from_joint, e_value,
    manski_rd_bounds, Comparison, DvParams, ManskiSupports, MethodInterval,
};
pub use distributions::{
    observed_from_counts, observed_from_joint, true_rd, true_rr, true_sens_params, CountTable,
    JointDEU, JointDEZU, Observed, ObservedBinary, StratifiedJoint, StratifiedObserved, Stratum,
};
pub use error::{Error, Result};
pub use interval::{Extended, Interval, Scale};
pub use mediation::{
    mediation_feasible_region, mediation_observed_from_counts, mediation_observed_from_joint,
    nde_bounds, nie_bounds, true_nde, true_nie, MediationObserved,
};
pub use scalar::Scalar;
pub use sharpness::{
    nde_witness, rd_witness, rr_witness, sharpness_sweep, Target, WitnessReport, WitnessScale,
    WitnessSpec,
};

/// Exact rational scalar.
pub type Exact = num_rational::Rational64;

pub type Observed64 = ObservedBinary<f64>;
pub type Joint64 = JointDEU<f64>;
pub type MediationJoint64 = JointDEZU<f64>;
pub type MediationObserved64 = MediationObserved<f64>;
pub type Params64 = SensitivityParams<f64>;
pub type DvParams64 = DvParams<f64>;
pub type Interval64 = Interval<f64>;

pub type ObservedExact = ObservedBinary<Exact>;
pub type JointExact = JointDEU<Exact>;
pub type MediationObservedExact = MediationObserved<Exact>;
pub type ParamsExact = SensitivityParams<Exact>;
pub type IntervalExact = Interval<Exact>;
