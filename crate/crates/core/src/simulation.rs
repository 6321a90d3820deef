//! Monte Carlo comparison of the two-parameter, parameter-free and
//! bounding-factor bounds over logistic generative models:
//!
//! ```text
//! p(E=1)     = expit(φ)
//! p(U=1|E)   = expit(α + βE)
//! p(D=1|E,U) = expit(γ + δE + ψU)
//! ```
//!
//! with `β, δ, ψ ~ N(0, σ²)` and the intercepts calibrated to target marginals.
//!
//! Replicate `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`.
//! Uniforms are `((x >> 11) + 0.5) / 2^53` for successive 64-bit outputs `x`,
//! and normals are obtained from them by the inverse standard normal CDF, in
//! the order `β, δ, ψ`. Replicates are reduced in index order, so summaries
//! are bit-identical for any number of workers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{rr_bounds, SensitivityParams};
use crate::comparators::{as_bounds_rr, dv_bounds, dv_params_from_joint, DvParams};
use crate::distributions::{observed_from_joint, true_rr, true_sens_params, JointDEU};
use crate::interval::Interval;
use crate::scalar::{max_of, min_of, Scalar};
use crate::{Error, Result};

pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let z = x.exp();
        z / (1.0 + z)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Residual tolerance for calibrated marginals.
pub const CALIBRATION_TOLERANCE: f64 = 1e-12;

const BRACKET: (f64, f64) = (-60.0, 60.0);

/// Root of the increasing function `f` at `target` on `[lo, hi]`.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    target: f64,
    (mut lo, mut hi): (f64, f64),
    tol: f64,
    what: &str,
) -> Result<f64> {
    if f(lo) - target > tol || f(hi) - target < -tol {
        return Err(Error::BracketFailure(what.to_string()));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let r = f(mid) - target;
        if r.abs() <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            return Err(Error::BracketFailure(format!(
                "{what}: residual {r:e} at machine resolution"
            )));
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Log-odds coefficients of the generative model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticModel {
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub psi: f64,
}

/// Target marginals `p(U=1)`, `p(E=1)` and `p(D=1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Targets {
    pub p_u1: f64,
    pub p_e1: f64,
    pub p_d1: f64,
}

impl Targets {
    pub fn new(p_u1: f64, p_e1: f64, p_d1: f64) -> Result<Self> {
        for (name, p) in [("p(U=1)", p_u1), ("p(E=1)", p_e1), ("p(D=1)", p_d1)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "target {name} = {p} must lie in (0, 1)"
                )));
            }
        }
        Ok(Self { p_u1, p_e1, p_d1 })
    }
}

fn p_u1_marginal(alpha: f64, beta: f64, p_e1: f64) -> f64 {
    expit(alpha + beta) * p_e1 + expit(alpha) * (1.0 - p_e1)
}

fn p_d1_marginal(gamma: f64, alpha: f64, beta: f64, delta: f64, psi: f64, p_e1: f64) -> f64 {
    (0..2)
        .map(|e| {
            let e_f = e as f64;
            let p_e = if e == 1 { p_e1 } else { 1.0 - p_e1 };
            let p_u1 = expit(alpha + beta * e_f);
            let risk = |u: f64| expit(gamma + delta * e_f + psi * u);
            (risk(1.0) * p_u1 + risk(0.0) * (1.0 - p_u1)) * p_e
        })
        .sum()
}

/// Intercepts `(φ, α, γ)` reproducing the target marginals.
pub fn calibrate(targets: &Targets, beta: f64, delta: f64, psi: f64) -> Result<LogisticModel> {
    for (name, v) in [("beta", beta), ("delta", delta), ("psi", psi)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
        }
    }
    let phi = logit(targets.p_e1);
    let alpha = bisect(
        |a| p_u1_marginal(a, beta, targets.p_e1),
        targets.p_u1,
        BRACKET,
        CALIBRATION_TOLERANCE,
        "alpha",
    )?;
    let gamma = bisect(
        |g| p_d1_marginal(g, alpha, beta, delta, psi, targets.p_e1),
        targets.p_d1,
        BRACKET,
        CALIBRATION_TOLERANCE,
        "gamma",
    )?;
    Ok(LogisticModel {
        phi,
        alpha,
        beta,
        gamma,
        delta,
        psi,
    })
}

impl LogisticModel {
    /// Marginals `(p(U=1), p(E=1), p(D=1))` implied by the model.
    pub fn marginals(&self) -> (f64, f64, f64) {
        let p_e1 = expit(self.phi);
        (
            p_u1_marginal(self.alpha, self.beta, p_e1),
            p_e1,
            p_d1_marginal(self.gamma, self.alpha, self.beta, self.delta, self.psi, p_e1),
        )
    }
}

/// Binary-confounder joint of a logistic model, with `p(U)` and `p(E=1|U)`
/// obtained from `p(E)` and `p(U|E)` by Bayes' rule.
pub fn joint_from_logistic(model: &LogisticModel) -> Result<JointDEU<f64>> {
    let p_e1 = expit(model.phi);
    let p_e0 = 1.0 - p_e1;
    let u1_e1 = expit(model.alpha + model.beta);
    let u1_e0 = expit(model.alpha);
    let p_u1 = u1_e1 * p_e1 + u1_e0 * p_e0;
    let p_u0 = 1.0 - p_u1;
    let p_e1_u = vec![(1.0 - u1_e1) * p_e1 / p_u0, u1_e1 * p_e1 / p_u1];
    let risk = |e: f64, u: f64| expit(model.gamma + model.delta * e + model.psi * u);
    JointDEU::new(
        vec![p_u0, p_u1],
        p_e1_u,
        [
            vec![risk(0.0, 0.0), risk(0.0, 1.0)],
            vec![risk(1.0, 0.0), risk(1.0, 1.0)],
        ],
    )
}

/// `(min(1, (1+f) M), max(0, (1-f) m))`, and each bounding-factor ratio
/// multiplied by `1 + f`.
pub fn conservative_adjust<T: Scalar>(
    sp: &SensitivityParams<T>,
    dp: &DvParams<T>,
    f: T,
) -> Result<(SensitivityParams<T>, DvParams<T>)> {
    if f < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "conservative factor {} must be nonnegative",
            f.to_f64_lossy()
        )));
    }
    let one = T::one();
    let sp = SensitivityParams::new(
        min_of(one, sp.max_risk() * (one + f)),
        max_of(T::zero(), sp.min_risk() * (one - f)),
    )?;
    Ok((sp, dp.scaled(one + f)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    /// Standard deviation of `β`, `δ` and `ψ`.
    pub sigma: f64,
    pub targets: Targets,
    pub reps: u64,
    pub seed: u64,
    /// Relative inflation of the sensitivity parameters; 0 uses the true ones.
    pub conservative_factor: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {} must be positive",
                self.sigma
            )));
        }
        Targets::new(self.targets.p_u1, self.targets.p_e1, self.targets.p_d1)?;
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if !(self.conservative_factor >= 0.0 && self.conservative_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "conservative factor {} must be nonnegative",
                self.conservative_factor
            )));
        }
        Ok(())
    }
}

/// Tightness and distance metrics for one bound side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SideMetrics {
    /// Share of replicates where the parameter-free bound is tighter than DV's.
    pub ptilde: f64,
    /// Share of replicates where the two-parameter bound is tighter than DV's.
    pub pbar: f64,
    /// Mean `|log bound - log RR_true|` for the parameter-free bound.
    pub dtilde: f64,
    /// The same for the two-parameter bound.
    pub dbar: f64,
    /// The same for DV's bound.
    pub d: f64,
}

/// Replicates whose true risk ratio lies inside each method's interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Containment {
    pub parameter_free: u64,
    pub two_param: u64,
    pub bounding_factor: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSummary {
    pub config: SimConfig,
    pub replicates: u64,
    pub lower: SideMetrics,
    pub upper: SideMetrics,
    pub containment: Containment,
}

/// Column names of [`SimSummary::csv_fields`].
pub const CSV_HEADER: [&str; 15] = [
    "pu", "pe", "pd", "sigma", "f", "ptilde_lo", "pbar_lo", "dtilde_lo", "dbar_lo", "d_lo",
    "ptilde_hi", "pbar_hi", "dtilde_hi", "dbar_hi", "d_hi",
];

impl SimSummary {
    pub fn csv_fields(&self) -> [f64; 15] {
        let c = &self.config;
        let (lo, hi) = (&self.lower, &self.upper);
        [
            c.targets.p_u1,
            c.targets.p_e1,
            c.targets.p_d1,
            c.sigma,
            c.conservative_factor,
            lo.ptilde,
            lo.pbar,
            lo.dtilde,
            lo.dbar,
            lo.d,
            hi.ptilde,
            hi.pbar,
            hi.dtilde,
            hi.dbar,
            hi.d,
        ]
    }
}

/// Everything one replicate contributes to the summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    pub true_rr: f64,
    pub parameter_free: Interval<f64>,
    pub two_param: Interval<f64>,
    pub bounding_factor: Interval<f64>,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// The calibrated model for replicate `index`.
pub fn replicate_model(config: &SimConfig, index: u64) -> Result<LogisticModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let normal = Normal::standard();
    let mut draw = || config.sigma * normal.inverse_cdf(uniform(&mut rng));
    let beta = draw();
    let delta = draw();
    let psi = draw();
    calibrate(&config.targets, beta, delta, psi)
}

pub fn run_replicate(config: &SimConfig, index: u64) -> Result<ReplicateOutcome> {
    let model = replicate_model(config, index)?;
    let joint = joint_from_logistic(&model)?;
    let obs = observed_from_joint(&joint)?;
    let rr_obs = obs.rr_obs()?.finite().ok_or_else(|| {
        Error::ZeroDenominator("observed risk ratio is infinite".into())
    })?;
    let truth = true_rr(&joint)?;
    let (sp, dp) = conservative_adjust(
        &true_sens_params(&joint),
        &dv_params_from_joint(&joint)?,
        config.conservative_factor,
    )?;
    let outcome = ReplicateOutcome {
        true_rr: truth,
        parameter_free: as_bounds_rr(&obs)?,
        two_param: rr_bounds(&obs, &sp)?,
        bounding_factor: dv_bounds(rr_obs, &dp)?,
    };
    let finite = [outcome.parameter_free, outcome.two_param, outcome.bounding_factor]
        .iter()
        .all(|iv| iv.upper().is_finite() && iv.lower() > 0.0)
        && truth.is_finite()
        && truth > 0.0;
    if !finite {
        return Err(Error::ZeroDenominator(
            "replicate produced a non-finite or zero bound".into(),
        ));
    }
    Ok(outcome)
}

/// Runs every replicate on the current thread.
pub fn run_comparison(config: &SimConfig) -> Result<SimSummary> {
    config.validate()?;
    let outcomes: Vec<Result<ReplicateOutcome>> =
        (0..config.reps).map(|i| run_replicate(config, i)).collect();
    summarize(config, outcomes)
}

/// Runs the replicates on a pool of `workers` threads; the summary is
/// identical to [`run_comparison`].
pub fn run_comparison_with_workers(config: &SimConfig, workers: usize) -> Result<SimSummary> {
    config.validate()?;
    if workers <= 1 {
        return run_comparison(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<ReplicateOutcome>> = pool.install(|| {
        (0..config.reps)
            .into_par_iter()
            .map(|i| run_replicate(config, i))
            .collect()
    });
    summarize(config, outcomes)
}

fn summarize(config: &SimConfig, outcomes: Vec<Result<ReplicateOutcome>>) -> Result<SimSummary> {
    let mut lower = SideMetrics::default();
    let mut upper = SideMetrics::default();
    let mut containment = Containment::default();
    let slack = 1e-12;
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome.map_err(|source| Error::Replicate {
            index: index as u64,
            source: Box::new(source),
        })?;
        let log_true = o.true_rr.ln();
        let dist = |x: f64| (x.ln() - log_true).abs();
        let (pf, tp, bf) = (o.parameter_free, o.two_param, o.bounding_factor);

        lower.ptilde += f64::from(u8::from(pf.lower() > bf.lower()));
        lower.pbar += f64::from(u8::from(tp.lower() > bf.lower()));
        lower.dtilde += dist(pf.lower());
        lower.dbar += dist(tp.lower());
        lower.d += dist(bf.lower());

        upper.ptilde += f64::from(u8::from(pf.upper_f64() < bf.upper_f64()));
        upper.pbar += f64::from(u8::from(tp.upper_f64() < bf.upper_f64()));
        upper.dtilde += dist(pf.upper_f64());
        upper.dbar += dist(tp.upper_f64());
        upper.d += dist(bf.upper_f64());

        containment.parameter_free += u64::from(pf.contains(o.true_rr, slack));
        containment.two_param += u64::from(tp.contains(o.true_rr, slack));
        containment.bounding_factor += u64::from(bf.contains(o.true_rr, slack));
    }
    let n = config.reps as f64;
    for side in [&mut lower, &mut upper] {
        side.ptilde /= n;
        side.pbar /= n;
        side.dtilde /= n;
        side.dbar /= n;
        side.d /= n;
    }
    Ok(SimSummary {
        config: *config,
        replicates: config.reps,
        lower,
        upper,
        containment,
    })
}
