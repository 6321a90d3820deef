//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sensbound::distributions::{random_joint, random_mediation_joint};
use sensbound::mediation::{nde_rd_bounds, nie_rd_bounds, true_nde_rd, true_nie_rd};
use sensbound::sharpness::WitnessInput;
use sensbound::simulation::{run_comparison, run_comparison_with_workers, SimConfig, SimSummary, Targets};
use sensbound::*;

const SLACK: f64 = 1e-12;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Sensitivity parameters drawn inside a feasible region.
fn feasible_params(region: &FeasibleRegion<f64>, rng: &mut ChaCha8Rng) -> Params64 {
    let hi = region.max_star() + (1.0 - region.max_star()) * uniform(rng);
    let lo = region.min_star() * uniform(rng);
    Params64::new(hi, lo).unwrap()
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/hammond_horn.csv")
}

fn round_displayed(x: f64) -> String {
    if x >= 10.0 {
        format!("{x:.1}")
    } else {
        format!("{x:.2}")
    }
}

const PUBLISHED_GRID: [[(&str, &str); 5]; 5] = [
    [("1.00", "1.28"), ("0.41", "1.76"), ("0.26", "2.25"), ("0.19", "2.73"), ("0.15", "3.22")],
    [("0.96", "1.59"), ("0.39", "2.19"), ("0.25", "2.79"), ("0.18", "3.40"), ("0.14", "4.00")],
    [("0.91", "2.10"), ("0.37", "2.89"), ("0.23", "3.69"), ("0.17", "4.49"), ("0.13", "5.29")],
    [("0.87", "3.09"), ("0.35", "4.27"), ("0.22", "5.45"), ("0.16", "6.63"), ("0.13", "7.80")],
    [("0.82", "5.90"), ("0.34", "8.15"), ("0.21", "10.4"), ("0.15", "12.6"), ("0.12", "14.9")],
];

fn interval_grid() -> Outcome {
    let start = Instant::now();
    let table = CountTable::from_csv_path(fixture()).expect("fixture readable").unwrap();
    let obs = match observed_from_counts::<f64>(&table).unwrap() {
        Observed::Binary(obs) => obs,
        Observed::Stratified(_) => panic!("fixture has no covariate"),
    };
    let region = feasible_region(&obs);
    let rr = obs.rr_obs().unwrap().to_f64();
    let header_ok = format!("{:.2}", region.max_star()) == "0.12"
        && format!("{:.2}", region.min_star()) == "0.10"
        && format!("{rr:.2}") == "1.28";
    let grid = bounds_grid(&obs, 5, 5).unwrap();
    let mut mismatches = Vec::new();
    for (i, row) in PUBLISHED_GRID.iter().enumerate() {
        for (j, &(lo, hi)) in row.iter().enumerate() {
            let iv = grid[i * 5 + j].interval;
            let got = (round_displayed(iv.lower()), round_displayed(iv.upper_f64()));
            if got.0 != lo || got.1 != hi {
                mismatches.push(format!("({i},{j}) got {got:?} want ({lo}, {hi})"));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        header_ok && mismatches.is_empty() && elapsed < Duration::from_secs(1),
        format!(
            "25/25 cells expected, {} mismatched {:?}; M*={:.4} m*={:.4} RR={:.4}; {elapsed:?}",
            mismatches.len(),
            mismatches,
            region.max_star(),
            region.min_star(),
            rr
        ),
    )
}

fn containment() -> Outcome {
    let start = Instant::now();
    let mut violations = 0u64;
    for seed in 0..10_000u64 {
        let joint = random_joint(seed, 1 + (seed % 5) as usize);
        let obs = observed_from_joint(&joint).unwrap();
        let sp = true_sens_params(&joint);
        let dp = dv_params_from_joint(&joint).unwrap();
        let rr = true_rr(&joint).unwrap();
        let rd = true_rd(&joint);
        let rr_obs = obs.rr_obs().unwrap().finite().unwrap();
        let inside = rr_bounds(&obs, &sp).unwrap().contains(rr, SLACK)
            && rd_bounds(&obs, &sp).unwrap().contains(rd, SLACK)
            && as_bounds_rr(&obs).unwrap().contains(rr, SLACK)
            && as_bounds_rd(&obs).contains(rd, SLACK)
            && dv_bounds(rr_obs, &dp).unwrap().contains(rr, SLACK);
        violations += u64::from(!inside);
    }
    let mut med_violations = 0u64;
    for seed in 0..10_000u64 {
        let joint = random_mediation_joint(seed, 1 + (seed % 4) as usize, 1 + (seed % 3) as usize);
        let med = mediation_observed_from_joint(&joint).unwrap();
        let sp = joint.true_sens_params();
        let inside = nde_bounds(&med, &sp).unwrap().contains(true_nde(&joint).unwrap(), SLACK)
            && nie_bounds(&med, &sp).unwrap().contains(true_nie(&joint).unwrap(), SLACK)
            && nde_rd_bounds(&med, &sp).unwrap().contains(true_nde_rd(&joint), SLACK)
            && nie_rd_bounds(&med, &sp).unwrap().contains(true_nie_rd(&joint), SLACK);
        med_violations += u64::from(!inside);
    }
    let elapsed = start.elapsed();
    check(
        violations == 0 && med_violations == 0 && elapsed < Duration::from_secs(30),
        format!(
            "10000 total-effect draws: {violations} violations; 10000 mediation draws: {med_violations} violations; slack {SLACK:e}; {elapsed:?}"
        ),
    )
}

const EPSILONS: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

fn gaps_ok(reports: &[WitnessReport], worst: &mut f64) -> bool {
    *worst = worst.max(reports[3].log_gap);
    reports.windows(2).all(|w| w[1].log_gap <= w[0].log_gap) && reports[3].log_gap < 1e-6
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0u32;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let obs = observed_from_joint(&random_joint(50_000 + seed, 2 + (seed % 3) as usize)).unwrap();
        let sp = feasible_params(&feasible_region(&obs), &mut rng);
        for scale in [WitnessScale::RiskRatio, WitnessScale::RiskDifference] {
            for target in [Target::Lower, Target::Upper] {
                let reports =
                    sharpness_sweep(WitnessInput::Total(&obs), &sp, &EPSILONS, target, scale).unwrap();
                failures += u32::from(!gaps_ok(&reports, &mut worst));
            }
        }
        let med = mediation_observed_from_joint(&random_mediation_joint(60_000 + seed, 2, 1 + (seed % 3) as usize))
            .unwrap();
        let sp = feasible_params(&mediation_feasible_region(&med), &mut rng);
        for target in [Target::Lower, Target::Upper] {
            let reports = sharpness_sweep(
                WitnessInput::Mediation(&med),
                &sp,
                &EPSILONS,
                target,
                WitnessScale::NaturalDirect,
            )
            .unwrap();
            failures += u32::from(!gaps_ok(&reports, &mut worst));
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!(
            "600 sweeps (rr, rd, nde x lower/upper x 100 draws): {failures} failing; worst gap at 1e-8 = {worst:.3e} (< 1e-6); {elapsed:?}"
        ),
    )
}

fn reductions() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for seed in 0..2_000u64 {
        let joint = random_joint(70_000 + seed, 1 + (seed % 4) as usize);
        let obs = observed_from_joint(&joint).unwrap();
        let pf = as_bounds_rr(&obs).unwrap();
        let ours = rr_bounds(&obs, &Params64::uninformative()).unwrap();
        worst = worst
            .max((pf.lower() - ours.lower()).abs())
            .max((pf.upper_f64() - ours.upper_f64()).abs());
        let manski = manski_rd_bounds(obs.p_d1_e1(), obs.p_d1_e0(), obs.p_e1(), &ManskiSupports::binary()).unwrap();
        let pf_rd = as_bounds_rd(&obs);
        worst = worst
            .max((manski.lower() - pf_rd.lower()).abs())
            .max((manski.upper_f64() - pf_rd.upper_f64()).abs())
            .max((manski.upper_f64() - manski.lower() - 1.0).abs());

        let collapsed = JointDEZU::new(
            joint.p_u().to_vec(),
            joint.p_e1_u().to_vec(),
            [vec![1.0], vec![1.0]],
            [vec![joint.risk_slice(0).to_vec()], vec![joint.risk_slice(1).to_vec()]],
        )
        .unwrap();
        let med = mediation_observed_from_joint(&collapsed).unwrap();
        let sp = true_sens_params(&joint);
        let nde = nde_bounds(&med, &sp).unwrap();
        let total = rr_bounds(&obs, &sp).unwrap();
        worst = worst
            .max((nde.lower() - total.lower()).abs())
            .max((nde.upper_f64() - total.upper_f64()).abs())
            .max((true_nde(&collapsed).unwrap() - true_rr(&joint).unwrap()).abs());

        let region = feasible_region(&obs);
        if obs.rr_obs().unwrap().to_f64() >= 1.0 {
            let corner = Params64::new(region.max_star(), region.min_star()).unwrap();
            worst = worst.max((rr_bounds(&obs, &corner).unwrap().lower() - 1.0).abs());
        }
    }
    if worst > SLACK {
        failures.push(format!("floating-point deviation {worst:e}"));
    }

    let q = Rational64::new;
    let exact = ObservedExact::new(q(1, 2), q(27, 50), q(4, 25)).unwrap();
    let pf = as_bounds_rr(&exact).unwrap();
    if pf != rr_bounds(&exact, &ParamsExact::uninformative()).unwrap() {
        failures.push("exact parameter-free != two-parameter at (1, 0)".into());
    }
    let manski = manski_rd_bounds(q(27, 50), q(4, 25), q(1, 2), &ManskiSupports::binary()).unwrap();
    if manski.upper_finite().unwrap() - manski.lower() != q(1, 1) || manski != as_bounds_rd(&exact) {
        failures.push("exact binary Manski width or parameter-free match".into());
    }
    let corner = ParamsExact::new(q(27, 50), q(4, 25)).unwrap();
    if rr_bounds(&exact, &corner).unwrap().lower() != q(1, 1) {
        failures.push("exact corner lower bound != 1".into());
    }
    check(
        failures.is_empty(),
        format!("2000 draws plus exact rational cases; max deviation {worst:.2e} (<= 1e-12); {failures:?}"),
    )
}

/// Smallest `max(a, b)` over a log-spaced grid with `BF(a, b) >= rr`.
fn e_value_grid(rr: f64, upper: f64, n: usize) -> (f64, f64) {
    let step = upper.ln() / (n - 1) as f64;
    let axis: Vec<f64> = (0..n).map(|i| (step * i as f64).exp()).collect();
    let mut best = f64::INFINITY;
    for &a in &axis {
        if a >= best {
            break;
        }
        for &b in &axis {
            if b >= best {
                break;
            }
            if a * b / (a + b - 1.0) >= rr {
                best = a.max(b);
                break;
            }
        }
    }
    (best, step)
}

fn evalue() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = 0;
    let mut worst_rel = 0.0f64;
    for _ in 0..50 {
        let rr = 1.0 + 19.0 * uniform(&mut rng);
        let ev = e_value(rr).unwrap();
        let (grid, step) = e_value_grid(rr, 10.0 * ev, 2000);
        let rel = (grid - ev) / ev;
        worst_rel = worst_rel.max(rel.abs());
        // The grid optimum is the first grid value at or above the exact one.
        if !(rel >= -1e-12 && rel <= step.exp_m1() + 1e-12) {
            failures += 1;
        }
    }
    let at_128 = e_value(1.28).unwrap();
    let reference = 1.28 + (1.28f64 * 0.28).sqrt();
    check(
        failures == 0 && (at_128 - reference).abs() < 1e-12 && (at_128 - 1.878_665).abs() < 1e-6,
        format!(
            "50 grid checks (2000x2000): {failures} outside one grid step, worst rel {worst_rel:.2e}; \
             e_value(1.28) = {at_128:.6} (reference value 1.87868 +/- 1e-5 differs from the closed form by {:.1e})",
            (at_128 - 1.87868).abs()
        ),
    )
}

fn config(sigma: f64, p: (f64, f64, f64), f: f64, seed: u64) -> SimConfig {
    SimConfig {
        sigma,
        targets: Targets::new(p.0, p.1, p.2).unwrap(),
        reps: 1000,
        seed,
        conservative_factor: f,
    }
}

fn simulation() -> Outcome {
    let start = Instant::now();
    let seed = 7;
    let cells: Vec<(f64, f64, f64)> = [0.05, 0.2]
        .iter()
        .flat_map(|&pu| {
            [0.05, 0.2]
                .iter()
                .flat_map(move |&pe| [0.05, 0.2].iter().map(move |&pd| (pu, pe, pd)))
        })
        .collect();
    let run = |sigma, p, f| run_comparison(&config(sigma, p, f, seed)).unwrap();
    let base1: Vec<SimSummary> = cells.iter().map(|&p| run(1.0, p, 0.0)).collect();
    let base3: Vec<SimSummary> = cells.iter().map(|&p| run(3.0, p, 0.0)).collect();
    let cons1: Vec<SimSummary> = cells.iter().map(|&p| run(1.0, p, 0.15)).collect();
    let cons3: Vec<SimSummary> = cells.iter().map(|&p| run(3.0, p, 0.15)).collect();
    let elapsed = start.elapsed();

    let mut failures = Vec::new();
    let first = &base1[0];
    if first.lower.ptilde != 0.0 || !(0.05..=0.15).contains(&first.lower.pbar) {
        failures.push(format!("sigma 1 first cell: ptilde_lo {} pbar_lo {}", first.lower.ptilde, first.lower.pbar));
    }
    for s in &base1 {
        for side in [s.lower, s.upper] {
            if !(side.dtilde > side.dbar && side.dbar > side.d) {
                failures.push(format!("delta ordering at {:?}", s.config.targets));
            }
        }
    }
    let last = &base3[7];
    if !(0.28..=0.48).contains(&last.upper.pbar) {
        failures.push(format!("sigma 3 last cell: pbar_hi {}", last.upper.pbar));
    }
    for (cons, base) in cons1.iter().zip(&base1).chain(cons3.iter().zip(&base3)) {
        if cons.containment.two_param != cons.replicates {
            failures.push(format!("conservative containment at {:?}", cons.config.targets));
        }
        if !(cons.lower.dbar > base.lower.dbar && cons.upper.dbar > base.upper.dbar) {
            failures.push(format!("conservative inflation at {:?}", cons.config.targets));
        }
    }
    let reference = run_comparison(&config(3.0, cells[7], 0.15, seed)).unwrap();
    for workers in [2, 4, 8] {
        if run_comparison_with_workers(&config(3.0, cells[7], 0.15, seed), workers).unwrap() != reference {
            failures.push(format!("{workers} workers differ from single-threaded run"));
        }
    }
    if elapsed >= Duration::from_secs(120) {
        failures.push(format!("runtime {elapsed:?}"));
    }
    check(
        failures.is_empty(),
        format!(
            "32 configs x 1000 reps, seed {seed}: ptilde_lo {:.2}, pbar_lo {:.2}, pbar_hi(sigma 3, 0.2^3) {:.2}, \
             f=0.15 dbar_lo {:.2} vs {:.2}; single-worker {elapsed:?}; {failures:?}",
            first.lower.ptilde, first.lower.pbar, last.upper.pbar, cons1[0].lower.dbar, first.lower.dbar
        ),
    )
}

fn monotonicity() -> Outcome {
    let n = 11;
    let mut violations = 0u64;
    for seed in 0..1_000u64 {
        let obs = observed_from_joint(&random_joint(80_000 + seed, 1 + (seed % 4) as usize)).unwrap();
        let grid = bounds_grid(&obs, n, n).unwrap();
        let outer = rr_bounds(&obs, &Params64::uninformative()).unwrap();
        let at = |i: usize, j: usize| grid[i * n + j].interval;
        for i in 0..n {
            for j in 0..n {
                let iv = at(i, j);
                let mut ok = iv.contains(1.0, SLACK) && outer.contains_interval(&iv, SLACK);
                if j + 1 < n {
                    // Larger M.
                    let next = at(i, j + 1);
                    ok &= next.lower() <= iv.lower() + SLACK && next.upper_f64() >= iv.upper_f64() - SLACK;
                }
                if i + 1 < n {
                    // Smaller m.
                    let next = at(i + 1, j);
                    ok &= next.lower() <= iv.lower() + SLACK && next.upper_f64() >= iv.upper_f64() - SLACK;
                }
                violations += u64::from(!ok);
            }
        }
    }
    check(
        violations == 0,
        format!("1000 laws x 11x11 grids: {violations} violations of monotonicity, null inclusion or nesting"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 interval table reproduction", interval_grid),
        ("2 oracle containment", containment),
        ("3 sharpness witnesses", sharpness),
        ("4 reduction identities", reductions),
        ("5 E-value", evalue),
        ("6 simulation replication", simulation),
        ("7 monotonicity and null inclusion", monotonicity),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let outcome = run();
        all &= outcome.ok;
        println!("{} criterion {name}: {}", if outcome.ok { "PASS" } else { "FAIL" }, outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
