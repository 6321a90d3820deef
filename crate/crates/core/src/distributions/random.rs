//! Seeded generators of valid joints, for property tests and sweeps.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{JointDEU, JointDEZU, StratifiedJoint};

const MARGIN: f64 = 1e-3;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn inside(rng: &mut ChaCha8Rng) -> f64 {
    MARGIN + (1.0 - 2.0 * MARGIN) * uniform(rng)
}

fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| MARGIN + uniform(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn draw_joint(rng: &mut ChaCha8Rng, k: usize) -> JointDEU<f64> {
    let p_u = simplex(rng, k);
    let p_e1_u = (0..k).map(|_| inside(rng)).collect();
    let p_d1_eu = [
        (0..k).map(|_| inside(rng)).collect(),
        (0..k).map(|_| inside(rng)).collect(),
    ];
    JointDEU::new(p_u, p_e1_u, p_d1_eu).expect("generated joint is valid")
}

/// A random joint over `k` confounder levels; identical for identical seeds.
pub fn random_joint(seed: u64, k: usize) -> JointDEU<f64> {
    assert!(k >= 1, "need at least one confounder level");
    draw_joint(&mut ChaCha8Rng::seed_from_u64(seed), k)
}

/// A random mediation joint over `k` confounder and `l` mediator levels.
pub fn random_mediation_joint(seed: u64, k: usize, l: usize) -> JointDEZU<f64> {
    assert!(k >= 1 && l >= 1, "need at least one level of U and Z");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_u = simplex(&mut rng, k);
    let p_e1_u = (0..k).map(|_| inside(&mut rng)).collect();
    let p_z_e = [simplex(&mut rng, l), simplex(&mut rng, l)];
    let mut risks = || -> Vec<Vec<f64>> {
        (0..l)
            .map(|_| (0..k).map(|_| inside(&mut rng)).collect())
            .collect()
    };
    let p_d1_ezu = [risks(), risks()];
    JointDEZU::new(p_u, p_e1_u, p_z_e, p_d1_ezu).expect("generated joint is valid")
}

/// `strata` random joints with random stratum weights.
pub fn random_stratified_joint(seed: u64, strata: usize, k: usize) -> StratifiedJoint<f64> {
    assert!(strata >= 1 && k >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = simplex(&mut rng, strata);
    StratifiedJoint {
        strata: weights
            .into_iter()
            .enumerate()
            .map(|(c, w)| (c.to_string(), w, draw_joint(&mut rng, k)))
            .collect(),
    }
}
