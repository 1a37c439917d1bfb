#![allow(dead_code)]

use pme_particles::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Particles sampled from the unit-mass Barenblatt profile at time `t0`.
pub fn barenblatt_state(m: f64, n: usize, t0: f64) -> ParticleState {
    let profile = BarenblattProfile::unit(m).unwrap();
    let rho = DensitySpec::barenblatt(profile, t0).unwrap();
    sample_support_preserving(&rho, n, m).unwrap()
}

/// A strictly ordered state with gaps drawn from `[lo, hi] / n`.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize, m: f64, lo: f64, hi: f64) -> ParticleState {
    let mut x = vec![rng.gen_range(-1.0..1.0)];
    for _ in 0..n {
        let gap = rng.gen_range(lo..hi) / n as f64;
        x.push(x.last().unwrap() + gap);
    }
    ParticleState::new(x, m).unwrap()
}

pub fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("criterion {criterion:>2} [{tag}] {name}: {detail}");
}
