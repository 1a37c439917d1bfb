//! Particle velocities and adaptive time integration.
//!
//! Velocities are `ẋ_i = -D+_i[R^m]` for `i = 0..=N` with `R_0 = R_{N+1} = 0`:
//! the end particles move outwards with speed `N R^m` of their cell, interior
//! particles move down the gradient of `R^m`.
//!
//! [`integrate`] advances the system with the Dormand-Prince 5(4) pair. On top
//! of the usual error control, a step is rejected when any gap falls below a
//! fraction of the initial minimum gap; the exact flow never shrinks the
//! minimum gap, so such a step is an integration artefact.

use crate::difference::laplacian_interior;
use crate::error::{Error, Result};
use crate::particles::ParticleState;

/// Velocities `ẋ_0, ..., ẋ_N`.
pub fn rhs(state: &ParticleState) -> Vec<f64> {
    let mut out = vec![0.0; state.positions().len()];
    velocities_into(state.positions(), state.m(), &mut out);
    out
}

/// Allocation-free velocity evaluation used by the integrator.
pub(crate) fn velocities_into(x: &[f64], m: f64, out: &mut [f64]) {
    let n = x.len() - 1;
    let nf = n as f64;
    let mut left = 0.0; // R_0^m
    for i in 0..n {
        let r = 1.0 / (nf * (x[i + 1] - x[i]));
        let rm = r.powf(m);
        out[i] = -nf * (rm - left);
        left = rm;
    }
    out[n] = nf * left;
}

/// Time derivative of the densities, `Ṙ_i = R_i² Δ_i[R^m]`.
pub fn rhs_density_form(state: &ParticleState) -> Vec<f64> {
    let r = state.densities();
    let lap = laplacian_interior(&r.powf(state.m()));
    r.values().iter().zip(lap).map(|(ri, l)| ri * ri * l).collect()
}

/// Settings of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Gap guard factor `γ ∈ (0, 1)`: steps producing a gap below
    /// `γ · min_i d_i(0)` are rejected.
    pub gap_guard: f64,
    /// Times at which states are stored (the initial state is always stored).
    pub output_times: Vec<f64>,
    /// Keep every accepted step in [`Trajectory::steps`].
    pub record_steps: bool,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: f64::INFINITY,
            gap_guard: 0.5,
            output_times: Vec::new(),
            record_steps: false,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_output_times(mut self, times: Vec<f64>) -> Self {
        self.output_times = times;
        self
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    /// `count` equally spaced output times on `(0, horizon]`.
    pub fn with_uniform_times(self, horizon: f64, count: usize) -> Self {
        let times = (1..=count).map(|k| horizon * k as f64 / count as f64).collect();
        self.with_output_times(times)
    }

    fn validate(&self, t0: f64) -> Result<()> {
        let positive = |name: &'static str, value: f64| {
            if value > 0.0 && !value.is_nan() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value })
            }
        };
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        positive("max_step", self.max_step)?;
        if !(self.gap_guard > 0.0 && self.gap_guard < 1.0) {
            return Err(Error::InvalidParameter {
                name: "gap_guard",
                value: self.gap_guard,
            });
        }
        let mut previous = t0;
        for &time in &self.output_times {
            if !time.is_finite() || time < previous || (time == previous && time != t0) {
                return Err(Error::OutputTimesNotIncreasing { time, previous });
            }
            previous = time;
        }
        Ok(())
    }
}

/// Step statistics of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Rejections caused by the gap guard (included in `rejected`).
    pub guard_rejections: usize,
    pub min_step: f64,
}

/// States stored at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<ParticleState>,
    stats: IntegratorStats,
    steps: Option<Vec<ParticleState>>,
}

impl Trajectory {
    /// Wraps externally produced states; times must increase and all states
    /// must share `N` and `m`.
    pub fn from_states(samples: Vec<ParticleState>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyTrajectory)?;
        for w in samples.windows(2) {
            if w[1].t() <= w[0].t() {
                return Err(Error::OutputTimesNotIncreasing {
                    time: w[1].t(),
                    previous: w[0].t(),
                });
            }
        }
        if let Some(other) = samples.iter().find(|s| s.n() != first.n()) {
            return Err(Error::DimensionMismatch {
                left: first.n(),
                right: other.n(),
            });
        }
        if let Some(other) = samples.iter().find(|s| s.m() != first.m()) {
            return Err(Error::InvalidExponent(other.m()));
        }
        Ok(Self {
            samples,
            stats: IntegratorStats::default(),
            steps: None,
        })
    }

    pub fn states(&self) -> &[ParticleState] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(ParticleState::t).collect()
    }

    pub fn initial(&self) -> &ParticleState {
        &self.samples[0]
    }

    pub fn last(&self) -> &ParticleState {
        &self.samples[self.samples.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n(&self) -> usize {
        self.initial().n()
    }

    pub fn m(&self) -> f64 {
        self.initial().m()
    }

    pub fn stats(&self) -> &IntegratorStats {
        &self.stats
    }

    /// Every accepted step, when requested via [`IntegratorConfig::record_steps`].
    pub fn steps(&self) -> Option<&[ParticleState]> {
        self.steps.as_deref()
    }
}

// Dormand-Prince 5(4) tableau. The system is autonomous, so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MAX_SHRINK: f64 = 0.2;
const GUARD_SHRINK: f64 = 0.5;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Stages {
    fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
            y_new: vec![0.0; len],
        }
    }

    /// One Dormand-Prince step from `y` with step `h`, assuming `k[0]` holds
    /// the velocity at `y`. Leaves the 5th-order solution in `y_new`, its
    /// velocity in `k[6]`, and returns the scaled error norm.
    fn step(&mut self, y: &[f64], h: f64, m: f64, rtol: f64, atol: f64) -> f64 {
        let len = y.len();
        let combos: [&[f64]; 5] = [
            &[A21],
            &[A31, A32],
            &[A41, A42, A43],
            &[A51, A52, A53, A54],
            &[A61, A62, A63, A64, A65],
        ];
        for (stage, coeffs) in combos.iter().enumerate() {
            for i in 0..len {
                let mut acc = 0.0;
                for (j, c) in coeffs.iter().enumerate() {
                    acc += c * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            velocities_into(&self.tmp, m, &mut self.k[stage + 1]);
        }
        for i in 0..len {
            self.y_new[i] = y[i]
                + h * (B1 * self.k[0][i]
                    + B3 * self.k[2][i]
                    + B4 * self.k[3][i]
                    + B5 * self.k[4][i]
                    + B6 * self.k[5][i]);
        }
        if !is_ordered(&self.y_new) {
            return f64::INFINITY;
        }
        velocities_into(&self.y_new, m, &mut self.k[6]);
        let mut sum = 0.0;
        for i in 0..len {
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let scale = atol + rtol * y[i].abs().max(self.y_new[i].abs());
            sum += (e / scale).powi(2);
        }
        (sum / len as f64).sqrt()
    }
}

fn is_ordered(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0]) && x.iter().all(|v| v.is_finite())
}

fn min_gap(x: &[f64]) -> f64 {
    x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Initial step `rtol^{1/5} / (N² max R^{m+1} · 2(m+1))`.
fn initial_step(state: &ParticleState, rtol: f64) -> f64 {
    let n = state.n() as f64;
    let m = state.m();
    let rmax = state.densities().max();
    rtol.powf(0.2) / (n * n * rmax.powf(m + 1.0) * 2.0 * (m + 1.0))
}

/// Integrates the particle system from `initial` through the configured
/// output times.
pub fn integrate(initial: &ParticleState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let t0 = initial.t();
    cfg.validate(t0)?;
    let m = initial.m();
    let mut samples = vec![initial.clone()];
    let mut steps = cfg.record_steps.then(|| vec![initial.clone()]);
    let mut stats = IntegratorStats {
        min_step: f64::INFINITY,
        ..Default::default()
    };
    let targets: Vec<f64> = cfg.output_times.iter().copied().filter(|&t| t > t0).collect();
    let Some(&t_end) = targets.last() else {
        return Ok(Trajectory { samples, stats, steps });
    };
    let min_step = 1e-14 * (t_end - t0);
    let guard = cfg.gap_guard * initial.gaps().min();

    let mut y = initial.positions().to_vec();
    let mut t = t0;
    let mut stages = Stages::new(y.len());
    velocities_into(&y, m, &mut stages.k[0]);
    let mut h = initial_step(initial, cfg.rtol).min(cfg.max_step);
    let mut just_rejected = false;

    for &target in &targets {
        while t < target {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(Error::TooManySteps(cfg.max_steps));
            }
            if h < min_step {
                return Err(Error::StepSizeUnderflow { t, step: h, min: min_step });
            }
            // land exactly on the output time
            let landing = t + h >= target;
            let step = if landing { target - t } else { h };
            let err = stages.step(&y, step, m, cfg.rtol, cfg.atol);
            if err <= 1.0 && min_gap(&stages.y_new) < guard {
                stats.rejected += 1;
                stats.guard_rejections += 1;
                h = step * GUARD_SHRINK;
                just_rejected = true;
                continue;
            }
            if err <= 1.0 {
                stats.accepted += 1;
                stats.min_step = stats.min_step.min(step);
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut stages.y_new);
                stages.k.swap(0, 6);
                if let Some(steps) = steps.as_mut() {
                    steps.push(ParticleState::from_parts_unchecked(y.clone(), m, t));
                }
                let mut factor = if err == 0.0 {
                    MAX_GROWTH
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MAX_SHRINK, MAX_GROWTH)
                };
                if just_rejected {
                    factor = factor.min(1.0);
                }
                just_rejected = false;
                // a truncated landing step says little about the natural size
                h = if landing { h.max(step * factor) } else { step * factor };
                h = h.min(cfg.max_step);
            } else {
                stats.rejected += 1;
                let factor = if err.is_finite() {
                    (SAFETY * err.powf(-0.2)).clamp(MAX_SHRINK, 1.0)
                } else {
                    MAX_SHRINK
                };
                h = step * factor;
                just_rejected = true;
            }
        }
        samples.push(ParticleState::from_parts_unchecked(y.clone(), m, target));
    }
    if stats.accepted == 0 {
        stats.min_step = 0.0;
    }
    Ok(Trajectory { samples, stats, steps })
}
