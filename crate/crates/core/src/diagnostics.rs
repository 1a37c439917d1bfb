//! Discrete estimates along particle trajectories.
//!
//! The central quantity is `Z_k = R_k Δ_k[R^m]`, a discrete second derivative
//! of the pressure. Its initial minimum `Z̄ < 0` controls everything else:
//!
//! * `Z_k(t) ≥ -1 / (|Z̄|^{-1} + (m+1)t)` (one-sided Aronson-Bénilan bound),
//! * `L(t) ≤ L(0) (1 + |Z̄|(m+1)t)^{1/(m+1)}` for the support length,
//! * `L(t) ≤ L(0) + B t^{1/(m+1)}` with a constant `B` depending on `m` only,
//! * `max_k R_k(t) ≤ ((m+1)/(16 m t))^{1/(m+1)}`,
//! * `TV(R^{(m+1)/2}) ≤ ((m+1)/(4 m t))^{1/2}`.
//!
//! Bound checks are evaluated on the stored output grid only.

use std::fmt;

use crate::difference::laplacian_interior;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::particles::ParticleState;
use crate::sampling::barrier_ell;

/// Relative slack of the Aronson-Bénilan check, in units of `|Z̄|`.
pub const AB_TOL: f64 = 1e-6;
/// Relative slack of the minimum-principle check.
pub const MIN_PRINCIPLE_TOL: f64 = 1e-6;
/// Relative slack of the first support bound.
pub const SUPPORT_PROP3_TOL: f64 = 1e-6;
/// Absolute slack of the m-only support bound.
pub const SUPPORT_THM2_TOL: f64 = 1e-6;
/// Relative slack of the sup-norm bound.
pub const LINF_TOL: f64 = 1e-8;
/// Relative slack of the total-variation bound.
pub const TV_TOL: f64 = 1e-6;
/// Relative slack of the density lower bound.
pub const DENSITY_FLOOR_TOL: f64 = 1e-6;
/// Absolute slack per comparison of the contraction check.
pub const CONTRACTION_SLACK: f64 = 1e-9;
/// Sup-norm and TV bounds are singular at `t = 0`; they are checked from here on.
pub const EARLY_TIME_CUTOFF: f64 = 0.01;

/// `Z_k = R_k Δ_k[R^m]` for `k = 1..=N`.
pub fn z_vector(state: &ParticleState) -> Vec<f64> {
    let r = state.densities();
    let lap = laplacian_interior(&r.powf(state.m()));
    r.values().iter().zip(lap).map(|(ri, l)| ri * l).collect()
}

pub fn z_min(state: &ParticleState) -> f64 {
    z_vector(state).into_iter().fold(f64::INFINITY, f64::min)
}

/// `-1 / (|Z̄|^{-1} + (m+1) t)`.
pub fn ab_lower_bound(zbar: f64, m: f64, t: f64) -> Result<f64> {
    if !(zbar < 0.0) {
        return Err(Error::NonNegativeZbar(zbar));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter { name: "time", value: t });
    }
    Ok(-1.0 / (1.0 / zbar.abs() + (m + 1.0) * t))
}

/// Total length `x_N - x_0`.
pub fn support_length(state: &ParticleState) -> f64 {
    let x = state.positions();
    x[x.len() - 1] - x[0]
}

/// `L0 (1 + |Z̄|(m+1)t)^{1/(m+1)}`.
pub fn support_bound_prop3(l0: f64, zbar: f64, m: f64, t: f64) -> f64 {
    debug_assert!(zbar < 0.0);
    l0 * (1.0 + zbar.abs() * (m + 1.0) * t).powf(1.0 / (m + 1.0))
}

/// `B = 4^{-(1/m - 1/2)/(m+1)} (m+1)^{1/(m+1)} ℓ(m)`.
pub fn support_constant_thm2(m: f64) -> f64 {
    let e = 1.0 / (m + 1.0);
    4f64.powf(-(1.0 / m - 0.5) * e) * (m + 1.0).powf(e) * barrier_ell(m)
}

/// `L0 + B t^{1/(m+1)}`.
pub fn support_bound_thm2(l0: f64, m: f64, t: f64) -> f64 {
    l0 + support_constant_thm2(m) * t.powf(1.0 / (m + 1.0))
}

/// `((m+1)/(16 m t))^{1/(m+1)}` for `t > 0`.
pub fn linf_bound(m: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter { name: "time", value: t });
    }
    Ok(((m + 1.0) / (16.0 * m * t)).powf(1.0 / (m + 1.0)))
}

/// `((m+1)/(4 m t))^{1/2}` for `t > 0`.
pub fn tv_bound(m: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter { name: "time", value: t });
    }
    Ok(((m + 1.0) / (4.0 * m * t)).sqrt())
}

/// Lower bound on each density: `R_i(0) (1 + |Z̄|(m+1)t)^{-1/(m+1)}`.
pub fn density_floor(r0: f64, zbar: f64, m: f64, t: f64) -> f64 {
    r0 * (1.0 + zbar.abs() * (m + 1.0) * t).powf(-1.0 / (m + 1.0))
}

/// `Σ_{n=0}^{N} |R_{n+1}^{(m+1)/2} - R_n^{(m+1)/2}|` with zero padding.
pub fn tv_halfpower(state: &ParticleState) -> f64 {
    let p = state.densities().powf(0.5 * (state.m() + 1.0));
    let mut total = p[0] + p[p.len() - 1];
    total += p.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    total
}

/// Order of the particle metric `d_h`: the `L^{2h}` norm of the difference of
/// the piecewise-constant position interpolants, or its `L^∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricOrder {
    Finite(u32),
    Infinity,
}

impl fmt::Display for MetricOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricOrder::Finite(h) => write!(f, "d_{h}"),
            MetricOrder::Infinity => write!(f, "d_inf"),
        }
    }
}

fn same_n(a: &ParticleState, b: &ParticleState) -> Result<()> {
    if a.n() == b.n() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a.n(), right: b.n() })
    }
}

fn metric_over(diffs: impl Iterator<Item = f64>, n: usize, order: MetricOrder) -> f64 {
    match order {
        MetricOrder::Infinity => diffs.map(f64::abs).fold(0.0, f64::max),
        MetricOrder::Finite(h) => {
            let p = 2 * h as i32;
            let sum: f64 = diffs.map(|d| d.powi(p)).sum();
            (sum / n as f64).powf(1.0 / p as f64)
        }
    }
}

/// `d_h(a, b)` over the indices `0..N` (particle `N` excluded), i.e. the norm
/// of the difference of `Σ_i x_i 1_[i/N,(i+1)/N)`.
pub fn metric_dh(a: &ParticleState, b: &ParticleState, order: MetricOrder) -> Result<f64> {
    same_n(a, b)?;
    let n = a.n();
    let diffs = a.positions()[..n].iter().zip(&b.positions()[..n]).map(|(x, y)| x - y);
    Ok(metric_over(diffs, n, order))
}

/// Variant of [`metric_dh`] summing over all particles `0..=N` (still
/// normalised by `1/N`).
pub fn metric_dh_all(a: &ParticleState, b: &ParticleState, order: MetricOrder) -> Result<f64> {
    same_n(a, b)?;
    let diffs = a.positions().iter().zip(b.positions()).map(|(x, y)| x - y);
    Ok(metric_over(diffs, a.n(), order))
}

/// `(1/N) Σ_{n=0}^{N} |y_n - x_n|`, an upper bound on the 1-Wasserstein
/// distance of the reconstructions.
pub fn w1_upper(a: &ParticleState, b: &ParticleState) -> Result<f64> {
    same_n(a, b)?;
    let sum: f64 = a.positions().iter().zip(b.positions()).map(|(x, y)| (x - y).abs()).sum();
    Ok(sum / a.n() as f64)
}

/// Everything the bound suite reads off one stored state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub z: Vec<f64>,
    pub z_min: f64,
    pub ab_bound: f64,
    pub support_length: f64,
    pub support_bound_prop3: f64,
    pub support_bound_thm2: f64,
    pub min_gap: f64,
    pub max_density: f64,
    /// Infinite at `t = 0`.
    pub linf_bound: f64,
    pub tv_halfpower: f64,
}

impl DiagnosticsRecord {
    pub fn margin(&self) -> f64 {
        self.z_min - self.ab_bound
    }
}

/// Quantities of the initial state that every later bound refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub t0: f64,
    pub zbar: f64,
    pub support_length: f64,
    pub min_gap: f64,
    pub densities: Vec<f64>,
}

impl InitialData {
    pub fn of(state: &ParticleState) -> Self {
        Self {
            t0: state.t(),
            zbar: z_min(state),
            support_length: support_length(state),
            min_gap: state.gaps().min(),
            densities: state.densities().into_vec(),
        }
    }
}

/// Diagnostics of `state` relative to the trajectory's initial data; times in
/// the bounds are elapsed times `t - t0`.
pub fn diagnostics_record(state: &ParticleState, init: &InitialData) -> DiagnosticsRecord {
    let m = state.m();
    let t = state.t() - init.t0;
    let z = z_vector(state);
    let z_min = z.iter().copied().fold(f64::INFINITY, f64::min);
    let zbar = init.zbar.min(-f64::MIN_POSITIVE);
    DiagnosticsRecord {
        t: state.t(),
        z_min,
        z,
        ab_bound: -1.0 / (1.0 / zbar.abs() + (m + 1.0) * t),
        support_length: support_length(state),
        support_bound_prop3: support_bound_prop3(init.support_length, zbar, m, t),
        support_bound_thm2: support_bound_thm2(init.support_length, m, t),
        min_gap: state.gaps().min(),
        max_density: state.densities().max(),
        linf_bound: linf_bound(m, t).unwrap_or(f64::INFINITY),
        tv_halfpower: tv_halfpower(state),
    }
}

/// Diagnostics for every stored state.
pub fn diagnostics_series(traj: &Trajectory) -> Vec<DiagnosticsRecord> {
    let init = InitialData::of(traj.initial());
    traj.states().iter().map(|s| diagnostics_record(s, &init)).collect()
}

/// Per-time margins of the Aronson-Bénilan bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AbReport {
    pub zbar: f64,
    pub tolerance: f64,
    pub times: Vec<f64>,
    pub z_min: Vec<f64>,
    pub bounds: Vec<f64>,
    pub margins: Vec<f64>,
}

impl AbReport {
    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Indices of stored times whose margin is below `-tolerance`.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.margins.len())
            .filter(|&i| self.margins[i] < -self.tolerance)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Checks `min_k Z_k(t) ≥ -1/(|Z̄|^{-1} + (m+1)t)` at every stored time, with
/// tolerance `AB_TOL · |Z̄|`.
pub fn check_ab(traj: &Trajectory) -> AbReport {
    let init = traj.initial();
    let zbar = z_min(init);
    let m = traj.m();
    let mut report = AbReport {
        zbar,
        tolerance: AB_TOL * zbar.abs(),
        times: Vec::new(),
        z_min: Vec::new(),
        bounds: Vec::new(),
        margins: Vec::new(),
    };
    for state in traj.states() {
        let zm = z_min(state);
        let bound = ab_lower_bound(zbar.min(-f64::MIN_POSITIVE), m, state.t() - init.t())
            .expect("elapsed time is non-negative");
        report.times.push(state.t());
        report.z_min.push(zm);
        report.bounds.push(bound);
        report.margins.push(zm - bound);
    }
    report
}

/// The estimates checked by [`verify_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AronsonBenilan,
    MinimumPrinciple,
    DensityFloor,
    SupportProp3,
    SupportThm2,
    Linf,
    TotalVariation,
    Contraction,
}

impl Bound {
    pub fn name(&self) -> &'static str {
        match self {
            Bound::AronsonBenilan => "aronson-benilan",
            Bound::MinimumPrinciple => "minimum-principle",
            Bound::DensityFloor => "density-floor",
            Bound::SupportProp3 => "support-prop3",
            Bound::SupportThm2 => "support-thm2",
            Bound::Linf => "linf-decay",
            Bound::TotalVariation => "tv-halfpower",
            Bound::Contraction => "contraction",
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one bound over a trajectory. `worst_margin` is the smallest
/// value of `(bound side) - (checked side)` in the bound's natural units;
/// `allowed` is the slack it was compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub bound: Bound,
    pub worst_margin: f64,
    pub allowed: f64,
    pub worst_time: f64,
    pub checked: usize,
    pub passed: bool,
}

impl BoundCheck {
    fn new(bound: Bound) -> Self {
        Self {
            bound,
            worst_margin: f64::INFINITY,
            allowed: 0.0,
            worst_time: f64::NAN,
            checked: 0,
            passed: true,
        }
    }

    /// Records `margin`, failing if it is below `-allowed`.
    fn record(&mut self, t: f64, margin: f64, allowed: f64) {
        self.checked += 1;
        if margin + allowed < self.worst_margin + self.allowed || self.worst_time.is_nan() {
            self.worst_margin = margin;
            self.allowed = allowed;
            self.worst_time = t;
        }
        if !(margin >= -allowed) {
            self.passed = false;
        }
    }
}

/// Results of the bound suite over one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<BoundCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<Bound> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.bound).collect()
    }

    pub fn check(&self, bound: Bound) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.bound == bound)
    }
}

/// Runs every single-trajectory bound at its tolerance.
pub fn verify_trajectory(traj: &Trajectory) -> VerificationReport {
    let m = traj.m();
    let init = InitialData::of(traj.initial());
    let zbar = init.zbar;
    let mut ab = BoundCheck::new(Bound::AronsonBenilan);
    let mut mp = BoundCheck::new(Bound::MinimumPrinciple);
    let mut floor = BoundCheck::new(Bound::DensityFloor);
    let mut prop3 = BoundCheck::new(Bound::SupportProp3);
    let mut thm2 = BoundCheck::new(Bound::SupportThm2);
    let mut linf = BoundCheck::new(Bound::Linf);
    let mut tv = BoundCheck::new(Bound::TotalVariation);

    if !(zbar < 0.0) {
        ab.passed = false;
        ab.worst_margin = zbar;
    }
    for state in traj.states() {
        let rec = diagnostics_record(state, &init);
        let t = state.t();
        let elapsed = t - init.t0;
        if zbar < 0.0 {
            ab.record(t, rec.margin(), AB_TOL * zbar.abs());
        }
        mp.record(t, rec.min_gap - init.min_gap, MIN_PRINCIPLE_TOL * init.min_gap);
        let r = state.densities();
        let worst_floor = r
            .values()
            .iter()
            .zip(&init.densities)
            .map(|(ri, r0)| {
                let f = density_floor(*r0, zbar, m, elapsed);
                (ri - f) / f
            })
            .fold(f64::INFINITY, f64::min);
        floor.record(t, worst_floor, DENSITY_FLOOR_TOL);
        prop3.record(
            t,
            rec.support_bound_prop3 - rec.support_length,
            SUPPORT_PROP3_TOL * rec.support_bound_prop3,
        );
        thm2.record(t, rec.support_bound_thm2 - rec.support_length, SUPPORT_THM2_TOL);
        if elapsed >= EARLY_TIME_CUTOFF {
            linf.record(t, rec.linf_bound - rec.max_density, LINF_TOL * rec.linf_bound);
            let tvb = tv_bound(m, elapsed).expect("positive elapsed time");
            tv.record(t, tvb - rec.tv_halfpower, TV_TOL * tvb);
        }
    }
    VerificationReport {
        checks: vec![ab, mp, floor, prop3, thm2, linf, tv],
    }
}

/// Checks that `d_h` (for every listed order) between two trajectories never
/// increases by more than [`CONTRACTION_SLACK`] between consecutive stored
/// times. The trajectories must share their time grid.
pub fn check_contraction(
    a: &Trajectory,
    b: &Trajectory,
    orders: &[MetricOrder],
    all_indices: bool,
) -> Result<BoundCheck> {
    same_n(a.initial(), b.initial())?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let metric = if all_indices { metric_dh_all } else { metric_dh };
    let mut check = BoundCheck::new(Bound::Contraction);
    for &order in orders {
        let values = a
            .states()
            .iter()
            .zip(b.states())
            .map(|(x, y)| metric(x, y, order))
            .collect::<Result<Vec<_>>>()?;
        for (i, w) in values.windows(2).enumerate() {
            check.record(a.states()[i + 1].t(), w[0] - w[1], CONTRACTION_SLACK);
        }
    }
    Ok(check)
}

/// A smooth test function `φ(t, x)` with its partial derivatives.
pub trait TestFunction {
    fn value(&self, t: f64, x: f64) -> f64;
    fn dt(&self, t: f64, x: f64) -> f64;
    fn dx(&self, t: f64, x: f64) -> f64;
}

/// `C^∞` bump `exp(1 - 1/(1 - s²))` on `|s| < 1`, and its derivative.
fn bump(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let v = (1.0 - 1.0 / q).exp();
    (v, v * (-2.0 * s / (q * q)))
}

/// `φ(t, x) = χ(t/T) ψ((x - c)/w)` with `χ(τ) = exp(1 - 1/(1 - τ²))` on
/// `[0, 1)` (so `χ(0) = 1` and `χ` vanishes to all orders at `T`) and `ψ` the
/// same bump in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFunction {
    pub horizon: f64,
    pub center: f64,
    pub width: f64,
}

impl TestFunction for BumpTestFunction {
    fn value(&self, t: f64, x: f64) -> f64 {
        bump(t / self.horizon).0 * bump((x - self.center) / self.width).0
    }

    fn dt(&self, t: f64, x: f64) -> f64 {
        bump(t / self.horizon).1 / self.horizon * bump((x - self.center) / self.width).0
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        bump(t / self.horizon).0 * bump((x - self.center) / self.width).1 / self.width
    }
}

/// Constant `φ`, the negative control of the consistency identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTestFunction(pub f64);

impl TestFunction for ConstantTestFunction {
    fn value(&self, _t: f64, _x: f64) -> f64 {
        self.0
    }

    fn dt(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }

    fn dx(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
}

/// Time-integrated weak-form terms of one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyTriple {
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl ConsistencyTriple {
    /// `I + J + K`, which vanishes for compactly supported `φ`.
    pub fn residual(&self) -> f64 {
        self.i + self.j + self.k
    }
}

/// Allowed `|φ(T, x_j(T))|` for a test function to count as vanishing at `T`.
const SUPPORT_EPS: f64 = 1e-12;

/// `I`, `J`, `K` for `φ` over `[t_0, T]`, `T` the last stored time, with
/// trapezoidal time quadrature on the stored grid.
///
/// * `I = (1/N) Σ_{j=0}^{N} ∫ ∂_tφ(t, x_j) dt`
/// * `J = Σ_{j=1}^{N} ∫ (∂_xφ(t, x_j) - ∂_xφ(t, x_{j-1})) R_j^m dt`
/// * `K = (1/N) Σ_{j=0}^{N} φ(t_0, x_j(t_0))`
///
/// Fails unless `φ` vanishes at the final time.
pub fn consistency_triple<F: TestFunction>(traj: &Trajectory, phi: &F) -> Result<ConsistencyTriple> {
    let last = traj.last();
    let residual = last
        .positions()
        .iter()
        .map(|&x| phi.value(last.t(), x).abs())
        .fold(0.0, f64::max);
    if traj.len() < 2 || residual > SUPPORT_EPS {
        return Err(Error::NotCompactlySupported { residual });
    }
    Ok(consistency_triple_unchecked(traj, phi))
}

/// [`consistency_triple`] without the support check.
pub fn consistency_triple_unchecked<F: TestFunction>(traj: &Trajectory, phi: &F) -> ConsistencyTriple {
    let n = traj.n() as f64;
    let m = traj.m();
    let integrands: Vec<(f64, f64, f64)> = traj
        .states()
        .iter()
        .map(|s| {
            let t = s.t();
            let x = s.positions();
            let i_part = x.iter().map(|&xj| phi.dt(t, xj)).sum::<f64>() / n;
            let dphi: Vec<f64> = x.iter().map(|&xj| phi.dx(t, xj)).collect();
            let j_part = x
                .windows(2)
                .zip(dphi.windows(2))
                .map(|(w, d)| {
                    let r = 1.0 / (n * (w[1] - w[0]));
                    (d[1] - d[0]) * r.powf(m)
                })
                .sum::<f64>();
            (t, i_part, j_part)
        })
        .collect();
    let (mut i, mut j) = (0.0, 0.0);
    for w in integrands.windows(2) {
        let dt = w[1].0 - w[0].0;
        i += 0.5 * dt * (w[0].1 + w[1].1);
        j += 0.5 * dt * (w[0].2 + w[1].2);
    }
    let first = traj.initial();
    let k = first.positions().iter().map(|&x| phi.value(first.t(), x)).sum::<f64>() / n;
    ConsistencyTriple { i, j, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_examples() {
        let s = ParticleState::uniform(0.0, 1.0, 4, 2.0).unwrap();
        assert_eq!(z_vector(&s), vec![-16.0, 0.0, 0.0, -16.0]);
        let s = ParticleState::new(vec![0.0, 1.0], 2.0).unwrap();
        assert_eq!(z_vector(&s), vec![-2.0]);
        assert_eq!(z_min(&s), -2.0);
    }

    #[test]
    fn ab_bound_examples() {
        assert_eq!(ab_lower_bound(-3.0, 2.0, 0.0).unwrap(), -3.0);
        let b = ab_lower_bound(-2.0, 2.0, 1.0).unwrap();
        assert!((b + 2.0 / 7.0).abs() < 1e-15);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..50 {
            let b = ab_lower_bound(-2.0, 2.0, 1.5f64.powi(k)).unwrap();
            assert!(b > prev && b < 0.0);
            prev = b;
        }
        assert_eq!(ab_lower_bound(0.0, 2.0, 1.0), Err(Error::NonNegativeZbar(0.0)));
        assert!(ab_lower_bound(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn support_examples() {
        let s = ParticleState::new(vec![-2.0, 0.0, 1.0, 3.0], 2.0).unwrap();
        assert_eq!(support_length(&s), 5.0);
        let scaled = ParticleState::new(s.positions().iter().map(|x| 2.5 * x).collect(), 2.0).unwrap();
        assert_eq!(support_length(&scaled), 12.5);
        assert_eq!(support_bound_prop3(1.3, -2.0, 2.0, 0.0), 1.3);
        assert!((support_bound_prop3(1.0, -2.0, 2.0, 1.0) - 7f64.cbrt()).abs() < 1e-15);
        assert!(support_bound_prop3(1.0, -2.0, 2.0, 2.0) > support_bound_prop3(1.0, -2.0, 2.0, 1.0));
    }

    #[test]
    fn thm2_constant() {
        let b = support_constant_thm2(2.0);
        assert!((b - 3f64.cbrt() * std::f64::consts::PI).abs() < 1e-12);
        for &m in &[1.1, 1.5, 3.0, 7.0] {
            assert!(support_constant_thm2(m) > 0.0);
        }
    }

    #[test]
    fn linf_examples() {
        let b = linf_bound(2.0, 1.0).unwrap();
        assert!((b - (3.0f64 / 32.0).cbrt()).abs() < 1e-15);
        assert!((b - 0.454_280).abs() < 1e-6);
        let lambda: f64 = 5.0;
        let scaled = linf_bound(2.0, lambda * 0.3).unwrap();
        assert!((scaled - lambda.powf(-1.0 / 3.0) * linf_bound(2.0, 0.3).unwrap()).abs() < 1e-15);
        assert!(linf_bound(2.0, 0.0).is_err());
        assert!(linf_bound(2.0, -1.0).is_err());
    }

    #[test]
    fn tv_examples() {
        let s = ParticleState::new(vec![0.0, 0.5, 1.0], 2.0).unwrap();
        assert_eq!(tv_halfpower(&s), 2.0);
        // scaling all heights by λ: compress positions by 1/λ
        let lambda: f64 = 3.0;
        let c = ParticleState::new(vec![0.0, 0.2, 0.9, 1.0], 2.0).unwrap();
        let compressed =
            ParticleState::new(c.positions().iter().map(|x| x / lambda).collect(), 2.0).unwrap();
        let ratio = tv_halfpower(&compressed) / tv_halfpower(&c);
        assert!((ratio - lambda.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn metric_examples() {
        let a = ParticleState::new(vec![0.0, 0.3, 1.0, 1.5], 2.0).unwrap();
        for order in [MetricOrder::Finite(1), MetricOrder::Finite(2), MetricOrder::Finite(4), MetricOrder::Infinity] {
            assert_eq!(metric_dh(&a, &a, order).unwrap(), 0.0);
            let d = metric_dh(&a, &a.translated(-0.7), order).unwrap();
            assert!((d - 0.7).abs() < 1e-12, "{order}");
        }
        assert_eq!(w1_upper(&a, &a).unwrap(), 0.0);
        let w = w1_upper(&a, &a.translated(0.4)).unwrap();
        assert!((w - 0.4 * 4.0 / 3.0).abs() < 1e-12);
        let other = ParticleState::new(vec![0.0, 1.0], 2.0).unwrap();
        assert!(metric_dh(&a, &other, MetricOrder::Infinity).is_err());
        assert!(w1_upper(&a, &other).is_err());
        // the last particle only enters the all-indices variant
        let b = ParticleState::new(vec![0.0, 0.3, 1.0, 2.5], 2.0).unwrap();
        assert_eq!(metric_dh(&a, &b, MetricOrder::Infinity).unwrap(), 0.0);
        assert_eq!(metric_dh_all(&a, &b, MetricOrder::Infinity).unwrap(), 1.0);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let phi = BumpTestFunction { horizon: 2.0, center: 0.3, width: 1.1 };
        let h = 1e-6;
        for &(t, x) in &[(0.2, 0.1), (1.0, -0.5), (1.7, 1.0)] {
            let dt = (phi.value(t + h, x) - phi.value(t - h, x)) / (2.0 * h);
            let dx = (phi.value(t, x + h) - phi.value(t, x - h)) / (2.0 * h);
            assert!((dt - phi.dt(t, x)).abs() < 1e-7);
            assert!((dx - phi.dx(t, x)).abs() < 1e-7);
        }
        assert_eq!(phi.value(2.0, 0.3), 0.0);
        assert_eq!(phi.value(0.0, 0.3), 1.0);
    }
}
