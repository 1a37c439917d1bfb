//! Initial configurations from probability densities.
//!
//! Densities are described by a [`DensitySpec`]: an evaluator together with
//! its (compact) support. The cumulative distribution is computed by adaptive
//! quadrature and inverted by bracketed root finding, which yields the
//! right-continuous pseudo-inverse `X_ρ(z) = inf{x : F_ρ(x) > z}` and the
//! support-preserving particle sampling.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::particles::{validate_exponent, ParticleState, PiecewiseDensity};
use crate::quadrature;
use crate::reference::BarenblattProfile;

/// Absolute tolerance of every CDF evaluation.
pub const CDF_TOL: f64 = 1e-12;
/// Absolute tolerance in `x` of quantile inversion.
pub const QUANTILE_XTOL: f64 = 1e-10;
/// Allowed deviation of a spec's numeric mass from one.
pub const MASS_TOL: f64 = 1e-8;

/// Number of probe points used to look for interior zero-density intervals.
const GAP_PROBES: usize = 4096;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A unit-mass density with compact support `[a, b]`.
///
/// Optional knots mark points where the evaluator is not smooth; quadrature
/// is split there.
#[derive(Clone)]
pub struct DensitySpec {
    label: String,
    eval: DensityFn,
    support: (f64, f64),
    knots: Vec<f64>,
    mass: f64,
}

impl fmt::Debug for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensitySpec")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("mass", &self.mass)
            .finish()
    }
}

impl DensitySpec {
    /// Wraps an evaluator supported on `[a, b]`; fails unless its mass is one.
    pub fn new<F>(label: impl Into<String>, support: (f64, f64), eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_knots(label, support, Vec::new(), eval)
    }

    pub fn with_knots<F>(
        label: impl Into<String>,
        support: (f64, f64),
        knots: Vec<f64>,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (a, b) = support;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter {
                name: "support width",
                value: b - a,
            });
        }
        let mut knots: Vec<f64> = knots.into_iter().filter(|k| *k > a && *k < b).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut spec = Self {
            label: label.into(),
            eval: Arc::new(eval),
            support,
            knots,
            mass: 0.0,
        };
        spec.mass = spec.mass_between(a, b);
        if (spec.mass - 1.0).abs() > MASS_TOL {
            return Err(Error::MassMismatch { mass: spec.mass });
        }
        Ok(spec)
    }

    /// Uniform density on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let height = 1.0 / (b - a);
        Self::new(format!("uniform {a} {b}"), (a, b), move |x| {
            if x >= a && x <= b {
                height
            } else {
                0.0
            }
        })
    }

    /// Barenblatt profile at time `t0`.
    pub fn barenblatt(profile: BarenblattProfile, t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidParameter { name: "t0", value: t0 });
        }
        Self::new(
            format!("barenblatt {} {} {}", profile.m(), t0, profile.mass()),
            profile.support(t0),
            move |x| profile.eval(t0, x),
        )
    }

    /// Normal density centred in `[a, b]`, truncated to it and renormalised.
    pub fn gaussian_truncated(a: f64, b: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter { name: "sigma", value: sigma });
        }
        let center = 0.5 * (a + b);
        let shape = move |x: f64| (-0.5 * ((x - center) / sigma).powi(2)).exp();
        let norm = quadrature::integrate(shape, a, b, 1e-14);
        Self::new(format!("gaussian-truncated {a} {b} {sigma}"), (a, b), move |x| {
            if x >= a && x <= b {
                shape(x) / norm
            } else {
                0.0
            }
        })
    }

    /// A piecewise-constant density (for instance a reconstruction).
    pub fn piecewise(label: impl Into<String>, density: &PiecewiseDensity) -> Result<Self> {
        let support = density.support();
        let knots = density.breakpoints().to_vec();
        let density = density.clone();
        Self::with_knots(label, support, knots, move |x| density.eval(x))
    }

    /// The density reconstructed from the barrier configuration.
    pub fn barrier(cfg: &BarrierConfig) -> Result<Self> {
        let state = barrier_configuration(cfg);
        Self::piecewise(
            format!("barrier {} {} {} {}", cfg.n, cfg.m, cfg.beta, cfg.alpha),
            &state.reconstruct(),
        )
    }

    /// Parses `uniform a b`, `barenblatt m t0 mass`, `barrier N m beta alpha`
    /// or `gaussian-truncated a b sigma`.
    pub fn parse(spec: &str) -> Result<Self> {
        let fail = |reason: &str| Error::DensitySpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let mut words = spec.split_whitespace();
        let kind = words.next().ok_or_else(|| fail("empty spec"))?;
        let args: Vec<f64> = words
            .map(|w| w.parse::<f64>().map_err(|_| fail(&format!("`{w}` is not a number"))))
            .collect::<Result<_>>()?;
        let expect = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(fail(&format!("`{kind}` takes {n} numbers, got {}", args.len())))
            }
        };
        match kind {
            "uniform" => {
                expect(2)?;
                Self::uniform(args[0], args[1])
            }
            "barenblatt" => {
                expect(3)?;
                if (args[2] - 1.0).abs() > MASS_TOL {
                    return Err(fail("particle densities carry unit mass"));
                }
                Self::barenblatt(BarenblattProfile::with_mass(args[0], args[2])?, args[1])
            }
            "barrier" => {
                expect(4)?;
                if args[0].fract() != 0.0 || args[0] < 0.0 {
                    return Err(fail("N must be a non-negative integer"));
                }
                let cfg = BarrierConfig::new(args[0] as usize, args[1], args[2], args[3])?;
                Self::barrier(&cfg)
            }
            "gaussian-truncated" => {
                expect(3)?;
                Self::gaussian_truncated(args[0], args[1], args[2])
            }
            other => Err(fail(&format!("unknown density kind `{other}`"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Numeric total mass over the support.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Mass of `[lo, hi]`, split at the spec's knots.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut breaks = vec![lo];
        breaks.extend(self.knots.iter().copied().filter(|k| *k > lo && *k < hi));
        breaks.push(hi);
        quadrature::integrate_pieces(|x| self.eval(x), &breaks, CDF_TOL)
    }

    /// Cumulative distribution `F(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x <= a {
            0.0
        } else {
            self.mass_between(a, x.min(b))
        }
    }

    fn find_interior_gap(&self) -> Option<f64> {
        let (a, b) = self.support;
        let h = (b - a) / GAP_PROBES as f64;
        let positive: Vec<bool> = (0..GAP_PROBES)
            .map(|j| self.eval(a + (j as f64 + 0.5) * h) > 0.0)
            .collect();
        let first = positive.iter().position(|p| *p)?;
        let last = positive.iter().rposition(|p| *p)?;
        (first..=last)
            .find(|&j| !positive[j])
            .map(|j| a + (j as f64 + 0.5) * h)
    }
}

/// Right-continuous pseudo-inverse `inf{x : F(x) > z}` for `0 < z < 1`.
pub fn cdf_pseudo_inverse(rho: &DensitySpec, z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidParameter { name: "quantile level", value: z });
    }
    let (a, b) = rho.support;
    if rho.cdf(b) <= z {
        return Err(Error::Bracketing { level: z, lo: a, hi: b });
    }
    Ok(quadrature::first_crossing(|x| rho.cdf(x) - z, a, b, QUANTILE_XTOL))
}

/// Quantile values `X_ρ(z_j)` on a grid of levels in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileTable {
    pub fn new(rho: &DensitySpec, grid: Vec<f64>) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&z| cdf_pseudo_inverse(rho, z))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Support-preserving sampling into `N` equal-mass intervals.
///
/// `x_0` and `x_N` are the ends of the support; `x_i` is the smallest point
/// such that `(x_{i-1}, x_i]` carries mass `1/N`. Each interval is solved
/// relative to the previous particle with the target cumulative mass `i/N`,
/// so quadrature errors do not accumulate along the sweep.
pub fn sample_support_preserving(rho: &DensitySpec, n: usize, m: f64) -> Result<ParticleState> {
    validate_exponent(m)?;
    if n == 0 {
        return Err(Error::TooFewParticles(1));
    }
    if let Some(at) = rho.find_interior_gap() {
        return Err(Error::InteriorGap { at });
    }
    let (a, b) = rho.support;
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(a);
    let quantum = 1.0 / n as f64;
    for i in 1..n {
        let prev = positions[i - 1];
        // remaining mass needed past x_{i-1}, assuming F(x_{i-1}) = (i-1)/N
        let target = quantum;
        let g = |x: f64| rho.mass_between(prev, x) - target;
        if g(b) < 0.0 {
            return Err(Error::Bracketing {
                level: i as f64 * quantum,
                lo: prev,
                hi: b,
            });
        }
        // "mass >= 1/N": the first x with g(x) >= 0, found as the crossing of
        // g(x) > -tiny so exact hits count as reached.
        let x = quadrature::first_crossing(|x| g(x) + 0.5 * CDF_TOL, prev, b, QUANTILE_XTOL);
        positions.push(x);
    }
    positions.push(b);
    ParticleState::new(positions, m)
}

/// Parameters of the barrier configuration.
///
/// Densities `S_k = 1 / (β f((k - 1/2)/N))` with `f(z) = (z(1-z))^{-1/m}`,
/// positions `y_j = α + (1/N) Σ_{k≤j} 1/S_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConfig {
    pub n: usize,
    pub m: f64,
    pub beta: f64,
    pub alpha: f64,
    /// `ℓ = ∫₀¹ f(z) dz`.
    pub ell: f64,
}

impl BarrierConfig {
    pub fn new(n: usize, m: f64, beta: f64, alpha: f64) -> Result<Self> {
        validate_exponent(m)?;
        if n < 4 {
            return Err(Error::InvalidParameter {
                name: "barrier N (needs N >= 4)",
                value: n as f64,
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter { name: "beta", value: beta });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha });
        }
        Ok(Self {
            n,
            m,
            beta,
            alpha,
            ell: barrier_ell(m),
        })
    }

    /// The barrier weight `f(z) = (z(1-z))^{-1/m}`.
    pub fn weight(&self, z: f64) -> f64 {
        (z * (1.0 - z)).powf(-1.0 / self.m)
    }

    /// Densities `S_1, ..., S_N`.
    pub fn densities(&self) -> Vec<f64> {
        let n = self.n as f64;
        (1..=self.n)
            .map(|k| 1.0 / (self.beta * self.weight((k as f64 - 0.5) / n)))
            .collect()
    }

    /// Universal lower bound `-Λ` on `S_k Δ_k[S^m]`, `Λ = 2 / (4^{1/m} β^{m+1})`.
    pub fn lambda(&self) -> f64 {
        2.0 / (4f64.powf(1.0 / self.m) * self.beta.powf(self.m + 1.0))
    }
}

/// `ℓ(m) = ∫₀¹ (z(1-z))^{-1/m} dz`.
///
/// By symmetry this is twice the integral over `(0, 1/2)`. There the
/// substitution `z = u^k` with `k = m/(m-1)` turns the endpoint singularity
/// `z^{-1/m}` into the bounded integrand `k (1 - u^k)^{-1/m}`.
pub fn barrier_ell(m: f64) -> f64 {
    let k = m / (m - 1.0);
    let upper = 0.5f64.powf(1.0 / k);
    2.0 * quadrature::integrate(|u| k * (1.0 - u.powf(k)).powf(-1.0 / m), 0.0, upper, 1e-14)
}

/// Positions `y_0, ..., y_N` of the barrier configuration.
pub fn barrier_configuration(cfg: &BarrierConfig) -> ParticleState {
    let n = cfg.n as f64;
    let mut positions = Vec::with_capacity(cfg.n + 1);
    let mut y = cfg.alpha;
    positions.push(y);
    for s in cfg.densities() {
        y += 1.0 / (n * s);
        positions.push(y);
    }
    ParticleState::from_parts_unchecked(positions, cfg.m, 0.0)
}

fn cumulative(p: &PiecewiseDensity) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for mass in p.cell_masses() {
        acc += mass;
        out.push(acc);
    }
    out
}

/// Linear piece of the quantile function of `p` that covers level `z`,
/// evaluated at `at`.
fn quantile_piece(p: &PiecewiseDensity, cum: &[f64], z: f64, at: f64) -> f64 {
    let heights = p.heights();
    let breaks = p.breakpoints();
    // cell j (0-based) covers cumulative levels [cum[j], cum[j+1])
    let mut j = cum.partition_point(|&c| c <= z).saturating_sub(1);
    j = j.min(heights.len() - 1);
    // skip zero-mass cells
    while heights[j] == 0.0 && j + 1 < heights.len() {
        j += 1;
    }
    if heights[j] == 0.0 {
        return breaks[j + 1];
    }
    breaks[j] + (at - cum[j]) / heights[j]
}

/// 1-Wasserstein distance between two unit-mass piecewise-constant densities.
///
/// Both quantile functions are piecewise linear; on the merged grid of their
/// cumulative-mass breakpoints the difference is affine, and its absolute
/// value is integrated exactly on every piece.
pub fn wasserstein1(p: &PiecewiseDensity, q: &PiecewiseDensity) -> f64 {
    let cp = cumulative(p);
    let cq = cumulative(q);
    let mut levels: Vec<f64> = cp.iter().chain(cq.iter()).map(|c| c.clamp(0.0, 1.0)).collect();
    levels.push(1.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (z0, z1) = (w[0], w[1]);
            let mid = 0.5 * (z0 + z1);
            let d0 = quantile_piece(p, &cp, mid, z0) - quantile_piece(q, &cq, mid, z0);
            let d1 = quantile_piece(p, &cp, mid, z1) - quantile_piece(q, &cq, mid, z1);
            let width = z1 - z0;
            if d0 * d1 >= 0.0 {
                0.5 * (d0.abs() + d1.abs()) * width
            } else {
                0.5 * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs()) * width
            }
        })
        .sum()
}
