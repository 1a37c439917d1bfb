//! Exact solutions and error norms.
//!
//! The Barenblatt profile is the self-similar source solution
//!
//! ```text
//! ρ̂(t, x) = t^{-1/(m+1)} B(t^{-1/(m+1)} x),
//! B(ξ)    = (C^{m-1} - (m-1)/(2m(m+1)) ξ²)_+^{1/(m-1)}.
//! ```
//!
//! Its mass is independent of `t`; [`barenblatt_mass_parameter`] returns the
//! `C` that produces a given mass.

use crate::error::Result;
use crate::particles::{validate_exponent, PiecewiseDensity};
use crate::quadrature;
use statrs::function::beta::beta;

/// Self-similar Barenblatt solution with exponent `m` and mass parameter `C_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattProfile {
    m: f64,
    c: f64,
    mass: f64,
}

impl BarenblattProfile {
    /// Profile carrying the given total mass.
    pub fn with_mass(m: f64, mass: f64) -> Result<Self> {
        validate_exponent(m)?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(crate::Error::InvalidParameter { name: "mass", value: mass });
        }
        Ok(Self {
            m,
            c: barenblatt_mass_parameter(m, mass),
            mass,
        })
    }

    /// Unit-mass profile.
    pub fn unit(m: f64) -> Result<Self> {
        Self::with_mass(m, 1.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// The mass parameter `C_m`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn curvature(&self) -> f64 {
        (self.m - 1.0) / (2.0 * self.m * (self.m + 1.0))
    }

    /// Half-width of the support at time `t`.
    pub fn half_width(&self, t: f64) -> f64 {
        (self.c.powf(self.m - 1.0) / self.curvature()).sqrt() * t.powf(1.0 / (self.m + 1.0))
    }

    /// Support `[-a(t), a(t)]`.
    pub fn support(&self, t: f64) -> (f64, f64) {
        let a = self.half_width(t);
        (-a, a)
    }

    /// Maximum value, attained at `x = 0`.
    pub fn peak(&self, t: f64) -> f64 {
        self.c * t.powf(-1.0 / (self.m + 1.0))
    }

    /// `ρ̂(t, x)` for `t > 0`.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let scale = t.powf(-1.0 / (self.m + 1.0));
        let xi = scale * x;
        let base = self.c.powf(self.m - 1.0) - self.curvature() * xi * xi;
        if base <= 0.0 {
            0.0
        } else {
            scale * base.powf(1.0 / (self.m - 1.0))
        }
    }
}

/// The `C_m` making `∫ ρ̂(t, ·) = mass`.
///
/// Substituting `ξ = a s` with `a` the profile half-width gives
/// `mass = C^{(m+1)/2} k^{-1/2} Beta(1/2, 1/(m-1) + 1)` where
/// `k = (m-1)/(2m(m+1))`, which inverts in closed form.
pub fn barenblatt_mass_parameter(m: f64, mass: f64) -> f64 {
    let k = (m - 1.0) / (2.0 * m * (m + 1.0));
    let shape = beta(0.5, 1.0 / (m - 1.0) + 1.0);
    (mass * k.sqrt() / shape).powf(2.0 / (m + 1.0))
}

/// Exact gap of the two-particle system, `(d0^{m+1} + 2(m+1)t)^{1/(m+1)}`.
pub fn n1_gap_closed_form(d0: f64, m: f64, t: f64) -> f64 {
    (d0.powf(m + 1.0) + 2.0 * (m + 1.0) * t).powf(1.0 / (m + 1.0))
}

const ERROR_TOL: f64 = 1e-10;

fn error_breaks(approx: &PiecewiseDensity, support: (f64, f64)) -> Vec<f64> {
    let mut breaks: Vec<f64> = approx.breakpoints().to_vec();
    breaks.push(support.0);
    breaks.push(support.1);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// `∫ |approx - exact|` over the union of both supports.
///
/// Integration is split at every cell boundary of `approx` and at the ends of
/// `support`, so each piece sees a smooth integrand.
pub fn l1_error<F: Fn(f64) -> f64>(approx: &PiecewiseDensity, exact: F, support: (f64, f64)) -> f64 {
    let breaks = error_breaks(approx, support);
    quadrature::integrate_pieces(|x| (approx.eval(x) - exact(x)).abs(), &breaks, ERROR_TOL)
}

/// `(∫ |approx - exact|^p)^{1/p}` with `p = m`.
pub fn lm_error<F: Fn(f64) -> f64>(
    approx: &PiecewiseDensity,
    exact: F,
    support: (f64, f64),
    m: f64,
) -> f64 {
    let breaks = error_breaks(approx, support);
    let integral = quadrature::integrate_pieces(
        |x| (approx.eval(x) - exact(x)).abs().powf(m),
        &breaks,
        ERROR_TOL.powf(m.min(2.0)),
    );
    integral.powf(1.0 / m)
}
