//! Lagrangian particle scheme for the one-dimensional porous medium equation
//! `ρ_t = (ρ^m)_xx`, `m > 1`.
//!
//! A probability density is represented by `N + 1` ordered particles with
//! mass `1/N` between neighbours. The particles move with velocity
//! `ẋ_i = -N (R_{i+1}^m - R_i^m)`, where `R_i = 1/(N (x_i - x_{i-1}))` is the
//! density of the `i`-th interval and `R_0 = R_{N+1} = 0`.
//!
//! The crate provides:
//!
//! * [`particles`] and [`difference`]: states, densities, difference quotients;
//! * [`sampling`]: initial configurations from densities, the barrier
//!   configuration and the 1-Wasserstein distance;
//! * [`dynamics`]: velocities and an adaptive Dormand-Prince integrator;
//! * [`diagnostics`]: the discrete Aronson-Bénilan quantity `Z_k`, support,
//!   sup-norm and total-variation bounds, contraction metrics, and the
//!   weak-form consistency identity;
//! * [`reference`]: Barenblatt profiles, the two-particle closed form and
//!   error norms;
//! * [`report`]: CSV output.
//!
//! ```
//! use pme_particles::prelude::*;
//!
//! let profile = BarenblattProfile::unit(2.0)?;
//! let rho = DensitySpec::barenblatt(profile, 1.0)?;
//! let initial = sample_support_preserving(&rho, 50, 2.0)?;
//! let cfg = IntegratorConfig::default().with_uniform_times(1.0, 4);
//! let traj = integrate(&initial, &cfg)?;
//! assert!(check_ab(&traj).passed());
//! # Ok::<(), pme_particles::Error>(())
//! ```

pub mod diagnostics;
pub mod difference;
pub mod dynamics;
mod error;
pub mod particles;
pub mod quadrature;
pub mod reference;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diagnostics::{
        check_ab, check_contraction, consistency_triple, diagnostics_series, metric_dh,
        support_length, verify_trajectory, z_vector, Bound, BumpTestFunction, MetricOrder,
        TestFunction,
    };
    pub use crate::dynamics::{integrate, rhs, IntegratorConfig, Trajectory};
    pub use crate::particles::{ParticleState, PiecewiseDensity};
    pub use crate::reference::{l1_error, lm_error, n1_gap_closed_form, BarenblattProfile};
    pub use crate::sampling::{
        barrier_configuration, sample_support_preserving, wasserstein1, BarrierConfig, DensitySpec,
    };
    pub use crate::{Error, Result};
}

// Code blocks in the guide under book/ compile and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/particles.md")]
    mod particles {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/support.md")]
    mod support {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
