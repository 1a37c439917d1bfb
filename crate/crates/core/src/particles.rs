//! Particle configurations and the quantities read off them.
//!
//! A configuration is an ordered set of `N + 1` positions `x_0 < ... < x_N`.
//! Each of the `N` intervals carries mass `1/N`, so its density is
//! `R_i = 1 / (N d_i)` with `d_i = x_i - x_{i-1}`.

use crate::error::{Error, Result};

/// Ordered positions `x_0 < x_1 < ... < x_N` at time `t`, for exponent `m > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    positions: Vec<f64>,
    m: f64,
    t: f64,
}

impl ParticleState {
    /// A state at time `t = 0`.
    pub fn new(positions: Vec<f64>, m: f64) -> Result<Self> {
        Self::at_time(positions, m, 0.0)
    }

    pub fn at_time(positions: Vec<f64>, m: f64, t: f64) -> Result<Self> {
        validate_exponent(m)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter { name: "time", value: t });
        }
        validate_positions(&positions)?;
        Ok(Self { positions, m, t })
    }

    /// Equally spaced particles on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize, m: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewParticles(1));
        }
        let h = (b - a) / n as f64;
        let mut positions: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        positions[n] = b;
        Self::new(positions, m)
    }

    /// Bypasses validation; callers guarantee ordering.
    pub(crate) fn from_parts_unchecked(positions: Vec<f64>, m: f64, t: f64) -> Self {
        Self { positions, m, t }
    }

    /// Number of intervals `N` (one less than the number of particles).
    pub fn n(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn into_positions(self) -> Vec<f64> {
        self.positions
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// The same configuration shifted by `c`.
    pub fn translated(&self, c: f64) -> Self {
        Self {
            positions: self.positions.iter().map(|x| x + c).collect(),
            m: self.m,
            t: self.t,
        }
    }

    /// Interval lengths `d_i = x_i - x_{i-1}`.
    pub fn gaps(&self) -> GapVector {
        GapVector(self.positions.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// Interval densities `R_i = 1 / (N d_i)`.
    pub fn densities(&self) -> DensityVector {
        let n = self.n() as f64;
        DensityVector(
            self.positions
                .windows(2)
                .map(|w| 1.0 / (n * (w[1] - w[0])))
                .collect(),
        )
    }

    /// Piecewise-constant density with height `R_i` on `[x_{i-1}, x_i)`.
    pub fn reconstruct(&self) -> PiecewiseDensity {
        PiecewiseDensity {
            breakpoints: self.positions.clone(),
            heights: self.densities().0,
        }
    }
}

pub(crate) fn validate_exponent(m: f64) -> Result<()> {
    if m.is_finite() && m > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(m))
    }
}

fn validate_positions(positions: &[f64]) -> Result<()> {
    if positions.len() < 2 {
        return Err(Error::TooFewParticles(positions.len()));
    }
    if let Some(index) = positions.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinitePosition { index });
    }
    for (i, w) in positions.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NotStrictlyIncreasing {
                index: i + 1,
                left: w[0],
                right: w[1],
            });
        }
    }
    Ok(())
}

/// Interval lengths `d_1, ..., d_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapVector(Vec<f64>);

impl GapVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Interval densities `R_1, ..., R_N`; `R_0 = R_{N+1} = 0` by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `R_k` for `k = 0..=N+1`, zero outside `1..=N`.
    pub fn padded(&self, k: usize) -> f64 {
        if k == 0 || k > self.0.len() {
            0.0
        } else {
            self.0[k - 1]
        }
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Componentwise power `R_i^p`.
    pub fn powf(&self, p: f64) -> Vec<f64> {
        self.0.iter().map(|r| r.powf(p)).collect()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// A piecewise-constant density: `heights[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        validate_positions(&breakpoints)?;
        if heights.len() + 1 != breakpoints.len() {
            return Err(Error::DimensionMismatch {
                left: breakpoints.len() - 1,
                right: heights.len(),
            });
        }
        if let Some(&h) = heights.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "height",
                value: h,
            });
        }
        Ok(Self {
            breakpoints,
            heights,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    /// Mass of each cell, `heights[i] * (breakpoints[i+1] - breakpoints[i])`.
    pub fn cell_masses(&self) -> Vec<f64> {
        self.heights
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(h, w)| h * (w[1] - w[0]))
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.cell_masses().iter().sum()
    }

    /// Value at `x`; right-open cells, zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if !(x >= a && x < b) {
            return 0.0;
        }
        // first breakpoint strictly greater than x
        let j = self.breakpoints.partition_point(|&p| p <= x);
        self.heights[j - 1]
    }

    /// Same shape with every height multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            heights: self.heights.iter().map(|h| h * factor).collect(),
        }
    }

    pub fn translated(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|x| x + c).collect(),
            heights: self.heights.clone(),
        }
    }
}
