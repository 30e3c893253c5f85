//! Uniform grids and complex samples on them.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Smallest grid that still has interior rows for the five-point stencil.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid half-width must be finite and positive (got {0})")]
    HalfWidth(f64),
    #[error("grid needs at least {MIN_POINTS} points (got {0})")]
    TooFewPoints(usize),
}

/// `N` nodes `y_j = −L + j·h` with `h = 2L/(N − 1)`, Dirichlet outside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    #[serde(serialize_with = "crate::json::sig17")]
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(half_width: f64, points: usize) -> Result<Self, GridError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(GridError::HalfWidth(half_width));
        }
        if points < MIN_POINTS {
            return Err(GridError::TooFewPoints(points));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Node `j`. Computed as `L·(2j − (N−1))/(N−1)` so that mirrored nodes are
    /// exact negatives and the end points are exactly `±L`.
    pub fn node(&self, j: usize) -> f64 {
        let last = (self.points - 1) as f64;
        self.half_width * (2.0 * j as f64 - last) / last
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Trapezoidal weights.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j + 1 == self.points {
            0.5 * h
        } else {
            h
        }
    }

    /// Same grid with the spacing halved (`2N − 1` points).
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, points: 2 * self.points - 1 }
    }
}

/// Complex samples of a wave function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(grid.len(), values.len(), "sample count must match the grid");
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.node(j))).collect();
        Self { grid, values }
    }

    /// Trapezoidal `∫ ψ̄ φ dy`.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(j, (a, b))| a.conj() * b * self.grid.weight(j))
            .sum()
    }

    /// Trapezoidal `∫ |ψ|² dy`.
    pub fn norm_sq(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| v.norm_sqr() * self.grid.weight(j))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `Re ∫ ψ̄ y ψ dy / ‖ψ‖²`.
    pub fn mean_position(&self) -> f64 {
        let first: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| v.norm_sqr() * self.grid.node(j) * self.grid.weight(j))
            .sum();
        first / self.norm_sq()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
