//! Closed-form spectrum and eigenfunctions of the damped-oscillator
//! Hamiltonian.
//!
//! The gauge `η = exp(imλy²/4ħ)` maps the Hamiltonian onto an undamped
//! oscillator of frequency `Ω = √(ω² − λ²/4)` plus the constant `iħλ/4`, so
//! `E_n = (n + ½)ħΩ + iħλ/4` and `ψ_n = η⁻¹ φ_n(y; m, Ω)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::grid::{Grid, WaveFunction};
use crate::params::{PhysParams, Regime};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(
        "overdamped parameters (lambda = {lambda} > 2 omega = {}): no normalizable spectrum",
        2.0 * omega
    )]
    Overdamped { lambda: f64, omega: f64 },
    #[error("critically damped parameters (lambda = 2 omega = {0}): eigenfunctions are not normalizable")]
    Critical(f64),
}

/// Why a returned level should not be taken at face value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelWarning {
    /// `λ = 2ω`: every level collapses to `iħλ/4`.
    CriticalDegeneracy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexEnergy {
    #[serde(serialize_with = "crate::json::sig17")]
    pub re: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub im: f64,
    pub warning: Option<LevelWarning>,
}

impl ComplexEnergy {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Reduced frequency, or the regime error; `Ω = 0` at critical damping.
fn checked_omega(params: &PhysParams) -> Result<(f64, Option<LevelWarning>), AnalyticError> {
    match params.regime() {
        Regime::Underdamped => Ok((params.reduced_omega_sq().sqrt(), None)),
        Regime::Critical => Ok((0.0, Some(LevelWarning::CriticalDegeneracy))),
        Regime::Overdamped => {
            Err(AnalyticError::Overdamped { lambda: params.lambda, omega: params.omega })
        }
    }
}

/// `E_n = (n + ½)ħΩ + iħλ/4`.
pub fn complex_eigenvalue(n: usize, params: &PhysParams) -> Result<ComplexEnergy, AnalyticError> {
    let (omega_r, warning) = checked_omega(params)?;
    Ok(ComplexEnergy {
        re: (n as f64 + 0.5) * params.hbar * omega_r,
        im: params.imaginary_offset(),
        warning,
    })
}

/// The purely real levels `(n + ½)ħΩ` obtained when the non-Hermitian
/// ordering term is treated as if it were Hermitian.
///
/// Kept only to measure the discrepancy with [`complex_eigenvalue`], which is
/// always `iħλ/4`. Returns `0` at critical damping.
pub fn claimed_real_eigenvalue(n: usize, params: &PhysParams) -> Result<f64, AnalyticError> {
    let (omega_r, _) = checked_omega(params)?;
    Ok((n as f64 + 0.5) * params.hbar * omega_r)
}

/// Physicists' Hermite polynomial `H_n(x)` by `H_{k+1} = 2x H_k − 2k H_{k−1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Above this index the oscillator function is evaluated in log space.
const DIRECT_MAX_N: usize = 20;

/// Normalized Hermite function `(2ⁿ n! √π)^{-½} H_n(ξ) e^{−ξ²/2}`.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    if n <= DIRECT_MAX_N {
        let log_norm = -0.5 * (n as f64 * 2f64.ln() + ln_factorial(n) + 0.5 * PI.ln());
        hermite(n, xi) * (log_norm - 0.5 * xi * xi).exp()
    } else {
        hermite_function_scaled(n, xi)
    }
}

/// Normalized three-term recurrence carried as `value · e^{log_scale}` so that
/// neither the Gaussian underflows nor the polynomial overflows.
fn hermite_function_scaled(n: usize, xi: f64) -> f64 {
    const RESCALE: f64 = 1e150;
    let mut log_scale = -0.5 * xi * xi - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    cur.signum() * (cur.abs().ln() + log_scale).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Normalized oscillator eigenfunction `φ_n(y)` of mass `m` and frequency
/// `freq`. Sign convention: positive on its rightmost lobe.
pub fn oscillator_function(n: usize, y: f64, m: f64, freq: f64, hbar: f64) -> f64 {
    let alpha = m * freq / hbar;
    alpha.powf(0.25) * hermite_function(n, alpha.sqrt() * y)
}

/// `ψ_n(y) = exp(−imλy²/4ħ) φ_n(y; m, Ω)` sampled on `grid`.
pub fn eigenfunction(
    n: usize,
    params: &PhysParams,
    grid: &Grid,
) -> Result<WaveFunction, AnalyticError> {
    let omega_r = match params.regime() {
        Regime::Underdamped => params.reduced_omega_sq().sqrt(),
        Regime::Critical => return Err(AnalyticError::Critical(params.lambda)),
        Regime::Overdamped => {
            return Err(AnalyticError::Overdamped { lambda: params.lambda, omega: params.omega })
        }
    };
    let sigma = params.gauge_sigma();
    Ok(WaveFunction::from_fn(*grid, |y| {
        let phi = oscillator_function(n, y, params.m, omega_r, params.hbar);
        Complex64::from_polar(phi, -sigma * y * y / params.hbar)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeDirection {
    /// Multiply by `η = exp(+imλy²/4ħ)`.
    Forward,
    /// Multiply by `η⁻¹`.
    Inverse,
}

/// Pointwise multiplication by `exp(±imλy²/4ħ)`.
pub fn apply_gauge(psi: &WaveFunction, params: &PhysParams, direction: GaugeDirection) -> WaveFunction {
    let sign = match direction {
        GaugeDirection::Forward => 1.0,
        GaugeDirection::Inverse => -1.0,
    };
    let sigma = params.gauge_sigma();
    let grid = psi.grid;
    let values = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let y = grid.node(j);
            v * Complex64::from_polar(1.0, sign * sigma * y * y / params.hbar)
        })
        .collect();
    WaveFunction { grid, values }
}
