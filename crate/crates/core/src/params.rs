//! Floating-point physical parameters.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be finite and positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("lambda must be finite and non-negative (got {0})")]
    NegativeDamping(f64),
}

/// Damping regime of `q̈ + λq̇ + ω²q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysParams {
    #[serde(serialize_with = "crate::json::sig17")]
    pub m: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub omega: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub lambda: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub hbar: f64,
}

impl PhysParams {
    pub fn new(m: f64, omega: f64, lambda: f64, hbar: f64) -> Result<Self, ParamError> {
        let p = Self { m, omega, lambda, hbar };
        p.validate()?;
        Ok(p)
    }

    /// `m = ħ = ω = 1` with the given damping.
    pub fn natural(lambda: f64) -> Result<Self, ParamError> {
        Self::new(1.0, 1.0, lambda, 1.0)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, value) in [("m", self.m), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ParamError::NonPositive { name, value });
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(ParamError::NegativeDamping(self.lambda));
        }
        Ok(())
    }

    /// Underdamped iff `λ < 2ω`; critical only on exact floating equality.
    pub fn regime(&self) -> Regime {
        let two_omega = 2.0 * self.omega;
        if self.lambda < two_omega {
            Regime::Underdamped
        } else if self.lambda == two_omega {
            Regime::Critical
        } else {
            Regime::Overdamped
        }
    }

    /// `ω² − λ²/4`; negative when overdamped.
    pub fn reduced_omega_sq(&self) -> f64 {
        self.omega * self.omega - self.lambda * self.lambda / 4.0
    }

    /// `Ω = √(ω² − λ²/4)` when `λ ≤ 2ω`.
    pub fn reduced_omega(&self) -> Option<f64> {
        match self.regime() {
            Regime::Overdamped => None,
            Regime::Critical => Some(0.0),
            Regime::Underdamped => Some(self.reduced_omega_sq().max(0.0).sqrt()),
        }
    }

    /// `ħλ/4`.
    pub fn imaginary_offset(&self) -> f64 {
        self.hbar * self.lambda / 4.0
    }

    /// Gauge strength `σ = mλ/4` in `η = exp(iσy²/ħ)`.
    pub fn gauge_sigma(&self) -> f64 {
        self.m * self.lambda / 4.0
    }

    /// Oscillator length `√(ħ/mΩ)`; `None` unless underdamped.
    pub fn oscillator_length(&self) -> Option<f64> {
        match self.regime() {
            Regime::Underdamped => self.reduced_omega().map(|w| (self.hbar / (self.m * w)).sqrt()),
            _ => None,
        }
    }
}
