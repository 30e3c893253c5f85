//! `evolve`: Crank–Nicolson propagation of an analytic eigenstate (or a
//! two-level superposition) and a fit of the norm growth rate.

use num_complex::Complex64;
use serde::Serialize;

use dho_core::analytic::eigenfunction;
use dho_core::discretize::assemble;
use dho_core::evolve::{growth_rate, propagate, EvolutionSeries};
use dho_core::json::sig17;
use dho_core::{PhysParams, WaveFunction};

use super::spectrum::require_underdamped;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{to_json, write_with, Outcome, Status};

/// Relative tolerance on the fitted slope when `λ > 0`.
pub const SLOPE_RELATIVE_TOLERANCE: f64 = 1e-3;
/// Absolute tolerance on the slope when `λ = 0`.
pub const UNDAMPED_SLOPE_TOLERANCE: f64 = 1e-6;
/// An eigenstate must keep this overlap with its initial profile.
pub const OVERLAP_FLOOR: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Level(usize),
    /// `ψ_a + ψ_b`.
    Superposition(usize, usize),
}

impl std::str::FromStr for InitialState {
    type Err = String;

    /// `3` or `0+1`.
    fn from_str(s: &str) -> Result<Self, String> {
        let level = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid level {t:?}"));
        match s.split_once('+') {
            Some((a, b)) => Ok(InitialState::Superposition(level(a)?, level(b)?)),
            None => Ok(InitialState::Level(level(s)?)),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Level(n) => write!(f, "{n}"),
            InitialState::Superposition(a, b) => write!(f, "{a}+{b}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub command: &'static str,
    pub status: Status,
    pub params: PhysParams,
    pub initial_state: String,
    #[serde(serialize_with = "sig17")]
    pub dt: f64,
    pub steps: usize,
    #[serde(serialize_with = "sig17")]
    pub slope: f64,
    /// `2·Im E/ħ = λ/2`.
    #[serde(serialize_with = "sig17")]
    pub expected_slope: f64,
    #[serde(serialize_with = "sig17")]
    pub slope_error: f64,
    #[serde(serialize_with = "sig17")]
    pub min_overlap: f64,
    #[serde(serialize_with = "sig17")]
    pub max_abs_position: f64,
}

fn initial_wave(state: InitialState, params: &PhysParams, grid: &dho_core::Grid) -> Result<WaveFunction, CliError> {
    let regime = |e: dho_core::analytic::AnalyticError| CliError::Regime(e.to_string());
    Ok(match state {
        InitialState::Level(n) => eigenfunction(n, params, grid).map_err(regime)?,
        InitialState::Superposition(a, b) => {
            let fa = eigenfunction(a, params, grid).map_err(regime)?;
            let fb = eigenfunction(b, params, grid).map_err(regime)?;
            let values = fa.values.iter().zip(&fb.values).map(|(x, y)| (x + y) * Complex64::new(0.5f64.sqrt(), 0.0));
            WaveFunction::new(*grid, values.collect())
        }
    })
}

pub fn simulate(cfg: &RunConfig, state: InitialState) -> Result<(EvolveReport, EvolutionSeries), CliError> {
    let params = cfg.phys().map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = cfg.grid().map_err(|e| CliError::Usage(e.to_string()))?;
    require_underdamped(&params)?;
    let op = assemble(&params, &grid, cfg.form, cfg.stencil).map_err(|e| CliError::Usage(e.to_string()))?;
    let psi0 = initial_wave(state, &params, &grid)?;
    let dt = cfg.dt_f64();
    let series = propagate(&op, &psi0, dt, cfg.steps).map_err(|e| CliError::Numerical(e.to_string()))?;
    let slope = growth_rate(&series).map_err(|e| CliError::Numerical(e.to_string()))?;

    let expected = 2.0 * params.imaginary_offset() / params.hbar;
    let slope_error = (slope - expected).abs();
    let slope_ok = if params.lambda > 0.0 {
        slope_error <= SLOPE_RELATIVE_TOLERANCE * expected
    } else {
        slope_error <= UNDAMPED_SLOPE_TOLERANCE
    };
    let stationary_ok = match state {
        InitialState::Level(_) => series.min_overlap() >= OVERLAP_FLOOR,
        InitialState::Superposition(..) => true,
    };
    let report = EvolveReport {
        command: "evolve",
        status: Status::from_bool(slope_ok && stationary_ok),
        params,
        initial_state: state.to_string(),
        dt,
        steps: cfg.steps,
        slope,
        expected_slope: expected,
        slope_error,
        min_overlap: series.min_overlap(),
        max_abs_position: series.max_abs_position(),
    };
    Ok((report, series))
}

pub fn run(cfg: &RunConfig, state: InitialState) -> Result<(EvolveReport, Outcome), CliError> {
    let (report, series) = simulate(cfg, state)?;
    let json = to_json(&report);
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out {
        let path = dir.join("evolution.csv");
        write_with(&path, |buf| series.write_csv(buf))?;
        artifacts.push(path);
        let path = dir.join("evolution.json");
        crate::output::write_atomic(&path, json.as_bytes())?;
        artifacts.push(path);
    }
    let details = vec![
        format!(
            "initial state {} | dt {} | steps {} | form {} | N {}",
            report.initial_state,
            report.dt,
            report.steps,
            cfg.form,
            cfg.points
        ),
        format!("  min overlap with the initial state {:.12}", report.min_overlap),
        format!("  max |<y>| {:.3e}", report.max_abs_position),
    ];
    let summary = format!(
        "d ln||psi||^2/dt = {:.9} vs 2*Im(E)/hbar = lambda/2 = {:.9} (|diff| {:.3e})",
        report.slope, report.expected_slope, report.slope_error
    );
    Ok((report.clone(), Outcome { status: report.status, summary, details, json, artifacts }))
}
