//! `gauge-check`: the matrix counterparts of the operator identities.
//!
//! * `EQ2 − EQ5 = (λ/4)([Y, P] − iħI)` entry by entry;
//! * the anti-Hermitian part of the symmetrized matrix is `iħλ/4·I`;
//! * EQ2 and EQ5 trusted levels agree within the commutator-defect bound;
//! * analytic eigenfunctions satisfy the symmetrized matrix, and their gauge
//!   images satisfy the conjugated matrix, with interior residuals that
//!   shrink under grid refinement.

use num_complex::Complex64;
use serde::Serialize;

use dho_core::analytic::{apply_gauge, complex_eigenvalue, eigenfunction, GaugeDirection};
use dho_core::discretize::{
    assemble, boundary_commutator_defect, position_momentum_commutator, MatrixForm, OperatorMatrix, Stencil,
};
use dho_core::eigensolve::residual;
use dho_core::json::{sig17, sig17_seq};
use dho_core::linalg::CMatrix;
use dho_core::{Grid, PhysParams};

use super::spectrum::{compute_levels, require_underdamped};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{to_json, write_atomic, Outcome, Status};

/// Residuals are checked for `n ≤ RESIDUAL_LEVELS − 1`.
pub const RESIDUAL_LEVELS: usize = 6;
pub const RESIDUAL_TOLERANCE: f64 = 1e-3;
/// Smallest acceptable `r(h)/r(h/2)` (second order gives ≈4).
pub const MIN_REFINEMENT_RATIO: f64 = 3.5;
/// Absolute floor in the form-equivalence bound.
pub const FORM_AGREEMENT_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub n: usize,
    /// Symmetrized matrix, analytic `ψ_n`.
    #[serde(serialize_with = "sig17")]
    pub residual: f64,
    /// Same on the grid with half the spacing.
    #[serde(serialize_with = "sig17")]
    pub residual_refined: f64,
    #[serde(serialize_with = "sig17")]
    pub refinement_ratio: f64,
    /// Gauge-conjugated matrix, oscillator function `ηψ_n`.
    #[serde(serialize_with = "sig17")]
    pub gauge_residual: f64,
    /// Reduced-oscillator matrix `K + m(ω² − λ²/4)y²/2 + iħλ/4`, `ηψ_n`.
    #[serde(serialize_with = "sig17")]
    pub target_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    pub command: &'static str,
    pub status: Status,
    pub params: PhysParams,
    pub points: usize,
    pub stencil: Stencil,
    #[serde(serialize_with = "sig17")]
    pub identity_max_deviation: f64,
    #[serde(serialize_with = "sig17")]
    pub identity_tolerance: f64,
    #[serde(serialize_with = "sig17")]
    pub anti_hermitian_max_deviation: f64,
    #[serde(serialize_with = "sig17_seq")]
    pub eq2_minus_eq5: Vec<f64>,
    #[serde(serialize_with = "sig17")]
    pub form_max_difference: f64,
    #[serde(serialize_with = "sig17")]
    pub form_bound: f64,
    pub residuals: Vec<ResidualEntry>,
}

impl GaugeReport {
    pub fn identity_holds(&self) -> bool {
        self.identity_max_deviation <= self.identity_tolerance
            && self.anti_hermitian_max_deviation <= self.identity_tolerance
    }

    pub fn forms_agree(&self) -> bool {
        self.form_max_difference <= self.form_bound
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn min_refinement_ratio(&self) -> f64 {
        self.residuals.iter().map(|r| r.refinement_ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn residuals_ok(&self) -> bool {
        self.max_residual() <= RESIDUAL_TOLERANCE && self.min_refinement_ratio() >= MIN_REFINEMENT_RATIO
    }
}

/// Largest `|(EQ2 − EQ5) − (λ/4)([Y,P] − iħI)|` and a tolerance of a few
/// ulps of the largest entry.
pub fn matrix_identity(eq2: &OperatorMatrix, eq5: &OperatorMatrix) -> (f64, f64) {
    let p = eq2.params;
    let n = eq2.dim();
    let comm = position_momentum_commutator(&eq2.grid, &p, eq2.stencil);
    let shifted = comm.sub(&CMatrix::identity(n).scale(Complex64::new(0.0, p.hbar)));
    let expected = shifted.scale(Complex64::new(p.lambda / 4.0, 0.0));
    let dev = eq2.matrix.sub(&eq5.matrix).sub(&expected).max_abs();
    let scale = eq2.matrix.max_abs().max(eq5.matrix.max_abs());
    (dev, 16.0 * f64::EPSILON * scale)
}

pub fn anti_hermitian_deviation(eq5: &OperatorMatrix) -> f64 {
    let p = eq5.params;
    let offset = CMatrix::identity(eq5.dim()).scale(Complex64::new(0.0, p.imaginary_offset()));
    eq5.matrix.anti_hermitian_part().sub(&offset).max_abs()
}

/// `K + m(ω² − λ²/4)y²/2 + iħλ/4`: the undamped matrix at the reduced
/// frequency plus the constant.
fn target_matrix(params: &PhysParams, grid: &Grid, stencil: Stencil) -> Result<CMatrix, CliError> {
    let reduced = PhysParams::new(params.m, params.reduced_omega_sq().sqrt(), 0.0, params.hbar)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let base = assemble(&reduced, grid, MatrixForm::Eq5, stencil).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(base.matrix.add(&CMatrix::identity(grid.len()).scale(Complex64::new(0.0, params.imaginary_offset()))))
}

pub fn residual_table(
    params: &PhysParams,
    grid: &Grid,
    stencil: Stencil,
    levels: usize,
) -> Result<Vec<ResidualEntry>, CliError> {
    let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
    let op = assemble(params, grid, MatrixForm::Eq5, stencil).map_err(|e| usage(&e))?;
    let gauged = op.gauge_conjugated(GaugeDirection::Forward);
    let target = target_matrix(params, grid, stencil)?;
    let fine_grid = grid.refined();
    let fine = assemble(params, &fine_grid, MatrixForm::Eq5, stencil).map_err(|e| usage(&e))?;

    let mut out = Vec::with_capacity(levels);
    for n in 0..levels {
        let energy = complex_eigenvalue(n, params).map_err(|e| CliError::Regime(e.to_string()))?.value();
        let psi = eigenfunction(n, params, grid).map_err(|e| CliError::Regime(e.to_string()))?;
        let psi_fine = eigenfunction(n, params, &fine_grid).map_err(|e| CliError::Regime(e.to_string()))?;
        let phi = apply_gauge(&psi, params, GaugeDirection::Forward);
        let numerical = |e: dho_core::eigensolve::DimensionMismatch| CliError::Numerical(e.to_string());
        let r = residual(&op.matrix, &psi, energy).map_err(numerical)?;
        let r_fine = residual(&fine.matrix, &psi_fine, energy).map_err(numerical)?;
        out.push(ResidualEntry {
            n,
            residual: r,
            residual_refined: r_fine,
            refinement_ratio: r / r_fine,
            gauge_residual: residual(&gauged.matrix, &phi, energy).map_err(numerical)?,
            target_residual: residual(&target, &phi, energy).map_err(numerical)?,
        });
    }
    Ok(out)
}

pub fn check(cfg: &RunConfig) -> Result<GaugeReport, CliError> {
    let params = cfg.phys().map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = cfg.grid().map_err(|e| CliError::Usage(e.to_string()))?;
    require_underdamped(&params)?;
    let stencil = cfg.stencil;
    let k = cfg.levels;

    // the two dense eigensolves dominate; run them side by side
    let (eq2, eq5) = std::thread::scope(|s| {
        let h2 = s.spawn(|| compute_levels(&params, &grid, MatrixForm::Eq2, stencil, k));
        let h5 = s.spawn(|| compute_levels(&params, &grid, MatrixForm::Eq5, stencil, k));
        (h2.join().expect("eigensolver thread panicked"), h5.join().expect("eigensolver thread panicked"))
    });
    let (op2, rep2) = eq2?;
    let (op5, rep5) = eq5?;

    let (identity_max_deviation, identity_tolerance) = matrix_identity(&op2, &op5);
    let anti_hermitian_max_deviation = anti_hermitian_deviation(&op5);
    let eq2_minus_eq5: Vec<f64> = rep2
        .levels
        .iter()
        .zip(&rep5.levels)
        .map(|(a, b)| {
            (Complex64::new(a.numeric_re, a.numeric_im) - Complex64::new(b.numeric_re, b.numeric_im)).norm()
        })
        .collect();
    let form_max_difference = eq2_minus_eq5.iter().copied().fold(0.0, f64::max);
    let form_bound =
        FORM_AGREEMENT_FLOOR + params.lambda / 4.0 * boundary_commutator_defect(&grid, &params, stencil);
    let residuals = residual_table(&params, &grid, stencil, RESIDUAL_LEVELS.min(k))?;

    let mut report = GaugeReport {
        command: "gauge-check",
        status: Status::Fail,
        params,
        points: grid.len(),
        stencil,
        identity_max_deviation,
        identity_tolerance,
        anti_hermitian_max_deviation,
        eq2_minus_eq5,
        form_max_difference,
        form_bound,
        residuals,
    };
    report.status = Status::from_bool(report.identity_holds() && report.forms_agree() && report.residuals_ok());
    Ok(report)
}

pub fn run(cfg: &RunConfig) -> Result<(GaugeReport, Outcome), CliError> {
    let report = check(cfg)?;
    let mut details = vec![
        format!(
            "EQ2 - EQ5 - (lambda/4)([Y,P] - i*hbar*I): max |entry| = {:.3e} (tolerance {:.3e})",
            report.identity_max_deviation, report.identity_tolerance
        ),
        format!("anti-Hermitian part - i*hbar*lambda/4*I: max |entry| = {:.3e}", report.anti_hermitian_max_deviation),
        format!(
            "EQ2 vs EQ5 trusted levels: max |difference| = {:.3e} (bound {:.3e})",
            report.form_max_difference, report.form_bound
        ),
    ];
    for r in &report.residuals {
        details.push(format!(
            "  n={} residual {:.3e}  refined {:.3e}  ratio {:.2}  gauge {:.3e}  reduced oscillator {:.3e}",
            r.n, r.residual, r.residual_refined, r.refinement_ratio, r.gauge_residual, r.target_residual
        ));
    }
    let summary = format!(
        "matrix identity {}, forms agree {}, max residual {:.3e} (<= {:.0e}), min refinement ratio {:.2} (>= {})",
        if report.identity_holds() { "exact" } else { "VIOLATED" },
        if report.forms_agree() { "within bound" } else { "OUTSIDE bound" },
        report.max_residual(),
        RESIDUAL_TOLERANCE,
        report.min_refinement_ratio(),
        MIN_REFINEMENT_RATIO
    );
    let json = to_json(&report);
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out {
        let path = dir.join("gauge_check.json");
        write_atomic(&path, json.as_bytes())?;
        artifacts.push(path);
    }
    Ok((report.clone(), Outcome { status: report.status, summary, details, json, artifacts }))
}
