//! General complex eigenvalues and the comparison against the closed-form
//! spectrum.

mod qr;

pub use qr::QrSettings;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{complex_eigenvalue, AnalyticError};
use crate::discretize::{MatrixForm, OperatorMatrix, Stencil, BOUNDARY_ROWS};
use crate::grid::{Grid, WaveFunction};
use crate::linalg::{vec_norm, CMatrix};
use crate::params::PhysParams;

/// Largest number of levels [`match_levels`] will pair.
pub const MAX_TRUSTED_LEVELS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigError {
    #[error("matrix must be at least 2x2 (got {0})")]
    TooSmall(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue {index} did not deflate within {iterations} QR iterations")]
    NoConvergence { index: usize, iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error(transparent)]
    Regime(#[from] AnalyticError),
    #[error("requested {requested} trusted levels; at most {MAX_TRUSTED_LEVELS} are supported")]
    TooManyLevels { requested: usize },
    #[error("only {found} eigenvalues lie below the trust threshold {threshold}; {requested} requested")]
    Mismatch { requested: usize, found: usize, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("wave function has {got} samples but the matrix is {expected}x{expected}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EigOptions {
    pub vectors: bool,
    pub qr: QrSettings,
}

impl EigOptions {
    pub fn with_vectors() -> Self {
        Self { vectors: true, ..Self::default() }
    }
}

/// All eigenvalues, ascending by real part then imaginary part.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors aligned with `eigenvalues`.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub iterations: usize,
    pub deflations: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

fn spectral_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues (and optionally eigenvectors) of a general complex matrix.
pub fn eig(matrix: &CMatrix, options: EigOptions) -> Result<Spectrum, EigError> {
    let n = matrix.dim();
    if n < 2 {
        return Err(EigError::TooSmall(n));
    }
    if !matrix.is_finite() {
        return Err(EigError::NonFinite);
    }
    let out = qr::schur(matrix, options.vectors, options.qr)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| spectral_order(&out.eigenvalues[a], &out.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| out.eigenvalues[k]).collect();
    let eigenvectors = out.vectors.map(|v| order.iter().map(|&k| v[k].clone()).collect());
    Ok(Spectrum { eigenvalues, eigenvectors, iterations: out.iterations, deflations: out.deflations })
}

/// Levels at or above `0.5·(mω²L²/2)` feel the box walls and are not paired.
pub fn trust_threshold(params: &PhysParams, grid: &Grid) -> f64 {
    let l = grid.half_width();
    0.5 * (0.5 * params.m * params.omega * params.omega * l * l)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelEntry {
    pub n: usize,
    #[serde(serialize_with = "crate::json::sig17")]
    pub analytic_re: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub analytic_im: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub numeric_re: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub numeric_im: f64,
    #[serde(serialize_with = "crate::json::sig17")]
    pub abs_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(serialize_with = "crate::json::sig17_opt")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    #[serde(serialize_with = "crate::json::sig17")]
    pub half_width: f64,
    pub points: usize,
    #[serde(serialize_with = "crate::json::sig17")]
    pub spacing: f64,
    pub stencil: Stencil,
}

impl From<(&Grid, Stencil)> for GridSummary {
    fn from((g, stencil): (&Grid, Stencil)) -> Self {
        Self { half_width: g.half_width(), points: g.len(), spacing: g.spacing(), stencil }
    }
}

/// Numerical levels paired with `E_n = (n + ½)ħΩ + iħλ/4`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub params: PhysParams,
    pub grid: GridSummary,
    pub form: MatrixForm,
    pub levels: Vec<LevelEntry>,
    /// Mean of `Im Ê_n` over the paired levels.
    #[serde(serialize_with = "crate::json::sig17")]
    pub imag_offset_mean: f64,
}

impl LevelReport {
    pub fn trusted(&self) -> usize {
        self.levels.len()
    }

    pub fn max_abs_error(&self) -> f64 {
        self.levels.iter().map(|l| l.abs_error).fold(0.0, f64::max)
    }

    pub fn max_imag_deviation(&self) -> f64 {
        let target = self.params.imaginary_offset();
        self.levels.iter().map(|l| (l.numeric_im - target).abs()).fold(0.0, f64::max)
    }
}

/// Pairs the `k` lowest eigenvalues with the analytic levels `0..k`.
pub fn match_levels(
    spectrum: &Spectrum,
    matrix: &OperatorMatrix,
    k: usize,
) -> Result<LevelReport, MatchError> {
    if k > MAX_TRUSTED_LEVELS {
        return Err(MatchError::TooManyLevels { requested: k });
    }
    let params = &matrix.params;
    // regime check before anything else
    complex_eigenvalue(0, params)?;
    let threshold = trust_threshold(params, &matrix.grid);
    let found = spectrum.eigenvalues.iter().filter(|z| z.re < threshold).count();
    if found < k {
        return Err(MatchError::Mismatch { requested: k, found, threshold });
    }

    let mut levels = Vec::with_capacity(k);
    for n in 0..k {
        let exact = complex_eigenvalue(n, params)?.value();
        let num = spectrum.eigenvalues[n];
        let residual = spectrum.eigenvectors.as_ref().map(|vs| {
            let v = &vs[n];
            let av = matrix.matrix.matvec(v);
            let r: Vec<Complex64> = av.iter().zip(v).map(|(a, b)| a - num * b).collect();
            vec_norm(&r) / vec_norm(v)
        });
        levels.push(LevelEntry {
            n,
            analytic_re: exact.re,
            analytic_im: exact.im,
            numeric_re: num.re,
            numeric_im: num.im,
            abs_error: (num - exact).norm(),
            residual,
        });
    }
    let imag_offset_mean = if k == 0 {
        0.0
    } else {
        levels.iter().map(|l| l.numeric_im).sum::<f64>() / k as f64
    };
    Ok(LevelReport {
        params: *params,
        grid: GridSummary::from((&matrix.grid, matrix.stencil)),
        form: matrix.form,
        levels,
        imag_offset_mean,
    })
}

/// `‖Aψ − Eψ‖₂ / ‖ψ‖₂` over interior nodes (two dropped at each edge).
pub fn residual(matrix: &CMatrix, psi: &WaveFunction, energy: Complex64) -> Result<f64, DimensionMismatch> {
    let n = matrix.dim();
    if psi.values.len() != n {
        return Err(DimensionMismatch { expected: n, got: psi.values.len() });
    }
    let interior = BOUNDARY_ROWS..n.saturating_sub(BOUNDARY_ROWS);
    let ap = matrix.matvec(&psi.values);
    let r: Vec<Complex64> =
        interior.clone().map(|j| ap[j] - energy * psi.values[j]).collect();
    Ok(vec_norm(&r) / vec_norm(&psi.values[interior]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::assemble;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = Lcg(seed);
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = c(rng.next(), rng.next());
            }
        }
        a
    }

    #[test]
    fn diagonal_matrix() {
        let a = CMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 2.0)]);
        let s = eig(&a, EigOptions::default()).unwrap();
        assert_eq!(s.eigenvalues, vec![c(1.0, 2.0), c(3.0, 0.0)]);
    }

    #[test]
    fn companion_matrix_of_damped_oscillator() {
        // q̈ + λq̇ + q = 0 as a first-order system
        for lambda in [0.0, 0.5, 1.2, 1.9] {
            let a = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(-lambda, 0.0)]]);
            let mut got = eig(&a, EigOptions::default()).unwrap().eigenvalues;
            // equal real parts: order by imaginary part for the comparison
            got.sort_by(|a, b| a.im.total_cmp(&b.im));
            let wd = (1.0f64 - lambda * lambda / 4.0).sqrt();
            let want = [c(-lambda / 2.0, -wd), c(-lambda / 2.0, wd)];
            for (got, want) in got.iter().zip(want) {
                assert!((got - want).norm() < 1e-14, "λ={lambda}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn too_small_and_non_finite() {
        assert_eq!(eig(&CMatrix::zeros(1), EigOptions::default()).unwrap_err(), EigError::TooSmall(1));
        let mut a = CMatrix::identity(3);
        a[(0, 2)] = c(f64::NAN, 0.0);
        assert_eq!(eig(&a, EigOptions::default()).unwrap_err(), EigError::NonFinite);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let a = random_matrix(30, 5);
        let settings = QrSettings { max_iterations_per_eigenvalue: 0, exceptional_shift_period: 10 };
        let err = eig(&a, EigOptions { vectors: false, qr: settings }).unwrap_err();
        assert!(matches!(err, EigError::NoConvergence { index: 29, .. }));
    }

    #[test]
    fn random_matrices_match_independent_solver() {
        for (n, seed) in [(2, 1), (3, 2), (7, 3), (25, 4), (60, 9)] {
            let a = random_matrix(n, seed);
            let s = eig(&a, EigOptions::with_vectors()).unwrap();
            let mut reference: Vec<Complex64> = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)])
                .schur()
                .eigenvalues()
                .unwrap()
                .iter()
                .copied()
                .collect();
            reference.sort_by(spectral_order);
            for (x, y) in s.eigenvalues.iter().zip(&reference) {
                assert!((x - y).norm() < 1e-10, "n={n}: {x} vs {y}");
            }
            let norm = a.frobenius_norm();
            for (lam, v) in s.eigenvalues.iter().zip(s.eigenvectors.as_ref().unwrap()) {
                let av = a.matvec(v);
                let r: Vec<Complex64> = av.iter().zip(v).map(|(x, y)| x - lam * y).collect();
                assert!(vec_norm(&r) <= 1e-10 * norm);
                assert!((vec_norm(v) - 1.0).abs() < 1e-12);
            }
            assert!((s.sum() - a.trace()).norm() <= 1e-8 * norm * n as f64);
            assert_eq!(s.deflations, n);
        }
    }

    #[test]
    fn sorted_by_real_then_imaginary() {
        let a = CMatrix::from_diag(&[c(1.0, 1.0), c(0.0, 5.0), c(1.0, -1.0), c(-2.0, 0.0)]);
        let s = eig(&a, EigOptions::default()).unwrap();
        assert_eq!(s.eigenvalues, vec![c(-2.0, 0.0), c(0.0, 5.0), c(1.0, -1.0), c(1.0, 1.0)]);
    }

    #[test]
    fn hermitian_oscillator_has_real_spectrum() {
        let p = PhysParams::natural(0.0).unwrap();
        let g = Grid::new(8.0, 160).unwrap();
        let op = assemble(&p, &g, MatrixForm::Eq2, Stencil::Fourth).unwrap();
        let s = eig(&op.matrix, EigOptions::default()).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn matching_reports_levels_and_errors() {
        let p = PhysParams::natural(0.5).unwrap();
        let g = Grid::new(8.0, 241).unwrap();
        let op = assemble(&p, &g, MatrixForm::Eq5, Stencil::Fourth).unwrap();
        let s = eig(&op.matrix, EigOptions::with_vectors()).unwrap();
        let report = match_levels(&s, &op, 6).unwrap();
        assert_eq!(report.trusted(), 6);
        assert!(report.max_abs_error() < 1e-3);
        assert!((report.imag_offset_mean - 0.125).abs() < 1e-10);
        for l in &report.levels {
            assert!(l.abs_error >= 0.0);
            assert!(l.residual.unwrap() < 1e-10 * op.matrix.frobenius_norm());
        }
    }

    #[test]
    fn matching_errors() {
        let g = Grid::new(3.0, 40).unwrap();
        let p = PhysParams::natural(0.5).unwrap();
        let op = assemble(&p, &g, MatrixForm::Eq5, Stencil::Fourth).unwrap();
        let s = eig(&op.matrix, EigOptions::default()).unwrap();
        assert!(matches!(match_levels(&s, &op, 13), Err(MatchError::TooManyLevels { .. })));
        // threshold 0.5·(9/2) = 2.25 admits only the two lowest levels
        assert!(matches!(match_levels(&s, &op, 5), Err(MatchError::Mismatch { found: 2, .. })));

        let over = PhysParams::natural(2.5).unwrap();
        let op = assemble(&over, &g, MatrixForm::Eq5, Stencil::Fourth).unwrap();
        let s = eig(&op.matrix, EigOptions::default()).unwrap();
        assert!(matches!(match_levels(&s, &op, 2), Err(MatchError::Regime(_))));
    }

    #[test]
    fn residual_checks_dimensions() {
        let g = Grid::new(3.0, 20).unwrap();
        let psi = WaveFunction::new(g, vec![c(1.0, 0.0); 20]);
        let err = residual(&CMatrix::identity(21), &psi, c(1.0, 0.0)).unwrap_err();
        assert_eq!(err, DimensionMismatch { expected: 21, got: 20 });
        assert_eq!(residual(&CMatrix::identity(20), &psi, c(1.0, 0.0)).unwrap(), 0.0);
    }
}
