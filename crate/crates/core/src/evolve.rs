//! Crank–Nicolson propagation of `iħ ∂ψ/∂t = Hψ` with a discretized
//! Hamiltonian.
//!
//! For the symmetrized form `H = H_herm + iħλ/4`, so the squared norm grows
//! as `exp(λt/2)`; the propagator preserves this up to `O(dt²)`.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::discretize::OperatorMatrix;
use crate::grid::WaveFunction;
use crate::linalg::{band_matvec, BandLu, CMatrix};

/// Samples skipped at the start of the growth-rate fit.
pub const FIT_SKIP: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("time step must be finite and positive (got {0})")]
    Step(f64),
    #[error("initial state has {got} points but the matrix has dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("initial state is zero or non-finite")]
    InitialState,
    #[error("Crank–Nicolson system is singular (zero pivot in column {column}) at step {step}")]
    Singular { step: usize, column: usize },
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least two samples with distinct times to fit a slope")]
    Degenerate,
    #[error("squared norm {0} at sample {1} is not positive")]
    NonPositive(f64, usize),
}

/// Observables sampled after every step (index 0 is the initial state).
#[derive(Clone, Debug)]
pub struct EvolutionSeries {
    pub times: Vec<f64>,
    /// `‖ψ(t)‖²`.
    pub norms: Vec<f64>,
    /// `⟨y⟩` of the normalized state.
    pub positions: Vec<f64>,
    /// `|⟨ψ₀|ψ(t)⟩| / (‖ψ₀‖‖ψ(t)‖)`.
    pub overlaps: Vec<f64>,
    pub final_state: WaveFunction,
}

impl EvolutionSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min_overlap(&self) -> f64 {
        self.overlaps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_position(&self) -> f64 {
        self.positions.iter().map(|y| y.abs()).fold(0.0, f64::max)
    }

    /// CSV with header `t,norm2,exp_y,overlap`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,norm2,exp_y,overlap")?;
        for k in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.norms[k], self.positions[k], self.overlaps[k]
            )?;
        }
        Ok(())
    }
}

fn overlap(psi0: &WaveFunction, norm0: f64, psi: &WaveFunction, norm_sq: f64) -> f64 {
    psi0.inner(psi).norm() / (norm0 * norm_sq.sqrt())
}

/// Runs `steps` Crank–Nicolson steps of size `dt` from `psi0`.
pub fn propagate(
    op: &OperatorMatrix,
    psi0: &WaveFunction,
    dt: f64,
    steps: usize,
) -> Result<EvolutionSeries, EvolveError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(EvolveError::Step(dt));
    }
    let n = op.dim();
    if psi0.values.len() != n {
        return Err(EvolveError::Dimension { expected: n, got: psi0.values.len() });
    }
    let norm0_sq = psi0.norm_sq();
    if !(psi0.is_finite() && norm0_sq > 0.0) {
        return Err(EvolveError::InitialState);
    }

    // (I + i dt A / 2ħ) ψ⁺ = (I − i dt A / 2ħ) ψ
    let half = Complex64::new(0.0, dt / (2.0 * op.params.hbar));
    let identity = CMatrix::identity(n);
    let implicit = identity.add(&op.matrix.scale(half));
    let explicit = identity.sub(&op.matrix.scale(half));
    let reach = op.stencil.reach();
    let (kl, ku) = implicit.bandwidths();
    let (kl, ku) = (kl.max(reach), ku.max(reach));
    let lu = BandLu::factor_with_bands(&implicit, kl, ku)
        .map_err(|e| EvolveError::Singular { step: 0, column: e.column })?;

    let norm0 = norm0_sq.sqrt();
    let mut series = EvolutionSeries {
        times: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        overlaps: Vec::with_capacity(steps + 1),
        final_state: psi0.clone(),
    };
    series.times.push(0.0);
    series.norms.push(norm0_sq);
    series.positions.push(psi0.mean_position());
    series.overlaps.push(1.0);

    let mut psi = psi0.clone();
    for step in 1..=steps {
        let mut rhs = band_matvec(&explicit, kl, ku, &psi.values);
        lu.solve_in_place(&mut rhs);
        psi.values = rhs;
        let norm_sq = psi.norm_sq();
        if !(psi.is_finite() && norm_sq.is_finite()) {
            return Err(EvolveError::NonFinite { step });
        }
        series.times.push(step as f64 * dt);
        series.norms.push(norm_sq);
        series.positions.push(psi.mean_position());
        series.overlaps.push(overlap(psi0, norm0, &psi, norm_sq));
    }
    series.final_state = psi;
    Ok(series)
}

/// Least-squares slope of `ln‖ψ‖²` against `t`, skipping the first
/// [`FIT_SKIP`] samples when enough remain.
pub fn growth_rate(series: &EvolutionSeries) -> Result<f64, FitError> {
    let skip = if series.len() > FIT_SKIP + 1 { FIT_SKIP } else { 0 };
    let mut points = Vec::with_capacity(series.len() - skip);
    for k in skip..series.len() {
        let v = series.norms[k];
        if !(v > 0.0 && v.is_finite()) {
            return Err(FitError::NonPositive(v, k));
        }
        points.push((series.times[k], v.ln()));
    }
    if points.len() < 2 {
        return Err(FitError::Degenerate);
    }
    let count = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / count;
    let l_mean = points.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, l) in &points {
        sxy += (t - t_mean) * (l - l_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    if sxx <= 0.0 {
        return Err(FitError::Degenerate);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{apply_gauge, eigenfunction, GaugeDirection};
    use crate::discretize::{assemble, MatrixForm, Stencil};
    use crate::grid::Grid;
    use crate::params::PhysParams;

    fn setup(lambda: f64, points: usize) -> (PhysParams, Grid, OperatorMatrix) {
        let p = PhysParams::natural(lambda).unwrap();
        let g = Grid::new(10.0, points).unwrap();
        let op = assemble(&p, &g, MatrixForm::Eq5, Stencil::Fourth).unwrap();
        (p, g, op)
    }

    #[test]
    fn undamped_evolution_conserves_norm() {
        let (p, g, op) = setup(0.0, 400);
        let psi = WaveFunction::from_fn(g, |y| Complex64::new((-(y - 1.0).powi(2) / 2.0).exp(), 0.0));
        let s = propagate(&op, &psi, 1e-2, 500).unwrap();
        let n0 = s.norms[0];
        assert!(s.norms.iter().all(|n| ((n - n0) / n0).abs() < 1e-12));
        // displaced Gaussian oscillates: ⟨y⟩(t) ≈ cos t
        let k = 314;
        assert!((s.positions[k] + 1.0).abs() < 1e-3, "{}", s.positions[k]);
        let _ = p;
    }

    #[test]
    fn eigenstate_stays_put_and_grows_at_the_predicted_rate() {
        let (p, g, op) = setup(0.5, 600);
        let psi = eigenfunction(0, &p, &g).unwrap();
        let s = propagate(&op, &psi, 1e-3, 2000).unwrap();
        assert!(s.min_overlap() >= 1.0 - 1e-6, "{}", s.min_overlap());
        assert!(s.max_abs_position() < 1e-10);
        let rate = growth_rate(&s).unwrap();
        assert!((rate - 0.25).abs() < 1e-3 * 0.25, "{rate}");
    }

    #[test]
    fn superposition_grows_at_the_same_rate() {
        let (p, g, op) = setup(0.5, 600);
        let a = eigenfunction(0, &p, &g).unwrap();
        let b = eigenfunction(1, &p, &g).unwrap();
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        let s = propagate(&op, &WaveFunction::new(g, values), 1e-3, 3000).unwrap();
        let rate = growth_rate(&s).unwrap();
        assert!((rate - 0.25).abs() < 1e-3 * 0.25, "{rate}");
        // the level beat makes ⟨y⟩ oscillate
        assert!(s.max_abs_position() > 0.1);
    }

    #[test]
    fn gauge_covariance() {
        let (p, g, op) = setup(0.5, 300);
        let psi = WaveFunction::from_fn(g, |y| Complex64::new((-(y - 0.5).powi(2)).exp(), 0.2 * y));
        let direct = propagate(&op, &psi, 5e-3, 200).unwrap();
        let gauged_op = op.gauge_conjugated(GaugeDirection::Forward);
        let gauged_psi = apply_gauge(&psi, &p, GaugeDirection::Forward);
        let gauged = propagate(&gauged_op, &gauged_psi, 5e-3, 200).unwrap();
        let expected = apply_gauge(&direct.final_state, &p, GaugeDirection::Forward);
        let err = expected
            .values
            .iter()
            .zip(&gauged.final_state.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        for (a, b) in direct.norms.iter().zip(&gauged.norms) {
            assert!((a - b).abs() < 1e-10 * a);
        }
    }

    #[test]
    fn phase_error_is_second_order_in_dt() {
        // ground-state phase after t = 2 against exp(−iE₀t/ħ)
        let (p, g, op) = setup(0.5, 400);
        let psi = eigenfunction(0, &p, &g).unwrap();
        let e0 = crate::analytic::complex_eigenvalue(0, &p).unwrap();
        let err = |dt: f64, steps: usize| {
            let s = propagate(&op, &psi, dt, steps).unwrap();
            let t = dt * steps as f64;
            let exact = Complex64::new(e0.im * t, -e0.re * t).exp();
            (psi.inner(&s.final_state) / psi.norm_sq() - exact).norm()
        };
        let coarse = err(0.1, 20);
        let fine = err(0.05, 40);
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn argument_errors() {
        let (_, g, op) = setup(0.5, 50);
        let psi = WaveFunction::from_fn(g, |_| Complex64::new(1.0, 0.0));
        assert_eq!(propagate(&op, &psi, 0.0, 1).unwrap_err(), EvolveError::Step(0.0));
        let short = WaveFunction::from_fn(Grid::new(10.0, 20).unwrap(), |_| Complex64::new(1.0, 0.0));
        assert!(matches!(propagate(&op, &short, 0.1, 1), Err(EvolveError::Dimension { .. })));
        let zero = psi.scaled(Complex64::new(0.0, 0.0));
        assert_eq!(propagate(&op, &zero, 0.1, 1).unwrap_err(), EvolveError::InitialState);
    }

    #[test]
    fn singular_system_reports_the_step() {
        // A = 2iħ/dt · I makes I + i dt A / 2ħ vanish
        let (p, g, mut op) = setup(0.5, 20);
        let dt = 0.1;
        op.matrix = CMatrix::identity(20).scale(Complex64::new(0.0, 2.0 * p.hbar / dt));
        let psi = WaveFunction::from_fn(g, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(propagate(&op, &psi, dt, 3), Err(EvolveError::Singular { step: 0, column: 0 })));
    }

    #[test]
    fn fit_degenerate() {
        let (_, g, op) = setup(0.5, 30);
        let psi = WaveFunction::from_fn(g, |y| Complex64::new((-y * y).exp(), 0.0));
        let s = propagate(&op, &psi, 0.1, 0).unwrap();
        assert_eq!(growth_rate(&s), Err(FitError::Degenerate));
        let s = propagate(&op, &psi, 0.1, 1).unwrap();
        assert!(growth_rate(&s).is_ok());
    }

    #[test]
    fn csv_header() {
        let (_, g, op) = setup(0.5, 30);
        let psi = WaveFunction::from_fn(g, |y| Complex64::new((-y * y).exp(), 0.0));
        let s = propagate(&op, &psi, 0.1, 2).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,norm2,exp_y,overlap\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
