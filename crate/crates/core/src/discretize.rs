//! Finite-difference matrices for the damped-oscillator Hamiltonian.
//!
//! `P = −iħD` with `D` an antisymmetric central first difference and the
//! kinetic term `K = −(ħ²/2m)D₂` with `D₂` the symmetric central second
//! difference. Both forms share the same `K` and `P`, so
//! `EQ2 − EQ5 = (λ/4)([Y, P] − iħI)` holds entry by entry.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::GaugeDirection;
use crate::grid::Grid;
use crate::linalg::CMatrix;
use crate::params::{ParamError, PhysParams};

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("malformed matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Central-difference stencil order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    /// Three-point stencils: `±1/(2h)` and `(1, −2, 1)/h²`.
    Second,
    /// Five-point stencils: `(−1, 8, 0, −8, 1)/(12h)` and
    /// `(−1, 16, −30, 16, −1)/(12h²)`.
    #[default]
    Fourth,
}

impl Stencil {
    /// Half-width of the stencil, which is also the matrix bandwidth.
    pub fn reach(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }

    /// First-derivative weights for offsets `+1, +2, …` (offset `−s` has the
    /// opposite sign), in units of `1/h`.
    fn first(self) -> &'static [f64] {
        match self {
            Stencil::Second => &[0.5],
            Stencil::Fourth => &[2.0 / 3.0, -1.0 / 12.0],
        }
    }

    /// Second-derivative weights for offsets `0, ±1, ±2, …` in units of `1/h²`.
    fn second(self) -> &'static [f64] {
        match self {
            Stencil::Second => &[-2.0, 1.0],
            Stencil::Fourth => &[-2.5, 4.0 / 3.0, -1.0 / 12.0],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stencil::Second => "second",
            Stencil::Fourth => "fourth",
        }
    }
}

impl FromStr for Stencil {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "second" | "2" => Ok(Stencil::Second),
            "fourth" | "4" => Ok(Stencil::Fourth),
            other => Err(format!("unknown stencil {other:?} (expected second or fourth)")),
        }
    }
}

/// Matrix construction route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MatrixForm {
    /// `K + (mω²/2)Y² + (λ/2)·Y·P`, product taken in that order.
    #[serde(rename = "EQ2")]
    Eq2,
    /// `K + (λ/4)(PY + YP) + (mλ²/8)Y² + (m/2)(ω² − λ²/4)Y² + (iħλ/4)I`,
    /// i.e. the completed square with `P²/2m` realized as `K`.
    #[serde(rename = "EQ5")]
    Eq5,
}

impl MatrixForm {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixForm::Eq2 => "EQ2",
            MatrixForm::Eq5 => "EQ5",
        }
    }
}

impl fmt::Display for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatrixForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eq2" => Ok(MatrixForm::Eq2),
            "eq5" => Ok(MatrixForm::Eq5),
            other => Err(format!("unknown matrix form {other:?} (expected eq2 or eq5)")),
        }
    }
}

/// A discretized Hamiltonian together with how it was built.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: CMatrix,
    pub form: MatrixForm,
    pub grid: Grid,
    pub params: PhysParams,
    pub stencil: Stencil,
    /// Set once the matrix has been conjugated by the Gaussian gauge.
    pub gauge: Option<GaugeDirection>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `G A G⁻¹` with `G = diag(exp(±iσy_j²/ħ))`, `σ = mλ/4`.
    pub fn gauge_conjugated(&self, direction: GaugeDirection) -> OperatorMatrix {
        let sign = match direction {
            GaugeDirection::Forward => 1.0,
            GaugeDirection::Inverse => -1.0,
        };
        let sigma = self.params.gauge_sigma();
        let phases: Vec<Complex64> = self
            .grid
            .nodes()
            .iter()
            .map(|y| Complex64::from_polar(1.0, sign * sigma * y * y / self.params.hbar))
            .collect();
        let n = self.dim();
        let reach = self.stencil.reach();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in i.saturating_sub(reach)..=(i + reach).min(n - 1) {
                // |phase| = 1, so the inverse is the conjugate
                m[(i, j)] = phases[i] * self.matrix[(i, j)] * phases[j].conj();
            }
        }
        OperatorMatrix { matrix: m, gauge: Some(direction), ..self.clone() }
    }

    /// Writes `# N <N> form <EQ2|EQ5>` followed by one line per row of
    /// space-separated `re im` pairs.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# N {} form {}", self.dim(), self.form)?;
        for i in 0..self.dim() {
            let mut line = String::new();
            for (j, z) in self.matrix.row(i).iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{:.16e} {:.16e}", z.re, z.im));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Reads the text format written by [`OperatorMatrix::write_text`].
pub fn read_matrix_text<R: BufRead>(input: R) -> Result<(MatrixForm, CMatrix), DiscretizeError> {
    let bad = |msg: &str| DiscretizeError::Format(msg.to_string());
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, form) = match fields.as_slice() {
        ["#", "N", n, "form", form] => (
            n.parse::<usize>().map_err(|_| bad("bad dimension"))?,
            form.parse::<MatrixForm>().map_err(DiscretizeError::Format)?,
        ),
        _ => return Err(bad("bad header")),
    };
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| bad("missing row"))??;
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?;
        if nums.len() != 2 * n {
            return Err(bad("wrong row length"));
        }
        for j in 0..n {
            m[(i, j)] = Complex64::new(nums[2 * j], nums[2 * j + 1]);
        }
    }
    Ok((form, m))
}

/// `P_{j,j±s}`; zero outside the stencil.
fn momentum_entry(stencil: Stencil, h: f64, hbar: f64, offset: isize) -> Complex64 {
    let s = offset.unsigned_abs();
    if s == 0 || s > stencil.reach() {
        return Complex64::new(0.0, 0.0);
    }
    let d = stencil.first()[s - 1] / h;
    // P = −iħD, D_{j,j+s} = +d, D_{j,j−s} = −d
    if offset > 0 {
        Complex64::new(0.0, -hbar * d)
    } else {
        Complex64::new(0.0, hbar * d)
    }
}

fn kinetic_entry(stencil: Stencil, h: f64, params: &PhysParams, offset: isize) -> f64 {
    let s = offset.unsigned_abs();
    if s > stencil.reach() {
        return 0.0;
    }
    -params.hbar * params.hbar / (2.0 * params.m) * stencil.second()[s] / (h * h)
}

/// `P = −iħD` on the grid.
pub fn momentum_matrix(grid: &Grid, params: &PhysParams, stencil: Stencil) -> CMatrix {
    let n = grid.len();
    let h = grid.spacing();
    let reach = stencil.reach();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in i.saturating_sub(reach)..=(i + reach).min(n - 1) {
            m[(i, j)] = momentum_entry(stencil, h, params.hbar, j as isize - i as isize);
        }
    }
    m
}

/// `Y = diag(y_j)`.
pub fn position_matrix(grid: &Grid) -> CMatrix {
    let d: Vec<Complex64> = grid.nodes().iter().map(|&y| Complex64::new(y, 0.0)).collect();
    CMatrix::from_diag(&d)
}

/// `K = −(ħ²/2m) D₂`.
pub fn kinetic_matrix(grid: &Grid, params: &PhysParams, stencil: Stencil) -> CMatrix {
    let n = grid.len();
    let h = grid.spacing();
    let reach = stencil.reach();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in i.saturating_sub(reach)..=(i + reach).min(n - 1) {
            m[(i, j)] = Complex64::new(kinetic_entry(stencil, h, params, j as isize - i as isize), 0.0);
        }
    }
    m
}

/// Assembles the Hamiltonian matrix in the requested form. Any `λ ≥ 0` is
/// accepted; the overdamped matrix exists even though no analytic levels do.
pub fn assemble(
    params: &PhysParams,
    grid: &Grid,
    form: MatrixForm,
    stencil: Stencil,
) -> Result<OperatorMatrix, DiscretizeError> {
    params.validate()?;
    let n = grid.len();
    let h = grid.spacing();
    let y = grid.nodes();
    let reach = stencil.reach();
    let PhysParams { m, omega, lambda, hbar } = *params;
    let mut a = CMatrix::zeros(n);

    for j in 0..n {
        for k in j.saturating_sub(reach)..=(j + reach).min(n - 1) {
            let offset = k as isize - j as isize;
            let kin = Complex64::new(kinetic_entry(stencil, h, params, offset), 0.0);
            let p = momentum_entry(stencil, h, hbar, offset);
            a[(j, k)] = match form {
                MatrixForm::Eq2 => kin + (lambda / 2.0 * y[j]) * p,
                MatrixForm::Eq5 => kin + (lambda / 4.0 * (y[j] + y[k])) * p,
            };
        }
        let y2 = y[j] * y[j];
        let diag = match form {
            MatrixForm::Eq2 => Complex64::new(0.5 * m * omega * omega * y2, 0.0),
            MatrixForm::Eq5 => {
                let square = m * lambda * lambda / 8.0 * y2;
                let reduced = 0.5 * m * (omega * omega - lambda * lambda / 4.0) * y2;
                Complex64::new(square + reduced, hbar * lambda / 4.0)
            }
        };
        a[(j, j)] += diag;
    }

    Ok(OperatorMatrix { matrix: a, form, grid: *grid, params: *params, stencil, gauge: None })
}

/// `[Y, P]` with entries `(y_j − y_k)·P_jk`.
pub fn position_momentum_commutator(grid: &Grid, params: &PhysParams, stencil: Stencil) -> CMatrix {
    let n = grid.len();
    let h = grid.spacing();
    let y = grid.nodes();
    let reach = stencil.reach();
    let mut c = CMatrix::zeros(n);
    for j in 0..n {
        for k in j.saturating_sub(reach)..=(j + reach).min(n - 1) {
            c[(j, k)] = (y[j] - y[k]) * momentum_entry(stencil, h, params.hbar, k as isize - j as isize);
        }
    }
    c
}

/// Per-row defect `|Σ_k ([Y, P] − iħI)_jk|`, i.e. how far the discrete
/// commutator is from `iħ` when acting on a locally constant vector.
pub fn commutator_row_defects(grid: &Grid, params: &PhysParams, stencil: Stencil) -> Vec<f64> {
    let c = position_momentum_commutator(grid, params, stencil);
    let i_hbar = Complex64::new(0.0, params.hbar);
    (0..grid.len())
        .map(|j| (c.row(j).iter().sum::<Complex64>() - i_hbar).norm())
        .collect()
}

/// Rows excluded at each edge when measuring interior quantities.
pub const BOUNDARY_ROWS: usize = 2;

/// Largest row defect over interior rows (two rows dropped at each edge).
/// Zero up to rounding for uniform grids.
pub fn commutator_defect(grid: &Grid, params: &PhysParams, stencil: Stencil) -> f64 {
    let d = commutator_row_defects(grid, params, stencil);
    d[BOUNDARY_ROWS..d.len() - BOUNDARY_ROWS].iter().copied().fold(0.0, f64::max)
}

/// Largest row defect over all rows; attained at the first and last rows,
/// where the truncated stencil leaves `ħ/2`.
pub fn boundary_commutator_defect(grid: &Grid, params: &PhysParams, stencil: Stencil) -> f64 {
    commutator_row_defects(grid, params, stencil).into_iter().fold(0.0, f64::max)
}
