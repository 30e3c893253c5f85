//! Complex Hessenberg reduction and single-shift QR iteration.
//!
//! The reduction uses Householder reflectors and skips columns that are
//! already reduced, so tridiagonal input costs nothing. The QR phase follows
//! the structure of LAPACK's `zlahqr`: deflation with the Ahues–Tisseur test,
//! Wilkinson shifts, and an exceptional shift every tenth stalled iteration.
//! Eigenvectors, when requested, come from back-substitution on the Schur
//! form.

use num_complex::Complex64;

use super::EigError;
use crate::linalg::{vec_norm, CMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Iteration budget and shift policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QrSettings {
    pub max_iterations_per_eigenvalue: usize,
    pub exceptional_shift_period: usize,
}

impl Default for QrSettings {
    fn default() -> Self {
        Self { max_iterations_per_eigenvalue: 40, exceptional_shift_period: 10 }
    }
}

pub(super) struct SchurOutcome {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: Option<Vec<Vec<Complex64>>>,
    pub iterations: usize,
    pub deflations: usize,
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Reduces `h` to upper Hessenberg form in place; multiplies the reflectors
/// into `q` from the right when given.
pub(super) fn hessenberg(h: &mut CMatrix, mut q: Option<&mut CMatrix>) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    let mut u = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let tail_sq: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail_sq == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let xnorm = (x0.norm_sqr() + tail_sq).sqrt();
        let phase = if x0 == ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        // u = x − α e₁ over rows k+1..n
        u[k + 1] = x0 - alpha;
        for i in k + 2..n {
            u[i] = h[(i, k)];
        }
        let uu: f64 = (k + 1..n).map(|i| u[i].norm_sqr()).sum();
        let f = 2.0 / uu;
        let data = h.as_mut_slice();

        // left: H ← (I − f u uᴴ) H on rows k+1.., columns k..
        for wj in w[k..n].iter_mut() {
            *wj = ZERO;
        }
        for i in k + 1..n {
            let ui = u[i].conj();
            let row = &data[i * n + k..(i + 1) * n];
            for (wj, hij) in w[k..n].iter_mut().zip(row) {
                *wj += ui * hij;
            }
        }
        for i in k + 1..n {
            let s = u[i] * f;
            let row = &mut data[i * n + k..(i + 1) * n];
            for (hij, wj) in row.iter_mut().zip(&w[k..n]) {
                *hij -= s * wj;
            }
        }
        // exact zeros below the subdiagonal
        data[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            data[i * n + k] = ZERO;
        }

        // right: H ← H (I − f u uᴴ) on all rows, columns k+1..
        for r in 0..n {
            let row = &mut data[r * n + k + 1..(r + 1) * n];
            let s: Complex64 = row.iter().zip(&u[k + 1..n]).map(|(a, b)| a * b).sum();
            if s == ZERO {
                continue;
            }
            let s = s * f;
            for (a, b) in row.iter_mut().zip(&u[k + 1..n]) {
                *a -= s * b.conj();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            let qd = q.as_mut_slice();
            for r in 0..n {
                let row = &mut qd[r * n + k + 1..(r + 1) * n];
                let s: Complex64 = row.iter().zip(&u[k + 1..n]).map(|(a, b)| a * b).sum();
                if s == ZERO {
                    continue;
                }
                let s = s * f;
                for (a, b) in row.iter_mut().zip(&u[k + 1..n]) {
                    *a -= s * b.conj();
                }
            }
        }
    }
}

/// Rotation `[[c, s], [−s̄, c]]` sending `(x, z)` to `(r, 0)`.
#[inline]
fn givens(x: Complex64, z: Complex64) -> (f64, Complex64) {
    if z == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, z.conj() / z.norm());
    }
    let ax = x.norm();
    let rho = ax.hypot(z.norm());
    (ax / rho, (x / ax) * z.conj() / rho)
}

/// Rows `k`, `k+1`, columns `cols`.
#[inline]
fn rotate_rows(data: &mut [Complex64], n: usize, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    let (top, bottom) = data.split_at_mut((k + 1) * n);
    let rk = &mut top[k * n + cols.start..k * n + cols.end];
    let rk1 = &mut bottom[cols.start..cols.end];
    let sc = s.conj();
    for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x * c + s * y;
        *b = y * c - sc * x;
    }
}

/// Columns `k`, `k+1`, rows `rows`: `M ← M Gᴴ`.
#[inline]
fn rotate_cols(data: &mut [Complex64], n: usize, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    let sc = s.conj();
    for r in rows {
        let base = r * n + k;
        let (x, y) = (data[base], data[base + 1]);
        data[base] = x * c + y * sc;
        data[base + 1] = y * c - x * s;
    }
}

/// Complex Wilkinson shift from the trailing 2×2 block ending at `i`.
fn wilkinson_shift(h: &CMatrix, i: usize) -> Complex64 {
    let t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let s = cabs1(u);
    if s == 0.0 {
        return t;
    }
    let x = 0.5 * (h[(i - 1, i - 1)] - t);
    let sx = cabs1(x);
    let s = s.max(sx);
    let mut y = s * ((x / s) * (x / s) + (u / s) * (u / s)).sqrt();
    if sx > 0.0 {
        let xs = x / sx;
        if xs.re * y.re + xs.im * y.im < 0.0 {
            y = -y;
        }
    }
    t - u * (u / (x + y))
}

/// Runs shifted QR on the Hessenberg matrix `h`. With `z` present the full
/// Schur form is maintained and `z` accumulates the transformations.
pub(super) fn hessenberg_qr(
    h: &mut CMatrix,
    mut z: Option<&mut CMatrix>,
    settings: QrSettings,
) -> Result<(usize, usize), EigError> {
    let n = h.dim();
    let want_schur = z.is_some();
    let ulp = f64::EPSILON;
    let safmin = f64::MIN_POSITIVE;
    let smlnum = safmin * (n as f64 / ulp);

    let mut total_iterations = 0;
    let mut deflations = 0;
    let mut i = n - 1;

    loop {
        let mut its = 0;
        loop {
            // locate the active block [l, i]
            let mut k = i;
            while k > 0 {
                let sub = h[(k, k - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += cabs1(h[(k - 1, k - 2)]);
                    }
                    if k + 1 < n {
                        tst += cabs1(h[(k + 1, k)]);
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let ab = cabs1(sub).max(cabs1(h[(k - 1, k)]));
                    let ba = cabs1(sub).min(cabs1(h[(k - 1, k)]));
                    let diff = h[(k - 1, k - 1)] - h[(k, k)];
                    let aa = cabs1(h[(k, k)]).max(cabs1(diff));
                    let bb = cabs1(h[(k, k)]).min(cabs1(diff));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            if k > 0 {
                h[(k, k - 1)] = ZERO;
            }
            if k >= i {
                break;
            }
            its += 1;
            total_iterations += 1;
            if its > settings.max_iterations_per_eigenvalue {
                return Err(EigError::NoConvergence { index: i, iterations: its - 1 });
            }

            let period = settings.exceptional_shift_period.max(1);
            let shift = if its % period == 0 {
                if (its / period) % 2 == 1 {
                    h[(k, k)] + 0.75 * cabs1(h[(k + 1, k)])
                } else {
                    h[(i, i)] + 0.75 * cabs1(h[(i, i - 1)])
                }
            } else {
                wilkinson_shift(h, i)
            };

            let (col_end, row_start) = if want_schur { (n, 0) } else { (i + 1, k) };
            let data = h.as_mut_slice();
            for j in k..i {
                let (x, y) = if j == k {
                    (data[j * n + j] - shift, data[(j + 1) * n + j])
                } else {
                    (data[j * n + j - 1], data[(j + 1) * n + j - 1])
                };
                let (c, s) = givens(x, y);
                let first_col = if j == k { k } else { j - 1 };
                rotate_rows(data, n, j, c, s, first_col..col_end);
                if j > k {
                    data[(j + 1) * n + j - 1] = ZERO;
                }
                let last_row = (j + 2).min(i) + 1;
                rotate_cols(data, n, j, c, s, row_start..last_row);
                if let Some(zm) = z.as_deref_mut() {
                    rotate_cols(zm.as_mut_slice(), n, j, c, s, 0..n);
                }
            }
        }

        // 1×1 block at i has deflated
        deflations += 1;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    Ok((total_iterations, deflations))
}

/// Eigenvectors of the upper-triangular `t`, mapped through `z`.
pub(super) fn schur_eigenvectors(t: &CMatrix, z: &CMatrix) -> Vec<Vec<Complex64>> {
    let n = t.dim();
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut out = Vec::with_capacity(n);
    let mut x = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        for v in x.iter_mut() {
            *v = ZERO;
        }
        x[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let row = t.row(j);
            let acc: Complex64 = (j + 1..=k).map(|l| row[l] * x[l]).sum();
            let mut den = row[j] - lambda;
            if den.norm() < small {
                den = Complex64::new(small, 0.0);
            }
            x[j] = -acc / den;
            let mag = x[j].norm();
            if mag > 1e100 {
                for v in x[..=k].iter_mut() {
                    *v /= mag;
                }
            }
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|r| {
                let zr = z.row(r);
                (0..=k).map(|l| zr[l] * x[l]).sum()
            })
            .collect();
        let norm = vec_norm(&v);
        for e in v.iter_mut() {
            *e /= norm;
        }
        out.push(v);
    }
    out
}

pub(super) fn schur(a: &CMatrix, vectors: bool, settings: QrSettings) -> Result<SchurOutcome, EigError> {
    let mut h = a.clone();
    if vectors {
        let mut z = CMatrix::identity(a.dim());
        hessenberg(&mut h, Some(&mut z));
        let (iterations, deflations) = hessenberg_qr(&mut h, Some(&mut z), settings)?;
        let eigenvalues = (0..h.dim()).map(|i| h[(i, i)]).collect();
        let vecs = schur_eigenvectors(&h, &z);
        Ok(SchurOutcome { eigenvalues, vectors: Some(vecs), iterations, deflations })
    } else {
        hessenberg(&mut h, None);
        let (iterations, deflations) = hessenberg_qr(&mut h, None, settings)?;
        let eigenvalues = (0..h.dim()).map(|i| h[(i, i)]).collect();
        Ok(SchurOutcome { eigenvalues, vectors: None, iterations, deflations })
    }
}
