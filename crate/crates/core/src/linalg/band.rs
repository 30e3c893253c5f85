use num_complex::Complex64;
use thiserror::Error;

use super::CMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("zero pivot in column {column} of the banded factorization")]
pub struct SingularPivot {
    pub column: usize,
}

/// LU factorization with partial pivoting of a band matrix.
///
/// Row `i` keeps columns `i − kl ..= i + ku + kl`; the extra `kl`
/// superdiagonals hold the fill produced by row interchanges.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &CMatrix) -> Result<Self, SingularPivot> {
        let (kl, ku) = a.bandwidths();
        Self::factor_with_bands(a, kl, ku)
    }

    pub fn factor_with_bands(a: &CMatrix, kl: usize, ku: usize) -> Result<Self, SingularPivot> {
        let n = a.dim();
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            ab: vec![Complex64::new(0.0, 0.0); n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                *lu.at_mut(i, j) = a[(i, j)];
            }
        }
        lu.eliminate()?;
        Ok(lu)
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[i * self.width + (j + self.kl - i)]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.ab[i * self.width + (j + self.kl - i)]
    }

    fn eliminate(&mut self) -> Result<(), SingularPivot> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.at(k, k).norm();
            for i in k + 1..=last_row {
                let v = self.at(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SingularPivot { column: k });
            }
            self.pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.at(k, j);
                    let b = self.at(p, j);
                    *self.at_mut(k, j) = b;
                    *self.at_mut(p, j) = a;
                }
            }
            let pivot = self.at(k, k);
            for i in k + 1..=last_row {
                let l = self.at(i, k) / pivot;
                *self.at_mut(i, k) = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = self.at(k, j);
                    *self.at_mut(i, j) -= l * u;
                }
            }
        }
        Ok(())
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.at(i, k) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + ku + kl).min(n - 1) {
                acc -= self.at(k, j) * b[j];
            }
            b[k] = acc / self.at(k, k);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// `y = A x` touching only the band `kl`/`ku`.
pub fn band_matvec(a: &CMatrix, kl: usize, ku: usize, x: &[Complex64]) -> Vec<Complex64> {
    let n = a.dim();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            (lo..=hi).map(|j| a[(i, j)] * x[j]).sum()
        })
        .collect()
}
