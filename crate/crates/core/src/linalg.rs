//! Dense complex linear algebra sized for the truncated-Fock-space oracle:
//! Hermitian matrices with at most a few hundred rows.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. It is slower than a
//! tridiagonalization-based solver but delivers high relative accuracy on the
//! small, nearly low-rank density matrices this crate produces, and keeps the
//! crate free of platform linear-algebra backends.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;
// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

/// Maximum Jacobi sweeps before giving up; convergence normally takes < 15.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Relative asymmetry tolerated before a matrix is rejected as non-Hermitian.
const HERMITIAN_DEFECT_TOL: f64 = 1e-10;

/// Condition-number ceiling for the Gram matrix of a non-orthogonal basis.
const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (asymmetry {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("Gram matrix is ill-conditioned (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest |a_ij - conj(a_ji)| over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product needs equal dimensions");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += aik * rhs_row[j];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, x.len(), "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn scaled(&self, s: f64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Inner product ⟨x|y⟩ with the left argument conjugated.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input may carry rounding-level asymmetry; anything beyond
/// `HERMITIAN_DEFECT_TOL` relative to the largest entry is rejected.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen, LinalgError> {
    let n = a.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0),
        });
    }
    let scale = a.max_abs();
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_DEFECT_TOL * scale.max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }

    // Work on the exactly Hermitian average of A and A†.
    let mut m = CMatrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let fro = m.frobenius_norm();

    if fro > 0.0 {
        let target = f64::EPSILON * fro;
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            if off_diagonal_norm(&m) <= target {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut m, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&m) > target {
            return Err(LinalgError::NoConvergence {
                sweeps: MAX_JACOBI_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * m[(i, j)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// One unitary plane rotation annihilating m[(p, q)].
///
/// With a = m[(p, q)] = |a|·e^{iα}, the rotation
///   G = [[c, -s·e^{iα}], [s·e^{-iα}, c]]
/// zeros the (p, q) entry of G†·M·G when t = s/c solves
///   t² - 2θt - 1 = 0,  θ = (m_qq - m_pp) / (2|a|),
/// taking the smaller-magnitude root for stability.
fn jacobi_rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let abs_apq = apq.norm();
    if abs_apq < 1e-300 {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / abs_apq;
    let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * abs_apq);
    let sign = if theta < 0.0 { -1.0 } else { 1.0 };
    let t = -sign / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let sp = s * phase;
    let spc = s * phase.conj();

    // M <- M·G (columns p, q), then M <- G†·M (rows p, q).
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp + spc * mkq;
        m[(k, q)] = c * mkq - sp * mkp;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk + sp * mqk;
        m[(q, k)] = c * mqk - spc * mpk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp + spc * vkq;
        v[(k, q)] = c * vkq - sp * vkp;
    }
}

/// Cholesky factor L (lower triangular, real positive diagonal) of a
/// Hermitian positive-definite matrix, with a condition estimate from the
/// extreme diagonal pivots.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.dim();
    let scale = a.max_abs();
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_DEFECT_TOL * scale.max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    let mut l = CMatrix::zeros(n);
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(LinalgError::NotPositiveDefinite {
                row: j,
                pivot: diag,
            });
        }
        let ljj = diag.sqrt();
        min_pivot = min_pivot.min(ljj);
        max_pivot = max_pivot.max(ljj);
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    let estimate = (max_pivot / min_pivot).powi(2);
    if estimate > MAX_GRAM_CONDITION {
        return Err(LinalgError::IllConditioned { estimate });
    }
    Ok(l)
}

/// Solves L·Y = B for Y, with L lower triangular.
pub fn solve_lower(l: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = l.dim();
    assert_eq!(n, b.dim(), "triangular solve dimension mismatch");
    let mut y = b.clone();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            for j in 0..n {
                let ykj = y[(k, j)];
                y[(i, j)] -= lik * ykj;
            }
        }
        let lii = l[(i, i)];
        for j in 0..n {
            y[(i, j)] /= lii;
        }
    }
    y
}

/// Solves L†·X = Y for X (back substitution on the adjoint factor).
pub fn solve_upper_adjoint(l: &CMatrix, y: &CMatrix) -> CMatrix {
    let n = l.dim();
    assert_eq!(n, y.dim(), "triangular solve dimension mismatch");
    let mut x = y.clone();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            // (L†)_{ik} = conj(L_{ki})
            let lki = l[(k, i)].conj();
            for j in 0..n {
                let xkj = x[(k, j)];
                x[(i, j)] -= lki * xkj;
            }
        }
        let lii = l[(i, i)].conj();
        for j in 0..n {
            x[(i, j)] /= lii;
        }
    }
    x
}
