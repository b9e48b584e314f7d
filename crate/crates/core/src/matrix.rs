//! Dense square matrices and the symmetric eigendecomposition kernel.
//!
//! Everything in this crate works with dense `n x n` real matrices stored in
//! row-major order. The only heavy kernel is the symmetric eigendecomposition,
//! which is delegated to `faer` running sequentially so results are
//! reproducible bit-for-bit across runs.

use std::ops::{Index, IndexMut};
use std::sync::Once;

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Par, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// The all-ones matrix `J` scaled by `value`.
    pub fn filled(n: usize, value: f64) -> Self {
        Self { n, data: vec![value; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    /// Outer product `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Sum of all entries, i.e. `<J, X>`.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Frobenius inner product `<self, other>`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Frobenius norm of `self - other` without allocating.
    pub fn frobenius_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Largest asymmetry `max |X_ij - X_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn add_diag(&mut self, d: &[f64]) {
        for (i, v) in d.iter().enumerate() {
            self[(i, i)] += v;
        }
    }

    /// Matrix product.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        let a = self.as_faer();
        let b = other.as_faer();
        // Row-major storage reads as the transpose in column-major faer views:
        // (A B)^T = B^T A^T, so multiply the views in swapped order.
        let prod = b * a;
        Matrix::from_faer_transposed(prod.as_ref())
    }

    /// A column-major faer view of the *transpose* of `self` (identical to
    /// `self` for symmetric matrices).
    fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.data, self.n, self.n)
    }

    fn from_faer_transposed(m: MatRef<'_, f64>) -> Matrix {
        let n = m.nrows();
        // `m` holds the transpose; copy column j of `m` into row j.
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(m[(i, j)]);
            }
        }
        Matrix { n, data }
    }

    /// Full eigendecomposition of a symmetric matrix. Only the lower triangle is
    /// read. Eigenvalues are returned in nondecreasing order.
    pub fn sym_eigen(&self) -> SymEigen {
        configure_kernel();
        let view = self.as_faer();
        let evd = view.self_adjoint_eigen(Side::Lower).expect("symmetric eigendecomposition failed to converge");
        let s = evd.S().column_vector();
        let u = evd.U();
        let n = self.n;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
        let values = order.iter().map(|&k| s[k]).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for &k in &order {
            for i in 0..n {
                vectors.push(u[(i, k)]);
            }
        }
        SymEigen { n, values, vectors }
    }

    /// Solve `self x = rhs` for symmetric positive definite `self` by Cholesky;
    /// `None` when the factorization breaks down.
    pub fn solve_spd(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        configure_kernel();
        let llt = self.as_faer().llt(Side::Lower).ok()?;
        let b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = llt.solve(&b);
        Some((0..self.n).map(|i| x[(i, 0)]).collect())
    }

    /// Eigenvalues only, nondecreasing.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        configure_kernel();
        let mut vals = self
            .as_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("symmetric eigenvalue solver failed to converge");
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.sym_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
    pub fn spectral_norm_sym(&self) -> f64 {
        let vals = self.sym_eigenvalues();
        match (vals.first(), vals.last()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0.0,
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Result of [`Matrix::sym_eigen`]; eigenvectors are stored contiguously.
#[derive(Debug, Clone)]
pub struct SymEigen {
    n: usize,
    pub values: Vec<f64>,
    vectors: Vec<f64>,
}

impl SymEigen {
    /// Unit eigenvector paired with `values[k]`.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// `sum_k f(lambda_k) v_k v_k^T` over the selected indices.
    pub fn reconstruct(&self, indices: &[usize], f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.n;
        let m = indices.len();
        if m == 0 {
            return Matrix::zeros(n);
        }
        // W = V_sel diag(f(lambda)), result = W V_sel^T computed as a GEMM.
        let w = Mat::<f64>::from_fn(n, m, |i, c| {
            let k = indices[c];
            self.vectors[k * n + i] * f(self.values[k])
        });
        let v = Mat::<f64>::from_fn(n, m, |i, c| self.vectors[indices[c] * n + i]);
        let prod = &w * v.transpose();
        let mut out = Matrix::zeros(n);
        for j in 0..n {
            for i in 0..n {
                out.data[i * n + j] = prod[(i, j)];
            }
        }
        out
    }
}

fn configure_kernel() {
    static INIT: Once = Once::new();
    INIT.call_once(|| faer::set_global_parallelism(Par::Seq));
}
