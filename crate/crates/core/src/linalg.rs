//! Dense square matrices and the symmetric positive-definite solve.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("matrix rows must form a square".into()));
        }
        Ok(Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&mut self, k: T) {
        for x in &mut self.data {
            *x = *x * k;
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> T {
        let scale = self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if scale.is_zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// Converts a covariance matrix to the matching correlation matrix.
    /// Pairs involving a zero-variance variable get correlation 0.
    pub fn to_correlation(&self) -> Matrix<T> {
        let sd: Vec<T> = self.diagonal().into_iter().map(|d| d.sqrt()).collect();
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = if i == j {
                    T::one()
                } else if sd[i] * sd[j] <= T::zero() {
                    T::zero()
                } else {
                    self[(i, j)] / (sd[i] * sd[j])
                };
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor `L` with `S = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Fails with [`Error::Singular`] naming the first non-positive pivot.
    pub fn factor(s: &Matrix<T>) -> Result<Self> {
        let tol = T::lit(1e3) * T::epsilon();
        if s.asymmetry() > tol {
            return Err(Error::Validation("matrix is not symmetric".into()));
        }
        let n = s.dim();
        let scale = s
            .diagonal()
            .into_iter()
            .fold(T::zero(), |m, d| m.max(d.abs()));
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut diag = s[(j, j)];
            for k in 0..j {
                diag = diag - l[(j, k)] * l[(j, k)];
            }
            // Pivots lost to cancellation are treated as zero.
            if !(diag > T::from_count(n) * T::epsilon() * scale) {
                return Err(Error::Singular { pivot: j });
            }
            let root = diag.sqrt();
            l[(j, j)] = root;
            for i in (j + 1)..n {
                let mut v = s[(i, j)];
                for k in 0..j {
                    v = v - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = v / root;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn solve(&self, d: &[T]) -> Vec<T> {
        let n = self.lower.dim();
        let l = &self.lower;
        let mut y = d.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - l[(i, k)] * y[k];
            }
            y[i] = y[i] / l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] = y[i] - l[(k, i)] * y[k];
            }
            y[i] = y[i] / l[(i, i)];
        }
        y
    }
}

/// Solves `S v = d` for symmetric positive-definite `S`.
pub fn solve_spd<T: Scalar>(s: &Matrix<T>, d: &[T]) -> Result<Vec<T>> {
    if d.len() != s.dim() {
        return Err(Error::Validation(format!(
            "right-hand side has length {}, matrix is {}x{}",
            d.len(),
            s.dim(),
            s.dim()
        )));
    }
    Ok(Cholesky::factor(s)?.solve(d))
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
