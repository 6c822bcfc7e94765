//! Dense row-major square matrices over f64 with the small amount of real
//! linear algebra the rest of the crate needs (LU solve, determinant,
//! norms). Dimensions are tiny (d <= 16), so everything is written for
//! clarity rather than cache behaviour.

use crate::error::{Error, Result};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 16;

/// A dense real d x d matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries. Fails when the entry count
    /// is not `dim * dim`, the dimension is outside [2, 16], or any entry
    /// is NaN/infinite.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "dimension {dim} is below the minimum of 2"
            )));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / dim,
                    col: idx % dim,
                });
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {dim}",
                    r.len()
                )));
            }
        }
        Self::new(dim, rows.concat())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// self + s * I
    pub fn add_scaled_identity(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] += s;
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Row-sum norm (operator infinity norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Column-sum norm (operator 1-norm).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)]).sum())
            .collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|i| (i + 1..d).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Rank by Gaussian elimination with partial pivoting; pivots below
    /// `rel_tol` times the largest entry count as zero.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let d = self.dim;
        let mut m = self.data.clone();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0;
        }
        let tol = rel_tol * scale;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..d {
            let mut p = row;
            let mut best = 0.0;
            for i in row..d {
                let v = m[i * d + col].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol {
                continue;
            }
            if p != row {
                for j in 0..d {
                    m.swap(row * d + j, p * d + j);
                }
            }
            let pivot = m[row * d + col];
            for i in row + 1..d {
                let f = m[i * d + col] / pivot;
                for j in col..d {
                    m[i * d + j] -= f * m[row * d + j];
                }
            }
            rank += 1;
            row += 1;
            if row == d {
                break;
            }
        }
        rank
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        match Lu::factor(self) {
            Some(lu) => lu.det(),
            None => 0.0,
        }
    }

    /// Inverse via LU; `Singular` when a pivot collapses.
    pub fn inverse(&self) -> Result<Self> {
        let lu = Lu::factor(self).ok_or(Error::Singular)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        let mut e = vec![0.0; d];
        for j in 0..d {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..d {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Solves self * x = b.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let lu = Lu::factor(self).ok_or(Error::Singular)?;
        Ok(lu.solve(b))
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factorisation with partial pivoting.
struct Lu {
    dim: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    fn factor(a: &SquareMatrix) -> Option<Self> {
        let d = a.dim;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..d).collect();
        let mut sign = 1.0;
        for k in 0..d {
            let mut p = k;
            let mut best = lu[k * d + k].abs();
            for i in k + 1..d {
                let v = lu[i * d + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..d {
                    lu.swap(k * d + j, p * d + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * d + k];
            for i in k + 1..d {
                let f = lu[i * d + k] / pivot;
                lu[i * d + k] = f;
                for j in k + 1..d {
                    lu[i * d + j] -= f * lu[k * d + j];
                }
            }
        }
        Some(Self {
            dim: d,
            lu,
            piv,
            sign,
        })
    }

    fn det(&self) -> f64 {
        let d = self.dim;
        (0..d).fold(self.sign, |acc, k| acc * self.lu[k * d + k])
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut x: Vec<f64> = (0..d).map(|i| b[self.piv[i]]).collect();
        for i in 1..d {
            for j in 0..i {
                x[i] -= self.lu[i * d + j] * x[j];
            }
        }
        for i in (0..d).rev() {
            for j in i + 1..d {
                x[i] -= self.lu[i * d + j] * x[j];
            }
            x[i] /= self.lu[i * d + i];
        }
        x
    }
}
