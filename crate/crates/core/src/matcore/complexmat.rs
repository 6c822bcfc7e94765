//! Complex dense matrices used internally by the eigenvalue machinery and
//! the logarithm branch construction.

use num_complex::Complex64;

use super::dense::SquareMatrix;

#[derive(Debug, Clone)]
pub(crate) struct CMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_real(a: &SquareMatrix) -> Self {
        let dim = a.dim();
        let data = a
            .entries()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        Self { dim, data }
    }

    /// Real part, as a real matrix. Panics on dim < 2 (never constructed here).
    pub fn real_part(&self) -> SquareMatrix {
        SquareMatrix::new(self.dim, self.data.iter().map(|z| z.re).collect())
            .expect("real part of a valid complex matrix")
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub fn sub(&self, other: &Self) -> Self {
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

    pub fn shift(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] += z;
        }
        out
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Rank with a pivot threshold relative to the largest entry.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let d = self.dim;
        let mut m = self.data.clone();
        let scale = self.data.iter().fold(0.0f64, |s, z| s.max(z.norm()));
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
                let v = m[i * d + col].norm();
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
                    let sub = f * m[row * d + j];
                    m[i * d + j] -= sub;
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

    /// Solves self * x = b by Gaussian elimination with partial pivoting.
    /// Returns None when the matrix is singular to working precision.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let d = self.dim;
        let mut m = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..d {
            let mut p = k;
            let mut best = m[k * d + k].norm();
            for i in k + 1..d {
                let v = m[i * d + k].norm();
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
                    m.swap(k * d + j, p * d + j);
                }
                x.swap(k, p);
            }
            let pivot = m[k * d + k];
            for i in k + 1..d {
                let f = m[i * d + k] / pivot;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..d {
                    let sub = f * m[k * d + j];
                    m[i * d + j] -= sub;
                }
                let sub = f * x[k];
                x[i] -= sub;
            }
        }
        for i in (0..d).rev() {
            for j in i + 1..d {
                let sub = m[i * d + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= m[i * d + i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.dim;
        let mut out = Self::zeros(d);
        let mut e = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..d {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..d {
                out[(i, j)] = col[i];
            }
        }
        Some(out)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}
