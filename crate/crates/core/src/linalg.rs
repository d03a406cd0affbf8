//! Dense linear algebra for the tiny systems this crate solves (n ≤ 4).

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
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

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Lower-triangular `L` with `L Lᵀ = self`.
    ///
    /// Fails when a pivot drops to `pivot_tolerance · trace` or below.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let floor = T::pivot_tolerance() * self.trace().abs().max(T::min_positive_value());
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > floor) {
                return Err(Error::SingularHessian {
                    pivot: d.to_f64_lossy(),
                });
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_triangular_inverse(&self) -> Self {
        let n = self.n;
        let l = self;
        let mut linv = Self::zeros(n);
        for j in 0..n {
            linv[(j, j)] = T::one() / l[(j, j)];
            for i in (j + 1)..n {
                let mut s = T::zero();
                for k in j..i {
                    s -= l[(i, k)] * linv[(k, j)];
                }
                linv[(i, j)] = s / l[(i, i)];
            }
        }
        linv
    }

    /// Inverse of a symmetric positive-definite matrix via Cholesky.
    pub fn cholesky_inverse(&self) -> Result<Self> {
        let n = self.n;
        let linv = self.cholesky()?.lower_triangular_inverse();
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = T::zero();
                for k in i..n {
                    s += linv[(k, i)] * linv[(k, j)];
                }
                inv[(i, j)] = s;
                inv[(j, i)] = s;
            }
        }
        Ok(inv)
    }

    /// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi rotations).
    pub fn min_symmetric_eigenvalue(&self) -> T {
        symmetric_eigenvalues(self)
            .into_iter()
            .fold(T::infinity(), |m, v| m.min(v))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
pub fn symmetric_eigenvalues<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut a = m.clone();
    let two = T::lit(2.0);
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: T = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= T::epsilon() * T::epsilon() * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the system is numerically singular.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.dim();
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m
        .data
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
        .max(T::min_positive_value());
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[(piv, col)].abs() <= T::epsilon() * T::lit(64.0) * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(col, piv);
        }
        for i in (col + 1)..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(i, j)] -= f * v;
            }
            let xc = x[col];
            x[i] -= f * xc;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Determinant by Gaussian elimination.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[(piv, col)] == T::zero() {
            return T::zero();
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            det = -det;
        }
        det *= m[(col, col)];
        for i in (col + 1)..n {
            let f = m[(i, col)] / m[(col, col)];
            for j in col..n {
                let v = m[(col, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
