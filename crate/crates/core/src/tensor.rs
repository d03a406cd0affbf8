//! Dense rank-k tensors over ℝⁿ, used for third and fourth derivatives.

use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    dim: usize,
    rank: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            data: vec![T::zero(); dim.pow(rank as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: T) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    #[inline]
    pub fn add_at(&mut self, idx: &[usize], v: T) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    /// `self += coef · u ⊗ u ⊗ … ⊗ u` (rank-fold).
    pub fn add_outer_power(&mut self, u: &[T], coef: T) {
        let mut idx = vec![0; self.rank];
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            let prod = idx.iter().fold(coef, |p, &i| p * u[i]);
            self.data[flat] += prod;
        }
    }

    /// All multi-indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(move |flat| {
            let mut idx = vec![0; self.rank];
            self.unflatten(flat, &mut idx);
            idx
        })
    }

    fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
    }

    /// Largest deviation from full permutation symmetry.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for idx in self.indices() {
            let v = self.get(&idx);
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            worst = worst.max((v - self.get(&sorted)).abs());
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Contracts every index with `m`: `t'[a…] = Σ m[a,i] ⋯ t[i…]`.
    pub fn transformed(&self, m: &Matrix<T>) -> Self {
        let n = self.dim;
        let mut cur = self.clone();
        for axis in 0..self.rank {
            let mut next = Self::zeros(n, self.rank);
            for idx in cur.indices().collect::<Vec<_>>() {
                let v = cur.get(&idx);
                if v == T::zero() {
                    continue;
                }
                let mut out = idx.clone();
                for a in 0..n {
                    out[axis] = a;
                    next.add_at(&out, m[(a, idx[axis])] * v);
                }
            }
            cur = next;
        }
        cur
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outer_power_is_symmetric() {
        let mut t = Tensor::<f64>::zeros(3, 3);
        t.add_outer_power(&[1.0, -2.0, 0.5], 2.0);
        assert_eq!(t.get(&[0, 1, 2]), 2.0 * 1.0 * -2.0 * 0.5);
        assert_eq!(t.asymmetry(), 0.0);
        assert_eq!(t.indices().count(), 27);
    }
}
