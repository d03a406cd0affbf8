//! Scalar curvature of toric Kähler metrics in moment coordinates,
//! `R = −½ Σᵢⱼ ∂²G^{ij}/∂yᵢ∂yⱼ`, and the affine-fit extremality test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::potential::{hessian, jets_in_frame, JetTable, SymplecticPotential, GRID_MARGIN};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Default sampling density per axis for extremality verdicts.
pub const DEFAULT_DENSITY: usize = 8;
/// Relative part of the default extremality threshold `1e-5 · (1 + max|R|)`.
pub const DEFAULT_THRESHOLD_SCALE: f64 = 1e-5;

/// `G^{ij}` and its first and second derivatives.
#[derive(Clone, Debug)]
pub struct InverseHessianJets<T> {
    pub inv: Matrix<T>,
    /// `d_inv[i, j, a] = ∂_a G^{ij}`.
    pub d_inv: Tensor<T>,
    /// `dd_inv[i, j, a, b] = ∂_a ∂_b G^{ij}`.
    pub dd_inv: Tensor<T>,
}

fn slice3<T: Scalar>(t: &Tensor<T>, a: usize) -> Matrix<T> {
    let n = t.dim();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = t.get(&[i, j, a]);
        }
    }
    m
}

fn slice4<T: Scalar>(t: &Tensor<T>, a: usize, b: usize) -> Matrix<T> {
    let n = t.dim();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = t.get(&[i, j, a, b]);
        }
    }
    m
}

/// Derivatives of `H⁻¹` from those of `H`:
/// `∂H⁻¹ = −H⁻¹(∂H)H⁻¹` and
/// `∂_{ab}H⁻¹ = H⁻¹ ∂_aH H⁻¹ ∂_bH H⁻¹ + H⁻¹ ∂_bH H⁻¹ ∂_aH H⁻¹ − H⁻¹ ∂_{ab}H H⁻¹`.
pub fn inverse_hessian_jets<T: Scalar>(j: &JetTable<T>) -> Result<InverseHessianJets<T>> {
    let n = j.dim();
    let inv = j.order2.cholesky_inverse()?;
    // P_a = H⁻¹ ∂_a H
    let p: Vec<Matrix<T>> = (0..n).map(|a| inv.mul(&slice3(&j.order3, a))).collect();
    let mut d_inv = Tensor::zeros(n, 3);
    for (a, pa) in p.iter().enumerate() {
        let m = pa.mul(&inv);
        for r in 0..n {
            for c in 0..n {
                d_inv.set(&[r, c, a], -m[(r, c)]);
            }
        }
    }
    let mut dd_inv = Tensor::zeros(n, 4);
    for a in 0..n {
        for b in 0..n {
            let first = p[a].mul(&p[b]).mul(&inv);
            let second = p[b].mul(&p[a]).mul(&inv);
            let third = inv.mul(&slice4(&j.order4, a, b)).mul(&inv);
            for r in 0..n {
                for c in 0..n {
                    dd_inv.set(&[r, c, a, b], first[(r, c)] + second[(r, c)] - third[(r, c)]);
                }
            }
        }
    }
    Ok(InverseHessianJets { inv, d_inv, dd_inv })
}

/// `R = −½ Σᵢⱼ ∂ᵢ∂ⱼ G^{ij}` from a precomputed jet table.
pub fn scalar_curvature_from_jets<T: Scalar>(j: &JetTable<T>) -> Result<T> {
    let m = j.order2.cholesky()?.lower_triangular_inverse();
    Ok(whitened_curvature(&j.order3.transformed(&m), &j.order4.transformed(&m)))
}

/// R from third and fourth derivatives in a frame where the Hessian is the
/// identity: there `∂_a∂_b G^{ij} = (P_aP_b + P_bP_a)_{ij} − G_{ijab}` with
/// `(P_a)_{ij} = G_{ija}`.
fn whitened_curvature<T: Scalar>(t3: &Tensor<T>, t4: &Tensor<T>) -> T {
    let n = t3.dim();
    let mut s = T::zero();
    for i in 0..n {
        for k in 0..n {
            let mut quad = T::zero();
            for q in 0..n {
                quad += t3.get(&[i, q, i]) * t3.get(&[q, k, k]) + t3.get(&[i, q, k]) * t3.get(&[q, k, i]);
            }
            s += quad - t4.get(&[i, k, i, k]);
        }
    }
    -T::lit(0.5) * s
}

/// R is invariant under linear changes of coordinates, so it is evaluated
/// in `z = Lᵀy` with `H(y) = L Lᵀ`. The jets there are assembled from mapped
/// facet normals, which keeps skewed lattice bases well conditioned.
pub fn scalar_curvature<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<T> {
    let m = hessian(pot, y)?.cholesky()?.lower_triangular_inverse();
    let j = jets_in_frame(pot, y, &m)?;
    Ok(whitened_curvature(&j.order3, &j.order4))
}

/// R from `2R = Σⱼ ∂ⱼ(G^{ij} ∂ᵢ log det G)` with `∂ᵢ log det G = tr(G⁻¹ ∂ᵢG)`.
///
/// Uses only first derivatives of `G^{ij}`, so it is independent of the
/// second-derivative identity used by [`scalar_curvature`]. Evaluated in the
/// same unit-Hessian frame, where `G^{ij} = δ` and `∂_k G^{ij} = −G_{ijk}`.
pub fn scalar_curvature_logdet<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<T> {
    let m = hessian(pot, y)?.cholesky()?.lower_triangular_inverse();
    let j = jets_in_frame(pot, y, &m)?;
    let n = j.dim();
    let (t3, t4) = (&j.order3, &j.order4);
    // L_i = Σ_a G_{aai}
    let logdet_grad: Vec<T> = (0..n).map(|i| (0..n).map(|a| t3.get(&[a, a, i])).sum()).collect();
    let mut twice_r = T::zero();
    for i in 0..n {
        for k in 0..n {
            // ∂_k L_i = −Σ_ab G_{abk} G_{abi} + Σ_a G_{aaik}
            let mut dl = T::zero();
            for a in 0..n {
                dl += t4.get(&[a, a, i, k]);
                for b in 0..n {
                    dl -= t3.get(&[a, b, k]) * t3.get(&[a, b, i]);
                }
            }
            let mut term = -t3.get(&[i, k, k]) * logdet_grad[i];
            if i == k {
                term += dl;
            }
            twice_r += term;
        }
    }
    Ok(twice_r * T::lit(0.5))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSample<T> {
    pub point: Vec<T>,
    #[serde(rename = "R")]
    pub r: T,
}

/// R on the uniform interior grid (margin 1e-3), in row-major grid order.
pub fn curvature_grid<T: Scalar>(pot: &SymplecticPotential<T>, density: usize) -> Result<Vec<CurvatureSample<T>>> {
    pot.polytope()
        .interior_grid(density, T::lit(GRID_MARGIN))?
        .into_iter()
        .map(|point| {
            let r = scalar_curvature(pot, &point)?;
            Ok(CurvatureSample { point, r })
        })
        .collect()
}

/// CSV with header `y1,…,yn,R`; values in 17 significant digits.
pub fn grid_to_csv<T: Scalar>(samples: &[CurvatureSample<T>], dim: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=dim).map(|i| format!("y{i}")).chain(["R".to_string()]).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for s in samples {
        let row: Vec<String> = s
            .point
            .iter()
            .chain(std::iter::once(&s.r))
            .map(|v| format!("{:.16e}", v.to_f64_lossy()))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineFit<T> {
    pub gradient: Vec<T>,
    pub constant: T,
    pub max_residual: T,
    pub is_extremal: bool,
}

/// `1e-5 · (1 + max|R|)` over the samples.
pub fn default_threshold<T: Scalar>(samples: &[CurvatureSample<T>]) -> T {
    let max_r = samples.iter().fold(T::zero(), |m, s| m.max(s.r.abs()));
    T::lit(DEFAULT_THRESHOLD_SCALE) * (T::one() + max_r)
}

/// [`affine_fit`] with the default threshold unless one is given.
pub fn affine_fit_default<T: Scalar>(samples: &[CurvatureSample<T>], threshold: Option<T>) -> Result<AffineFit<T>> {
    let t = threshold.unwrap_or_else(|| default_threshold(samples));
    affine_fit(samples, t)
}

/// Least-squares fit `R ≈ ⟨g, y⟩ + c` (Householder QR); extremal iff the
/// sup-norm residual is at most `threshold`.
pub fn affine_fit<T: Scalar>(samples: &[CurvatureSample<T>], threshold: T) -> Result<AffineFit<T>> {
    let Some(first) = samples.first() else {
        return Err(Error::TooFewSamples { got: 0, needed: 1 });
    };
    let n = first.point.len();
    let cols = n + 1;
    if samples.len() < n + 2 {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            needed: n + 2,
        });
    }
    let rows = samples.len();
    let mut a: Vec<Vec<T>> = samples
        .iter()
        .map(|s| s.point.iter().copied().chain(std::iter::once(T::one())).collect())
        .collect();
    let mut b: Vec<T> = samples.iter().map(|s| s.r).collect();
    let scale = a.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm <= T::epsilon() * T::lit(1e3) * scale * T::from_usize_lossy(rows) {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: T = v.iter().map(|&x| x * x).sum();
        if vv == T::zero() {
            continue;
        }
        for c in k..cols {
            let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * a[k + t][c]).sum();
            let f = T::lit(2.0) * dot / vv;
            for (t, &vi) in v.iter().enumerate() {
                a[k + t][c] -= f * vi;
            }
        }
        let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * b[k + t]).sum();
        let f = T::lit(2.0) * dot / vv;
        for (t, &vi) in v.iter().enumerate() {
            b[k + t] -= f * vi;
        }
    }
    let mut coef = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for c in k + 1..cols {
            s -= a[k][c] * coef[c];
        }
        coef[k] = s / a[k][k];
    }
    let max_residual = samples.iter().fold(T::zero(), |m, s| {
        let pred: T = s.point.iter().zip(&coef).map(|(&y, &g)| y * g).sum::<T>() + coef[n];
        m.max((s.r - pred).abs())
    });
    Ok(AffineFit {
        constant: coef[n],
        gradient: coef[..n].to_vec(),
        max_residual,
        is_extremal: max_residual <= threshold,
    })
}
