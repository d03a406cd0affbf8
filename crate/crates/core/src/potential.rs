//! Symplectic potentials `G = ½ Σ lₖ log lₖ + f` and their jets up to order 4.
//!
//! Everything on the main path is analytic: the canonical part has closed-form
//! derivatives `(−1)ᵏ (k−2)! ½ Σ uᵢ^{⊗k} / lᵢ^{k−1}` for k ≥ 2, polynomial
//! perturbations are differentiated exactly, and radial perturbations go
//! through the profile's closed-form `f″, f‴, f⁗` along the direction.

use serde::{Deserialize, Serialize};

use crate::calabi;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::DelzantPolytope;
use crate::quadrature::gauss_legendre_unit;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Maximum total degree of a polynomial perturbation.
pub const MAX_POLYNOMIAL_DEGREE: u32 = 8;
/// Jets are refused when some `lᵢ(y) ≤ INTERIOR_MARGIN · (1 + |λᵢ|)`.
pub const INTERIOR_MARGIN: f64 = 1e-12;
/// Distance of the convexity / curvature sampling grid from the boundary.
pub const GRID_MARGIN: f64 = 1e-3;
const CONVEXITY_FLOOR: f64 = 1e-12;
const NEWTON_MAX_ITERATIONS: usize = 100;
const NEWTON_RESIDUAL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T> {
    pub exponents: Vec<u32>,
    pub coefficient: T,
}

/// Which normalization a profile's `f` is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileConvention {
    /// `G = ½ Σ lₖ log lₖ + f`.
    Additive,
    /// `G = ½ (Σ lₖ log lₖ + f)`; contributions are halved.
    InsideHalf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileId {
    Calabi,
}

/// Univariate profile known through `g = f″` and its first two derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile<T> {
    pub id: ProfileId,
    pub parameters: Vec<T>,
}

impl<T: Scalar> RadialProfile<T> {
    pub fn calabi(a: T) -> Self {
        Self {
            id: ProfileId::Calabi,
            parameters: vec![a],
        }
    }

    pub fn convention(&self) -> ProfileConvention {
        match self.id {
            ProfileId::Calabi => ProfileConvention::InsideHalf,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.id {
            ProfileId::Calabi => {
                let [a] = self.parameters[..] else {
                    return Err(Error::InvalidPerturbation(format!(
                        "calabi profile takes one parameter, got {}",
                        self.parameters.len()
                    )));
                };
                calabi::check_parameter(a)
            }
        }
    }

    /// `(f″, f‴, f⁗)` at `psi`, in the profile's own convention.
    pub fn second_derivative_jets(&self, psi: T) -> Result<[T; 3]> {
        match self.id {
            ProfileId::Calabi => {
                let (f2, f3, f4) = calabi::calabi_profile_jets(self.parameters[0], psi)?;
                Ok([f2, f3, f4])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation<T> {
    None,
    Polynomial(Vec<Monomial<T>>),
    Radial {
        direction: Vec<i64>,
        profile: RadialProfile<T>,
    },
}

impl<T: Scalar> Perturbation<T> {
    pub fn polynomial(terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Self {
        Self::Polynomial(
            terms
                .into_iter()
                .map(|(exponents, coefficient)| Monomial {
                    exponents,
                    coefficient,
                })
                .collect(),
        )
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Self::None => Ok(()),
            Self::Polynomial(terms) => {
                for t in terms {
                    if t.exponents.len() != dim {
                        return Err(Error::InvalidPerturbation(format!(
                            "monomial {:?} has {} exponents, polytope dimension is {dim}",
                            t.exponents,
                            t.exponents.len()
                        )));
                    }
                    let deg: u32 = t.exponents.iter().sum();
                    if deg > MAX_POLYNOMIAL_DEGREE {
                        return Err(Error::InvalidPerturbation(format!(
                            "monomial degree {deg} exceeds cap {MAX_POLYNOMIAL_DEGREE}"
                        )));
                    }
                    if !t.coefficient.is_finite() {
                        return Err(Error::InvalidPerturbation("non-finite coefficient".into()));
                    }
                }
                Ok(())
            }
            Self::Radial { direction, profile } => {
                if direction.len() != dim {
                    return Err(Error::InvalidPerturbation(format!(
                        "radial direction has length {}, polytope dimension is {dim}",
                        direction.len()
                    )));
                }
                if direction.iter().all(|&w| w == 0) {
                    return Err(Error::InvalidPerturbation("radial direction is zero".into()));
                }
                profile.validate()
            }
        }
    }
}

/// Canonical potential of a polytope plus a perturbation.
///
/// Convexity is not enforced on construction; use [`check_convexity`].
#[derive(Clone, Debug)]
pub struct SymplecticPotential<T> {
    polytope: DelzantPolytope<T>,
    perturbation: Perturbation<T>,
}

impl<T: Scalar> SymplecticPotential<T> {
    pub fn new(polytope: DelzantPolytope<T>, perturbation: Perturbation<T>) -> Result<Self> {
        perturbation.validate(polytope.dim())?;
        Ok(Self {
            polytope,
            perturbation,
        })
    }

    pub fn canonical(polytope: DelzantPolytope<T>) -> Self {
        Self {
            polytope,
            perturbation: Perturbation::None,
        }
    }

    pub fn polytope(&self) -> &DelzantPolytope<T> {
        &self.polytope
    }

    pub fn perturbation(&self) -> &Perturbation<T> {
        &self.perturbation
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }
}

/// Value and derivatives of G at a point.
#[derive(Clone, Debug)]
pub struct JetTable<T> {
    pub point: Vec<T>,
    pub order0: T,
    pub order1: Vec<T>,
    pub order2: Matrix<T>,
    pub order3: Tensor<T>,
    pub order4: Tensor<T>,
    /// False when order0/order1 include a numerically integrated radial term.
    /// Those entries are fixed only up to an affine function, which never
    /// affects the metric.
    pub low_orders_exact: bool,
}

impl<T: Scalar> JetTable<T> {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    fn zeros(point: &[T]) -> Self {
        let n = point.len();
        Self {
            point: point.to_vec(),
            order0: T::zero(),
            order1: vec![T::zero(); n],
            order2: Matrix::zeros(n),
            order3: Tensor::zeros(n, 3),
            order4: Tensor::zeros(n, 4),
            low_orders_exact: true,
        }
    }

    /// Adds `c · u^{⊗k}` scaled by `coef[k]` at every order k.
    fn add_ridge(&mut self, u: &[T], coef: [T; 5]) {
        let n = u.len();
        self.order0 += coef[0];
        for i in 0..n {
            self.order1[i] += coef[1] * u[i];
            for j in 0..n {
                self.order2[(i, j)] += coef[2] * u[i] * u[j];
            }
        }
        self.order3.add_outer_power(u, coef[3]);
        self.order4.add_outer_power(u, coef[4]);
    }
}

/// `(l₁(y), …, l_d(y))`.
pub fn l_values<T: Scalar>(p: &DelzantPolytope<T>, y: &[T]) -> Vec<T> {
    p.l_values(y)
}

fn require_interior<T: Scalar>(p: &DelzantPolytope<T>, y: &[T]) -> Result<Vec<T>> {
    if y.len() != p.dim() {
        return Err(Error::PointDimension {
            expected: p.dim(),
            got: y.len(),
        });
    }
    let margin = T::lit(INTERIOR_MARGIN);
    let ls = p.l_values(y);
    let interior = ls
        .iter()
        .zip(p.facets())
        .all(|(&l, f)| l > margin * (T::one() + f.offset().abs()));
    if !interior {
        return Err(Error::NotInterior(y.iter().map(|v| v.to_f64_lossy()).collect()));
    }
    Ok(ls)
}

/// All partial derivatives of G up to total order 4 at an interior point.
pub fn jets<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<JetTable<T>> {
    jets_impl(pot, y, None)
}

/// Jets of `z ↦ G(Mᵀz)` at the `z` corresponding to `y`: every derivative
/// index is contracted with `m`. Ridge terms are built from the mapped
/// normals `M u`, so no cancellation is introduced for skewed frames.
pub(crate) fn jets_in_frame<T: Scalar>(
    pot: &SymplecticPotential<T>,
    y: &[T],
    m: &Matrix<T>,
) -> Result<JetTable<T>> {
    jets_impl(pot, y, Some(m))
}

fn jets_impl<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T], frame: Option<&Matrix<T>>) -> Result<JetTable<T>> {
    let p = &pot.polytope;
    let ls = require_interior(p, y)?;
    let mut jet = JetTable::zeros(y);
    let half = T::lit(0.5);
    let map = |v: Vec<T>| match frame {
        Some(m) => m.mul_vec(&v),
        None => v,
    };
    for (f, &l) in p.facets().iter().zip(&ls) {
        let u = map(f.normal_as::<T>());
        let l2 = l * l;
        jet.add_ridge(
            &u,
            [
                half * l * l.ln(),
                half * (l.ln() + T::one()),
                half / l,
                -half / l2,
                T::one() / (l2 * l),
            ],
        );
    }
    match &pot.perturbation {
        Perturbation::None => {}
        Perturbation::Polynomial(terms) => match frame {
            None => add_polynomial(&mut jet, terms, y),
            Some(m) => {
                let mut poly = JetTable::zeros(y);
                add_polynomial(&mut poly, terms, y);
                jet.order0 += poly.order0;
                for (a, v) in m.mul_vec(&poly.order1).into_iter().enumerate() {
                    jet.order1[a] += v;
                }
                let h = m.mul(&poly.order2).mul(&m.transpose());
                for a in 0..y.len() {
                    for b in 0..y.len() {
                        jet.order2[(a, b)] += h[(a, b)];
                    }
                }
                jet.order3.add_assign(&poly.order3.transformed(m));
                jet.order4.add_assign(&poly.order4.transformed(m));
            }
        },
        Perturbation::Radial { direction, profile } => {
            add_radial(&mut jet, p, direction, profile, y, frame)?;
        }
    }
    Ok(jet)
}

fn add_polynomial<T: Scalar>(jet: &mut JetTable<T>, terms: &[Monomial<T>], y: &[T]) {
    let n = y.len();
    for t in terms {
        jet.order0 += monomial_derivative(t, y, &[]);
        for i in 0..n {
            jet.order1[i] += monomial_derivative(t, y, &[i]);
            for j in 0..n {
                jet.order2[(i, j)] += monomial_derivative(t, y, &[i, j]);
            }
        }
        let idx3: Vec<Vec<usize>> = jet.order3.indices().collect();
        for idx in idx3 {
            jet.order3.add_at(&idx, monomial_derivative(t, y, &idx));
        }
        let idx4: Vec<Vec<usize>> = jet.order4.indices().collect();
        for idx in idx4 {
            jet.order4.add_at(&idx, monomial_derivative(t, y, &idx));
        }
    }
}

/// ∂^idx of `c · Π yᵢ^{eᵢ}`.
fn monomial_derivative<T: Scalar>(t: &Monomial<T>, y: &[T], idx: &[usize]) -> T {
    let mut value = t.coefficient;
    for (i, (&e, &yi)) in t.exponents.iter().zip(y).enumerate() {
        let k = idx.iter().filter(|&&j| j == i).count() as u32;
        if k > e {
            return T::zero();
        }
        for m in 0..k {
            value *= T::from_int((e - m) as i64);
        }
        value *= yi.powi((e - k) as i32);
    }
    value
}

fn add_radial<T: Scalar>(
    jet: &mut JetTable<T>,
    p: &DelzantPolytope<T>,
    direction: &[i64],
    profile: &RadialProfile<T>,
    y: &[T],
    frame: Option<&Matrix<T>>,
) -> Result<()> {
    let w: Vec<T> = direction.iter().map(|&d| T::from_int(d)).collect();
    let psi = linalg::dot(&w, y);
    let [g, dg, ddg] = profile.second_derivative_jets(psi)?;
    let psi0 = linalg::dot(&w, &p.vertex_centroid());
    let (f0, f1) = integrate_profile_twice(profile, psi0, psi)?;
    let scale = match profile.convention() {
        ProfileConvention::Additive => T::one(),
        ProfileConvention::InsideHalf => T::lit(0.5),
    };
    let w = match frame {
        Some(m) => m.mul_vec(&w),
        None => w,
    };
    jet.add_ridge(&w, [scale * f0, scale * f1, scale * g, scale * dg, scale * ddg]);
    jet.low_orders_exact = false;
    Ok(())
}

/// `(f(ψ), f′(ψ))` with `f(ψ₀) = f′(ψ₀) = 0`, from `f″` by Gauss–Legendre.
fn integrate_profile_twice<T: Scalar>(profile: &RadialProfile<T>, psi0: T, psi: T) -> Result<(T, T)> {
    const PANELS: usize = 8;
    const POINTS: usize = 16;
    let (xs, ws) = gauss_legendre_unit::<T>(POINTS);
    let h = (psi - psi0) / T::from_usize_lossy(PANELS);
    let mut f0 = T::zero();
    let mut f1 = T::zero();
    for panel in 0..PANELS {
        let start = psi0 + h * T::from_usize_lossy(panel);
        for (&x, &w) in xs.iter().zip(&ws) {
            let s = start + h * x;
            let [g, _, _] = profile.second_derivative_jets(s)?;
            f1 += w * h * g;
            f0 += w * h * (psi - s) * g;
        }
    }
    Ok((f0, f1))
}

/// `(G_ij)` at an interior point.
pub fn hessian<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<Matrix<T>> {
    Ok(jets(pot, y)?.order2)
}

#[derive(Clone, Debug)]
pub struct ConvexityReport<T> {
    pub samples: usize,
    pub min_eigenvalue: T,
    /// Grid points where the smallest Hessian eigenvalue is ≤ 1e-12.
    pub failures: Vec<Vec<T>>,
}

impl<T> ConvexityReport<T> {
    pub fn is_convex(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Scans the interior grid for points where the Hessian fails to be positive definite.
pub fn check_convexity<T: Scalar>(pot: &SymplecticPotential<T>, grid_density: usize) -> Result<ConvexityReport<T>> {
    let grid = pot.polytope.interior_grid(grid_density, T::lit(GRID_MARGIN))?;
    let floor = T::lit(CONVEXITY_FLOOR);
    let mut min_eigenvalue = T::infinity();
    let mut failures = Vec::new();
    for y in &grid {
        let ev = hessian(pot, y)?.min_symmetric_eigenvalue();
        min_eigenvalue = min_eigenvalue.min(ev);
        if ev <= floor {
            failures.push(y.clone());
        }
    }
    Ok(ConvexityReport {
        samples: grid.len(),
        min_eigenvalue,
        failures,
    })
}

/// `x = ∇G(y)`, with the additive constants of the Legendre transform set to zero.
pub fn legendre_map<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<Vec<T>> {
    Ok(jets(pot, y)?.order1)
}

/// `F = Σ yᵢ ∂G/∂yᵢ − G` at `y`, i.e. the Kähler potential at `x = ∇G(y)`.
pub fn dual_potential_value<T: Scalar>(pot: &SymplecticPotential<T>, y: &[T]) -> Result<T> {
    let j = jets(pot, y)?;
    Ok(linalg::dot(y, &j.order1) - j.order0)
}

/// Solves `∇G(y) = x` by damped Newton from the vertex centroid.
pub fn invert_legendre<T: Scalar>(pot: &SymplecticPotential<T>, x: &[T]) -> Result<Vec<T>> {
    let p = &pot.polytope;
    if x.len() != p.dim() {
        return Err(Error::PointDimension {
            expected: p.dim(),
            got: x.len(),
        });
    }
    let target = T::lit(NEWTON_RESIDUAL).max(T::epsilon() * T::lit(64.0) * (T::one() + norm(x)));
    let residual = |y: &[T]| -> Result<(Vec<T>, JetTable<T>)> {
        let j = jets(pot, y)?;
        let r = j.order1.iter().zip(x).map(|(&g, &xi)| g - xi).collect();
        Ok((r, j))
    };
    let mut y = p.vertex_centroid();
    let (mut r, mut jet) = residual(&y)?;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let rn = norm(&r);
        if rn < target {
            return Ok(y);
        }
        let step = linalg::solve(&jet.order2, &r).ok_or(Error::SingularHessian {
            pivot: 0.0,
        })?;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = y.iter().zip(&step).map(|(&yi, &si)| yi - t * si).collect();
            if let Ok((r_new, j_new)) = residual(&trial) {
                if norm(&r_new) < rn {
                    y = trial;
                    r = r_new;
                    jet = j_new;
                    accepted = true;
                    break;
                }
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    if norm(&r) < target {
        return Ok(y);
    }
    Err(Error::LegendreNonConvergence {
        iterations: NEWTON_MAX_ITERATIONS,
        residual: norm(&r).to_f64_lossy(),
    })
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&a| a * a).sum::<T>().sqrt()
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PerturbationFile {
    None,
    Polynomial {
        terms: Vec<TermFile>,
    },
    Radial {
        direction: Vec<i64>,
        profile: ProfileId,
        #[serde(default)]
        parameters: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    exponents: Vec<u32>,
    coefficient: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PotentialFile {
    Wrapped { perturbation: PerturbationFile },
    Bare(PerturbationFile),
}

/// Parses a potential file and attaches it to `polytope`.
///
/// Accepts `{"perturbation": {...}}` or the bare perturbation object.
pub fn parse_potential<T: Scalar>(text: &str, polytope: DelzantPolytope<T>) -> Result<SymplecticPotential<T>> {
    let doc: PotentialFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let file = match doc {
        PotentialFile::Wrapped { perturbation } => perturbation,
        PotentialFile::Bare(p) => p,
    };
    let perturbation = match file {
        PerturbationFile::None => Perturbation::None,
        PerturbationFile::Polynomial { terms } => {
            Perturbation::polynomial(terms.into_iter().map(|t| (t.exponents, T::lit(t.coefficient))))
        }
        PerturbationFile::Radial {
            direction,
            profile,
            parameters,
        } => Perturbation::Radial {
            direction,
            profile: RadialProfile {
                id: profile,
                parameters: parameters.into_iter().map(T::lit).collect(),
            },
        },
    };
    SymplecticPotential::new(polytope, perturbation)
}
