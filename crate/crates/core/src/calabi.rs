//! Calabi's extremal metrics on the one-point blow-up of CP², realized as a
//! radial perturbation `f(ψ)`, `ψ = y₁ + y₂`, of the canonical potential on
//! the trapezoid `{y₁, y₂ ≥ 0, a ≤ y₁ + y₂ ≤ 1}`.
//!
//! `f` is carried through `f″` only; the profile is written with `f` inside
//! the ½ of the potential, and the potential module halves it.

use serde::Serialize;

use crate::curvature::{self, AffineFit};
use crate::error::{Error, Result};
use crate::polytope::DelzantPolytope;
use crate::potential::{Perturbation, RadialProfile, SymplecticPotential};
use crate::scalar::Scalar;

/// Blow-up parameter `a ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalabiFamily<T> {
    a: T,
}

impl<T: Scalar> CalabiFamily<T> {
    pub fn new(a: T) -> Result<Self> {
        check_parameter(a)?;
        Ok(Self { a })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn polytope(&self) -> DelzantPolytope<T> {
        trapezoid(self.a).expect("trapezoid is valid for a in (0, 1)")
    }

    pub fn potential(&self) -> SymplecticPotential<T> {
        SymplecticPotential::new(
            self.polytope(),
            Perturbation::Radial {
                direction: vec![1, 1],
                profile: RadialProfile::calabi(self.a),
            },
        )
        .expect("calabi perturbation is well-formed")
    }

    pub fn constants(&self) -> (T, T) {
        let a = self.a;
        let one = T::one();
        let denom = (one - a) * (one + T::lit(4.0) * a + a * a);
        (T::lit(2.0) * a / denom, (one - T::lit(3.0) * a * a) / denom)
    }

    pub fn expected_scalar_curvature(&self, psi: T) -> T {
        let (c1, c2) = self.constants();
        T::lit(12.0) * c1 * psi + T::lit(6.0) * c2
    }

    fn check_psi(&self, psi: T) -> Result<()> {
        if psi > self.a && psi < T::one() {
            Ok(())
        } else {
            Err(Error::ProfileDomain {
                psi: psi.to_f64_lossy(),
                lo: self.a.to_f64_lossy(),
                hi: 1.0,
            })
        }
    }

    /// `Q(ψ) = 2aψ² + (1 + 2a − a²)ψ + 2a²` and its first derivative.
    fn quadratic(&self, psi: T) -> (T, T) {
        let a = self.a;
        let two = T::lit(2.0);
        let b = T::one() + two * a - a * a;
        (two * a * psi * psi + b * psi + two * a * a, T::lit(4.0) * a * psi + b)
    }

    pub fn profile_jets(&self, psi: T) -> Result<(T, T, T)> {
        self.check_psi(psi)?;
        let a = self.a;
        let two = T::lit(2.0);
        let num = two * a * (T::one() - a);
        let (q, dq) = self.quadratic(psi);
        let ddq = T::lit(4.0) * a;
        let f2 = num / q - psi.recip();
        let f3 = -num * dq / (q * q) + (psi * psi).recip();
        let f4 = num * (two * dq * dq - q * ddq) / (q * q * q) - two / (psi * psi * psi);
        Ok((f2, f3, f4))
    }

    pub fn dt_dpsi(&self, psi: T) -> Result<T> {
        self.check_psi(psi)?;
        let a = self.a;
        let one = T::one();
        let (q, _) = self.quadratic(psi);
        Ok((one - a) / ((psi - a) * (one - psi)) + T::lit(2.0) * a * (one - a) / q)
    }
}

pub(crate) fn check_parameter<T: Scalar>(a: T) -> Result<()> {
    if a > T::zero() && a < T::one() {
        Ok(())
    } else {
        Err(Error::ParameterRange(format!("blow-up parameter a = {a} must lie in (0, 1)")))
    }
}

fn trapezoid<T: Scalar>(a: T) -> Result<DelzantPolytope<T>> {
    Ok(DelzantPolytope::from_halfspaces(
        2,
        vec![
            (vec![1, 0], T::zero()),
            (vec![0, 1], T::zero()),
            (vec![-1, -1], -T::one()),
            (vec![1, 1], a),
        ],
    )?
    .with_name(format!("calabi trapezoid a={a}")))
}

/// Trapezoid with facets `y₁, y₂, 1 − y₁ − y₂, y₁ + y₂ − a`.
pub fn calabi_polytope<T: Scalar>(a: T) -> Result<DelzantPolytope<T>> {
    Ok(CalabiFamily::new(a)?.polytope())
}

/// Trapezoid plus the Calabi radial profile along (1, 1).
pub fn calabi_potential<T: Scalar>(a: T) -> Result<SymplecticPotential<T>> {
    Ok(CalabiFamily::new(a)?.potential())
}

/// `(c₁, c₂)` with `c₁ = 2a / ((1−a)(1+4a+a²))`, `c₂ = (1−3a²) / ((1−a)(1+4a+a²))`.
pub fn calabi_constants<T: Scalar>(a: T) -> Result<(T, T)> {
    Ok(CalabiFamily::new(a)?.constants())
}

/// `(f″, f‴, f⁗)` of the Calabi profile at `ψ ∈ (a, 1)`.
pub fn calabi_profile_jets<T: Scalar>(a: T, psi: T) -> Result<(T, T, T)> {
    CalabiFamily::new(a)?.profile_jets(psi)
}

/// `12 c₁ ψ + 6 c₂`.
pub fn expected_scalar_curvature<T: Scalar>(a: T, psi: T) -> Result<T> {
    Ok(CalabiFamily::new(a)?.expected_scalar_curvature(psi))
}

pub fn dt_dpsi<T: Scalar>(a: T, psi: T) -> Result<T> {
    CalabiFamily::new(a)?.dt_dpsi(psi)
}

#[derive(Clone, Debug, Serialize)]
pub struct CalabiReport<T> {
    pub a: T,
    pub c1: T,
    pub c2: T,
    pub fit: AffineFit<T>,
}

/// Builds the family member, samples R on the interior grid, and fits it.
pub fn calabi_report<T: Scalar>(a: T, density: usize, threshold: Option<T>) -> Result<CalabiReport<T>> {
    let family = CalabiFamily::new(a)?;
    let (c1, c2) = family.constants();
    let samples = curvature::curvature_grid(&family.potential(), density)?;
    let fit = curvature::affine_fit_default(&samples, threshold)?;
    Ok(CalabiReport { a, c1, c2, fit })
}
