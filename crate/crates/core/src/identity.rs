//! Polytope form of the total-scalar-curvature identity
//! `Σᵢ ∂v/∂sᵢ = ∫_Δ R dy`, with the common `(2π)ⁿ` factor dropped on both sides.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::curvature::scalar_curvature;
use crate::error::Result;
use crate::polytope::{facet_lattice_volume, DelzantPolytope};
use crate::potential::SymplecticPotential;
use crate::quadrature::{try_integrate, QuadratureOptions};
use crate::scalar::{CompensatedSum, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const NORMALIZATION: &str = "no 2pi factors";

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<T> {
    /// Sum of lattice facet volumes.
    pub lhs: T,
    /// Quadrature of R over the polytope.
    pub rhs: T,
    pub abs_error: T,
    pub quadrature_tol: T,
}

impl<T: Scalar + Serialize> Serialize for IdentityReport<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("IdentityReport", 5)?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.serialize_field("abs_error", &self.abs_error)?;
        st.serialize_field("quadrature_tol", &self.quadrature_tol)?;
        st.serialize_field("normalization", NORMALIZATION)?;
        st.end()
    }
}

/// `Σᵢ ∂v/∂sᵢ`, exactly, as the sum of lattice facet volumes.
pub fn volume_derivative_sum<T: Scalar>(p: &DelzantPolytope<T>) -> Result<T> {
    let mut acc = CompensatedSum::new();
    for i in 0..p.num_facets() {
        acc.add(facet_lattice_volume(p, i)?);
    }
    Ok(acc.value())
}

/// `∫_Δ R dy` by adaptive simplex quadrature.
pub fn total_curvature<T: Scalar>(pot: &SymplecticPotential<T>, opts: &QuadratureOptions<T>) -> Result<T> {
    try_integrate(pot.polytope(), |y| scalar_curvature(pot, y), opts)
}

pub fn check_identity<T: Scalar>(pot: &SymplecticPotential<T>, opts: &QuadratureOptions<T>) -> Result<IdentityReport<T>> {
    let lhs = volume_derivative_sum(pot.polytope())?;
    let rhs = total_curvature(pot, opts)?;
    Ok(IdentityReport {
        lhs,
        rhs,
        abs_error: (lhs - rhs).abs(),
        quadrature_tol: opts.tol,
    })
}
