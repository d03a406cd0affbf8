//! Differential geometry of toric Kähler metrics computed from the moment
//! polytope: symplectic potentials and their jets, scalar curvature in
//! moment coordinates, extremality by affine fitting, the total-curvature
//! identity, and Calabi's extremal family on the blown-up plane.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix double precision, which every quoted tolerance assumes.

pub mod calabi;
mod combinatorics;
pub mod curvature;
pub mod error;
pub mod identity;
pub mod lattice;
pub mod linalg;
pub mod polytope;
pub mod potential;
pub mod quadrature;
pub mod scalar;
pub mod tensor;

pub use calabi::{
    calabi_constants, calabi_polytope, calabi_potential, calabi_profile_jets, calabi_report,
    dt_dpsi, expected_scalar_curvature, CalabiFamily, CalabiReport,
};
pub use curvature::{
    affine_fit, affine_fit_default, curvature_grid, grid_to_csv, inverse_hessian_jets,
    scalar_curvature, scalar_curvature_logdet, AffineFit, CurvatureSample, InverseHessianJets,
};
pub use error::{Error, Result};
pub use identity::{check_identity, total_curvature, volume_derivative_sum, IdentityReport};
pub use linalg::Matrix;
pub use polytope::{
    check_delzant, enumerate_vertices, facet_lattice_volume, parse_polytope, standard_simplex, unit_cube, volume,
    DelzantPolytope, Facet, ValidationReport, Vertex, VertexFailure,
};
pub use potential::{
    check_convexity, dual_potential_value, hessian, invert_legendre, jets, l_values,
    legendre_map, parse_potential, JetTable, Perturbation, ProfileId, RadialProfile,
    SymplecticPotential,
};
pub use quadrature::{integrate, try_integrate, QuadratureOptions, SimplexRule, Triangulation};
pub use scalar::Scalar;
pub use tensor::Tensor;

pub type Polytope64 = DelzantPolytope<f64>;
pub type Polytope32 = DelzantPolytope<f32>;
pub type Potential64 = SymplecticPotential<f64>;
pub type Potential32 = SymplecticPotential<f32>;
pub type Jets64 = JetTable<f64>;
pub type Fit64 = AffineFit<f64>;
pub type Sample64 = CurvatureSample<f64>;
pub type IdentityReport64 = IdentityReport<f64>;
pub type Calabi64 = CalabiFamily<f64>;
