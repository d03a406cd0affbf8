use thiserror::Error;

/// Errors raised by polytope construction and the geometric pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("facet {facet}: normal component {value} is not an integer")]
    NonIntegerNormal { facet: usize, value: String },
    #[error("facet {facet}: normal {normal:?} is not primitive (gcd {gcd})")]
    NonPrimitiveNormal {
        facet: usize,
        normal: Vec<i64>,
        gcd: i64,
    },
    #[error("facet {facet}: normal has length {got}, expected {expected}")]
    DimensionMismatch {
        facet: usize,
        expected: usize,
        got: usize,
    },
    #[error("need at least {needed} facets in dimension {dim}, got {got}")]
    TooFewFacets { dim: usize, needed: usize, got: usize },
    #[error("feasible region is unbounded")]
    Unbounded,
    #[error("feasible region is empty or has empty interior")]
    Empty,
    #[error("facet {0} is redundant (supports no vertex)")]
    RedundantFacet(usize),
    #[error("vertex {vertex:?} is degenerate: {tight} facets are tight in dimension {dim}")]
    DegenerateVertex {
        vertex: Vec<f64>,
        tight: usize,
        dim: usize,
    },
    #[error("facet index {index} out of range (polytope has {count} facets)")]
    FacetIndex { index: usize, count: usize },
    #[error("unsupported dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),
    #[error("quadrature did not converge after {levels} subdivision levels (last change {last_change:e})")]
    QuadratureNonConvergence { levels: u32, last_change: f64 },
    #[error("point not interior: {0:?}")]
    NotInterior(Vec<f64>),
    #[error("point has {got} coordinates, polytope dimension is {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("singular or indefinite Hessian (pivot {pivot:e})")]
    SingularHessian { pivot: f64 },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("profile argument {psi} outside its domain ({lo}, {hi})")]
    ProfileDomain { psi: f64, lo: f64, hi: f64 },
    #[error("Legendre inversion did not converge after {iterations} iterations (residual {residual:e})")]
    LegendreNonConvergence { iterations: usize, residual: f64 },
    #[error("rank-deficient sample set for affine fit")]
    RankDeficient,
    #[error("not enough samples: got {got}, need {needed}")]
    TooFewSamples { got: usize, needed: usize },
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("grid density must be at least 2, got {0}")]
    GridDensity(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
