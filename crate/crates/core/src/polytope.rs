//! Convex polytopes given by integer-normal halfspaces `⟨y, u⟩ ≥ λ`.
//!
//! Construction enumerates vertices by brute force over n-subsets of facets
//! and rejects unbounded, empty, and redundant descriptions. Delzant
//! conditions (simple, smooth) are checked separately by [`check_delzant`]
//! so that non-smooth polytopes can still be inspected and reported on.

use serde::{Deserialize, Serialize};

use crate::combinatorics::for_each_combination;
use crate::error::{Error, Result};
use crate::lattice;
use crate::linalg::{self, Matrix};
use crate::quadrature;
use crate::scalar::{CompensatedSum, Scalar};

/// One supporting halfspace `⟨y, normal⟩ ≥ offset` with a primitive inward normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet<T> {
    normal: Vec<i64>,
    offset: T,
}

impl<T: Scalar> Facet<T> {
    pub fn new(normal: Vec<i64>, offset: T) -> Result<Self> {
        Self::checked(0, normal, offset)
    }

    fn checked(index: usize, normal: Vec<i64>, offset: T) -> Result<Self> {
        let g = lattice::content(&normal);
        if g != 1 {
            return Err(Error::NonPrimitiveNormal {
                facet: index,
                normal,
                gcd: g,
            });
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &[i64] {
        &self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Affine function `l(y) = ⟨y, u⟩ − λ`.
    pub fn eval(&self, y: &[T]) -> T {
        let s: T = self
            .normal
            .iter()
            .zip(y)
            .map(|(&u, &yi)| T::from_int(u) * yi)
            .sum();
        s - self.offset
    }

    pub fn normal_as<S: Scalar>(&self) -> Vec<S> {
        self.normal.iter().map(|&u| S::from_int(u)).collect()
    }

    fn tight_tolerance(&self) -> T {
        T::geometric_tolerance() * (T::one() + self.offset.abs())
    }
}

/// A vertex together with the facets that are tight there.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex<T> {
    pub point: Vec<T>,
    /// Sorted facet indices.
    pub active: Vec<usize>,
}

/// Bounded full-dimensional polytope with integral primitive normals.
#[derive(Clone, Debug)]
pub struct DelzantPolytope<T> {
    dim: usize,
    facets: Vec<Facet<T>>,
    vertices: Vec<Vertex<T>>,
    name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFailure {
    pub vertex: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_delzant: bool,
    pub failures: Vec<VertexFailure>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    dim: usize,
    facets: Vec<FacetFile>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FacetFile {
    normal: Vec<serde_json::Number>,
    offset: f64,
}

#[derive(Serialize)]
struct PolytopeFileOut<'a> {
    dim: usize,
    facets: Vec<FacetFileOut<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
}

#[derive(Serialize)]
struct FacetFileOut<'a> {
    normal: &'a [i64],
    offset: f64,
}

/// Parses the JSON polytope format and builds the polytope.
pub fn parse_polytope<T: Scalar>(text: &str) -> Result<DelzantPolytope<T>> {
    let doc: PolytopeFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut facets = Vec::with_capacity(doc.facets.len());
    for (i, f) in doc.facets.into_iter().enumerate() {
        let normal = f
            .normal
            .iter()
            .map(|num| {
                num.as_i64().ok_or_else(|| Error::NonIntegerNormal {
                    facet: i,
                    value: num.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if !f.offset.is_finite() {
            return Err(Error::Malformed(format!("facet {i}: offset is not finite")));
        }
        facets.push((normal, T::lit(f.offset)));
    }
    let mut p = DelzantPolytope::from_halfspaces(doc.dim, facets)?;
    p.name = doc.name;
    Ok(p)
}

impl<T: Scalar> DelzantPolytope<T> {
    /// Builds the polytope from `(normal, offset)` pairs.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<(Vec<i64>, T)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if halfspaces.len() < dim + 1 {
            return Err(Error::TooFewFacets {
                dim,
                needed: dim + 1,
                got: halfspaces.len(),
            });
        }
        let facets = halfspaces
            .into_iter()
            .enumerate()
            .map(|(i, (normal, offset))| {
                if normal.len() != dim {
                    return Err(Error::DimensionMismatch {
                        facet: i,
                        expected: dim,
                        got: normal.len(),
                    });
                }
                Facet::checked(i, normal, offset)
            })
            .collect::<Result<Vec<_>>>()?;

        if !is_bounded(dim, &facets) {
            return Err(Error::Unbounded);
        }
        let vertices = raw_vertices(dim, &facets);
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        let p = Self {
            dim,
            facets,
            vertices,
            name: None,
        };
        let c = p.vertex_centroid();
        if p
            .facets
            .iter()
            .any(|f| f.eval(&c) <= f.tight_tolerance())
        {
            return Err(Error::Empty);
        }
        for i in 0..p.facets.len() {
            if !p.is_true_facet(i) {
                return Err(Error::RedundantFacet(i));
            }
        }
        Ok(p)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }

    /// `(l₁(y), …, l_d(y))`.
    pub fn l_values(&self, y: &[T]) -> Vec<T> {
        self.facets.iter().map(|f| f.eval(y)).collect()
    }

    /// Interior iff every `lᵢ(y)` exceeds `margin · (1 + |λᵢ|)`.
    pub fn contains_interior(&self, y: &[T], margin: T) -> bool {
        y.len() == self.dim
            && self
                .facets
                .iter()
                .all(|f| f.eval(y) > margin * (T::one() + f.offset.abs()))
    }

    pub fn vertex_centroid(&self) -> Vec<T> {
        let k = T::from_usize_lossy(self.vertices.len());
        (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.point[i]).sum::<T>() / k)
            .collect()
    }

    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let lo = (0..self.dim)
            .map(|i| {
                self.vertices
                    .iter()
                    .fold(T::infinity(), |m, v| m.min(v.point[i]))
            })
            .collect();
        let hi = (0..self.dim)
            .map(|i| {
                self.vertices
                    .iter()
                    .fold(T::neg_infinity(), |m, v| m.max(v.point[i]))
            })
            .collect();
        (lo, hi)
    }

    /// Range of coordinate `prefix.len()` over the slice of the polytope
    /// with the leading coordinates fixed to `prefix`; `None` if empty.
    fn slice_range(&self, prefix: &[T]) -> Option<(T, T)> {
        let k = prefix.len();
        let m = self.dim - k;
        let rows: Vec<(Vec<T>, T)> = self
            .facets
            .iter()
            .map(|f| {
                let u = f.normal_as::<T>();
                let fixed: T = u[..k].iter().zip(prefix).map(|(&a, &b)| a * b).sum();
                (u[k..].to_vec(), f.offset - fixed)
            })
            .collect();
        let tol = T::geometric_tolerance();
        let mut range: Option<(T, T)> = None;
        for_each_combination(rows.len(), m, |idx| {
            let a = Matrix::from_rows(&idx.iter().map(|&r| rows[r].0.clone()).collect::<Vec<_>>());
            let b: Vec<T> = idx.iter().map(|&r| rows[r].1).collect();
            let Some(z) = linalg::solve(&a, &b) else {
                return;
            };
            let feasible = rows
                .iter()
                .all(|(u, rhs)| linalg::dot(u, &z) >= *rhs - tol * (T::one() + rhs.abs()));
            if feasible {
                range = Some(match range {
                    None => (z[0], z[0]),
                    Some((lo, hi)) => (lo.min(z[0]), hi.max(z[0])),
                });
            }
        });
        range
    }

    /// Uniform grid with `density` points per axis, laid out slice by slice:
    /// the first coordinate runs over the polytope's extent, and each further
    /// coordinate over the extent of the slice through the earlier ones,
    /// every range shrunk by `margin` at both ends. Slices narrower than
    /// `2·margin` are skipped, as are points with some `lᵢ ≤ margin / 2`.
    /// Points are in row-major order (last coordinate fastest).
    pub fn interior_grid(&self, density: usize, margin: T) -> Result<Vec<Vec<T>>> {
        if density < 2 {
            return Err(Error::GridDensity(density));
        }
        let half = margin / T::lit(2.0);
        let step_count = T::from_usize_lossy(density - 1);
        let mut out = Vec::new();
        let mut stack = vec![Vec::<T>::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == self.dim {
                if self.facets.iter().all(|f| f.eval(&prefix) > half) {
                    out.push(prefix);
                }
                continue;
            }
            let Some((lo, hi)) = self.slice_range(&prefix) else {
                continue;
            };
            let (a, b) = (lo + margin, hi - margin);
            if !(b > a) {
                continue;
            }
            let step = (b - a) / step_count;
            // reversed so that popping yields ascending order
            for k in (0..density).rev() {
                let mut y = prefix.clone();
                y.push(a + step * T::from_usize_lossy(k));
                stack.push(y);
            }
        }
        Ok(out)
    }

    /// Image under `y ↦ A y + t` with `A ∈ GL(n, ℤ)`.
    ///
    /// Normals transform by `A⁻ᵀ`, which stays integral and primitive.
    pub fn map_unimodular(&self, a: &[Vec<i64>], t: &[T]) -> Result<Self> {
        let n = self.dim;
        if a.len() != n || a.iter().any(|r| r.len() != n) || t.len() != n {
            return Err(Error::Malformed("transform has wrong shape".into()));
        }
        let d = lattice::det(a);
        if d.abs() != 1 {
            return Err(Error::Malformed(format!(
                "transform is not unimodular (det {d})"
            )));
        }
        let adj = lattice::adjugate(a);
        let halfspaces = self
            .facets
            .iter()
            .map(|f| {
                // A⁻ᵀ u = adj(A)ᵀ u / det(A)
                let normal: Vec<i64> = (0..n)
                    .map(|i| {
                        let s: i128 = (0..n).map(|k| adj[k][i] * f.normal[k] as i128).sum();
                        (s / d) as i64
                    })
                    .collect();
                let shift: T = normal
                    .iter()
                    .zip(t)
                    .map(|(&u, &ti)| T::from_int(u) * ti)
                    .sum();
                (normal, f.offset + shift)
            })
            .collect();
        Self::from_halfspaces(n, halfspaces)
    }

    /// `cΔ` for `c > 0`: offsets scale by `c`.
    pub fn dilate(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::ParameterRange(format!("dilation factor {c} must be positive")));
        }
        Self::from_halfspaces(
            self.dim,
            self.facets
                .iter()
                .map(|f| (f.normal.clone(), f.offset * c))
                .collect(),
        )
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let n = self.dim + other.dim;
        let mut hs = Vec::with_capacity(self.num_facets() + other.num_facets());
        for f in &self.facets {
            let mut u = f.normal.clone();
            u.resize(n, 0);
            hs.push((u, f.offset));
        }
        for f in &other.facets {
            let mut u = vec![0; self.dim];
            u.extend_from_slice(&f.normal);
            hs.push((u, f.offset));
        }
        Self::from_halfspaces(n, hs)
    }

    /// JSON document in the polytope file format.
    pub fn to_json(&self) -> String {
        let doc = PolytopeFileOut {
            dim: self.dim,
            facets: self
                .facets
                .iter()
                .map(|f| FacetFileOut {
                    normal: &f.normal,
                    offset: f.offset.to_f64_lossy(),
                })
                .collect(),
            name: self.name.as_deref(),
        };
        serde_json::to_string_pretty(&doc).expect("polytope serializes")
    }

    fn is_true_facet(&self, i: usize) -> bool {
        let pts: Vec<&Vec<T>> = self
            .vertices
            .iter()
            .filter(|v| v.active.contains(&i))
            .map(|v| &v.point)
            .collect();
        if pts.is_empty() {
            return false;
        }
        affine_rank(&pts) + 1 == self.dim
    }

    pub(crate) fn vertices_on(&self, face: &[usize]) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| face.iter().all(|i| v.active.contains(i)))
            .map(|(k, _)| k)
            .collect()
    }

    pub(crate) fn is_simple(&self) -> bool {
        self.vertices.iter().all(|v| v.active.len() == self.dim)
    }
}

/// Vertices of the polytope; fails on a non-simple vertex.
pub fn enumerate_vertices<T: Scalar>(p: &DelzantPolytope<T>) -> Result<Vec<Vertex<T>>> {
    if let Some(v) = p.vertices.iter().find(|v| v.active.len() != p.dim) {
        return Err(Error::DegenerateVertex {
            vertex: v.point.iter().map(|x| x.to_f64_lossy()).collect(),
            tight: v.active.len(),
            dim: p.dim,
        });
    }
    Ok(p.vertices.clone())
}

/// Checks simplicity and smoothness at every vertex.
///
/// At a simple vertex the primitive edge directions are the (sign-fixed,
/// primitivized) columns of the adjugate of the active normal matrix; they
/// form a ℤⁿ basis iff their integer determinant is ±1.
pub fn check_delzant<T: Scalar>(p: &DelzantPolytope<T>) -> ValidationReport {
    let n = p.dim;
    let mut failures = Vec::new();
    for (k, v) in p.vertices.iter().enumerate() {
        if v.active.len() != n {
            failures.push(VertexFailure {
                vertex: k,
                reason: format!(
                    "not simple: {} facets meet at a vertex of a {}-dimensional polytope",
                    v.active.len(),
                    n
                ),
            });
            continue;
        }
        let rows: Vec<Vec<i64>> = v
            .active
            .iter()
            .map(|&i| p.facets[i].normal.clone())
            .collect();
        let edges = edge_directions(&rows);
        let det = lattice::det(&edges);
        if det.abs() != 1 {
            failures.push(VertexFailure {
                vertex: k,
                reason: format!(
                    "primitive edge directions {:?} do not form a basis of Z^{}: determinant ±{}",
                    edges,
                    n,
                    det.abs()
                ),
            });
        }
    }
    ValidationReport {
        is_delzant: failures.is_empty(),
        failures,
    }
}

/// Primitive integer edge directions leaving a simple vertex, one per active
/// facet: edge `j` stays on every active facet except `j` and enters the
/// interior of facet `j`'s halfspace.
pub fn edge_directions(active_normals: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = active_normals.len();
    let adj = lattice::adjugate(active_normals);
    let det = lattice::det(active_normals);
    let sign = det.signum();
    (0..n)
        .map(|j| {
            let col: Vec<i128> = (0..n).map(|i| adj[i][j] * sign).collect();
            let g = col.iter().fold(0i128, |g, &x| gcd_i128(g, x)).max(1);
            col.iter().map(|&x| (x / g) as i64).collect()
        })
        .collect()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Euclidean n-volume, summed over the fan triangulation.
pub fn volume<T: Scalar>(p: &DelzantPolytope<T>) -> Result<T> {
    let tri = quadrature::triangulate(p)?;
    Ok(tri.volume())
}

/// Lattice-normalized (n−1)-volume of facet `i`; equals `∂v/∂sᵢ`.
pub fn facet_lattice_volume<T: Scalar>(p: &DelzantPolytope<T>, i: usize) -> Result<T> {
    if i >= p.num_facets() {
        return Err(Error::FacetIndex {
            index: i,
            count: p.num_facets(),
        });
    }
    let n = p.dim;
    if n == 1 {
        return Ok(T::one());
    }
    let u = p.facets[i].normal_as::<T>();
    let uu = linalg::dot(&u, &u);
    let simplices = quadrature::triangulate_face(p, &[i])?;
    // |det[u; e₁ … e_{n−1}]| = |u| · (n−1)! · vol_{n−1}, so vol/|u| = |det| / (|u|² (n−1)!)
    let fact = T::from_usize_lossy((1..n).product::<usize>());
    let mut acc = CompensatedSum::new();
    for s in &simplices {
        let mut rows = vec![u.clone()];
        for q in &s[1..] {
            rows.push(q.iter().zip(&s[0]).map(|(&a, &b)| a - b).collect());
        }
        acc.add(linalg::determinant(&Matrix::from_rows(&rows)).abs());
    }
    Ok(acc.value() / (uu * fact))
}

/// Exact recession-cone test: bounded iff no nonzero `e` has `⟨uᵢ, e⟩ ≥ 0` for all i.
fn is_bounded<T>(dim: usize, facets: &[Facet<T>]) -> bool {
    let normals: Vec<Vec<i64>> = facets.iter().map(|f| f.normal.clone()).collect();
    if lattice::rank(&normals) < dim {
        return false;
    }
    if dim == 1 {
        return normals.iter().any(|u| u[0] > 0) && normals.iter().any(|u| u[0] < 0);
    }
    // A pointed nonzero recession cone has an extreme ray cut out by n−1
    // independent normals.
    let mut bounded = true;
    for_each_combination(normals.len(), dim - 1, |subset| {
        if !bounded {
            return;
        }
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        if lattice::rank(&rows) < dim - 1 {
            return;
        }
        let ray = null_vector(&rows);
        for sign in [1i128, -1] {
            if normals
                .iter()
                .all(|u| sign * u.iter().zip(&ray).map(|(&a, &b)| a as i128 * b).sum::<i128>() >= 0)
            {
                bounded = false;
            }
        }
    });
    bounded
}

/// Integer generator of the kernel of an (n−1)×n integer matrix of full rank
/// (generalized cross product).
fn null_vector(rows: &[Vec<i64>]) -> Vec<i128> {
    let n = rows.len() + 1;
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            lattice::det(&minor) * if j % 2 == 0 { 1 } else { -1 }
        })
        .collect()
}

fn raw_vertices<T: Scalar>(dim: usize, facets: &[Facet<T>]) -> Vec<Vertex<T>> {
    let normals: Vec<Vec<i64>> = facets.iter().map(|f| f.normal.clone()).collect();
    let tol = T::geometric_tolerance();
    let mut out: Vec<Vertex<T>> = Vec::new();
    for_each_combination(facets.len(), dim, |subset| {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        if lattice::det(&rows) == 0 {
            return;
        }
        let a = Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| T::from_int(x)).collect())
                .collect::<Vec<_>>(),
        );
        let b: Vec<T> = subset.iter().map(|&i| facets[i].offset).collect();
        let Some(y) = linalg::solve(&a, &b) else {
            return;
        };
        if facets.iter().any(|f| f.eval(&y) < -f.tight_tolerance()) {
            return;
        }
        let dup = out.iter().any(|v| {
            v.point
                .iter()
                .zip(&y)
                .map(|(&p, &q)| (p - q) * (p - q))
                .sum::<T>()
                .sqrt()
                <= tol
        });
        if dup {
            return;
        }
        let active = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.eval(&y).abs() <= f.tight_tolerance())
            .map(|(i, _)| i)
            .collect();
        out.push(Vertex { point: y, active });
    });
    out
}

/// Affine dimension spanned by a point set.
fn affine_rank<T: Scalar>(pts: &[&Vec<T>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let n = pts[0].len();
    let mut rows: Vec<Vec<T>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0].iter()).map(|(&a, &b)| a - b).collect())
        .collect();
    let scale = rows
        .iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v.abs()))
        .max(T::min_positive_value());
    let tol = T::geometric_tolerance() * scale;
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..rows.len()).max_by(|&i, &j| {
            rows[i][c]
                .abs()
                .partial_cmp(&rows[j][c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            break;
        };
        if rows[piv][c].abs() <= tol {
            continue;
        }
        rows.swap(rank, piv);
        for i in rank + 1..rows.len() {
            let f = rows[i][c] / rows[rank][c];
            for j in c..n {
                let v = rows[rank][j];
                rows[i][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Standard simplex `{y ≥ 0, Σ yᵢ ≤ 1}` in dimension `n`.
pub fn standard_simplex<T: Scalar>(n: usize) -> Result<DelzantPolytope<T>> {
    let mut hs: Vec<(Vec<i64>, T)> = (0..n)
        .map(|i| {
            let mut u = vec![0; n];
            u[i] = 1;
            (u, T::zero())
        })
        .collect();
    hs.push((vec![-1; n], -T::one()));
    DelzantPolytope::from_halfspaces(n, hs)
}

/// Unit cube `[0,1]ⁿ`.
pub fn unit_cube<T: Scalar>(n: usize) -> Result<DelzantPolytope<T>> {
    let mut hs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut u = vec![0; n];
        u[i] = 1;
        hs.push((u, T::zero()));
    }
    for i in 0..n {
        let mut u = vec![0; n];
        u[i] = -1;
        hs.push((u, -T::one()));
    }
    DelzantPolytope::from_halfspaces(n, hs)
}
