//! Integration over convex polytopes: fan triangulation, a collapsed
//! Gauss–Legendre simplex rule, and uniform refinement with a Cauchy stop.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::DelzantPolytope;
use crate::scalar::{CompensatedSum, Scalar};

/// Number of Gauss–Legendre points per collapsed axis.
pub const DEFAULT_RULE_POINTS: usize = 6;
pub const DEFAULT_MAX_LEVELS: u32 = 8;

pub type Simplex<T> = Vec<Vec<T>>;

/// Simplices covering a polytope with disjoint interiors.
#[derive(Clone, Debug)]
pub struct Triangulation<T> {
    dim: usize,
    simplices: Vec<Simplex<T>>,
}

impl<T: Scalar> Triangulation<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplices(&self) -> &[Simplex<T>] {
        &self.simplices
    }

    pub fn volume(&self) -> T {
        let mut acc = CompensatedSum::new();
        for s in &self.simplices {
            acc.add(simplex_volume(s));
        }
        acc.value()
    }

    /// One level of uniform refinement of every simplex.
    pub fn refine(&self) -> Result<Self> {
        let mut simplices = Vec::with_capacity(self.simplices.len() << self.dim);
        for s in &self.simplices {
            simplices.extend(subdivide(s)?);
        }
        Ok(Self {
            dim: self.dim,
            simplices,
        })
    }
}

/// Unsigned Euclidean volume of an n-simplex given by n+1 points in ℝⁿ.
pub fn simplex_volume<T: Scalar>(s: &[Vec<T>]) -> T {
    let n = s.len() - 1;
    let rows: Vec<Vec<T>> = s[1..]
        .iter()
        .map(|q| q.iter().zip(&s[0]).map(|(&a, &b)| a - b).collect())
        .collect();
    let fact = T::from_usize_lossy((1..=n).product::<usize>());
    linalg::determinant(&Matrix::from_rows(&rows)).abs() / fact
}

/// Fan triangulation: every face is coned from its vertex centroid over the
/// triangulations of its own facets; edges are kept whole.
pub fn triangulate<T: Scalar>(p: &DelzantPolytope<T>) -> Result<Triangulation<T>> {
    Ok(Triangulation {
        dim: p.dim(),
        simplices: triangulate_face(p, &[])?,
    })
}

/// Triangulation of the face cut out by the facets in `face`, as simplices
/// with `dim − face.len() + 1` points each.
pub fn triangulate_face<T: Scalar>(p: &DelzantPolytope<T>, face: &[usize]) -> Result<Vec<Simplex<T>>> {
    if !p.is_simple() {
        crate::polytope::enumerate_vertices(p)?;
    }
    let k = p.dim() - face.len();
    let mut out = Vec::new();
    cone_face(p, face, k, &mut out);
    Ok(out)
}

fn cone_face<T: Scalar>(p: &DelzantPolytope<T>, face: &[usize], k: usize, out: &mut Vec<Simplex<T>>) {
    let verts = p.vertices_on(face);
    match k {
        0 => out.extend(verts.iter().map(|&v| vec![p.vertices()[v].point.clone()])),
        1 => {
            if let [a, b] = verts[..] {
                out.push(vec![p.vertices()[a].point.clone(), p.vertices()[b].point.clone()]);
            }
        }
        _ => {
            let count = T::from_usize_lossy(verts.len());
            let centroid: Vec<T> = (0..p.dim())
                .map(|i| verts.iter().map(|&v| p.vertices()[v].point[i]).sum::<T>() / count)
                .collect();
            for j in 0..p.num_facets() {
                if face.contains(&j) {
                    continue;
                }
                let mut sub: Vec<usize> = face.to_vec();
                sub.push(j);
                sub.sort_unstable();
                if p.vertices_on(&sub).is_empty() {
                    continue;
                }
                let mut faces = Vec::new();
                cone_face(p, &sub, k - 1, &mut faces);
                for mut s in faces {
                    s.insert(0, centroid.clone());
                    out.push(s);
                }
            }
        }
    }
}

/// Splits a simplex into 2ⁿ congruent-volume children (n ≤ 3).
pub fn subdivide<T: Scalar>(s: &[Vec<T>]) -> Result<Vec<Simplex<T>>> {
    let half = T::lit(0.5);
    let mid = |a: &Vec<T>, b: &Vec<T>| -> Vec<T> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) * half).collect()
    };
    match s.len() - 1 {
        1 => {
            let m = mid(&s[0], &s[1]);
            Ok(vec![vec![s[0].clone(), m.clone()], vec![m, s[1].clone()]])
        }
        2 => {
            let (a, b, c) = (&s[0], &s[1], &s[2]);
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            Ok(vec![
                vec![a.clone(), ab.clone(), ca.clone()],
                vec![ab.clone(), b.clone(), bc.clone()],
                vec![ca.clone(), bc.clone(), c.clone()],
                vec![ab, bc, ca],
            ])
        }
        3 => {
            // Bey's red refinement
            let x = s;
            let m = |i: usize, j: usize| mid(&x[i], &x[j]);
            let (x01, x02, x03, x12, x13, x23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
            Ok(vec![
                vec![x[0].clone(), x01.clone(), x02.clone(), x03.clone()],
                vec![x01.clone(), x[1].clone(), x12.clone(), x13.clone()],
                vec![x02.clone(), x12.clone(), x[2].clone(), x23.clone()],
                vec![x03.clone(), x13.clone(), x23.clone(), x[3].clone()],
                vec![x01.clone(), x02.clone(), x03.clone(), x13.clone()],
                vec![x01.clone(), x02.clone(), x12.clone(), x13.clone()],
                vec![x02.clone(), x03.clone(), x13.clone(), x23.clone()],
                vec![x02, x12, x13, x23],
            ])
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Quadrature rule on the reference simplex in barycentric coordinates.
#[derive(Clone, Debug)]
pub struct SimplexRule<T> {
    pub dim: usize,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
    /// Barycentric coordinates (n+1 entries, all strictly positive).
    pub nodes: Vec<Vec<T>>,
    /// Normalized so that they sum to 1.
    pub weights: Vec<T>,
}

impl<T: Scalar> SimplexRule<T> {
    /// Conical-product rule from `m` Gauss–Legendre points per collapsed axis.
    ///
    /// The Duffy map introduces Jacobian factors of degree n−1 in the first
    /// axis, which costs n−1 degrees of exactness.
    pub fn collapsed_gauss(dim: usize, m: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let (gx, gw) = gauss_legendre_unit::<T>(m);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let one = T::one();
        match dim {
            1 => {
                for (&x, &w) in gx.iter().zip(&gw) {
                    nodes.push(vec![one - x, x]);
                    weights.push(w);
                }
            }
            2 => {
                for (&u, &wu) in gx.iter().zip(&gw) {
                    for (&v, &wv) in gx.iter().zip(&gw) {
                        let x = u;
                        let y = v * (one - u);
                        nodes.push(vec![one - x - y, x, y]);
                        weights.push(wu * wv * (one - u) * T::lit(2.0));
                    }
                }
            }
            _ => {
                for (&u, &wu) in gx.iter().zip(&gw) {
                    for (&v, &wv) in gx.iter().zip(&gw) {
                        for (&w, &ww) in gx.iter().zip(&gw) {
                            let x = u;
                            let y = v * (one - u);
                            let z = w * (one - u) * (one - v);
                            nodes.push(vec![one - x - y - z, x, y, z]);
                            weights.push(wu * wv * ww * (one - u) * (one - u) * (one - v) * T::lit(6.0));
                        }
                    }
                }
            }
        }
        Ok(Self {
            dim,
            degree: 2 * m - dim,
            nodes,
            weights,
        })
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        Self::collapsed_gauss(dim, DEFAULT_RULE_POINTS)
    }

    /// Applies the rule to one simplex; `f` sees only interior points.
    pub fn apply<F>(&self, s: &[Vec<T>], f: &F) -> Result<T>
    where
        F: Fn(&[T]) -> Result<T>,
    {
        let vol = simplex_volume(s);
        let n = self.dim;
        let mut acc = CompensatedSum::new();
        let mut y = vec![T::zero(); n];
        for (bary, &w) in self.nodes.iter().zip(&self.weights) {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = bary.iter().zip(s).map(|(&b, q)| b * q[i]).sum();
            }
            acc.add(w * f(&y)?);
        }
        Ok(acc.value() * vol)
    }
}

/// Gauss–Legendre nodes and weights on [0, 1] (Newton on Pₘ).
pub fn gauss_legendre_unit<T: Scalar>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut xs = Vec::with_capacity(m);
    let mut ws = Vec::with_capacity(m);
    let half = T::lit(0.5);
    for i in 0..m {
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (T::from_usize_lossy(m) + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != T::zero() { d } else { dp };
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        // map [-1, 1] → [0, 1], ascending order
        xs.push((T::one() - x) * half);
        ws.push(w * half);
    }
    (xs, ws)
}

fn legendre_with_derivative<T: Scalar>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if m == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=m {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = T::from_usize_lossy(m);
    let d = mf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions<T> {
    /// Absolute Cauchy tolerance between successive refinement levels.
    pub tol: T,
    pub max_levels: u32,
}

impl<T: Scalar> QuadratureOptions<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            max_levels: DEFAULT_MAX_LEVELS,
        }
    }
}

/// `∫_Δ f dy` by uniform refinement until successive estimates agree to `tol`.
pub fn integrate<T, F>(p: &DelzantPolytope<T>, f: F, tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    try_integrate(p, |y| Ok(f(y)), &QuadratureOptions::new(tol))
}

/// Fallible-integrand version of [`integrate`] with explicit options.
pub fn try_integrate<T, F>(p: &DelzantPolytope<T>, f: F, opts: &QuadratureOptions<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<T>,
{
    if !(opts.tol > T::zero()) {
        return Err(Error::ParameterRange(format!("quadrature tolerance {} must be positive", opts.tol)));
    }
    let rule = SimplexRule::default_for(p.dim())?;
    let tri = triangulate(p)?;
    let mut prev = estimate(&tri, &rule, &f, 0)?;
    let mut change = T::infinity();
    for level in 1..=opts.max_levels {
        let cur = estimate(&tri, &rule, &f, level)?;
        change = (cur - prev).abs();
        if change < opts.tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence {
        levels: opts.max_levels,
        last_change: change.to_f64_lossy(),
    })
}

/// Rule applied on the `level`-times uniformly refined triangulation.
/// Leaves are visited depth-first in simplex order, so the sum is deterministic.
pub fn estimate<T, F>(tri: &Triangulation<T>, rule: &SimplexRule<T>, f: &F, level: u32) -> Result<T>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<T>,
{
    let mut acc = CompensatedSum::new();
    for s in tri.simplices() {
        accumulate(s, rule, f, level, &mut acc)?;
    }
    Ok(acc.value())
}

fn accumulate<T, F>(s: &[Vec<T>], rule: &SimplexRule<T>, f: &F, level: u32, acc: &mut CompensatedSum<T>) -> Result<()>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<T>,
{
    if level == 0 {
        acc.add(rule.apply(s, f)?);
        return Ok(());
    }
    for child in subdivide(s)? {
        accumulate(&child, rule, f, level - 1, acc)?;
    }
    Ok(())
}
