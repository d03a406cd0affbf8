#![allow(dead_code)]

use abreu::{
    calabi_potential, jets, polytope, DelzantPolytope, Perturbation, Polytope64, Potential64,
    SymplecticPotential,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn interval() -> Polytope64 {
    polytope::unit_cube(1).unwrap()
}

pub fn simplex() -> Polytope64 {
    polytope::standard_simplex(2).unwrap()
}

pub fn square() -> Polytope64 {
    polytope::unit_cube(2).unwrap()
}

pub fn trapezoid(a: f64) -> Polytope64 {
    abreu::calabi_polytope(a).unwrap()
}

/// Hirzebruch-type quadrilateral y₁, y₂ ≥ 0, y₂ ≤ 1, y₁ + 2y₂ ≤ 3.
pub fn hirzebruch() -> Polytope64 {
    DelzantPolytope::from_halfspaces(
        2,
        vec![
            (vec![1, 0], 0.0),
            (vec![0, 1], 0.0),
            (vec![0, -1], -1.0),
            (vec![-1, -2], -3.0),
        ],
    )
    .unwrap()
}

pub fn weighted_triangle() -> Polytope64 {
    DelzantPolytope::from_halfspaces(
        2,
        vec![(vec![1, 0], 0.0), (vec![0, 1], 0.0), (vec![-1, -2], -1.0)],
    )
    .unwrap()
}

pub fn canonical(p: Polytope64) -> Potential64 {
    SymplecticPotential::canonical(p)
}

pub fn perturbed_simplex() -> Potential64 {
    SymplecticPotential::new(
        simplex(),
        Perturbation::polynomial([
            (vec![2, 0], 0.1),
            (vec![1, 1], 0.1),
            (vec![0, 2], 0.1),
            (vec![3, 0], 0.05),
        ]),
    )
    .unwrap()
}

/// Every shipped potential, labelled.
pub fn shipped_potentials() -> Vec<(String, Potential64)> {
    let mut v = vec![
        ("interval".to_string(), canonical(interval())),
        ("simplex".to_string(), canonical(simplex())),
        ("square".to_string(), canonical(square())),
        ("hirzebruch".to_string(), canonical(hirzebruch())),
        ("simplex+poly".to_string(), perturbed_simplex()),
        ("simplex3".to_string(), canonical(polytope::standard_simplex(3).unwrap())),
        ("cube3".to_string(), canonical(polytope::unit_cube(3).unwrap())),
    ];
    for a in [0.2, 0.5, 0.8] {
        v.push((format!("trapezoid a={a}"), canonical(trapezoid(a))));
        v.push((format!("calabi a={a}"), calabi_potential(a).unwrap()));
    }
    v
}

/// Uniform rejection sample with every `lᵢ ≥ margin · (1 + |λᵢ|)`.
pub fn random_interior(p: &Polytope64, rng: &mut ChaCha8Rng, margin: f64) -> Vec<f64> {
    let (lo, hi) = p.bounding_box();
    loop {
        let y: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| rng.gen_range(a..b)).collect();
        if p.contains_interior(&y, margin) {
            return y;
        }
    }
}

/// Central difference of a vector-valued map along coordinate `axis`.
pub fn central_diff<F>(f: F, y: &[f64], axis: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut plus = y.to_vec();
    let mut minus = y.to_vec();
    plus[axis] += h;
    minus[axis] -= h;
    f(&plus)
        .iter()
        .zip(f(&minus))
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Flattened jets of a given order (order 1 → gradient, 2 → Hessian rows, …).
pub fn jet_order(pot: &Potential64, y: &[f64], order: usize) -> Vec<f64> {
    let j = jets(pot, y).unwrap();
    let n = y.len();
    match order {
        1 => j.order1,
        2 => j.order2.rows().concat(),
        3 => j.order3.indices().map(|i| j.order3.get(&i)).collect(),
        4 => j.order4.indices().map(|i| j.order4.get(&i)).collect(),
        _ => panic!("order {order} for n = {n}"),
    }
}

/// Max relative deviation, normalized by the largest entry of `analytic`.
pub fn rel_dev(analytic: &[f64], oracle: &[f64]) -> f64 {
    let scale = analytic.iter().fold(0f64, |m, v| m.max(v.abs())).max(1e-300);
    analytic
        .iter()
        .zip(oracle)
        .fold(0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

/// Euclidean distance from `y` to the boundary, capped at 1.
pub fn boundary_distance(p: &Polytope64, y: &[f64]) -> f64 {
    p.facets()
        .iter()
        .map(|f| {
            let u: Vec<f64> = f.normal_as();
            f.eval(y) / u.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .fold(1.0, f64::min)
}

/// Max over jet orders 2–4 of the deviation from finite differences of the
/// next lower order; adaptive step `1e-5 · (distance to boundary)`.
pub fn jet_fd_deviation(pot: &Potential64, y: &[f64]) -> f64 {
    let n = y.len();
    let h = 1e-5 * boundary_distance(pot.polytope(), y);
    let mut worst = 0f64;
    for order in 2..=4 {
        let analytic = jet_order(pot, y, order);
        // analytic[(idx, axis)] with axis last in storage order
        let mut oracle = vec![0.0; analytic.len()];
        for axis in 0..n {
            let d = central_diff(|z| jet_order(pot, z, order - 1), y, axis, h);
            for (k, v) in d.iter().enumerate() {
                oracle[k * n + axis] = *v;
            }
        }
        worst = worst.max(rel_dev(&analytic, &oracle));
    }
    worst
}

/// Numerically inverted Hessian, flattened.
pub fn inverse_hessian_numeric(pot: &Potential64, y: &[f64]) -> Vec<f64> {
    abreu::hessian(pot, y)
        .unwrap()
        .cholesky_inverse()
        .unwrap()
        .rows()
        .concat()
}

/// Max deviation of the analytic `∂G^{ij}` and `∂²G^{ij}` tensors from
/// central differences of the numerically inverted Hessian.
pub fn inverse_jet_fd_deviation(pot: &Potential64, y: &[f64]) -> f64 {
    let n = y.len();
    let h = 1e-5 * boundary_distance(pot.polytope(), y);
    let ih = abreu::inverse_hessian_jets(&jets(pot, y).unwrap()).unwrap();
    let d_analytic: Vec<f64> = ih.d_inv.indices().map(|i| ih.d_inv.get(&i)).collect();
    let mut d_oracle = vec![0.0; d_analytic.len()];
    for a in 0..n {
        let d = central_diff(|z| inverse_hessian_numeric(pot, z), y, a, h);
        for (k, v) in d.iter().enumerate() {
            d_oracle[k * n + a] = *v;
        }
    }
    let dd_analytic: Vec<f64> = ih.dd_inv.indices().map(|i| ih.dd_inv.get(&i)).collect();
    let mut dd_oracle = vec![0.0; dd_analytic.len()];
    let d_inv_at = |z: &[f64]| -> Vec<f64> {
        let t = abreu::inverse_hessian_jets(&jets(pot, z).unwrap()).unwrap().d_inv;
        t.indices().map(|i| t.get(&i)).collect()
    };
    for b in 0..n {
        let d = central_diff(d_inv_at, y, b, h);
        for (k, v) in d.iter().enumerate() {
            dd_oracle[k * n + b] = *v;
        }
    }
    rel_dev(&d_analytic, &d_oracle).max(rel_dev(&dd_analytic, &dd_oracle))
}

/// `−½ Σ ∂ᵢ∂ⱼ G^{ij}` by second central differences (step `h`) of the
/// numerically inverted Hessian.
pub fn curvature_fd(pot: &Potential64, y: &[f64], h: f64) -> f64 {
    let n = y.len();
    let inv = |z: &[f64]| inverse_hessian_numeric(pot, z);
    let shifted = |di: f64, i: usize, dj: f64, j: usize| {
        let mut z = y.to_vec();
        z[i] += di;
        z[j] += dj;
        z
    };
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = i * n + j;
            if i == j {
                let p = inv(&shifted(h, i, 0.0, i))[e];
                let c = inv(y)[e];
                let m = inv(&shifted(-h, i, 0.0, i))[e];
                s += (p - 2.0 * c + m) / (h * h);
            } else {
                let pp = inv(&shifted(h, i, h, j))[e];
                let pm = inv(&shifted(h, i, -h, j))[e];
                let mp = inv(&shifted(-h, i, h, j))[e];
                let mm = inv(&shifted(-h, i, -h, j))[e];
                s += (pp - pm - mp + mm) / (4.0 * h * h);
            }
        }
    }
    -0.5 * s
}

/// Central difference of the volume in each outward offset `sᵢ = −λᵢ`.
pub fn volume_offset_fd(p: &Polytope64, i: usize, h: f64) -> f64 {
    let shifted = |delta: f64| {
        let hs = p
            .facets()
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let off = if k == i { f.offset() - delta } else { f.offset() };
                (f.normal().to_vec(), off)
            })
            .collect();
        abreu::volume(&DelzantPolytope::from_halfspaces(p.dim(), hs).unwrap()).unwrap()
    };
    (shifted(h) - shifted(-h)) / (2.0 * h)
}
