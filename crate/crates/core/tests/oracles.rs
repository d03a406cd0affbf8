//! Analytic quantities checked against independent numerical oracles.

mod common;

use abreu::quadrature::{estimate, triangulate, SimplexRule};
use abreu::{facet_lattice_volume, integrate, polytope, scalar_curvature, volume, Polytope64};
use common::*;

#[test]
fn jets_match_finite_differences() {
    let mut rng = rng(11);
    for (name, pot) in shipped_potentials() {
        for _ in 0..20 {
            let y = random_interior(pot.polytope(), &mut rng, 0.02);
            let dev = jet_fd_deviation(&pot, &y);
            assert!(dev <= 1e-6, "{name} at {y:?}: {dev:e}");
        }
    }
}

#[test]
fn inverse_hessian_tensors_match_finite_differences() {
    let mut rng = rng(12);
    for (name, pot) in shipped_potentials() {
        for _ in 0..20 {
            let y = random_interior(pot.polytope(), &mut rng, 0.02);
            let dev = inverse_jet_fd_deviation(&pot, &y);
            assert!(dev <= 1e-6, "{name} at {y:?}: {dev:e}");
        }
    }
}

#[test]
fn curvature_matches_second_differences_of_inverse_hessian() {
    let mut rng = rng(13);
    for (name, pot) in shipped_potentials() {
        for _ in 0..20 {
            let y = random_interior(pot.polytope(), &mut rng, 0.02);
            let r = scalar_curvature(&pot, &y).unwrap();
            let fd = curvature_fd(&pot, &y, 1e-4);
            assert!((r - fd).abs() <= 1e-5 * r.abs().max(1.0), "{name} at {y:?}: {r} vs {fd}");
        }
    }
}

#[test]
fn facet_lattice_volume_is_offset_derivative_of_volume() {
    let mut polys: Vec<(String, Polytope64)> = vec![
        ("simplex".into(), simplex()),
        ("square".into(), square()),
        ("hirzebruch".into(), hirzebruch()),
        ("weighted".into(), weighted_triangle()),
        ("simplex3".into(), polytope::standard_simplex(3).unwrap()),
        ("cube3".into(), polytope::unit_cube(3).unwrap()),
        ("interval".into(), interval()),
    ];
    for a in [0.2, 0.5, 0.8] {
        polys.push((format!("trapezoid {a}"), trapezoid(a)));
    }
    for (name, p) in polys {
        for i in 0..p.num_facets() {
            let exact = facet_lattice_volume(&p, i).unwrap();
            let fd = volume_offset_fd(&p, i, 1e-5);
            assert!((exact - fd).abs() <= 1e-7 * exact.abs(), "{name} facet {i}: {exact} vs {fd}");
        }
    }
}

#[test]
fn trapezoid_facet_volumes_by_finite_difference() {
    let p = trapezoid(0.5);
    let fd: Vec<f64> = (0..4).map(|i| volume_offset_fd(&p, i, 1e-5)).collect();
    for (g, e) in fd.iter().zip([0.5, 0.5, 1.0, 0.5]) {
        assert!((g - e).abs() < 1e-9);
    }
    let s = simplex();
    for i in 0..3 {
        assert!((volume_offset_fd(&s, i, 1e-5) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn trapezoid_area_closed_form() {
    for a in [0.1, 0.2, 0.5, 0.8, 0.95] {
        let v = volume(&trapezoid(a)).unwrap();
        assert!((v - (1.0 - a * a) / 2.0).abs() < 1e-15);
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// ∫ over the standard n-simplex of y^α = α! / (n + |α|)!.
fn simplex_moment(exps: &[u32]) -> f64 {
    let n = exps.len() as u32;
    exps.iter().map(|&e| factorial(e)).product::<f64>() / factorial(n + exps.iter().sum::<u32>())
}

fn cube_moment(exps: &[u32]) -> f64 {
    exps.iter().map(|&e| 1.0 / f64::from(e + 1)).product()
}

/// Trapezoid = simplex minus the simplex scaled by a.
fn trapezoid_moment(a: f64, exps: &[u32]) -> f64 {
    let deg: u32 = exps.iter().sum();
    simplex_moment(exps) * (1.0 - a.powi((2 + deg) as i32))
}

fn exponent_tuples(dim: usize, max_total: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return vec![vec![]];
    }
    (0..=max_total)
        .flat_map(|first| {
            exponent_tuples(dim - 1, max_total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn monomial(exps: &[u32]) -> impl Fn(&[f64]) -> f64 + '_ {
    move |y: &[f64]| y.iter().zip(exps).map(|(&v, &e)| v.powi(e as i32)).product()
}

#[test]
fn quadrature_exact_on_monomials_up_to_rule_degree() {
    type Moment = Box<dyn Fn(&[u32]) -> f64>;
    let cases: Vec<(Polytope64, Moment)> = vec![
        (simplex(), Box::new(simplex_moment)),
        (square(), Box::new(cube_moment)),
        (trapezoid(0.5), Box::new(|e: &[u32]| trapezoid_moment(0.5, e))),
        (trapezoid(0.2), Box::new(|e: &[u32]| trapezoid_moment(0.2, e))),
        (polytope::standard_simplex(3).unwrap(), Box::new(simplex_moment)),
        (polytope::unit_cube(3).unwrap(), Box::new(cube_moment)),
        (interval(), Box::new(cube_moment)),
    ];
    for (p, moment) in cases {
        let degree = SimplexRule::<f64>::default_for(p.dim()).unwrap().degree as u32;
        for exps in exponent_tuples(p.dim(), degree) {
            let got = integrate(&p, monomial(&exps), 1e-10).unwrap();
            let want = moment(&exps);
            assert!((got - want).abs() <= 1e-10 * want, "{exps:?}: {got} vs {want}");
        }
    }
}

#[test]
fn quadrature_is_additive_over_refinement() {
    let f = |y: &[f64]| -> abreu::Result<f64> { Ok((y[0] - 0.3 * y[1]).exp() * (2.0 * y[1]).cos()) };
    for p in [simplex(), hirzebruch(), trapezoid(0.5)] {
        let tri = triangulate(&p).unwrap();
        let rule = SimplexRule::default_for(2).unwrap();
        let whole = estimate(&tri, &rule, &f, 3).unwrap();
        let refined = tri.refine().unwrap();
        let pieces: f64 = refined
            .simplices()
            .iter()
            .map(|s| rule.apply(s, &f).unwrap())
            .sum::<f64>();
        let coarse = estimate(&refined, &rule, &f, 2).unwrap();
        assert!((whole - coarse).abs() < 1e-10);
        // one level of refinement already agrees with the converged value
        assert!((pieces - whole).abs() < 1e-10, "{pieces} vs {whole}");
    }
}
