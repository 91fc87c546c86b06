//! Invariants of the transforms, tensors and file format.

mod common;

use artkit::art::{art_k, QuadRule, RayQuadSpec};
use artkit::fields::{
    min_epsilon_probe, read_grid, write_grid, AbsorptionSpec, GridField, PhaseField, ScalarProfile,
};
use artkit::geometry::{ray_exit_length, Direction, Grid3, Point3};
use artkit::tensor::{
    component_count, contract_direction, divergence, sym_inner, SymTensor, SymTensorGridField,
};
use common::oracle;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dir(theta: f64, phi: f64) -> Direction {
    Direction::from_angles(theta, phi)
}

fn inner_point() -> impl Strategy<Value = Point3> {
    (-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64).prop_map(|(a, b, c)| Point3::new(a, b, c))
}

fn angles() -> impl Strategy<Value = (f64, f64)> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
}

fn gaussian(amp: Complex64) -> PhaseField {
    PhaseField::gaussian(Point3::new(0.05, -0.1, 0.02), 0.15, amp).unwrap()
}

fn quad() -> RayQuadSpec {
    RayQuadSpec::default().with_step(0.01).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_linear_in_the_source(x in inner_point(), (t, p) in angles(), k in 0usize..4,
                                         re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let a = AbsorptionSpec::constant(c(0.4, 0.7)).unwrap();
        let xi = dir(t, p);
        let s = c(re, im);
        let u1 = art_k(k, &gaussian(c(1.0, 0.0)), &a, &x, &xi, &quad()).unwrap();
        let us = art_k(k, &gaussian(s), &a, &x, &xi, &quad()).unwrap();
        prop_assert!((us - s * u1).norm() <= 1e-12 * (1.0 + us.norm()));
    }

    #[test]
    fn real_data_gives_nonnegative_damped_values(x in inner_point(), (t, p) in angles(), k in 0usize..4,
                                                  e1 in 0.0..2.0f64, de in 0.0..2.0f64) {
        let xi = dir(t, p);
        let f = gaussian(c(1.0, 0.0));
        let lo = art_k(k, &f, &AbsorptionSpec::constant(c(e1, 0.0)).unwrap(), &x, &xi, &quad()).unwrap();
        let hi = art_k(k, &f, &AbsorptionSpec::constant(c(e1 + de, 0.0)).unwrap(), &x, &xi, &quad()).unwrap();
        prop_assert!(lo.re >= 0.0 && lo.im == 0.0);
        prop_assert!(hi.re >= 0.0 && hi.re <= lo.re * (1.0 + 1e-12));
    }

    #[test]
    fn rays_missing_the_support_give_zero(x in inner_point(), (t, p) in angles(), k in 0usize..3) {
        let center = Point3::new(0.3, 0.3, 0.0);
        let r = 0.2;
        let f = PhaseField::ball_bump(center, r, c(1.0, 0.0)).unwrap();
        let xi = dir(t, p);
        let q = quad();
        let len = ray_exit_length(&x, &xi, &q.domain).unwrap();
        // closest approach of the segment x − sξ, 0 ≤ s ≤ len, to the center
        let d = x - center;
        let s = d.dot(&xi.as_point()).clamp(0.0, len);
        let gap = (x.along(&xi, -s) - center).norm();
        let u = art_k(k, &f, &AbsorptionSpec::constant(c(0.3, 0.2)).unwrap(), &x, &xi, &q).unwrap();
        if gap > r {
            prop_assert_eq!(u, c(0.0, 0.0));
        }
    }

    #[test]
    fn contraction_is_the_symmetric_inner_product(rank in 0usize..5, raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 15),
                                                   (t, p) in angles()) {
        let comps: Vec<Complex64> = raw[..component_count(rank)].iter().map(|&(a, b)| c(a, b)).collect();
        let w = SymTensor::from_components(rank, comps).unwrap();
        let xi = dir(t, p);
        let lhs = contract_direction(&w, &xi);
        let rhs = sym_inner(&w, &SymTensor::direction_power(&xi, rank)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn divergence_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, rank in 1usize..4) {
        let g = Grid3::cube(Point3::ORIGIN, 0.5, 6).unwrap();
        let nc = component_count(rank);
        let f1 = SymTensorGridField::from_fn(rank, g, |i| {
            let x = g.node_at(i);
            SymTensor::from_components(rank, (0..nc).map(|j| c((x.0[0] * (j + 1) as f64).sin(), x.0[1] * x.0[2])).collect()).unwrap()
        });
        let f2 = SymTensorGridField::from_fn(rank, g, |i| {
            let x = g.node_at(i);
            SymTensor::from_components(rank, (0..nc).map(|j| c(x.norm_sq() * j as f64, (x.0[2] - x.0[0]).cos())).collect()).unwrap()
        });
        let mixed = f1.scale(c(a, 0.0)).axpy(c(b, 0.0), &f2).unwrap();
        let lhs = divergence(&mixed).unwrap();
        let rhs = divergence(&f1).unwrap().scale(c(a, 0.0)).axpy(c(b, 0.0), &divergence(&f2).unwrap()).unwrap();
        for (u, v) in lhs.data.iter().zip(&rhs.data) {
            prop_assert!((u - v).norm() <= 1e-10 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn artk_round_trip(rank in 0usize..5, nx in 2usize..5, ny in 2usize..5, nz in 2usize..5,
                       nt in 0usize..3, dt in 0.01..1.0f64, seed in any::<u32>()) {
        let g = Grid3::new([nx, ny, nz], Point3::new(-0.3, -0.2, -0.1), Point3::new(0.4, 0.5, 0.6)).unwrap();
        let len = nt.max(1) * g.len() * component_count(rank);
        let data: Vec<Complex64> = (0..len).map(|i| c((i as f64 + seed as f64).sin(), (i as f64 * 0.37).cos())).collect();
        let gf = GridField::new(rank, g, nt, dt, data).unwrap();
        let mut buf = Vec::new();
        write_grid(&gf, &mut buf).unwrap();
        let back = read_grid(buf.as_slice()).unwrap();
        prop_assert_eq!(back, gf);
    }

    #[test]
    fn epsilon_probe_finds_the_floor(re in 0.0..3.0f64, im in -3.0..3.0f64, bump in 0.0..1.0f64, seed in any::<u64>()) {
        let a = AbsorptionSpec::constant(c(re, im)).unwrap();
        prop_assert_eq!(min_epsilon_probe(&a, 64, seed), re);
        let s = AbsorptionSpec::spatial(c(re, im), c(bump, 0.0), ScalarProfile::Gaussian { center: Point3::ORIGIN, width: 0.3 }).unwrap();
        prop_assert!(min_epsilon_probe(&s, 64, seed) >= re);
    }
}

/// Composite Simpson converges at fourth order against an adaptive oracle.
#[test]
fn simpson_converges_at_fourth_order() {
    let f = PhaseField::gaussian(Point3::new(0.1, 0.0, 0.0), 0.3, c(1.0, 0.0)).unwrap();
    let alpha = c(0.6, 0.4);
    let a = AbsorptionSpec::constant(alpha).unwrap();
    let x = Point3::new(0.2, -0.1, 0.3);
    let xi = Direction::new(0.3, -0.5, 0.8).unwrap();
    let xs = x.0;
    let e = xi.components();
    let upper = oracle::exit_length(xs, e, [0.0; 3], 1.0);
    for k in 0..3u32 {
        let exact = oracle::ray_transform(
            k,
            &|_| alpha,
            &|s| {
                let y = [xs[0] - s * e[0] - 0.1, xs[1] - s * e[1], xs[2] - s * e[2]];
                c(
                    (-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / (2.0 * 0.09)).exp(),
                    0.0,
                )
            },
            upper,
            1e-13,
        );
        let err = |h: f64| {
            let q = RayQuadSpec::default()
                .with_step(h)
                .unwrap()
                .with_rule(QuadRule::Simpson);
            (art_k(k as usize, &f, &a, &x, &xi, &q).unwrap() - exact).norm()
        };
        let (e1, e2) = (err(0.08), err(0.04));
        let order = (e1 / e2).log2();
        assert!(
            (3.6..=4.4).contains(&order),
            "k={k} order {order} ({e1:e}, {e2:e})"
        );
    }
}
