mod common;

use std::f64::consts::{PI, TAU};

use cyltile::geometry::rotation_z;
use cyltile::quadrature::{integrate_1d, try_integrate_1d, QuadratureSpec};
use cyltile::{canonicalize, tensor_at, EvalPoint, Tile};
use nalgebra::Vector3;
use proptest::prelude::*;

use common::*;

fn arb_tile() -> impl Strategy<Value = Tile> {
    (
        prop_oneof![Just(0.0), 0.1..1.5f64],
        0.2..1.5f64,
        -PI..PI,
        0.2..TAU,
        -1.0..1.0f64,
        0.2..1.5f64,
        prop::array::uniform3(-1.0..1.0f64),
        prop::array::uniform3(-1.0e6..1.0e6f64),
    )
        .prop_map(|(r1, dr, t1, dt, z1, dz, off, m)| {
            Tile::new((r1, r1 + dr), (t1, t1 + dt), (z1, z1 + dz))
                .unwrap()
                .with_offset(Vector3::from(off))
                .unwrap()
                .with_magnetization(Vector3::from(m))
                .unwrap()
        })
}

fn arb_point() -> impl Strategy<Value = EvalPoint> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(Vector3::from)
}

fn rotated(tile: &Tile, alpha: f64) -> Tile {
    let mut t = *tile;
    t.theta1 += alpha;
    t.theta2 += alpha;
    t.offset = rotation_z(alpha) * tile.offset;
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rotation_about_axis_conjugates_tensor(tile in arb_tile(), p in arb_point(), alpha in -PI..PI) {
        prop_assume!(clearance(&tile, &p) > 1e-3);
        let rot = rotation_z(alpha);
        let n = tensor_at(&tile, &p).unwrap().n;
        let nr = tensor_at(&rotated(&tile, alpha), &(rot * p)).unwrap().n;
        let want = rot * n * rot.transpose();
        prop_assert!((nr - want).amax() <= 1e-10 * n.amax());
    }

    #[test]
    fn translation_invariance(tile in arb_tile(), p in arb_point(), shift in prop::array::uniform3(-2.0..2.0f64)) {
        prop_assume!(clearance(&tile, &p) > 1e-3);
        let s = Vector3::from(shift);
        let mut moved = tile;
        moved.offset += s;
        let n = tensor_at(&tile, &p).unwrap().n;
        let nm = tensor_at(&moved, &(p + s)).unwrap().n;
        prop_assert!((n - nm).amax() <= 1e-9 * n.amax());
    }

    #[test]
    fn trace_is_zero_or_eight_pi(tile in arb_tile(), p in arb_point()) {
        prop_assume!(clearance(&tile, &p) > 1e-3);
        let n = tensor_at(&tile, &p).unwrap().n;
        let want = if tile.containment(&p, 0.0) == cyltile::Containment::Inside { 8.0 * PI } else { 0.0 };
        prop_assert!((n.trace() - want).abs() <= 1e-8 * n.amax().max(8.0 * PI));
    }

    #[test]
    fn evaluation_never_produces_nan(tile in arb_tile(), rs in 0usize..3, ts in 0usize..4, zs in 0usize..3, jitter in -1.0..1.0f64) {
        // Points placed exactly on radii, angular limits and end planes of the tile.
        let r = [tile.r1, tile.r2, 0.5 * (tile.r1 + tile.r2)][rs];
        let t = [tile.theta1, tile.theta2, tile.theta1 + PI, 0.5 * (tile.theta1 + tile.theta2)][ts];
        let z = [tile.z1, tile.z2, tile.z1 + 0.5 * (1.0 + jitter) * (tile.z2 - tile.z1)][zs];
        let p = tile.offset + Vector3::new(r * t.cos(), r * t.sin(), z);
        let ev = tensor_at(&tile, &p).unwrap();
        prop_assert!(ev.n.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn canonicalize_round_trip(tile in arb_tile(), p in arb_point()) {
        let (cp, args) = canonicalize(&p, &tile);
        prop_assert!(cp.x_c >= 0.0 && cp.psi > -PI && cp.psi <= PI);
        let back = tile.offset + rotation_z(cp.psi) * Vector3::new(cp.x_c, 0.0, 0.0) + Vector3::z() * cp.z_shift;
        prop_assert!((back - p).norm() <= 1e-14 * (1.0 + p.norm() + tile.offset.norm()));
        prop_assert!((args.th_hi - args.th_lo - (tile.theta2 - tile.theta1)).abs() < 1e-14);
        prop_assert!((args.z_lo - (tile.z1 - cp.z_shift)).abs() < 1e-14);
    }

    #[test]
    fn quadrature_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, lo in -2.0..0.0f64, hi in 0.1..2.0f64) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (3.0 * x).sin() + x * x;
        let g = |x: f64| (-x * x).exp();
        let lhs = integrate_1d(|x| a * f(x) + b * g(x), lo, hi, &spec).unwrap().value;
        let rhs = a * integrate_1d(f, lo, hi, &spec).unwrap().value + b * integrate_1d(g, lo, hi, &spec).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn quadrature_is_additive(lo in -2.0..0.0f64, mid in 0.0..1.0f64, hi in 1.0..3.0f64) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| 1.0 / (1.0 + x * x) + (5.0 * x).cos();
        let whole = integrate_1d(f, lo, hi, &spec).unwrap().value;
        let parts = integrate_1d(f, lo, mid, &spec).unwrap().value + integrate_1d(f, mid, hi, &spec).unwrap().value;
        prop_assert!((whole - parts).abs() <= 1e-11 * (1.0 + whole.abs()));
    }

    #[test]
    fn reversed_limits_negate(lo in -2.0..0.0f64, hi in 0.1..2.0f64) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x * x + 0.3).sqrt();
        let fwd = integrate_1d(f, lo, hi, &spec).unwrap().value;
        let rev = integrate_1d(f, hi, lo, &spec).unwrap().value;
        prop_assert!((fwd + rev).abs() <= 1e-14 * fwd.abs().max(1.0));
    }
}

type Battery = [(fn(f64) -> f64, f64, f64, f64); 20];

/// Integrands on `[a, b]` with their exact integrals.
fn battery() -> Battery {
    [
        (|x| x.powi(5), 0.0, 1.0, 1.0 / 6.0),
        (|x| x.exp(), -1.0, 2.0, 2f64.exp() - (-1f64).exp()),
        (|x| x.sin(), 0.0, PI, 2.0),
        (|x| x.sqrt(), 0.0, 1.0, 2.0 / 3.0),
        (|x| x.ln(), 0.0, 1.0, -1.0),
        (|x| 1.0 / x.sqrt(), 0.0, 1.0, 2.0),
        (|x| 1.0 / (1.0 + x * x), -5.0, 5.0, 2.0 * 5f64.atan()),
        (|x| 1.0 / (1.0e-4 + x * x), -1.0, 1.0, 2.0 * 100.0 * 100f64.atan()),
        (|x| (50.0 * x).cos(), 0.0, 1.0, 50f64.sin() / 50.0),
        (|x| (-x * x).exp(), -6.0, 6.0, 1.772_453_850_905_516),
        (|x| x.abs(), -1.0, 2.0, 2.5),
        (|x| (x - 0.3).abs().sqrt(), 0.0, 1.0, 2.0 / 3.0 * (0.3f64.powf(1.5) + 0.7f64.powf(1.5))),
        (|x| x * x.ln(), 0.0, 1.0, -0.25),
        (|x| 1.0 / (1.0 + x), 0.0, 1.0, 2f64.ln()),
        (|x| x.cos().powi(2), 0.0, TAU, PI),
        (|x| x.powf(-0.25), 0.0, 1.0, 4.0 / 3.0),
        (|x| (1.0 - x * x).sqrt(), -1.0, 1.0, PI / 2.0),
        (|x| x.atan(), 0.0, 1.0, PI / 4.0 - 0.5 * 2f64.ln()),
        (|x| if x < 0.5 { 1.0 } else { 2.0 }, 0.0, 1.0, 1.5),
        (|x| x.sinh(), -1.0, 3.0, 3f64.cosh() - 1f64.cosh()),
    ]
}

#[test]
fn error_estimates_bound_actual_error() {
    let spec = QuadratureSpec::new(1e-10, 1e-13, 500).unwrap();
    for (i, (f, a, b, exact)) in battery().into_iter().enumerate() {
        let est = try_integrate_1d(|x| Ok::<_, cyltile::QuadratureError>(f(x)), a, b, &spec).unwrap();
        let actual = (est.value - exact).abs();
        assert!(actual <= est.error.max(4.0 * f64::EPSILON * exact.abs()), "integrand {i}: actual {actual:e}, estimate {:e}", est.error);
        assert!(actual <= 1e-9 * exact.abs().max(1.0), "integrand {i}: actual {actual:e}");
    }
}
