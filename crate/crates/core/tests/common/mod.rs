#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use cyltile::{CanonicalArgs, Tile};
use nalgebra::Vector3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_magnetization(rng: &mut StdRng) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1.0e6
}

/// A tile of order-one size, one in five with `r1 = 0`.
pub fn random_tile(rng: &mut StdRng) -> Tile {
    let r1 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.1..1.5) };
    let r2 = r1 + rng.gen_range(0.2..1.5);
    let t1 = rng.gen_range(-PI..PI);
    let t2 = t1 + rng.gen_range(0.2..TAU);
    let z1 = rng.gen_range(-1.0..1.0);
    let z2 = z1 + rng.gen_range(0.2..1.5);
    Tile::new((r1, r2), (t1, t2), (z1, z2))
        .unwrap()
        .with_offset(Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .unwrap()
        .with_magnetization(random_magnetization(rng))
        .unwrap()
}

/// Smallest distance from `p` to any cylinder, plane or half-plane carrying
/// a tile face (faces extended to infinity), and to the tile axis.
pub fn clearance(tile: &Tile, p: &Vector3<f64>) -> f64 {
    let d = p - tile.offset;
    let rho = d.x.hypot(d.y);
    let phi = d.y.atan2(d.x);
    let mut m = rho.min((d.z - tile.z1).abs()).min((d.z - tile.z2).abs());
    m = m.min((rho - tile.r2).abs());
    if tile.r1 > 0.0 {
        m = m.min((rho - tile.r1).abs());
    }
    for th in [tile.theta1, tile.theta2] {
        m = m.min(rho * (phi - th).sin().abs());
    }
    m
}

/// A point in a box around the tile, at least `margin · L` from every face
/// locus.
pub fn random_point_near(rng: &mut StdRng, tile: &Tile, margin: f64) -> Vector3<f64> {
    let l = tile.characteristic_length();
    loop {
        let p = tile.offset
            + Vector3::new(
                rng.gen_range(-1.5..1.5) * (tile.r2 + 0.5),
                rng.gen_range(-1.5..1.5) * (tile.r2 + 0.5),
                rng.gen_range(tile.z1 - 1.0..tile.z2 + 1.0),
            );
        if clearance(tile, &p) > margin * l {
            return p;
        }
    }
}

pub fn random_point_inside(rng: &mut StdRng, tile: &Tile, margin: f64) -> Vector3<f64> {
    let l = tile.characteristic_length();
    loop {
        let r = rng.gen_range(tile.r1..tile.r2);
        let t = rng.gen_range(tile.theta1..tile.theta2);
        let z = rng.gen_range(tile.z1..tile.z2);
        let p = tile.offset + Vector3::new(r * t.cos(), r * t.sin(), z);
        if clearance(tile, &p) > margin * l {
            return p;
        }
    }
}

pub fn random_point_outside(rng: &mut StdRng, tile: &Tile, margin: f64) -> Vector3<f64> {
    loop {
        let p = random_point_near(rng, tile, margin);
        if tile.containment(&p, 0.0) == cyltile::Containment::Outside {
            return p;
        }
    }
}

/// `𝔸` from its literal definition.
pub fn a_lit(r: f64, x: f64, t: f64, z: f64) -> f64 {
    (r * r - 2.0 * x * r * t.cos() + x * x + z * z).sqrt()
}

/// Kernel gradient at the canonical point `(x, 0, 0)` due to a source at
/// cylindrical `(r, t, z)`.
pub fn grad(x: f64, r: f64, t: f64, z: f64) -> [f64; 3] {
    let a3 = a_lit(r, x, t, z).powi(3);
    [(r * t.cos() - x) / a3, r * t.sin() / a3, z / a3]
}

/// Angle in `[lo, hi]` closest to a multiple of 2π.
fn closest_to_zero(lo: f64, hi: f64) -> f64 {
    let n = (lo / TAU).ceil();
    if n * TAU <= hi {
        return 0.0;
    }
    let d_lo = (lo - TAU * (lo / TAU).round()).abs();
    let d_hi = (hi - TAU * (hi / TAU).round()).abs();
    d_lo.min(d_hi)
}

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

/// Distance from `(x, 0, 0)` to the arc patch at `r_s`.
pub fn dist_arc(a: &CanonicalArgs, r_s: f64) -> f64 {
    let t = closest_to_zero(a.th_lo, a.th_hi);
    let z = clamp(0.0, a.z_lo, a.z_hi);
    a_lit(r_s, a.x, t, z)
}

/// Distance from `(x, 0, 0)` to the side patch at `θ_s`.
pub fn dist_side(a: &CanonicalArgs, t_s: f64) -> f64 {
    let r = clamp(a.x * t_s.cos(), a.r_lo, a.r_hi);
    let z = clamp(0.0, a.z_lo, a.z_hi);
    a_lit(r, a.x, t_s, z)
}

/// Distance from `(x, 0, 0)` to the end patch at `z_s`.
pub fn dist_end(a: &CanonicalArgs, z_s: f64) -> f64 {
    let t = closest_to_zero(a.th_lo, a.th_hi);
    let r = clamp(a.x * t.cos(), a.r_lo, a.r_hi);
    a_lit(r, a.x, t, z_s)
}

pub fn random_args(rng: &mut StdRng) -> CanonicalArgs {
    let r_lo = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.05..2.0) };
    let th_lo = rng.gen_range(-TAU..TAU);
    let z_lo = rng.gen_range(-2.0..2.0);
    CanonicalArgs {
        x: rng.gen_range(0.2..3.0),
        r_lo,
        r_hi: r_lo + rng.gen_range(0.1..2.0),
        th_lo,
        th_hi: th_lo + rng.gen_range(0.05..TAU),
        z_lo,
        z_hi: z_lo + rng.gen_range(0.05..3.0),
    }
}
