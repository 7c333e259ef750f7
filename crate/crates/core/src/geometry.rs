//! Tiles, evaluation points and the rotation/translation that brings every
//! evaluation into the canonical frame where the point sits at `(x, 0, 0)`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::integrals::CanonicalArgs;

/// Vacuum permeability in T·m/A.
pub const MU0: f64 = 4.0e-7 * PI;

/// Largest accepted magnetization component, A/m.
pub const MAX_MAGNETIZATION: f64 = 1.0e9;

/// A Cartesian point in the global frame, meters.
pub type EvalPoint = Vector3<f64>;

/// A dimensionless 3×3 tensor. `Tensor3 * M` gives `4π B / μ0`.
pub type Tensor3 = Matrix3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TileError {
    #[error("radii must satisfy 0 <= r1 <= r2 (got r1 = {r1}, r2 = {r2})")]
    Radii { r1: f64, r2: f64 },
    #[error("heights must satisfy z1 <= z2 (got z1 = {z1}, z2 = {z2})")]
    Heights { z1: f64, z2: f64 },
    #[error("angles must satisfy theta1 <= theta2 <= theta1 + 2π (got {theta1}, {theta2})")]
    Angles { theta1: f64, theta2: f64 },
    #[error("magnetization component {value} is not finite or exceeds 1e9 A/m")]
    Magnetization { value: f64 },
    #[error("tile offset is not finite")]
    Offset,
}

/// A homogeneously magnetized angular section of a hollow finite cylinder.
///
/// The cylinder axis is parallel to global z and passes through `offset`.
/// All lengths are meters, angles radians and magnetization A/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tile {
    pub r1: f64,
    pub r2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub z1: f64,
    pub z2: f64,
    pub offset: Vector3<f64>,
    pub magnetization: Vector3<f64>,
}

impl Tile {
    /// Builds a validated tile at the origin with zero magnetization.
    ///
    /// Degenerate spans (`r1 == r2`, `theta1 == theta2`, `z1 == z2`) are
    /// accepted and describe an empty magnet.
    pub fn new(
        (r1, r2): (f64, f64),
        (theta1, theta2): (f64, f64),
        (z1, z2): (f64, f64),
    ) -> Result<Self, TileError> {
        let tile = Tile {
            r1,
            r2,
            theta1,
            theta2,
            z1,
            z2,
            offset: Vector3::zeros(),
            magnetization: Vector3::zeros(),
        };
        tile.validate()?;
        Ok(tile)
    }

    pub fn with_offset(mut self, offset: Vector3<f64>) -> Result<Self, TileError> {
        self.offset = offset;
        self.validate()?;
        Ok(self)
    }

    pub fn with_magnetization(mut self, m: Vector3<f64>) -> Result<Self, TileError> {
        self.magnetization = m;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), TileError> {
        let Tile {
            r1,
            r2,
            theta1,
            theta2,
            z1,
            z2,
            ..
        } = *self;
        if !(r1.is_finite() && r2.is_finite() && r1 >= 0.0 && r1 <= r2) {
            return Err(TileError::Radii { r1, r2 });
        }
        if !(z1.is_finite() && z2.is_finite() && z1 <= z2) {
            return Err(TileError::Heights { z1, z2 });
        }
        // A full turn is allowed a few ulps of slack so that 2π spans written
        // as `theta1 + 2.0 * PI` are not rejected.
        let span_ok = theta2 - theta1 <= 2.0 * PI * (1.0 + 4.0 * f64::EPSILON);
        if !(theta1.is_finite() && theta2.is_finite() && theta1 <= theta2 && span_ok) {
            return Err(TileError::Angles { theta1, theta2 });
        }
        if let Some(&value) = self
            .magnetization
            .iter()
            .find(|m| !m.is_finite() || m.abs() >= MAX_MAGNETIZATION)
        {
            return Err(TileError::Magnetization { value });
        }
        if !self.offset.iter().all(|v| v.is_finite()) {
            return Err(TileError::Offset);
        }
        Ok(())
    }

    /// Length scale used for geometric tolerances: `max(r2, z2 - z1)`.
    pub fn characteristic_length(&self) -> f64 {
        self.r2.max(self.z2 - self.z1)
    }

    pub fn volume(&self) -> f64 {
        0.5 * (self.theta2 - self.theta1) * (self.r2 * self.r2 - self.r1 * self.r1) * (self.z2 - self.z1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.r1 == self.r2 || self.theta1 == self.theta2 || self.z1 == self.z2
    }

    /// Center of volume in the global frame.
    pub fn centroid(&self) -> Vector3<f64> {
        let half = 0.5 * (self.theta2 - self.theta1);
        let mid = 0.5 * (self.theta1 + self.theta2);
        let radial = if self.r2 > self.r1 {
            2.0 / 3.0 * (self.r2.powi(3) - self.r1.powi(3)) / (self.r2 * self.r2 - self.r1 * self.r1)
        } else {
            self.r1
        };
        let sinc = if half.abs() < 1e-12 { 1.0 } else { half.sin() / half };
        let rho = radial * sinc;
        self.offset + Vector3::new(rho * mid.cos(), rho * mid.sin(), 0.5 * (self.z1 + self.z2))
    }

    /// Cylindrical coordinates `(rho, phi, z)` of a global point relative to
    /// the tile axis; `phi` is in `(-π, π]`.
    pub fn local_cylindrical(&self, point: &EvalPoint) -> (f64, f64, f64) {
        let d = point - self.offset;
        (d.x.hypot(d.y), d.y.atan2(d.x), d.z)
    }

    /// Containment test with tolerance `eps` (meters).
    ///
    /// Points within `eps` of a face report [`Containment::OnSurface`].
    pub fn containment(&self, point: &EvalPoint, eps: f64) -> Containment {
        if self.is_degenerate() {
            return Containment::Outside;
        }
        let (rho, phi, z) = self.local_cylindrical(point);
        let span = self.theta2 - self.theta1;
        let full_turn = span >= 2.0 * PI * (1.0 - 1e-15);
        // Angular offset from theta1 into [0, 2π).
        let rel = (phi - self.theta1).rem_euclid(2.0 * PI);
        let arc_gap = if full_turn {
            f64::INFINITY
        } else {
            // Distance (along the arc at radius rho) to the nearest vertical face.
            let to_lo = rel.min(2.0 * PI - rel);
            let to_hi = (rel - span).abs().min(2.0 * PI - (rel - span).abs());
            rho * to_lo.min(to_hi)
        };
        let in_angle = full_turn || rel <= span;
        let in_r = rho >= self.r1 - eps && rho <= self.r2 + eps;
        let in_z = z >= self.z1 - eps && z <= self.z2 + eps;
        if !(in_r && in_z && (in_angle || arc_gap <= eps)) {
            return Containment::Outside;
        }
        let near_r = (self.r1 > 0.0 && (rho - self.r1).abs() <= eps) || (rho - self.r2).abs() <= eps;
        let near_z = (z - self.z1).abs() <= eps || (z - self.z2).abs() <= eps;
        if near_r || near_z || arc_gap <= eps {
            Containment::OnSurface
        } else {
            Containment::Inside
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    OnSurface,
    Outside,
}

/// Position of the evaluation point after rotating it onto the positive
/// x-axis of the tile frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPoint {
    /// Distance from the tile axis, `>= 0`.
    pub x_c: f64,
    /// Rotation angle in `(-π, π]`.
    pub psi: f64,
    /// Height of the point relative to the tile origin.
    pub z_shift: f64,
}

/// Moves `point` into the frame where it lies at `(x_c, 0, 0)` and shifts the
/// tile's integration limits accordingly.
pub fn canonicalize(point: &EvalPoint, tile: &Tile) -> (CanonicalPoint, CanonicalArgs) {
    let d = point - tile.offset;
    let x_c = d.x.hypot(d.y);
    let psi = match d.y.atan2(d.x) {
        p if p == -PI => PI,
        p => p,
    };
    let cp = CanonicalPoint {
        x_c,
        psi,
        z_shift: d.z,
    };
    let args = CanonicalArgs {
        x: x_c,
        r_lo: tile.r1,
        r_hi: tile.r2,
        th_lo: tile.theta1 - psi,
        th_hi: tile.theta2 - psi,
        z_lo: tile.z1 - d.z,
        z_hi: tile.z2 - d.z,
    };
    (cp, args)
}

/// Rotation about z by `psi`.
pub fn rotation_z(psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Expresses a tensor computed in the canonical frame in the global frame:
/// `R(ψ) · N · R(ψ)ᵀ`.
pub fn rotate_tensor_back(n_local: &Tensor3, psi: f64) -> Tensor3 {
    let r = rotation_z(psi);
    r * n_local * r.transpose()
}

/// Converts `μ0·M` in tesla to `M` in A/m.
pub fn magnetization_from_tesla(mu0_m: Vector3<f64>) -> Vector3<f64> {
    mu0_m / MU0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn unit_tile() -> Tile {
        Tile::new((1.0, 2.0), (0.0, FRAC_PI_4), (-0.5, 0.5)).unwrap()
    }

    #[test]
    fn canonicalize_diagonal_point() {
        let (cp, _) = canonicalize(&Vector3::new(1.0, 1.0, 0.0), &unit_tile());
        assert!((cp.psi - FRAC_PI_4).abs() < 1e-15);
        assert!((cp.x_c - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_on_x_axis_keeps_angles() {
        let tile = unit_tile();
        let (cp, args) = canonicalize(&Vector3::new(3.0, 0.0, 0.25), &tile);
        assert_eq!(cp.psi, 0.0);
        assert_eq!(args.th_lo, tile.theta1);
        assert_eq!(args.th_hi, tile.theta2);
        assert_eq!(args.z_lo, -0.75);
        assert_eq!(args.z_hi, 0.25);
    }

    #[test]
    fn canonicalize_negative_x() {
        let (cp, _) = canonicalize(&Vector3::new(-2.0, 0.0, 0.0), &unit_tile());
        assert_eq!(cp.psi, PI);
        assert_eq!(cp.x_c, 2.0);
    }

    #[test]
    fn canonicalize_uses_offset() {
        let tile = unit_tile().with_offset(Vector3::new(1.0, -1.0, 2.0)).unwrap();
        let (cp, args) = canonicalize(&Vector3::new(1.0, 1.0, 2.0), &tile);
        assert!((cp.psi - PI / 2.0).abs() < 1e-15);
        assert_eq!(cp.x_c, 2.0);
        assert_eq!(args.z_lo, -0.5);
    }

    #[test]
    fn rotate_back_identity_and_period() {
        let n = Tensor3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.5);
        assert_eq!(rotate_tensor_back(&n, 0.0), n);
        let back = rotate_tensor_back(&n, 2.0 * PI);
        assert!((back - n).amax() < 1e-14);
    }

    #[test]
    fn rotate_back_matches_explicit_products() {
        let n = Tensor3::new(0.3, -1.2, 0.7, 2.1, -0.4, 1.9, -0.8, 0.5, 1.1);
        let psi = PI / 3.0;
        let (s, c) = psi.sin_cos();
        let rot = |v: Vector3<f64>| Vector3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z);
        let unrot = |v: Vector3<f64>| Vector3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z);
        let global = rotate_tensor_back(&n, psi);
        for m in [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.3, -2.0, 0.9),
        ] {
            let expect = rot(n * unrot(m));
            assert!((global * m - expect).amax() < 1e-14);
        }
        assert!((global.trace() - n.trace()).abs() < 1e-14);
    }

    #[test]
    fn units() {
        assert_eq!(magnetization_from_tesla(Vector3::zeros()), Vector3::zeros());
        let one = magnetization_from_tesla(Vector3::new(1.2566370614359173e-6, 0.0, 0.0));
        assert!((one.x - 1.0).abs() < 1e-12);
        let ex1 = magnetization_from_tesla(Vector3::repeat(0.6929));
        assert!((ex1.x - 551_392.300_341_871_4).abs() < 1e-6, "{}", ex1.x);
        assert!((ex1.x / 551.36e3 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_invalid_tiles() {
        assert!(Tile::new((2.0, 1.0), (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Tile::new((-0.1, 1.0), (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Tile::new((0.0, 1.0), (0.0, 7.0), (0.0, 1.0)).is_err());
        assert!(Tile::new((0.0, 1.0), (0.0, 1.0), (1.0, 0.0)).is_err());
        assert!(Tile::new((0.0, 1.0), (0.0, 2.0 * PI), (0.0, 1.0)).is_ok());
        let t = unit_tile();
        assert!(t.with_magnetization(Vector3::new(2e9, 0.0, 0.0)).is_err());
        assert!(t.with_magnetization(Vector3::new(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn containment_classes() {
        let t = unit_tile();
        let eps = 1e-9;
        let mid = Vector3::new(1.5 * (PI / 8.0).cos(), 1.5 * (PI / 8.0).sin(), 0.0);
        assert_eq!(t.containment(&mid, eps), Containment::Inside);
        assert_eq!(t.containment(&Vector3::new(1.5, 0.0, 0.0), eps), Containment::OnSurface);
        assert_eq!(t.containment(&Vector3::new(1.5, -0.1, 0.0), eps), Containment::Outside);
        assert_eq!(t.containment(&Vector3::new(1.5, 0.1, 0.5), eps), Containment::OnSurface);
        assert_eq!(t.containment(&Vector3::new(0.5, 0.1, 0.0), eps), Containment::Outside);
    }

    #[test]
    fn centroid_of_half_disk() {
        let t = Tile::new((0.0, 1.0), (0.0, PI), (0.0, 2.0)).unwrap();
        let c = t.centroid();
        assert!(c.x.abs() < 1e-15);
        assert!((c.y - 4.0 / (3.0 * PI)).abs() < 1e-15);
        assert_eq!(c.z, 1.0);
    }
}
