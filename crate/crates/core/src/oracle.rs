//! Brute-force reference fields: direct 2D quadrature over the six tile
//! faces in the tile's own Cartesian frame, with no rotation trick and no
//! closed forms.
//!
//! Two formulations are provided. The surface form integrates
//! `M (n·∇D) − n (M·∇D)` and yields B directly; the charge form integrates
//! the surface charge `σ = M·n` against `∇D` and yields H, from which
//! `B = μ0 (H + M·[inside])`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::geometry::{Containment, EvalPoint, Tensor3, Tile, MU0};
use crate::quadrature::{try_integrate_2d_breaks, QuadratureError, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceId {
    ArcOuter,
    ArcInner,
    VerticalHi,
    VerticalLo,
    HorizontalHi,
    HorizontalLo,
}

/// Fixed summation order.
pub const SURFACES: [SurfaceId; 6] = [
    SurfaceId::ArcOuter,
    SurfaceId::ArcInner,
    SurfaceId::VerticalHi,
    SurfaceId::VerticalLo,
    SurfaceId::HorizontalHi,
    SurfaceId::HorizontalLo,
];

/// Default oracle tolerances.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-8,
        abs_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

/// A face in its natural coordinates `(a, b)`: outer and inner breakpoints
/// plus the map to position, outward normal and area element.
struct Face<'t> {
    id: SurfaceId,
    tile: &'t Tile,
    outer: Vec<f64>,
    inner: Vec<f64>,
}

impl Face<'_> {
    fn at(&self, a: f64, b: f64) -> (Vector3<f64>, Vector3<f64>, f64) {
        let t = self.tile;
        match self.id {
            SurfaceId::ArcOuter | SurfaceId::ArcInner => {
                let (r, sign) = if self.id == SurfaceId::ArcOuter {
                    (t.r2, 1.0)
                } else {
                    (t.r1, -1.0)
                };
                let (s, c) = a.sin_cos();
                (Vector3::new(r * c, r * s, b), sign * Vector3::new(c, s, 0.0), r)
            }
            SurfaceId::VerticalHi | SurfaceId::VerticalLo => {
                let (th, sign) = if self.id == SurfaceId::VerticalHi {
                    (t.theta2, 1.0)
                } else {
                    (t.theta1, -1.0)
                };
                let (s, c) = th.sin_cos();
                (Vector3::new(a * c, a * s, b), sign * Vector3::new(-s, c, 0.0), 1.0)
            }
            SurfaceId::HorizontalHi | SurfaceId::HorizontalLo => {
                let (z, sign) = if self.id == SurfaceId::HorizontalHi {
                    (t.z2, 1.0)
                } else {
                    (t.z1, -1.0)
                };
                let (s, c) = a.sin_cos();
                (Vector3::new(b * c, b * s, z), Vector3::new(0.0, 0.0, sign), b)
            }
        }
    }

    /// Which normal components can be non-zero on this face.
    fn normal_support(&self) -> [bool; 3] {
        match self.id {
            SurfaceId::HorizontalHi | SurfaceId::HorizontalLo => [false, false, true],
            _ => [true, true, false],
        }
    }
}

fn with_interior(lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v = vec![lo];
    let mut inner: Vec<f64> = extra.into_iter().filter(|&t| t > lo && t < hi).collect();
    inner.sort_by(f64::total_cmp);
    v.extend(inner);
    v.push(hi);
    v
}

/// Copies of `phi` shifted by multiples of 2π.
fn angle_copies(phi: f64) -> impl Iterator<Item = f64> {
    (-2..=2).map(move |k| phi + k as f64 * TAU)
}

/// Breakpoints in `[lo, hi]` at each centre `c` and at geometrically
/// growing distances `h, 4h, 16h, …` on either side, so that a peak of
/// width `h` next to `c` is resolved even when `c` sits on an end.
fn graded(lo: f64, hi: f64, centres: &[f64], h: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for &c in centres {
        let c = c.clamp(lo, hi);
        pts.push(c);
        if h > 0.0 && h.is_finite() {
            let mut d = h;
            while d < hi - lo {
                pts.push(c - d);
                pts.push(c + d);
                d *= 4.0;
            }
        }
    }
    let mut v = with_interior(lo, hi, pts);
    v.dedup();
    v
}

/// Copies of `phi` (modulo 2π) within π of `[lo, hi]`.
fn nearby_angles(lo: f64, hi: f64, phi: f64) -> Vec<f64> {
    angle_copies(phi).filter(|&a| a > lo - PI && a < hi + PI).collect()
}

/// The faces of `tile` with breakpoints graded towards the projection of
/// the local point `p`. Faces of zero area are skipped, as are the two side
/// faces of a closed ring, whose contributions cancel.
fn faces<'t>(tile: &'t Tile, p: &Vector3<f64>) -> Vec<Face<'t>> {
    let rho = p.x.hypot(p.y);
    let phi = p.y.atan2(p.x);
    let closed = tile.theta2 - tile.theta1 >= TAU - 1e-12;
    let phis = nearby_angles(tile.theta1, tile.theta2, phi);
    let off_range = |a: &f64| (a.clamp(tile.theta1, tile.theta2) - a).abs();
    let phi_c = phis.iter().cloned().min_by(|a, b| off_range(a).total_cmp(&off_range(b))).unwrap_or(phi);
    let mut out = Vec::new();
    for id in SURFACES {
        let mut face = Face {
            id,
            tile,
            outer: Vec::new(),
            inner: Vec::new(),
        };
        // Projection of `p` in the face's natural coordinates.
        let (a_c, b_c) = match id {
            SurfaceId::ArcOuter => (phi_c, p.z),
            SurfaceId::ArcInner if tile.r1 > 0.0 => (phi_c, p.z),
            SurfaceId::VerticalHi | SurfaceId::VerticalLo if !closed => {
                let ts = if id == SurfaceId::VerticalHi { tile.theta2 } else { tile.theta1 };
                (rho * (phi - ts).cos(), p.z)
            }
            SurfaceId::HorizontalHi | SurfaceId::HorizontalLo => (phi_c, rho),
            _ => continue,
        };
        let ((a_lo, a_hi), (b_lo, b_hi)) = match id {
            SurfaceId::VerticalHi | SurfaceId::VerticalLo => ((tile.r1, tile.r2), (tile.z1, tile.z2)),
            SurfaceId::HorizontalHi | SurfaceId::HorizontalLo => ((tile.theta1, tile.theta2), (tile.r1, tile.r2)),
            _ => ((tile.theta1, tile.theta2), (tile.z1, tile.z2)),
        };
        let (q, _, _) = face.at(a_c.clamp(a_lo, a_hi), b_c.clamp(b_lo, b_hi));
        let h = (p - q).norm();
        // Angular coordinates measure arc length divided by a radius.
        let a_scale = match id {
            SurfaceId::ArcOuter => tile.r2,
            SurfaceId::ArcInner => tile.r1,
            SurfaceId::HorizontalHi | SurfaceId::HorizontalLo => b_c.clamp(b_lo, b_hi).max(h),
            _ => 1.0,
        };
        let a_centres = match id {
            SurfaceId::VerticalHi | SurfaceId::VerticalLo => vec![a_c],
            _ => phis.clone(),
        };
        face.outer = graded(a_lo, a_hi, &a_centres, h / a_scale.max(f64::MIN_POSITIVE));
        face.inner = graded(b_lo, b_hi, &[b_c], h);
        out.push(face);
    }
    out
}

/// `∇D` with respect to the field point, `D = 1/|p − q|`.
fn grad_d(p: &Vector3<f64>, q: &Vector3<f64>) -> Vector3<f64> {
    let d = p - q;
    let n2 = d.norm_squared();
    -d / (n2 * n2.sqrt())
}

fn face_integral<F>(face: &Face, p: &Vector3<f64>, spec: &QuadratureSpec, f: F) -> Result<f64, QuadratureError>
where
    F: Fn(&Vector3<f64>, &Vector3<f64>) -> f64,
{
    let est = try_integrate_2d_breaks(
        |a, b| {
            let (q, n, jac) = face.at(a, b);
            Ok::<_, QuadratureError>(f(&grad_d(p, &q), &n) * jac)
        },
        &face.outer,
        &face.inner,
        spec,
    )?;
    Ok(est.value)
}

fn local(tile: &Tile, point: &EvalPoint) -> Vector3<f64> {
    point - tile.offset
}

/// B (tesla) from the surface form of the field integral.
pub fn oracle_b_surface(tile: &Tile, point: &EvalPoint, spec: &QuadratureSpec) -> Result<Vector3<f64>, QuadratureError> {
    let m = tile.magnetization;
    let scale = m.norm();
    if scale == 0.0 || tile.is_degenerate() {
        return Ok(Vector3::zeros());
    }
    let mh = m / scale;
    let p = local(tile, point);
    let mut acc = Vector3::zeros();
    for face in faces(tile, &p) {
        for i in 0..3 {
            acc[i] += face_integral(&face, &p, spec, |g, n| mh[i] * n.dot(g) - n[i] * mh.dot(g))?;
        }
    }
    Ok(acc * (MU0 / (4.0 * PI) * scale))
}

/// B (tesla) from the surface-charge form: `H = −(1/4π) ∫ σ ∇D da`.
pub fn oracle_b_charge(tile: &Tile, point: &EvalPoint, spec: &QuadratureSpec) -> Result<Vector3<f64>, QuadratureError> {
    let m = tile.magnetization;
    let scale = m.norm();
    if scale == 0.0 || tile.is_degenerate() {
        return Ok(Vector3::zeros());
    }
    let mh = m / scale;
    let p = local(tile, point);
    let mut h = Vector3::zeros();
    for face in faces(tile, &p) {
        let support = face.normal_support();
        if (0..3).all(|j| !support[j] || mh[j] == 0.0) {
            continue;
        }
        for i in 0..3 {
            h[i] -= face_integral(&face, &p, spec, |g, n| mh.dot(n) * g[i])? / (4.0 * PI);
        }
    }
    let inside = tile.containment(point, 0.0) == Containment::Inside;
    let m_in = if inside { m } else { Vector3::zeros() };
    Ok(MU0 * (h * scale + m_in))
}

/// The tensor `N` with `B = (μ0/4π) N M`, from the surface form:
/// `N_ij = ∫ [δ_ij (n·∇D) − n_i ∂_j D] da`.
pub fn oracle_tensor(tile: &Tile, point: &EvalPoint, spec: &QuadratureSpec) -> Result<Tensor3, QuadratureError> {
    if tile.is_degenerate() {
        return Ok(Tensor3::zeros());
    }
    let p = local(tile, point);
    let mut n_acc = Tensor3::zeros();
    for face in faces(tile, &p) {
        let support = face.normal_support();
        for i in 0..3 {
            for j in 0..3 {
                let only_i = (0..3).all(|k| support[k] == (k == i));
                if (i != j && !support[i]) || (i == j && only_i) {
                    continue;
                }
                let delta = if i == j { 1.0 } else { 0.0 };
                n_acc[(i, j)] += face_integral(&face, &p, spec, |g, n| delta * n.dot(g) - n[i] * g[j])?;
            }
        }
    }
    Ok(n_acc)
}

/// The tensor `N` from the charge form:
/// `N_ij = 4π δ_ij [inside] − ∫ ∂_i D n_j da`.
pub fn oracle_tensor_charge(tile: &Tile, point: &EvalPoint, spec: &QuadratureSpec) -> Result<Tensor3, QuadratureError> {
    if tile.is_degenerate() {
        return Ok(Tensor3::zeros());
    }
    let p = local(tile, point);
    let mut n_acc = Tensor3::zeros();
    for face in faces(tile, &p) {
        let support = face.normal_support();
        for j in (0..3).filter(|&j| support[j]) {
            for i in 0..3 {
                n_acc[(i, j)] -= face_integral(&face, &p, spec, |g, n| g[i] * n[j])?;
            }
        }
    }
    if tile.containment(point, 0.0) == Containment::Inside {
        n_acc += Tensor3::identity() * (4.0 * PI);
    }
    Ok(n_acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    fn tile() -> Tile {
        Tile::new((1.0, 2.0), (0.0, FRAC_PI_3), (-0.5, 0.5))
            .unwrap()
            .with_magnetization(Vector3::new(1.0e5, -2.0e5, 3.0e5))
            .unwrap()
    }

    #[test]
    fn zero_magnetization_gives_zero() {
        let t = Tile::new((1.0, 2.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let p = Vector3::new(3.0, 0.1, 0.2);
        assert_eq!(oracle_b_surface(&t, &p, &default_spec()).unwrap(), Vector3::zeros());
        assert_eq!(oracle_b_charge(&t, &p, &default_spec()).unwrap(), Vector3::zeros());
    }

    #[test]
    fn surface_and_charge_forms_agree() {
        let t = tile();
        for p in [Vector3::new(2.5, 1.0, 0.3), Vector3::new(1.5, 0.4, 0.1), Vector3::new(-1.0, 0.2, 1.0)] {
            let a = oracle_b_surface(&t, &p, &default_spec()).unwrap();
            let b = oracle_b_charge(&t, &p, &default_spec()).unwrap();
            assert!((a - b).norm() < 1e-7 * a.norm(), "{a} {b}");
        }
    }

    #[test]
    fn axial_ring_field_on_axis_is_axial() {
        let t = Tile::new((1.0, 2.0), (0.0, TAU), (-0.5, 0.5))
            .unwrap()
            .with_magnetization(Vector3::new(0.0, 0.0, 1.0e6))
            .unwrap();
        let b = oracle_b_surface(&t, &Vector3::new(0.0, 0.0, 0.7), &default_spec()).unwrap();
        assert!(b.x.abs() < 1e-10 * b.z.abs() && b.y.abs() < 1e-10 * b.z.abs(), "{b}");
    }

    #[test]
    fn tensor_forms_are_transposes_of_each_other() {
        let t = tile();
        let p = Vector3::new(2.2, 1.4, -0.3);
        let a = oracle_tensor(&t, &p, &default_spec()).unwrap();
        let b = oracle_tensor_charge(&t, &p, &default_spec()).unwrap();
        assert!((a - b).amax() < 1e-7 * a.amax(), "{a} {b}");
        let bm = oracle_b_surface(&t, &p, &default_spec()).unwrap();
        let via_tensor = a * t.magnetization * (MU0 / (4.0 * PI));
        assert!((bm - via_tensor).norm() < 1e-7 * bm.norm());
    }
}
