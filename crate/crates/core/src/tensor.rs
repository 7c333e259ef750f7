//! Assembly of the tensor field `N` (with `B = (μ0/4π) N M`) from the
//! surface integrals, and the resulting B and H fields.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{canonicalize, rotate_tensor_back, Containment, EvalPoint, Tensor3, Tile, MU0};
use crate::integrals::{
    integral_a, integral_b, integral_c, integral_d, integral_e, integral_f, integral_g, integral_h,
    integral_i, integral_j, integral_k, integral_l, singularity_guard_with, CanonicalArgs, GuardReport,
    GuardTolerances, IntegralError,
};
use crate::oracle;
use crate::quadrature::{QuadratureError, QuadratureSpec};

/// How a tensor value was obtained. Ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Analytic,
    Nudged,
    QuadratureFallback,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Nudged => "nudged",
            Provenance::QuadratureFallback => "quadrature_fallback",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("evaluation point is not finite")]
    NonFinitePoint,
    #[error("oracle fallback failed: {0}")]
    Oracle(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Tolerances for the partially numeric integrals.
    pub spec: QuadratureSpec,
    /// Tolerances for the oracle fallback.
    pub oracle_spec: QuadratureSpec,
    /// Points closer to the axis of a hollow tile than this fraction of the
    /// characteristic length are evaluated by the oracle.
    pub near_axis_ratio: f64,
    /// Largest change of `N` (relative to `max |N_ij|`) tolerated when the
    /// guard nudge is doubled.
    pub nudge_sensitivity: f64,
    /// Scale applied to the guard's nudge distance.
    pub nudge_scale: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            spec: QuadratureSpec::default(),
            oracle_spec: oracle::default_spec(),
            near_axis_ratio: 1e-3,
            nudge_sensitivity: 1e-6,
            nudge_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEval {
    pub n: Tensor3,
    pub guard: GuardReport,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: EvalPoint,
    /// Sum of the tile tensors.
    pub n: Tensor3,
    /// Tesla.
    pub b: Vector3<f64>,
    /// A/m.
    pub h: Vector3<f64>,
    pub inside: bool,
    /// The point lies on a tile face (within the guard tolerance); such
    /// points are classified as outside.
    pub on_surface: bool,
    pub provenance: Provenance,
}

/// `r_s · X(r_s)` with the product taken as zero on a surface of zero radius.
fn weighted(r_s: f64, f: impl Fn(f64) -> Result<f64, IntegralError>) -> Result<f64, IntegralError> {
    if r_s == 0.0 {
        Ok(0.0)
    } else {
        Ok(r_s * f(r_s)?)
    }
}

/// `r_hi X(r_hi) − r_lo X(r_lo)`.
fn arc_pair(a: &CanonicalArgs, f: impl Fn(f64, &CanonicalArgs) -> Result<f64, IntegralError>) -> Result<f64, IntegralError> {
    Ok(weighted(a.r_hi, |r| f(r, a))? - weighted(a.r_lo, |r| f(r, a))?)
}

/// The six independent components in the canonical frame, filled to a
/// symmetric tensor.
pub fn local_tensor(a: &CanonicalArgs, spec: &QuadratureSpec) -> Result<Tensor3, IntegralError> {
    let (s1, c1) = a.th_lo.sin_cos();
    let (s2, c2) = a.th_hi.sin_cos();

    let aa = arc_pair(a, integral_a)?;
    let ii = arc_pair(a, integral_i)?;
    let dd = arc_pair(a, integral_d)?;
    let ee = arc_pair(a, integral_e)?;
    let jj = arc_pair(a, integral_j)?;
    let (b1, b2) = (integral_b(a.th_lo, a)?, integral_b(a.th_hi, a)?);
    let (f1, f2) = (integral_f(a.th_lo, a)?, integral_f(a.th_hi, a)?);
    let (h1, h2) = (integral_h(a.th_lo, a, spec)?, integral_h(a.th_hi, a, spec)?);
    let cz = integral_c(a.z_hi, a, spec)? - integral_c(a.z_lo, a, spec)?;

    let b_cos = c2 * b2 - c1 * b1;
    let h_sin = s1 * h1 - s2 * h2;
    let xx = aa + b_cos + cz;
    let xy = -dd + s2 * b2 - s1 * b1;
    let xz = -ee + s2 * f2 - s1 * f1;
    let yy = ii + h_sin + cz;
    let yz = -jj + c1 * f1 - c2 * f2;
    let zz = aa + ii + b_cos + h_sin;
    Ok(Tensor3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz))
}

/// All nine components in the canonical frame, each from its own formula.
pub fn local_tensor_full(a: &CanonicalArgs, spec: &QuadratureSpec) -> Result<Tensor3, IntegralError> {
    let mut n = local_tensor(a, spec)?;
    let c1 = a.th_lo.cos();
    let c2 = a.th_hi.cos();
    let gg = arc_pair(a, integral_g)?;
    let (h1, h2) = (integral_h(a.th_lo, a, spec)?, integral_h(a.th_hi, a, spec)?);
    n[(1, 0)] = -gg + c1 * h1 - c2 * h2;
    n[(2, 0)] = integral_k(a.z_lo, a, spec)? - integral_k(a.z_hi, a, spec)?;
    n[(2, 1)] = integral_l(a.z_lo, a)? - integral_l(a.z_hi, a)?;
    Ok(n)
}

fn finite(p: &EvalPoint) -> bool {
    p.iter().all(|v| v.is_finite())
}

/// `N` in the global frame with default options.
pub fn tensor_at(tile: &Tile, point: &EvalPoint) -> Result<TensorEval, TensorError> {
    tensor_at_with(tile, point, &EvalOptions::default())
}

/// Canonicalize, guard, evaluate and rotate back. Falls back to the oracle
/// near the axis, when a sub-integral fails, or when a guarded result
/// depends on the nudge distance.
pub fn tensor_at_with(tile: &Tile, point: &EvalPoint, opts: &EvalOptions) -> Result<TensorEval, TensorError> {
    if !finite(point) {
        return Err(TensorError::NonFinitePoint);
    }
    if tile.is_degenerate() {
        return Ok(TensorEval {
            n: Tensor3::zeros(),
            guard: GuardReport::pass_through(),
            provenance: Provenance::Analytic,
        });
    }
    let (cp, args) = canonicalize(point, tile);
    let tol = GuardTolerances::for_length(tile.characteristic_length()).with_nudge_scale(opts.nudge_scale);
    let (cp_g, args_g, guard) = singularity_guard_with(&cp, &args, &tol);
    let nudged_point = point + guard.nudge_applied;

    let fallback = |guard: GuardReport| -> Result<TensorEval, TensorError> {
        let n = oracle::oracle_tensor(tile, &nudged_point, &opts.oracle_spec)?;
        Ok(TensorEval {
            n,
            guard,
            provenance: Provenance::QuadratureFallback,
        })
    };

    // Off the axis of a hollow tile the closed forms cancel badly while the
    // quadrature is easy. A solid tile has faces meeting on its axis, where
    // the quadrature cannot be trusted and the closed forms stay accurate.
    if tile.r1 > 0.0 && cp_g.x_c < opts.near_axis_ratio * tile.characteristic_length() {
        return fallback(guard);
    }
    let Ok(local) = local_tensor(&args_g, &opts.spec) else {
        return fallback(guard);
    };
    let n = rotate_tensor_back(&local, cp_g.psi);
    if !guard.triggered {
        return Ok(TensorEval {
            n,
            guard,
            provenance: Provenance::Analytic,
        });
    }

    let tol2 = tol.with_nudge_scale(2.0);
    let (cp2, args2, _) = singularity_guard_with(&cp, &args, &tol2);
    let stable = match local_tensor(&args2, &opts.spec) {
        Ok(l2) => {
            let n2 = rotate_tensor_back(&l2, cp2.psi);
            (n - n2).amax() <= opts.nudge_sensitivity * n.amax().max(f64::MIN_POSITIVE)
        }
        Err(_) => false,
    };
    let nudged = TensorEval {
        n,
        guard,
        provenance: Provenance::Nudged,
    };
    if stable {
        return Ok(nudged);
    }
    // Next to a tile edge the field itself varies on the nudge scale and the
    // quadrature may not converge either; keep the closed-form value then.
    fallback(guard).or(Ok(nudged))
}

/// Largest `|N_ij − N_ji|` with every component computed independently,
/// together with `max |N_ij|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub max_asymmetry: f64,
    pub max_abs: f64,
}

pub fn tensor_symmetry_check(tile: &Tile, point: &EvalPoint) -> Result<SymmetryCheck, IntegralError> {
    tensor_symmetry_check_with(tile, point, &QuadratureSpec::default())
}

pub fn tensor_symmetry_check_with(
    tile: &Tile,
    point: &EvalPoint,
    spec: &QuadratureSpec,
) -> Result<SymmetryCheck, IntegralError> {
    if tile.is_degenerate() {
        return Ok(SymmetryCheck {
            max_asymmetry: 0.0,
            max_abs: 0.0,
        });
    }
    let (cp, args) = canonicalize(point, tile);
    let n = rotate_tensor_back(&local_tensor_full(&args, spec)?, cp.psi);
    Ok(SymmetryCheck {
        max_asymmetry: (n - n.transpose()).amax(),
        max_abs: n.amax(),
    })
}

/// Superposed field of several tiles at one point.
pub fn field_at(tiles: &[Tile], point: &EvalPoint) -> Result<FieldSample, TensorError> {
    field_at_with(tiles, point, &EvalOptions::default())
}

pub fn field_at_with(tiles: &[Tile], point: &EvalPoint, opts: &EvalOptions) -> Result<FieldSample, TensorError> {
    let mut n_sum = Tensor3::zeros();
    let mut b = Vector3::zeros();
    let mut m_inside = Vector3::zeros();
    let mut inside = false;
    let mut on_surface = false;
    let mut provenance = Provenance::Analytic;
    for tile in tiles {
        let ev = tensor_at_with(tile, point, opts)?;
        n_sum += ev.n;
        b += ev.n * tile.magnetization * (MU0 / (4.0 * PI));
        provenance = provenance.max(ev.provenance);
        let eps = GuardTolerances::for_length(tile.characteristic_length()).eps_geom;
        match tile.containment(point, eps) {
            Containment::Inside => {
                inside = true;
                m_inside += tile.magnetization;
            }
            Containment::OnSurface => on_surface = true,
            Containment::Outside => {}
        }
    }
    Ok(FieldSample {
        point: *point,
        n: n_sum,
        b,
        h: b / MU0 - m_inside,
        inside,
        on_surface,
        provenance,
    })
}

/// Evaluates many points in parallel; results keep the input order.
pub fn field_batch(tiles: &[Tile], points: &[EvalPoint], opts: &EvalOptions) -> Vec<Result<FieldSample, TensorError>> {
    points.par_iter().map(|p| field_at_with(tiles, p, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;
    use crate::integrals::GuardCondition;

    fn tile() -> Tile {
        Tile::new((1.0, 2.0), (-FRAC_PI_4, FRAC_PI_4), (-0.5, 0.5))
            .unwrap()
            .with_magnetization(Vector3::new(3.0e5, 1.0e5, -2.0e5))
            .unwrap()
    }

    #[test]
    fn degenerate_tile_gives_zero() {
        let t = Tile::new((1.0, 2.0), (0.5, 0.5), (0.0, 1.0)).unwrap();
        let ev = tensor_at(&t, &Vector3::new(3.0, 0.0, 0.2)).unwrap();
        assert_eq!(ev.n, Tensor3::zeros());
    }

    #[test]
    fn axis_of_solid_tile_is_nudged_into_the_wedge() {
        let t = Tile::new((0.0, 1.0), (0.0, 1.0), (-0.5, 0.5)).unwrap();
        let ev = tensor_at(&t, &Vector3::new(0.0, 0.0, 0.1)).unwrap();
        assert_eq!(ev.guard.condition, Some(GuardCondition::XZero));
        assert!((ev.n.trace() - 8.0 * std::f64::consts::PI).abs() < 1e-6, "{} {:?}", ev.n.trace(), ev.provenance);
    }

    #[test]
    fn axis_of_hollow_tile_uses_oracle() {
        let ev = tensor_at(&tile(), &Vector3::new(0.0, 0.0, 0.1)).unwrap();
        assert_eq!(ev.provenance, Provenance::QuadratureFallback);
        assert!(ev.n.trace().abs() < 1e-8);
    }

    #[test]
    fn mirror_in_z() {
        let t = tile();
        let up = tensor_at(&t, &Vector3::new(2.7, 0.0, 0.3)).unwrap().n;
        let down = tensor_at(&t, &Vector3::new(2.7, 0.0, -0.3)).unwrap().n;
        assert!((up[(0, 0)] - down[(0, 0)]).abs() < 1e-12 * up.amax());
        assert!((up[(0, 2)] + down[(0, 2)]).abs() < 1e-12 * up.amax());
    }

    #[test]
    fn matches_oracle_tensor() {
        let t = tile();
        for p in [Vector3::new(2.7, 0.4, 0.3), Vector3::new(1.5, 0.2, 0.1), Vector3::new(-0.5, 1.0, 0.9)] {
            let n = tensor_at(&t, &p).unwrap().n;
            let o = oracle::oracle_tensor(&t, &p, &oracle::default_spec()).unwrap();
            assert!((n - o).amax() < 1e-7 * o.amax(), "{p}\n{n}\n{o}");
        }
    }

    #[test]
    fn b_and_h_are_consistent_inside() {
        let t = tile();
        let s = field_at(&[t], &Vector3::new(1.5, 0.1, 0.0)).unwrap();
        assert!(s.inside);
        let rebuilt = MU0 * (s.h + t.magnetization);
        assert!((rebuilt - s.b).norm() <= 1e-12 * s.b.norm());
    }

    #[test]
    fn batch_preserves_order() {
        let t = tile();
        let pts: Vec<_> = (0..16).map(|i| Vector3::new(2.5 + 0.1 * i as f64, 0.3, 0.2)).collect();
        let batch = field_batch(&[t], &pts, &EvalOptions::default());
        for (p, s) in pts.iter().zip(batch) {
            assert_eq!(s.unwrap().point, *p);
        }
    }
}
