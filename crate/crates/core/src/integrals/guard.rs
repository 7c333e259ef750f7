//! Detection of evaluation points on or next to the loci where the closed
//! forms break down, and the small displacement that moves them off.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use super::CanonicalArgs;
use crate::geometry::{rotation_z, CanonicalPoint};

/// Loci at which the canonical closed forms are invalid.
///
/// `RZero` (a surface at radius zero) is never reported: arc terms on such
/// a surface are evaluated from their exact limits instead of being nudged.
/// `OnFace` covers points on a tile face that none of the other conditions
/// catches, such as the interior of a side face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardCondition {
    ThetaNpiZ0,
    ThetaNpiREqX,
    XZero,
    RZero,
    OnFace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardReport {
    pub triggered: bool,
    /// The first condition detected, if any.
    pub condition: Option<GuardCondition>,
    /// Total displacement applied, in the global frame (meters).
    pub nudge_applied: Vector3<f64>,
}

impl GuardReport {
    pub fn pass_through() -> Self {
        GuardReport {
            triggered: false,
            condition: None,
            nudge_applied: Vector3::zeros(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardTolerances {
    pub eps_geom: f64,
    pub eps_ang: f64,
    pub eps_nudge: f64,
}

impl GuardTolerances {
    /// Tolerances scaled to the characteristic length `max(r_hi, z_hi − z_lo)`.
    pub fn for_args(args: &CanonicalArgs) -> Self {
        Self::for_length(args.r_hi.max(args.z_hi - args.z_lo))
    }

    pub fn for_length(length: f64) -> Self {
        let eps_geom = 1e-9 * length.max(f64::MIN_POSITIVE);
        GuardTolerances {
            eps_geom,
            eps_ang: 1e-9,
            eps_nudge: 10.0 * eps_geom,
        }
    }

    pub fn with_nudge_scale(mut self, factor: f64) -> Self {
        self.eps_nudge *= factor;
        self
    }
}

const MAX_ROUNDS: usize = 6;

fn near_npi(theta: f64, eps: f64) -> bool {
    (theta - PI * (theta / PI).round()).abs() <= eps
}

fn near_2npi(theta: f64, eps: f64) -> bool {
    (theta - TAU * (theta / TAU).round()).abs() <= eps
}

/// Does `[lo − eps, hi + eps]` contain a multiple of 2π?
fn contains_2npi(lo: f64, hi: f64, eps: f64) -> bool {
    let n = ((lo - eps) / TAU).ceil();
    n * TAU <= hi + eps
}

/// Unit directions (canonical frame) leaving each locus the point sits on,
/// in detection order.
fn detect(args: &CanonicalArgs, tol: &GuardTolerances) -> Vec<(GuardCondition, Vector3<f64>)> {
    let CanonicalArgs {
        x,
        r_lo,
        r_hi,
        th_lo,
        th_hi,
        z_lo,
        z_hi,
    } = *args;
    let eps = tol.eps_geom;
    let mut found = Vec::new();

    // Beside the apex edge of a solid tile the closed forms lose digits
    // below the nudge distance, so such points are pushed out that far.
    if x < eps || (r_lo == 0.0 && x < tol.eps_nudge * (1.0 - 1e-12)) {
        let mid = 0.5 * (th_lo + th_hi);
        found.push((GuardCondition::XZero, Vector3::new(mid.cos(), mid.sin(), 0.0)));
        return found;
    }

    let theta_hit = near_npi(th_lo, tol.eps_ang)
        || near_npi(th_hi, tol.eps_ang)
        || contains_2npi(th_lo, th_hi, 0.0);
    if theta_hit {
        if z_lo.abs() <= eps {
            found.push((GuardCondition::ThetaNpiZ0, -Vector3::z()));
        } else if z_hi.abs() <= eps {
            found.push((GuardCondition::ThetaNpiZ0, Vector3::z()));
        }
        if (r_hi - x).abs() <= eps {
            found.push((GuardCondition::ThetaNpiREqX, Vector3::x()));
        } else if r_lo > 0.0 && (r_lo - x).abs() <= eps {
            found.push((GuardCondition::ThetaNpiREqX, -Vector3::x()));
        }
    }

    let in_z = z_lo - eps <= 0.0 && 0.0 <= z_hi + eps;
    let in_r = r_lo - eps <= x && x <= r_hi + eps;
    let ang_slack = tol.eps_ang + eps / x;
    let in_th = contains_2npi(th_lo, th_hi, ang_slack);
    let mut faces = Vec::new();
    if in_th && in_z {
        if (x - r_hi).abs() <= eps {
            faces.push(Vector3::x());
        }
        if r_lo > 0.0 && (x - r_lo).abs() <= eps {
            faces.push(-Vector3::x());
        }
    }
    if in_th && in_r {
        if z_lo.abs() <= eps {
            faces.push(-Vector3::z());
        }
        if z_hi.abs() <= eps {
            faces.push(Vector3::z());
        }
    }
    if th_hi - th_lo < TAU - tol.eps_ang && in_r && in_z {
        if near_2npi(th_lo, ang_slack) {
            faces.push(-Vector3::y());
        }
        if near_2npi(th_hi, ang_slack) {
            faces.push(Vector3::y());
        }
    }
    found.extend(faces.into_iter().map(|d| (GuardCondition::OnFace, d)));
    found
}

/// [`singularity_guard_with`] using the default tolerances for `args`.
pub fn singularity_guard(
    point: &CanonicalPoint,
    args: &CanonicalArgs,
) -> (CanonicalPoint, CanonicalArgs, GuardReport) {
    singularity_guard_with(point, args, &GuardTolerances::for_args(args))
}

/// Moves the evaluation point by `eps_nudge` away from any singular locus
/// or tile face it lies on, re-checking after each move.
///
/// Directions from all loci hit in one round are combined into a single
/// step so that a point on an edge leaves both faces at once.
pub fn singularity_guard_with(
    point: &CanonicalPoint,
    args: &CanonicalArgs,
    tol: &GuardTolerances,
) -> (CanonicalPoint, CanonicalArgs, GuardReport) {
    let mut cp = *point;
    let mut a = *args;
    let mut report = GuardReport::pass_through();

    for _ in 0..MAX_ROUNDS {
        let found = detect(&a, tol);
        let Some(&(first, first_dir)) = found.first() else {
            break;
        };
        report.triggered = true;
        report.condition.get_or_insert(first);

        let sum: Vector3<f64> = found.iter().map(|(_, d)| d).sum();
        let dir = if sum.norm() > 1e-12 { sum.normalize() } else { first_dir };
        let step = dir * tol.eps_nudge;

        let moved = Vector3::new(a.x, 0.0, 0.0) + step;
        let dpsi = if first == GuardCondition::XZero && a.x == 0.0 {
            dir.y.atan2(dir.x)
        } else {
            moved.y.atan2(moved.x)
        };
        report.nudge_applied += rotation_z(cp.psi) * step;

        a.x = moved.x.hypot(moved.y);
        a.th_lo -= dpsi;
        a.th_hi -= dpsi;
        a.z_lo -= step.z;
        a.z_hi -= step.z;
        cp.x_c = a.x;
        cp.psi += dpsi;
        cp.z_shift += step.z;
    }
    (cp, a, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(x: f64, th: (f64, f64), z: (f64, f64)) -> CanonicalArgs {
        CanonicalArgs {
            x,
            r_lo: 1.0,
            r_hi: 2.0,
            th_lo: th.0,
            th_hi: th.1,
            z_lo: z.0,
            z_hi: z.1,
        }
    }

    fn origin(x: f64) -> CanonicalPoint {
        CanonicalPoint {
            x_c: x,
            psi: 0.0,
            z_shift: 0.0,
        }
    }

    #[test]
    fn axis_point_is_moved_off_axis() {
        let a = args(0.0, (0.2, 0.8), (-1.0, 1.0));
        let (cp, out, rep) = singularity_guard(&origin(0.0), &a);
        let tol = GuardTolerances::for_args(&a);
        assert!(rep.triggered);
        assert_eq!(rep.condition, Some(GuardCondition::XZero));
        assert!((out.x - tol.eps_nudge).abs() < 1e-20);
        assert!((cp.x_c - tol.eps_nudge).abs() < 1e-20);
        assert!((rep.nudge_applied.norm() - tol.eps_nudge).abs() < 1e-20);
    }

    #[test]
    fn theta_zero_with_z_zero_moves_in_z() {
        let a = args(3.0, (0.0, 0.8), (0.0, 1.0));
        let (_, out, rep) = singularity_guard(&origin(3.0), &a);
        assert_eq!(rep.condition, Some(GuardCondition::ThetaNpiZ0));
        assert!(out.z_lo > 0.0);
        assert!(rep.nudge_applied.x == 0.0 && rep.nudge_applied.z < 0.0);
    }

    #[test]
    fn solid_tile_axis_clearance_is_at_least_one_nudge() {
        let mut a = args(0.0, (0.2, 0.8), (-1.0, 1.0));
        a.r_lo = 0.0;
        let tol = GuardTolerances::for_args(&a);
        a.x = 0.3 * tol.eps_nudge;
        let (_, out, rep) = singularity_guard(&origin(a.x), &a);
        assert_eq!(rep.condition, Some(GuardCondition::XZero));
        assert!(out.x >= tol.eps_nudge * (1.0 - 1e-12));
    }

    #[test]
    fn generic_point_passes_through() {
        let a = args(3.0, (0.3, 0.8), (-1.0, 1.0));
        let (cp, out, rep) = singularity_guard(&origin(3.0), &a);
        assert!(!rep.triggered);
        assert_eq!(out, a);
        assert_eq!(cp, origin(3.0));
    }

    #[test]
    fn side_face_point_moves_outward() {
        let a = args(1.5, (0.0, 0.8), (-1.0, 1.0));
        let (_, out, rep) = singularity_guard(&origin(1.5), &a);
        assert_eq!(rep.condition, Some(GuardCondition::OnFace));
        assert!(out.th_lo > 0.0);
    }

    #[test]
    fn edge_point_leaves_both_faces() {
        let a = args(2.0, (-0.5, 0.5), (0.0, 1.0));
        let (_, out, rep) = singularity_guard(&origin(2.0), &a);
        assert!(rep.triggered);
        assert!(out.x > 2.0 && out.z_lo > 0.0);
        let tol = GuardTolerances::for_args(&a);
        assert!(rep.nudge_applied.norm() <= 1.0001 * tol.eps_nudge);
    }
}
