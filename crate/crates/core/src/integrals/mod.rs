//! Surface integrals of the kernel gradient in the canonical frame, where
//! the evaluation point sits at `(x, 0, 0)`.
//!
//! Arc-surface integrals (`𝒜 𝒟 ℰ 𝒢 ℐ 𝒥`) run over `θ′ × z′` at fixed `r_s`,
//! side-surface integrals (`ℬ ℱ ℋ`) over `r′ × z′` at fixed `θ_s`, and
//! end-surface integrals (`𝒞 𝒦 ℒ`) over `r′ × θ′` at fixed `z_s`. All of
//! them return definite values over the limits held in [`CanonicalArgs`].
//!
//! The elliptic antiderivatives are evaluated through Carlson forms with
//! `sin φ = cos(θ′/2)` and `cos φ = |sin(θ′/2)|` taken directly from the
//! half angle. Terms whose `F` contributions cancel identically are written
//! in their reduced form.

mod guard;

pub use guard::{
    singularity_guard, singularity_guard_with, GuardCondition, GuardReport, GuardTolerances,
};

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::quadrature::{try_integrate_breaks, QuadratureError, QuadratureSpec};
use crate::special::{carlson_rd, carlson_rf, carlson_rj, EllipticError};

/// Integration limits after translation and rotation, plus the radial
/// coordinate of the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalArgs {
    pub x: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub th_lo: f64,
    pub th_hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("{term}: {source}")]
    Elliptic {
        term: &'static str,
        #[source]
        source: EllipticError,
    },
    #[error("{term}: {source}")]
    Quadrature {
        term: &'static str,
        #[source]
        source: QuadratureError,
    },
    #[error("{term}: logarithm or atanh argument at its branch point ({value:e})")]
    Domain { term: &'static str, value: f64 },
    #[error("{term}: non-finite result")]
    NonFinite { term: &'static str },
}

type Result<T> = std::result::Result<T, IntegralError>;

// ---------------------------------------------------------------------------
// Helper functions

/// `𝔸 = √(r² − 2xr cosθ + x² + z²)`, evaluated as
/// `√((r − x)² + 4xr sin²(θ/2) + z²)` so the radicand cannot go negative
/// for non-negative `r`, `x`.
pub fn helper_a(r: f64, x: f64, theta: f64, z: f64) -> f64 {
    let h = (0.5 * theta).sin();
    let rad = (r - x) * (r - x) + 4.0 * x * r * h * h + z * z;
    rad.max(0.0).sqrt()
}

/// `𝔹 = x²(cos²θ − 1) − z²`.
pub fn helper_b(x: f64, theta: f64, z: f64) -> f64 {
    let s = theta.sin();
    -(x * x * s * s + z * z)
}

/// `ℂ = 4rx / (r + x)²`.
pub fn helper_c(r: f64, x: f64) -> f64 {
    4.0 * r * x / ((r + x) * (r + x))
}

/// `𝔻 = cos(θ/2)`.
pub fn helper_d(theta: f64) -> f64 {
    (0.5 * theta).cos()
}

/// `𝔼 = 2√(rx / ((r + x)² + z²))`.
pub fn helper_e(r: f64, x: f64, z: f64) -> f64 {
    2.0 * (r * x / ((r + x) * (r + x) + z * z)).sqrt()
}

/// `(𝔽₊, 𝔽₋) = ((𝔸 ± r) / √(x² + z²))`.
pub fn helper_f_pm(r: f64, x: f64, theta: f64, z: f64) -> (f64, f64) {
    let a = helper_a(r, x, theta, z);
    let q = x.hypot(z);
    ((a + r) / q, (a - r) / q)
}

// ---------------------------------------------------------------------------
// Shared kinematics

/// `u = r − x cosθ`, `c² = x² sin²θ + z²`, `𝔸 = √(u² + c²)`.
#[derive(Clone, Copy)]
struct Kin {
    u: f64,
    a: f64,
}

fn kin(r: f64, x: f64, cos_t: f64, c2: f64) -> Kin {
    let u = r - x * cos_t;
    Kin {
        u,
        a: (u * u + c2).sqrt(),
    }
}

/// Differences in `r` of the building blocks `1/𝔸`, `u/𝔸`, `𝔸` and
/// `ln(u + 𝔸)` at fixed `θ` and `z`, arranged to avoid cancellation.
struct RadialDiff {
    lo: Kin,
    hi: Kin,
    c2: f64,
    /// `u_hi² − u_lo²`, which equals `𝔸_hi² − 𝔸_lo²`.
    du2: f64,
}

impl RadialDiff {
    fn new(x: f64, theta: f64, z: f64, r_lo: f64, r_hi: f64) -> Self {
        let (sin_t, cos_t) = theta.sin_cos();
        let c2 = x * x * sin_t * sin_t + z * z;
        RadialDiff {
            lo: kin(r_lo, x, cos_t, c2),
            hi: kin(r_hi, x, cos_t, c2),
            c2,
            du2: (r_hi - r_lo) * (r_hi + r_lo - 2.0 * x * cos_t),
        }
    }

    /// `1/𝔸_hi − 1/𝔸_lo`.
    fn inv_a(&self) -> f64 {
        let (a1, a2) = (self.lo.a, self.hi.a);
        -self.du2 / (a1 * a2 * (a1 + a2))
    }

    /// `𝔸_hi − 𝔸_lo`.
    fn a(&self) -> f64 {
        self.du2 / (self.lo.a + self.hi.a)
    }

    /// `(u_hi/𝔸_hi − u_lo/𝔸_lo) / c²`.
    fn u_over_a_c2(&self) -> f64 {
        let (Kin { u: u1, a: a1 }, Kin { u: u2, a: a2 }) = (self.lo, self.hi);
        let den = u1 * a2 + u2 * a1;
        if u1 * u2 >= 0.0 && den != 0.0 {
            self.du2 / (a1 * a2 * den)
        } else {
            (u2 / a2 - u1 / a1) / self.c2
        }
    }

    /// `u_hi/𝔸_hi − u_lo/𝔸_lo`.
    fn u_over_a(&self) -> f64 {
        let (Kin { u: u1, a: a1 }, Kin { u: u2, a: a2 }) = (self.lo, self.hi);
        if u1 * u2 >= 0.0 {
            self.c2 * self.u_over_a_c2()
        } else {
            u2 / a2 - u1 / a1
        }
    }

    /// `ln(u_hi + 𝔸_hi) − ln(u_lo + 𝔸_lo)`, using `u + 𝔸 = c²/(𝔸 − u)` for
    /// negative `u`.
    fn ln_u_plus_a(&self) -> Option<f64> {
        let (Kin { u: u1, a: a1 }, Kin { u: u2, a: a2 }) = (self.lo, self.hi);
        match (u1 >= 0.0, u2 >= 0.0) {
            (true, true) => Some(((u2 + a2) / (u1 + a1)).ln()),
            (false, false) => Some(((a1 - u1) / (a2 - u2)).ln()),
            (false, true) if self.c2 > 0.0 => Some((u2 + a2).ln() + (a1 - u1).ln() - self.c2.ln()),
            (true, false) if self.c2 > 0.0 => Some(self.c2.ln() - (a2 - u2).ln() - (u1 + a1).ln()),
            _ => None,
        }
    }
}

/// `atanh(z/𝔸)` as `sgn(z)·ln((𝔸 + |z|)/a)` with `a² = 𝔸² − z²`.
fn atanh_z_over_a(term: &'static str, z: f64, a_full: f64, a_plane: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    if !(a_plane > 0.0) {
        return Err(IntegralError::Domain { term, value: 1.0 });
    }
    Ok(z.signum() * ((a_full + z.abs()) / a_plane).ln())
}

/// Multiples of `step` lying strictly inside `(lo, hi)`.
fn interior_multiples(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let first = (lo / step).floor() as i64 + 1;
    let last = (hi / step).ceil() as i64 - 1;
    (first..=last)
        .map(move |n| n as f64 * step)
        .filter(move |&t| t > lo && t < hi)
}

fn breaks_with(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut v = vec![lo];
    v.extend(interior_multiples(lo, hi, step));
    v.push(hi);
    v
}

fn split_at_zero(lo: f64, hi: f64) -> Vec<f64> {
    if lo < 0.0 && hi > 0.0 {
        vec![lo, 0.0, hi]
    } else {
        vec![lo, hi]
    }
}

fn check(term: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(IntegralError::NonFinite { term })
    }
}

// ---------------------------------------------------------------------------
// Arc surfaces (θ′, z′)

/// Definite difference over `[th_lo, th_hi]` of an antiderivative carrying
/// `sgn(sin(θ/2))`. The interval is split at multiples of 2π and each piece
/// is evaluated with the sign it takes in its interior.
fn theta_pieces<G>(lo: f64, hi: f64, mut g: G) -> Result<f64>
where
    G: FnMut(f64, f64) -> Result<f64>,
{
    if !(hi > lo) {
        return Ok(0.0);
    }
    let pts = breaks_with(lo, hi, TAU);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let sg = (0.25 * (w[0] + w[1])).sin().signum();
        total += g(w[1], sg)? - g(w[0], sg)?;
    }
    Ok(total)
}

/// Carlson data of the arc antiderivatives at one `(θ, z)`.
struct ArcEll {
    s: f64,
    q: f64,
    nc: f64,
    rf: f64,
    rd: f64,
    c2: f64,
    delta2: f64,
}

impl ArcEll {
    fn new(term: &'static str, r: f64, x: f64, theta: f64, z: f64) -> Result<Self> {
        let (c, s) = (0.5 * theta).sin_cos();
        let c2 = c * c;
        let q2 = (r + x) * (r + x) + z * z;
        let kc2 = ((r - x) * (r - x) + z * z) / q2;
        let delta2 = c2 + kc2 * s * s;
        if !(delta2 > 0.0) {
            return Err(IntegralError::Elliptic {
                term,
                source: EllipticError::Modulus { value: 1.0 },
            });
        }
        let ratio = (r - x) / (r + x);
        Ok(ArcEll {
            s,
            q: q2.sqrt(),
            nc: ratio * ratio,
            rf: carlson_rf(c2, delta2, 1.0),
            rd: carlson_rd(c2, delta2, 1.0),
            c2,
            delta2,
        })
    }

    /// `R_J(cos²φ, Δ², 1, 1 − n sin²φ)`.
    fn rj(&self, term: &'static str) -> Result<f64> {
        let p = self.c2 + self.nc * self.s * self.s;
        if !(p > 0.0) {
            return Err(IntegralError::Elliptic {
                term,
                source: EllipticError::Characteristic { value: 1.0 },
            });
        }
        Ok(carlson_rj(self.c2, self.delta2, 1.0, p))
    }
}

/// Closed-form θ′ × z′ double difference for an arc integral whose
/// antiderivative `g(θ, z, sgn)` carries the half-angle sign.
fn arc_elliptic<G>(args: &CanonicalArgs, mut g: G) -> Result<f64>
where
    G: FnMut(f64, f64, f64) -> Result<f64>,
{
    if !(args.z_hi > args.z_lo) {
        return Ok(0.0);
    }
    let hi = theta_pieces(args.th_lo, args.th_hi, |t, sg| g(t, args.z_hi, sg))?;
    let lo = theta_pieces(args.th_lo, args.th_hi, |t, sg| g(t, args.z_lo, sg))?;
    Ok(hi - lo)
}

/// θ′ and z′ factors of the arc integrals on a surface of zero radius, where
/// the kernel no longer depends on θ′.
struct AxisLimit {
    sin_int: f64,
    cos_int: f64,
    zx: f64,
    zz: f64,
}

fn axis_limit(args: &CanonicalArgs) -> AxisLimit {
    let x = args.x;
    let rho = |z: f64| x.hypot(z);
    AxisLimit {
        sin_int: args.th_lo.cos() - args.th_hi.cos(),
        cos_int: args.th_hi.sin() - args.th_lo.sin(),
        zx: -(args.z_hi / (x * rho(args.z_hi)) - args.z_lo / (x * rho(args.z_lo))),
        zz: -(1.0 / rho(args.z_hi) - 1.0 / rho(args.z_lo)),
    }
}

fn degenerate_arc(args: &CanonicalArgs) -> bool {
    !(args.th_hi > args.th_lo) || !(args.z_hi > args.z_lo)
}

/// `𝒜(r_s) = ∫∫ sinθ′ ∂D/∂y dz′ dθ′`.
pub fn integral_a(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "A";
    if degenerate_arc(args) || r_s == 0.0 {
        return Ok(0.0);
    }
    let x = args.x;
    let v = arc_elliptic(args, |t, z, sg| {
        if z == 0.0 {
            return Ok(0.0);
        }
        let e = ArcEll::new(T, r_s, x, t, z)?;
        let rj = if e.nc > 0.0 { e.nc * e.rj(T)? } else { 0.0 };
        let s3 = e.s * e.s * e.s;
        Ok(2.0 * z * s3 * sg / (3.0 * x * e.q) * (rj - e.rd))
    })?;
    check(T, v)
}

/// `ℰ(r_s) = ∫∫ cosθ′ ∂D/∂z dz′ dθ′`.
pub fn integral_e(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "E";
    if degenerate_arc(args) {
        return Ok(0.0);
    }
    if r_s == 0.0 {
        let l = axis_limit(args);
        return check(T, l.cos_int * l.zz);
    }
    let x = args.x;
    let v = arc_elliptic(args, |t, z, sg| {
        let e = ArcEll::new(T, r_s, x, t, z)?;
        let s3 = e.s * e.s * e.s;
        Ok(-2.0 * sg / e.q * (e.s * e.rf - 2.0 / 3.0 * s3 * e.rd))
    })?;
    check(T, v)
}

/// `ℐ(r_s) = ∫∫ cosθ′ ∂D/∂x dz′ dθ′`.
pub fn integral_i(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "I";
    if degenerate_arc(args) {
        return Ok(0.0);
    }
    if r_s == 0.0 {
        let l = axis_limit(args);
        return check(T, l.cos_int * l.zx);
    }
    let x = args.x;
    let sum = r_s + x;
    let pi_coef = (r_s - x) * (r_s * r_s + x * x) / (sum * sum);
    let v = arc_elliptic(args, |t, z, sg| {
        if z == 0.0 {
            return Ok(0.0);
        }
        let e = ArcEll::new(T, r_s, x, t, z)?;
        let rj = if pi_coef != 0.0 { pi_coef * e.rj(T)? } else { 0.0 };
        let s3 = e.s * e.s * e.s;
        let bracket = 2.0 * e.s * e.rf + 2.0 * s3 / (3.0 * x) * (rj - sum * e.rd);
        Ok(-sg * z / (sum * e.q) * bracket)
    })?;
    check(T, v)
}

/// Shared body of `𝒟` and `𝒢`:
/// `(1/r_s)(1/4x²)[(r_s² + σx²)(−2 atanh(z/𝔸)) − 2z𝔸]` over the corners.
fn arc_log(term: &'static str, r_s: f64, args: &CanonicalArgs, sigma: f64) -> Result<f64> {
    let x = args.x;
    let coef = r_s * r_s + sigma * x * x;
    let corner = |t: f64, z: f64| -> Result<f64> {
        let (sin_t, cos_t) = t.sin_cos();
        let u = r_s - x * cos_t;
        let a_plane = (u * u + x * x * sin_t * sin_t).sqrt();
        let a_full = helper_a(r_s, x, t, z);
        Ok(-2.0 * coef * atanh_z_over_a(term, z, a_full, a_plane)?)
    };
    // The −2z𝔸 part: θ-difference of 𝔸 written without cancellation.
    let a_part = |z: f64| {
        let a_lo = helper_a(r_s, x, args.th_lo, z);
        let a_hi = helper_a(r_s, x, args.th_hi, z);
        let dcos = -2.0 * (0.5 * (args.th_hi + args.th_lo)).sin() * (0.5 * (args.th_hi - args.th_lo)).sin();
        -2.0 * z * (-2.0 * x * r_s * dcos / (a_lo + a_hi))
    };
    let mut v = 0.0;
    for (z, sign) in [(args.z_hi, 1.0), (args.z_lo, -1.0)] {
        let d = corner(args.th_hi, z)? - corner(args.th_lo, z)? + a_part(z);
        v += sign * d;
    }
    check(term, v / (4.0 * x * x * r_s))
}

/// `𝒟(r_s) = ∫∫ cosθ′ ∂D/∂y dz′ dθ′`.
pub fn integral_d(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    if degenerate_arc(args) || r_s == 0.0 {
        return Ok(0.0);
    }
    arc_log("D", r_s, args, 1.0)
}

/// `𝒢(r_s) = ∫∫ sinθ′ ∂D/∂x dz′ dθ′`.
pub fn integral_g(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    if degenerate_arc(args) {
        return Ok(0.0);
    }
    if r_s == 0.0 {
        let l = axis_limit(args);
        return check("G", l.sin_int * l.zx);
    }
    arc_log("G", r_s, args, -1.0)
}

/// `𝒥(r_s) = ∫∫ sinθ′ ∂D/∂z dz′ dθ′`, from the antiderivative `−𝔸/(r_s x)`.
pub fn integral_j(r_s: f64, args: &CanonicalArgs) -> Result<f64> {
    if degenerate_arc(args) {
        return Ok(0.0);
    }
    let x = args.x;
    let dcos = -2.0 * (0.5 * (args.th_hi + args.th_lo)).sin() * (0.5 * (args.th_hi - args.th_lo)).sin();
    let theta_diff = |z: f64| {
        let a_lo = helper_a(r_s, x, args.th_lo, z);
        let a_hi = helper_a(r_s, x, args.th_hi, z);
        2.0 * dcos / (a_lo + a_hi)
    };
    check("J", theta_diff(args.z_hi) - theta_diff(args.z_lo))
}

// ---------------------------------------------------------------------------
// Side surfaces (r′, z′)

fn degenerate_side(args: &CanonicalArgs) -> bool {
    !(args.r_hi > args.r_lo) || !(args.z_hi > args.z_lo)
}

/// `ℬ(θ_s) = ∫∫ ∂D/∂y dr′ dz′`.
pub fn integral_b(theta_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "B";
    let (sin_t, cos_t) = theta_s.sin_cos();
    if degenerate_side(args) || sin_t == 0.0 {
        return Ok(0.0);
    }
    let x = args.x;
    let corner = |r: f64, z: f64| -> Result<f64> {
        let u = r - x * cos_t;
        let a_plane = (u * u + x * x * sin_t * sin_t).sqrt();
        let a_full = a_plane.hypot(z);
        let at = (z * u / (sin_t * x * a_full)).atan();
        Ok(at * cos_t - atanh_z_over_a(T, z, a_full, a_plane)? * sin_t)
    };
    let v = corner(args.r_hi, args.z_hi)? - corner(args.r_lo, args.z_hi)? - corner(args.r_hi, args.z_lo)?
        + corner(args.r_lo, args.z_lo)?;
    check(T, v)
}

/// `ℱ(θ_s) = ∫∫ ∂D/∂z dr′ dz′`, from the antiderivative `−ln(u + 𝔸)`.
pub fn integral_f(theta_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "F";
    if degenerate_side(args) {
        return Ok(0.0);
    }
    let mut v = 0.0;
    for (z, sign) in [(args.z_hi, 1.0), (args.z_lo, -1.0)] {
        let d = RadialDiff::new(args.x, theta_s, z, args.r_lo, args.r_hi);
        let ln = d.ln_u_plus_a().ok_or(IntegralError::Domain { term: T, value: 0.0 })?;
        v -= sign * ln;
    }
    check(T, v)
}

/// `ℋ(θ_s) = ∫∫ ∂D/∂x dr′ dz′`: the `r′` antiderivative is taken in closed
/// form and the `z′` integral numerically.
pub fn integral_h(theta_s: f64, args: &CanonicalArgs, spec: &QuadratureSpec) -> Result<f64> {
    const T: &str = "H";
    if degenerate_side(args) {
        return Ok(0.0);
    }
    let x = args.x;
    let (sin_t, cos_t) = theta_s.sin_cos();
    let xs2 = x * sin_t * sin_t;
    let f = |z: f64| -> std::result::Result<f64, QuadratureError> {
        let d = RadialDiff::new(x, theta_s, z, args.r_lo, args.r_hi);
        let mut v = -cos_t * d.inv_a();
        if xs2 != 0.0 {
            v -= xs2 * d.u_over_a_c2();
        }
        Ok(v)
    };
    let est = try_integrate_breaks(f, &split_at_zero(args.z_lo, args.z_hi), spec)
        .map_err(|source| IntegralError::Quadrature { term: T, source })?;
    check(T, est.value)
}

// ---------------------------------------------------------------------------
// End surfaces (r′, θ′)

fn degenerate_end(args: &CanonicalArgs) -> bool {
    !(args.r_hi > args.r_lo) || !(args.th_hi > args.th_lo)
}

/// `𝒞(z_s) = ∫∫ ∂D/∂z r′ dr′ dθ′`: closed form in `r′`, numeric in `θ′`.
pub fn integral_c(z_s: f64, args: &CanonicalArgs, spec: &QuadratureSpec) -> Result<f64> {
    const T: &str = "C";
    if degenerate_end(args) || z_s == 0.0 {
        return Ok(0.0);
    }
    let x = args.x;
    let f = |t: f64| -> std::result::Result<f64, QuadratureError> {
        let d = RadialDiff::new(x, t, z_s, args.r_lo, args.r_hi);
        Ok(z_s * (x * t.cos() * d.u_over_a_c2() - d.inv_a()))
    };
    let est = try_integrate_breaks(f, &breaks_with(args.th_lo, args.th_hi, PI), spec)
        .map_err(|source| IntegralError::Quadrature { term: T, source })?;
    check(T, est.value)
}

/// `𝒦(z_s) = ∫∫ ∂D/∂x r′ dr′ dθ′`: closed form in `r′`, numeric in `θ′`.
pub fn integral_k(z_s: f64, args: &CanonicalArgs, spec: &QuadratureSpec) -> Result<f64> {
    const T: &str = "K";
    if degenerate_end(args) {
        return Ok(0.0);
    }
    let x = args.x;
    let f = |t: f64| -> std::result::Result<f64, QuadratureError> {
        let (sin_t, cos_t) = t.sin_cos();
        let d = RadialDiff::new(x, t, z_s, args.r_lo, args.r_hi);
        let ln = d.ln_u_plus_a().unwrap_or(f64::NAN);
        let cos2 = (cos_t - sin_t) * (cos_t + sin_t);
        Ok(cos_t * ln
            - cos_t * d.u_over_a()
            - x * cos2 * d.inv_a()
            - x * x * sin_t * sin_t * cos_t * d.u_over_a_c2())
    };
    let est = try_integrate_breaks(f, &breaks_with(args.th_lo, args.th_hi, PI), spec)
        .map_err(|source| IntegralError::Quadrature { term: T, source })?;
    check(T, est.value)
}

/// `ℒ(z_s) = ∫∫ ∂D/∂y r′ dr′ dθ′`, from the antiderivative
/// `−(1/x)[𝔸 + x cosθ′ ln(r′ − x cosθ′ + 𝔸)]`.
pub fn integral_l(z_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "L";
    if degenerate_end(args) {
        return Ok(0.0);
    }
    let x = args.x;
    let radial = |t: f64| -> Result<f64> {
        let d = RadialDiff::new(x, t, z_s, args.r_lo, args.r_hi);
        let ln = d.ln_u_plus_a().ok_or(IntegralError::Domain { term: T, value: 0.0 })?;
        Ok(-(d.a() / x + t.cos() * ln))
    };
    check(T, radial(args.th_hi)? - radial(args.th_lo)?)
}

/// `ℒ(z_s)` from the expanded antiderivative with `𝔽±`. Only defined for
/// `r_lo > 0`; the real part of `atanh` is used since `𝔽₊ > 1`.
pub fn integral_l_expanded(z_s: f64, args: &CanonicalArgs) -> Result<f64> {
    const T: &str = "L";
    if degenerate_end(args) {
        return Ok(0.0);
    }
    if !(args.r_lo > 0.0) {
        return Err(IntegralError::Domain { term: T, value: args.r_lo });
    }
    let x = args.x;
    let q2 = x * x + z_s * z_s;
    let q = q2.sqrt();
    let re_atanh = |v: f64| 0.5 * ((1.0 + v) / (1.0 - v)).abs().ln();
    let g = |r: f64, t: f64| {
        let a = helper_a(r, x, t, z_s);
        let (fp, fm) = helper_f_pm(r, x, t, z_s);
        let cos_t = t.cos();
        let p = r * r + x * x + z_s * z_s;
        let l = (r - x * cos_t + a).ln();
        let inner = -p * (r.ln() + l) + a * a * l - 2.0 * r * a - p * 2f64.ln() + 2.0 * r * x * cos_t - p;
        (2.0 * r * q2 * (re_atanh(fp) - re_atanh(fm)) + q * inner) / (2.0 * r * x * q)
    };
    let v = g(args.r_hi, args.th_hi) - g(args.r_lo, args.th_hi) - g(args.r_hi, args.th_lo) + g(args.r_lo, args.th_lo);
    check(T, v)
}
