//! Incomplete elliptic integrals via Carlson's symmetric forms.
//!
//! Argument convention used throughout the crate: the first argument `u` is
//! the *sine* of the amplitude, `u = sin φ`, and `k` is the modulus, so that
//!
//! ```text
//! F(u, k)    = ∫₀^φ dθ / √(1 − k² sin²θ)
//! E(u, k)    = ∫₀^φ √(1 − k² sin²θ) dθ
//! Π(u, n, k) = ∫₀^φ dθ / ((1 − n sin²θ) √(1 − k² sin²θ))
//! ```
//!
//! with `φ = asin(u) ∈ [−π/2, π/2]`. Negative `u` gives the odd extension.
//!
//! [`Amplitude`] takes `sin φ`, `cos φ` and the complementary quantities
//! directly so callers that know them in closed form avoid the cancellation
//! in `1 − k² sin²φ`.

use thiserror::Error;

/// Slack allowed on domain boundaries before reporting an error.
const DOMAIN_SLACK: f64 = 1e-12;

/// Relative tolerance driving the duplication loops.
const DUPLICATION_TOL: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("sine of amplitude {u} is outside [-1, 1]")]
    Amplitude { u: f64 },
    #[error("k² sin²φ = {value} exceeds 1")]
    Modulus { value: f64 },
    #[error("n sin²φ = {value} reaches 1; the third-kind integral diverges")]
    Characteristic { value: f64 },
    #[error("non-finite argument")]
    NonFinite,
}

/// Carlson's R_F(x, y, z) for non-negative arguments, at most one zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let mut a = a0;
    let mut q = (3.0 * DUPLICATION_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut pow4 = 1.0;
    while q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        q *= 0.25;
        pow4 *= 0.25;
    }
    let dx = (a0 - x0) * pow4 / a;
    let dy = (a0 - y0) * pow4 / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's R_D(x, y, z) = R_J(x, y, z, z); `z > 0`, at most one of `x, y` zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let mut a = a0;
    let mut q = (0.25 * DUPLICATION_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut pow4 = 1.0;
    let mut sum = 0.0;
    while q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        sum += pow4 / (sz * (z + lambda));
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        q *= 0.25;
        pow4 *= 0.25;
    }
    let dx = (a0 - x0) * pow4 / a;
    let dy = (a0 - y0) * pow4 / a;
    let dz = -(dx + dy) / 3.0;
    let xy = dx * dy;
    let z2 = dz * dz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * dz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * dz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    pow4 * series / (a * a.sqrt()) + 3.0 * sum
}

/// Carlson's degenerate R_C(x, y) for `x >= 0`, `y > 0`.
pub fn carlson_rc(x: f64, y: f64) -> f64 {
    if x == y {
        return 1.0 / x.sqrt();
    }
    // R_C(x, y) = R_C(1, 1 + t) / √x with t = y/x − 1; small-t series avoids
    // the 0/0 in the closed forms.
    if x > 0.0 {
        let t = y / x - 1.0;
        if t.abs() < 1e-4 {
            let series = 1.0 - t / 3.0 + t * t / 5.0 - t * t * t / 7.0 + t.powi(4) / 9.0;
            return series / x.sqrt();
        }
    }
    if x < y {
        (x / y).sqrt().acos() / (y - x).sqrt()
    } else {
        (x / y).sqrt().acosh() / (x - y).sqrt()
    }
}

/// Carlson's R_J(x, y, z, p) for non-negative `x, y, z` (at most one zero)
/// and `p > 0`.
pub fn carlson_rj(x: f64, y: f64, z: f64, p: f64) -> f64 {
    let (x0, y0, z0, p0) = (x, y, z, p);
    let (mut x, mut y, mut z, mut p) = (x, y, z, p);
    let a0 = (x + y + z + 2.0 * p) / 5.0;
    let mut a = a0;
    let mut q = (0.25 * DUPLICATION_TOL).powf(-1.0 / 6.0)
        * (a0 - x)
            .abs()
            .max((a0 - y).abs())
            .max((a0 - z).abs())
            .max((a0 - p).abs());
    let delta = (p0 - x0) * (p0 - y0) * (p0 - z0);
    let mut pow4 = 1.0;
    let mut sum = 0.0;
    while q >= a.abs() {
        let (sx, sy, sz, sp) = (x.sqrt(), y.sqrt(), z.sqrt(), p.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        let d = (sp + sx) * (sp + sy) * (sp + sz);
        let e = delta * pow4 * pow4 * pow4 / (d * d);
        sum += pow4 * carlson_rc(1.0, 1.0 + e) / d;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        p = 0.25 * (p + lambda);
        a = 0.25 * (a + lambda);
        q *= 0.25;
        pow4 *= 0.25;
    }
    let dx = (a0 - x0) * pow4 / a;
    let dy = (a0 - y0) * pow4 / a;
    let dz = (a0 - z0) * pow4 / a;
    let dp = -(dx + dy + dz) / 2.0;
    let e2 = dx * dy + dx * dz + dy * dz - 3.0 * dp * dp;
    let e3 = dx * dy * dz + 2.0 * e2 * dp + 4.0 * dp * dp * dp;
    let e4 = (2.0 * dx * dy * dz + e2 * dp + 3.0 * dp * dp * dp) * dp;
    let e5 = dx * dy * dz * dp * dp;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    pow4 * series / (a * a.sqrt()) + 6.0 * sum
}

/// Trigonometric data of an amplitude φ together with the complementary
/// quantity `Δ² = 1 − k² sin²φ`, all supplied by the caller.
#[derive(Debug, Clone, Copy)]
pub struct Amplitude {
    /// sin φ
    pub s: f64,
    /// cos φ, non-negative
    pub c: f64,
    /// k²
    pub k2: f64,
    /// 1 − k² sin²φ
    pub delta2: f64,
}

impl Amplitude {
    /// Builds the amplitude data from `u = sin φ` and the modulus `k`.
    pub fn from_sine(u: f64, k: f64) -> Result<Self, EllipticError> {
        if !(u.is_finite() && k.is_finite()) {
            return Err(EllipticError::NonFinite);
        }
        if u.abs() > 1.0 + DOMAIN_SLACK {
            return Err(EllipticError::Amplitude { u });
        }
        let s = u.clamp(-1.0, 1.0);
        let k2 = k * k;
        let ks2 = k2 * s * s;
        if ks2 > 1.0 + DOMAIN_SLACK {
            return Err(EllipticError::Modulus { value: ks2 });
        }
        Ok(Amplitude {
            s,
            c: ((1.0 - s) * (1.0 + s)).sqrt(),
            k2,
            delta2: (1.0 - ks2).max(0.0),
        })
    }

    fn rf(&self) -> f64 {
        carlson_rf(self.c * self.c, self.delta2, 1.0)
    }

    /// F(φ, k).
    pub fn first_kind(&self) -> f64 {
        if self.s == 0.0 {
            return 0.0;
        }
        self.s * self.rf()
    }

    /// E(φ, k).
    pub fn second_kind(&self) -> f64 {
        if self.s == 0.0 {
            return 0.0;
        }
        let s3 = self.s * self.s * self.s;
        let mut e = self.s * self.rf();
        if self.k2 != 0.0 {
            e -= self.k2 * s3 * carlson_rd(self.c * self.c, self.delta2, 1.0) / 3.0;
        }
        e
    }

    /// `R_D(cos²φ, Δ², 1)`; the combination `sin³φ · R_D` appears directly in
    /// several antiderivatives.
    pub fn rd(&self) -> f64 {
        carlson_rd(self.c * self.c, self.delta2, 1.0)
    }

    /// `R_J(cos²φ, Δ², 1, p)` with `p = 1 − n sin²φ` supplied by the caller.
    pub fn rj(&self, p: f64) -> f64 {
        carlson_rj(self.c * self.c, self.delta2, 1.0, p)
    }

    /// Π(n; φ, k) given `p = 1 − n sin²φ` computed by the caller.
    pub fn third_kind(&self, n: f64, p: f64) -> Result<f64, EllipticError> {
        if self.s == 0.0 {
            return Ok(0.0);
        }
        if p <= 0.0 {
            return Err(EllipticError::Characteristic { value: 1.0 - p });
        }
        let mut v = self.s * self.rf();
        if n != 0.0 {
            v += n * self.s * self.s * self.s * self.rj(p) / 3.0;
        }
        Ok(v)
    }
}

/// Incomplete elliptic integral of the first kind, `u = sin φ`, modulus `k`.
pub fn ellip_f(u: f64, k: f64) -> Result<f64, EllipticError> {
    Ok(Amplitude::from_sine(u, k)?.first_kind())
}

/// Incomplete elliptic integral of the second kind, `u = sin φ`, modulus `k`.
pub fn ellip_e(u: f64, k: f64) -> Result<f64, EllipticError> {
    Ok(Amplitude::from_sine(u, k)?.second_kind())
}

/// Incomplete elliptic integral of the third kind with characteristic `n`
/// entering as `1 − n sin²θ`.
pub fn ellip_pi(u: f64, n: f64, k: f64) -> Result<f64, EllipticError> {
    let amp = Amplitude::from_sine(u, k)?;
    if !n.is_finite() {
        return Err(EllipticError::NonFinite);
    }
    let p = 1.0 - n * amp.s * amp.s;
    if p <= DOMAIN_SLACK * n.abs().max(1.0) {
        return Err(EllipticError::Characteristic {
            value: n * amp.s * amp.s,
        });
    }
    amp.third_kind(n, p)
}
