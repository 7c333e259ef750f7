//! Adaptive Gauss–Kronrod quadrature (15-point Kronrod extension of the
//! 7-point Gauss rule) with global bisection of the interval carrying the
//! largest error estimate, and a nested 2D driver built on top of it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Kronrod abscissae on [-1, 1], descending; the last one is the center.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("no convergence after {subdivisions} subdivisions (estimate {value:e} ± {error:e})")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
}

/// Tolerances and limits for every numeric integration in the crate.
///
/// A result is accepted once its error estimate drops below
/// `max(abs_tol, rel_tol·|value|)`, or below the round-off floor
/// `100·ε·∫|f|` when cancellation makes the requested tolerance unreachable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, QuadratureError> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol >= 1e-14) {
            return Err(QuadratureError::InvalidSpec("rel_tol must be >= 1e-14"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadratureError::InvalidSpec("abs_tol must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    /// The spec used for the inner integral of a nested 2D integration over
    /// an outer interval of length `outer_len`.
    fn inner(&self, outer_len: f64) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: (self.rel_tol / 10.0).max(1e-14),
            abs_tol: self.abs_tol / 10.0 / outer_len.max(f64::MIN_POSITIVE),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// A quadrature result and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F, E>(f: &mut F, a: f64, b: f64) -> Result<Segment, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64, E> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { at: x }.into())
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let value = kronrod * half;
    let abs_value = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Adaptive integration over the union of consecutive intervals given by
/// `breaks` (sorted ascending), with a fallible integrand.
///
/// Breakpoints let callers isolate known kinks or near-singular points; the
/// bisection then proceeds globally over all pieces.
pub fn try_integrate_breaks<F, E>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&mut f, w[0], w[1])?);
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }

    let totals = |heap: &BinaryHeap<Segment>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, s), seg| {
            (v + seg.value, e + seg.error, s + seg.abs_value)
        })
    };
    let converged = |value: f64, error: f64, abs_value: f64| {
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * value.abs())
            .max(100.0 * f64::EPSILON * abs_value);
        error <= tol
    };

    let mut subdivisions = heap.len();
    loop {
        let (value, error, abs_value) = totals(&heap);
        if converged(value, error, abs_value) {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= spec.max_subdivisions.max(heap.len()) {
            return Err(QuadratureError::NonConvergence {
                value,
                error,
                subdivisions,
            }
            .into());
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs());
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 1e3 * f64::EPSILON * scale {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            let (value, error, _) = totals(&heap);
            return Err(QuadratureError::NonConvergence {
                value,
                error,
                subdivisions,
            }
            .into());
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid)?);
        heap.push(gauss_kronrod(&mut f, mid, worst.b)?);
        subdivisions += 1;
    }
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// ```
/// use cyltile::quadrature::{integrate_1d, QuadratureSpec};
/// let est = integrate_1d(|x| x * x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
/// assert!((est.value - 1.0 / 3.0).abs() < 1e-14);
/// ```
pub fn integrate_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(wrap(f), a, b, spec)
}

/// [`integrate_1d`] for an integrand that can itself fail.
pub fn try_integrate_1d<F, E>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    if a <= b {
        try_integrate_breaks(f, &[a, b], spec)
    } else {
        let est = try_integrate_breaks(f, &[b, a], spec)?;
        Ok(Estimate {
            value: -est.value,
            error: est.error,
        })
    }
}

fn wrap<F: FnMut(f64) -> f64>(mut f: F) -> impl FnMut(f64) -> Result<f64, QuadratureError> {
    move |x| Ok(f(x))
}

/// Nested 2D integration of `f(x, y)` over the rectangle spanned by the
/// sorted breakpoint lists `x_breaks` (outer) and `y_breaks` (inner).
///
/// The inner integrals run with a tolerance ten times tighter than the
/// outer one; the reported error adds the worst inner error times the
/// outer length to the outer estimate.
pub fn try_integrate_2d_breaks<F, E>(
    mut f: F,
    x_breaks: &[f64],
    y_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, E>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let outer_len = match (x_breaks.first(), x_breaks.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    let inner_spec = spec.inner(outer_len);
    let mut worst_inner = 0.0f64;
    let outer = try_integrate_breaks(
        |x| -> Result<f64, E> {
            let inner = try_integrate_breaks::<_, E>(|y| f(x, y), y_breaks, &inner_spec)?;
            worst_inner = worst_inner.max(inner.error);
            Ok(inner.value)
        },
        x_breaks,
        spec,
    )?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + outer_len.abs() * worst_inner,
    })
}

/// Nested adaptive integration of `f(x, y)` over `[ax, bx] × [ay, by]`.
pub fn integrate_2d<F>(
    mut f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64, f64) -> f64,
{
    let mut sign = 1.0;
    let xs = if ax <= bx { [ax, bx] } else { sign = -sign; [bx, ax] };
    let ys = if ay <= by { [ay, by] } else { sign = -sign; [by, ay] };
    let est = try_integrate_2d_breaks(|x, y| Ok::<f64, QuadratureError>(f(x, y)), &xs, &ys, spec)?;
    Ok(Estimate {
        value: sign * est.value,
        error: est.error,
    })
}
