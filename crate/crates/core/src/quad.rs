//! Adaptive one-dimensional quadrature on finite intervals.
//!
//! The base rule is the 15-point Gauss-Kronrod pair (G7, K15) with the
//! classical QUADPACK abscissae and weights; the error of each panel is the
//! rescaled difference between the embedded Gauss estimate and the Kronrod
//! estimate. Adaptive refinement bisects the panel with the largest error
//! estimate until the global estimate meets the requested tolerance.
//!
//! Infinite ranges are handled by the callers (tail windows chosen from the
//! family, or log-spaced boundary windows); this module only ever sees finite
//! endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// 7-point Gauss / 15-point Kronrod abscissae on [0, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

/// Absolute/relative tolerance pair; the effective target is
/// `max(abs, rel * |integral|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub abs_error: f64,
    pub evaluations: usize,
    /// Whether the error estimate met the requested tolerance.
    pub converged: bool,
}

/// QUADPACK's error rescaling: the raw Gauss/Kronrod difference tends to be
/// wildly pessimistic for smooth panels, and `(200 e / resasc)^1.5` sharpens
/// it while keeping a floor of 50 ulps of the absolute integral.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

struct Panel {
    value: f64,
    error: f64,
}

/// One G7K15 application on [a, b]. Returns `None` if the integrand produced
/// a non-finite value anywhere on the panel.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Option<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let x = half * XGK[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        fv1[j] = v1;
        fv2[j] = v2;
        let fsum = v1 + v2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (v1.abs() + v2.abs());
    }
    res_gauss += WG[3] * f_center;

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let raw_err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    if !value.is_finite() {
        return None;
    }
    Some(Panel {
        value,
        error: rescale_error(raw_err, res_abs * abs_half, res_asc * abs_half),
    })
}

struct Region {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap by error; sequence number breaks ties deterministically
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

const MAX_PANELS: usize = 4096;

/// Adaptive integral of `f` over the finite interval [a, b].
///
/// Returns `Err` only for non-finite integrand values or invalid endpoints;
/// a result whose error estimate misses the tolerance is reported with
/// `converged = false` so callers can decide whether that is fatal.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            context: "integration endpoints".into(),
        });
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        });
    }

    let first = qk15(&f, a, b).ok_or_else(|| Error::NonFinite {
        context: format!("integrand on [{a:e}, {b:e}]"),
    })?;
    let mut evaluations = 15;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut seq = 0usize;
    let mut heap = BinaryHeap::new();
    heap.push(Region {
        a,
        b,
        value: first.value,
        error: first.error,
        seq,
    });

    let width_floor = f64::EPSILON * (a.abs().max(b.abs()).max(1.0));

    while total_err > tol.target(total) && heap.len() < MAX_PANELS {
        let worst = match heap.pop() {
            Some(r) => r,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b {
            // cannot subdivide further; put it back and stop
            heap.push(worst);
            break;
        }
        let left = qk15(&f, worst.a, mid).ok_or_else(|| Error::NonFinite {
            context: format!("integrand on [{:e}, {mid:e}]", worst.a),
        })?;
        let right = qk15(&f, mid, worst.b).ok_or_else(|| Error::NonFinite {
            context: format!("integrand on [{mid:e}, {:e}]", worst.b),
        })?;
        evaluations += 30;

        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;

        seq += 1;
        heap.push(Region {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
            seq,
        });
        seq += 1;
        heap.push(Region {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
            seq,
        });
    }

    // Re-sum from the panels for a cleaner value (the incremental updates
    // accumulate cancellation noise over many refinements).
    let mut value = 0.0;
    let mut err = 0.0;
    for r in heap.iter() {
        value += r.value;
        err += r.error;
    }
    if heap.is_empty() {
        value = total;
        err = total_err;
    }

    Ok(QuadResult {
        value,
        abs_error: err,
        evaluations,
        converged: err <= tol.target(value),
    })
}

/// Like [`integrate`], but a missed tolerance is an error carrying the
/// achieved estimate.
pub fn integrate_strict<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    context: &str,
) -> Result<QuadResult> {
    let r = integrate(f, a, b, tol)?;
    if !r.converged {
        return Err(Error::QuadratureNonConvergent {
            context: context.into(),
            requested: tol.target(r.value),
            achieved: r.abs_error,
        });
    }
    Ok(r)
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` given a bracket `lo < hi` believed to
/// contain an interior maximum. Returns the located point and its value.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..160 {
        if b - a <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for `g(x) = 0` with a sign change over [lo, hi].
/// `g(lo)` and `g(hi)` must have opposite signs (zero counts as either).
pub fn bisect<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, iters: usize) -> f64 {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if (ga <= 0.0) == (gm <= 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
