//! Adaptive Gauss–Kronrod (10/21-point) quadrature with global bisection,
//! plus mappings for the half line and the whole real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive, got abs={abs_tol} rel={rel_tol}"
            )));
        }
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Relative-only tolerance, for integrals whose magnitude is unknown in advance.
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol,
            max_subdivisions: 2000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0 && self.abs_tol + self.rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive, got abs={} rel={}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
}

// Kronrod abscissae and weights for the 21-point rule; the embedded 10-point
// Gauss rule uses the odd-indexed abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

/// One 21-point Kronrod evaluation with the QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive integration over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadEstimate> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Adaptive integration over consecutive panels given by `breaks`
/// (sorted, at least two points).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadEstimate> {
    cfg.validate()?;
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("integration needs at least two finite break points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut panels = heap.len();
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Accuracy {
                context: "adaptive quadrature (non-finite integrand)".into(),
                estimate: f64::INFINITY,
            });
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(QuadEstimate {
                value: total,
                error: total_err,
            });
        }
        if panels >= cfg.max_subdivisions {
            return Err(Error::Accuracy {
                context: format!("adaptive quadrature after {panels} subdivisions"),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval can no longer be split in floating point
            let tol_ok = total_err <= 10.0 * tol;
            if tol_ok {
                return Ok(QuadEstimate {
                    value: total,
                    error: total_err,
                });
            }
            return Err(Error::Accuracy {
                context: "adaptive quadrature (interval underflow)".into(),
                estimate: total_err,
            });
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        panels += 1;
        // refresh the running sums now and then to shed accumulated rounding
        if panels % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// ∫ over the whole real line of `g`, centered at `center` with width `scale`.
///
/// Uses u = center + scale · t / (1 − t²) on t ∈ (−1, 1).
pub fn integrate_real_line<F: Fn(f64) -> f64>(g: F, center: f64, scale: f64, cfg: &QuadratureConfig) -> Result<QuadEstimate> {
    if !(scale > 0.0 && center.is_finite()) {
        return Err(Error::Domain(format!(
            "bad real-line mapping: center={center}, scale={scale}"
        )));
    }
    let mapped = |t: f64| {
        let d = 1.0 - t * t;
        if d <= 0.0 {
            return 0.0;
        }
        let u = center + scale * t / d;
        let jac = scale * (1.0 + t * t) / (d * d);
        let v = g(u);
        if v == 0.0 || !jac.is_finite() {
            0.0
        } else {
            v * jac
        }
    };
    let breaks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    integrate_with_breaks(mapped, &breaks, cfg)
}

/// ∫₀^∞ f(x) dx.
///
/// The half line is compactified through x = e^u with u = t / (1 − t²),
/// t ∈ (−1, 1); integrable power-law singularities at 0 become exponential
/// decay in t. The returned error estimate satisfies
/// error ≤ max(abs_tol, rel_tol · |value|).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_semi_infinite_centered(f, 1.0, cfg).map(|e| e.value)
}

/// As [`integrate_semi_infinite`], with the compactification centered at
/// `x_center` (where most of the mass is expected).
pub fn integrate_semi_infinite_centered<F: Fn(f64) -> f64>(f: F, x_center: f64, cfg: &QuadratureConfig) -> Result<QuadEstimate> {
    if !(x_center > 0.0 && x_center.is_finite()) {
        return Err(Error::Domain(format!("center must be positive, got {x_center}")));
    }
    let g = |u: f64| {
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * x
        }
    };
    integrate_real_line(g, x_center.ln(), 2.0, cfg)
}

/// ln ∫ exp(h(u)) du over the real line for a log-concave integrand.
///
/// `hint` should lie near the mode. The mode is located by bracketing and
/// golden-section search, the width from the curvature there; the integral
/// is then taken of exp(h − h_max) so that results far outside the f64
/// range are still returned accurately in log form.
pub fn integrate_log_concave<H: Fn(f64) -> f64>(h: H, hint: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !hint.is_finite() {
        return Err(Error::Domain(format!("mode hint must be finite, got {hint}")));
    }
    let (mode, h_max) = locate_mode(&h, hint)?;
    let delta = 1e-3;
    let curv = -(h(mode + delta) - 2.0 * h_max + h(mode - delta)) / (delta * delta);
    let scale = if curv.is_finite() && curv > 0.0 {
        (1.0 / curv.sqrt()).clamp(1e-6, 1e3)
    } else {
        1.0
    };
    let est = integrate_real_line(
        |u| {
            let v = h(u) - h_max;
            if v < -745.0 || v.is_nan() {
                0.0
            } else {
                v.exp()
            }
        },
        mode,
        scale,
        cfg,
    )?;
    if !(est.value > 0.0) {
        return Err(Error::Accuracy {
            context: "log-concave integral vanished".into(),
            estimate: est.error,
        });
    }
    Ok(est.value.ln() + h_max)
}

fn locate_mode<H: Fn(f64) -> f64>(h: &H, hint: f64) -> Result<(f64, f64)> {
    let eval = |u: f64| {
        let v = h(u);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let f0 = eval(hint);
    let step0 = 0.5;
    let (fr, fl) = (eval(hint + step0), eval(hint - step0));
    let dir = if fr >= f0 && fr >= fl {
        1.0
    } else if fl > f0 {
        -1.0
    } else {
        0.0
    };
    let (mut a, mut b) = (hint - step0, hint + step0);
    if dir != 0.0 {
        // walk uphill with doubling steps until the value drops
        let mut x = hint;
        let mut fx = f0;
        let mut step = step0;
        let mut prev = hint;
        let mut found = false;
        for _ in 0..80 {
            let nx = x + dir * step;
            let fn_ = eval(nx);
            if fn_ < fx {
                a = prev.min(nx);
                b = prev.max(nx);
                found = true;
                break;
            }
            prev = x;
            x = nx;
            fx = fn_;
            step *= 2.0;
        }
        if !found {
            return Err(Error::Domain("integrand has no interior mode".into()));
        }
    }
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..200 {
        if b - a <= 1e-7 * (1.0 + a.abs()) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
    }
    let mode = 0.5 * (a + b);
    let h_max = eval(mode);
    if !h_max.is_finite() {
        return Err(Error::Domain("log-integrand is not finite at its mode".into()));
    }
    Ok((mode, h_max))
}
