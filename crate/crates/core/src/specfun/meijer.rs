//! Meijer G-function by numerical Mellin–Barnes integration.
//!
//! With Φ(s) = ∏Γ(b_j − s) ∏Γ(1 − a_j + s) / (∏Γ(1 − b_j + s) ∏Γ(a_j − s)),
//!
//! ```text
//! G^{m,n}_{p,q}[x | a; b] = 1/(2πi) ∫_{c−i∞}^{c+i∞} Φ(s) x^s ds
//!                         = (1/π) ∫₀^∞ Re[Φ(c+it) x^{c+it}] dt
//! ```
//!
//! for any c strictly between the left pole family (from Γ(1 − a_j + s),
//! j ≤ n) and the right one (from Γ(b_j − s), j ≤ m). The abscissa is the
//! minimizer of |Φ(c) x^c| on the real axis inside that strip, i.e. the
//! saddle point of the integrand, which keeps cancellation along the line
//! small even deep in the tails. Everything is done in log space so that
//! values far outside the f64 range can still be combined with prefactors.
//!
//! Supported patterns: every specification whose integrand decays
//! exponentially along vertical lines (2(m+n) > p+q after cancelling equal
//! numerator/denominator parameters) and whose pole families are separated.
//! That covers all pdf, cdf, BER and Λ instances used by this crate.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_abs_gamma, log_gamma_complex};
use super::quad::{integrate_with_breaks, QuadratureConfig};
use crate::error::{Error, Result};

/// Target relative accuracy of [`meijer_g`].
pub const MEIJER_REL_ACCURACY: f64 = 1e-8;

/// Shift applied when the leading left and right poles coincide.
pub const POLE_PERTURBATION: f64 = 1e-7;

const CANCEL_TOL: f64 = 1e-12;
const COINCIDENCE_TOL: f64 = 1e-9;
const TAIL_CUTOFF: f64 = 1e-17;
const MAX_HEIGHT: f64 = 1e5;

/// Order indices and parameter rows of G^{m,n}_{p,q}[x | a; b].
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m_idx: usize,
    pub n_idx: usize,
    pub a_params: Vec<f64>,
    pub b_params: Vec<f64>,
}

impl MeijerGSpec {
    pub fn new(m_idx: usize, n_idx: usize, a_params: Vec<f64>, b_params: Vec<f64>) -> Result<Self> {
        let spec = Self {
            m_idx,
            n_idx,
            a_params,
            b_params,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.m_idx > self.b_params.len() || self.n_idx > self.a_params.len() {
            return Err(Error::InvalidParams(format!(
                "Meijer G indices m={} n={} exceed row lengths q={} p={}",
                self.m_idx,
                self.n_idx,
                self.b_params.len(),
                self.a_params.len()
            )));
        }
        if self.a_params.iter().chain(&self.b_params).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("Meijer G parameters must be finite".into()));
        }
        Ok(())
    }

    /// p + q, the total number of parameters.
    pub fn order(&self) -> usize {
        self.a_params.len() + self.b_params.len()
    }

    /// Specification of G^{n,m}_{q,p}[1/x | 1−b; 1−a], equal to this one at x.
    pub fn reflected(&self) -> Self {
        Self {
            m_idx: self.n_idx,
            n_idx: self.m_idx,
            a_params: self.b_params.iter().map(|b| 1.0 - b).collect(),
            b_params: self.a_params.iter().map(|a| 1.0 - a).collect(),
        }
    }
}

/// A value represented as `mantissa · e^{ln_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.ln_scale.exp()
    }

    /// `self · e^{ln_factor}` evaluated without intermediate overflow.
    pub fn times_exp(&self, ln_factor: f64) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * (self.ln_scale + ln_factor).exp()
    }
}

/// G^{m,n}_{p,q}[x | a; b] for x > 0.
pub fn meijer_g(spec: &MeijerGSpec, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Meijer G argument must be positive, got {x}")));
    }
    meijer_g_ln_arg(spec, x.ln()).map(|v| v.value())
}

/// G evaluated at x = e^{ln_x}, returned in scaled form.
pub fn meijer_g_ln_arg(spec: &MeijerGSpec, ln_x: f64) -> Result<ScaledValue> {
    spec.validate()?;
    if !ln_x.is_finite() {
        return Err(Error::Domain(format!("Meijer G log-argument must be finite, got {ln_x}")));
    }
    let integrand = Integrand::from_spec(spec)?;
    let (lo, hi) = integrand.strip();
    let width = hi - lo;
    if width > COINCIDENCE_TOL {
        return integrand.evaluate(ln_x);
    }
    if width < -COINCIDENCE_TOL {
        return Err(Error::UnsupportedSpec(format!(
            "pole families overlap (leftmost right pole {hi} < rightmost left pole {lo}); \
             no straight separating contour"
        )));
    }
    // leading poles coincide: shift the colliding right pole and check stability
    let v1 = integrand.perturbed(POLE_PERTURBATION).evaluate(ln_x)?;
    let v2 = integrand.perturbed(2.0 * POLE_PERTURBATION).evaluate(ln_x)?;
    let a = v1.value();
    let b = v2.value();
    let diff = ((a - b) / a).abs();
    if !(diff <= MEIJER_REL_ACCURACY) {
        return Err(Error::Accuracy {
            context: "Meijer G pole-coincidence perturbation".into(),
            estimate: diff,
        });
    }
    Ok(v1)
}

#[derive(Debug, Clone)]
struct Integrand {
    /// Γ(b − s) factors (right poles)
    b_num: Vec<f64>,
    /// Γ(1 − a + s) factors (left poles)
    a_num: Vec<f64>,
    /// 1/Γ(1 − b + s)
    b_den: Vec<f64>,
    /// 1/Γ(a − s)
    a_den: Vec<f64>,
}

impl Integrand {
    fn from_spec(spec: &MeijerGSpec) -> Result<Self> {
        let mut b_num = spec.b_params[..spec.m_idx].to_vec();
        let mut b_den = spec.b_params[spec.m_idx..].to_vec();
        let mut a_num = spec.a_params[..spec.n_idx].to_vec();
        let mut a_den = spec.a_params[spec.n_idx..].to_vec();
        cancel_pairs(&mut a_num, &mut b_den);
        cancel_pairs(&mut a_den, &mut b_num);
        let decay = (b_num.len() + a_num.len()) as i64 - (b_den.len() + a_den.len()) as i64;
        if decay <= 0 {
            return Err(Error::UnsupportedSpec(format!(
                "integrand does not decay along vertical lines (2(m+n) - p - q = {decay})"
            )));
        }
        Ok(Self {
            b_num,
            a_num,
            b_den,
            a_den,
        })
    }

    fn decay(&self) -> f64 {
        (self.b_num.len() + self.a_num.len()) as f64 - (self.b_den.len() + self.a_den.len()) as f64
    }

    /// (rightmost left pole, leftmost right pole); ±∞ when a family is absent.
    fn strip(&self) -> (f64, f64) {
        let lo = self.a_num.iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
        let hi = self.b_num.iter().copied().fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    fn perturbed(&self, eps: f64) -> Self {
        let mut out = self.clone();
        if let Some((idx, _)) = out.b_num.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)) {
            out.b_num[idx] += eps;
        }
        out
    }

    fn ln_phi(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &b in &self.b_num {
            acc += log_gamma_complex(Complex64::new(b, 0.0) - s);
        }
        for &a in &self.a_num {
            acc += log_gamma_complex(one - a + s);
        }
        for &b in &self.b_den {
            acc -= log_gamma_complex(one - b + s);
        }
        for &a in &self.a_den {
            acc -= log_gamma_complex(Complex64::new(a, 0.0) - s);
        }
        acc
    }

    /// ln|Φ(c)| on the real axis; +∞ where Φ has a pole or a zero.
    fn ln_phi_real(&self, c: f64) -> f64 {
        let mut acc = 0.0;
        for &b in &self.b_num {
            acc += ln_abs_gamma(b - c);
        }
        for &a in &self.a_num {
            acc += ln_abs_gamma(1.0 - a + c);
        }
        for &b in &self.b_den {
            acc -= ln_abs_gamma(1.0 - b + c);
        }
        for &a in &self.a_den {
            acc -= ln_abs_gamma(a - c);
        }
        if acc.is_finite() {
            acc
        } else {
            f64::INFINITY
        }
    }

    fn saddle(&self, ln_x: f64) -> Result<f64> {
        let (lo, hi) = self.strip();
        let h = |c: f64| self.ln_phi_real(c) + c * ln_x;
        let (mut left, mut right) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let pad = (hi - lo) * 1e-12;
                (lo + pad, hi - pad)
            }
            (true, false) => (lo + 1e-12 * (1.0 + lo.abs()), expand(&h, lo + 1.0, 1.0)?),
            (false, true) => (expand(&h, hi - 1.0, -1.0)?, hi - 1e-12 * (1.0 + hi.abs())),
            (false, false) => {
                return Err(Error::UnsupportedSpec("integrand has no gamma poles".into()));
            }
        };
        // golden-section search for the minimum of the convex profile
        let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = right - inv_phi * (right - left);
        let mut x2 = left + inv_phi * (right - left);
        let mut f1 = h(x1);
        let mut f2 = h(x2);
        for _ in 0..200 {
            if (right - left) <= 1e-9 * (1.0 + x1.abs()) {
                break;
            }
            if f1 <= f2 {
                right = x2;
                x2 = x1;
                f2 = f1;
                x1 = right - inv_phi * (right - left);
                f1 = h(x1);
            } else {
                left = x1;
                x1 = x2;
                f1 = f2;
                x2 = left + inv_phi * (right - left);
                f2 = h(x2);
            }
        }
        let c = 0.5 * (left + right);
        if !h(c).is_finite() {
            return Err(Error::UnsupportedSpec(
                "no finite contour abscissa inside the separating strip".into(),
            ));
        }
        Ok(c)
    }

    fn evaluate(&self, ln_x: f64) -> Result<ScaledValue> {
        let c = self.saddle(ln_x)?;
        let ln_scale = self.ln_phi_real(c) + c * ln_x;
        let normalized = |t: f64| -> f64 {
            let s = Complex64::new(c, t);
            let w = self.ln_phi(s) + s * ln_x - ln_scale;
            if w.re < -745.0 {
                return 0.0;
            }
            w.re.exp() * w.im.cos()
        };
        let magnitude = |t: f64| -> f64 {
            let s = Complex64::new(c, t);
            (self.ln_phi(s).re + c * ln_x - ln_scale).exp()
        };

        // march outward until two consecutive samples fall below the cutoff
        let step = 0.5;
        let mut height = 0.0;
        let mut below = 0;
        while below < 2 {
            height += step;
            if height > MAX_HEIGHT {
                return Err(Error::Accuracy {
                    context: "Meijer G contour truncation".into(),
                    estimate: magnitude(height),
                });
            }
            if magnitude(height) < TAIL_CUTOFF {
                below += 1;
            } else {
                below = 0;
            }
        }

        // panels short enough that each starts with at most half an oscillation
        let freq = ln_x.abs() + self.decay() * (1.0 + height).ln() + 1.0;
        let panel = (PI / freq).min(step);
        let n_panels = ((height / panel).ceil() as usize).max(1);
        let breaks: Vec<f64> = (0..=n_panels).map(|i| height * i as f64 / n_panels as f64).collect();
        let cfg = QuadratureConfig {
            abs_tol: 1e-16,
            rel_tol: 1e-12,
            max_subdivisions: 20 * n_panels + 2000,
        };
        let est = integrate_with_breaks(normalized, &breaks, &cfg)?;
        let value = est.value / PI;
        let error = est.error / PI;
        if !(error <= MEIJER_REL_ACCURACY * value.abs()) {
            return Err(Error::Accuracy {
                context: "Meijer G contour integral".into(),
                estimate: if value != 0.0 { error / value.abs() } else { error },
            });
        }
        Ok(ScaledValue {
            mantissa: value,
            ln_scale,
        })
    }
}

/// Walk from `start` in direction `dir` with doubling steps until `h` turns upward.
fn expand<H: Fn(f64) -> f64>(h: &H, start: f64, dir: f64) -> Result<f64> {
    let mut prev = h(start);
    let mut step = 1.0;
    let mut x = start;
    for _ in 0..60 {
        let next = x + dir * step;
        let v = h(next);
        if v > prev {
            return Ok(next);
        }
        prev = v;
        x = next;
        step *= 2.0;
    }
    Err(Error::UnsupportedSpec("contour abscissa search diverged".into()))
}

/// Remove numerator/denominator gamma pairs with identical parameters.
fn cancel_pairs(xs: &mut Vec<f64>, ys: &mut Vec<f64>) {
    let mut i = 0;
    while i < xs.len() {
        if let Some(j) = ys.iter().position(|y| (y - xs[i]).abs() < CANCEL_TOL) {
            xs.swap_remove(i);
            ys.swap_remove(j);
        } else {
            i += 1;
        }
    }
}
