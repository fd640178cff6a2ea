//! Turbulence conditions to Double GG parameters.
//!
//! The pipeline is: scale variances from the Rytov variance and inner-scale
//! ratio, one γ per scale from the variance/moment relation at the supplied
//! shaping parameter m, Ω from the unit-mean condition, and finally p/q from
//! the continued fraction of γ₁/γ₂.
//!
//! The inner-scale factor is η_l = 10.89·(R₀/l₀)², i.e. `10.89 / ratio²`
//! for `ratio = l₀/R₀`.

use crate::dist::{normalized_variance, unit_mean_omega, DoubleGGParams, GGParams};
use crate::error::{Error, Result};

/// Default largest denominator for p/q.
pub const DEFAULT_MAX_DEN: u32 = 16;

/// A convergent this close to the target ratio ends the search in [`rational_ratio`].
pub const CONVERGENT_TOL: f64 = 1e-2;

const SHAPE_LO: f64 = 1e-3;
const SHAPE_HI: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveType {
    Plane,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphericConditions {
    pub wave: WaveType,
    /// σ²_Rytov
    pub rytov_var: f64,
    /// l₀/R₀
    pub inner_scale_ratio: f64,
}

impl AtmosphericConditions {
    pub fn new(wave: WaveType, rytov_var: f64, inner_scale_ratio: f64) -> Result<Self> {
        let c = Self {
            wave,
            rytov_var,
            inner_scale_ratio,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rytov_var >= 0.0 && self.rytov_var.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "Rytov variance must be finite and non-negative, got {}",
                self.rytov_var
            )));
        }
        if !(self.inner_scale_ratio >= 0.0 && self.inner_scale_ratio.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "inner-scale ratio must be finite and non-negative, got {}",
                self.inner_scale_ratio
            )));
        }
        Ok(())
    }
}

/// Normalized variances of the large- and small-scale factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleVariances {
    pub sigma_x_sq: f64,
    pub sigma_y_sq: f64,
}

/// Shaping parameters supplied by the user or a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSeed {
    pub m1: f64,
    pub m2: f64,
}

impl ShapeSeed {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        for m in [m1, m2] {
            if !(m >= 0.5 && m.is_finite()) {
                return Err(Error::InvalidParams(format!("shaping parameter must be ≥ 0.5, got {m}")));
            }
        }
        Ok(Self { m1, m2 })
    }
}

fn eta_l(inner_scale_ratio: f64) -> f64 {
    10.89 / (inner_scale_ratio * inner_scale_ratio)
}

/// exp(0.51 s / (1 + 0.69 s^{6/5})^{5/6}) − 1, with s a Rytov-type variance.
fn small_scale(s: f64) -> f64 {
    (0.51 * s / (1.0 + 0.69 * s.powf(1.2)).powf(5.0 / 6.0)).exp_m1()
}

/// Large-scale variance with inner-scale correction; `c`, `k` are 2.61, 0.16
/// (plane, with `w` = 0.45) or 8.56, 0.04 (spherical, `w` = 0.195).
fn large_scale_inner(s: f64, eta: f64, c: f64, k: f64, w: f64) -> f64 {
    let d = c + eta + w * s * eta.powf(7.0 / 6.0);
    let r = c / d;
    (k * s * (c * eta / d).powf(7.0 / 6.0) * (1.0 + 1.753 * r.sqrt() - 0.252 * r.powf(7.0 / 12.0))).exp_m1()
}

/// Plane-wave scale variances with finite inner scale.
pub fn plane_wave_variances(cond: &AtmosphericConditions) -> Result<ScaleVariances> {
    cond.validate()?;
    if cond.wave != WaveType::Plane {
        return Err(Error::Domain("plane-wave variances requested for a spherical wave".into()));
    }
    if cond.inner_scale_ratio == 0.0 {
        return Err(Error::Domain(
            "plane-wave model needs a positive inner-scale ratio (η_l undefined at l₀ = 0)".into(),
        ));
    }
    let s = cond.rytov_var;
    Ok(ScaleVariances {
        sigma_x_sq: large_scale_inner(s, eta_l(cond.inner_scale_ratio), 2.61, 0.16, 0.45),
        sigma_y_sq: small_scale(s),
    })
}

/// σ̃²(l₀/R₀), the spherical-wave inner-scale correction of the Rytov index.
pub fn sigma_tilde_sq(inner_scale_ratio: f64) -> f64 {
    let eta = eta_l(inner_scale_ratio);
    let a = (eta / 3.0).atan();
    let e2 = 9.0 + eta * eta;
    3.86 * ((1.0 + 9.0 / (eta * eta)).powf(11.0 / 12.0)
        * ((11.0 / 6.0 * a).sin() + 2.61 / e2.powf(0.25) * (4.0 / 3.0 * a).sin()
            - 0.518 / e2.powf(7.0 / 24.0) * (1.25 * a).sin())
        - 8.75 * eta.powf(-5.0 / 6.0))
}

/// Spherical-wave scale variances.
///
/// With zero inner scale the Rytov variance is used as β₀² directly;
/// otherwise β₀² = σ²_R/σ̃² and the large scale takes the inner-scale form.
pub fn spherical_wave_variances(cond: &AtmosphericConditions) -> Result<ScaleVariances> {
    cond.validate()?;
    if cond.wave != WaveType::Spherical {
        return Err(Error::Domain("spherical-wave variances requested for a plane wave".into()));
    }
    if cond.inner_scale_ratio == 0.0 {
        let b = cond.rytov_var;
        return Ok(ScaleVariances {
            sigma_x_sq: (0.49 * b / (1.0 + 0.56 * b.powf(1.2)).powf(7.0 / 6.0)).exp_m1(),
            sigma_y_sq: small_scale(b),
        });
    }
    let tilde = sigma_tilde_sq(cond.inner_scale_ratio);
    if !(tilde > 0.0) {
        return Err(Error::Domain(format!(
            "σ̃² = {tilde} is not positive at l₀/R₀ = {}",
            cond.inner_scale_ratio
        )));
    }
    let b = cond.rytov_var / tilde;
    Ok(ScaleVariances {
        sigma_x_sq: large_scale_inner(b, eta_l(cond.inner_scale_ratio), 8.56, 0.04, 0.195),
        sigma_y_sq: small_scale(b),
    })
}

/// Scale variances for either wave type.
pub fn scale_variances(cond: &AtmosphericConditions) -> Result<ScaleVariances> {
    match cond.wave {
        WaveType::Plane => plane_wave_variances(cond),
        WaveType::Spherical => spherical_wave_variances(cond),
    }
}

/// γ with Γ(m+2/γ)Γ(m)/Γ²(m+1/γ) − 1 = sigma_sq, by bisection on [1e-3, 100].
pub fn solve_shape(sigma_sq: f64, m: f64) -> Result<f64> {
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(Error::Domain(format!("variance must be positive, got {sigma_sq}")));
    }
    if !(m >= 0.5 && m.is_finite()) {
        return Err(Error::Domain(format!("m must be at least 0.5, got {m}")));
    }
    // compare ln(1 + variance), which is decreasing in γ and never overflows
    let target = sigma_sq.ln_1p();
    let g = |gamma: f64| normalized_variance_ln1p(gamma, m) - target;
    let (mut lo, mut hi) = (SHAPE_LO, SHAPE_HI);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo >= 0.0 && g_hi <= 0.0) {
        return Err(Error::NoSolution(format!(
            "variance {sigma_sq} is not reachable with m = {m} for γ in [{SHAPE_LO}, {SHAPE_HI}]"
        )));
    }
    // bisect in ln γ down to adjacent floats
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

fn normalized_variance_ln1p(gamma: f64, m: f64) -> f64 {
    use crate::specfun::gamma::ln_gamma_pos;
    ln_gamma_pos(m + 2.0 / gamma) + ln_gamma_pos(m) - 2.0 * ln_gamma_pos(m + 1.0 / gamma)
}

/// Ω = (Γ(m)/Γ(m+1/γ))^γ · m, the scale that gives a unit-mean factor.
pub fn omega_from(m: f64, gamma: f64) -> Result<f64> {
    if !(m >= 0.5 && m.is_finite() && gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "omega_from needs m ≥ 0.5 and γ > 0, got m={m}, γ={gamma}"
        )));
    }
    Ok(unit_mean_omega(m, gamma))
}

/// Coprime (p, q) with p/q ≈ ratio and q ≤ max_den.
///
/// Walks the continued-fraction convergents and returns the first one within
/// [`CONVERGENT_TOL`] of `ratio`, or the last one with q ≤ max_den if none is.
/// Every convergent is a best approximation of the second kind, so no
/// fraction with denominator ≤ q is closer. A ratio below the first nonzero
/// convergent yields (1, max_den).
pub fn rational_ratio(ratio: f64, max_den: u32) -> (u32, u32) {
    rational_ratio_within(ratio, max_den, CONVERGENT_TOL)
}

/// [`rational_ratio`] with an explicit relative tolerance.
pub fn rational_ratio_within(ratio: f64, max_den: u32, tol: f64) -> (u32, u32) {
    assert!(ratio > 0.0 && ratio.is_finite(), "ratio must be positive and finite");
    let max_den = max_den.max(1) as u64;
    let (mut h1, mut h2, mut k1, mut k2) = (1u64, 0u64, 0u64, 1u64);
    let mut best: Option<(u64, u64)> = None;
    let mut x = ratio;
    for _ in 0..64 {
        let a = x.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let (h, k) = (a * h1 + h2, a * k1 + k2);
        if k > max_den || h > u32::MAX as u64 {
            break;
        }
        (h2, h1, k2, k1) = (h1, h, k1, k);
        if h > 0 {
            best = Some((h, k));
            if ((h as f64 / k as f64) - ratio).abs() <= tol * ratio {
                break;
            }
        }
        let frac = x - a as f64;
        if frac <= 1e-12 * x.max(1.0) {
            break;
        }
        x = 1.0 / frac;
    }
    match best {
        Some((h, k)) => (h as u32, k as u32),
        None => (1, max_den as u32),
    }
}

/// Full pipeline from conditions and shaping parameters to channel parameters.
pub fn derive_params(cond: &AtmosphericConditions, seed: &ShapeSeed, max_den: u32) -> Result<DoubleGGParams> {
    let v = scale_variances(cond)?;
    derive_from_variances(&v, seed, max_den)
}

/// As [`derive_params`], starting from known scale variances.
pub fn derive_from_variances(v: &ScaleVariances, seed: &ShapeSeed, max_den: u32) -> Result<DoubleGGParams> {
    let seed = ShapeSeed::new(seed.m1, seed.m2)?;
    let g1 = solve_shape(v.sigma_x_sq, seed.m1)?;
    let g2 = solve_shape(v.sigma_y_sq, seed.m2)?;
    let large = GGParams::new(g1, seed.m1, omega_from(seed.m1, g1)?)?;
    let small = GGParams::new(g2, seed.m2, omega_from(seed.m2, g2)?)?;
    let (p, q) = rational_ratio(g1 / g2, max_den);
    DoubleGGParams::new(large, small, p, q)
}

/// Normalized variance Γ(m+2/γ)Γ(m)/Γ²(m+1/γ) − 1 of a GG factor.
pub fn shape_variance(gamma: f64, m: f64) -> f64 {
    normalized_variance(gamma, m)
}
