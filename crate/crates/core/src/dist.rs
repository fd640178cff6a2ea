//! Generalized Gamma fading factors and their product, the Double GG
//! irradiance distribution.
//!
//! I = Ix·Iy with Ix ~ GG(γ₁, m₁, Ω₁) (large-scale eddies) and
//! Iy ~ GG(γ₂, m₂, Ω₂) (small-scale eddies). The product density has a
//! Meijer G closed form when γ₁/γ₂ = p/q for coprime integers p, q.
//!
//! Two evaluation paths exist for the density and the cdf:
//!
//! * [`EvalPath::Quadrature`] integrates the product (or mixture) integral in
//!   the log domain. It is exact for any γ₁, γ₂ and is the default.
//! * [`EvalPath::MeijerG`] evaluates the closed form. It describes the channel
//!   with γ₁ replaced by p·γ₂/q, so it coincides with the quadrature path
//!   only for exact (for instance [`DoubleGGParams::snapped`]) parameters.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::specfun::gamma::{ln_gamma_p, ln_gamma_pos};
use crate::specfun::meijer::{meijer_g_ln_arg, MeijerGSpec};
use crate::specfun::quad::{integrate_log_concave, QuadratureConfig};

/// Largest accepted relative gap between p/q and γ₁/γ₂.
pub const RATIO_TOL: f64 = 2e-2;

/// Below this irradiance the density is reported as 0.
pub const PDF_FLOOR: f64 = 1e-9;

/// Relative gap under which p/q counts as equal to γ₁/γ₂.
pub const EXACT_RATIO_TOL: f64 = 1e-9;

const SPECIAL_CASE_TOL: f64 = 1e-9;
const QUAD_REL_TOL: f64 = 1e-11;

/// One Generalized Gamma factor with density
/// γ x^{mγ−1} exp(−(m/Ω)x^γ) / ((Ω/m)^m Γ(m)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GGParams {
    pub gamma: f64,
    pub m: f64,
    pub omega: f64,
}

impl GGParams {
    pub fn new(gamma: f64, m: f64, omega: f64) -> Result<Self> {
        let p = Self { gamma, m, omega };
        p.validate()?;
        Ok(p)
    }

    /// The factor with unit mean for the given shapes.
    pub fn unit_mean(gamma: f64, m: f64) -> Result<Self> {
        Self::new(gamma, m, 1.0)?;
        Ok(Self {
            gamma,
            m,
            omega: unit_mean_omega(m, gamma),
        })
    }

    /// The factor with γ replaced and Ω re-derived so that E[X] is unchanged.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let mean = self.moment(1.0);
        let unit = Self::unit_mean(gamma, self.m)?;
        // E[X] scales as Ω^{1/γ}
        Self::new(gamma, self.m, unit.omega * mean.powf(gamma))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("γ must be positive, got {}", self.gamma)));
        }
        if !(self.m >= 0.5 && self.m.is_finite()) {
            return Err(Error::InvalidParams(format!("m must be at least 0.5, got {}", self.m)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParams(format!("Ω must be positive, got {}", self.omega)));
        }
        Ok(())
    }

    /// ln of the density of ln X at u.
    pub(crate) fn ln_log_density(&self, u: f64) -> f64 {
        let (g, m, o) = (self.gamma, self.m, self.omega);
        let t = g * u;
        let pow = if t > 700.0 { f64::INFINITY } else { t.exp() };
        g.ln() + m * t - (m / o) * pow - m * (o / m).ln() - ln_gamma_pos(m)
    }

    /// ln of the density at x > 0.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_log_density(x.ln()) - x.ln()
    }

    /// P(X ≤ x) = P(m, (m/Ω)x^γ).
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.ln_cdf_log(x.ln()).exp()
    }

    /// ln P(X ≤ e^u).
    pub(crate) fn ln_cdf_log(&self, u: f64) -> f64 {
        let z = (self.m / self.omega).ln() + self.gamma * u;
        if z > 700.0 {
            return 0.0;
        }
        ln_gamma_p(self.m, z.exp()).unwrap_or(f64::NEG_INFINITY)
    }

    /// E[X^n] = (Ω/m)^{n/γ} Γ(m + n/γ)/Γ(m) for real n > −mγ.
    pub fn moment(&self, n: f64) -> f64 {
        let e = n / self.gamma;
        ((self.omega / self.m).ln() * e + ln_gamma_pos(self.m + e) - ln_gamma_pos(self.m)).exp()
    }

    /// Normalized variance E[X²]/E[X]² − 1.
    pub fn normalized_variance(&self) -> f64 {
        normalized_variance(self.gamma, self.m)
    }

    fn gamma_law(&self) -> Gamma<f64> {
        Gamma::new(self.m, self.omega / self.m).expect("validated shape and scale")
    }
}

/// Ω that gives the GG factor unit mean: (Γ(m)/Γ(m+1/γ))^γ · m.
pub(crate) fn unit_mean_omega(m: f64, gamma: f64) -> f64 {
    (gamma * (ln_gamma_pos(m) - ln_gamma_pos(m + 1.0 / gamma))).exp() * m
}

/// Γ(m+2/γ)Γ(m)/Γ²(m+1/γ) − 1.
pub(crate) fn normalized_variance(gamma: f64, m: f64) -> f64 {
    (ln_gamma_pos(m + 2.0 / gamma) + ln_gamma_pos(m) - 2.0 * ln_gamma_pos(m + 1.0 / gamma)).exp_m1()
}

/// Generalized Gamma density at x > 0.
pub fn gg_pdf(x: f64, p: &GGParams) -> Result<f64> {
    p.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("GG density needs finite x > 0, got {x}")));
    }
    Ok(p.ln_pdf(x).exp())
}

/// n-th raw moment of a GG factor.
pub fn gg_moment(n: u32, p: &GGParams) -> Result<f64> {
    p.validate()?;
    Ok(p.moment(n as f64))
}

/// Full channel: large- and small-scale factors with the pair p/q ≈ γ₁/γ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleGGParams {
    large: GGParams,
    small: GGParams,
    p: u32,
    q: u32,
}

impl DoubleGGParams {
    pub fn new(large: GGParams, small: GGParams, p: u32, q: u32) -> Result<Self> {
        large.validate()?;
        small.validate()?;
        if p == 0 || q == 0 {
            return Err(Error::InvalidParams(format!("p and q must be positive, got {p}/{q}")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidParams(format!("p = {p} and q = {q} are not coprime")));
        }
        let out = Self { large, small, p, q };
        let gap = out.ratio_mismatch();
        if !(gap <= RATIO_TOL) {
            return Err(Error::InvalidParams(format!(
                "p/q = {p}/{q} is {:.3}% away from γ1/γ2 = {:.6} (tolerance {:.1}%)",
                100.0 * gap,
                large.gamma / small.gamma,
                100.0 * RATIO_TOL
            )));
        }
        Ok(out)
    }

    pub fn large(&self) -> &GGParams {
        &self.large
    }

    pub fn small(&self) -> &GGParams {
        &self.small
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// |p/q − γ₁/γ₂| / (γ₁/γ₂).
    pub fn ratio_mismatch(&self) -> f64 {
        let r = self.large.gamma / self.small.gamma;
        ((self.p as f64 / self.q as f64) - r).abs() / r
    }

    /// Whether p/q equals γ₁/γ₂ to within [`EXACT_RATIO_TOL`].
    pub fn is_exact(&self) -> bool {
        self.ratio_mismatch() <= EXACT_RATIO_TOL
    }

    /// γ₁ set to p·γ₂/q exactly, with Ω₁ re-derived so E[Ix] is unchanged.
    pub fn snapped(&self) -> Result<Self> {
        let gamma1 = self.p as f64 * self.small.gamma / self.q as f64;
        Self::new(self.large.with_gamma(gamma1)?, self.small, self.p, self.q)
    }

    /// The exponent ladder {(m₁+i)/q : i < q} ∪ {(m₂+i)/p : i < p}.
    pub fn exponent_ladder(&self) -> Vec<f64> {
        let (p, q) = (self.p as f64, self.q as f64);
        let mut b: Vec<f64> = (0..self.q).map(|i| (self.large.m + i as f64) / q).collect();
        b.extend((0..self.p).map(|i| (self.small.m + i as f64) / p));
        b
    }

    /// ln of m₁^q m₂^p / ((qΩ₁)^q (pΩ₂)^p); the Meijer argument is this times I^{pγ₂}.
    pub(crate) fn ln_meijer_base(&self) -> f64 {
        let (p, q) = (self.p as f64, self.q as f64);
        q * (self.large.m / (q * self.large.omega)).ln() + p * (self.small.m / (p * self.small.omega)).ln()
    }

    /// ln of p^{m₂−1/2} q^{m₁−1/2} (2π)^{1−(p+q)/2} / (Γ(m₁)Γ(m₂)).
    pub(crate) fn ln_meijer_prefactor(&self) -> f64 {
        let (p, q) = (self.p as f64, self.q as f64);
        (self.small.m - 0.5) * p.ln() + (self.large.m - 0.5) * q.ln() + (1.0 - 0.5 * (p + q)) * (2.0 * PI).ln()
            - ln_gamma_pos(self.large.m)
            - ln_gamma_pos(self.small.m)
    }

    /// E[I^n] = E[Ix^n]·E[Iy^n].
    pub fn moment(&self, n: f64) -> f64 {
        self.large.moment(n) * self.small.moment(n)
    }

    /// A reusable draw generator for this channel.
    pub fn sampler(&self) -> DoubleGGSampler {
        DoubleGGSampler {
            gx: self.large.gamma_law(),
            gy: self.small.gamma_law(),
            inv_g1: 1.0 / self.large.gamma,
            inv_g2: 1.0 / self.small.gamma,
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Evaluation path for the density and the cdf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    #[default]
    Quadrature,
    MeijerG,
}

/// Double GG density at I > 0 (quadrature path).
pub fn dgg_pdf(i: f64, p: &DoubleGGParams) -> Result<f64> {
    dgg_pdf_with(i, p, EvalPath::Quadrature)
}

/// Double GG density at I > 0 along the chosen path.
pub fn dgg_pdf_with(i: f64, p: &DoubleGGParams, path: EvalPath) -> Result<f64> {
    check_irradiance(i)?;
    if i < PDF_FLOOR {
        return Ok(0.0);
    }
    Ok(ln_pdf(i, p, path)?.exp())
}

/// ln f_I(I) for I > 0.
pub fn ln_pdf(i: f64, p: &DoubleGGParams, path: EvalPath) -> Result<f64> {
    check_irradiance(i)?;
    match path {
        EvalPath::Quadrature => ln_log_density(i.ln(), p).map(|v| v - i.ln()),
        EvalPath::MeijerG => {
            // f = γ₂ p K I^{-1} G^{P,0}_{0,P}[c I^{pγ₂} | −; b]
            let spec = MeijerGSpec::new(p.p as usize + p.q as usize, 0, vec![], p.exponent_ladder())?;
            let ln_x = p.ln_meijer_base() + p.p as f64 * p.small.gamma * i.ln();
            let g = meijer_g_ln_arg(&spec, ln_x)?;
            if !(g.mantissa > 0.0) {
                return Err(Error::Accuracy {
                    context: "Meijer G density is not positive".into(),
                    estimate: g.mantissa.abs(),
                });
            }
            Ok(g.mantissa.ln() + g.ln_scale + p.small.gamma.ln() + (p.p as f64).ln() + p.ln_meijer_prefactor() - i.ln())
        }
    }
}

/// ln of the density of ln I at s, a convolution of two log-concave densities.
pub(crate) fn ln_log_density(s: f64, p: &DoubleGGParams) -> Result<f64> {
    let (x, y) = (p.large, p.small);
    let hint = 0.5 * (s - x.omega.ln() / x.gamma + y.omega.ln() / y.gamma);
    integrate_log_concave(
        |u| x.ln_log_density(s - u) + y.ln_log_density(u),
        hint,
        &QuadratureConfig::relative(QUAD_REL_TOL),
    )
}

/// ln E[h(I)] for h log-concave in ln I, given as `ln_h(ln I)`.
///
/// Integrates over (ln Ix, ln Iy) with the inner integral in ln Ix; the
/// marginal of a log-concave integrand stays log-concave, so both levels use
/// the same mode-centered rule.
pub(crate) fn ln_expectation<H: Fn(f64) -> f64>(p: &DoubleGGParams, ln_h: H, rel_tol: f64) -> Result<f64> {
    let (x, y) = (p.large, p.small);
    let inner_cfg = QuadratureConfig::relative(rel_tol * 1e-2);
    let outer_cfg = QuadratureConfig::relative(rel_tol);
    let failure = std::cell::RefCell::new(None);
    let x_mode = x.omega.ln() / x.gamma;
    let outer = |u: f64| {
        let inner = integrate_log_concave(|t| x.ln_log_density(t) + ln_h(t + u), x_mode, &inner_cfg);
        match inner {
            Ok(v) => v + y.ln_log_density(u),
            Err(Error::Accuracy { context, estimate }) => {
                failure.borrow_mut().get_or_insert(Error::Accuracy { context, estimate });
                f64::NEG_INFINITY
            }
            // integrand vanishes at this u
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let v = integrate_log_concave(outer, y.omega.ln() / y.gamma, &outer_cfg)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v)
}

/// Double GG cdf F_I(I) (quadrature path).
pub fn dgg_cdf(i: f64, p: &DoubleGGParams) -> Result<f64> {
    dgg_cdf_with(i, p, EvalPath::Quadrature)
}

/// Double GG cdf along the chosen path.
pub fn dgg_cdf_with(i: f64, p: &DoubleGGParams, path: EvalPath) -> Result<f64> {
    Ok(ln_cdf(i, p, path)?.exp().min(1.0))
}

/// ln F_I(I); accurate deep in the left tail.
pub fn ln_cdf(i: f64, p: &DoubleGGParams, path: EvalPath) -> Result<f64> {
    check_irradiance(i)?;
    match path {
        EvalPath::Quadrature => {
            let (x, y) = (p.large, p.small);
            let s = i.ln();
            let hint = y.omega.ln() / y.gamma;
            let v = integrate_log_concave(
                |u| x.ln_cdf_log(s - u) + y.ln_log_density(u),
                hint,
                &QuadratureConfig::relative(QUAD_REL_TOL),
            )?;
            Ok(v.min(0.0))
        }
        EvalPath::MeijerG => {
            // F = K G^{P,1}_{1,P+1}[c I^{pγ₂} | 1; b, 0]
            let mut b = p.exponent_ladder();
            let m_idx = b.len();
            b.push(0.0);
            let spec = MeijerGSpec::new(m_idx, 1, vec![1.0], b)?;
            let ln_x = p.ln_meijer_base() + p.p as f64 * p.small.gamma * i.ln();
            let g = meijer_g_ln_arg(&spec, ln_x)?;
            if !(g.mantissa > 0.0) {
                return Err(Error::Accuracy {
                    context: "Meijer G cdf is not positive".into(),
                    estimate: g.mantissa.abs(),
                });
            }
            Ok((g.mantissa.ln() + g.ln_scale + p.ln_meijer_prefactor()).min(0.0))
        }
    }
}

fn check_irradiance(i: f64) -> Result<()> {
    if !(i > 0.0 && i.is_finite()) {
        return Err(Error::Domain(format!("irradiance must be finite and positive, got {i}")));
    }
    Ok(())
}

/// (1+σx²)(1+σy²) − 1.
pub fn scintillation_index(p: &DoubleGGParams) -> f64 {
    let sx = p.large.normalized_variance();
    let sy = p.small.normalized_variance();
    sx + sy + sx * sy
}

/// Named reductions of the Double GG family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    GammaGamma,
    DoubleWeibull,
    K,
    None,
}

/// K when γᵢ = Ωᵢ = 1 and m₂ = 1; Gamma-Gamma when γᵢ = Ωᵢ = 1;
/// Double-Weibull when mᵢ = 1.
pub fn reduce_special_case(p: &DoubleGGParams) -> SpecialCase {
    let one = |v: f64| (v - 1.0).abs() <= SPECIAL_CASE_TOL;
    let (x, y) = (p.large, p.small);
    let gg_shape = one(x.gamma) && one(y.gamma) && one(x.omega) && one(y.omega);
    if gg_shape && one(y.m) {
        SpecialCase::K
    } else if gg_shape {
        SpecialCase::GammaGamma
    } else if one(x.m) && one(y.m) {
        SpecialCase::DoubleWeibull
    } else {
        SpecialCase::None
    }
}

/// One irradiance draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrradianceSample {
    pub value: f64,
}

/// Draws I = Gx^{1/γ₁}·Gy^{1/γ₂} with Gx ~ Gamma(m₁, Ω₁/m₁), Gy ~ Gamma(m₂, Ω₂/m₂).
///
/// Gamma variates come from `rand_distr::Gamma` (Marsaglia–Tsang).
#[derive(Debug, Clone, Copy)]
pub struct DoubleGGSampler {
    gx: Gamma<f64>,
    gy: Gamma<f64>,
    inv_g1: f64,
    inv_g2: f64,
}

impl DoubleGGSampler {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.gx.sample(rng).powf(self.inv_g1);
        let y = self.gy.sample(rng).powf(self.inv_g2);
        x * y
    }
}

/// `n` independent irradiance draws.
pub fn sample<R: Rng + ?Sized>(p: &DoubleGGParams, rng: &mut R, n: usize) -> Vec<IrradianceSample> {
    let s = p.sampler();
    (0..n).map(|_| IrradianceSample { value: s.draw(rng) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;
    use crate::specfun::quad::{integrate, integrate_semi_infinite};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn gg(gamma: f64, m: f64, omega: f64) -> GGParams {
        GGParams::new(gamma, m, omega).unwrap()
    }

    fn gamma_gamma(m1: f64, m2: f64) -> DoubleGGParams {
        DoubleGGParams::new(gg(1.0, m1, 1.0), gg(1.0, m2, 1.0), 1, 1).unwrap()
    }

    /// K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt
    fn bessel_k(nu: f64, x: f64) -> f64 {
        let cfg = QuadratureConfig::relative(1e-13);
        integrate(|t| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, 30.0, &cfg)
            .unwrap()
            .value
    }

    fn gamma_gamma_oracle(i: f64, a: f64, b: f64) -> f64 {
        let lg = |x: f64| crate::specfun::gamma::log_gamma(x).unwrap();
        2.0 * ((0.5 * (a + b)) * (a * b).ln() + (0.5 * (a + b) - 1.0) * i.ln() - lg(a) - lg(b)).exp()
            * bessel_k(a - b, 2.0 * (a * b * i).sqrt())
    }

    #[test]
    fn gg_pdf_reductions() {
        let v = gg_pdf(1.0, &gg(1.0, 1.0, 1.0)).unwrap();
        assert!((v - 0.367_879_4).abs() < 1e-7);
        assert!(rel(v, (-1.0f64).exp()) < 1e-14);
        let v = gg_pdf(1.0, &gg(2.0, 1.0, 1.0)).unwrap();
        assert!((v - 0.735_758_9).abs() < 1e-7);
        assert!(gg_pdf(0.0, &gg(1.0, 1.0, 1.0)).is_err());
        assert!(gg_pdf(-1.0, &gg(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn gg_pdf_normalization() {
        let p = gg(2.169, 0.55, 1.5793);
        let cfg = QuadratureConfig::relative(1e-12);
        let mass = integrate_semi_infinite(|x| gg_pdf(x, &p).unwrap(), &cfg).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gg_moments() {
        let p = gg(2.3, 1.7, 0.8);
        assert!((gg_moment(0, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((gg_moment(2, &gg(1.0, 1.0, 1.0)).unwrap() - 2.0).abs() < 1e-13);
        let unit = GGParams::unit_mean(2.1, 4.0).unwrap();
        assert!((gg_moment(1, &unit).unwrap() - 1.0).abs() < 1e-10);
        // quadrature oracle for the third moment
        let cfg = QuadratureConfig::relative(1e-12);
        let m3 = integrate_semi_infinite(|x| x.powi(3) * gg_pdf(x, &p).unwrap(), &cfg).unwrap();
        assert!(rel(gg_moment(3, &p).unwrap(), m3) < 1e-9);
    }

    #[test]
    fn constructor_rejects_invalid() {
        assert!(GGParams::new(0.0, 1.0, 1.0).is_err());
        assert!(GGParams::new(1.0, 0.4, 1.0).is_err());
        assert!(GGParams::new(1.0, 1.0, -1.0).is_err());
        let a = gg(2.0, 1.0, 1.0);
        let b = gg(1.0, 1.0, 1.0);
        assert!(DoubleGGParams::new(a, b, 4, 2).is_err());
        assert!(DoubleGGParams::new(a, b, 0, 1).is_err());
        assert!(DoubleGGParams::new(a, b, 3, 1).is_err());
        assert!(DoubleGGParams::new(a, b, 2, 1).is_ok());
    }

    #[test]
    fn snapping_makes_ratio_exact_and_keeps_mean() {
        let p = Preset::PlaneModerate.params().unwrap();
        assert!(!p.is_exact());
        let s = p.snapped().unwrap();
        assert!(s.is_exact());
        assert!(rel(s.large().moment(1.0), p.large().moment(1.0)) < 1e-12);
        assert_eq!(s.small(), p.small());
    }

    #[test]
    fn gamma_gamma_matches_bessel_form() {
        let p = gamma_gamma(4.0, 4.5);
        for &i in &[1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let want = gamma_gamma_oracle(i, 4.0, 4.5);
            for path in [EvalPath::Quadrature, EvalPath::MeijerG] {
                let got = dgg_pdf_with(i, &p, path).unwrap();
                assert!(rel(got, want) < 1e-8, "I={i} {path:?}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn double_weibull_matches_product_integral() {
        let x = GGParams::unit_mean(2.0, 1.0).unwrap();
        let y = GGParams::unit_mean(1.0, 1.0).unwrap();
        let p = DoubleGGParams::new(x, y, 2, 1).unwrap();
        let cfg = QuadratureConfig::relative(1e-12);
        for &i in &[0.1, 1.0, 5.0] {
            let oracle = integrate_semi_infinite(|t| x.ln_pdf(i / t).exp() * y.ln_pdf(t).exp() / t, &cfg).unwrap();
            let got = dgg_pdf(i, &p).unwrap();
            assert!(rel(got, oracle) < 1e-8, "I={i}");
        }
    }

    #[test]
    fn meijer_and_quadrature_paths_agree() {
        let p = Preset::PlaneStrong.params().unwrap().snapped().unwrap();
        assert_eq!((p.p(), p.q()), (17, 7));
        for &i in &[0.05, 0.5, 1.0, 2.0, 10.0] {
            let a = dgg_pdf_with(i, &p, EvalPath::MeijerG).unwrap();
            let b = dgg_pdf_with(i, &p, EvalPath::Quadrature).unwrap();
            assert!(rel(a, b) < 1e-6, "pdf I={i}: {a} vs {b}");
            let a = dgg_cdf_with(i, &p, EvalPath::MeijerG).unwrap();
            let b = dgg_cdf_with(i, &p, EvalPath::Quadrature).unwrap();
            assert!(rel(a, b) < 1e-6, "cdf I={i}: {a} vs {b}");
        }
    }

    #[test]
    fn cdf_limits() {
        let p = Preset::PlaneWeak.params().unwrap();
        assert!((dgg_cdf(1e6, &p).unwrap() - 1.0).abs() < 1e-6);
        assert!(dgg_cdf(1e-9, &p).unwrap() < 1e-12);
        assert!(dgg_cdf(0.0, &p).is_err());
    }

    #[test]
    fn cdf_equals_integrated_density() {
        let p = Preset::PlaneModerate.params().unwrap();
        let cfg = QuadratureConfig::relative(1e-10);
        let mass = integrate(|i| if i > 0.0 { dgg_pdf(i, &p).unwrap() } else { 0.0 }, 0.0, 1.0, &cfg)
            .unwrap()
            .value;
        assert!(rel(dgg_cdf(1.0, &p).unwrap(), mass) < 1e-6);
    }

    #[test]
    fn density_below_floor_is_zero() {
        let p = Preset::PlaneStrong.params().unwrap();
        assert_eq!(dgg_pdf(1e-10, &p).unwrap(), 0.0);
    }

    #[test]
    fn scintillation_index_examples() {
        let p = gamma_gamma(34.24, 32.79);
        let want = (1.0 + 1.0 / 34.24) * (1.0 + 1.0 / 32.79) - 1.0;
        assert!(rel(scintillation_index(&p), want) < 1e-10);
        assert!((scintillation_index(&p) - 0.0606).abs() < 1e-4);
        assert!(scintillation_index(&gamma_gamma(1e6, 1e6)) < 3e-6);
    }

    #[test]
    fn special_case_tags() {
        assert_eq!(reduce_special_case(&gamma_gamma(4.0, 4.5)), SpecialCase::GammaGamma);
        assert_eq!(reduce_special_case(&gamma_gamma(2.0, 1.0)), SpecialCase::K);
        let dw = DoubleGGParams::new(gg(2.0, 1.0, 0.7), gg(1.0, 1.0, 1.3), 2, 1).unwrap();
        assert_eq!(reduce_special_case(&dw), SpecialCase::DoubleWeibull);
        let none = Preset::PlaneStrong.params().unwrap();
        assert_eq!(reduce_special_case(&none), SpecialCase::None);
    }

    #[test]
    fn sampling_is_deterministic_with_unit_mean() {
        let p = Preset::PlaneWeak.params().unwrap();
        let a = sample(&p, &mut ChaCha8Rng::seed_from_u64(7), 1000);
        let b = sample(&p, &mut ChaCha8Rng::seed_from_u64(7), 1000);
        assert_eq!(a, b);
        let n = 200_000;
        let xs = sample(&p, &mut ChaCha8Rng::seed_from_u64(11), n);
        let mean = xs.iter().map(|s| s.value).sum::<f64>() / n as f64;
        let var = xs.iter().map(|s| (s.value - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt());
        assert!(xs.iter().all(|s| s.value >= 0.0));
    }
}
