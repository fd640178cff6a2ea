use std::f64::consts::PI;

use super::asymptotic::asymptotic_coefficients;
use super::ber::{closed_form_admissible, delta, split_ladder, BerRationalPair};
use super::{LinkQuery, PerfPath};
use crate::dist::{ln_expectation, DoubleGGParams};
use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma_pos;
use crate::specfun::{meijer_g_ln_arg, MeijerGSpec};

const LAMBDA_REL_TOL: f64 = 1e-10;

/// Per-branch constants of the Λ closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimoBranchCoeffs {
    /// γ₂ p^{m₂+1/2} q^{m₁−1/2} (2π)^{1−(p+q)/2} / (Γ(m₁)Γ(m₂))
    pub alpha: f64,
    /// (pΩ₂/m₂)^p (qΩ₁/m₁)^q
    pub omega: f64,
    pub k: u32,
    pub l: u32,
}

impl SimoBranchCoeffs {
    pub fn for_channel(p: &DoubleGGParams) -> Self {
        let pair = BerRationalPair::for_channel(p);
        Self {
            alpha: ln_alpha(p).exp(),
            omega: (-p.ln_meijer_base()).exp(),
            k: pair.k,
            l: pair.l,
        }
    }
}

fn ln_alpha(p: &DoubleGGParams) -> f64 {
    p.small().gamma.ln() + (p.p() as f64).ln() + p.ln_meijer_prefactor()
}

/// e^{−x²/2}/12 + e^{−2x²/3}/4, an approximation of Q(x).
pub fn q_approx(x: f64) -> f64 {
    (-0.5 * x * x).exp() / 12.0 + (-2.0 * x * x / 3.0).exp() / 4.0
}

/// Λ = E[exp(−γ̄I²/(υN))] for one branch of an N-aperture receiver.
pub fn lambda(p: &DoubleGGParams, avg_snr: f64, upsilon: f64, apertures: usize, path: PerfPath) -> Result<f64> {
    Ok(ln_lambda(p, avg_snr, upsilon, apertures, path)?.exp())
}

/// ln of [`lambda`].
pub fn ln_lambda(p: &DoubleGGParams, avg_snr: f64, upsilon: f64, apertures: usize, path: PerfPath) -> Result<f64> {
    if !(avg_snr > 0.0 && upsilon > 0.0 && apertures >= 1) {
        return Err(Error::Domain(format!(
            "Λ needs γ̄ > 0, υ > 0 and N ≥ 1, got {avg_snr}, {upsilon}, {apertures}"
        )));
    }
    let t = avg_snr / (upsilon * apertures as f64);
    let pair = BerRationalPair::for_channel(p);
    let admissible = closed_form_admissible(p, &pair, pair.lambda_order(p));
    match path {
        PerfPath::Quadrature => lambda_quadrature(p, t),
        PerfPath::ClosedForm => {
            admissible?;
            lambda_closed_form(p, &pair, t)
        }
        PerfPath::Auto => match admissible.and_then(|_| lambda_closed_form(p, &pair, t)) {
            Ok(v) => Ok(v),
            Err(_) => lambda_quadrature(p, t),
        },
    }
}

fn lambda_quadrature(p: &DoubleGGParams, t: f64) -> Result<f64> {
    ln_expectation(p, |s| -t * (2.0 * s).exp(), LAMBDA_REL_TOL)
}

fn lambda_closed_form(p: &DoubleGGParams, pair: &BerRationalPair, t: f64) -> Result<f64> {
    let (lf, kf) = (pair.l as f64, pair.k as f64);
    let big_p = (p.p() + p.q()) as f64;
    let b = split_ladder(p, pair.k);
    let spec = MeijerGSpec::new(b.len(), pair.l as usize, delta(pair.l, 1.0).collect(), b)?;
    // z = (l/(γ̄/(υN)))^l / (ω^k k^{kP})
    let ln_z = kf * p.ln_meijer_base() + lf * (lf / t).ln() - kf * big_p * kf.ln();
    let g = meijer_g_ln_arg(&spec, ln_z)?;
    if !(g.mantissa > 0.0) {
        return Err(Error::Accuracy {
            context: "Meijer G Λ is not positive".into(),
            estimate: g.mantissa.abs(),
        });
    }
    let ln_pref = ln_alpha(p) - 0.5 * lf.ln() + (p.large().m + p.small().m) * kf.ln()
        - 2f64.ln()
        - 0.5 * (lf - 1.0 + (kf - 1.0) * big_p) * (2.0 * PI).ln();
    Ok(g.mantissa.ln() + g.ln_scale + ln_pref)
}

/// Optimal-combining BER over N = `branches.len()` apertures with Q replaced
/// by [`q_approx`]: (1/12)∏Λ(n,4) + (1/4)∏Λ(n,3).
pub fn ber_simo_oc(branches: &[DoubleGGParams], q: &LinkQuery, path: PerfPath) -> Result<f64> {
    Ok(ln_ber_simo_oc(branches, q, path)?.exp())
}

/// ln of [`ber_simo_oc`].
pub fn ln_ber_simo_oc(branches: &[DoubleGGParams], q: &LinkQuery, path: PerfPath) -> Result<f64> {
    check_branches(branches, q)?;
    let n = branches.len();
    let mut ln4 = 0.0;
    let mut ln3 = 0.0;
    for b in branches {
        ln4 += ln_lambda(b, q.avg_snr, 4.0, n, path)?;
        ln3 += ln_lambda(b, q.avg_snr, 3.0, n, path)?;
    }
    Ok(chiani_mix(ln4, ln3))
}

/// ln(e^{ln4}/12 + e^{ln3}/4) without underflow.
fn chiani_mix(ln4: f64, ln3: f64) -> f64 {
    let a = ln4 - 12f64.ln();
    let b = ln3 - 4f64.ln();
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// High-SNR form of [`ber_simo_oc`] with each Λ replaced by its leading term
/// A∏Γ(b_j−b_k)·Γ(β/2)·(υN/γ̄)^{β/2}/2, β = pγ₂b_k.
pub fn ber_simo_asymptotic(branches: &[DoubleGGParams], q: &LinkQuery) -> Result<f64> {
    check_branches(branches, q)?;
    let n = branches.len() as f64;
    let mut ln4 = 0.0;
    let mut ln3 = 0.0;
    for b in branches {
        let c = asymptotic_coefficients(b)?;
        let base = c.ln_pdf_coefficient() + ln_gamma_pos(0.5 * c.beta) - 2f64.ln();
        ln4 += base + 0.5 * c.beta * (4.0 * n / q.avg_snr).ln();
        ln3 += base + 0.5 * c.beta * (3.0 * n / q.avg_snr).ln();
    }
    Ok(chiani_mix(ln4, ln3).exp())
}

fn check_branches(branches: &[DoubleGGParams], q: &LinkQuery) -> Result<()> {
    q.validate()?;
    if branches.is_empty() {
        return Err(Error::InvalidParams("at least one branch is required".into()));
    }
    if branches.len() != q.apertures {
        return Err(Error::InvalidParams(format!(
            "{} branches given for {} apertures",
            branches.len(),
            q.apertures
        )));
    }
    Ok(())
}
