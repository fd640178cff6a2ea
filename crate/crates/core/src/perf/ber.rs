use std::f64::consts::PI;

use super::simo::ber_simo_oc;
use super::{infeasible, LinkQuery, PerfPath, BER_MAX_DEN, ORDER_CAP};
use crate::atmos::rational_ratio;
use crate::dist::{ln_expectation, DoubleGGParams, EXACT_RATIO_TOL};
use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma_pos;
use crate::specfun::{ln_erfc, meijer_g_ln_arg, MeijerGSpec};

const BER_REL_TOL: f64 = 1e-9;

/// Integers with l/k ≈ pγ₂/2, the exponent that turns I^{pγ₂} into (I²)^{l/k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BerRationalPair {
    pub l: u32,
    pub k: u32,
}

impl BerRationalPair {
    /// The pair chosen for a channel, with k ≤ [`BER_MAX_DEN`].
    pub fn for_channel(p: &DoubleGGParams) -> Self {
        let (l, k) = rational_ratio(target(p), BER_MAX_DEN);
        Self { l, k }
    }

    /// Whether l/k equals pγ₂/2 to within the exact-ratio tolerance.
    pub fn is_exact(&self, p: &DoubleGGParams) -> bool {
        let t = target(p);
        ((self.l as f64 / self.k as f64) - t).abs() / t <= EXACT_RATIO_TOL
    }

    /// The channel with γ₂ = 2l/(kp) and γ₁ = pγ₂/q; both Ω are re-derived
    /// so the factor means are unchanged.
    pub fn snap_channel(&self, p: &DoubleGGParams) -> Result<DoubleGGParams> {
        let gamma2 = 2.0 * self.l as f64 / (self.k as f64 * p.p() as f64);
        let gamma1 = p.p() as f64 * gamma2 / p.q() as f64;
        DoubleGGParams::new(p.large().with_gamma(gamma1)?, p.small().with_gamma(gamma2)?, p.p(), p.q())
    }

    /// Meijer G size of the SISO BER closed form, k(p+q) + 2l.
    pub fn ber_order(&self, p: &DoubleGGParams) -> usize {
        (self.k * (p.p() + p.q()) + 2 * self.l) as usize
    }

    /// Meijer G size of Λ, k(p+q) + l.
    pub fn lambda_order(&self, p: &DoubleGGParams) -> usize {
        (self.k * (p.p() + p.q()) + self.l) as usize
    }
}

fn target(p: &DoubleGGParams) -> f64 {
    0.5 * p.p() as f64 * p.small().gamma
}

/// Checks that a closed form of the given size is admissible for the channel.
pub(super) fn closed_form_admissible(p: &DoubleGGParams, pair: &BerRationalPair, order: usize) -> Result<()> {
    if order > ORDER_CAP {
        return Err(infeasible(order));
    }
    if !p.is_exact() {
        return Err(Error::InexactRational(format!(
            "γ1/γ2 differs from p/q = {}/{} by {:.2e}",
            p.p(),
            p.q(),
            p.ratio_mismatch()
        )));
    }
    if !pair.is_exact(p) {
        return Err(Error::InexactRational(format!(
            "pγ2/2 = {:.9} differs from l/k = {}/{}",
            target(p),
            pair.l,
            pair.k
        )));
    }
    Ok(())
}

/// Δ(n, a) = a/n, (a+1)/n, …, (a+n−1)/n.
pub(super) fn delta(n: u32, a: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (a + i as f64) / n as f64)
}

/// J_k(q, 1−m₁) ∪ J_k(p, 1−m₂): the exponent ladder split k ways.
pub(super) fn split_ladder(p: &DoubleGGParams, k: u32) -> Vec<f64> {
    p.exponent_ladder().into_iter().flat_map(|b| delta(k, b)).collect()
}

/// Average OOK bit error rate E[½ erfc(√γ̄ I / 2)] for a single aperture.
///
/// `ClosedForm` needs exact p/q and l/k and a Meijer G size k(p+q)+2l within
/// the cap. `Auto` falls back to quadrature when either fails.
pub fn ber_siso(p: &DoubleGGParams, q: &LinkQuery, path: PerfPath) -> Result<f64> {
    Ok(ln_ber_siso(p, q, path)?.exp())
}

/// ln of [`ber_siso`]; stays finite far below the f64 range of the BER itself.
pub fn ln_ber_siso(p: &DoubleGGParams, q: &LinkQuery, path: PerfPath) -> Result<f64> {
    q.require_siso()?;
    let pair = BerRationalPair::for_channel(p);
    let admissible = closed_form_admissible(p, &pair, pair.ber_order(p));
    match path {
        PerfPath::Quadrature => ber_quadrature(p, q.avg_snr),
        PerfPath::ClosedForm => {
            admissible?;
            ber_closed_form(p, &pair, q.avg_snr)
        }
        PerfPath::Auto => match admissible.and_then(|_| ber_closed_form(p, &pair, q.avg_snr)) {
            Ok(v) => Ok(v),
            Err(_) => ber_quadrature(p, q.avg_snr),
        },
    }
}

/// Single-aperture BER with Q replaced by its two-exponential approximation:
/// (1/12)Λ(4) + (1/4)Λ(3).
pub fn ber_siso_chiani(p: &DoubleGGParams, q: &LinkQuery, path: PerfPath) -> Result<f64> {
    q.require_siso()?;
    ber_simo_oc(std::slice::from_ref(p), q, path)
}

fn ber_quadrature(p: &DoubleGGParams, avg_snr: f64) -> Result<f64> {
    let a = 0.5 * avg_snr.sqrt();
    let ln_half = 0.5f64.ln();
    ln_expectation(p, |s| ln_half + ln_erfc(a * s.exp()), BER_REL_TOL)
}

fn ber_closed_form(p: &DoubleGGParams, pair: &BerRationalPair, avg_snr: f64) -> Result<f64> {
    let (l, k) = (pair.l, pair.k);
    let (lf, kf) = (l as f64, k as f64);
    let (pf, qf) = (p.p() as f64, p.q() as f64);
    let big_p = pf + qf;
    let (m1, m2) = (p.large().m, p.small().m);

    let mut b = split_ladder(p, k);
    let m_idx = b.len();
    b.extend(delta(l, 0.0));
    let a: Vec<f64> = delta(l, 1.0).chain(delta(l, 0.5)).collect();
    let spec = MeijerGSpec::new(m_idx, 2 * l as usize, a, b)?;

    let ln_z = kf * p.ln_meijer_base() + lf * (4.0 * lf).ln() - lf * avg_snr.ln() - kf * big_p * kf.ln();
    let g = meijer_g_ln_arg(&spec, ln_z)?;
    if !(g.mantissa > 0.0) {
        return Err(Error::Accuracy {
            context: "Meijer G BER is not positive".into(),
            estimate: g.mantissa.abs(),
        });
    }
    let ln_pref = p.small().gamma.ln() + (m1 + m2) * kf.ln() + (m2 + 0.5) * pf.ln() + (m1 - 0.5) * qf.ln()
        - 1.5 * 2f64.ln()
        - lf.ln()
        - ln_gamma_pos(m1)
        - ln_gamma_pos(m2)
        - (0.5 * (lf + kf * big_p) - 1.0) * (2.0 * PI).ln();
    Ok(g.mantissa.ln() + g.ln_scale + ln_pref)
}
