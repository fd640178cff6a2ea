use std::f64::consts::PI;

use super::{LinkQuery, EPS_SEP};
use crate::dist::DoubleGGParams;
use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma_pos;

/// Leading near-origin term of the density,
/// f(I) ≈ A ∏_{j≠k} Γ(b_j − b_k) I^{β−1} with β = pγ₂b_k.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoefficients {
    /// γ₂ p K c^{b_k}, with K and c the Meijer prefactor and base
    pub a: f64,
    /// min(m₁/q, m₂/p)
    pub b_k: f64,
    /// the other ladder exponents, each above b_k by at least [`EPS_SEP`]
    pub b_j_list: Vec<f64>,
    /// pγ₂b_k
    pub beta: f64,
    ln_a: f64,
}

impl AsymptoticCoefficients {
    /// ln(A ∏ Γ(b_j − b_k)).
    pub fn ln_pdf_coefficient(&self) -> f64 {
        self.ln_a + self.b_j_list.iter().map(|b| ln_gamma_pos(b - self.b_k)).sum::<f64>()
    }
}

/// Near-origin expansion coefficients; errors when two ladder exponents tie
/// for the minimum within [`EPS_SEP`].
pub fn asymptotic_coefficients(p: &DoubleGGParams) -> Result<AsymptoticCoefficients> {
    let ladder = p.exponent_ladder();
    let (k_idx, b_k) = ladder
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("ladder has p+q ≥ 2 entries");
    let mut b_j_list = Vec::with_capacity(ladder.len() - 1);
    for (j, &b) in ladder.iter().enumerate() {
        if j == k_idx {
            continue;
        }
        if b - b_k < EPS_SEP {
            return Err(Error::DegenerateExponent { b_k, b_j: b });
        }
        b_j_list.push(b);
    }
    let ln_a = p.small().gamma.ln() + (p.p() as f64).ln() + p.ln_meijer_prefactor() + b_k * p.ln_meijer_base();
    Ok(AsymptoticCoefficients {
        a: ln_a.exp(),
        b_k,
        b_j_list,
        beta: p.p() as f64 * p.small().gamma * b_k,
        ln_a,
    })
}

/// A∏Γ(b_j−b_k)·(2/√γ̄)^β·Γ((1+β)/2)/(2√π β).
pub fn ber_siso_asymptotic(p: &DoubleGGParams, q: &LinkQuery) -> Result<f64> {
    q.require_siso()?;
    let c = asymptotic_coefficients(p)?;
    let beta = c.beta;
    let ln = c.ln_pdf_coefficient() + beta * (2.0 / q.avg_snr.sqrt()).ln() + ln_gamma_pos(0.5 * (1.0 + beta))
        - (2.0 * PI.sqrt() * beta).ln();
    Ok(ln.exp())
}

/// 0.5·pγ₂·min(m₁/q, m₂/p), the high-SNR decay exponent of the BER in γ̄.
pub fn diversity_order_siso(p: &DoubleGGParams) -> f64 {
    let (pf, qf) = (p.p() as f64, p.q() as f64);
    0.5 * pf * p.small().gamma * (p.large().m / qf).min(p.small().m / pf)
}

/// Sum of the per-branch diversity orders.
pub fn diversity_order_simo(branches: &[DoubleGGParams]) -> f64 {
    branches.iter().map(diversity_order_siso).sum()
}
