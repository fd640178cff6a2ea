//! Link performance: outage probability, SISO and SIMO average BER for OOK,
//! asymptotic expansions and diversity orders.
//!
//! Every closed form has a quadrature counterpart. Closed forms are Meijer G
//! instances whose size grows with the integers p, q (and l, k for the BER),
//! so they run only when exact and within [`ORDER_CAP`]; `Auto` falls back to
//! quadrature otherwise.

mod asymptotic;
mod ber;
mod invert;
mod outage;
mod simo;

pub use asymptotic::{
    asymptotic_coefficients, ber_siso_asymptotic, diversity_order_simo, diversity_order_siso, AsymptoticCoefficients,
};
pub use ber::{ber_siso, ber_siso_chiani, ln_ber_siso, BerRationalPair};
pub use invert::{invert_db, invert_db_in, DB_RANGE, DB_TOL};
pub use outage::outage_probability;
pub use simo::{ber_simo_asymptotic, ber_simo_oc, lambda, ln_ber_simo_oc, ln_lambda, q_approx, SimoBranchCoeffs};

use crate::error::{Error, Result};

/// Largest Meijer G size (parameter count) a closed form may use.
pub const ORDER_CAP: usize = 64;

/// Smallest accepted gap between the leading and any other near-origin exponent.
pub const EPS_SEP: f64 = 1e-6;

/// Largest denominator k for the BER pair l/k.
pub const BER_MAX_DEN: u32 = 8;

/// Evaluation path for performance metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerfPath {
    Quadrature,
    ClosedForm,
    #[default]
    Auto,
}

/// Operating point: average SNR γ̄, outage threshold γ_th and aperture count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQuery {
    pub avg_snr: f64,
    pub threshold_snr: f64,
    pub apertures: usize,
}

impl LinkQuery {
    pub fn new(avg_snr: f64, threshold_snr: f64, apertures: usize) -> Result<Self> {
        let q = Self {
            avg_snr,
            threshold_snr,
            apertures,
        };
        q.validate()?;
        Ok(q)
    }

    /// SNRs in dB.
    pub fn from_db(avg_snr_db: f64, threshold_snr_db: f64, apertures: usize) -> Result<Self> {
        Self::new(db_to_linear(avg_snr_db), db_to_linear(threshold_snr_db), apertures)
    }

    /// A SISO query at average SNR `avg_snr_db` with a 0 dB threshold.
    pub fn siso_db(avg_snr_db: f64) -> Result<Self> {
        Self::from_db(avg_snr_db, 0.0, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.avg_snr > 0.0 && self.avg_snr.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "average SNR must be positive, got {}",
                self.avg_snr
            )));
        }
        if !(self.threshold_snr > 0.0 && self.threshold_snr.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "threshold SNR must be positive, got {}",
                self.threshold_snr
            )));
        }
        if self.apertures < 1 {
            return Err(Error::InvalidParams("at least one aperture is required".into()));
        }
        Ok(())
    }

    fn require_siso(&self) -> Result<()> {
        self.validate()?;
        if self.apertures != 1 {
            return Err(Error::InvalidParams(format!(
                "SISO metric requested with {} apertures",
                self.apertures
            )));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn infeasible(order: usize) -> Error {
    Error::InfeasibleOrder {
        order,
        cap: ORDER_CAP,
        fallback: "quadrature",
    }
}
