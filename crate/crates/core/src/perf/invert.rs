use crate::error::{Error, Result};

/// Default search range for SNR inversion, in dB.
pub const DB_RANGE: (f64, f64) = (0.0, 120.0);

/// Bracket width at which inversion stops, in dB.
pub const DB_TOL: f64 = 0.01;

/// The dB value where a decreasing metric crosses `target`, on [`DB_RANGE`].
pub fn invert_db<F: FnMut(f64) -> Result<f64>>(metric: F, target: f64) -> Result<f64> {
    invert_db_in(metric, target, DB_RANGE.0, DB_RANGE.1)
}

/// Bisection on [lo, hi] dB to [`DB_TOL`]; the metric must decrease in dB.
pub fn invert_db_in<F: FnMut(f64) -> Result<f64>>(mut metric: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) || !(target > 0.0) {
        return Err(Error::Domain(format!(
            "invalid inversion query: target {target} on [{lo}, {hi}]"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = metric(lo)?;
    let f_hi = metric(hi)?;
    if !(f_lo >= target && f_hi <= target) {
        return Err(Error::NoSolution(format!(
            "target {target:e} not bracketed: metric is {f_lo:e} at {lo} dB and {f_hi:e} at {hi} dB"
        )));
    }
    while hi - lo > DB_TOL {
        let mid = 0.5 * (lo + hi);
        if metric(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
