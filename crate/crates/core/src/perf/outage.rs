use super::{infeasible, LinkQuery, PerfPath, ORDER_CAP};
use crate::dist::{ln_cdf, DoubleGGParams, EvalPath};
use crate::error::{Error, Result};

/// P(γ̄I² < γ_th) = F_I(√(γ_th/γ̄)).
///
/// `ClosedForm` evaluates the Meijer G cdf, of size p+q+2, and needs exact
/// p/q. `Auto` takes the closed form when admissible.
pub fn outage_probability(p: &DoubleGGParams, q: &LinkQuery, path: PerfPath) -> Result<f64> {
    q.require_siso()?;
    let i = (q.threshold_snr / q.avg_snr).sqrt();
    let order = (p.p() + p.q()) as usize + 2;
    let closed_ok = || -> Result<()> {
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
        Ok(())
    };
    let eval = match path {
        PerfPath::Quadrature => EvalPath::Quadrature,
        PerfPath::ClosedForm => {
            closed_ok()?;
            EvalPath::MeijerG
        }
        PerfPath::Auto => {
            if closed_ok().is_ok() {
                EvalPath::MeijerG
            } else {
                EvalPath::Quadrature
            }
        }
    };
    match ln_cdf(i, p, eval) {
        Ok(v) => Ok(v.exp().min(1.0)),
        Err(Error::Accuracy { .. }) | Err(Error::UnsupportedSpec(_)) if path == PerfPath::Auto && eval == EvalPath::MeijerG => {
            Ok(ln_cdf(i, p, EvalPath::Quadrature)?.exp().min(1.0))
        }
        Err(e) => Err(e),
    }
}
