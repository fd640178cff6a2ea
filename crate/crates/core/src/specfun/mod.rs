//! Special functions and quadrature used by the channel model.

pub mod erfc;
pub mod gamma;
pub mod meijer;
pub mod quad;

pub use erfc::{erfc, ln_erfc};
pub use gamma::{gamma_p, gamma_q, ln_gamma_p, log_gamma, log_gamma_complex};
pub use meijer::{meijer_g, meijer_g_ln_arg, MeijerGSpec, ScaledValue};
pub use quad::{integrate, integrate_log_concave, integrate_semi_infinite, QuadEstimate, QuadratureConfig};
