//! Double Generalized Gamma turbulence fading for free-space optical links.
//!
//! * [`specfun`]: log-gamma, erfc, incomplete gamma, Meijer G, quadrature.
//! * [`dist`]: GG and Double GG densities, cdf, moments, sampling.
//! * [`atmos`]: turbulence conditions to channel parameters.
//! * [`perf`]: outage, SISO and SIMO BER, asymptotics and diversity order.
//! * [`mc`]: seeded Monte Carlo estimators, reproducible across thread counts.
//! * [`fit`]: log-irradiance curves and NRMSE fits of the shape parameters.
//! * [`presets`]: reference channels from weak to strong turbulence.

pub mod atmos;
pub mod dist;
pub mod error;
pub mod fit;
pub mod mc;
pub mod perf;
pub mod presets;
pub mod specfun;

pub use error::{Error, Result};
