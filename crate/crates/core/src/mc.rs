//! Monte Carlo oracle for the closed forms.
//!
//! Estimators average the conditional error probability given the fade
//! rather than simulating bits and noise. Samples are split into chunks of
//! `batch` draws; chunk c uses its own ChaCha8 stream (`set_stream(c)`) under
//! the common seed, chunks run in parallel, and per-chunk statistics are merged
//! in chunk order, so results are bit-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::{DoubleGGParams, DoubleGGSampler};
use crate::error::{Error, Result};
use crate::specfun::erfc;

/// Sample budget and stream layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub batch: u64,
}

impl McConfig {
    pub const DEFAULT_BATCH: u64 = 1 << 16;

    pub fn new(n_samples: u64, seed: u64) -> Result<Self> {
        Self::with_batch(n_samples, seed, Self::DEFAULT_BATCH)
    }

    pub fn with_batch(n_samples: u64, seed: u64, batch: u64) -> Result<Self> {
        let c = Self { n_samples, seed, batch };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 || self.batch < 1 {
            return Err(Error::InvalidParams(format!(
                "n_samples and batch must be at least 1, got {} and {}",
                self.n_samples, self.batch
            )));
        }
        Ok(())
    }
}

/// Sample mean with its standard error sample-std/√n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl McEstimate {
    /// |mean − value| in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.mean - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Welford accumulator; `merge` is the pairwise update of Chan et al.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate {
            mean: self.mean,
            std_error: (var.max(0.0) / self.n as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Runs `score` once per draw of the N irradiances, writing one value per
/// output slot, and returns one estimate per slot.
fn run<F>(samplers: &[DoubleGGSampler], outputs: usize, cfg: &McConfig, score: F) -> Result<Vec<McEstimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    cfg.validate()?;
    let chunks = cfg.n_samples.div_ceil(cfg.batch);
    let per_chunk: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let len = cfg.batch.min(cfg.n_samples - c * cfg.batch);
            let mut acc = vec![Moments::default(); outputs];
            let mut draws = vec![0.0; samplers.len()];
            let mut out = vec![0.0; outputs];
            for _ in 0..len {
                for (d, s) in draws.iter_mut().zip(samplers) {
                    *d = s.draw(&mut rng);
                }
                score(&draws, &mut out);
                for (a, &x) in acc.iter_mut().zip(&out) {
                    a.push(x);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); outputs];
    for chunk in &per_chunk {
        for (t, m) in total.iter_mut().zip(chunk) {
            t.merge(m);
        }
    }
    Ok(total.iter().map(Moments::estimate).collect())
}

fn check_snr(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParams(format!("{what} must be positive, got {x}")));
    }
    Ok(())
}

/// E[½ erfc(√γ̄ I / 2)] for a single aperture.
pub fn estimate_ber_siso(p: &DoubleGGParams, avg_snr: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(estimate_ber_siso_sweep(p, &[avg_snr], cfg)?[0])
}

/// [`estimate_ber_siso`] at several SNRs from one set of draws.
pub fn estimate_ber_siso_sweep(p: &DoubleGGParams, avg_snrs: &[f64], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    for &s in avg_snrs {
        check_snr(s, "average SNR")?;
    }
    let roots: Vec<f64> = avg_snrs.iter().map(|s| 0.5 * s.sqrt()).collect();
    run(&[p.sampler()], roots.len(), cfg, |i, out| {
        for (o, a) in out.iter_mut().zip(&roots) {
            *o = 0.5 * erfc(a * i[0]);
        }
    })
}

/// Fraction of draws with γ̄I² < γ_th.
pub fn estimate_outage(p: &DoubleGGParams, avg_snr: f64, threshold_snr: f64, cfg: &McConfig) -> Result<McEstimate> {
    check_snr(avg_snr, "average SNR")?;
    check_snr(threshold_snr, "threshold SNR")?;
    let ratio = threshold_snr / avg_snr;
    Ok(run(&[p.sampler()], 1, cfg, |i, out| out[0] = f64::from(i[0] * i[0] < ratio))?[0])
}

/// Outage and BER at several SNRs from one set of draws; the outage threshold
/// is fixed at `threshold_snr`. Returns (outage, ber) per SNR.
pub fn estimate_siso_sweep(
    p: &DoubleGGParams,
    avg_snrs: &[f64],
    threshold_snr: f64,
    cfg: &McConfig,
) -> Result<Vec<(McEstimate, McEstimate)>> {
    check_snr(threshold_snr, "threshold SNR")?;
    for &s in avg_snrs {
        check_snr(s, "average SNR")?;
    }
    let k = avg_snrs.len();
    let est = run(&[p.sampler()], 2 * k, cfg, |i, out| {
        let i2 = i[0] * i[0];
        for (j, &s) in avg_snrs.iter().enumerate() {
            out[j] = f64::from(s * i2 < threshold_snr);
            out[k + j] = 0.5 * erfc(0.5 * (s * i2).sqrt());
        }
    })?;
    Ok((0..k).map(|j| (est[j], est[k + j])).collect())
}

/// E[Q(√(γ̄/(2N) ΣIₙ²))] with the exact Q, N = `branches.len()`.
pub fn estimate_ber_simo(branches: &[DoubleGGParams], avg_snr: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(estimate_ber_simo_sweep(branches, &[avg_snr], cfg)?[0])
}

/// [`estimate_ber_simo`] at several SNRs from one set of draws.
pub fn estimate_ber_simo_sweep(branches: &[DoubleGGParams], avg_snrs: &[f64], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    if branches.is_empty() {
        return Err(Error::InvalidParams("at least one branch is required".into()));
    }
    for &s in avg_snrs {
        check_snr(s, "average SNR")?;
    }
    let n = branches.len() as f64;
    let samplers: Vec<DoubleGGSampler> = branches.iter().map(DoubleGGParams::sampler).collect();
    // Q(√x) = ½ erfc(√(x/2)) with x = γ̄ΣI²/(2N)
    let scale: Vec<f64> = avg_snrs.iter().map(|s| s / (4.0 * n)).collect();
    run(&samplers, scale.len(), cfg, |i, out| {
        let sum: f64 = i.iter().map(|x| x * x).sum();
        for (o, c) in out.iter_mut().zip(&scale) {
            *o = 0.5 * erfc((c * sum).sqrt());
        }
    })
}

/// Sample mean and variance of I from `cfg.n_samples` draws.
pub fn estimate_moments(p: &DoubleGGParams, cfg: &McConfig) -> Result<(McEstimate, f64)> {
    let e = run(&[p.sampler()], 1, cfg, |i, out| out[0] = i[0])?[0];
    let var = e.std_error * e.std_error * e.n as f64;
    Ok((e, var))
}

/// Draws `cfg.n_samples` irradiances with the same stream layout as the
/// estimators; the order is deterministic.
pub fn draw_irradiance(p: &DoubleGGParams, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let s = p.sampler();
    let chunks = cfg.n_samples.div_ceil(cfg.batch);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let len = cfg.batch.min(cfg.n_samples - c * cfg.batch);
            (0..len).map(|_| s.draw(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut one = Moments::default();
        xs.iter().for_each(|&x| one.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, one.n);
        assert!((a.mean - one.mean).abs() < 1e-12);
        assert!((a.m2 - one.m2).abs() < 1e-9 * one.m2);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1).is_err());
        assert!(McConfig::with_batch(10, 1, 0).is_err());
        assert!(McConfig::with_batch(10, 1, 3).is_ok());
    }
}
