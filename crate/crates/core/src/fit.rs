//! Empirical log-irradiance densities, goodness of fit and shape fitting.
//!
//! Curves live in scaled log-irradiance coordinates: x = (ln I − c)/σ with
//! σ = std(ln I) and c the centering of [`LogConvention`]; the plotted value
//! is σ·f_{ln I}(σx + c), which integrates to 1 in x.
//!
//! NRMSE is normalized by the peak of the empirical curve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::atmos::{derive_params, rational_ratio, AtmosphericConditions, ShapeSeed, DEFAULT_MAX_DEN};
use crate::dist::{ln_log_density, DoubleGGParams, GGParams};
use crate::error::{Error, Result};
use crate::specfun::quad::{integrate_real_line, QuadratureConfig};

const MOMENT_REL_TOL: f64 = 1e-11;
const GRID_POINTS: usize = 11;
const STARTS: usize = 3;
const MAX_SIMPLEX_ITERS: usize = 80;
const SIMPLEX_TOL: f64 = 1e-4;

/// Centering of the log-irradiance axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogConvention {
    /// x = (ln I − E[ln I])/σ
    #[default]
    CenteredByMean,
    /// x = (ln I + σ²/2)/σ
    ShiftedByHalfVariance,
}

/// Mean and standard deviation of ln I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    pub mean: f64,
    pub std: f64,
}

impl LogMoments {
    fn center(&self, conv: LogConvention) -> f64 {
        match conv {
            LogConvention::CenteredByMean => self.mean,
            LogConvention::ShiftedByHalfVariance => -0.5 * self.std * self.std,
        }
    }
}

/// Moments of ln I = ln Ix + ln Iy, each factor by quadrature.
pub fn log_moments(p: &DoubleGGParams) -> Result<LogMoments> {
    let a = factor_log_moments(p.large())?;
    let b = factor_log_moments(p.small())?;
    Ok(LogMoments {
        mean: a.0 + b.0,
        std: (a.1 + b.1).sqrt(),
    })
}

/// (mean, variance) of ln X for one GG factor.
fn factor_log_moments(g: &GGParams) -> Result<(f64, f64)> {
    let mode = g.omega.ln() / g.gamma;
    let scale = 1.0 / (g.gamma * g.m.sqrt());
    let cfg = QuadratureConfig::relative(MOMENT_REL_TOL);
    let f = |u: f64| g.ln_log_density(u).exp();
    let d1 = integrate_real_line(
        |u| (u - mode) * f(u),
        mode,
        scale,
        &QuadratureConfig { abs_tol: 1e-14, ..cfg },
    )?
    .value;
    let d2 = integrate_real_line(|u| (u - mode).powi(2) * f(u), mode, scale, &cfg)?.value;
    Ok((mode + d1, d2 - d1 * d1))
}

/// A model curve in scaled log coordinates with the moments cached.
#[derive(Debug, Clone, Copy)]
pub struct ScaledLogPdf {
    params: DoubleGGParams,
    moments: LogMoments,
    center: f64,
}

impl ScaledLogPdf {
    pub fn new(p: &DoubleGGParams, conv: LogConvention) -> Result<Self> {
        let moments = log_moments(p)?;
        Ok(Self {
            params: *p,
            moments,
            center: moments.center(conv),
        })
    }

    pub fn moments(&self) -> LogMoments {
        self.moments
    }

    /// σ·f_{ln I}(σx + c).
    pub fn eval(&self, x: f64) -> Result<f64> {
        let s = self.moments.std;
        Ok(s * ln_log_density(s * x + self.center, &self.params)?.exp())
    }

    pub fn eval_grid(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// One-off evaluation of the scaled log-irradiance density.
pub fn scaled_log_pdf(p: &DoubleGGParams, x: f64, conv: LogConvention) -> Result<f64> {
    ScaledLogPdf::new(p, conv)?.eval(x)
}

/// Tabulated density in scaled log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPdf {
    points: Vec<(f64, f64)>,
    convention: LogConvention,
}

impl EmpiricalPdf {
    /// x must increase strictly and f must be non-negative.
    pub fn new(points: Vec<(f64, f64)>, convention: LogConvention) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("empirical pdf has no points".into()));
        }
        for (i, &(x, f)) in points.iter().enumerate() {
            if !x.is_finite() || !(f >= 0.0 && f.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "point {i} = ({x}, {f}) is not a finite non-negative sample"
                )));
            }
            if i > 0 && !(x > points[i - 1].0) {
                return Err(Error::InvalidParams(format!("x is not strictly increasing at point {i}")));
            }
        }
        Ok(Self { points, convention })
    }

    /// Parses `x,f` CSV text with a header line.
    pub fn from_csv(text: &str, convention: LogConvention) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim().replace(' ', "") == "x,f" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `x,f`, found {:?}",
                    other.map(|(_, l)| l).unwrap_or("")
                )))
            }
        }
        let mut points = Vec::new();
        for (n, line) in lines {
            let mut cols = line.split(',').map(str::trim);
            let parse = |c: Option<&str>| -> Result<f64> {
                c.ok_or_else(|| Error::Parse(format!("line {}: expected two columns", n + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))
            };
            let x = parse(cols.next())?;
            let f = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(Error::Parse(format!("line {}: expected two columns", n + 1)));
            }
            points.push((x, f));
        }
        Self::new(points, convention)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,f\n");
        for (x, f) in &self.points {
            s.push_str(&format!("{x:.16e},{f:.16e}\n"));
        }
        s
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn convention(&self) -> LogConvention {
        self.convention
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn peak(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// The model curve on an x grid, optionally with multiplicative Gaussian noise
/// f·(1 + noise·ε), clamped at 0.
pub fn synthesize(p: &DoubleGGParams, xs: &[f64], conv: LogConvention, noise: f64, seed: u64) -> Result<EmpiricalPdf> {
    let curve = ScaledLogPdf::new(p, conv)?.eval_grid(xs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let points = xs
        .iter()
        .zip(curve)
        .map(|(&x, f)| {
            let e: f64 = normal.sample(&mut rng);
            (x, (f * (1.0 + noise * e)).max(0.0))
        })
        .collect();
    EmpiricalPdf::new(points, conv)
}

/// √(mean squared residual) / peak of the data.
pub fn nrmse(model: &[f64], data: &EmpiricalPdf) -> Result<f64> {
    let pts = data.points();
    if model.len() != pts.len() {
        return Err(Error::Domain(format!(
            "model has {} values for {} data points",
            model.len(),
            pts.len()
        )));
    }
    let peak = data.peak();
    if !(peak > 0.0) {
        return Err(Error::Domain("data peak is zero".into()));
    }
    let ss: f64 = model.iter().zip(pts).map(|(m, (_, f))| (m - f).powi(2)).sum();
    Ok((ss / pts.len() as f64).sqrt() / peak)
}

/// NRMSE of a channel against data in the data's convention.
pub fn model_nrmse(p: &DoubleGGParams, data: &EmpiricalPdf) -> Result<f64> {
    let curve = ScaledLogPdf::new(p, data.convention())?.eval_grid(&data.xs())?;
    nrmse(&curve, data)
}

/// Closed search box for two shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeBounds {
    pub first: (f64, f64),
    pub second: (f64, f64),
}

impl ShapeBounds {
    pub fn new(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        for (lo, hi) in [first, second] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidParams(format!("bad bound [{lo}, {hi}]")));
            }
        }
        Ok(Self { first, second })
    }

    /// m ∈ [0.5, 50] for both shapes.
    pub fn default_shapes() -> Self {
        Self {
            first: (0.5, 50.0),
            second: (0.5, 50.0),
        }
    }
}

/// An iterate the objective could not evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedIterate {
    pub first: f64,
    pub second: f64,
    pub reason: String,
}

/// Outcome of a two-parameter fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// m₁ for Double GG and Gamma-Gamma fits, γ₁ for Double-Weibull
    pub m1: f64,
    /// m₂ for Double GG and Gamma-Gamma fits, γ₂ for Double-Weibull
    pub m2: f64,
    pub params: DoubleGGParams,
    pub nrmse: f64,
    pub skipped: Vec<SkippedIterate>,
    /// best objective so far, after the grid and after each simplex iteration
    pub history: Vec<f64>,
}

/// Fits (m₁, m₂) with γ and Ω re-derived from the conditions at each iterate.
pub fn fit_shapes(data: &EmpiricalPdf, cond: &AtmosphericConditions, bounds: &ShapeBounds) -> Result<FitResult> {
    cond.validate()?;
    minimize(data, bounds, |m1, m2| {
        derive_params(cond, &ShapeSeed::new(m1, m2)?, DEFAULT_MAX_DEN)
    })
}

/// Gamma-Gamma fit: γᵢ = Ωᵢ = 1, free (m₁, m₂).
pub fn fit_gamma_gamma(data: &EmpiricalPdf, bounds: &ShapeBounds) -> Result<FitResult> {
    minimize(data, bounds, |a, b| {
        DoubleGGParams::new(GGParams::new(1.0, a, 1.0)?, GGParams::new(1.0, b, 1.0)?, 1, 1)
    })
}

/// K fit: γᵢ = Ωᵢ = 1, m₂ = 1, free m₁ within `bounds.first`.
pub fn fit_k(data: &EmpiricalPdf, bounds: &ShapeBounds) -> Result<FitResult> {
    let pinned = ShapeBounds::new(bounds.first, (1.0, 1.0))?;
    minimize(data, &pinned, |a, _| {
        DoubleGGParams::new(GGParams::new(1.0, a, 1.0)?, GGParams::new(1.0, 1.0, 1.0)?, 1, 1)
    })
}

/// Double-Weibull fit: mᵢ = 1, free (γ₁, γ₂), unit-mean Ω.
pub fn fit_double_weibull(data: &EmpiricalPdf, bounds: &ShapeBounds) -> Result<FitResult> {
    minimize(data, bounds, |g1, g2| {
        let (p, q) = rational_ratio(g1 / g2, DEFAULT_MAX_DEN);
        DoubleGGParams::new(GGParams::unit_mean(g1, 1.0)?, GGParams::unit_mean(g2, 1.0)?, p, q)
    })
}

/// Coarse log-spaced grid, then Nelder–Mead in log coordinates clamped to the
/// box. Ties keep the lowest first, then second, parameter.
fn minimize<B>(data: &EmpiricalPdf, bounds: &ShapeBounds, build: B) -> Result<FitResult>
where
    B: Fn(f64, f64) -> Result<DoubleGGParams>,
{
    let xs = data.xs();
    let mut skipped = Vec::new();
    let lo = [bounds.first.0.ln(), bounds.second.0.ln()];
    let hi = [bounds.first.1.ln(), bounds.second.1.ln()];
    let mut objective = |v: [f64; 2]| -> f64 {
        let (a, b) = (v[0].exp(), v[1].exp());
        let r = build(a, b).and_then(|p| {
            let curve = ScaledLogPdf::new(&p, data.convention())?.eval_grid(&xs)?;
            nrmse(&curve, data)
        });
        match r {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                skipped.push(SkippedIterate {
                    first: a,
                    second: b,
                    reason: format!("objective is {v}"),
                });
                f64::INFINITY
            }
            Err(e) => {
                skipped.push(SkippedIterate {
                    first: a,
                    second: b,
                    reason: e.to_string(),
                });
                f64::INFINITY
            }
        }
    };

    let node = |i: usize, d: usize| {
        if GRID_POINTS == 1 || lo[d] == hi[d] {
            lo[d]
        } else {
            lo[d] + (hi[d] - lo[d]) * i as f64 / (GRID_POINTS - 1) as f64
        }
    };
    let mut grid = Vec::with_capacity(GRID_POINTS * GRID_POINTS);
    for i in 0..GRID_POINTS {
        for j in 0..GRID_POINTS {
            let v = [node(i, 0), node(j, 1)];
            grid.push((v, objective(v)));
        }
    }
    // stable sort keeps the lowest (first, second) among ties
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    if !grid[0].1.is_finite() {
        return Err(Error::Fit(format!(
            "no grid point could be evaluated ({} failures)",
            skipped.len()
        )));
    }
    let mut history = vec![grid[0].1];
    let steps = [
        (hi[0] - lo[0]) / (GRID_POINTS - 1).max(1) as f64,
        (hi[1] - lo[1]) / (GRID_POINTS - 1).max(1) as f64,
    ];
    let mut best = grid[0];
    for start in grid.iter().take(STARTS).filter(|s| s.1.is_finite()) {
        let mut local_history = Vec::new();
        let local = nelder_mead(*start, steps, &lo, &hi, &mut objective, &mut local_history);
        history.extend(local_history.into_iter().map(|v| v.min(best.1)));
        if local.1 < best.1 {
            best = local;
        }
    }
    let (v, f) = best;
    let (a, b) = (v[0].exp(), v[1].exp());
    Ok(FitResult {
        m1: a,
        m2: b,
        params: build(a, b)?,
        nrmse: f,
        skipped,
        history,
    })
}

/// Nelder–Mead from `start` with axis steps toward the box interior. Every
/// accepted move lowers or keeps the worst vertex, so the best value never rises.
fn nelder_mead<F: FnMut([f64; 2]) -> f64>(
    start: ([f64; 2], f64),
    steps: [f64; 2],
    lo: &[f64; 2],
    hi: &[f64; 2],
    objective: &mut F,
    history: &mut Vec<f64>,
) -> ([f64; 2], f64) {
    let clamp = |v: [f64; 2]| [v[0].clamp(lo[0], hi[0]), v[1].clamp(lo[1], hi[1])];
    let mut simplex: Vec<([f64; 2], f64)> = vec![start];
    for d in 0..2 {
        let mut v = start.0;
        v[d] += if v[d] + steps[d] <= hi[d] { steps[d] } else { -steps[d] };
        let v = clamp(v);
        simplex.push((v, objective(v)));
    }
    for _ in 0..MAX_SIMPLEX_ITERS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (b, w) = (simplex[0].1, simplex[2].1);
        history.push(b);
        let spread = (0..2)
            .map(|d| {
                let (mn, mx) = simplex.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), s| {
                    (mn.min(s.0[d]), mx.max(s.0[d]))
                });
                mx - mn
            })
            .fold(0.0, f64::max);
        if spread < SIMPLEX_TOL || (w.is_finite() && w - b <= 1e-12 * b.abs()) {
            break;
        }
        let c = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let worst = simplex[2].0;
        let toward = |t: f64| clamp([c[0] + t * (worst[0] - c[0]), c[1] + t * (worst[1] - c[1])]);
        let xr = toward(-1.0);
        let fr = objective(xr);
        if fr < simplex[0].1 {
            let xe = toward(-2.0);
            let fe = objective(xe);
            simplex[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (xr, fr);
        } else {
            let xc = if fr < simplex[2].1 { toward(-0.5) } else { toward(0.5) };
            let fc = objective(xc);
            if fc < simplex[2].1.min(fr) {
                simplex[2] = (xc, fc);
            } else {
                for k in 1..3 {
                    let v = clamp([
                        simplex[0].0[0] + 0.5 * (simplex[k].0[0] - simplex[0].0[0]),
                        simplex[0].0[1] + 0.5 * (simplex[k].0[1] - simplex[0].0[1]),
                    ]);
                    simplex[k] = (v, objective(v));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}
