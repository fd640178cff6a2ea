//! Verb implementations. Each builds its whole output in memory and writes
//! it only on success, so a failing command leaves no partial file.

use anyhow::{anyhow, bail, ensure, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use dgg::dist::{dgg_cdf_with, dgg_pdf_with, reduce_special_case, scintillation_index, DoubleGGParams, EvalPath, SpecialCase};
use dgg::fit::{
    fit_double_weibull, fit_gamma_gamma, fit_k, fit_shapes, synthesize, EmpiricalPdf, FitResult, LogConvention, ShapeBounds,
};
use dgg::mc::{estimate_ber_simo_sweep, estimate_siso_sweep, McConfig};
use dgg::perf::{
    ber_simo_asymptotic, ber_simo_oc, ber_siso, ber_siso_asymptotic, db_to_linear, diversity_order_simo, outage_probability,
    BerRationalPair, LinkQuery, PerfPath,
};
use dgg::presets::Preset;

use crate::config::{ChannelConfig, ChannelSpec};
use crate::table::{pretty, Format, Table};
use crate::{Cli, Command, Convention, Grid, Metric, PathArg};

/// Search box for the Double-Weibull exponents.
const WEIBULL_BOUNDS: ((f64, f64), (f64, f64)) = ((0.2, 10.0), (0.2, 10.0));

pub fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    let text = match &cli.command {
        Command::Params => params(&config(cli)?, c.snap, c.format.unwrap_or(Format::Json))?,
        Command::Pdf { grid, log_axis, noise } => {
            let p = single(cli)?;
            if *log_axis {
                log_axis_curve(&p, grid, convention(c.convention), *noise, c.seed)?.render(c.format.unwrap_or(Format::Csv))
            } else {
                density(&p, grid, "pdf", dgg_pdf_with)?.render(c.format.unwrap_or(Format::Csv))
            }
        }
        Command::Cdf { grid } => density(&single(cli)?, grid, "cdf", dgg_cdf_with)?.render(c.format.unwrap_or(Format::Csv)),
        Command::Outage {
            snr_db,
            threshold_db,
            path,
        } => {
            let p = single(cli)?;
            let mut t = Table::new(["snr_db", "outage"]);
            for (&db, v) in snr_db
                .iter()
                .zip(par_map(snr_db, |db| outage_at(&p, db, *threshold_db, *path))?)
            {
                t.push(vec![db, v]);
            }
            t.render(c.format.unwrap_or(Format::Csv))
        }
        Command::Ber {
            snr_db,
            path,
            asymptotic,
        } => {
            let branches = branches(cli)?;
            let metric = if *asymptotic { Metric::BerAsymptotic } else { Metric::BerSimo };
            let mut t = Table::new(["snr_db", "ber"]);
            for (&db, v) in snr_db
                .iter()
                .zip(par_map(snr_db, |db| metric_at(metric, &branches, db, 0.0, *path))?)
            {
                t.push(vec![db, v]);
            }
            t.render(c.format.unwrap_or(Format::Csv))
        }
        Command::Simulate {
            snr_db,
            threshold_db,
            path,
        } => simulate(&branches(cli)?, snr_db, *threshold_db, *path, &mc_config(cli)?)?.render(c.format.unwrap_or(Format::Csv)),
        Command::Sweep {
            metric,
            start,
            stop,
            step,
            threshold_db,
            path,
            mc,
        } => {
            let mc = if *mc { Some(mc_config(cli)?) } else { None };
            sweep(
                &branches(cli)?,
                *metric,
                (*start, *stop, *step),
                *threshold_db,
                *path,
                mc.as_ref(),
            )?
            .render(c.format.unwrap_or(Format::Csv))
        }
        Command::Fit { data } => {
            let cfg = config(cli)?;
            let raw = std::fs::read_to_string(data).with_context(|| format!("reading data {}", data.display()))?;
            let pdf =
                EmpiricalPdf::from_csv(&raw, convention(c.convention)).with_context(|| format!("in data {}", data.display()))?;
            fit(&cfg, &pdf, c.format.unwrap_or(Format::Json))?
        }
    };
    match &c.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config(cli: &Cli) -> Result<ChannelConfig> {
    match (&cli.common.config, &cli.common.preset) {
        (Some(path), _) => ChannelConfig::load(path),
        (None, Some(name)) => Preset::from_name(name)
            .map(ChannelConfig::preset)
            .ok_or_else(|| anyhow!("unknown preset `{name}`; expected one of {}", preset_names())),
        (None, None) => bail!(
            "no channel given; pass --config <path> or --preset <name> ({})",
            preset_names()
        ),
    }
}

fn preset_names() -> String {
    Preset::ALL.map(|p| p.name()).join(", ")
}

fn branches(cli: &Cli) -> Result<Vec<DoubleGGParams>> {
    config(cli)?.channels(cli.common.snap)
}

fn single(cli: &Cli) -> Result<DoubleGGParams> {
    let b = branches(cli)?;
    ensure!(
        b.len() == 1,
        "this command needs a single-aperture channel, the config has {} apertures",
        b.len()
    );
    Ok(b[0])
}

fn mc_config(cli: &Cli) -> Result<McConfig> {
    Ok(McConfig::new(cli.common.samples, cli.common.seed)?)
}

fn convention(c: Convention) -> LogConvention {
    match c {
        Convention::Mean => LogConvention::CenteredByMean,
        Convention::Halfvar => LogConvention::ShiftedByHalfVariance,
    }
}

fn perf_path(p: PathArg) -> PerfPath {
    match p {
        PathArg::Auto => PerfPath::Auto,
        PathArg::ClosedForm => PerfPath::ClosedForm,
        PathArg::Quadrature => PerfPath::Quadrature,
    }
}

/// Evaluates `f` over `xs` on the worker pool, keeping input order.
fn par_map<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

fn special_case_name(c: SpecialCase) -> &'static str {
    match c {
        SpecialCase::GammaGamma => "gamma-gamma",
        SpecialCase::DoubleWeibull => "double-weibull",
        SpecialCase::K => "k",
        SpecialCase::None => "double-gg",
    }
}

fn channel_json(p: &DoubleGGParams) -> Value {
    let (x, y) = (p.large(), p.small());
    let pair = BerRationalPair::for_channel(p);
    json!({
        "gamma1": x.gamma,
        "m1": x.m,
        "omega1": x.omega,
        "gamma2": y.gamma,
        "m2": y.m,
        "omega2": y.omega,
        "p": p.p(),
        "q": p.q(),
        "ratio_mismatch": p.ratio_mismatch(),
        "sigma_x_sq": x.normalized_variance(),
        "sigma_y_sq": y.normalized_variance(),
        "scintillation_index": scintillation_index(p),
        "mean": p.moment(1.0),
        "special_case": special_case_name(reduce_special_case(p)),
        "diversity_order": diversity_order_simo(std::slice::from_ref(p)),
        "ber_pair": { "l": pair.l, "k": pair.k, "exact": pair.is_exact(p), "order": pair.ber_order(p) },
    })
}

fn params(cfg: &ChannelConfig, force_snap: bool, format: Format) -> Result<String> {
    let channels = cfg.channels(force_snap)?;
    if format == Format::Csv {
        let mut t = Table::new([
            "aperture",
            "gamma1",
            "m1",
            "omega1",
            "gamma2",
            "m2",
            "omega2",
            "p",
            "q",
            "sigma_x_sq",
            "sigma_y_sq",
            "scintillation_index",
            "diversity_order",
        ]);
        for (i, p) in channels.iter().enumerate() {
            let (x, y) = (p.large(), p.small());
            t.push(vec![
                (i + 1) as f64,
                x.gamma,
                x.m,
                x.omega,
                y.gamma,
                y.m,
                y.omega,
                p.p() as f64,
                p.q() as f64,
                x.normalized_variance(),
                y.normalized_variance(),
                scintillation_index(p),
                diversity_order_simo(std::slice::from_ref(p)),
            ]);
        }
        return Ok(t.to_csv());
    }
    let reports: Vec<Value> = cfg
        .branches
        .iter()
        .zip(&channels)
        .map(|(spec, p)| {
            let mut v = channel_json(p);
            let obj = v.as_object_mut().expect("channel report is an object");
            match spec {
                ChannelSpec::Explicit(_) => {
                    obj.insert("specification".into(), "explicit".into());
                }
                ChannelSpec::Derived { conditions, max_den, .. } => {
                    obj.insert("specification".into(), "derived".into());
                    obj.insert(
                        "conditions".into(),
                        json!({
                            "wave": format!("{:?}", conditions.wave).to_lowercase(),
                            "rytov_variance": conditions.rytov_var,
                            "inner_scale_ratio": conditions.inner_scale_ratio,
                            "max_den": max_den,
                        }),
                    );
                }
            }
            obj.insert("snapped".into(), (cfg.snap || force_snap).into());
            v
        })
        .collect();
    let out = if reports.len() == 1 {
        reports.into_iter().next().expect("one report")
    } else {
        json!({
            "apertures": reports.len(),
            "diversity_order": diversity_order_simo(&channels),
            "branches": reports,
        })
    };
    Ok(pretty(&out))
}

fn grid_points(g: &Grid, default: (f64, f64), log: bool) -> Result<Vec<f64>> {
    let (a, b) = (g.from.unwrap_or(default.0), g.to.unwrap_or(default.1));
    ensure!(
        a.is_finite() && b.is_finite() && a < b,
        "grid needs from < to, got [{a}, {b}]"
    );
    ensure!(g.points >= 2, "grid needs at least 2 points");
    if log {
        ensure!(a > 0.0, "logarithmic grid needs from > 0 (use --linear for a linear grid)");
    }
    let n = g.points - 1;
    Ok((0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            if log {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else {
                a + t * (b - a)
            }
        })
        .collect())
}

fn density(p: &DoubleGGParams, g: &Grid, name: &str, f: fn(f64, &DoubleGGParams, EvalPath) -> dgg::Result<f64>) -> Result<Table> {
    let xs = grid_points(g, (1e-3, 10.0), !g.linear)?;
    let path = if g.meijer { EvalPath::MeijerG } else { EvalPath::Quadrature };
    let mut t = Table::new(["irradiance", name]);
    for (x, v) in xs.iter().zip(par_map(&xs, |x| Ok(f(x, p, path)?))?) {
        t.push(vec![*x, v]);
    }
    Ok(t)
}

fn log_axis_curve(p: &DoubleGGParams, g: &Grid, conv: LogConvention, noise: f64, seed: u64) -> Result<Table> {
    ensure!(noise >= 0.0 && noise.is_finite(), "noise must be a non-negative number");
    let xs = grid_points(g, (-4.0, 4.0), false)?;
    let data = synthesize(p, &xs, conv, noise, seed)?;
    let mut t = Table::new(["x", "f"]);
    for &(x, f) in data.points() {
        t.push(vec![x, f]);
    }
    Ok(t)
}

fn outage_at(p: &DoubleGGParams, db: f64, threshold_db: f64, path: PathArg) -> Result<f64> {
    Ok(outage_probability(
        p,
        &LinkQuery::from_db(db, threshold_db, 1)?,
        perf_path(path),
    )?)
}

fn metric_at(metric: Metric, branches: &[DoubleGGParams], db: f64, threshold_db: f64, path: PathArg) -> Result<f64> {
    let n = branches.len();
    let q = LinkQuery::from_db(db, threshold_db, n)?;
    let path = perf_path(path);
    Ok(match (metric, n) {
        (Metric::Outage, 1) => outage_probability(&branches[0], &q, path)?,
        (Metric::BerSiso, 1) | (Metric::BerSimo, 1) => ber_siso(&branches[0], &q, path)?,
        (Metric::BerSimo, _) => ber_simo_oc(branches, &q, path)?,
        (Metric::BerAsymptotic, 1) => ber_siso_asymptotic(&branches[0], &q)?,
        (Metric::BerAsymptotic, _) => ber_simo_asymptotic(branches, &q)?,
        (Metric::Outage | Metric::BerSiso, _) => {
            bail!("this metric needs a single-aperture channel, the config has {n} apertures")
        }
    })
}

fn simulate(branches: &[DoubleGGParams], snr_db: &[f64], threshold_db: f64, path: PathArg, mc: &McConfig) -> Result<Table> {
    let snrs: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    if branches.len() == 1 {
        let p = &branches[0];
        let est = estimate_siso_sweep(p, &snrs, db_to_linear(threshold_db), mc)?;
        let mut t = Table::new([
            "snr_db",
            "outage",
            "outage_mc",
            "outage_stderr",
            "ber",
            "ber_mc",
            "ber_stderr",
        ]);
        for (&db, (o, b)) in snr_db.iter().zip(est) {
            let out = outage_at(p, db, threshold_db, path)?;
            let ber = metric_at(Metric::BerSiso, branches, db, 0.0, path)?;
            t.push(vec![db, out, o.mean, o.std_error, ber, b.mean, b.std_error]);
        }
        Ok(t)
    } else {
        let est = estimate_ber_simo_sweep(branches, &snrs, mc)?;
        let mut t = Table::new(["snr_db", "ber", "ber_mc", "ber_stderr"]);
        for (&db, b) in snr_db.iter().zip(est) {
            t.push(vec![
                db,
                metric_at(Metric::BerSimo, branches, db, 0.0, path)?,
                b.mean,
                b.std_error,
            ]);
        }
        Ok(t)
    }
}

fn sweep(
    branches: &[DoubleGGParams],
    metric: Metric,
    (start, stop, step): (f64, f64, f64),
    threshold_db: f64,
    path: PathArg,
    mc: Option<&McConfig>,
) -> Result<Table> {
    ensure!(
        start.is_finite() && stop.is_finite() && start < stop,
        "sweep needs start < stop, got {start} and {stop}"
    );
    ensure!(step > 0.0 && step.is_finite(), "sweep step must be positive, got {step}");
    let n = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize;
    let dbs: Vec<f64> = (0..=n).map(|i| start + i as f64 * step).collect();
    let values = par_map(&dbs, |db| metric_at(metric, branches, db, threshold_db, path))?;
    let Some(mc) = mc else {
        let mut t = Table::new(["snr_db", "value"]);
        for (db, v) in dbs.into_iter().zip(values) {
            t.push(vec![db, v]);
        }
        return Ok(t);
    };
    let snrs: Vec<f64> = dbs.iter().map(|&d| db_to_linear(d)).collect();
    let est = match metric {
        Metric::Outage => estimate_siso_sweep(&branches[0], &snrs, db_to_linear(threshold_db), mc)?
            .into_iter()
            .map(|(o, _)| o)
            .collect(),
        _ => estimate_ber_simo_sweep(branches, &snrs, mc)?,
    };
    let mut t = Table::new(["snr_db", "value", "mc_mean", "mc_stderr"]);
    for ((db, v), e) in dbs.into_iter().zip(values).zip(est) {
        t.push(vec![db, v, e.mean, e.std_error]);
    }
    Ok(t)
}

fn fit(cfg: &ChannelConfig, data: &EmpiricalPdf, format: Format) -> Result<String> {
    let conditions = cfg
        .branches
        .first()
        .and_then(ChannelSpec::conditions)
        .copied()
        .ok_or_else(|| {
            anyhow!("fit needs turbulence conditions; use a derived config (wave, rytov_variance, ...) or --preset")
        })?;
    let shapes = ShapeBounds::default_shapes();
    let weibull = ShapeBounds::new(WEIBULL_BOUNDS.0, WEIBULL_BOUNDS.1)?;
    // each candidate is fitted under its own constraints
    let candidates: Vec<(&str, [&str; 2], FitResult)> = vec![
        ("double-gg", ["m1", "m2"], fit_shapes(data, &conditions, &shapes)?),
        ("gamma-gamma", ["m1", "m2"], fit_gamma_gamma(data, &shapes)?),
        ("double-weibull", ["gamma1", "gamma2"], fit_double_weibull(data, &weibull)?),
        ("k", ["m1", "m2"], fit_k(data, &shapes)?),
    ];
    let best = candidates
        .iter()
        .min_by(|a, b| a.2.nrmse.total_cmp(&b.2.nrmse))
        .map(|c| c.0)
        .expect("candidate list is not empty");
    if format == Format::Csv {
        let mut s = String::from("model,first,second,nrmse\n");
        for (name, _, r) in &candidates {
            s.push_str(&format!("{name},{:.16e},{:.16e},{:.16e}\n", r.m1, r.m2, r.nrmse));
        }
        return Ok(s);
    }
    let list: Vec<Value> = candidates
        .iter()
        .map(|(name, [a, b], r)| {
            json!({
                "model": name,
                "fitted": { *a: r.m1, *b: r.m2 },
                "nrmse": r.nrmse,
                "special_case": special_case_name(reduce_special_case(&r.params)),
                "params": channel_json(&r.params),
                "evaluations_skipped": r.skipped.len(),
            })
        })
        .collect();
    Ok(pretty(&json!({
        "convention": match data.convention() {
            LogConvention::CenteredByMean => "mean",
            LogConvention::ShiftedByHalfVariance => "halfvar",
        },
        "points": data.points().len(),
        "best": best,
        "candidates": list,
    })))
}
