//! Flat `key = value` channel configuration.
//!
//! A channel is given either explicitly (`gamma1`, `gamma2`, `m1`, `m2`, and
//! optionally `omega1`, `omega2`, `p`, `q`) or derived from turbulence
//! conditions (`preset`, or `wave`, `rytov_variance`, `inner_scale_ratio`,
//! `m1`, `m2`). Mixing the two is an error. `apertures = N` replicates the
//! channel over N branches; `aperture<i>.<key>` overrides a key on branch i.
//! `#` and `;` start comments; blank lines and `[section]` headers are ignored.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use dgg::atmos::{derive_params, rational_ratio, AtmosphericConditions, ShapeSeed, WaveType, DEFAULT_MAX_DEN};
use dgg::dist::{DoubleGGParams, GGParams};
use dgg::perf::BerRationalPair;
use dgg::presets::Preset;

const EXPLICIT_KEYS: [&str; 6] = ["gamma1", "gamma2", "omega1", "omega2", "p", "q"];
const DERIVED_KEYS: [&str; 4] = ["preset", "wave", "rytov_variance", "inner_scale_ratio"];
const SHARED_KEYS: [&str; 3] = ["m1", "m2", "max_den"];
const GLOBAL_KEYS: [&str; 2] = ["snap", "apertures"];

/// A key's value and the 1-based line it came from.
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Entries = BTreeMap<String, Entry>;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Explicit(DoubleGGParams),
    Derived {
        conditions: AtmosphericConditions,
        seed: ShapeSeed,
        max_den: u32,
    },
}

impl ChannelSpec {
    pub fn conditions(&self) -> Option<&AtmosphericConditions> {
        match self {
            ChannelSpec::Explicit(_) => None,
            ChannelSpec::Derived { conditions, .. } => Some(conditions),
        }
    }

    pub fn params(&self) -> Result<DoubleGGParams> {
        match self {
            ChannelSpec::Explicit(p) => Ok(*p),
            ChannelSpec::Derived {
                conditions,
                seed,
                max_den,
            } => derive_params(conditions, seed, *max_den).context("deriving channel parameters"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// one spec per aperture; never empty
    pub branches: Vec<ChannelSpec>,
    pub snap: bool,
}

impl ChannelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut base = Entries::new();
        let mut overrides: BTreeMap<usize, Entries> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split(['#', ';']).next().unwrap_or("").trim();
            if content.is_empty() || (content.starts_with('[') && content.ends_with(']')) {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {line}: expected `key = value`, got `{content}`"))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim().to_string();
            let (target, name) = match key.strip_prefix("aperture").and_then(|r| r.split_once('.')) {
                Some((i, name)) => {
                    let i: usize = i
                        .parse()
                        .ok()
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| anyhow!("config line {line}: bad aperture index in `{key}`"))?;
                    if GLOBAL_KEYS.contains(&name) {
                        bail!("config line {line}: `{name}` cannot be set per aperture");
                    }
                    (overrides.entry(i).or_default(), name.to_string())
                }
                None => (&mut base, key),
            };
            let known = EXPLICIT_KEYS
                .iter()
                .chain(&DERIVED_KEYS)
                .chain(&SHARED_KEYS)
                .chain(&GLOBAL_KEYS);
            if !known.into_iter().any(|k| *k == name) {
                bail!("config line {line}: unknown key `{name}`");
            }
            if let Some(prev) = target.insert(name.clone(), Entry { line, value }) {
                bail!("config line {line}: `{name}` already set on line {}", prev.line);
            }
        }

        let snap = match base.get("snap") {
            Some(e) => parse_bool(e, "snap")?,
            None => false,
        };
        let apertures = match base.get("apertures") {
            Some(e) => {
                let n: usize = parse_num(e, "apertures")?;
                if n < 1 {
                    bail!("config line {}: apertures must be at least 1", e.line);
                }
                n
            }
            None => 1,
        };
        if let Some((&i, _)) = overrides.iter().find(|(&i, _)| i > apertures) {
            bail!("config sets keys for aperture {i} but apertures = {apertures}");
        }
        let branches = (1..=apertures)
            .map(|i| {
                let mut merged = base.clone();
                if let Some(o) = overrides.get(&i) {
                    merged.extend(o.clone());
                }
                let spec = channel_spec(&merged);
                if apertures > 1 {
                    spec.with_context(|| format!("aperture {i}"))
                } else {
                    spec
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches, snap })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// A single-aperture config for a named preset.
    pub fn preset(preset: Preset) -> Self {
        Self {
            branches: vec![ChannelSpec::Derived {
                conditions: preset.conditions(),
                seed: preset.seed(),
                max_den: DEFAULT_MAX_DEN,
            }],
            snap: false,
        }
    }

    /// Branch channels, snapped when requested here or by `force_snap`.
    pub fn channels(&self, force_snap: bool) -> Result<Vec<DoubleGGParams>> {
        self.branches
            .iter()
            .map(|b| {
                let p = b.params()?;
                if self.snap || force_snap {
                    snap(&p)
                } else {
                    Ok(p)
                }
            })
            .collect()
    }
}

/// The channel moved onto exact rational pairs so every closed form applies.
pub fn snap(p: &DoubleGGParams) -> Result<DoubleGGParams> {
    Ok(BerRationalPair::for_channel(p).snap_channel(p)?)
}

fn channel_spec(e: &Entries) -> Result<ChannelSpec> {
    let first = |keys: &[&'static str]| {
        keys.iter()
            .filter_map(|k| e.get(*k).map(|v| (*k, v.line)))
            .min_by_key(|x| x.1)
    };
    let explicit = first(&EXPLICIT_KEYS);
    let derived = first(&DERIVED_KEYS);
    let max_den = match e.get("max_den") {
        Some(v) => parse_num::<u32>(v, "max_den").and_then(|d| {
            if d >= 1 {
                Ok(d)
            } else {
                bail!("config line {}: max_den must be at least 1", v.line)
            }
        })?,
        None => DEFAULT_MAX_DEN,
    };
    match (explicit, derived) {
        (Some((ek, el)), Some((dk, dl))) => bail!(
            "config mixes explicit parameters (`{ek}` on line {el}) with derived conditions (`{dk}` on line {dl}); use one or the other"
        ),
        (None, None) => bail!("config defines no channel: give gamma1/gamma2/m1/m2, or wave/rytov_variance/inner_scale_ratio/m1/m2, or preset"),
        (Some(_), None) => {
            let g1: f64 = parse_num(require(e, "gamma1")?, "gamma1")?;
            let g2: f64 = parse_num(require(e, "gamma2")?, "gamma2")?;
            let m1: f64 = parse_num(require(e, "m1")?, "m1")?;
            let m2: f64 = parse_num(require(e, "m2")?, "m2")?;
            let factor = |g: f64, m: f64, key: &str| -> Result<GGParams> {
                Ok(match e.get(key) {
                    Some(v) => GGParams::new(g, m, parse_num(v, key)?)?,
                    None => GGParams::unit_mean(g, m)?,
                })
            };
            let (p, q) = match (e.get("p"), e.get("q")) {
                (Some(p), Some(q)) => (parse_num(p, "p")?, parse_num(q, "q")?),
                (None, None) => rational_ratio(g1 / g2, max_den),
                (Some(v), None) | (None, Some(v)) => bail!("config line {}: p and q must be given together", v.line),
            };
            Ok(ChannelSpec::Explicit(DoubleGGParams::new(
                factor(g1, m1, "omega1")?,
                factor(g2, m2, "omega2")?,
                p,
                q,
            )?))
        }
        (None, Some(_)) => {
            let preset = match e.get("preset") {
                Some(v) => Some(
                    Preset::from_name(&v.value)
                        .ok_or_else(|| anyhow!("config line {}: unknown preset `{}`", v.line, v.value))?,
                ),
                None => None,
            };
            let wave = match e.get("wave") {
                Some(v) => match v.value.to_ascii_lowercase().as_str() {
                    "plane" => WaveType::Plane,
                    "spherical" => WaveType::Spherical,
                    other => bail!("config line {}: wave must be `plane` or `spherical`, got `{other}`", v.line),
                },
                None => preset.map(|p| p.conditions().wave).ok_or_else(|| missing("wave"))?,
            };
            let value = |key: &str, from_preset: Option<f64>| -> Result<f64> {
                match e.get(key) {
                    Some(v) => parse_num(v, key),
                    None => from_preset.ok_or_else(|| missing(key)),
                }
            };
            let rytov = value("rytov_variance", preset.map(|p| p.conditions().rytov_var))?;
            let inner = value("inner_scale_ratio", preset.map(|p| p.conditions().inner_scale_ratio))?;
            let m1 = value("m1", preset.map(|p| p.seed().m1))?;
            let m2 = value("m2", preset.map(|p| p.seed().m2))?;
            Ok(ChannelSpec::Derived {
                conditions: AtmosphericConditions::new(wave, rytov, inner)?,
                seed: ShapeSeed::new(m1, m2)?,
                max_den,
            })
        }
    }
}

fn missing(key: &str) -> anyhow::Error {
    anyhow!("config is missing `{key}`")
}

fn require<'a>(e: &'a Entries, key: &str) -> Result<&'a Entry> {
    e.get(key).ok_or_else(|| missing(key))
}

fn parse_num<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| anyhow!("config line {}: `{key} = {}` is not a valid number", e.line, e.value))
}

fn parse_bool(e: &Entry, key: &str) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("config line {}: `{key} = {}` is not a boolean", e.line, e.value),
    }
}
