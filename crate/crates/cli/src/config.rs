//! Run configuration: flat `key=value` files overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use fuss_spectra_core::paths::DEFAULT_SEARCH_BUDGET;
use fuss_spectra_core::rmt::Family;

/// Options shared by every subcommand. All are optional so that a config
/// file can fill the gaps; see [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Power of the matrix.
    #[arg(long)]
    pub m: Option<u32>,
    /// Highest moment order.
    #[arg(long = "p-max")]
    pub p_max: Option<u32>,
    /// Path size for `enumerate`.
    #[arg(long)]
    pub p: Option<u32>,
    /// Matrix dimensions, comma separated.
    #[arg(long = "n")]
    pub n: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// complex-gaussian, real-gaussian, rademacher or heavy4.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for CSV, SVG and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Longest path (2mp) the enumerator will search.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Density grid size.
    #[arg(long)]
    pub points: Option<usize>,
    /// Truncation level `α_N = N^{-e}`.
    #[arg(long = "alpha-exponent")]
    pub alpha_exponent: Option<f64>,
    /// Multiplies every tolerance; 0 makes inexact checks fail.
    #[arg(long = "tol-scale")]
    pub tol_scale: Option<f64>,
    /// `key=value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: u32,
    pub p_max: u32,
    pub p: u32,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub family: Family,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub budget: usize,
    pub points: usize,
    pub alpha_exponent: f64,
    pub tol_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: 2,
            p_max: 4,
            p: 2,
            ns: vec![128, 512],
            trials: 10,
            family: Family::ComplexGaussian,
            seed: 20240501,
            out: None,
            budget: DEFAULT_SEARCH_BUDGET,
            points: 400,
            alpha_exponent: 0.125,
            tol_scale: 1.0,
        }
    }
}

const KEYS: [&str; 12] = [
    "m",
    "p-max",
    "p",
    "n",
    "trials",
    "family",
    "seed",
    "out",
    "budget",
    "points",
    "alpha-exponent",
    "tol-scale",
];

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got {raw:?}", number + 1);
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key {key:?}", number + 1);
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("bad value {value:?} for {key}: {e}"))
}

pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| parse_value::<usize>("n", s.trim()))
        .collect()
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut cfg = Self::default();
        for (key, value) in &file {
            cfg.set(key, value)?;
        }
        let flag_values = [
            ("m", flags.m.map(|v| v.to_string())),
            ("p-max", flags.p_max.map(|v| v.to_string())),
            ("p", flags.p.map(|v| v.to_string())),
            ("n", flags.n.clone()),
            ("trials", flags.trials.map(|v| v.to_string())),
            ("family", flags.family.clone()),
            ("seed", flags.seed.map(|v| v.to_string())),
            ("out", flags.out.as_ref().map(|p| p.display().to_string())),
            ("budget", flags.budget.map(|v| v.to_string())),
            ("points", flags.points.map(|v| v.to_string())),
            ("alpha-exponent", flags.alpha_exponent.map(|v| v.to_string())),
            ("tol-scale", flags.tol_scale.map(|v| v.to_string())),
        ];
        for (key, value) in flag_values {
            if let Some(value) = value {
                cfg.set(key, &value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.m = parse_value(key, value)?,
            "p-max" => self.p_max = parse_value(key, value)?,
            "p" => self.p = parse_value(key, value)?,
            "n" => self.ns = parse_n_list(value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "family" => self.family = value.parse().map_err(|e| anyhow::anyhow!("{e}"))?,
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "budget" => self.budget = parse_value(key, value)?,
            "points" => self.points = parse_value(key, value)?,
            "alpha-exponent" => self.alpha_exponent = parse_value(key, value)?,
            "tol-scale" => self.tol_scale = parse_value(key, value)?,
            _ => bail!("unknown key {key:?}"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            bail!("m must be positive");
        }
        if self.p_max == 0 || self.p == 0 {
            bail!("p and p-max must be positive");
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            bail!("every N must be positive");
        }
        if self.trials < 2 {
            bail!("trials must be at least 2");
        }
        if self.budget == 0 || self.points < 8 {
            bail!("budget must be positive and points at least 8");
        }
        if self.alpha_exponent.is_nan() || self.alpha_exponent <= 0.0 {
            bail!("alpha-exponent must be positive");
        }
        if self.tol_scale.is_nan() || self.tol_scale < 0.0 {
            bail!("tol-scale must be nonnegative");
        }
        if let Some(out) = &self.out {
            std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        }
        Ok(())
    }

    /// `key=value` lines in the config-file format.
    pub fn echo(&self) -> Vec<(String, String)> {
        let ns = self.ns.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let out = self.out.as_deref().map(Path::display).map(|d| d.to_string()).unwrap_or_default();
        vec![
            ("m".into(), self.m.to_string()),
            ("p-max".into(), self.p_max.to_string()),
            ("p".into(), self.p.to_string()),
            ("n".into(), ns),
            ("trials".into(), self.trials.to_string()),
            ("family".into(), self.family.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("out".into(), out),
            ("budget".into(), self.budget.to_string()),
            ("points".into(), self.points.to_string()),
            ("alpha-exponent".into(), self.alpha_exponent.to_string()),
            ("tol-scale".into(), self.tol_scale.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("fuss-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# demo\nm = 3\nn=64, 128\nfamily=rademacher\ntrials=4\n").unwrap();
        let flags = Flags {
            config: Some(path),
            m: Some(1),
            ..Flags::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.m, 1);
        assert_eq!(cfg.ns, [64, 128]);
        assert_eq!(cfg.family, Family::Rademacher);
        assert_eq!(cfg.trials, 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config("m 3").is_err());
        assert!(parse_config("colour=red").is_err());
        let bad = Flags {
            family: Some("cauchy".into()),
            ..Flags::default()
        };
        assert!(RunConfig::resolve(&bad).is_err());
        let zero = Flags {
            n: Some("0".into()),
            ..Flags::default()
        };
        assert!(RunConfig::resolve(&zero).is_err());
    }

    #[test]
    fn echo_round_trips_through_the_file_format() {
        let cfg = RunConfig {
            ns: vec![32, 64],
            ..RunConfig::default()
        };
        let text: String = cfg
            .echo()
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let mut back = RunConfig::default();
        for (k, v) in parse_config(&text).unwrap() {
            back.set(&k, &v).unwrap();
        }
        assert_eq!(back, cfg);
    }
}
