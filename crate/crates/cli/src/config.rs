//! Experiment configuration: defaults, a flat `key = value` file, and flags.
//!
//! Each setting is taken from the first layer that has it, in the order
//! flags, file, defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub const KEYS: [&str; 13] = [
    "density", "N", "m", "T", "out", "rtol", "atol", "times", "plot", "seed", "perturb", "beta", "alpha",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Flag,
    File { path: PathBuf, line: usize },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Flag => f.write_str("command line"),
            Source::File { path, line } => write!(f, "{}:{line}", path.display()),
        }
    }
}

/// Raw settings of one layer, keyed by name.
#[derive(Debug, Default, Clone)]
pub struct Layer(BTreeMap<&'static str, (String, Source)>);

impl Layer {
    pub fn set(&mut self, key: &'static str, value: impl Into<String>, source: Source) {
        self.0.insert(key, (value.into(), source));
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_str(&text, path)
    }

    pub fn parse_str(text: &str, path: &Path) -> Result<Self> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let source = Source::File { path: path.to_path_buf(), line: i + 1 };
            let Some((key, value)) = line.split_once('=') else {
                bail!(UsageError(format!("{source}: expected `key = value`, found `{line}`")));
            };
            let key = key.trim();
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                bail!(UsageError(format!("{source}: unknown key `{key}` (known: {})", KEYS.join(", "))));
            };
            layer.set(known, value.trim(), source);
        }
        Ok(layer)
    }
}

/// A configuration problem reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Output grid: `count` uniform times on `(0, T]`, or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeGrid {
    Count(usize),
    List(Vec<f64>),
}

impl TimeGrid {
    pub fn resolve(&self, horizon: f64) -> Vec<f64> {
        match self {
            TimeGrid::Count(k) => (1..=*k).map(|i| horizon * i as f64 / *k as f64).collect(),
            TimeGrid::List(v) => v.clone(),
        }
    }
}

fn parse_times(s: &str) -> std::result::Result<TimeGrid, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty time grid".into());
    }
    if !s.contains(',') && !s.contains('.') && !s.contains('e') {
        let k: usize = s.parse().map_err(|e| format!("{e}"))?;
        if k == 0 {
            return Err("empty time grid".into());
        }
        return Ok(TimeGrid::Count(k));
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.iter().any(|t| !(t.is_finite() && *t > 0.0)) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err("times must be positive and strictly increasing".into());
    }
    Ok(TimeGrid::List(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub density: Option<String>,
    pub n: Vec<usize>,
    pub m: f64,
    pub horizon: f64,
    pub out: PathBuf,
    pub rtol: f64,
    pub atol: f64,
    pub times: TimeGrid,
    pub plot: bool,
    pub seed: u64,
    pub perturb: f64,
    pub beta: f64,
    pub alpha: f64,
}

/// Per-subcommand defaults for the settings whose natural value differs.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub n: &'static str,
    pub horizon: &'static str,
    pub times: &'static str,
}

impl ExperimentConfig {
    pub fn resolve(flags: &Layer, file: &Layer, defaults: Defaults) -> Result<Self> {
        let lookup = |key: &'static str| flags.0.get(key).or_else(|| file.0.get(key));
        fn field<T>(
            key: &str,
            raw: Option<&(String, Source)>,
            default: &str,
            parse: impl Fn(&str) -> std::result::Result<T, String>,
        ) -> Result<T> {
            match raw {
                Some((value, source)) => parse(value)
                    .map_err(|e| UsageError(format!("{source}: field `{key}` = `{value}`: {e}")).into()),
                None => parse(default).map_err(|e| anyhow::anyhow!("default for `{key}`: {e}")),
            }
        }
        let real = |s: &str| s.trim().parse::<f64>().map_err(|e| e.to_string());
        let positive = |s: &str| match real(s)? {
            v if v > 0.0 && v.is_finite() => Ok(v),
            v => Err(format!("must be positive, got {v}")),
        };
        let cfg = ExperimentConfig {
            density: lookup("density").map(|(v, _)| v.clone()),
            n: field("N", lookup("N"), defaults.n, |s| {
                let v = s
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                if v.is_empty() || v.contains(&0) {
                    return Err("particle counts must be positive".into());
                }
                Ok(v)
            })?,
            m: field("m", lookup("m"), "2", |s| match real(s)? {
                v if v > 1.0 && v.is_finite() => Ok(v),
                v => Err(format!("exponent must exceed 1, got {v}")),
            })?,
            horizon: field("T", lookup("T"), defaults.horizon, positive)?,
            out: field("out", lookup("out"), ".", |s| Ok(PathBuf::from(s)))?,
            rtol: field("rtol", lookup("rtol"), "1e-8", positive)?,
            atol: field("atol", lookup("atol"), "1e-10", positive)?,
            times: field("times", lookup("times"), defaults.times, parse_times)?,
            plot: field("plot", lookup("plot"), "false", |s| s.trim().parse::<bool>().map_err(|e| e.to_string()))?,
            seed: field("seed", lookup("seed"), "0", |s| s.trim().parse::<u64>().map_err(|e| e.to_string()))?,
            perturb: field("perturb", lookup("perturb"), "0", |s| match real(s)? {
                v if (0.0..1.0).contains(&v) => Ok(v),
                v => Err(format!("must lie in [0, 1), got {v}")),
            })?,
            beta: field("beta", lookup("beta"), "1", positive)?,
            alpha: field("alpha", lookup("alpha"), "0", real)?,
        };
        Ok(cfg)
    }

    pub fn single_n(&self) -> Result<usize> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => bail!(UsageError(format!("expected a single N, got {:?}", self.n))),
        }
    }

    pub fn output_times(&self) -> Vec<f64> {
        self.times.resolve(self.horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: Defaults = Defaults { n: "100", horizon: "1", times: "20" };

    #[test]
    fn precedence_is_flags_then_file_then_defaults() {
        let file = Layer::parse_str("m = 3\nN = 50 # comment\n\nT=4", Path::new("exp.cfg")).unwrap();
        let mut flags = Layer::default();
        flags.set("m", "1.5", Source::Flag);
        let cfg = ExperimentConfig::resolve(&flags, &file, D).unwrap();
        assert_eq!(cfg.m, 1.5);
        assert_eq!(cfg.n, vec![50]);
        assert_eq!(cfg.horizon, 4.0);
        assert_eq!(cfg.rtol, 1e-8);
        assert_eq!(cfg.times, TimeGrid::Count(20));
    }

    #[test]
    fn file_errors_name_line_and_field() {
        let err = Layer::parse_str("m = 2\nbogus = 1", Path::new("a.cfg")).unwrap_err();
        assert!(err.to_string().starts_with("a.cfg:2: unknown key `bogus`"), "{err}");
        let err = Layer::parse_str("m 2", Path::new("a.cfg")).unwrap_err();
        assert!(err.to_string().contains("a.cfg:1"), "{err}");
        let file = Layer::parse_str("\nm = 0.5", Path::new("a.cfg")).unwrap();
        let err = ExperimentConfig::resolve(&Layer::default(), &file, D).unwrap_err();
        assert!(err.to_string().starts_with("a.cfg:2: field `m`"), "{err}");
    }

    #[test]
    fn time_grids() {
        assert_eq!(parse_times("4"), Ok(TimeGrid::Count(4)));
        assert_eq!(parse_times("0.5,1,2"), Ok(TimeGrid::List(vec![0.5, 1.0, 2.0])));
        assert_eq!(TimeGrid::Count(4).resolve(2.0), vec![0.5, 1.0, 1.5, 2.0]);
        assert!(parse_times("").is_err());
        assert!(parse_times("0").is_err());
        assert!(parse_times("1,0.5").is_err());
    }
}
