//! Line-based `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! experiment = survival
//! sigma = 2:1.0, 3:0.5
//! tail = 1.0, 2.0
//! m = 1, 2, 3
//! k = -10..10
//! t = 2^-6, 2^-5, 1
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::analytic::SeriesTolerance;
use crate::padic::Prime;
use crate::walk::{PowerTail, SigmaSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    Malformed { line: usize, key: String, message: String },
    #[error("missing required key `{key}` for experiment {experiment}")]
    Missing { key: &'static str, experiment: Experiment },
    #[error("line {line}: `{key}`: {message}")]
    Invariant { line: usize, key: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    JumpLaw,
    Survival,
    Marginal,
    Moments,
    Adelic,
    Tightness,
    Oracle,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::JumpLaw,
        Experiment::Survival,
        Experiment::Marginal,
        Experiment::Moments,
        Experiment::Adelic,
        Experiment::Tightness,
        Experiment::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::JumpLaw => "jump-law",
            Experiment::Survival => "survival",
            Experiment::Marginal => "marginal",
            Experiment::Moments => "moments",
            Experiment::Adelic => "adelic",
            Experiment::Tightness => "tightness",
            Experiment::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `(p, b)` pairs for the jump-law test.
    pub laws: Vec<(Prime, f64)>,
    /// `(p, k)` spheres for the uniformity test.
    pub spheres: Vec<(Prime, u32)>,
    pub sigma: Option<SigmaSpec>,
    pub b: Option<f64>,
    pub m: Vec<u32>,
    pub horizon: Option<f64>,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub delta: Vec<f64>,
    pub k_range: Option<(i64, i64)>,
    pub r: Option<f64>,
    /// Smallest prime `M` entering the adelic survival event.
    pub cutoff_from: u64,
    pub epsilon: f64,
    pub samples: u64,
    pub alpha: f64,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub series_tol: SeriesTolerance,
    pub marginal_tol: f64,
    pub slope_tol: f64,
    pub uniform_tol: f64,
}

impl ExperimentConfig {
    /// Defaults for every optional key.
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            laws: Vec::new(),
            spheres: Vec::new(),
            sigma: None,
            b: None,
            m: Vec::new(),
            horizon: None,
            t: Vec::new(),
            lambda: Vec::new(),
            delta: Vec::new(),
            k_range: None,
            r: None,
            cutoff_from: 2,
            epsilon: 1e-3,
            samples: 100_000,
            alpha: 1e-3,
            seed: 0,
            workers: 1,
            out: None,
            series_tol: SeriesTolerance::default(),
            marginal_tol: 0.01,
            slope_tol: 0.05,
            uniform_tol: 0.01,
        }
    }

    pub fn sigma(&self) -> &SigmaSpec {
        self.sigma.as_ref().expect("validated config carries sigma")
    }

    pub fn b(&self) -> f64 {
        self.b.expect("validated config carries b")
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.expect("validated config carries T")
    }

    pub fn k_range(&self) -> (i64, i64) {
        self.k_range.expect("validated config carries k")
    }

    pub fn r(&self) -> f64 {
        self.r.expect("validated config carries r")
    }
}

const KEYS: &[&str] = &[
    "experiment",
    "laws",
    "sphere",
    "sigma",
    "tail",
    "b",
    "m",
    "T",
    "t",
    "lambda",
    "delta",
    "k",
    "r",
    "M",
    "epsilon",
    "N",
    "alpha",
    "seed",
    "workers",
    "out",
    "tol",
    "marginal_tol",
    "slope_tol",
    "uniform_tol",
];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Malformed {
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn list(&self) -> Vec<&str> {
        self.value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    }

    fn real(&self, token: &str) -> Result<f64, ConfigError> {
        parse_real(token).ok_or_else(|| self.err(format!("`{token}` is not a number")))
    }

    fn int<T: FromStr>(&self, token: &str) -> Result<T, ConfigError> {
        token.parse().map_err(|_| self.err(format!("`{token}` is not a valid integer")))
    }

    fn prime(&self, token: &str) -> Result<Prime, ConfigError> {
        let n: u64 = self.int(token)?;
        Prime::new(n).map_err(|e| self.err(e.to_string()))
    }

    fn pair<'t>(&self, token: &'t str) -> Result<(&'t str, &'t str), ConfigError> {
        token
            .split_once(':')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| self.err(format!("`{token}` is not of the form a:b")))
    }

    fn single(&self) -> Result<&str, ConfigError> {
        match self.list().as_slice() {
            [one] => Ok(one),
            _ => Err(self.err("expected a single value")),
        }
    }
}

/// Decimal number, or `base^exponent` with integer exponent.
fn parse_real(token: &str) -> Option<f64> {
    match token.split_once('^') {
        Some((base, exp)) => {
            let base: f64 = base.trim().parse().ok()?;
            let exp: i32 = exp.trim().parse().ok()?;
            Some(base.powi(exp))
        }
        None => token.parse().ok(),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: content.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if !seen.insert(key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        entries.push(Entry { line, key, value });
    }

    let experiment_entry = entries.iter().find(|e| e.key == "experiment").ok_or(ConfigError::Missing {
        key: "experiment",
        experiment: Experiment::Oracle,
    })?;
    let experiment: Experiment = experiment_entry
        .single()?
        .parse()
        .map_err(|msg: String| experiment_entry.err(msg))?;
    let mut cfg = ExperimentConfig::new(experiment);
    let mut lines: BTreeMap<&str, usize> = BTreeMap::new();
    let mut explicit_sigma: Option<BTreeMap<Prime, f64>> = None;
    let mut tail: Option<PowerTail> = None;

    for e in &entries {
        lines.insert(e.key, e.line);
        match e.key {
            "experiment" => {}
            "laws" => {
                for tok in e.list() {
                    let (p, b) = e.pair(tok)?;
                    cfg.laws.push((e.prime(p)?, e.real(b)?));
                }
            }
            "sphere" => {
                for tok in e.list() {
                    let (p, k) = e.pair(tok)?;
                    cfg.spheres.push((e.prime(p)?, e.int(k)?));
                }
            }
            "sigma" => {
                let mut map = BTreeMap::new();
                for tok in e.list() {
                    let (p, v) = e.pair(tok)?;
                    if map.insert(e.prime(p)?, e.real(v)?).is_some() {
                        return Err(e.err(format!("prime {p} listed twice")));
                    }
                }
                explicit_sigma = Some(map);
            }
            "tail" => match e.list().as_slice() {
                [a, s] => tail = Some(PowerTail { a: e.real(a)?, s: e.real(s)? }),
                _ => return Err(e.err("expected `a, s`")),
            },
            "b" => cfg.b = Some(e.real(e.single()?)?),
            "m" => cfg.m = e.list().into_iter().map(|tok| e.int(tok)).collect::<Result<_, _>>()?,
            "T" => cfg.horizon = Some(e.real(e.single()?)?),
            "t" => cfg.t = e.list().into_iter().map(|tok| e.real(tok)).collect::<Result<_, _>>()?,
            "lambda" => cfg.lambda = e.list().into_iter().map(|tok| e.real(tok)).collect::<Result<_, _>>()?,
            "delta" => cfg.delta = e.list().into_iter().map(|tok| e.real(tok)).collect::<Result<_, _>>()?,
            "k" => {
                let v = e.single()?;
                let (lo, hi) = v.split_once("..").ok_or_else(|| e.err("expected `lo..hi`"))?;
                cfg.k_range = Some((e.int(lo.trim())?, e.int(hi.trim())?));
            }
            "r" => cfg.r = Some(e.real(e.single()?)?),
            "M" => cfg.cutoff_from = e.int(e.single()?)?,
            "epsilon" => cfg.epsilon = e.real(e.single()?)?,
            "N" => {
                let v = e.real(e.single()?)?;
                if !(v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
                    return Err(e.err("N must be a positive integer"));
                }
                cfg.samples = v as u64;
            }
            "alpha" => cfg.alpha = e.real(e.single()?)?,
            "seed" => cfg.seed = e.int(e.single()?)?,
            "workers" => cfg.workers = e.int(e.single()?)?,
            "out" => cfg.out = Some(PathBuf::from(e.value)),
            "tol" => {
                cfg.series_tol = SeriesTolerance::new(e.real(e.single()?)?).map_err(|err| e.err(err.to_string()))?;
            }
            "marginal_tol" => cfg.marginal_tol = e.real(e.single()?)?,
            "slope_tol" => cfg.slope_tol = e.real(e.single()?)?,
            "uniform_tol" => cfg.uniform_tol = e.real(e.single()?)?,
            other => unreachable!("key `{other}` passed the key filter"),
        }
    }
    if explicit_sigma.is_some() || tail.is_some() {
        let line = lines.get("sigma").or(lines.get("tail")).copied().unwrap_or(0);
        let spec = SigmaSpec::new(explicit_sigma.unwrap_or_default(), tail).map_err(|err| ConfigError::Invariant {
            line,
            key: "sigma",
            message: err.to_string(),
        })?;
        cfg.sigma = Some(spec);
    }
    validate(&cfg, &lines)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig, lines: &BTreeMap<&str, usize>) -> Result<(), ConfigError> {
    let line = |key: &str| lines.get(key).copied().unwrap_or(0);
    let fail = |key: &'static str, message: String| ConfigError::Invariant {
        line: line(key),
        key,
        message,
    };
    let missing = |key: &'static str| ConfigError::Missing {
        key,
        experiment: cfg.experiment,
    };

    if let Some(b) = cfg.b {
        if !(b.is_finite() && b > 0.0) {
            return Err(fail("b", format!("b must be positive, got {b}")));
        }
    }
    for &(_, b) in &cfg.laws {
        if !(b.is_finite() && b > 0.0) {
            return Err(fail("laws", format!("b must be positive, got {b}")));
        }
    }
    if let Some(r) = cfg.r {
        let b = cfg.b.ok_or_else(|| missing("b"))?;
        if !(r > 0.0 && r < b) {
            return Err(fail("r", format!("r must lie in (0, b), got r = {r}, b = {b}")));
        }
    }
    if let Some(t) = cfg.horizon {
        if !(t.is_finite() && t >= 0.0) {
            return Err(fail("T", format!("T must be nonnegative, got {t}")));
        }
    }
    if cfg.t.iter().any(|&t| !(t.is_finite() && t >= 0.0)) {
        return Err(fail("t", "times must be nonnegative".into()));
    }
    if cfg.lambda.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
        return Err(fail("lambda", "lambda values must be positive".into()));
    }
    if let Some(t) = cfg.horizon {
        if cfg.delta.iter().any(|&d| !(d > 0.0 && d < t)) {
            return Err(fail("delta", format!("delta values must lie in (0, T) with T = {t}")));
        }
    }
    if let Some((lo, hi)) = cfg.k_range {
        if lo > hi {
            return Err(fail("k", format!("empty range {lo}..{hi}")));
        }
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(fail("epsilon", format!("epsilon must lie in (0, 1), got {}", cfg.epsilon)));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(fail("alpha", format!("alpha must lie in (0, 1), got {}", cfg.alpha)));
    }
    if cfg.workers == 0 {
        return Err(fail("workers", "at least one worker is needed".into()));
    }
    for (key, v) in [("marginal_tol", cfg.marginal_tol), ("slope_tol", cfg.slope_tol), ("uniform_tol", cfg.uniform_tol)] {
        if !(v.is_finite() && v >= 0.0) {
            let key: &'static str = KEYS.iter().find(|k| **k == key).copied().expect("known key");
            return Err(fail(key, format!("tolerance must be nonnegative, got {v}")));
        }
    }

    let needs: &[&'static str] = match cfg.experiment {
        Experiment::JumpLaw => &[],
        Experiment::Survival => &["sigma", "b", "m", "T", "lambda"],
        Experiment::Marginal => &["sigma", "b", "m", "t", "k"],
        Experiment::Moments => &["sigma", "b", "m", "t", "r"],
        Experiment::Adelic => &["sigma", "b", "m", "T"],
        Experiment::Tightness => &["sigma", "b", "m", "T", "delta", "lambda"],
        Experiment::Oracle => &["sigma", "b"],
    };
    for &key in needs {
        let present = match key {
            "sigma" => cfg.sigma.is_some(),
            "b" => cfg.b.is_some(),
            "m" => !cfg.m.is_empty(),
            "T" => cfg.horizon.is_some(),
            "t" => !cfg.t.is_empty(),
            "lambda" => !cfg.lambda.is_empty(),
            "delta" => !cfg.delta.is_empty(),
            "k" => cfg.k_range.is_some(),
            "r" => cfg.r.is_some(),
            _ => unreachable!(),
        };
        if !present {
            return Err(missing(key));
        }
    }
    match cfg.experiment {
        Experiment::JumpLaw if cfg.laws.is_empty() && cfg.spheres.is_empty() => Err(missing("laws")),
        Experiment::Marginal if cfg.m.windows(2).any(|w| w[0] >= w[1]) => {
            Err(fail("m", "m list must be strictly increasing".into()))
        }
        Experiment::Moments if cfg.t.iter().any(|&t| t <= 0.0) || cfg.t.len() < 2 => {
            Err(fail("t", "the moment grid needs at least two positive times".into()))
        }
        Experiment::Tightness if cfg.delta.windows(2).any(|w| w[0] <= w[1]) => {
            Err(fail("delta", "delta grid must be strictly decreasing".into()))
        }
        _ => Ok(()),
    }
}
