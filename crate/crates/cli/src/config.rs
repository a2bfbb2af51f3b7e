//! Experiment configuration: a strict JSON document.
//!
//! ```json
//! {
//!   "population": "example1",
//!   "policies": ["ucb-itt", "2sls-fixed", "2sls-adaptive:gamma=5"],
//!   "T": 100000,
//!   "seed": 7,
//!   "n_seeds": 20,
//!   "checkpoints": "pow2",
//!   "output_dir": "results",
//!   "alpha_mode": "gamma_times_thm8",
//!   "gamma": 20
//! }
//! ```
//!
//! `population` is a builtin name or a path to a population JSON file.
//! `checkpoints` is `"pow2"`, `{"every": n}` or an explicit list of rounds.
//! A 2SLS policy given without its parameter takes α = γ·α*, where α* is
//! `thm8_alpha_threshold` of the population, or γ itself for the adaptive
//! policy.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use iab::population::BUILTIN_NAMES;
use iab::{CheckpointSchedule, PolicyKind};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const DEFAULT_N_SEEDS: usize = 20;
pub const DEFAULT_GAMMA: f64 = 20.0;
pub const DEFAULT_OUTPUT_DIR: &str = "results";

const KEYS: [&str; 9] =
    ["population", "policies", "T", "seed", "n_seeds", "checkpoints", "output_dir", "alpha_mode", "gamma"];

/// One malformed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid config:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigError(pub Vec<FieldError>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PopulationRef {
    Builtin(String),
    File(PathBuf),
}

impl PopulationRef {
    /// A builtin name if it matches one, otherwise a file path.
    pub fn parse(s: &str) -> Self {
        if BUILTIN_NAMES.contains(&s) {
            PopulationRef::Builtin(s.to_string())
        } else {
            PopulationRef::File(PathBuf::from(s))
        }
    }

    fn render(&self) -> String {
        match self {
            PopulationRef::Builtin(name) => name.clone(),
            PopulationRef::File(path) => path.display().to_string(),
        }
    }
}

/// A policy as written in the config; 2SLS parameters may be left to resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyEntry {
    Explicit(PolicyKind),
    EpsDecayAuto,
    FixedAuto,
    AdaptiveAuto,
}

impl FromStr for PolicyEntry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2sls-eps-decay" => return Ok(PolicyEntry::EpsDecayAuto),
            "2sls-fixed" => return Ok(PolicyEntry::FixedAuto),
            "2sls-adaptive" => return Ok(PolicyEntry::AdaptiveAuto),
            _ => {}
        }
        match s.parse::<PolicyKind>() {
            Ok(PolicyKind::Pinned { .. } | PolicyKind::Uniform) | Err(_) => Err(format!(
                "unknown policy `{s}`; expected ucb-itt, ucb-at, 2sls-eps-decay, 2sls-fixed or 2sls-adaptive, \
                 optionally with :c=, :alpha= or :gamma="
            )),
            Ok(kind) => Ok(PolicyEntry::Explicit(kind)),
        }
    }
}

impl fmt::Display for PolicyEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyEntry::Explicit(kind) => write!(f, "{kind}"),
            PolicyEntry::EpsDecayAuto => write!(f, "2sls-eps-decay"),
            PolicyEntry::FixedAuto => write!(f, "2sls-fixed"),
            PolicyEntry::AdaptiveAuto => write!(f, "2sls-adaptive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    Literal,
    GammaTimesThm8,
}

impl AlphaMode {
    fn name(self) -> &'static str {
        match self {
            AlphaMode::Literal => "literal",
            AlphaMode::GammaTimesThm8 => "gamma_times_thm8",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub population: PopulationRef,
    pub policies: Vec<PolicyEntry>,
    pub horizon: u64,
    pub seed: u64,
    pub n_seeds: usize,
    pub checkpoints: CheckpointSchedule,
    pub output_dir: PathBuf,
    pub alpha_mode: AlphaMode,
    pub gamma: f64,
}

struct Collector(Vec<FieldError>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(FieldError { path: path.into(), reason: reason.into() });
    }
}

fn as_u64(v: &Value) -> Option<u64> {
    v.as_u64().or_else(|| v.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0 && *f < 2f64.powi(64)).map(|f| f as u64))
}

/// Parses and validates `text`, reporting every malformed field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError(vec![FieldError { path: "$".into(), reason: format!("not valid JSON: {e}") }]))?;
    let Value::Object(obj) = root else {
        return Err(ConfigError(vec![FieldError { path: "$".into(), reason: "expected an object".into() }]));
    };
    let mut errs = Collector(Vec::new());
    for key in obj.keys() {
        if !KEYS.contains(&key.as_str()) {
            errs.push(format!("$.{key}"), "unknown key");
        }
    }

    let population = match obj.get("population") {
        Some(Value::String(s)) if !s.is_empty() => Some(PopulationRef::parse(s)),
        Some(_) => {
            errs.push("$.population", "expected a builtin name or a file path");
            None
        }
        None => {
            errs.push("$.population", "missing");
            None
        }
    };

    let policies = match obj.get("policies") {
        Some(Value::Array(items)) if items.is_empty() => {
            errs.push("$.policies", "at least one policy is required");
            None
        }
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match item.as_str().map(str::parse::<PolicyEntry>) {
                    Some(Ok(p)) => out.push(p),
                    Some(Err(reason)) => errs.push(format!("$.policies[{i}]"), reason),
                    None => errs.push(format!("$.policies[{i}]"), "expected a string"),
                }
            }
            Some(out)
        }
        Some(_) => {
            errs.push("$.policies", "expected an array of policy strings");
            None
        }
        None => {
            errs.push("$.policies", "missing");
            None
        }
    };

    let horizon = match obj.get("T") {
        Some(v) => match as_u64(v) {
            Some(t) if t >= 1 => Some(t),
            _ => {
                errs.push("$.T", "expected a positive integer");
                None
            }
        },
        None => {
            errs.push("$.T", "missing");
            None
        }
    };

    let seed = match obj.get("seed") {
        Some(v) => as_u64(v).or_else(|| {
            errs.push("$.seed", "expected a nonnegative integer");
            None
        }),
        None => {
            errs.push("$.seed", "missing");
            None
        }
    };

    let n_seeds = match obj.get("n_seeds") {
        None => Some(DEFAULT_N_SEEDS),
        Some(v) => match as_u64(v) {
            Some(n) if n >= 1 => Some(n as usize),
            _ => {
                errs.push("$.n_seeds", "expected a positive integer");
                None
            }
        },
    };

    let checkpoints = match obj.get("checkpoints") {
        None => Some(CheckpointSchedule::PowersOfTwo),
        Some(Value::String(s)) if s == "pow2" => Some(CheckpointSchedule::PowersOfTwo),
        Some(Value::Object(m)) if m.len() == 1 && m.contains_key("every") => match as_u64(&m["every"]) {
            Some(n) if n >= 1 => Some(CheckpointSchedule::Every(n)),
            _ => {
                errs.push("$.checkpoints.every", "expected a positive integer");
                None
            }
        },
        Some(Value::Array(items)) if !items.is_empty() => {
            let mut rounds = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match as_u64(item) {
                    Some(t) if t >= 1 && rounds.last().is_none_or(|&prev| t > prev) => rounds.push(t),
                    _ => errs.push(format!("$.checkpoints[{i}]"), "expected strictly increasing positive integers"),
                }
            }
            Some(CheckpointSchedule::At(rounds))
        }
        Some(_) => {
            errs.push("$.checkpoints", "expected \"pow2\", {\"every\": n} or a nonempty list of rounds");
            None
        }
    };
    if let (Some(CheckpointSchedule::Every(n)), Some(t)) = (&checkpoints, horizon) {
        if *n > t {
            errs.push("$.checkpoints.every", format!("exceeds T = {t}"));
        }
    }
    if let (Some(CheckpointSchedule::At(ts)), Some(t)) = (&checkpoints, horizon) {
        if ts.last().is_some_and(|&last| last > t) {
            errs.push("$.checkpoints", format!("rounds must not exceed T = {t}"));
        }
    }

    let output_dir = match obj.get("output_dir") {
        None => Some(PathBuf::from(DEFAULT_OUTPUT_DIR)),
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(_) => {
            errs.push("$.output_dir", "expected a nonempty path string");
            None
        }
    };

    let alpha_mode = match obj.get("alpha_mode") {
        None => Some(AlphaMode::GammaTimesThm8),
        Some(Value::String(s)) if s == "literal" => Some(AlphaMode::Literal),
        Some(Value::String(s)) if s == "gamma_times_thm8" => Some(AlphaMode::GammaTimesThm8),
        Some(_) => {
            errs.push("$.alpha_mode", "expected \"literal\" or \"gamma_times_thm8\"");
            None
        }
    };

    let gamma = match obj.get("gamma") {
        None => Some(DEFAULT_GAMMA),
        Some(v) => match v.as_f64() {
            Some(g) if g.is_finite() && g > 0.0 => Some(g),
            _ => {
                errs.push("$.gamma", "expected a positive number");
                None
            }
        },
    };

    if let (Some(AlphaMode::Literal), Some(policies)) = (alpha_mode, &policies) {
        for (i, p) in policies.iter().enumerate() {
            if matches!(p, PolicyEntry::EpsDecayAuto | PolicyEntry::FixedAuto) {
                errs.push(format!("$.policies[{i}]"), "alpha is required when alpha_mode is \"literal\"");
            }
        }
    }

    match (population, policies, horizon, seed, n_seeds, checkpoints, output_dir, alpha_mode, gamma) {
        (Some(population), Some(policies), Some(horizon), Some(seed), Some(n_seeds), Some(checkpoints), Some(output_dir), Some(alpha_mode), Some(gamma))
            if errs.0.is_empty() =>
        {
            Ok(ExperimentConfig { population, policies, horizon, seed, n_seeds, checkpoints, output_dir, alpha_mode, gamma })
        }
        _ => Err(ConfigError(errs.0)),
    }
}

/// Canonical JSON with every field explicit.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    let checkpoints = match &cfg.checkpoints {
        CheckpointSchedule::PowersOfTwo => json!("pow2"),
        CheckpointSchedule::Every(n) => json!({ "every": n }),
        CheckpointSchedule::At(ts) => json!(ts),
    };
    let mut obj = Map::new();
    obj.insert("population".into(), json!(cfg.population.render()));
    obj.insert("policies".into(), json!(cfg.policies.iter().map(ToString::to_string).collect::<Vec<_>>()));
    obj.insert("T".into(), json!(cfg.horizon));
    obj.insert("seed".into(), json!(cfg.seed));
    obj.insert("n_seeds".into(), json!(cfg.n_seeds));
    obj.insert("checkpoints".into(), checkpoints);
    obj.insert("output_dir".into(), json!(cfg.output_dir.display().to_string()));
    obj.insert("alpha_mode".into(), json!(cfg.alpha_mode.name()));
    obj.insert("gamma".into(), json!(cfg.gamma));
    serde_json::to_string_pretty(&Value::Object(obj)).expect("config serializes")
}
