//! Experiment configuration: a flat key-value TOML file plus command-line
//! overrides.
//!
//! Precedence is defaults, then flags, then the file. Every key in the file
//! must be consumed by the chosen protocol; leftovers are errors.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Serialize;

use qip::harness::Mode;
use qip::lowrank::Variant;
use qip::purity::MaskEnsemble;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config '{path}': {reason}")]
    Read { path: String, reason: String },

    #[error("config is not a flat key-value table: {0}")]
    Syntax(String),

    #[error("unknown config key '{0}'")]
    UnknownKey(String),

    #[error("config key '{key}': {reason}")]
    Value { key: String, reason: String },

    #[error("config rejected by the protocol: {0}")]
    Protocol(String),
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    Purity,
    Tomo,
    Lowrank,
    Stab,
    Uniformity,
    Nogo,
    Trivial,
}

impl ProtocolName {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolName::Purity => "purity",
            ProtocolName::Tomo => "tomo",
            ProtocolName::Lowrank => "lowrank",
            ProtocolName::Stab => "stab",
            ProtocolName::Uniformity => "uniformity",
            ProtocolName::Nogo => "nogo",
            ProtocolName::Trivial => "trivial",
        }
    }
}

/// Hidden instances for the purity protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityInstances {
    Pure,
    Mixed,
    /// Pure or maximally mixed with equal probability.
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Uniform,
    SupportFraction(f64),
    PointMass,
}

impl Distribution {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s {
            "uniform" => return Some(Distribution::Uniform),
            "point_mass" => return Some(Distribution::PointMass),
            _ => {}
        }
        let f: f64 = s.strip_prefix("support_fraction(")?.strip_suffix(')')?.trim().parse().ok()?;
        (f > 0.0 && f <= 1.0).then_some(Distribution::SupportFraction(f))
    }

    pub fn probabilities(&self, k: usize) -> Vec<f64> {
        match self {
            Distribution::Uniform => vec![1.0 / k as f64; k],
            Distribution::SupportFraction(f) => qip::stream::support_fraction(k, *f),
            Distribution::PointMass => qip::stream::point_mass(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    BruteForce,
    Garbage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ProtocolConfig {
    Purity {
        d: usize,
        delta: f64,
        mask_ensemble: MaskEnsemble,
        instances: PurityInstances,
        adversary: String,
    },
    Tomo {
        d: usize,
        epsilon: f64,
        delta: f64,
        rank_k: Option<usize>,
        c_v: f64,
        c_p: f64,
        adversary: String,
    },
    Lowrank {
        d: usize,
        k: usize,
        epsilon: f64,
        delta: f64,
        variant: Variant,
        adversary: String,
    },
    Stab {
        n: usize,
        epsilon: f64,
        delta: f64,
        spread: f64,
        adversary: String,
    },
    Uniformity {
        k: usize,
        epsilon: f64,
        degree_cap: usize,
        distribution: Distribution,
        waive_constraint: bool,
        adversary: String,
    },
    Nogo {
        d: usize,
        delta: f64,
        mask_ensemble: MaskEnsemble,
    },
    Trivial {
        n: usize,
        epsilon: f64,
        delta: f64,
        spread: f64,
        exact_decider: bool,
        solver: SolverName,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Excluded from reports so that reruns into other directories compare
    /// byte for byte.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub transcripts: bool,
    #[serde(flatten)]
    pub protocol: ProtocolConfig,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub output_dir: Option<PathBuf>,
    pub transcripts: bool,
}

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUTPUT_DIR: &str = "qip-out";

/// Parses the text of a config file.
pub fn parse_table(text: &str) -> Result<BTreeMap<String, toml::Value>, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        if matches!(v, toml::Value::Table(_) | toml::Value::Array(_)) {
            return Err(ConfigError::Syntax(format!("key '{k}' is not a scalar")));
        }
        out.insert(k, v);
    }
    Ok(out)
}

pub fn read_table(path: &Path) -> Result<BTreeMap<String, toml::Value>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_table(&text)
}

/// Tracks which file keys were consumed.
struct Keys {
    map: BTreeMap<String, toml::Value>,
    used: BTreeSet<String>,
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::Float(x)) if x.is_finite() => Ok(x),
            Some(toml::Value::Integer(i)) => Ok(i as f64),
            Some(v) => Err(bad(key, format!("expected a number, got {v}"))),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.opt_usize(key).map(|v| v.unwrap_or(default))
    }

    fn opt_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(v) => Err(bad(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            // Seeds above i64::MAX do not fit a TOML integer.
            Some(toml::Value::String(s)) => s.parse().map(Some).map_err(|_| bad(key, format!("'{s}' is not a 64-bit integer"))),
            Some(v) => Err(bad(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(b),
            Some(v) => Err(bad(key, format!("expected true or false, got {v}"))),
        }
    }

    fn string(&mut self, key: &str, default: &str) -> Result<String, ConfigError> {
        match self.take(key) {
            None => Ok(default.to_string()),
            Some(toml::Value::String(s)) => Ok(s),
            Some(v) => Err(bad(key, format!("expected a string, got {v}"))),
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, default: &str, options: &[(&str, T)]) -> Result<T, ConfigError> {
        let s = self.string(key, default)?;
        options.iter().find(|(name, _)| *name == s).map(|(_, v)| *v).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            bad(key, format!("'{s}' is not one of {}", names.join(", ")))
        })
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.map.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(ConfigError::UnknownKey(k.clone())),
            None => Ok(()),
        }
    }
}

const MODES: [(&str, Mode); 2] = [("ideal", Mode::Ideal), ("sampled", Mode::Sampled)];
const ENSEMBLES: [(&str, MaskEnsemble); 3] = [
    ("haar", MaskEnsemble::Haar),
    ("clifford", MaskEnsemble::Clifford),
    ("pauli", MaskEnsemble::Pauli),
];

impl ExperimentConfig {
    /// Resolves a config for `protocol` from an optional file table and the
    /// command-line overrides.
    pub fn resolve(protocol: ProtocolName, file: BTreeMap<String, toml::Value>, flags: &Overrides) -> Result<Self, ConfigError> {
        let mut keys = Keys {
            map: file,
            used: BTreeSet::new(),
        };
        if let Some(name) = keys.take("protocol") {
            if name.as_str() != Some(protocol.as_str()) {
                return Err(bad("protocol", format!("file names {name}, command line names {}", protocol.as_str())));
            }
        }
        let trials = keys.usize("trials", flags.trials.unwrap_or(DEFAULT_TRIALS))?;
        if trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        let seed = keys.u64("seed")?.or(flags.seed).unwrap_or(DEFAULT_SEED);
        let flag_mode = match flags.mode.unwrap_or_default() {
            Mode::Ideal => "ideal",
            Mode::Sampled => "sampled",
        };
        let mode = keys.choice("mode", flag_mode, &MODES)?;
        let output_dir = match keys.take("output_dir") {
            Some(toml::Value::String(s)) => PathBuf::from(s),
            Some(v) => return Err(bad("output_dir", format!("expected a path string, got {v}"))),
            None => flags.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        };
        let transcripts = keys.bool("transcripts", flags.transcripts)?;

        let protocol = match protocol {
            ProtocolName::Purity => ProtocolConfig::Purity {
                d: keys.usize("d", 8)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                mask_ensemble: keys.choice("mask_ensemble", "haar", &ENSEMBLES)?,
                instances: keys.choice(
                    "instances",
                    "both",
                    &[
                        ("pure", PurityInstances::Pure),
                        ("mixed", PurityInstances::Mixed),
                        ("both", PurityInstances::Both),
                    ],
                )?,
                adversary: keys.string("adversary", "honest")?,
            },
            ProtocolName::Tomo => ProtocolConfig::Tomo {
                d: keys.usize("d", 4)?,
                epsilon: keys.f64("epsilon", 0.5)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                rank_k: keys.opt_usize("rank_k")?,
                c_v: keys.f64("c_v", 1.0)?,
                c_p: keys.f64("c_p", 1.0)?,
                adversary: keys.string("adversary", "honest")?,
            },
            ProtocolName::Lowrank => ProtocolConfig::Lowrank {
                d: keys.usize("d", 4)?,
                k: keys.usize("k", 1)?,
                epsilon: keys.f64("epsilon", 0.6)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                variant: keys.choice(
                    "variant",
                    "standard",
                    &[("standard", Variant::Standard), ("wide", Variant::Wide), ("state", Variant::State)],
                )?,
                adversary: keys.string("adversary", "honest")?,
            },
            ProtocolName::Stab => ProtocolConfig::Stab {
                n: keys.usize("n", 3)?,
                epsilon: keys.f64("epsilon", 0.4)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                spread: keys.f64("spread", 0.6)?,
                adversary: keys.string("adversary", "honest")?,
            },
            ProtocolName::Uniformity => {
                let k = keys.usize("k", 1 << 16)?;
                let epsilon = keys.f64("epsilon", 0.75)?;
                let degree_cap = keys.usize("degree_cap", qip::stream::DEFAULT_DEGREE_CAP)?;
                let text = keys.string("distribution", "uniform")?;
                let distribution = Distribution::parse(&text).ok_or_else(|| {
                    bad(
                        "distribution",
                        format!("'{text}' is not uniform, point_mass or support_fraction(f) with 0 < f <= 1"),
                    )
                })?;
                ProtocolConfig::Uniformity {
                    k,
                    epsilon,
                    degree_cap,
                    distribution,
                    waive_constraint: keys.bool("waive_constraint", false)?,
                    adversary: keys.string("adversary", "honest")?,
                }
            }
            ProtocolName::Nogo => ProtocolConfig::Nogo {
                d: keys.usize("d", 8)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                mask_ensemble: keys.choice("mask_ensemble", "haar", &ENSEMBLES)?,
            },
            ProtocolName::Trivial => ProtocolConfig::Trivial {
                n: keys.usize("n", 2)?,
                epsilon: keys.f64("epsilon", 0.4)?,
                delta: keys.f64("delta", 1.0 / 3.0)?,
                spread: keys.f64("spread", 0.6)?,
                exact_decider: keys.bool("exact_decider", false)?,
                solver: keys.choice(
                    "solver",
                    "brute_force",
                    &[("brute_force", SolverName::BruteForce), ("garbage", SolverName::Garbage)],
                )?,
            },
        };
        keys.finish()?;
        Ok(Self {
            trials,
            seed,
            mode,
            output_dir,
            transcripts,
            protocol,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.protocol {
            ProtocolConfig::Purity { .. } => "purity",
            ProtocolConfig::Tomo { .. } => "tomo",
            ProtocolConfig::Lowrank { .. } => "lowrank",
            ProtocolConfig::Stab { .. } => "stab",
            ProtocolConfig::Uniformity { .. } => "uniformity",
            ProtocolConfig::Nogo { .. } => "nogo",
            ProtocolConfig::Trivial { .. } => "trivial",
        }
    }
}
