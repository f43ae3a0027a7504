use std::path::{Path, PathBuf};

use psroth::{FunctionRecord, FunctionSpec, InverseSpec, KindParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything a run needs. Missing fields in a config file take the defaults
/// below; command-line flags are applied on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub function: FunctionRecord,
    pub n: u64,
    /// Sweep points; empty means "derive from `n`".
    pub n_list: Vec<u64>,
    pub q: u64,
    pub a: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<u64>,
    pub delta: f64,
    pub epsilon: f64,
    pub r: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Lower end `P` of the Vaughan sweep, which covers `(P, 2P]`.
    pub p: u64,
    /// The Vaughan sweep runs `m = 1..=m_max`.
    pub m_max: i64,
    /// Progression length `M` for Varnavides counting.
    pub progression_len: u64,
    /// A set to analyse in `roth` instead of the transferred one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<Vec<u64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            function: power_record(0.95),
            n: 100_000,
            n_list: Vec::new(),
            q: 1,
            a: 0,
            w: None,
            delta: 0.1,
            epsilon: 0.1,
            r: 3.0,
            trials: 50,
            seed: 0,
            grid: None,
            out_dir: PathBuf::from("out"),
            threads: None,
            p: 1000,
            m_max: 5,
            progression_len: 16,
            set: None,
        }
    }
}

/// `h(x) = x^{1/γ}`.
pub fn power_record(gamma: f64) -> FunctionRecord {
    FunctionRecord { kind: "pure_power".into(), c: 1.0 / gamma, c_h: 1.0, x0: 1.0, params: KindParams::default() }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub n: Option<u64>,
    pub grid: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }

    /// Defaults, then the file (if any), then flags.
    pub fn resolve(path: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(s) = flags.seed {
            cfg.seed = s;
        }
        if let Some(t) = flags.threads {
            cfg.threads = Some(t);
        }
        if let Some(d) = &flags.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(g) = flags.gamma {
            cfg.function = power_record(g);
        }
        if let Some(n) = flags.n {
            cfg.n = n;
        }
        if let Some(g) = flags.grid {
            cfg.grid = Some(g);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.q == 0 || self.a >= self.q {
            return Err(CliError::Config(format!("need 0 <= a < q, got a={}, q={}", self.a, self.q)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("n_list must be strictly ascending".into()));
        }
        self.inverse()?;
        Ok(())
    }

    pub fn function_spec(&self) -> Result<FunctionSpec, CliError> {
        FunctionSpec::from_record(&self.function).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn inverse(&self) -> Result<InverseSpec, CliError> {
        InverseSpec::new(self.function_spec()?).map_err(|e| CliError::Config(e.to_string()))
    }
}
