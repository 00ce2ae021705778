//! Experiment configuration, loaded from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::{builtin_environment, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::population::{BaselineKind, EngineConfig};

pub const DEFAULT_SWEEP: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

/// A builtin preset by name, or a full inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentChoice {
    Builtin(String),
    Inline(EnvironmentSpec),
}

impl EnvironmentChoice {
    pub fn resolve(&self) -> Result<EnvironmentSpec> {
        match self {
            EnvironmentChoice::Builtin(name) => builtin_environment(name),
            EnvironmentChoice::Inline(spec) => {
                spec.validate()?;
                Ok(spec.clone())
            }
        }
    }
}

impl Default for EnvironmentChoice {
    fn default() -> Self {
        EnvironmentChoice::Builtin("generic4".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentChoice,
    pub engine: EngineConfig,
    pub n_trials: usize,
    pub seed_base: u64,
    /// Lambda values to run the competitive engine at. `None` means the default sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    pub baselines: Vec<BaselineKind>,
    pub output_dir: PathBuf,
    /// Also write one row per iteration per trial.
    pub write_iterations: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            environment: EnvironmentChoice::default(),
            engine: EngineConfig::default(),
            n_trials: 30,
            seed_base: 42,
            sweep: None,
            baselines: vec![BaselineKind::Homogeneous, BaselineKind::Random],
            output_dir: PathBuf::from("results"),
            write_iterations: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::config(toml_error_field(text, &e), e.message().trim()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<root>", e.to_string()))
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec())
    }

    /// Checks every field and returns the resolved environment.
    pub fn validate(&self) -> Result<EnvironmentSpec> {
        let env = self
            .environment
            .resolve()
            .map_err(|e| Error::config("environment", e.to_string()))?;
        self.engine.validate(env.n_regimes())?;
        if self.n_trials < 1 {
            return Err(Error::config("n_trials", "must be >= 1"));
        }
        let sweep = self.sweep_values();
        for (i, l) in sweep.iter().enumerate() {
            if !(*l >= 0.0 && l.is_finite()) {
                return Err(Error::config(
                    format!("sweep[{i}]"),
                    "must be finite and >= 0",
                ));
            }
            if i > 0 && *l <= sweep[i - 1] {
                return Err(Error::config(
                    format!("sweep[{i}]"),
                    "values must be strictly increasing",
                ));
            }
        }
        if sweep.is_empty() && self.baselines.is_empty() {
            return Err(Error::config(
                "sweep",
                "nothing to run: empty sweep and no baselines",
            ));
        }
        for (i, b) in self.baselines.iter().enumerate() {
            if self.baselines[..i].contains(b) {
                return Err(Error::config(
                    format!("baselines[{i}]"),
                    "duplicate baseline",
                ));
            }
        }
        Ok(env)
    }
}

/// Dotted key path of a TOML error: a key named in the message if there is
/// one, otherwise the section and key at the error's location.
fn toml_error_field(text: &str, e: &toml::de::Error) -> String {
    let msg = e.message();
    if let Some(start) = msg.find('`') {
        if let Some(len) = msg[start + 1..].find('`') {
            return msg[start + 1..start + 1 + len].to_string();
        }
    }
    let Some(span) = e.span() else {
        return "<root>".into();
    };
    let before = &text[..span.start.min(text.len())];
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("").trim();
    let section = before[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    let key = line.split_once('=').map(|(k, _)| k.trim().to_string());
    // A span on a section header points at the section itself.
    let (section, key) = if line.starts_with('[') {
        (
            Some(
                line.trim_matches(|c| c == '[' || c == ']')
                    .trim()
                    .to_string(),
            ),
            None,
        )
    } else {
        (section, key)
    };
    match (section, key) {
        (Some(s), Some(k)) => format!("{s}.{k}"),
        (Some(s), None) => s,
        (None, Some(k)) => k,
        (None, None) => "<root>".into(),
    }
}
