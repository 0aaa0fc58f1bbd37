use std::path::PathBuf;

use clap::ValueEnum;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{CliError, Command};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandName {
    Stability,
    Rearrange,
    Supersequence,
    Sumset,
    VerifyBasis,
    Dilute,
    Spectrum,
    Impossible,
    Adversarial,
}

/// A run described as a file. `parameters` uses the flag names with
/// underscores in place of dashes (`grid_max`, `A`, `N`, ...).
#[derive(Debug, Clone, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: SubcommandName,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub trace_path: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    pub fn command(&self) -> Result<Command, CliError> {
        let p = Value::Object(self.parameters.clone());
        let bad = |e: serde_json::Error| CliError::Invalid(format!("config parameters: {e}"));
        Ok(match self.subcommand {
            SubcommandName::Stability => {
                Command::Stability(serde_json::from_value(p).map_err(bad)?)
            }
            SubcommandName::Rearrange => {
                Command::Rearrange(serde_json::from_value(p).map_err(bad)?)
            }
            SubcommandName::Supersequence => {
                Command::Supersequence(serde_json::from_value(p).map_err(bad)?)
            }
            SubcommandName::Sumset => Command::Sumset(serde_json::from_value(p).map_err(bad)?),
            SubcommandName::VerifyBasis => {
                Command::VerifyBasis(serde_json::from_value(p).map_err(bad)?)
            }
            SubcommandName::Dilute => Command::Dilute(serde_json::from_value(p).map_err(bad)?),
            SubcommandName::Spectrum => Command::Spectrum(serde_json::from_value(p).map_err(bad)?),
            SubcommandName::Impossible => {
                Command::Impossible(serde_json::from_value(p).map_err(bad)?)
            }
            SubcommandName::Adversarial => {
                Command::Adversarial(serde_json::from_value(p).map_err(bad)?)
            }
        })
    }
}

impl Command {
    pub fn name(&self) -> SubcommandName {
        match self {
            Command::Stability(_) => SubcommandName::Stability,
            Command::Rearrange(_) => SubcommandName::Rearrange,
            Command::Supersequence(_) => SubcommandName::Supersequence,
            Command::Sumset(_) => SubcommandName::Sumset,
            Command::VerifyBasis(_) => SubcommandName::VerifyBasis,
            Command::Dilute(_) => SubcommandName::Dilute,
            Command::Spectrum(_) => SubcommandName::Spectrum,
            Command::Impossible(_) => SubcommandName::Impossible,
            Command::Adversarial(_) => SubcommandName::Adversarial,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Command::Stability(a) => a.validate(),
            Command::Rearrange(a) => a.validate(),
            Command::Supersequence(a) => a.validate(),
            Command::Sumset(a) => a.validate(),
            Command::VerifyBasis(a) => a.validate(),
            Command::Dilute(a) => a.validate(),
            Command::Spectrum(a) => a.validate(),
            Command::Impossible(a) => a.validate(),
            Command::Adversarial(a) => a.validate(),
        }
    }
}
