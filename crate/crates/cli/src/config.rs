use qnr_core::{SimOptions, DEFAULT_MAX_QUBITS, DEFAULT_TOLERANCE};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable overriding the default qubit cap.
pub const MAX_QUBITS_ENV: &str = "QNR_MAX_QUBITS";

/// Hard ceiling on `max_qubits`, whatever the configuration says.
pub const MAX_QUBITS_CEILING: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub max_qubits: u32,
    pub seed: Option<u64>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_qubits: DEFAULT_MAX_QUBITS,
            seed: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(1..=MAX_QUBITS_CEILING).contains(&self.max_qubits) {
            return Err(CliError::InvalidInput(format!(
                "max qubits must be in 1..={MAX_QUBITS_CEILING}, got {}",
                self.max_qubits
            )));
        }
        Ok(())
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            max_qubits: self.max_qubits,
            tolerance: self.tolerance,
        }
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::InvalidInput("--seed is required for sampling".into()))
    }
}
