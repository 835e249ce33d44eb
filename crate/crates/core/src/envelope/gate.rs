use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateVariant {
    /// `2·sig(γ f)` outside: continuous at the boundary, decays to 0.
    #[default]
    CorrectedSigmoid,
    /// `sig(-γ f)` outside, the uncorrected form. It tends to
    /// 1 far outside; kept only for comparison runs.
    Literal,
    /// Pass inside, zero outside.
    Hard,
}

impl std::str::FromStr for GateVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" | "corrected_sigmoid" => Ok(GateVariant::CorrectedSigmoid),
            "literal" => Ok(GateVariant::Literal),
            "hard" => Ok(GateVariant::Hard),
            other => Err(crate::Error::Precondition(format!(
                "unknown gate `{other}` (expected hard, sigmoid or literal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    /// Steepness of the sigmoid variants.
    pub gamma: f64,
    pub variant: GateVariant,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            gamma: 2.0,
            variant: GateVariant::CorrectedSigmoid,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.gamma > 0.0 && self.gamma.is_finite(), || {
            format!("gate steepness must be positive, got {}", self.gamma)
        })
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Factor applied to the error model output for boundary score `f_oc`.
pub fn gate_multiplier(f_oc: f64, config: &GateConfig) -> f64 {
    if f_oc > 0.0 {
        return 1.0;
    }
    match config.variant {
        GateVariant::CorrectedSigmoid => 2.0 * sigmoid(config.gamma * f_oc),
        GateVariant::Literal => sigmoid(-config.gamma * f_oc),
        GateVariant::Hard => 0.0,
    }
}

/// Limits `raw` according to the boundary score (positive means inside).
pub fn gate(raw: f64, f_oc: f64, config: &GateConfig) -> f64 {
    raw * gate_multiplier(f_oc, config)
}
