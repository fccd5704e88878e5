use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the video→text contrastive term turns similarities into a loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeForm {
    /// `−Σᵢ log softmax(sᵢ·/τ)ᵢᵢ`.
    #[default]
    LogSoftmax,
    /// `−Σᵢ exp(sᵢᵢ) / Σⱼ exp(sᵢⱼ)`, without a logarithm.
    Literal,
}

impl fmt::Display for CeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CeForm::LogSoftmax => "log_softmax",
            CeForm::Literal => "literal",
        })
    }
}

impl FromStr for CeForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" | "log_softmax" => Ok(CeForm::LogSoftmax),
            "literal" => Ok(CeForm::Literal),
            _ => Err(Error::Invalid(format!("unknown ce form {s:?} (expected log or literal)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossConfig {
    /// Hinge margin `M`.
    pub margin: f64,
    /// Weight `λ` of the hinge term.
    pub lambda: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub ce_form: CeForm,
    /// Softmax temperature `τ`; only the log-softmax form uses it.
    pub temperature: f64,
    pub seed: u64,
    pub frames_per_clip: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            margin: 5.0,
            lambda: 0.1,
            batch_size: 256,
            learning_rate: 5e-5,
            epochs: 3,
            ce_form: CeForm::LogSoftmax,
            temperature: 1.0,
            seed: 0,
            frames_per_clip: 3,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        if !(self.margin >= 0.0) {
            return bad(format!("margin must be >= 0, got {}", self.margin));
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return bad(format!("temperature must be > 0, got {}", self.temperature));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return bad(format!("learning rate must be >= 0, got {}", self.learning_rate));
        }
        if self.batch_size < 2 {
            return bad(format!("batch size must be >= 2, got {}", self.batch_size));
        }
        if self.frames_per_clip == 0 {
            return bad("frames per clip must be >= 1".into());
        }
        Ok(())
    }
}
