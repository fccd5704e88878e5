use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a candidate caption is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefMode {
    VideoRef,
    TextRef,
    VideoTextRef,
}

impl RefMode {
    pub const ALL: [RefMode; 3] = [RefMode::VideoRef, RefMode::TextRef, RefMode::VideoTextRef];

    pub fn short(self) -> &'static str {
        match self {
            Self::VideoRef => "v",
            Self::TextRef => "t",
            Self::VideoTextRef => "vt",
        }
    }
}

impl fmt::Display for RefMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::VideoRef => "video_ref",
            Self::TextRef => "text_ref",
            Self::VideoTextRef => "video_text_ref",
        })
    }
}

impl FromStr for RefMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v" | "video" | "video_ref" => Ok(Self::VideoRef),
            "t" | "text" | "text_ref" => Ok(Self::TextRef),
            "vt" | "video_text" | "video_text_ref" => Ok(Self::VideoTextRef),
            _ => Err(Error::Invalid(format!("unknown reference mode {s:?} (v|t|vt)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FineAggregation {
    #[default]
    Precision,
    FValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiRefPolicy {
    #[default]
    Max,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParagraphPolicy {
    #[default]
    MeanOfSentences,
}

pub const DEFAULT_ALPHA: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub alpha: f64,
    pub mode: RefMode,
    pub fine_aggregation: FineAggregation,
    pub multi_ref_policy: MultiRefPolicy,
    pub paragraph_policy: ParagraphPolicy,
    pub clip_restriction: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            mode: RefMode::VideoRef,
            fine_aggregation: FineAggregation::Precision,
            multi_ref_policy: MultiRefPolicy::Max,
            paragraph_policy: ParagraphPolicy::MeanOfSentences,
            clip_restriction: false,
        }
    }
}

impl ScoreConfig {
    pub fn with_mode(mode: RefMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Invalid(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        Ok(())
    }
}
