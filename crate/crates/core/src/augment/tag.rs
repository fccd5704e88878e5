use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The seven transform families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Paraphrase,
    Simplify,
    PersonSwap,
    ActionSwap,
    ObjectSwap,
    AdjectiveSwap,
    PoorGeneration,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Paraphrase,
        Family::Simplify,
        Family::PersonSwap,
        Family::ActionSwap,
        Family::ObjectSwap,
        Family::AdjectiveSwap,
        Family::PoorGeneration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Paraphrase => "paraphrase",
            Family::Simplify => "simplify",
            Family::PersonSwap => "person_swap",
            Family::ActionSwap => "action_swap",
            Family::ObjectSwap => "object_swap",
            Family::AdjectiveSwap => "adjective_swap",
            Family::PoorGeneration => "poor_generation",
        }
    }

    /// True for meaning-preserving rewrites.
    pub fn is_positive(self) -> bool {
        matches!(self, Family::Paraphrase | Family::Simplify)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown transform family {s:?}")))
    }
}

/// Which transform produced a text, e.g. `person_swap` or `paraphrase:de`.
///
/// Serialized as a string: the family name, followed by `:detail` when the
/// detail is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransformTag {
    pub family: Family,
    pub detail: String,
}

impl TransformTag {
    pub fn new(family: Family, detail: impl Into<String>) -> Self {
        Self { family, detail: detail.into() }
    }

    pub fn bare(family: Family) -> Self {
        Self::new(family, "")
    }
}

impl fmt::Display for TransformTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.detail.is_empty() {
            write!(f, "{}", self.family)
        } else {
            write!(f, "{}:{}", self.family, self.detail)
        }
    }
}

impl FromStr for TransformTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (family, detail) = s.split_once(':').unwrap_or((s, ""));
        Ok(Self::new(family.parse()?, detail))
    }
}

impl Serialize for TransformTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransformTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
