//! Annotator-facing instruction text and the paragraph score scale.

use std::path::Path;

use serde::{Deserialize, Serialize};

const BUILTIN: &str = include_str!("../data/protocol.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertLevel {
    pub value: u8,
    pub label: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol {
    pub instructions: Vec<String>,
    pub likert: Vec<LikertLevel>,
}

impl Protocol {
    pub fn builtin() -> Self {
        let p: Self = serde_json::from_str(BUILTIN).expect("bundled protocol parses");
        p.check().expect("bundled protocol is complete");
        p
    }

    pub fn load(path: &Path) -> factvc_core::Result<Self> {
        let p: Self = factvc_core::corpus::read_json(path)?;
        p.check().map_err(factvc_core::Error::Invalid)?;
        Ok(p)
    }

    /// The scale must define each value 1..=5 exactly once, in order.
    fn check(&self) -> Result<(), String> {
        let values: Vec<u8> = self.likert.iter().map(|l| l.value).collect();
        if values != [1, 2, 3, 4, 5] {
            return Err(format!("protocol scale must list values 1..=5 in order, got {values:?}"));
        }
        if self.instructions.is_empty() {
            return Err("protocol has no instructions".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scale() {
        let p = Protocol::builtin();
        assert_eq!(p.likert.len(), 5);
        assert!(p.likert.iter().all(|l| !l.description.is_empty()));
    }

    #[test]
    fn rejects_incomplete_scale() {
        let mut p = Protocol::builtin();
        p.likert.pop();
        assert!(p.check().is_err());
    }
}
