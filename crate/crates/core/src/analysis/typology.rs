//! Categorizing marked error spans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::table::text_table;
use crate::augment::{Lexicons, UNK};
use crate::corpus::{CaptionKey, Corpus, GoldAnnotation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Person,
    Action,
    Object,
    Adjective,
    PoorGeneration,
    Other,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 6] = [
        ErrorCategory::Person,
        ErrorCategory::Action,
        ErrorCategory::Object,
        ErrorCategory::Adjective,
        ErrorCategory::PoorGeneration,
        ErrorCategory::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorCategory::Person => "person",
            ErrorCategory::Action => "action",
            ErrorCategory::Object => "object",
            ErrorCategory::Adjective => "adjective",
            ErrorCategory::PoorGeneration => "poor_generation",
            ErrorCategory::Other => "other",
        }
    }
}

/// First matching rule wins: `UNK` or an immediately repeated token, then
/// person, color or numeral, action, object words.
pub fn classify_error_span<S: AsRef<str>>(tokens: &[S], lexicons: &Lexicons) -> ErrorCategory {
    let lower: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
    let repeated = lower.windows(2).any(|w| w[0] == w[1]);
    if repeated || tokens.iter().any(|t| t.as_ref() == UNK) {
        ErrorCategory::PoorGeneration
    } else if lower.iter().any(|t| lexicons.is_person(t)) {
        ErrorCategory::Person
    } else if lower.iter().any(|t| lexicons.is_color(t) || lexicons.is_numeral(t)) {
        ErrorCategory::Adjective
    } else if lower.iter().any(|t| lexicons.action_base(t).is_some()) {
        ErrorCategory::Action
    } else if lower.iter().any(|t| lexicons.object_base(t).is_some()) {
        ErrorCategory::Object
    } else {
        ErrorCategory::Other
    }
}

/// Maximal runs of consecutive gold-flagged word tokens, as token ranges.
pub fn gold_error_spans(gold: &GoldAnnotation, sentence: usize) -> Vec<(usize, usize)> {
    let flags = &gold.word_flags[sentence];
    let mask = &gold.word_mask[sentence];
    let mut spans = Vec::new();
    let mut start = None;
    for i in 0..=flags.len() {
        let bad = i < flags.len() && !flags[i] && mask[i];
        match (bad, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    spans
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypologyReport {
    pub counts: BTreeMap<ErrorCategory, usize>,
    pub total: usize,
}

impl TypologyReport {
    pub fn ratio(&self, c: ErrorCategory) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts.get(&c).copied().unwrap_or(0) as f64 / self.total as f64
        }
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<Vec<String>> = ErrorCategory::ALL
            .iter()
            .map(|&c| {
                vec![
                    c.name().to_string(),
                    self.counts.get(&c).copied().unwrap_or(0).to_string(),
                    format!("{:.1}%", 100.0 * self.ratio(c)),
                ]
            })
            .collect();
        text_table(&["category", "spans", "share"], &rows)
    }
}

/// Classify every gold error span of the corpus's aggregated annotations.
pub fn typology(corpus: &Corpus, lexicons: &Lexicons) -> Result<TypologyReport> {
    if corpus.gold.is_empty() {
        return Err(Error::NoGold);
    }
    let captions = corpus.caption_index();
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for (key, gold) in &corpus.gold {
        let caption = captions
            .get(key)
            .ok_or_else(|| Error::DanglingReference { missing: vec![CaptionKey::to_string(key)] })?;
        for (i, sentence) in caption.sentences.iter().enumerate().take(gold.word_flags.len()) {
            for (s, e) in gold_error_spans(gold, i) {
                *counts.entry(classify_error_span(&sentence.tokens[s..e], lexicons)).or_insert(0) += 1;
                total += 1;
            }
        }
    }
    Ok(TypologyReport { counts, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let l = Lexicons::builtin();
        assert_eq!(classify_error_span(&["woman"], &l), ErrorCategory::Person);
        assert_eq!(classify_error_span(&["UNK"], &l), ErrorCategory::PoorGeneration);
        assert_eq!(classify_error_span(&["in", "the", "air"], &l), ErrorCategory::Other);
        assert_eq!(classify_error_span(&["the", "the"], &l), ErrorCategory::PoorGeneration);
        assert_eq!(classify_error_span(&["red"], &l), ErrorCategory::Adjective);
        assert_eq!(classify_error_span(&["throwing"], &l), ErrorCategory::Action);
        assert_eq!(classify_error_span(&["cups"], &l), ErrorCategory::Object);
        assert_eq!(classify_error_span(&["two", "men"], &l), ErrorCategory::Person);
    }

    #[test]
    fn spans_from_flags() {
        let g = GoldAnnotation {
            paragraph_score: 3,
            sentence_labels: vec![false],
            word_flags: vec![vec![true, false, false, true, false, false]],
            word_mask: vec![vec![true, true, true, true, true, false]],
        };
        assert_eq!(gold_error_spans(&g, 0), [(1, 3), (4, 5)]);
    }
}
