//! Inter-annotator agreement.

use serde::{Deserialize, Serialize};

use super::table::{fmt3, text_table};
use crate::corpus::{is_word, Corpus};
use crate::error::{Error, Result};

/// Krippendorff's alpha with the interval metric `δ² = (v − v')²`.
///
/// `units` holds the values assigned to each item (missing judgments simply
/// omitted). Items with fewer than two values carry no pairing information
/// and are skipped. Built from the coincidence matrix over the distinct
/// values: `α = 1 − D_o / D_e`. When every value is identical there is no
/// expected disagreement and the result is 1.
pub fn krippendorff_alpha_interval(units: &[Vec<f64>]) -> Result<f64> {
    let mut values: Vec<f64> = units.iter().filter(|u| u.len() >= 2).flatten().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite rating".into()));
    }
    if values.len() < 2 {
        return Err(Error::Empty("fewer than two pairable ratings".into()));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    let k = values.len();
    let index = |v: f64| values.binary_search_by(|x| x.total_cmp(&v)).expect("value collected above");
    let mut coincidence = vec![0.0f64; k * k];
    for unit in units.iter().filter(|u| u.len() >= 2) {
        let w = 1.0 / (unit.len() - 1) as f64;
        for (a, &va) in unit.iter().enumerate() {
            for (b, &vb) in unit.iter().enumerate() {
                if a != b {
                    coincidence[index(va) * k + index(vb)] += w;
                }
            }
        }
    }
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c * k..(c + 1) * k].iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..k {
        for j in 0..k {
            let delta = (values[c] - values[j]).powi(2);
            d_o += coincidence[c * k + j] * delta;
            d_e += marginals[c] * marginals[j] * delta;
        }
    }
    d_o /= n;
    d_e /= n * (n - 1.0);
    if d_e == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - d_o / d_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub alpha_paragraph: f64,
    pub alpha_sentence: f64,
    pub alpha_word: f64,
    pub paragraph_units: usize,
    pub sentence_units: usize,
    pub word_units: usize,
}

impl AgreementReport {
    pub fn to_table(&self) -> String {
        let row = |level: &str, a: f64, n: usize| vec![level.to_string(), fmt3(a), n.to_string()];
        text_table(
            &["level", "alpha", "units"],
            &[
                row("paragraph", self.alpha_paragraph, self.paragraph_units),
                row("sentence", self.alpha_sentence, self.sentence_units),
                row("word", self.alpha_word, self.word_units),
            ],
        )
    }
}

/// Agreement over the raw annotations of a corpus. Paragraph units are
/// captions rated 1–5; sentence units are sentences rated factual (1) or
/// not (0); word units are word tokens rated in-error (0) or not (1).
pub fn agreement(corpus: &Corpus) -> Result<AgreementReport> {
    let captions = corpus.caption_index();
    let mut paragraph = Vec::new();
    let mut sentence = Vec::new();
    let mut word = Vec::new();
    let mut missing = Vec::new();
    for (key, records) in corpus.annotations_by_caption() {
        let Some(caption) = captions.get(&key) else {
            missing.push(key.to_string());
            continue;
        };
        paragraph.push(records.iter().map(|r| f64::from(r.paragraph_score)).collect());
        for (i, s) in caption.sentences.iter().enumerate() {
            let labels: Vec<_> = records.iter().filter_map(|r| r.sentence_labels.get(i)).collect();
            sentence.push(labels.iter().map(|l| if l.factual { 1.0 } else { 0.0 }).collect());
            for (t, tok) in s.tokens.iter().enumerate() {
                if is_word(tok) {
                    word.push(labels.iter().map(|l| if l.token_in_error(t) { 0.0 } else { 1.0 }).collect());
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::DanglingReference { missing });
    }
    let units = |u: &[Vec<f64>]| u.iter().filter(|v| v.len() >= 2).count();
    Ok(AgreementReport {
        alpha_paragraph: krippendorff_alpha_interval(&paragraph)?,
        alpha_sentence: krippendorff_alpha_interval(&sentence)?,
        alpha_word: krippendorff_alpha_interval(&word)?,
        paragraph_units: units(&paragraph),
        sentence_units: units(&sentence),
        word_units: units(&word),
    })
}
