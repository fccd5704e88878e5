//! Consensus labels from an annotator panel.

use std::collections::BTreeMap;

use crate::corpus::{is_word, AnnotationRecord, CaptionDoc, CaptionKey, Corpus, GoldAnnotation};
use crate::error::{Error, Result};

/// The value held by more than half the panel, otherwise the lower median.
pub fn aggregate_paragraph(scores: &[u8]) -> Result<u8> {
    if scores.is_empty() {
        return Err(Error::Empty("no paragraph scores".into()));
    }
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &s in scores {
        *counts.entry(s).or_default() += 1;
    }
    if let Some((&v, _)) = counts.iter().find(|(_, &c)| 2 * c > scores.len()) {
        return Ok(v);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable();
    Ok(sorted[(sorted.len() - 1) / 2])
}

/// Majority of boolean votes; an even split is an error.
pub fn majority(votes: &[bool], what: impl FnOnce() -> String) -> Result<bool> {
    let yes = votes.iter().filter(|&&v| v).count();
    let no = votes.len() - yes;
    if yes == no {
        return Err(Error::TiedVote(format!("{} ({yes} to {no})", what())));
    }
    Ok(yes > no)
}

/// Combine every annotator's record of one caption.
pub fn aggregate(records: &[&AnnotationRecord], caption: &CaptionDoc) -> Result<GoldAnnotation> {
    let key = caption.key();
    if records.is_empty() {
        return Err(Error::Empty(format!("no annotations for {key}")));
    }
    for r in records {
        if r.key() != key {
            return Err(Error::Invalid(format!("annotation for {} mixed into {key}", r.key())));
        }
        if r.sentence_labels.len() != caption.sentences.len() {
            return Err(Error::Shape(format!(
                "annotation by {} has {} sentence labels for the {}-sentence caption {key}",
                r.annotator_id,
                r.sentence_labels.len(),
                caption.sentences.len()
            )));
        }
    }
    let scores: Vec<u8> = records.iter().map(|r| r.paragraph_score).collect();
    let paragraph_score = aggregate_paragraph(&scores)?;
    let mut sentence_labels = Vec::with_capacity(caption.sentences.len());
    let mut word_flags = Vec::with_capacity(caption.sentences.len());
    let mut word_mask = Vec::with_capacity(caption.sentences.len());
    for (i, sentence) in caption.sentences.iter().enumerate() {
        let votes: Vec<bool> = records.iter().map(|r| r.sentence_labels[i].factual).collect();
        sentence_labels.push(majority(&votes, || format!("{key} sentence {i}"))?);
        let mut flags = Vec::with_capacity(sentence.tokens.len());
        for t in 0..sentence.tokens.len() {
            let votes: Vec<bool> = records.iter().map(|r| !r.sentence_labels[i].token_in_error(t)).collect();
            flags.push(majority(&votes, || format!("{key} sentence {i} token {t}"))?);
        }
        word_flags.push(flags);
        word_mask.push(sentence.tokens.iter().map(|t| is_word(t)).collect());
    }
    Ok(GoldAnnotation { paragraph_score, sentence_labels, word_flags, word_mask })
}

/// Gold labels for every annotated caption of the corpus.
pub fn aggregate_corpus(corpus: &Corpus) -> Result<BTreeMap<CaptionKey, GoldAnnotation>> {
    let captions = corpus.caption_index();
    let mut out = BTreeMap::new();
    let mut missing = Vec::new();
    for (key, records) in corpus.annotations_by_caption() {
        match captions.get(&key) {
            Some(c) => {
                out.insert(key, aggregate(&records, c)?);
            }
            None => missing.push(key.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::DanglingReference { missing });
    }
    Ok(out)
}
