//! A stand-in text encoder for synthetic experiments.
//!
//! Every content word maps to its own concept (inflected action and plural
//! object forms share their base word's concept). Function words and
//! punctuation share one concept that no video depicts, `UNK` has its own,
//! and tokens that immediately repeat the preceding phrase map to a
//! redundancy concept, mimicking how a contextual encoder reacts to
//! stuttering text.

use std::collections::BTreeMap;

use super::fvce::{EmbeddingKind, EmbeddingMatrix};
use super::synth::{ConceptId, ConceptSpace};
use crate::augment::{is_stopword, Lexicons, UNK};
use crate::corpus::{is_word, tokenize};
use crate::error::{Error, Result};

pub const FUNCTION_CONCEPT: ConceptId = 0;
pub const UNK_CONCEPT: ConceptId = 1;
pub const REDUNDANT_CONCEPT: ConceptId = 2;
const RESERVED: usize = 3;
const MAX_REPEAT: usize = 4;

#[derive(Debug, Clone)]
pub struct SynthTextEncoder {
    lexicons: Lexicons,
    vocab: BTreeMap<String, ConceptId>,
}

impl SynthTextEncoder {
    /// Assign concepts to every content word of `texts`, in sorted order.
    pub fn fit<S: AsRef<str>>(texts: &[S], lexicons: Lexicons) -> Self {
        let mut enc = Self { lexicons, vocab: BTreeMap::new() };
        let mut keys: Vec<String> = texts
            .iter()
            .flat_map(|t| tokenize(t.as_ref()))
            .filter_map(|tok| enc.key(&tok))
            .collect();
        keys.sort();
        keys.dedup();
        enc.vocab = keys.into_iter().enumerate().map(|(i, k)| (k, RESERVED + i)).collect();
        enc
    }

    fn key(&self, token: &str) -> Option<String> {
        if !is_word(token) || token.eq_ignore_ascii_case(UNK) || is_stopword(token) {
            return None;
        }
        let l = &self.lexicons;
        let lower = token.to_lowercase();
        if l.is_person(&lower) || l.is_color(&lower) || l.is_numeral(&lower) {
            return Some(lower);
        }
        Some(
            l.action_base(&lower)
                .or_else(|| l.object_base(&lower))
                .map_or(lower.clone(), str::to_string),
        )
    }

    pub fn n_concepts(&self) -> usize {
        RESERVED + self.vocab.len()
    }

    pub fn concept_of(&self, token: &str) -> Result<ConceptId> {
        if token.eq_ignore_ascii_case(UNK) {
            return Ok(UNK_CONCEPT);
        }
        match self.key(token) {
            None => Ok(FUNCTION_CONCEPT),
            Some(k) => self
                .vocab
                .get(&k)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("word {token:?} is outside the fitted vocabulary"))),
        }
    }

    /// One concept per token.
    pub fn token_concepts(&self, text: &str) -> Result<Vec<ConceptId>> {
        let tokens: Vec<String> = tokenize(text).iter().map(|t| t.to_lowercase()).collect();
        let mut out = tokens.iter().map(|t| self.concept_of(t)).collect::<Result<Vec<_>>>()?;
        for end in 1..tokens.len() {
            for len in 1..=MAX_REPEAT {
                if end + 1 >= 2 * len && tokens[end + 1 - len..=end] == tokens[end + 1 - 2 * len..=end - len] {
                    out[end + 1 - len..=end].fill(REDUNDANT_CONCEPT);
                }
            }
        }
        Ok(out)
    }

    /// Distinct content concepts in order of first appearance.
    pub fn content_concepts(&self, text: &str) -> Result<Vec<ConceptId>> {
        let mut out = Vec::new();
        for c in self.token_concepts(text)? {
            if c >= RESERVED && !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// Pre-projection sentence row (normalized sum of the token concepts)
    /// and token rows.
    pub fn encode(&self, space: &mut ConceptSpace, text: &str) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
        let concepts = self.token_concepts(text)?;
        if concepts.is_empty() {
            return Err(Error::Empty(format!("text {text:?} has no tokens")));
        }
        let sentence = space.embed_rows(EmbeddingKind::SentencePre, std::slice::from_ref(&concepts))?;
        let rows: Vec<Vec<ConceptId>> = concepts.into_iter().map(|c| vec![c]).collect();
        let tokens = space.embed_rows(EmbeddingKind::TokensPre, &rows)?;
        Ok((sentence, tokens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc() -> SynthTextEncoder {
        SynthTextEncoder::fit(&["A man is throwing two red darts", "The woman throws a dart"], Lexicons::builtin())
    }

    #[test]
    fn inflections_share_concepts() {
        let e = enc();
        assert_eq!(e.concept_of("throwing").unwrap(), e.concept_of("throws").unwrap());
        assert_eq!(e.concept_of("darts").unwrap(), e.concept_of("dart").unwrap());
        assert_ne!(e.concept_of("man").unwrap(), e.concept_of("woman").unwrap());
        assert_eq!(e.concept_of("the").unwrap(), FUNCTION_CONCEPT);
        assert!(e.concept_of("giraffe").is_err());
        assert_eq!(e.n_concepts(), 3 + 6);
    }

    #[test]
    fn repeated_phrase_is_redundant() {
        let e = enc();
        let c = e.token_concepts("The man throws a throws a dart").unwrap();
        assert_eq!(c[4..6], [REDUNDANT_CONCEPT, REDUNDANT_CONCEPT]);
        assert_ne!(c[2], REDUNDANT_CONCEPT);
        let c = e.token_concepts("A man throws . A man throws").unwrap();
        assert!(!c.contains(&REDUNDANT_CONCEPT));
    }

    #[test]
    fn content_concepts_skip_reserved() {
        let e = enc();
        let c = e.content_concepts("The man UNK a dart").unwrap();
        assert_eq!(c, [e.concept_of("man").unwrap(), e.concept_of("dart").unwrap()]);
    }
}
