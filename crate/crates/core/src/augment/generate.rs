//! Triple-dataset generation.
//!
//! For every human caption sentence `T` of video `V`, the positive set is
//! `T` itself plus every successful positive rewrite of it; each positive
//! is then paired with every successful negative corruption of it.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::lexicon::Lexicons;
use super::paraphrase::{paraphrase, Translator};
use super::simplify::simplify;
use super::tag::{Family, TransformTag};
use super::transforms::{
    action_swap, adjective_swap, object_swap, person_swap, poor_generation, ActionMode, PoorMode,
};
use crate::corpus::{detokenize, is_word, tokenize, Corpus, TripleRecord};
use crate::error::Result;

/// A text rewrite. `Ok(None)` means the transform does not apply.
pub trait Transform: Send + Sync {
    fn tag(&self) -> TransformTag;
    fn apply(&self, text: &str, seed: u64) -> Result<Option<String>>;
}

pub struct Paraphrase {
    pub translator: Arc<dyn Translator>,
    pub pivot: String,
}

impl Transform for Paraphrase {
    fn tag(&self) -> TransformTag {
        TransformTag::new(Family::Paraphrase, &self.pivot)
    }

    fn apply(&self, text: &str, _seed: u64) -> Result<Option<String>> {
        paraphrase(text, self.translator.as_ref(), &self.pivot)
    }
}

/// Simple clauses of a compound sentence, rejoined as one text. Applies only
/// when the sentence actually splits.
pub struct Simplify {
    pub lexicons: Arc<Lexicons>,
}

impl Transform for Simplify {
    fn tag(&self) -> TransformTag {
        TransformTag::bare(Family::Simplify)
    }

    fn apply(&self, text: &str, _seed: u64) -> Result<Option<String>> {
        let parts = simplify(&tokenize(text), &self.lexicons);
        if parts.len() < 2 {
            return Ok(None);
        }
        let last = parts.len() - 1;
        let sentences: Vec<String> = parts
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                if i < last && p.last().is_some_and(|t| is_word(t)) {
                    p.push(".".to_string());
                }
                detokenize(&p)
            })
            .collect();
        Ok(Some(sentences.join(" ")))
    }
}

/// One of the five rule-based corruption families.
pub struct Corruption {
    pub family: Family,
    pub lexicons: Arc<Lexicons>,
    pub action_mode: ActionMode,
    pub poor_mode: PoorMode,
}

impl Corruption {
    pub fn new(family: Family, lexicons: Arc<Lexicons>) -> Self {
        assert!(!family.is_positive(), "{family} is not a corruption");
        Self { family, lexicons, action_mode: ActionMode::Auto, poor_mode: PoorMode::Auto }
    }
}

impl Transform for Corruption {
    fn tag(&self) -> TransformTag {
        TransformTag::bare(self.family)
    }

    fn apply(&self, text: &str, seed: u64) -> Result<Option<String>> {
        let tokens = tokenize(text);
        let l = self.lexicons.as_ref();
        let out = match self.family {
            Family::PersonSwap => person_swap(&tokens, l),
            Family::ActionSwap => action_swap(&tokens, l, seed, self.action_mode),
            Family::ObjectSwap => object_swap(&tokens, l, seed),
            Family::AdjectiveSwap => adjective_swap(&tokens, l, seed),
            Family::PoorGeneration => poor_generation(&tokens, seed, self.poor_mode),
            Family::Paraphrase | Family::Simplify => None,
        };
        Ok(out.filter(|t| *t != tokens).map(|t| detokenize(&t)))
    }
}

/// Paraphrase through each pivot, then simplification.
pub fn standard_positives(
    translator: Arc<dyn Translator>,
    pivots: &[&str],
    lexicons: Arc<Lexicons>,
) -> Vec<Box<dyn Transform>> {
    let mut out: Vec<Box<dyn Transform>> = pivots
        .iter()
        .map(|p| Box::new(Paraphrase { translator: translator.clone(), pivot: p.to_string() }) as Box<dyn Transform>)
        .collect();
    out.push(Box::new(Simplify { lexicons }));
    out
}

/// The five corruption families.
pub fn standard_negatives(lexicons: Arc<Lexicons>) -> Vec<Box<dyn Transform>> {
    [
        Family::PersonSwap,
        Family::ActionSwap,
        Family::ObjectSwap,
        Family::AdjectiveSwap,
        Family::PoorGeneration,
    ]
    .into_iter()
    .map(|f| Box::new(Corruption::new(f, lexicons.clone())) as Box<dyn Transform>)
    .collect()
}

/// Stable 64-bit mix of a seed and a sequence of labels.
pub fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for part in parts {
        for b in part.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(PRIME);
        }
    }
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Triples for a single sentence.
pub fn triples_for_sentence(
    video_id: &str,
    clip_index: Option<usize>,
    text: &str,
    positives: &[Box<dyn Transform>],
    negatives: &[Box<dyn Transform>],
    seed: u64,
) -> Vec<TripleRecord> {
    let tokens = tokenize(text);
    let mut pool: Vec<(String, Vec<TransformTag>)> = vec![(text.to_string(), Vec::new())];
    for p in positives {
        let tag = p.tag();
        let s = derive_seed(seed, &[&tag.to_string()]);
        match p.apply(text, s) {
            Ok(Some(out)) if tokenize(&out) != tokens => pool.push((out, vec![tag])),
            Ok(_) => {}
            Err(e) => log::warn!("{tag} skipped for {video_id:?}: {e}"),
        }
    }
    let mut out = Vec::new();
    for (pi, (positive, lineage)) in pool.iter().enumerate() {
        let pos_tokens = tokenize(positive);
        for n in negatives {
            let tag = n.tag();
            let s = derive_seed(seed, &[&pi.to_string(), &tag.to_string()]);
            match n.apply(positive, s) {
                Ok(Some(neg)) if tokenize(&neg) != pos_tokens => out.push(TripleRecord {
                    video_id: video_id.to_string(),
                    clip_index,
                    positive: positive.clone(),
                    negative: neg,
                    positive_transforms: lineage.clone(),
                    negative_transform: tag,
                }),
                Ok(_) => {}
                Err(e) => log::warn!("{tag} skipped for {video_id:?}: {e}"),
            }
        }
    }
    out
}

/// Run generation over every sentence of every human caption, in corpus
/// order. Each sentence gets its own seed derived from `seed`, the caption
/// key and the sentence index.
pub fn generate_triples(
    corpus: &Corpus,
    positives: &[Box<dyn Transform>],
    negatives: &[Box<dyn Transform>],
    seed: u64,
) -> Vec<TripleRecord> {
    let mut out = Vec::new();
    for caption in corpus.human_captions() {
        for (j, sentence) in caption.sentences.iter().enumerate() {
            let s = derive_seed(seed, &[&caption.video_id, &caption.model_id, &j.to_string()]);
            out.extend(triples_for_sentence(
                &caption.video_id,
                caption.clip_of(j),
                &sentence.raw,
                positives,
                negatives,
                s,
            ));
        }
    }
    out
}

/// Number of held-out videos for `n` videos: 10%, rounded, leaving at least
/// one video for training.
pub fn validation_count(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    ((n as f64 * 0.1).round() as usize).min(n - 1)
}

/// Split triples by video: the last 10% of distinct video ids in sorted
/// order form the validation part.
pub fn split_by_video(triples: &[TripleRecord]) -> (Vec<TripleRecord>, Vec<TripleRecord>) {
    let ids: BTreeSet<&str> = triples.iter().map(|t| t.video_id.as_str()).collect();
    let n_val = validation_count(ids.len());
    let val_ids: BTreeSet<&str> = ids.iter().rev().take(n_val).copied().collect();
    triples.iter().cloned().partition(|t| !val_ids.contains(t.video_id.as_str()))
}
