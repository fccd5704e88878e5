use serde::{Deserialize, Serialize};

use super::model::Corpus;
use crate::error::{Error, Result};

/// Size and error-rate summary over the gold-annotated captions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub paragraph_count: usize,
    pub sentence_count: usize,
    pub word_count: usize,
    pub paragraphs_with_errors: usize,
    pub sentences_with_errors: usize,
    pub words_with_errors: usize,
    pub pct_paragraphs_with_errors: f64,
    pub pct_sentences_with_errors: f64,
    pub pct_words_with_errors: f64,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// A paragraph has errors when its gold score is below 5.
pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.gold.is_empty() {
        return Err(Error::NoGold);
    }
    let (mut paras, mut sents, mut words) = (0, 0, 0);
    let (mut bad_paras, mut bad_sents, mut bad_words) = (0, 0, 0);
    for gold in corpus.gold.values() {
        paras += 1;
        bad_paras += usize::from(gold.has_errors());
        sents += gold.sentence_count();
        bad_sents += gold.sentence_count() - gold.factual_sentences();
        words += gold.word_count();
        bad_words += gold.word_count() - gold.factual_words();
    }
    Ok(CorpusStats {
        paragraph_count: paras,
        sentence_count: sents,
        word_count: words,
        paragraphs_with_errors: bad_paras,
        sentences_with_errors: bad_sents,
        words_with_errors: bad_words,
        pct_paragraphs_with_errors: pct(bad_paras, paras),
        pct_sentences_with_errors: pct(bad_sents, sents),
        pct_words_with_errors: pct(bad_words, words),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CaptionKey, GoldAnnotation};

    fn gold(score: u8, sentences: Vec<bool>, words: Vec<Vec<bool>>) -> GoldAnnotation {
        let mask = words.iter().map(|s| vec![true; s.len()]).collect();
        GoldAnnotation {
            paragraph_score: score,
            sentence_labels: sentences,
            word_flags: words,
            word_mask: mask,
        }
    }

    #[test]
    fn requires_gold() {
        assert!(matches!(corpus_stats(&Corpus::default()), Err(Error::NoGold)));
    }

    #[test]
    fn half_the_paragraphs_have_errors() {
        let mut c = Corpus::default();
        c.gold.insert(
            CaptionKey::new("v1", "a"),
            gold(5, vec![true], vec![vec![true; 4]]),
        );
        c.gold.insert(
            CaptionKey::new("v1", "b"),
            gold(
                2,
                vec![false, true],
                vec![vec![true, false, false], vec![true, true, false]],
            ),
        );
        let s = corpus_stats(&c).unwrap();
        assert_eq!(s.paragraph_count, 2);
        assert_eq!(s.pct_paragraphs_with_errors, 50.0);
        assert_eq!(s.word_count, 10);
        assert_eq!(s.words_with_errors, 3);
        assert_eq!(s.pct_words_with_errors, 30.0);
        assert!((s.pct_sentences_with_errors - 100.0 / 3.0).abs() < 1e-12);
    }
}
