//! Record types for videos, captions, annotations and training triples.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tokenize::{is_word, tokenize};
use crate::augment::TransformTag;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRef {
    pub video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Clip spans in seconds, `(start, end)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clips: Vec<(f64, f64)>,
    /// Number of rows in the video's stored frame matrix.
    #[serde(default)]
    pub frame_count: usize,
    /// Half-open frame-row range for each clip, parallel to `clips`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clip_frames: Vec<(usize, usize)>,
    /// Static URL the annotation UI plays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

impl VideoRef {
    pub fn new(video_id: impl Into<String>, frame_count: usize) -> Self {
        Self {
            video_id: video_id.into(),
            duration_s: None,
            clips: Vec::new(),
            frame_count,
            clip_frames: Vec::new(),
            url: None,
        }
    }

    /// Frame rows belonging to a clip, falling back to the whole video.
    pub fn frame_range(&self, clip: Option<usize>) -> std::ops::Range<usize> {
        match clip.and_then(|c| self.clip_frames.get(c)) {
            Some(&(s, e)) => s..e,
            None => 0..self.frame_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceText {
    pub raw: String,
    pub tokens: Vec<String>,
}

impl SentenceText {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Self { raw, tokens }
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| is_word(t)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CaptionKey {
    pub video_id: String,
    pub model_id: String,
}

impl CaptionKey {
    pub fn new(video_id: impl Into<String>, model_id: impl Into<String>) -> Self {
        Self {
            video_id: video_id.into(),
            model_id: model_id.into(),
        }
    }
}

impl fmt::Display for CaptionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.video_id, self.model_id)
    }
}

/// A multi-sentence caption of one video by one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "CaptionWire", into = "CaptionWire")]
pub struct CaptionDoc {
    pub video_id: String,
    pub model_id: String,
    pub sentences: Vec<SentenceText>,
    /// Clip index of each sentence, when known.
    pub clip_indices: Option<Vec<usize>>,
}

impl CaptionDoc {
    pub fn new<S: AsRef<str>>(
        video_id: impl Into<String>,
        model_id: impl Into<String>,
        sentences: &[S],
    ) -> Self {
        Self {
            video_id: video_id.into(),
            model_id: model_id.into(),
            sentences: sentences.iter().map(|s| SentenceText::new(s.as_ref())).collect(),
            clip_indices: None,
        }
    }

    pub fn key(&self) -> CaptionKey {
        CaptionKey::new(&self.video_id, &self.model_id)
    }

    pub fn is_human(&self) -> bool {
        self.model_id.starts_with("human")
    }

    pub fn clip_of(&self, sentence: usize) -> Option<usize> {
        self.clip_indices.as_ref().and_then(|c| c.get(sentence).copied())
    }
}

#[derive(Serialize, Deserialize)]
struct CaptionWire {
    video_id: String,
    model_id: String,
    sentences: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clips: Option<Vec<usize>>,
}

impl From<CaptionWire> for CaptionDoc {
    fn from(w: CaptionWire) -> Self {
        let mut doc = CaptionDoc::new(w.video_id, w.model_id, &w.sentences);
        doc.clip_indices = w.clips;
        doc
    }
}

impl From<CaptionDoc> for CaptionWire {
    fn from(d: CaptionDoc) -> Self {
        CaptionWire {
            video_id: d.video_id,
            model_id: d.model_id,
            sentences: d.sentences.into_iter().map(|s| s.raw).collect(),
            clips: d.clip_indices,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceLabel {
    pub factual: bool,
    /// Half-open token ranges marked as erroneous.
    #[serde(default)]
    pub error_spans: Vec<(usize, usize)>,
}

impl SentenceLabel {
    pub fn factual() -> Self {
        Self {
            factual: true,
            error_spans: Vec::new(),
        }
    }

    pub fn with_spans(spans: &[(usize, usize)]) -> Self {
        Self {
            factual: false,
            error_spans: spans.to_vec(),
        }
    }

    pub fn token_in_error(&self, token: usize) -> bool {
        self.error_spans.iter().any(|&(s, e)| token >= s && token < e)
    }
}

/// One annotator's judgment of one caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub annotator_id: String,
    pub video_id: String,
    pub model_id: String,
    pub paragraph_score: u8,
    #[serde(rename = "sentences")]
    pub sentence_labels: Vec<SentenceLabel>,
}

impl AnnotationRecord {
    pub fn key(&self) -> CaptionKey {
        CaptionKey::new(&self.video_id, &self.model_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Check an annotation against the caption it judges.
pub fn validate_annotation(
    rec: &AnnotationRecord,
    caption: &CaptionDoc,
) -> Result<(), Vec<FieldError>> {
    let mut errs = Vec::new();
    if rec.annotator_id.is_empty() {
        errs.push(FieldError::new("annotator_id", "must be non-empty"));
    }
    if !(1..=5).contains(&rec.paragraph_score) {
        errs.push(FieldError::new(
            "paragraph_score",
            format!("{} outside 1..=5", rec.paragraph_score),
        ));
    }
    if rec.sentence_labels.len() != caption.sentences.len() {
        errs.push(FieldError::new(
            "sentences",
            format!(
                "{} labels for a {}-sentence caption",
                rec.sentence_labels.len(),
                caption.sentences.len()
            ),
        ));
    }
    for (i, (label, sent)) in rec
        .sentence_labels
        .iter()
        .zip(&caption.sentences)
        .enumerate()
    {
        let n = sent.tokens.len();
        if label.factual && !label.error_spans.is_empty() {
            errs.push(FieldError::new(
                format!("sentences[{i}].error_spans"),
                "factual sentence cannot carry error spans",
            ));
        }
        if !label.factual && label.error_spans.is_empty() {
            errs.push(FieldError::new(
                format!("sentences[{i}].error_spans"),
                "non-factual sentence needs at least one error span",
            ));
        }
        let mut spans = label.error_spans.clone();
        spans.sort_unstable();
        for (j, &(s, e)) in spans.iter().enumerate() {
            if s >= e || e > n {
                errs.push(FieldError::new(
                    format!("sentences[{i}].error_spans"),
                    format!("span [{s},{e}) invalid for {n} tokens"),
                ));
            }
            if j > 0 && spans[j - 1].1 > s {
                errs.push(FieldError::new(
                    format!("sentences[{i}].error_spans"),
                    format!("span [{s},{e}) overlaps [{},{})", spans[j - 1].0, spans[j - 1].1),
                ));
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Consensus annotation of one caption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub paragraph_score: u8,
    /// `true` = factual.
    pub sentence_labels: Vec<bool>,
    /// Per sentence, per token; `true` = factual.
    pub word_flags: Vec<Vec<bool>>,
    /// Which tokens count as words (punctuation tokens do not).
    pub word_mask: Vec<Vec<bool>>,
}

impl GoldAnnotation {
    pub fn sentence_count(&self) -> usize {
        self.sentence_labels.len()
    }

    pub fn factual_sentences(&self) -> usize {
        self.sentence_labels.iter().filter(|&&f| f).count()
    }

    pub fn word_count(&self) -> usize {
        self.word_mask.iter().flatten().filter(|&&w| w).count()
    }

    pub fn factual_words(&self) -> usize {
        self.word_flags
            .iter()
            .flatten()
            .zip(self.word_mask.iter().flatten())
            .filter(|&(&f, &w)| f && w)
            .count()
    }

    pub fn sentence_ratio(&self) -> f64 {
        ratio(self.factual_sentences(), self.sentence_count())
    }

    pub fn word_ratio(&self) -> f64 {
        ratio(self.factual_words(), self.word_count())
    }

    pub fn has_errors(&self) -> bool {
        self.paragraph_score < 5
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// One weak-supervision sample `(V, T⁺, T⁻)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub video_id: String,
    #[serde(default)]
    pub clip_index: Option<usize>,
    pub positive: String,
    pub negative: String,
    #[serde(default)]
    pub positive_transforms: Vec<TransformTag>,
    pub negative_transform: TransformTag,
}

/// Videos, captions, raw annotations, triples and (once aggregated) gold labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub videos: Vec<VideoRef>,
    pub captions: Vec<CaptionDoc>,
    pub annotations: Vec<AnnotationRecord>,
    pub triples: Vec<TripleRecord>,
    pub gold: BTreeMap<CaptionKey, GoldAnnotation>,
}

impl Corpus {
    pub fn video(&self, id: &str) -> Option<&VideoRef> {
        self.videos.iter().find(|v| v.video_id == id)
    }

    pub fn caption(&self, key: &CaptionKey) -> Option<&CaptionDoc> {
        self.captions
            .iter()
            .find(|c| c.video_id == key.video_id && c.model_id == key.model_id)
    }

    pub fn caption_index(&self) -> BTreeMap<CaptionKey, &CaptionDoc> {
        self.captions.iter().map(|c| (c.key(), c)).collect()
    }

    /// Raw annotations grouped by caption, in file order.
    pub fn annotations_by_caption(&self) -> BTreeMap<CaptionKey, Vec<&AnnotationRecord>> {
        let mut out: BTreeMap<CaptionKey, Vec<&AnnotationRecord>> = BTreeMap::new();
        for a in &self.annotations {
            out.entry(a.key()).or_default().push(a);
        }
        out
    }

    pub fn human_captions(&self) -> impl Iterator<Item = &CaptionDoc> {
        self.captions.iter().filter(|c| c.is_human())
    }
}
