//! Sentence, paragraph and pairwise scoring under the three reference modes.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::config::{FineAggregation, MultiRefPolicy, RefMode, ScoreConfig};
use super::similarity::{blend, coarse_score, fine_f_value_score, fine_precision_score};
use crate::embedstore::{project_rows, ProjectionWeights, Side};
use crate::error::{Error, Result};
use crate::matrix::{mean_rows, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub coarse: f64,
    pub fine: f64,
    pub blended: f64,
    pub mode: RefMode,
}

/// Pre-projection features of one caption sentence.
#[derive(Debug, Clone)]
pub struct TextFeatures {
    pub sentence: Vec<f64>,
    pub tokens: Matrix<f64>,
}

/// Pre-projection frame features of a video with optional clip frame ranges.
#[derive(Debug, Clone)]
pub struct VideoFeatures {
    pub frames: Matrix<f64>,
    pub clip_frames: Vec<(usize, usize)>,
}

impl VideoFeatures {
    pub fn new(frames: Matrix<f64>) -> Self {
        Self {
            frames,
            clip_frames: Vec::new(),
        }
    }
}

/// A human reference paragraph: one row per sentence embedding and the
/// pooled token embeddings of all its sentences.
#[derive(Debug, Clone)]
pub struct ReferenceText {
    pub sentences: Matrix<f64>,
    pub tokens: Matrix<f64>,
}

impl ReferenceText {
    pub fn from_sentences(parts: &[TextFeatures]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty("reference without sentences".into()));
        }
        let sentences = Matrix::from_rows(&parts.iter().map(|p| p.sentence.clone()).collect::<Vec<_>>())?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for p in parts {
            rows.extend(p.tokens.iter_rows().map(<[f64]>::to_vec));
        }
        let tokens = Matrix::from_rows(&rows)?;
        Ok(Self { sentences, tokens })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct References<'a> {
    pub video: Option<&'a VideoFeatures>,
    pub texts: &'a [ReferenceText],
}

/// Projected reference material, reusable across the sentences of a caption.
struct Prepared {
    frames: Option<Matrix<f64>>,
    clip_frames: Vec<(usize, usize)>,
    texts: Vec<(Vec<f64>, Matrix<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParagraphScore {
    pub sentences: Vec<ScoreBreakdown>,
    pub paragraph: f64,
    pub coarse: f64,
    pub fine: f64,
}

pub struct Scorer {
    config: ScoreConfig,
    weights: ProjectionWeights<f64>,
}

impl Scorer {
    pub fn new(config: ScoreConfig, weights: ProjectionWeights<f64>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, weights })
    }

    pub fn config(&self) -> &ScoreConfig {
        &self.config
    }

    fn prepare(&self, refs: &References<'_>) -> Result<Prepared> {
        let needs_video = matches!(self.config.mode, RefMode::VideoRef | RefMode::VideoTextRef);
        let needs_text = matches!(self.config.mode, RefMode::TextRef | RefMode::VideoTextRef);
        let frames = match (needs_video, refs.video) {
            (true, None) => {
                return Err(Error::MissingEmbeddings {
                    ids: vec![format!("video frames required by {}", self.config.mode)],
                })
            }
            (true, Some(v)) => Some(project_rows(&v.frames, &self.weights, Side::Vision)?),
            (false, _) => None,
        };
        if needs_text && refs.texts.is_empty() {
            return Err(Error::MissingEmbeddings {
                ids: vec![format!("reference captions required by {}", self.config.mode)],
            });
        }
        let texts = if needs_text {
            refs.texts
                .iter()
                .map(|r| {
                    let sents = project_rows(&r.sentences, &self.weights, Side::Text)?;
                    let pooled = mean_rows(&sents).ok_or_else(|| Error::Empty("reference sentences".into()))?;
                    Ok((pooled, project_rows(&r.tokens, &self.weights, Side::Text)?))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Prepared {
            frames,
            clip_frames: refs.video.map(|v| v.clip_frames.clone()).unwrap_or_default(),
            texts,
        })
    }

    fn fine(&self, slots: &Matrix<f64>, tokens: &Matrix<f64>) -> Result<f64> {
        match self.config.fine_aggregation {
            FineAggregation::Precision => fine_precision_score(slots, tokens),
            FineAggregation::FValue => fine_f_value_score(slots, tokens),
        }
    }

    fn breakdown(&self, coarse: f64, fine: f64, mode: RefMode) -> ScoreBreakdown {
        ScoreBreakdown {
            coarse,
            fine,
            blended: blend(self.config.alpha, coarse, fine),
            mode,
        }
    }

    fn against_video(&self, frames: &Matrix<f64>, sentence: &[f64], tokens: &Matrix<f64>) -> Result<ScoreBreakdown> {
        let coarse = coarse_score(frames, sentence)?;
        let fine = self.fine(frames, tokens)?;
        Ok(self.breakdown(coarse, fine, RefMode::VideoRef))
    }

    fn against_texts(&self, texts: &[(Vec<f64>, Matrix<f64>)], sentence: &[f64], tokens: &Matrix<f64>) -> Result<ScoreBreakdown> {
        let mut per_ref = Vec::with_capacity(texts.len());
        for (pooled, ref_tokens) in texts {
            let pooled_slot = Matrix::from_rows(&[pooled.as_slice()])?;
            let coarse = coarse_score(&pooled_slot, sentence)?;
            let fine = self.fine(ref_tokens, tokens)?;
            per_ref.push(self.breakdown(coarse, fine, RefMode::TextRef));
        }
        Ok(match self.config.multi_ref_policy {
            MultiRefPolicy::Max => per_ref
                .into_iter()
                .reduce(|best, b| if b.blended > best.blended { b } else { best })
                .expect("at least one reference"),
            MultiRefPolicy::Mean => {
                let n = per_ref.len() as f64;
                let coarse = per_ref.iter().map(|b| b.coarse).sum::<f64>() / n;
                let fine = per_ref.iter().map(|b| b.fine).sum::<f64>() / n;
                ScoreBreakdown {
                    coarse,
                    fine,
                    blended: per_ref.iter().map(|b| b.blended).sum::<f64>() / n,
                    mode: RefMode::TextRef,
                }
            }
        })
    }

    fn sentence_with(&self, prep: &Prepared, cand: &TextFeatures, clip: Option<usize>) -> Result<ScoreBreakdown> {
        let sentence = self.weights.text().mul_vec(&self.check_text(cand)?);
        let tokens = project_rows(&cand.tokens, &self.weights, Side::Text)?;
        let video = |frames: &Matrix<f64>| -> Result<ScoreBreakdown> {
            let range = clip
                .filter(|_| self.config.clip_restriction)
                .and_then(|c| prep.clip_frames.get(c))
                .map(|&(s, e)| s..e);
            match range {
                Some(Range { start, end }) => {
                    let idx: Vec<usize> = (start..end.min(frames.rows())).collect();
                    self.against_video(&frames.select_rows(&idx), &sentence, &tokens)
                }
                None => self.against_video(frames, &sentence, &tokens),
            }
        };
        match self.config.mode {
            RefMode::VideoRef => video(prep.frames.as_ref().expect("prepared")),
            RefMode::TextRef => self.against_texts(&prep.texts, &sentence, &tokens),
            RefMode::VideoTextRef => {
                let v = video(prep.frames.as_ref().expect("prepared"))?;
                let t = self.against_texts(&prep.texts, &sentence, &tokens)?;
                Ok(ScoreBreakdown {
                    coarse: (v.coarse + t.coarse) / 2.0,
                    fine: (v.fine + t.fine) / 2.0,
                    blended: (v.blended + t.blended) / 2.0,
                    mode: RefMode::VideoTextRef,
                })
            }
        }
    }

    fn check_text(&self, cand: &TextFeatures) -> Result<Vec<f64>> {
        if cand.sentence.len() != self.weights.d_text_in() {
            return Err(Error::Dimension {
                expected: self.weights.d_text_in(),
                found: cand.sentence.len(),
                context: "candidate sentence features".into(),
            });
        }
        Ok(cand.sentence.clone())
    }

    /// Score one sentence; `clip` is only used under clip restriction.
    pub fn score_sentence(&self, cand: &TextFeatures, refs: &References<'_>, clip: Option<usize>) -> Result<ScoreBreakdown> {
        let prep = self.prepare(refs)?;
        self.sentence_with(&prep, cand, clip)
    }

    /// Score every sentence and average them into the paragraph value.
    pub fn score_paragraph(
        &self,
        sentences: &[TextFeatures],
        clips: Option<&[usize]>,
        refs: &References<'_>,
    ) -> Result<ParagraphScore> {
        if sentences.is_empty() {
            return Err(Error::Empty("caption without sentences".into()));
        }
        let prep = self.prepare(refs)?;
        let scored = sentences
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let clip = clips.and_then(|c| c.get(i).copied());
                self.sentence_with(&prep, s, clip).map_err(|e| Error::Sentence {
                    index: i,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = scored.len() as f64;
        Ok(ParagraphScore {
            paragraph: scored.iter().map(|b| b.blended).sum::<f64>() / n,
            coarse: scored.iter().map(|b| b.coarse).sum::<f64>() / n,
            fine: scored.iter().map(|b| b.fine).sum::<f64>() / n,
            sentences: scored,
        })
    }
}

pub fn factvc_sentence(
    candidate: &TextFeatures,
    references: &References<'_>,
    config: &ScoreConfig,
    weights: &ProjectionWeights<f64>,
) -> Result<ScoreBreakdown> {
    Scorer::new(*config, weights.clone())?.score_sentence(candidate, references, None)
}

pub fn factvc_paragraph(
    sentences: &[TextFeatures],
    clips: Option<&[usize]>,
    references: &References<'_>,
    config: &ScoreConfig,
    weights: &ProjectionWeights<f64>,
) -> Result<ParagraphScore> {
    Scorer::new(*config, weights.clone())?.score_paragraph(sentences, clips, references)
}

/// Fraction of pairs whose correct member outscores the foil; ties count ½.
pub fn foil_accuracy<C>(pairs: &[(C, C)], mut score: impl FnMut(&C) -> Result<f64>) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Empty("no FOIL pairs".into()));
    }
    let mut wins = 0.0;
    for (correct, foil) in pairs {
        let (a, b) = (score(correct)?, score(foil)?);
        if a > b {
            wins += 1.0;
        } else if a == b {
            wins += 0.5;
        }
    }
    Ok(wins / pairs.len() as f64)
}

/// One line of a score report file.
///
/// Only `video_id`, `model_id` and `paragraph` are required, so scores of
/// other metrics computed elsewhere can be read as well; such lines default
/// to the text-reference mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub video_id: String,
    pub model_id: String,
    #[serde(default = "default_report_mode")]
    pub mode: RefMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub paragraph: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sentences: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine: Option<f64>,
}

fn default_report_mode() -> RefMode {
    RefMode::TextRef
}

impl ScoreReport {
    pub fn new(video_id: &str, model_id: &str, config: &ScoreConfig, score: &ParagraphScore) -> Self {
        Self {
            video_id: video_id.into(),
            model_id: model_id.into(),
            mode: config.mode,
            alpha: Some(config.alpha),
            paragraph: score.paragraph,
            sentences: score.sentences.iter().map(|s| s.blended).collect(),
            coarse: Some(score.coarse),
            fine: Some(score.fine),
        }
    }
}
