//! Resolving triples to features and the training loop.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::LossConfig;
use super::loss::{batch_similarities, gradients, loss_total, TripleBatch};
use super::optim::Adam;
use crate::corpus::{TripleRecord, VideoRef};
use crate::embedstore::{write_checkpoint, EmbeddingKind, EmbeddingStore, ProjectionWeights};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `k` frame indices spread uniformly over `n` frames: the centre of each of
/// `k` equal segments. Fewer than `k` frames are all used, padding with the
/// last one.
pub fn sample_frame_indices(n: usize, k: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    if n < k {
        return (0..k).map(|j| j.min(n - 1)).collect();
    }
    (0..k).map(|j| ((2 * j + 1) * n) / (2 * k)).collect()
}

/// One triple's pre-projection features.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub video_id: String,
    pub frames: Matrix<T>,
    pub positive: Vec<T>,
    pub negative: Vec<T>,
}

/// Load features for `triples` from `store`: sampled clip frames from each
/// video's frame file and the triple-ordered positive/negative sentence
/// rows. `videos` supplies clip frame ranges; without it the whole video
/// is sampled.
pub fn resolve_triples<T: Scalar>(
    triples: &[TripleRecord],
    store: &EmbeddingStore,
    videos: Option<&[VideoRef]>,
    frames_per_clip: usize,
) -> Result<Vec<Sample<T>>> {
    let ids: BTreeSet<&str> = triples.iter().map(|t| t.video_id.as_str()).collect();
    let missing: Vec<String> = ids.iter().filter(|v| !store.has_frames(v)).map(|v| v.to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingEmbeddings { ids: missing });
    }
    let pos = crate::embedstore::read_fvce(&store.triples_path(true))?;
    let neg = crate::embedstore::read_fvce(&store.triples_path(false))?;
    for (m, name) in [(&pos, "positive"), (&neg, "negative")] {
        if m.kind() != EmbeddingKind::SentencePre {
            return Err(Error::Invalid(format!("{name} triple features are {:?}, expected pre-projection sentences", m.kind())));
        }
        if m.count() != triples.len() {
            return Err(Error::Shape(format!(
                "{} {name} triple rows for {} triples",
                m.count(),
                triples.len()
            )));
        }
    }
    let refs: BTreeMap<&str, &VideoRef> = videos.unwrap_or(&[]).iter().map(|v| (v.video_id.as_str(), v)).collect();
    let mut frames = BTreeMap::new();
    for id in &ids {
        frames.insert(*id, store.frames(id)?.to_matrix::<T>());
    }
    triples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let all = &frames[t.video_id.as_str()];
            let range = match refs.get(t.video_id.as_str()) {
                Some(v) => v.frame_range(t.clip_index),
                None => 0..all.rows(),
            };
            if range.end > all.rows() || range.is_empty() {
                return Err(Error::Shape(format!(
                    "triple {i}: frame range {range:?} outside the {} stored frames of {}",
                    all.rows(),
                    t.video_id
                )));
            }
            let idx: Vec<usize> = sample_frame_indices(range.len(), frames_per_clip)
                .into_iter()
                .map(|k| range.start + k)
                .collect();
            Ok(Sample {
                video_id: t.video_id.clone(),
                frames: all.select_rows(&idx),
                positive: pos.row(i).iter().map(|&x| T::lit(f64::from(x))).collect(),
                negative: neg.row(i).iter().map(|&x| T::lit(f64::from(x))).collect(),
            })
        })
        .collect()
}

/// Partition resolved samples with the same rule as
/// [`crate::augment::split_by_video`].
pub fn split_samples<T>(samples: Vec<Sample<T>>) -> (Vec<Sample<T>>, Vec<Sample<T>>) {
    let ids: BTreeSet<String> = samples.iter().map(|s| s.video_id.clone()).collect();
    let n_val = crate::augment::validation_count(ids.len());
    let val_ids: BTreeSet<&String> = ids.iter().rev().take(n_val).collect();
    samples.into_iter().partition(|s| !val_ids.contains(&s.video_id))
}

pub fn make_batch<T: Scalar>(samples: &[&Sample<T>]) -> Result<TripleBatch<T>> {
    let pos: Vec<&[T]> = samples.iter().map(|s| s.positive.as_slice()).collect();
    let neg: Vec<&[T]> = samples.iter().map(|s| s.negative.as_slice()).collect();
    TripleBatch::new(
        samples.iter().map(|s| s.frames.clone()).collect(),
        Matrix::from_rows(&pos)?,
        Matrix::from_rows(&neg)?,
    )
}

/// Loss and separation over a held-out set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Total loss per sample, over consecutive batches (a trailing batch of
    /// one is left out).
    pub loss: f64,
    /// Fraction of triples with `s⁺ > s⁻`.
    pub accuracy: f64,
    /// Mean `s⁺ − s⁻`.
    pub gap: f64,
}

pub fn evaluate<T: Scalar>(samples: &[Sample<T>], weights: &ProjectionWeights<T>, config: &LossConfig) -> Result<Option<Evaluation>> {
    if samples.len() < 2 {
        return Ok(None);
    }
    let mut loss_sum = 0.0;
    let mut loss_n = 0usize;
    let mut correct = 0usize;
    let mut gap = 0.0;
    for chunk in samples.chunks(config.batch_size) {
        if chunk.len() < 2 {
            continue;
        }
        let refs: Vec<&Sample<T>> = chunk.iter().collect();
        let batch = make_batch(&refs)?;
        let s = batch_similarities(&batch, weights)?;
        let l = loss_total(&batch, weights, config)?;
        loss_sum += l.total.as_f64();
        loss_n += chunk.len();
        for (i, d) in s.diagonal().into_iter().enumerate() {
            let diff = d.as_f64() - s.negative[i].as_f64();
            gap += diff;
            correct += usize::from(diff > 0.0);
        }
    }
    Ok(Some(Evaluation {
        loss: loss_sum / loss_n as f64,
        accuracy: correct as f64 / loss_n as f64,
        gap: gap / loss_n as f64,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    /// 0 is the untrained initialization.
    pub epoch: usize,
    pub steps: usize,
    pub train_loss: Option<f64>,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
    pub val_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub weights: ProjectionWeights<T>,
    pub epochs: Vec<EpochMetrics>,
}

fn metrics<T: Scalar>(
    epoch: usize,
    steps: usize,
    train: &[Sample<T>],
    val: &[Sample<T>],
    weights: &ProjectionWeights<T>,
    config: &LossConfig,
) -> Result<EpochMetrics> {
    let t = evaluate(train, weights, config)?;
    let v = evaluate(val, weights, config)?;
    Ok(EpochMetrics {
        epoch,
        steps,
        train_loss: t.map(|e| e.loss),
        val_loss: v.map(|e| e.loss),
        val_accuracy: v.map(|e| e.accuracy),
        val_gap: v.map(|e| e.gap),
    })
}

/// Finetune `init` on `train` with Adam, reshuffling every epoch from
/// `config.seed`. `on_epoch` sees the metrics of the initialization and of
/// every finished epoch.
pub fn train<T: Scalar>(
    train: &[Sample<T>],
    val: &[Sample<T>],
    init: ProjectionWeights<T>,
    config: &LossConfig,
    mut on_epoch: impl FnMut(&EpochMetrics) -> Result<()>,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    if train.len() < 2 {
        return Err(Error::Empty(format!("training needs at least 2 triples, got {}", train.len())));
    }
    let mut weights = init;
    let mut adam = Adam::new(T::lit(config.learning_rate), &weights);
    let mut epochs = Vec::with_capacity(config.epochs + 1);
    let m0 = metrics(0, 0, train, val, &weights, config)?;
    on_epoch(&m0)?;
    epochs.push(m0);
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(epoch as u64));
        order.shuffle(&mut rng);
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            if chunk.len() < 2 {
                continue;
            }
            let refs: Vec<&Sample<T>> = chunk.iter().map(|&i| &train[i]).collect();
            let batch = make_batch(&refs)?;
            let (loss, grads) = gradients(&batch, &weights, config)?;
            if !loss.total.is_finite() || !grads.vision().is_finite() || !grads.text().is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: b,
                    detail: format!("coarse {}, fine {}", loss.coarse, loss.fine),
                });
            }
            adam.step(&mut weights, &grads);
        }
        let m = metrics(epoch, adam.steps() as usize, train, val, &weights, config)?;
        log::info!(
            "epoch {epoch}: train loss {:?}, val loss {:?}, val accuracy {:?}",
            m.train_loss,
            m.val_loss,
            m.val_accuracy
        );
        on_epoch(&m)?;
        epochs.push(m);
    }
    Ok(TrainOutcome { weights, epochs })
}

/// Sidecar written next to a trained checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub config: LossConfig,
    pub train_triples: usize,
    pub val_triples: usize,
    pub epochs: Vec<EpochMetrics>,
}

/// Write the final weights as an `f32` checkpoint plus its metadata.
pub fn save_trained<T: Scalar>(outcome: &TrainOutcome<T>, meta: &TrainingMeta, path: &Path) -> Result<()> {
    write_checkpoint(&outcome.weights.cast::<f32>(), path, Some(meta))
}
