//! Similarities, losses and their analytic gradients for one batch.

use crate::embedstore::ProjectionWeights;
use crate::error::{Error, Result};
use crate::matrix::{dot, mean_rows, norm, Matrix};
use crate::scalar::Scalar;

use super::config::{CeForm, LossConfig};

/// Pre-projection features of `B` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleBatch<T> {
    /// Per sample, the sampled frame rows (`k × d_vision`).
    pub frames: Vec<Matrix<T>>,
    /// `B × d_text` positive sentence features.
    pub positives: Matrix<T>,
    /// `B × d_text` negative sentence features.
    pub negatives: Matrix<T>,
}

impl<T: Scalar> TripleBatch<T> {
    pub fn new(frames: Vec<Matrix<T>>, positives: Matrix<T>, negatives: Matrix<T>) -> Result<Self> {
        let b = frames.len();
        if b < 2 {
            return Err(Error::Shape(format!("batch needs at least 2 samples, got {b}")));
        }
        if positives.rows() != b || negatives.rows() != b {
            return Err(Error::Shape(format!(
                "batch of {b} frame sets has {} positives and {} negatives",
                positives.rows(),
                negatives.rows()
            )));
        }
        if positives.cols() != negatives.cols() {
            return Err(Error::Dimension {
                expected: positives.cols(),
                found: negatives.cols(),
                context: "negative text features".into(),
            });
        }
        let dv = frames[0].cols();
        for (i, f) in frames.iter().enumerate() {
            if f.rows() == 0 {
                return Err(Error::Shape(format!("sample {i} has no frames")));
            }
            if f.cols() != dv {
                return Err(Error::Dimension { expected: dv, found: f.cols(), context: format!("frames of sample {i}") });
            }
        }
        Ok(Self { frames, positives, negatives })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Mean pre-projection frame of each sample. Projection is linear, so
    /// projecting this equals pooling the projected frames.
    pub fn pooled_frames(&self) -> Matrix<T> {
        let rows: Vec<Vec<T>> = self.frames.iter().map(|f| mean_rows(f).expect("non-empty")).collect();
        Matrix::from_rows(&rows).expect("uniform width")
    }
}

/// `positive[i][j] = cos(video_i, text⁺_j)`, `negative[i] = cos(video_i, text⁻_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarities<T> {
    pub positive: Matrix<T>,
    pub negative: Vec<T>,
}

impl<T: Scalar> Similarities<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.positive.rows()).map(|i| self.positive[(i, i)]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts<T> {
    pub coarse: T,
    pub fine: T,
    pub total: T,
}

struct Projected<T> {
    pooled: Matrix<T>,
    video: Matrix<T>,
    pos: Matrix<T>,
    neg: Matrix<T>,
    video_norm: Vec<T>,
    pos_norm: Vec<T>,
    neg_norm: Vec<T>,
}

fn nonzero_norms<T: Scalar>(m: &Matrix<T>, what: &str) -> Result<Vec<T>> {
    m.iter_rows()
        .enumerate()
        .map(|(i, r)| {
            let n = norm(r);
            if n > T::zero() && n.is_finite() {
                Ok(n)
            } else {
                Err(Error::ZeroNorm(format!("projected {what} of sample {i}")))
            }
        })
        .collect()
}

fn project<T: Scalar>(batch: &TripleBatch<T>, weights: &ProjectionWeights<T>) -> Result<Projected<T>> {
    let pooled = batch.pooled_frames();
    let video = pooled.apply_linear(weights.vision())?;
    let pos = batch.positives.apply_linear(weights.text())?;
    let neg = batch.negatives.apply_linear(weights.text())?;
    Ok(Projected {
        video_norm: nonzero_norms(&video, "video")?,
        pos_norm: nonzero_norms(&pos, "positive text")?,
        neg_norm: nonzero_norms(&neg, "negative text")?,
        pooled,
        video,
        pos,
        neg,
    })
}

fn clamp_cos<T: Scalar>(c: T) -> T {
    c.max(-T::one()).min(T::one())
}

fn similarities_of<T: Scalar>(p: &Projected<T>) -> Similarities<T> {
    let b = p.video.rows();
    let mut positive = Matrix::zeros(b, b);
    for i in 0..b {
        for j in 0..b {
            positive[(i, j)] = clamp_cos(dot(p.video.row(i), p.pos.row(j)) / (p.video_norm[i] * p.pos_norm[j]));
        }
    }
    let negative = (0..b)
        .map(|i| clamp_cos(dot(p.video.row(i), p.neg.row(i)) / (p.video_norm[i] * p.neg_norm[i])))
        .collect();
    Similarities { positive, negative }
}

pub fn batch_similarities<T: Scalar>(batch: &TripleBatch<T>, weights: &ProjectionWeights<T>) -> Result<Similarities<T>> {
    Ok(similarities_of(&project(batch, weights)?))
}

/// Row-wise softmax of `s / scale`, computed stably.
fn softmax_rows<T: Scalar>(s: &Matrix<T>, scale: T) -> Matrix<T> {
    let mut out = Matrix::zeros(s.rows(), s.cols());
    for i in 0..s.rows() {
        let row = s.row(i);
        let max = row.iter().fold(T::neg_infinity(), |m, &x| m.max(x / scale));
        let exps: Vec<T> = row.iter().map(|&x| (x / scale - max).exp()).collect();
        let z: T = exps.iter().copied().sum();
        for (dst, e) in out.row_mut(i).iter_mut().zip(exps) {
            *dst = e / z;
        }
    }
    out
}

fn log_sum_exp<T: Scalar>(row: &[T], scale: T) -> T {
    let max = row.iter().fold(T::neg_infinity(), |m, &x| m.max(x / scale));
    max + row.iter().map(|&x| (x / scale - max).exp()).sum::<T>().ln()
}

/// Video→text contrastive term over a `B × B` similarity matrix.
pub fn loss_coarse<T: Scalar>(s: &Matrix<T>, config: &LossConfig) -> T {
    let n = s.rows();
    match config.ce_form {
        CeForm::LogSoftmax => {
            let tau = T::lit(config.temperature);
            (0..n).map(|i| log_sum_exp(s.row(i), tau) - s[(i, i)] / tau).sum()
        }
        CeForm::Literal => {
            let p = softmax_rows(s, T::one());
            -(0..n).map(|i| p[(i, i)]).sum::<T>()
        }
    }
}

/// `Σᵢ max(0, M − s⁺ᵢᵢ + s⁻ᵢ)`.
pub fn loss_fine<T: Scalar>(positive_diag: &[T], negative: &[T], config: &LossConfig) -> T {
    let m = T::lit(config.margin);
    positive_diag
        .iter()
        .zip(negative)
        .map(|(&p, &n)| (m - p + n).max(T::zero()))
        .sum()
}

fn parts<T: Scalar>(s: &Similarities<T>, config: &LossConfig) -> LossParts<T> {
    let coarse = loss_coarse(&s.positive, config);
    let fine = loss_fine(&s.diagonal(), &s.negative, config);
    LossParts { coarse, fine, total: coarse + T::lit(config.lambda) * fine }
}

/// `L_coarse + λ · L_fine` for one batch.
pub fn loss_total<T: Scalar>(batch: &TripleBatch<T>, weights: &ProjectionWeights<T>, config: &LossConfig) -> Result<LossParts<T>> {
    Ok(parts(&batch_similarities(batch, weights)?, config))
}

/// `∂cos(x, y)/∂x = y/(|x||y|) − cos · x/|x|²`, accumulated as `k ·` that into `out`.
fn add_cos_grad<T: Scalar>(out: &mut [T], k: T, x: &[T], y: &[T], nx: T, ny: T, cos: T) {
    if k == T::zero() {
        return;
    }
    let a = k / (nx * ny);
    let b = k * cos / (nx * nx);
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = *o + a * yi - b * xi;
    }
}

/// Loss and its exact gradient with respect to both projection matrices.
pub fn gradients<T: Scalar>(
    batch: &TripleBatch<T>,
    weights: &ProjectionWeights<T>,
    config: &LossConfig,
) -> Result<(LossParts<T>, ProjectionWeights<T>)> {
    let p = project(batch, weights)?;
    let s = similarities_of(&p);
    let loss = parts(&s, config);
    let b = batch.len();

    // dL/ds⁺ (B×B) and dL/ds⁻ (B).
    let mut g_pos = Matrix::<T>::zeros(b, b);
    match config.ce_form {
        CeForm::LogSoftmax => {
            let tau = T::lit(config.temperature);
            let sm = softmax_rows(&s.positive, tau);
            for i in 0..b {
                for j in 0..b {
                    let delta = if i == j { T::one() } else { T::zero() };
                    g_pos[(i, j)] = (sm[(i, j)] - delta) / tau;
                }
            }
        }
        CeForm::Literal => {
            let sm = softmax_rows(&s.positive, T::one());
            for i in 0..b {
                let pii = sm[(i, i)];
                for j in 0..b {
                    let delta = if i == j { T::one() } else { T::zero() };
                    g_pos[(i, j)] = -pii * (delta - sm[(i, j)]);
                }
            }
        }
    }
    let lambda = T::lit(config.lambda);
    let margin = T::lit(config.margin);
    let mut g_neg = vec![T::zero(); b];
    for i in 0..b {
        if margin - s.positive[(i, i)] + s.negative[i] > T::zero() {
            g_pos[(i, i)] = g_pos[(i, i)] - lambda;
            g_neg[i] = lambda;
        }
    }

    let d = weights.d_out();
    let mut d_video = Matrix::<T>::zeros(b, d);
    let mut d_pos = Matrix::<T>::zeros(b, d);
    let mut d_neg = Matrix::<T>::zeros(b, d);
    for i in 0..b {
        for j in 0..b {
            let (k, c) = (g_pos[(i, j)], s.positive[(i, j)]);
            let (v, t) = (p.video.row(i), p.pos.row(j));
            add_cos_grad(d_video.row_mut(i), k, v, t, p.video_norm[i], p.pos_norm[j], c);
            add_cos_grad(d_pos.row_mut(j), k, t, v, p.pos_norm[j], p.video_norm[i], c);
        }
        let (k, c) = (g_neg[i], s.negative[i]);
        let (v, u) = (p.video.row(i), p.neg.row(i));
        add_cos_grad(d_video.row_mut(i), k, v, u, p.video_norm[i], p.neg_norm[i], c);
        add_cos_grad(d_neg.row_mut(i), k, u, v, p.neg_norm[i], p.video_norm[i], c);
    }

    let mut gv = Matrix::zeros(d, weights.d_vision_in());
    let mut gt = Matrix::zeros(d, weights.d_text_in());
    for i in 0..b {
        gv.add_outer(T::one(), d_video.row(i), p.pooled.row(i));
        gt.add_outer(T::one(), d_pos.row(i), batch.positives.row(i));
        gt.add_outer(T::one(), d_neg.row(i), batch.negatives.row(i));
    }
    Ok((loss, ProjectionWeights::new(gv, gt)?))
}
