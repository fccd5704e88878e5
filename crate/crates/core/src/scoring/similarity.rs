//! Coarse and fine-grained similarity scores over projected embeddings.

use crate::error::{Error, Result};
use crate::matrix::{cosine, mean_rows, norm, Matrix};
use crate::scalar::Scalar;

fn check_rows<T: Scalar>(m: &Matrix<T>, what: &str) -> Result<()> {
    if m.rows() == 0 {
        return Err(Error::Empty(format!("no {what} rows")));
    }
    for (i, r) in m.iter_rows().enumerate() {
        if norm(r) == T::zero() {
            return Err(Error::ZeroNorm(format!("{what} row {i}")));
        }
    }
    Ok(())
}

fn check_dims<T: Scalar>(a: &Matrix<T>, b: usize, what: &str) -> Result<()> {
    if a.cols() != b {
        return Err(Error::Dimension {
            expected: a.cols(),
            found: b,
            context: what.into(),
        });
    }
    Ok(())
}

/// Cosine between the mean-pooled frames and the sentence vector.
pub fn coarse_score<T: Scalar>(frames: &Matrix<T>, sentence: &[T]) -> Result<T> {
    check_dims(frames, sentence.len(), "sentence vs frame dim")?;
    let pooled = mean_rows(frames).ok_or_else(|| Error::Empty("no frame rows".into()))?;
    if norm(&pooled) == T::zero() {
        return Err(Error::ZeroNorm("pooled frame vector".into()));
    }
    cosine(&pooled, sentence).ok_or_else(|| Error::ZeroNorm("sentence vector".into()))
}

/// Cosine matrix, `tokens × frames`.
fn cosine_table<T: Scalar>(frames: &Matrix<T>, tokens: &Matrix<T>) -> Result<Vec<Vec<T>>> {
    check_dims(frames, tokens.cols(), "token vs frame dim")?;
    check_rows(frames, "frame")?;
    check_rows(tokens, "token")?;
    Ok(tokens
        .iter_rows()
        .map(|t| {
            frames
                .iter_rows()
                .map(|f| cosine(t, f).expect("norms checked"))
                .collect()
        })
        .collect())
}

fn mean<T: Scalar>(xs: impl Iterator<Item = T>) -> T {
    let (sum, n) = xs.fold((T::zero(), 0usize), |(s, n), x| (s + x, n + 1));
    sum / T::from_usize_lossy(n)
}

fn precision_recall<T: Scalar>(table: &[Vec<T>]) -> (T, T) {
    let n_frames = table[0].len();
    let p = mean(
        table
            .iter()
            .map(|row| row.iter().copied().fold(T::neg_infinity(), T::max)),
    );
    let r = mean((0..n_frames).map(|f| {
        table
            .iter()
            .map(|row| row[f])
            .fold(T::neg_infinity(), T::max)
    }));
    (p, r)
}

/// Mean over tokens of the best cosine to any frame.
pub fn fine_precision_score<T: Scalar>(frames: &Matrix<T>, tokens: &Matrix<T>) -> Result<T> {
    Ok(precision_recall(&cosine_table(frames, tokens)?).0)
}

/// Mean over frames of the best cosine to any token.
pub fn fine_recall_score<T: Scalar>(frames: &Matrix<T>, tokens: &Matrix<T>) -> Result<T> {
    Ok(precision_recall(&cosine_table(frames, tokens)?).1)
}

/// Harmonic mean of precision and recall; 0 when they sum to 0.
pub fn fine_f_value_score<T: Scalar>(frames: &Matrix<T>, tokens: &Matrix<T>) -> Result<T> {
    let (p, r) = precision_recall(&cosine_table(frames, tokens)?);
    if p + r == T::zero() {
        return Ok(T::zero());
    }
    Ok(T::lit(2.0) * p * r / (p + r))
}

/// `(1 − α)·coarse + α·fine`.
pub fn blend<T: Scalar>(alpha: T, coarse: T, fine: T) -> T {
    (T::one() - alpha) * coarse + alpha * fine
}
