use super::checkpoint::{ProjectionWeights, Side};
use super::fvce::{EmbeddingKind, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::matrix::{mean_rows, Matrix};
use crate::scalar::Scalar;

/// Apply one side of the projection to every row. No normalization.
pub fn project_rows<T: Scalar>(
    rows: &Matrix<T>,
    weights: &ProjectionWeights<T>,
    side: Side,
) -> Result<Matrix<T>> {
    let w = weights.side(side);
    if rows.cols() != w.cols() {
        return Err(Error::Dimension {
            expected: w.cols(),
            found: rows.cols(),
            context: format!("{side:?} projection input"),
        });
    }
    rows.apply_linear(w)
}

/// Project a stored pre-projection matrix, accumulating in `f64`.
pub fn project<T: Scalar>(
    matrix: &EmbeddingMatrix,
    weights: &ProjectionWeights<T>,
    side: Side,
) -> Result<EmbeddingMatrix> {
    if !matrix.kind().is_pre() {
        return Err(Error::Invalid("matrix is already projected".into()));
    }
    let out = project_rows(&matrix.to_matrix::<f64>(), &weights.cast::<f64>(), side)?;
    EmbeddingMatrix::from_matrix(EmbeddingKind::Projected, &out)
}

/// Mean of the frame rows.
pub fn mean_pool(frames: &EmbeddingMatrix) -> Result<Vec<f32>> {
    let pooled = mean_rows(&frames.to_matrix::<f64>())
        .ok_or_else(|| Error::Empty("cannot pool zero frames".into()))?;
    Ok(pooled.into_iter().map(|v| v as f32).collect())
}
