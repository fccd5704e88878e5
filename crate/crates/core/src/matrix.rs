//! Dense row-major matrices and the vector helpers the metric is built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "matrix data has {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Select rows by index, repeating is allowed.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        self.iter_rows().map(|r| dot(r, x)).collect()
    }

    /// Row i of the result is `w · row_i(self)`, i.e. `self · wᵀ`.
    pub fn apply_linear(&self, w: &Matrix<T>) -> Result<Self> {
        if w.cols != self.cols {
            return Err(Error::Dimension {
                expected: w.cols,
                found: self.cols,
                context: "linear map input".into(),
            });
        }
        let mut data = Vec::with_capacity(self.rows * w.rows);
        for r in self.iter_rows() {
            data.extend(w.mul_vec(r));
        }
        Ok(Self {
            rows: self.rows,
            cols: w.rows,
            data,
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        self.map(|v| U::lit(v.as_f64()))
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(|v| v * k)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Add `k · a ⊗ b` in place.
    pub fn add_outer(&mut self, k: T, a: &[T], b: &[T]) {
        debug_assert_eq!(a.len(), self.rows);
        debug_assert_eq!(b.len(), self.cols);
        for (i, &ai) in a.iter().enumerate() {
            let s = k * ai;
            if s == T::zero() {
                continue;
            }
            for (dst, &bj) in self.row_mut(i).iter_mut().zip(b) {
                *dst = *dst + s * bj;
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Cosine similarity, `None` when either side has zero norm.
pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let na = norm(a);
    let nb = norm(b);
    if na == T::zero() || nb == T::zero() {
        return None;
    }
    let c = dot(a, b) / (na * nb);
    Some(c.max(-T::one()).min(T::one()))
}

/// Arithmetic mean of the rows.
pub fn mean_rows<T: Scalar>(m: &Matrix<T>) -> Option<Vec<T>> {
    if m.rows() == 0 {
        return None;
    }
    let mut acc = vec![T::zero(); m.cols()];
    for r in m.iter_rows() {
        for (a, &v) in acc.iter_mut().zip(r) {
            *a = *a + v;
        }
    }
    let n = T::from_usize_lossy(m.rows());
    Some(acc.into_iter().map(|v| v / n).collect())
}
