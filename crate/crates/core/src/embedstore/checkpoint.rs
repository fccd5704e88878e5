//! Projection weights and the `FVCW` checkpoint format.
//!
//! Layout (little-endian): magic `FVCW`, version `u16` (1), `d_vision_in`,
//! `d_text_in`, `d_out` as `u32`, then `W_v` and `W_t` as row-major `f32`.
//! Training configuration lives in a JSON sidecar `<stem>.meta.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::fvce::ByteReader;
use crate::error::{Error, FormatError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const FVCW_MAGIC: &[u8; 4] = b"FVCW";
pub const FVCW_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Vision,
    Text,
}

/// The two bias-free linear maps `W_v` (`d_out × d_vision_in`) and
/// `W_t` (`d_out × d_text_in`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionWeights<T> {
    vision: Matrix<T>,
    text: Matrix<T>,
}

impl<T: Scalar> ProjectionWeights<T> {
    pub fn new(vision: Matrix<T>, text: Matrix<T>) -> Result<Self> {
        if vision.rows() != text.rows() {
            return Err(Error::Dimension {
                expected: vision.rows(),
                found: text.rows(),
                context: "projection output dim (W_t rows vs W_v rows)".into(),
            });
        }
        if vision.rows() == 0 || vision.cols() == 0 || text.cols() == 0 {
            return Err(Error::Shape("projection dims must be positive".into()));
        }
        if !vision.is_finite() || !text.is_finite() {
            return Err(Error::Invalid("projection weights must be finite".into()));
        }
        Ok(Self { vision, text })
    }

    /// Identity maps; requires equal input and output dims.
    pub fn identity(dim: usize) -> Self {
        Self {
            vision: Matrix::identity(dim),
            text: Matrix::identity(dim),
        }
    }

    pub fn d_out(&self) -> usize {
        self.vision.rows()
    }

    pub fn d_vision_in(&self) -> usize {
        self.vision.cols()
    }

    pub fn d_text_in(&self) -> usize {
        self.text.cols()
    }

    pub fn vision(&self) -> &Matrix<T> {
        &self.vision
    }

    pub fn text(&self) -> &Matrix<T> {
        &self.text
    }

    pub fn vision_mut(&mut self) -> &mut Matrix<T> {
        &mut self.vision
    }

    pub fn text_mut(&mut self) -> &mut Matrix<T> {
        &mut self.text
    }

    pub fn side(&self, side: Side) -> &Matrix<T> {
        match side {
            Side::Vision => &self.vision,
            Side::Text => &self.text,
        }
    }

    pub fn cast<U: Scalar>(&self) -> ProjectionWeights<U> {
        ProjectionWeights {
            vision: self.vision.cast(),
            text: self.text.cast(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(FVCW_MAGIC);
        out.extend_from_slice(&FVCW_VERSION.to_le_bytes());
        for d in [self.d_vision_in(), self.d_text_in(), self.d_out()] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in self.vision.data().iter().chain(self.text.data()) {
            out.extend_from_slice(&v.as_f32().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = ByteReader::new(bytes);
        let magic = r.take(4)?;
        if magic != FVCW_MAGIC {
            return Err(FormatError::BadMagic {
                expected: "FVCW".into(),
                found: String::from_utf8_lossy(magic).into_owned(),
            });
        }
        let version = r.u16()?;
        if version != FVCW_VERSION {
            return Err(FormatError::BadVersion(version));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let offset = r.offset();
            *d = r.u32()? as usize;
            if *d == 0 {
                return Err(FormatError::ZeroDim { offset });
            }
        }
        let [dv, dt, dout] = dims;
        let to_t = |xs: Vec<f32>| xs.into_iter().map(|v| T::lit(f64::from(v))).collect();
        let wv = r.f32s(dout * dv)?;
        let wt = r.f32s(dout * dt)?;
        r.finish()?;
        Ok(Self {
            vision: Matrix::from_vec(dout, dv, to_t(wv)).expect("sized by header"),
            text: Matrix::from_vec(dout, dt, to_t(wt)).expect("sized by header"),
        })
    }
}

/// `ckpt.fvcw` → `ckpt.meta.json`.
pub fn meta_path(checkpoint: &Path) -> PathBuf {
    checkpoint.with_extension("meta.json")
}

pub fn write_checkpoint<T: Scalar, M: Serialize>(
    weights: &ProjectionWeights<T>,
    path: &Path,
    meta: Option<&M>,
) -> Result<()> {
    fs::write(path, weights.to_bytes()).map_err(|e| Error::io(path, e))?;
    if let Some(meta) = meta {
        let mp = meta_path(path);
        let text = serde_json::to_string_pretty(meta).map_err(|e| Error::Json {
            path: mp.clone(),
            source: e,
        })?;
        fs::write(&mp, text).map_err(|e| Error::io(&mp, e))?;
    }
    Ok(())
}

pub fn read_checkpoint<T: Scalar>(path: &Path) -> Result<ProjectionWeights<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ProjectionWeights::from_bytes(&bytes).map_err(|source| Error::Format {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights() -> ProjectionWeights<f32> {
        let v = Matrix::from_vec(2, 3, vec![1.0, -2.0, 0.5, 0.0, 3.25, 1e-7]).unwrap();
        let t = Matrix::from_vec(2, 1, vec![7.0, -0.125]).unwrap();
        ProjectionWeights::new(v, t).unwrap()
    }

    #[test]
    fn round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ckpt.fvcw");
        let w = weights();
        write_checkpoint(&w, &p, Some(&serde_json::json!({"margin": 5.0}))).unwrap();
        assert_eq!(read_checkpoint::<f32>(&p).unwrap(), w);
        assert!(dir.path().join("ckpt.meta.json").exists());
        let bytes = fs::read(&p).unwrap();
        assert_eq!(bytes.len(), 18 + 4 * 8);
    }

    #[test]
    fn mismatched_output_dims() {
        let v = Matrix::<f32>::zeros(2, 3);
        let t = Matrix::<f32>::zeros(3, 3);
        assert!(ProjectionWeights::new(v, t).is_err());
    }

    #[test]
    fn rejects_wrong_magic_and_truncation() {
        let mut b = weights().to_bytes();
        assert!(ProjectionWeights::<f32>::from_bytes(&b[..b.len() - 1]).is_err());
        b[0] = b'X';
        assert!(matches!(
            ProjectionWeights::<f32>::from_bytes(&b),
            Err(FormatError::BadMagic { .. })
        ));
    }
}
