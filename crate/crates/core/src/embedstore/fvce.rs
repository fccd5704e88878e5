//! `FVCE` embedding files.
//!
//! Layout (little-endian): magic `FVCE`, version `u16` (1), kind `u8`,
//! reserved `u8` (0), dim `u32`, count `u32`, then `count × dim` `f32`
//! values row-major. No padding, no trailer.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const FVCE_MAGIC: &[u8; 4] = b"FVCE";
pub const FVCE_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    FramesPre,
    SentencePre,
    TokensPre,
    Projected,
}

impl EmbeddingKind {
    pub fn code(self) -> u8 {
        match self {
            Self::FramesPre => 0,
            Self::SentencePre => 1,
            Self::TokensPre => 2,
            Self::Projected => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Self::FramesPre,
            1 => Self::SentencePre,
            2 => Self::TokensPre,
            3 => Self::Projected,
            _ => return None,
        })
    }

    pub fn is_pre(self) -> bool {
        self != Self::Projected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    kind: EmbeddingKind,
    dim: usize,
    count: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(kind: EmbeddingKind, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("embedding dim must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} values do not form rows of dim {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            kind,
            dim,
            count: data.len() / dim,
            data,
        })
    }

    pub fn from_matrix<T: Scalar>(kind: EmbeddingKind, m: &Matrix<T>) -> Result<Self> {
        Self::new(kind, m.cols(), m.data().iter().map(|v| v.as_f32()).collect())
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let data = self.data.iter().map(|&v| T::lit(f64::from(v))).collect();
        Matrix::from_vec(self.count, self.dim, data).expect("shape checked on construction")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(FVCE_MAGIC);
        out.extend_from_slice(&FVCE_VERSION.to_le_bytes());
        out.push(self.kind.code());
        out.push(0);
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.count as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = ByteReader::new(bytes);
        let magic = r.take(4)?;
        if magic != FVCE_MAGIC {
            return Err(FormatError::BadMagic {
                expected: "FVCE".into(),
                found: String::from_utf8_lossy(magic).into_owned(),
            });
        }
        let version = r.u16()?;
        if version != FVCE_VERSION {
            return Err(FormatError::BadVersion(version));
        }
        let code = r.u8()?;
        let kind = EmbeddingKind::from_code(code).ok_or(FormatError::BadKind(code))?;
        let reserved = r.u8()?;
        if reserved != 0 {
            return Err(FormatError::BadReserved(reserved));
        }
        let dim_offset = r.offset();
        let dim = r.u32()? as usize;
        if dim == 0 {
            return Err(FormatError::ZeroDim { offset: dim_offset });
        }
        let count = r.u32()? as usize;
        let data = r.f32s(count * dim)?;
        r.finish()?;
        Ok(Self {
            kind,
            dim,
            count,
            data,
        })
    }
}

/// Bounds-checked little-endian cursor that reports byte offsets.
pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let avail = self.bytes.len() - self.pos;
        if avail < n {
            return Err(FormatError::Truncated {
                offset: self.bytes.len(),
                needed: n - avail,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f32s(&mut self, n: usize) -> Result<Vec<f32>, FormatError> {
        let start = self.pos;
        let raw = self.take(n.checked_mul(4).ok_or(FormatError::Truncated {
            offset: self.bytes.len(),
            needed: usize::MAX,
        })?)?;
        raw.chunks_exact(4)
            .enumerate()
            .map(|(i, c)| {
                let v = f32::from_le_bytes(c.try_into().unwrap());
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FormatError::NonFinite {
                        offset: start + 4 * i,
                    })
                }
            })
            .collect()
    }

    pub(crate) fn finish(&self) -> Result<(), FormatError> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(FormatError::TrailingBytes {
                offset: self.pos,
                extra: self.bytes.len() - self.pos,
            })
        }
    }
}

pub fn read_fvce(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    EmbeddingMatrix::from_bytes(&bytes).map_err(|source| Error::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_fvce(matrix: &EmbeddingMatrix, path: &Path) -> Result<()> {
    fs::write(path, matrix.to_bytes()).map_err(|e| Error::io(path, e))
}
