//! Deterministic synthetic embeddings with planted concept structure.
//!
//! Each concept owns one vector of a random orthonormal basis. A row that
//! depicts a set of concepts is the normalized sum of their basis vectors
//! plus a noise vector of norm [`NOISE`]. With unit-norm rows and noise of
//! norm ε, two rows of the same single concept are within angle `2·asin ε`
//! and rows of different concepts are within angle `2·asin ε` of orthogonal,
//! which gives cosine ≥ 0.999 and |cosine| ≤ 0.04 for ε = 0.02.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::fvce::{EmbeddingKind, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm};

pub type ConceptId = usize;

pub const NOISE: f64 = 0.02;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[derive(Debug, Clone)]
pub struct ConceptSpace {
    dim: usize,
    basis: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl ConceptSpace {
    pub fn new(seed: u64, n_concepts: usize, dim: usize) -> Result<Self> {
        if n_concepts > dim {
            return Err(Error::Invalid(format!(
                "{n_concepts} concepts cannot be orthogonal in dim {dim}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n_concepts);
        while basis.len() < n_concepts {
            let mut v: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
            for b in &basis {
                let p = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, &bi)| *x -= p * bi);
            }
            if norm(&v) < 1e-6 {
                continue;
            }
            normalize(&mut v);
            basis.push(v);
        }
        Ok(Self { dim, basis, rng })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_concepts(&self) -> usize {
        self.basis.len()
    }

    /// One noisy unit-ish row depicting `concepts` (repeats add weight).
    pub fn embed(&mut self, concepts: &[ConceptId]) -> Result<Vec<f32>> {
        if concepts.is_empty() {
            return Err(Error::Invalid("row must depict at least one concept".into()));
        }
        let mut v = vec![0.0f64; self.dim];
        for &c in concepts {
            let b = self
                .basis
                .get(c)
                .ok_or_else(|| Error::Invalid(format!("unknown concept {c}")))?;
            v.iter_mut().zip(b).for_each(|(x, &bi)| *x += bi);
        }
        normalize(&mut v);
        let mut noise: Vec<f64> = (0..self.dim).map(|_| gaussian(&mut self.rng)).collect();
        normalize(&mut noise);
        v.iter_mut()
            .zip(&noise)
            .for_each(|(x, &n)| *x += NOISE * n);
        Ok(v.into_iter().map(|x| x as f32).collect())
    }

    pub fn embed_rows(&mut self, kind: EmbeddingKind, rows: &[Vec<ConceptId>]) -> Result<EmbeddingMatrix> {
        let mut data = Vec::with_capacity(rows.len() * self.dim);
        for r in rows {
            data.extend(self.embed(r)?);
        }
        EmbeddingMatrix::new(kind, self.dim, data)
    }
}

/// Concept assignment for a synthetic video/text collection.
#[derive(Debug, Clone, Default)]
pub struct SynthSpec {
    pub dim: usize,
    pub n_concepts: usize,
    /// Per video, per frame: the concepts the frame depicts.
    pub videos: Vec<Vec<Vec<ConceptId>>>,
    /// Per text, per token: the token's concept.
    pub texts: Vec<Vec<ConceptId>>,
}

#[derive(Debug, Clone)]
pub struct SynthEmbeddings {
    pub frames: Vec<EmbeddingMatrix>,
    pub tokens: Vec<EmbeddingMatrix>,
    /// One-row sentence matrix per text: the normalized sum of its token
    /// concepts.
    pub sentences: Vec<EmbeddingMatrix>,
}

pub fn synth_embeddings(seed: u64, spec: &SynthSpec) -> Result<SynthEmbeddings> {
    let mut space = ConceptSpace::new(seed, spec.n_concepts, spec.dim)?;
    let frames = spec
        .videos
        .iter()
        .map(|v| space.embed_rows(EmbeddingKind::FramesPre, v))
        .collect::<Result<Vec<_>>>()?;
    let mut tokens = Vec::with_capacity(spec.texts.len());
    let mut sentences = Vec::with_capacity(spec.texts.len());
    for t in &spec.texts {
        let rows: Vec<Vec<ConceptId>> = t.iter().map(|&c| vec![c]).collect();
        tokens.push(space.embed_rows(EmbeddingKind::TokensPre, &rows)?);
        sentences.push(space.embed_rows(EmbeddingKind::SentencePre, std::slice::from_ref(t))?);
    }
    Ok(SynthEmbeddings {
        frames,
        tokens,
        sentences,
    })
}
