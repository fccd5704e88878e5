//! Directory of FVCE files.
//!
//! Naming: `{video_id}.frames.fvce` for frames,
//! `{video_id}.{model_id}.{sentence_idx}.sent.fvce` / `.tok.fvce` for caption
//! sentences and their tokens, and `triples.pos.fvce` / `triples.neg.fvce`
//! holding one sentence row per triple, in triple-file order.

use std::path::{Path, PathBuf};

use super::fvce::{read_fvce, write_fvce, EmbeddingMatrix};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dir: PathBuf,
}

impl EmbeddingStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn frames_path(&self, video_id: &str) -> PathBuf {
        self.dir.join(format!("{video_id}.frames.fvce"))
    }

    pub fn sentence_path(&self, video_id: &str, model_id: &str, idx: usize) -> PathBuf {
        self.dir.join(format!("{video_id}.{model_id}.{idx}.sent.fvce"))
    }

    pub fn tokens_path(&self, video_id: &str, model_id: &str, idx: usize) -> PathBuf {
        self.dir.join(format!("{video_id}.{model_id}.{idx}.tok.fvce"))
    }

    pub fn triples_path(&self, positive: bool) -> PathBuf {
        self.dir
            .join(if positive { "triples.pos.fvce" } else { "triples.neg.fvce" })
    }

    pub fn has_frames(&self, video_id: &str) -> bool {
        self.frames_path(video_id).exists()
    }

    pub fn frames(&self, video_id: &str) -> Result<EmbeddingMatrix> {
        read_fvce(&self.frames_path(video_id))
    }

    pub fn sentence(&self, video_id: &str, model_id: &str, idx: usize) -> Result<EmbeddingMatrix> {
        read_fvce(&self.sentence_path(video_id, model_id, idx))
    }

    pub fn tokens(&self, video_id: &str, model_id: &str, idx: usize) -> Result<EmbeddingMatrix> {
        read_fvce(&self.tokens_path(video_id, model_id, idx))
    }

    pub fn put_frames(&self, video_id: &str, m: &EmbeddingMatrix) -> Result<()> {
        write_fvce(m, &self.frames_path(video_id))
    }

    pub fn put_sentence(&self, video_id: &str, model_id: &str, idx: usize, sentence: &EmbeddingMatrix, tokens: &EmbeddingMatrix) -> Result<()> {
        write_fvce(sentence, &self.sentence_path(video_id, model_id, idx))?;
        write_fvce(tokens, &self.tokens_path(video_id, model_id, idx))
    }
}
