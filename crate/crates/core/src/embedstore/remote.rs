//! Client for an external encoder service.
//!
//! `GET /dims` returns `{"vision","text","embed"}`; `POST /encode` with
//! `{"kind","items"}` returns an FVCE body of pre-projection features.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::fvce::{EmbeddingKind, EmbeddingMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderDims {
    pub vision: usize,
    pub text: usize,
    pub embed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodeKind {
    Frames,
    Sentence,
    Tokens,
}

impl EncodeKind {
    fn embedding_kind(self) -> EmbeddingKind {
        match self {
            Self::Frames => EmbeddingKind::FramesPre,
            Self::Sentence => EmbeddingKind::SentencePre,
            Self::Tokens => EmbeddingKind::TokensPre,
        }
    }

    fn declared_dim(self, dims: &EncoderDims) -> usize {
        match self {
            Self::Frames => dims.vision,
            Self::Sentence | Self::Tokens => dims.text,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EncoderConfig {
    pub base_url: String,
    /// Extra attempts after the first on connection errors, 429 and 5xx.
    pub max_retries: u32,
    pub retry_delay: Duration,
    pub timeout: Duration,
    /// Dims of the local store; a service disagreeing with them is an error.
    pub expected: Option<EncoderDims>,
}

impl EncoderConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            max_retries: 3,
            retry_delay: Duration::from_millis(200),
            timeout: Duration::from_secs(60),
            expected: None,
        }
    }
}

#[derive(Serialize)]
struct EncodeRequest<'a> {
    kind: EncodeKind,
    items: &'a [String],
}

pub struct EncoderClient {
    config: EncoderConfig,
    agent: ureq::Agent,
}

enum Attempt<T> {
    Done(T),
    Retry(String),
}

impl EncoderClient {
    pub fn new(config: EncoderConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Self { config, agent }
    }

    fn with_retries<T>(&self, what: &str, mut f: impl FnMut() -> Result<Attempt<T>>) -> Result<T> {
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                log::warn!("{what}: retry {attempt} after: {last}");
                thread::sleep(self.config.retry_delay);
            }
            match f()? {
                Attempt::Done(v) => return Ok(v),
                Attempt::Retry(why) => last = why,
            }
        }
        Err(Error::Remote(format!(
            "{what} failed after {} attempts: {last}",
            self.config.max_retries + 1
        )))
    }

    pub fn dims(&self) -> Result<EncoderDims> {
        let url = format!("{}/dims", self.config.base_url);
        self.with_retries("GET /dims", || match self.agent.get(&url).call() {
            Err(e) => Ok(Attempt::Retry(e.to_string())),
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                if status == 429 || status >= 500 {
                    return Ok(Attempt::Retry(format!("status {status}")));
                }
                if status != 200 {
                    return Err(Error::Remote(format!("GET /dims returned {status}")));
                }
                let dims = resp
                    .body_mut()
                    .read_json::<EncoderDims>()
                    .map_err(|e| Error::Remote(format!("bad /dims payload: {e}")))?;
                Ok(Attempt::Done(dims))
            }
        })
    }

    /// Encode items into pre-projection features, checking dims against the
    /// service declaration and the configured local store.
    pub fn encode(&self, kind: EncodeKind, items: &[String]) -> Result<EmbeddingMatrix> {
        let dims = self.dims()?;
        if let Some(expected) = self.config.expected {
            let (want, got) = (kind.declared_dim(&expected), kind.declared_dim(&dims));
            if want != got {
                return Err(Error::Dimension {
                    expected: want,
                    found: got,
                    context: format!("encoder service {kind:?} dim vs local store"),
                });
            }
        }
        let url = format!("{}/encode", self.config.base_url);
        let body = EncodeRequest { kind, items };
        let bytes = self.with_retries("POST /encode", || {
            match self.agent.post(&url).send_json(&body) {
                Err(e) => Ok(Attempt::Retry(e.to_string())),
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 429 || status >= 500 {
                        return Ok(Attempt::Retry(format!("status {status}")));
                    }
                    if status != 200 {
                        return Err(Error::Remote(format!("POST /encode returned {status}")));
                    }
                    let bytes = resp
                        .body_mut()
                        .with_config()
                        .limit(u64::MAX)
                        .read_to_vec()
                        .map_err(|e| Error::Remote(e.to_string()))?;
                    Ok(Attempt::Done(bytes))
                }
            }
        })?;
        let m = EmbeddingMatrix::from_bytes(&bytes).map_err(|e| Error::Remote(format!("bad FVCE body: {e}")))?;
        if m.dim() != kind.declared_dim(&dims) {
            return Err(Error::Dimension {
                expected: kind.declared_dim(&dims),
                found: m.dim(),
                context: "encoder response vs declared dims".into(),
            });
        }
        if m.kind() != kind.embedding_kind() {
            return Err(Error::Remote(format!("expected {:?}, got {:?}", kind.embedding_kind(), m.kind())));
        }
        if m.count() != items.len() {
            return Err(Error::Remote(format!("{} rows for {} items", m.count(), items.len())));
        }
        Ok(m)
    }
}

/// Convenience wrapper for one-off requests.
pub fn encode_remote(config: &EncoderConfig, kind: EncodeKind, items: &[String]) -> Result<EmbeddingMatrix> {
    EncoderClient::new(config.clone()).encode(kind, items)
}
