//! Back-translation paraphrases through a pivot language.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::{read_jsonl, tokenize};
use crate::error::{Error, Result};

pub const SOURCE_LANG: &str = "en";

pub trait Translator: Send + Sync {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String>;
}

/// Translate to `pivot` and back. `None` when the round trip leaves the
/// tokens unchanged.
pub fn paraphrase(sentence: &str, translator: &dyn Translator, pivot: &str) -> Result<Option<String>> {
    let there = translator.translate(sentence, SOURCE_LANG, pivot)?;
    let back = translator.translate(&there, pivot, SOURCE_LANG)?;
    let back = back.trim().to_string();
    Ok((tokenize(&back) != tokenize(sentence) && !back.is_empty()).then_some(back))
}

/// One canned round trip for [`StubTranslator`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub text: String,
    pub pivot: String,
    pub paraphrase: String,
}

/// Deterministic translator backed by a fixed table. Unknown inputs come
/// back unchanged, so their paraphrase is discarded.
#[derive(Debug, Clone, Default)]
pub struct StubTranslator {
    table: HashMap<(String, String, String), String>,
}

impl StubTranslator {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_round_trips(trips: &[RoundTrip]) -> Self {
        let mut stub = Self::default();
        for t in trips {
            stub.add_round_trip(&t.text, &t.pivot, &t.paraphrase);
        }
        stub
    }

    /// Load round trips from a JSONL file of `{text, pivot, paraphrase}`.
    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::from_round_trips(&read_jsonl::<RoundTrip>(path)?))
    }

    pub fn add_round_trip(&mut self, text: &str, pivot: &str, paraphrase: &str) {
        let middle = format!("[{pivot}] {text}");
        self.table
            .insert((SOURCE_LANG.to_string(), pivot.to_string(), text.to_string()), middle.clone());
        self.table
            .insert((pivot.to_string(), SOURCE_LANG.to_string(), middle), paraphrase.to_string());
    }
}

impl Translator for StubTranslator {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String> {
        Ok(self
            .table
            .get(&(source.to_string(), target.to_string(), text.to_string()))
            .cloned()
            .unwrap_or_else(|| text.to_string()))
    }
}

pub const MT_URL_VAR: &str = "FACTVC_MT_URL";
pub const MT_KEY_VAR: &str = "FACTVC_MT_KEY";

#[derive(Debug, Clone)]
pub struct HttpTranslatorConfig {
    /// Base URL; requests go to `{base_url}/translate`.
    pub base_url: String,
    pub api_key: Option<String>,
    /// Minimum spacing between requests.
    pub min_interval: Duration,
    pub max_retries: u32,
    pub retry_delay: Duration,
    pub timeout: Duration,
}

impl HttpTranslatorConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            api_key: None,
            min_interval: Duration::from_millis(100),
            max_retries: 3,
            retry_delay: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
        }
    }

    /// Read `FACTVC_MT_URL` and, if set, `FACTVC_MT_KEY`.
    pub fn from_env() -> Result<Self> {
        let url = std::env::var(MT_URL_VAR)
            .map_err(|_| Error::Invalid(format!("{MT_URL_VAR} is not set")))?;
        let mut config = Self::new(url);
        config.api_key = std::env::var(MT_KEY_VAR).ok().filter(|k| !k.is_empty());
        Ok(config)
    }
}

#[derive(Serialize)]
struct TranslateRequest<'a> {
    q: &'a str,
    source: &'a str,
    target: &'a str,
    format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    api_key: Option<&'a str>,
}

#[derive(Deserialize)]
struct TranslateResponse {
    #[serde(rename = "translatedText")]
    translated_text: String,
}

/// Client for a LibreTranslate-compatible `POST /translate` endpoint.
/// Requests are serialized and spaced by `min_interval`.
pub struct HttpTranslator {
    config: HttpTranslatorConfig,
    agent: ureq::Agent,
    last_request: Mutex<Option<Instant>>,
}

impl HttpTranslator {
    pub fn new(config: HttpTranslatorConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Self { config, agent, last_request: Mutex::new(None) }
    }

    fn attempt(&self, body: &TranslateRequest<'_>) -> std::result::Result<String, (bool, String)> {
        let url = format!("{}/translate", self.config.base_url.trim_end_matches('/'));
        let mut resp = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| (true, format!("request to {url} failed: {e}")))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err((true, format!("{url} answered {status}")));
        }
        if status != 200 {
            return Err((false, format!("{url} answered {status}")));
        }
        resp.body_mut()
            .read_json::<TranslateResponse>()
            .map(|r| r.translated_text)
            .map_err(|e| (false, format!("bad response from {url}: {e}")))
    }
}

impl Translator for HttpTranslator {
    fn translate(&self, text: &str, source: &str, target: &str) -> Result<String> {
        let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
        let body = TranslateRequest {
            q: text,
            source,
            target,
            format: "text",
            api_key: self.config.api_key.as_deref(),
        };
        let mut tries = 0;
        loop {
            if let Some(t) = *last {
                let wait = self.config.min_interval.saturating_sub(t.elapsed());
                if !wait.is_zero() {
                    thread::sleep(wait);
                }
            }
            *last = Some(Instant::now());
            match self.attempt(&body) {
                Ok(out) => return Ok(out),
                Err((retry, msg)) if retry && tries < self.config.max_retries => {
                    tries += 1;
                    log::debug!("translation attempt {tries} failed: {msg}");
                    thread::sleep(self.config.retry_delay);
                }
                Err((_, msg)) => return Err(Error::Remote(msg)),
            }
        }
    }
}
