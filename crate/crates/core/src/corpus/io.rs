//! JSON Lines persistence and manifest loading.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::model::{validate_annotation, CaptionKey, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub videos: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub captions: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples: Option<PathBuf>,
}

/// Parse JSON, reporting the path of the offending field. Missing and
/// unknown fields are named by serde inside the message rather than the path.
fn parse<T: DeserializeOwned>(text: &str) -> std::result::Result<T, (String, serde_json::Error)> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let named = inner.to_string().split('`').nth(1).map(str::to_string);
        let field = match (path.as_str(), named) {
            (".", Some(n)) => n,
            (".", None) => "<record>".to_string(),
            (p, Some(n)) if inner.to_string().contains("field") => format!("{p}.{n}"),
            (p, _) => p.to_string(),
        };
        (field, inner)
    })?;
    de.end().map_err(|e| ("<record>".to_string(), e))?;
    Ok(value)
}

/// Read one record per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse(&line).map_err(|(field, e)| Error::Schema {
            file: path.to_path_buf(),
            line: i + 1,
            field,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Append records to a JSONL file, creating it if needed.
pub fn append_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    w.get_ref().sync_data().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text).map_err(|(field, e)| Error::Schema {
        file: path.to_path_buf(),
        line: e.line(),
        field,
        message: e.to_string(),
    })
}

fn schema(file: &Path, line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        file: file.to_path_buf(),
        line,
        field: field.into(),
        message: message.into(),
    }
}

/// Load a corpus from its manifest, resolving relative paths against the
/// manifest's directory and validating every cross-reference.
pub fn load_corpus(manifest_path: &Path) -> Result<Corpus> {
    let manifest: Manifest = read_json(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));

    let videos_path = resolve(&manifest.videos);
    let captions_path = resolve(&manifest.captions);
    let annotations_path = resolve(&manifest.annotations);
    let triples_path = resolve(&manifest.triples);

    let mut corpus = Corpus::default();
    if let Some(p) = &videos_path {
        corpus.videos = read_jsonl(p)?;
        let mut seen = BTreeSet::new();
        for (i, v) in corpus.videos.iter().enumerate() {
            let line = i + 1;
            if v.video_id.is_empty() {
                return Err(schema(p, line, "video_id", "must be non-empty"));
            }
            if !seen.insert(v.video_id.as_str()) {
                return Err(schema(p, line, "video_id", format!("duplicate id {}", v.video_id)));
            }
            for &(s, e) in &v.clips {
                if s >= e || s < 0.0 || v.duration_s.is_some_and(|d| e > d) {
                    return Err(schema(p, line, "clips", format!("invalid span ({s}, {e})")));
                }
            }
            for &(s, e) in &v.clip_frames {
                if s >= e || e > v.frame_count {
                    return Err(schema(
                        p,
                        line,
                        "clip_frames",
                        format!("range [{s},{e}) outside {} frames", v.frame_count),
                    ));
                }
            }
        }
    }
    if let Some(p) = &captions_path {
        corpus.captions = read_jsonl(p)?;
        let mut seen = BTreeSet::new();
        for (i, c) in corpus.captions.iter().enumerate() {
            if c.sentences.is_empty() {
                return Err(schema(p, i + 1, "sentences", "caption needs at least one sentence"));
            }
            if !seen.insert(c.key()) {
                return Err(schema(p, i + 1, "model_id", format!("duplicate caption {}", c.key())));
            }
            if let Some(clips) = &c.clip_indices {
                if clips.len() != c.sentences.len() {
                    return Err(schema(p, i + 1, "clips", "one clip index per sentence"));
                }
            }
        }
    }
    if let Some(p) = &annotations_path {
        corpus.annotations = read_jsonl(p)?;
    }
    if let Some(p) = &triples_path {
        corpus.triples = read_jsonl(p)?;
    }

    let video_ids: BTreeSet<&str> = corpus.videos.iter().map(|v| v.video_id.as_str()).collect();
    let captions: BTreeMap<CaptionKey, usize> = corpus
        .captions
        .iter()
        .enumerate()
        .map(|(i, c)| (c.key(), i))
        .collect();

    let mut missing = BTreeSet::new();
    if videos_path.is_some() {
        for c in &corpus.captions {
            if !video_ids.contains(c.video_id.as_str()) {
                missing.insert(format!("video {}", c.video_id));
            }
        }
    }
    for (i, a) in corpus.annotations.iter().enumerate() {
        match captions.get(&a.key()) {
            None => {
                missing.insert(format!("caption {}", a.key()));
            }
            Some(&ci) => {
                if let Err(errs) = validate_annotation(a, &corpus.captions[ci]) {
                    let first = &errs[0];
                    return Err(schema(
                        annotations_path.as_deref().unwrap_or(manifest_path),
                        i + 1,
                        &first.field,
                        first.message.clone(),
                    ));
                }
            }
        }
    }
    for (i, t) in corpus.triples.iter().enumerate() {
        let p = triples_path.as_deref().unwrap_or(manifest_path);
        if t.positive == t.negative {
            return Err(schema(p, i + 1, "negative", "identical to positive"));
        }
        match corpus.video(&t.video_id) {
            None if videos_path.is_some() => {
                missing.insert(format!("video {}", t.video_id));
            }
            Some(v) => {
                if let Some(ci) = t.clip_index {
                    if !v.clip_frames.is_empty() && ci >= v.clip_frames.len() {
                        return Err(schema(p, i + 1, "clip_index", format!("no clip {ci}")));
                    }
                }
            }
            None => {}
        }
    }
    if !missing.is_empty() {
        return Err(Error::DanglingReference {
            missing: missing.into_iter().collect(),
        });
    }
    Ok(corpus)
}

/// Write every non-empty section of the corpus next to a new manifest.
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = Manifest::default();
    if !corpus.videos.is_empty() {
        write_jsonl(&dir.join("videos.jsonl"), &corpus.videos)?;
        manifest.videos = Some("videos.jsonl".into());
    }
    if !corpus.captions.is_empty() {
        write_jsonl(&dir.join("captions.jsonl"), &corpus.captions)?;
        manifest.captions = Some("captions.jsonl".into());
    }
    if !corpus.annotations.is_empty() {
        write_jsonl(&dir.join("annotations.jsonl"), &corpus.annotations)?;
        manifest.annotations = Some("annotations.jsonl".into());
    }
    if !corpus.triples.is_empty() {
        write_jsonl(&dir.join("triples.jsonl"), &corpus.triples)?;
        manifest.triples = Some("triples.jsonl".into());
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
