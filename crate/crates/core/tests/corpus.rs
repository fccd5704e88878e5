//! Loading, validating and summarizing the on-disk fixture corpus.

use std::fs;
use std::path::{Path, PathBuf};

use factvc_core::analysis::{aggregate_corpus, agreement, typology, ErrorCategory};
use factvc_core::augment::Lexicons;
use factvc_core::corpus::{corpus_stats, load_corpus, save_corpus, CaptionKey};
use factvc_core::Error;

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini/manifest.json")
}

/// Copy the fixture into a temp dir, letting `edit` rewrite one file.
fn edited(file: &str, edit: impl Fn(String) -> String) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let src = mini().parent().unwrap().to_path_buf();
    for entry in fs::read_dir(&src).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        let mut text = fs::read_to_string(entry.path()).unwrap();
        if name == file {
            text = edit(text);
        }
        fs::write(dir.path().join(&name), text).unwrap();
    }
    let manifest = dir.path().join("manifest.json");
    (dir, manifest)
}

#[test]
fn loads_every_section() {
    let c = load_corpus(&mini()).unwrap();
    assert_eq!(c.videos.len(), 2);
    assert_eq!(c.captions.len(), 6);
    assert_eq!(c.annotations.len(), 12);
    assert_eq!(c.video("v_darts").unwrap().frame_range(Some(1)), 3..6);
    assert_eq!(c.video("v_dog").unwrap().frame_range(Some(0)), 0..4);
    let human = c.caption(&CaptionKey::new("v_darts", "human1")).unwrap();
    assert_eq!(human.clip_of(1), Some(1));
    assert_eq!(human.sentences[0].tokens.last().map(String::as_str), Some("."));
}

#[test]
fn save_then_load_is_identical() {
    let c = load_corpus(&mini()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = save_corpus(&c, dir.path()).unwrap();
    assert_eq!(load_corpus(&manifest).unwrap(), c);
}

#[test]
fn gold_statistics() {
    let mut c = load_corpus(&mini()).unwrap();
    c.gold = aggregate_corpus(&c).unwrap();
    assert_eq!(c.gold.len(), 4);
    let mart = &c.gold[&CaptionKey::new("v_darts", "mart")];
    assert_eq!(mart.paragraph_score, 2);
    assert_eq!(mart.sentence_labels, [false, false]);
    let dog = &c.gold[&CaptionKey::new("v_dog", "vtrans")];
    assert_eq!(dog.paragraph_score, 2);
    assert_eq!(dog.word_flags[0], [true, false, false, true, true, true, true, true]);

    let s = corpus_stats(&c).unwrap();
    assert_eq!((s.paragraph_count, s.sentence_count, s.word_count), (4, 6, 36));
    assert_eq!((s.paragraphs_with_errors, s.sentences_with_errors, s.words_with_errors), (3, 4, 6));
    assert_eq!(s.pct_paragraphs_with_errors, 75.0);
    assert_eq!(s.pct_sentences_with_errors, 400.0 / 6.0);
    assert_eq!(s.pct_words_with_errors, 600.0 / 36.0);
}

#[test]
fn agreement_and_typology_on_fixture() {
    let mut c = load_corpus(&mini()).unwrap();
    let a = agreement(&c).unwrap();
    for alpha in [a.alpha_paragraph, a.alpha_sentence, a.alpha_word] {
        assert!(alpha.is_finite() && alpha <= 1.0, "{alpha}");
    }
    assert_eq!(a.sentence_units, 6);
    c.gold = aggregate_corpus(&c).unwrap();
    let t = typology(&c, &Lexicons::builtin()).unwrap();
    assert_eq!(t.total, 4);
    assert_eq!(t.counts[&ErrorCategory::Person], 2);
    assert_eq!(t.counts[&ErrorCategory::Adjective], 1);
}

#[test]
fn stats_need_gold() {
    let c = load_corpus(&mini()).unwrap();
    assert!(matches!(corpus_stats(&c), Err(Error::NoGold)));
}

#[test]
fn malformed_line_names_file_line_and_field() {
    let (_dir, manifest) = edited("annotations.jsonl", |t| t.replacen("\"paragraph_score\":2", "\"paragraph_score\":\"two\"", 1));
    match load_corpus(&manifest).unwrap_err() {
        Error::Schema { file, line, field, .. } => {
            assert!(file.ends_with("annotations.jsonl"));
            assert_eq!(line, 1);
            assert_eq!(field, "paragraph_score");
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn out_of_range_score_is_a_schema_error() {
    let (_dir, manifest) = edited("annotations.jsonl", |t| t.replacen("\"paragraph_score\":4", "\"paragraph_score\":6", 1));
    match load_corpus(&manifest).unwrap_err() {
        Error::Schema { line, field, .. } => assert_eq!((line, field.as_str()), (4, "paragraph_score")),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn dangling_caption_reference() {
    let (_dir, manifest) = edited("captions.jsonl", |t| t.replace("\"v_dog\"", "\"v_cat\""));
    match load_corpus(&manifest).unwrap_err() {
        Error::DanglingReference { missing } => {
            assert!(missing.contains(&"video v_cat".to_string()), "{missing:?}");
            assert!(missing.iter().any(|m| m.starts_with("caption v_dog/")), "{missing:?}");
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn missing_manifest_is_an_io_error() {
    assert!(matches!(load_corpus(Path::new("/nonexistent/manifest.json")), Err(Error::Io { .. })));
}
