//! Data model, tokenizer, JSONL persistence and corpus statistics.

mod io;
mod model;
mod stats;
mod tokenize;

pub use io::{append_jsonl, load_corpus, read_json, read_jsonl, save_corpus, write_jsonl, Manifest};
pub use model::{
    validate_annotation, AnnotationRecord, CaptionDoc, CaptionKey, Corpus, FieldError,
    GoldAnnotation, SentenceLabel, SentenceText, TripleRecord, VideoRef,
};
pub use stats::{corpus_stats, CorpusStats};
pub use tokenize::{detokenize, is_word, tokenize};
