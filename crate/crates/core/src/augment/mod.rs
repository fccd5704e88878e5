//! Meaning-preserving rewrites, factuality-breaking corruptions, and the
//! triple generator built from them.

mod generate;
mod lexicon;
mod paraphrase;
mod simplify;
mod tag;
mod transforms;

pub use generate::{
    derive_seed, generate_triples, split_by_video, standard_negatives, standard_positives, triples_for_sentence,
    validation_count, Corruption, Paraphrase, Simplify, Transform,
};
pub use lexicon::{ing_form, is_stopword, past_form, s_form, Lexicons, STOPWORDS};
pub use paraphrase::{
    paraphrase, HttpTranslator, HttpTranslatorConfig, RoundTrip, StubTranslator, Translator, MT_KEY_VAR, MT_URL_VAR,
    SOURCE_LANG,
};
pub use simplify::simplify;
pub use tag::{Family, TransformTag};
pub use transforms::{
    action_swap, adjective_swap, match_case, object_swap, person_swap, poor_generation, ActionMode, PoorMode, UNK,
};
