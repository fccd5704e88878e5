//! FactVC scoring: coarse video–sentence similarity, fine token–frame
//! precision, their α-blend, paragraph aggregation and FOIL ranking.

mod config;
mod factvc;
mod similarity;

pub use config::{FineAggregation, MultiRefPolicy, ParagraphPolicy, RefMode, ScoreConfig, DEFAULT_ALPHA};
pub use factvc::{
    factvc_paragraph, factvc_sentence, foil_accuracy, ParagraphScore, ReferenceText, References, ScoreBreakdown,
    ScoreReport, Scorer, TextFeatures, VideoFeatures,
};
pub use similarity::{blend, coarse_score, fine_f_value_score, fine_precision_score, fine_recall_score};
