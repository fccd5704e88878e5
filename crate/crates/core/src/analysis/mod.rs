//! Aggregating annotations, agreement, correlation with human judgments,
//! system ranking and error typology, with text-table rendering.

mod aggregate;
mod agreement;
mod correlation;
mod ranking;
mod table;
mod typology;

pub use aggregate::{aggregate, aggregate_corpus, aggregate_paragraph, majority};
pub use agreement::{agreement, krippendorff_alpha_interval, AgreementReport};
pub use correlation::{correlate, pearson, CorrelationReport, CorrelationRow};
pub use ranking::{descending_ranks, kendall_tau_b, system_ranking, ModelRank, RankingReport};
pub use table::text_table;
pub use typology::{classify_error_span, gold_error_spans, typology, ErrorCategory, TypologyReport};
