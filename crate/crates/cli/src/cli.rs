//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use factvc_core::scoring::{FineAggregation, MultiRefPolicy, RefMode};
use factvc_core::trainer::CeForm;

#[derive(Debug, Parser)]
#[command(name = "factvc", version, about = "Factuality evaluation for video captions")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for scoring; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    pub log_level: log::LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate (video, positive, negative) training triples from human captions.
    GenData(GenDataArgs),
    /// Finetune the projection layers on training triples.
    Finetune(FinetuneArgs),
    /// Score candidate captions.
    Score(ScoreArgs),
    /// Correlate metric scores with aggregated human judgments.
    EvalCorr(EvalCorrArgs),
    /// Inter-annotator agreement at paragraph, sentence and word level.
    Agreement(AgreementArgs),
    /// Compare the model ranking of a metric with the human ranking.
    Rank(RankArgs),
    /// Corpus size, error rates and error typology.
    Stats(StatsArgs),
    /// Run the annotation service.
    Serve(ServeArgs),
    /// Pairwise ranking accuracy on correct/foil caption pairs.
    Foil(FoilArgs),
}

fn alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("alpha must lie in [0, 1], got {v}"))
    }
}

fn mode(s: &str) -> Result<RefMode, String> {
    s.parse().map_err(|e: factvc_core::Error| e.to_string())
}

fn ce_form(s: &str) -> Result<CeForm, String> {
    s.parse().map_err(|e: factvc_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FineArg {
    Precision,
    FValue,
}

impl From<FineArg> for FineAggregation {
    fn from(f: FineArg) -> Self {
        match f {
            FineArg::Precision => FineAggregation::Precision,
            FineArg::FValue => FineAggregation::FValue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiRefArg {
    Max,
    Mean,
}

impl From<MultiRefArg> for MultiRefPolicy {
    fn from(m: MultiRefArg) -> Self {
        match m {
            MultiRefArg::Max => MultiRefPolicy::Max,
            MultiRefArg::Mean => MultiRefPolicy::Mean,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Corpus manifest; every sentence of every human caption is augmented.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Pivot languages for back-translation paraphrases.
    #[arg(long, value_delimiter = ',', default_value = "de,fr")]
    pub pivot: Vec<String>,
    /// Skip back-translation paraphrases.
    #[arg(long)]
    pub no_paraphrase: bool,
    /// Canned round trips (JSONL of {text, pivot, paraphrase}) used instead of
    /// the translation service named by FACTVC_MT_URL.
    #[arg(long)]
    pub mt_stub: Option<PathBuf>,
    /// Directory of lexicon files replacing the built-in lists.
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Encoder service used to write triples.pos.fvce and triples.neg.fvce.
    #[arg(long, requires = "embeds")]
    pub encoder: Option<String>,
    /// Embedding store receiving the encoded triples.
    #[arg(long, requires = "encoder")]
    pub embeds: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FinetuneArgs {
    #[arg(long)]
    pub triples: PathBuf,
    #[arg(long)]
    pub embeds: PathBuf,
    /// Corpus manifest giving per-clip frame ranges; without it every
    /// sample uses the whole video.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Initial checkpoint; identity projections when omitted.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long, default_value_t = 256)]
    pub batch: usize,
    #[arg(long, default_value_t = 5e-5)]
    pub lr: f64,
    #[arg(long, default_value_t = 3)]
    pub epochs: usize,
    /// log (log-softmax cross-entropy) or literal.
    #[arg(long, default_value = "log", value_parser = ce_form)]
    pub ce_form: CeForm,
    /// Softmax temperature of the log form.
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 3)]
    pub frames_per_clip: usize,
    /// Per-epoch metrics as JSONL; standard output when omitted.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    #[arg(long)]
    pub embeds: PathBuf,
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Captions JSONL; model captions are scored, human* captions are references.
    #[arg(long)]
    pub captions: PathBuf,
    /// Corpus manifest giving clip frame ranges.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// v (video), t (human text) or vt (both).
    #[arg(long, default_value = "vt", value_parser = mode)]
    pub mode: RefMode,
    #[arg(long, default_value_t = 0.75, value_parser = alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = FineArg::Precision)]
    pub fine: FineArg,
    #[arg(long, value_enum, default_value_t = MultiRefArg::Max)]
    pub multi_ref: MultiRefArg,
    /// Score each sentence against its own clip's frames.
    #[arg(long)]
    pub clip_restriction: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Score report JSONL; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FoilArgs {
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// JSONL of {video_id, correct, foil} naming two model ids each.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalCorrArgs {
    /// Corpus manifest with raw annotations.
    #[arg(long)]
    pub gold: PathBuf,
    /// Score report files; each file's stem names the metric.
    #[arg(long, value_delimiter = ',', required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// Raw annotations JSONL.
    #[arg(long, required_unless_present = "corpus")]
    pub raw: Option<PathBuf>,
    /// Captions JSONL the annotations refer to; defaults to captions.jsonl
    /// next to the raw file.
    #[arg(long)]
    pub captions: Option<PathBuf>,
    /// Corpus manifest, as an alternative to --raw and --captions.
    #[arg(long, conflicts_with_all = ["raw", "captions"])]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub scores: Vec<PathBuf>,
    /// Corpus manifest with raw annotations.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory holding the assignment and annotation logs.
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Annotator ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub annotators: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub annotators_per_caption: usize,
    /// Protocol JSON replacing the built-in instructions.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
}
