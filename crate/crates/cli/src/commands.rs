//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use factvc_annotate::{serve_blocking, AnnotationService, Protocol, ServiceConfig};
use factvc_core::analysis::{aggregate_corpus, agreement, correlate, system_ranking, typology};
use factvc_core::augment::{
    generate_triples, standard_negatives, standard_positives, HttpTranslator, HttpTranslatorConfig, Lexicons,
    StubTranslator, Translator,
};
use factvc_core::corpus::{
    corpus_stats, load_corpus, read_jsonl, write_jsonl, AnnotationRecord, CaptionDoc, Corpus, TripleRecord, VideoRef,
};
use factvc_core::embedstore::{read_checkpoint, write_fvce, EmbeddingStore, EncodeKind, EncoderClient, EncoderConfig};
use factvc_core::scoring::{
    foil_accuracy, ParagraphScore, ReferenceText, References, RefMode, ScoreConfig, ScoreReport, Scorer, TextFeatures,
    VideoFeatures,
};
use factvc_core::trainer::{resolve_triples, save_trained, split_samples, train, LossConfig, TrainingMeta};
use factvc_core::{Error, Weights64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::{
    AgreementArgs, EvalCorrArgs, FinetuneArgs, FoilArgs, GenDataArgs, RankArgs, ScoreArgs, ScoringArgs, ServeArgs,
    StatsArgs,
};

pub type Outcome = Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// Write `text` to `path`, or to standard output when there is none.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn jsonl<T: Serialize>(records: &[T]) -> Result<String, serde_json::Error> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Machine JSON to `--out` with the text table on standard output, or the
/// JSON alone on standard output.
fn report<T: Serialize>(out: Option<&Path>, value: &T, table: &str) -> Outcome {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    emit(out, &json)?;
    if out.is_some() {
        print!("{table}");
    }
    Ok(())
}

fn lexicons(dir: Option<&Path>) -> Result<Lexicons, Error> {
    dir.map_or_else(|| Ok(Lexicons::builtin()), Lexicons::load)
}

/// Load a corpus and aggregate its raw annotations when it has no gold yet.
fn gold_corpus(manifest: &Path) -> Result<Corpus, Error> {
    let mut corpus = load_corpus(manifest)?;
    if corpus.gold.is_empty() && !corpus.annotations.is_empty() {
        corpus.gold = aggregate_corpus(&corpus)?;
    }
    Ok(corpus)
}

pub fn gen_data(args: &GenDataArgs, seed: u64) -> Outcome {
    let corpus = load_corpus(&args.corpus)?;
    let lex = Arc::new(lexicons(args.lexicons.as_deref())?);
    let pivots: Vec<&str> = if args.no_paraphrase { Vec::new() } else { args.pivot.iter().map(String::as_str).collect() };
    let translator: Arc<dyn Translator> = match (&args.mt_stub, pivots.is_empty()) {
        (_, true) => Arc::new(StubTranslator::identity()),
        (Some(p), false) => Arc::new(StubTranslator::load(p)?),
        (None, false) => Arc::new(HttpTranslator::new(HttpTranslatorConfig::from_env().map_err(|e| {
            Error::Invalid(format!("{e}; pass --mt-stub FILE or --no-paraphrase to run without a translation service"))
        })?)),
    };
    let positives = standard_positives(translator, &pivots, lex.clone());
    let negatives = standard_negatives(lex);
    let triples = generate_triples(&corpus, &positives, &negatives, seed);
    if triples.is_empty() {
        return Err(Error::Empty("no triples generated; the corpus has no usable human captions".into()).into());
    }
    write_jsonl(&args.out, &triples)?;
    log::info!("wrote {} triples to {}", triples.len(), args.out.display());
    if let (Some(url), Some(dir)) = (&args.encoder, &args.embeds) {
        let store = EmbeddingStore::new(dir);
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let client = EncoderClient::new(EncoderConfig::new(url.as_str()));
        for positive in [true, false] {
            let items: Vec<String> = triples
                .iter()
                .map(|t| if positive { t.positive.clone() } else { t.negative.clone() })
                .collect();
            let m = client.encode(EncodeKind::Sentence, &items)?;
            write_fvce(&m, &store.triples_path(positive))?;
        }
        log::info!("encoded triple sentences into {}", dir.display());
    }
    Ok(())
}

pub fn finetune(args: &FinetuneArgs, seed: u64) -> Outcome {
    let triples: Vec<TripleRecord> = read_jsonl(&args.triples)?;
    let store = EmbeddingStore::new(&args.embeds);
    let videos: Option<Vec<VideoRef>> = args.corpus.as_deref().map(load_corpus).transpose()?.map(|c| c.videos);
    let samples = resolve_triples::<f64>(&triples, &store, videos.as_deref(), args.frames_per_clip)?;
    let (train_set, val_set) = split_samples(samples);
    if train_set.is_empty() {
        return Err(Error::Empty(format!("no training triples in {}", args.triples.display())).into());
    }
    let init: Weights64 = match &args.init {
        Some(p) => read_checkpoint(p)?,
        None => {
            let (dv, dt) = (train_set[0].frames.cols(), train_set[0].positive.len());
            if dv != dt {
                return Err(Error::Invalid(format!(
                    "frame features have {dv} dims and text features {dt}; identity projections need equal dims, pass --init"
                ))
                .into());
            }
            Weights64::identity(dv)
        }
    };
    let config = LossConfig {
        margin: args.margin,
        lambda: args.lambda,
        batch_size: args.batch,
        learning_rate: args.lr,
        epochs: args.epochs,
        ce_form: args.ce_form,
        temperature: args.temperature,
        seed,
        frames_per_clip: args.frames_per_clip,
    };
    let mut sink: Box<dyn Write> = match &args.metrics {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Error::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    let outcome = train(&train_set, &val_set, init, &config, |m| {
        let line = serde_json::to_string(m).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(sink, "{line}").map_err(|e| Error::io(args.metrics.as_deref().unwrap_or(Path::new("<stdout>")), e))
    })?;
    sink.flush()?;
    let meta = TrainingMeta {
        config,
        train_triples: train_set.len(),
        val_triples: val_set.len(),
        epochs: outcome.epochs.clone(),
    };
    save_trained(&outcome, &meta, &args.out)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

/// Everything needed to score the captions of one file.
struct ScoringContext {
    scorer: Scorer,
    store: EmbeddingStore,
    videos: BTreeMap<String, VideoFeatures>,
    references: BTreeMap<String, Vec<(String, ReferenceText)>>,
}

fn caption_features(store: &EmbeddingStore, caption: &CaptionDoc) -> Result<Vec<TextFeatures>, Error> {
    (0..caption.sentences.len())
        .map(|i| {
            let sentence = store.sentence(&caption.video_id, &caption.model_id, i)?;
            let tokens = store.tokens(&caption.video_id, &caption.model_id, i)?;
            Ok(TextFeatures {
                sentence: sentence.to_matrix::<f64>().row(0).to_vec(),
                tokens: tokens.to_matrix::<f64>(),
            })
        })
        .collect()
}

impl ScoringContext {
    fn new(args: &ScoringArgs, captions: &[CaptionDoc]) -> Result<Self, Error> {
        let config = ScoreConfig {
            alpha: args.alpha,
            mode: args.mode,
            fine_aggregation: args.fine.into(),
            multi_ref_policy: args.multi_ref.into(),
            clip_restriction: args.clip_restriction,
            ..ScoreConfig::default()
        };
        let scorer = Scorer::new(config, read_checkpoint(&args.ckpt)?)?;
        let store = EmbeddingStore::new(&args.embeds);
        let clip_frames: BTreeMap<String, Vec<(usize, usize)>> = match &args.corpus {
            Some(m) => load_corpus(m)?.videos.into_iter().map(|v| (v.video_id, v.clip_frames)).collect(),
            None => BTreeMap::new(),
        };
        let mut videos = BTreeMap::new();
        let mut references: BTreeMap<String, Vec<(String, ReferenceText)>> = BTreeMap::new();
        let needs_video = matches!(args.mode, RefMode::VideoRef | RefMode::VideoTextRef);
        let needs_text = matches!(args.mode, RefMode::TextRef | RefMode::VideoTextRef);
        for c in captions {
            if needs_video && !videos.contains_key(&c.video_id) {
                let mut v = VideoFeatures::new(store.frames(&c.video_id)?.to_matrix::<f64>());
                v.clip_frames = clip_frames.get(&c.video_id).cloned().unwrap_or_default();
                videos.insert(c.video_id.clone(), v);
            }
            if needs_text && c.is_human() {
                let text = ReferenceText::from_sentences(&caption_features(&store, c)?)?;
                references.entry(c.video_id.clone()).or_default().push((c.model_id.clone(), text));
            }
        }
        Ok(Self { scorer, store, videos, references })
    }

    fn score(&self, caption: &CaptionDoc) -> Result<ParagraphScore, Error> {
        let texts: Vec<ReferenceText> = self
            .references
            .get(&caption.video_id)
            .into_iter()
            .flatten()
            .filter(|(model, _)| *model != caption.model_id)
            .map(|(_, t)| t.clone())
            .collect();
        let refs = References { video: self.videos.get(&caption.video_id), texts: &texts };
        let sentences = caption_features(&self.store, caption)?;
        self.scorer
            .score_paragraph(&sentences, caption.clip_indices.as_deref(), &refs)
            .map_err(|e| Error::Invalid(format!("{}: {e}", caption.key())))
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build()
}

pub fn score(args: &ScoreArgs, threads: usize) -> Outcome {
    let captions: Vec<CaptionDoc> = read_jsonl(&args.scoring.captions)?;
    let ctx = ScoringContext::new(&args.scoring, &captions)?;
    let candidates: Vec<&CaptionDoc> = captions.iter().filter(|c| !c.is_human()).collect();
    if candidates.is_empty() {
        return Err(Error::Empty(format!("no model captions in {}", args.scoring.captions.display())).into());
    }
    let reports = pool(threads)?.install(|| {
        candidates
            .par_iter()
            .map(|c| ctx.score(c).map(|s| ScoreReport::new(&c.video_id, &c.model_id, ctx.scorer.config(), &s)))
            .collect::<Result<Vec<_>, Error>>()
    })?;
    emit(args.out.as_deref(), &jsonl(&reports)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoilPair {
    video_id: String,
    correct: String,
    foil: String,
}

#[derive(Debug, Serialize)]
struct FoilResult {
    mode: RefMode,
    alpha: f64,
    pairs: usize,
    accuracy: f64,
}

pub fn foil(args: &FoilArgs, threads: usize) -> Outcome {
    let captions: Vec<CaptionDoc> = read_jsonl(&args.scoring.captions)?;
    let pairs: Vec<FoilPair> = read_jsonl(&args.pairs)?;
    let ctx = ScoringContext::new(&args.scoring, &captions)?;
    let index: BTreeMap<_, &CaptionDoc> = captions.iter().map(|c| (c.key(), c)).collect();
    let lookup = |video: &str, model: &str| {
        let key = factvc_core::corpus::CaptionKey::new(video, model);
        index.get(&key).copied().ok_or(Error::DanglingReference { missing: vec![key.to_string()] })
    };
    let resolved = pairs
        .iter()
        .map(|p| Ok((lookup(&p.video_id, &p.correct)?, lookup(&p.video_id, &p.foil)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let scores = pool(threads)?.install(|| {
        resolved
            .par_iter()
            .map(|(a, b)| Ok((ctx.score(a)?.paragraph, ctx.score(b)?.paragraph)))
            .collect::<Result<Vec<(f64, f64)>, Error>>()
    })?;
    let accuracy = foil_accuracy(&scores, |&s| Ok(s))?;
    let result = FoilResult { mode: args.scoring.mode, alpha: args.scoring.alpha, pairs: scores.len(), accuracy };
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&result)? + "\n"))
}

/// Score files keyed by file stem, in argument order.
fn load_scores(paths: &[PathBuf]) -> Result<Vec<(String, Vec<ScoreReport>)>, Error> {
    paths
        .iter()
        .map(|p| {
            let name = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            Ok((name, read_jsonl(p)?))
        })
        .collect()
}

pub fn eval_corr(args: &EvalCorrArgs) -> Outcome {
    let corpus = gold_corpus(&args.gold)?;
    if corpus.gold.is_empty() {
        return Err(Error::NoGold.into());
    }
    let result = correlate(&corpus.gold, &load_scores(&args.scores)?)?;
    report(args.out.as_deref(), &result, &result.to_table())
}

pub fn agreement_cmd(args: &AgreementArgs) -> Outcome {
    let corpus = match (&args.corpus, &args.raw) {
        (Some(m), _) => load_corpus(m)?,
        (None, Some(raw)) => {
            let captions = args
                .captions
                .clone()
                .unwrap_or_else(|| raw.parent().unwrap_or(Path::new(".")).join("captions.jsonl"));
            Corpus {
                captions: read_jsonl(&captions)?,
                annotations: read_jsonl::<AnnotationRecord>(raw)?,
                ..Corpus::default()
            }
        }
        (None, None) => unreachable!("clap requires --raw or --corpus"),
    };
    let result = agreement(&corpus)?;
    report(args.out.as_deref(), &result, &result.to_table())
}

#[derive(Serialize)]
struct RankEntry<'a> {
    metric: &'a str,
    #[serde(flatten)]
    report: factvc_core::analysis::RankingReport,
}

pub fn rank(args: &RankArgs) -> Outcome {
    let corpus = gold_corpus(&args.gold)?;
    if corpus.gold.is_empty() {
        return Err(Error::NoGold.into());
    }
    let mut entries = Vec::new();
    let mut table = String::new();
    let scores = load_scores(&args.scores)?;
    for (name, reports) in &scores {
        let r = system_ranking(reports, &corpus.gold)?;
        table.push_str(&format!("{name}\n{}\n", r.to_table()));
        entries.push(RankEntry { metric: name, report: r });
    }
    report(args.out.as_deref(), &entries, &table)
}

#[derive(Serialize)]
struct StatsReport {
    stats: factvc_core::corpus::CorpusStats,
    typology: factvc_core::analysis::TypologyReport,
}

pub fn stats(args: &StatsArgs) -> Outcome {
    let corpus = gold_corpus(&args.corpus)?;
    let lex = lexicons(args.lexicons.as_deref())?;
    let result = StatsReport { stats: corpus_stats(&corpus)?, typology: typology(&corpus, &lex)? };
    let s = &result.stats;
    let table = factvc_core::analysis::text_table(
        &["level", "count", "with errors", "share"],
        &[
            ("paragraph", s.paragraph_count, s.paragraphs_with_errors, s.pct_paragraphs_with_errors),
            ("sentence", s.sentence_count, s.sentences_with_errors, s.pct_sentences_with_errors),
            ("word", s.word_count, s.words_with_errors, s.pct_words_with_errors),
        ]
        .map(|(l, n, e, p)| vec![l.to_string(), n.to_string(), e.to_string(), format!("{p:.1}%")]),
    ) + &result.typology.to_table();
    report(args.out.as_deref(), &result, &table)
}

pub fn serve(args: &ServeArgs, seed: u64) -> Outcome {
    let corpus = load_corpus(&args.corpus)?;
    let protocol = match &args.protocol {
        Some(p) => Protocol::load(p)?,
        None => Protocol::builtin(),
    };
    let config = ServiceConfig {
        annotators_per_caption: args.annotators_per_caption,
        seed,
        protocol,
        ..ServiceConfig::new(args.annotators.clone())
    };
    fs::create_dir_all(&args.store).map_err(|e| Error::io(&args.store, e))?;
    let service = AnnotationService::open(&corpus, &args.store, config)?;
    serve_blocking(service, SocketAddr::new(args.host, args.port))?;
    Ok(())
}
