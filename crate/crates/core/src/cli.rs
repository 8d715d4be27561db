//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::augment::{self, EntityAnnotation};
use crate::config::{beside, PipelineConfig};
use crate::eval::{self, EvalPair, EvalReport};
use crate::ingest::{self, Composition, CorpusSource, SourceFormat};
use crate::labels::{Dataset, LabelSet, Language, Split};
use crate::model;
use crate::normalize::{normalize, Placeholders};
use crate::silver::{self, TranslationRecord};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nordlid", version, about = "Scandinavian multi-label language identification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a labeled JSONL dataset from CoNLL-U, JSONL or plain-text corpora.
    Ingest(IngestArgs),
    /// Replace URLs, e-mails and numbers with placeholders and lowercase.
    Normalize(NormalizeArgs),
    /// Augment a training set.
    #[command(subcommand)]
    Augment(AugmentCommand),
    /// Add labels for languages whose translation leaves the text unchanged.
    SilverLabel(SilverArgs),
    /// Train a model.
    Train(TrainArgs),
    /// Label sentences, one per line, as `text<TAB>labels`.
    Predict(PredictArgs),
    /// Score predictions (or a model) against gold labels.
    Evaluate(EvaluateArgs),
    /// Measure batch-size-one prediction latency.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `FORMAT:LABELS:PATH`, e.g. `conllu:nb:UD_Norwegian-Bokmaal/no_bokmaal-ud-train.conllu`.
    /// LABELS may be empty for jsonl sources. Repeatable.
    #[arg(long = "source", value_name = "FORMAT:LABELS:PATH")]
    pub sources: Vec<String>,
    /// Number of sentences to sample from the pooled `other` sources.
    #[arg(long)]
    pub other_sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drop repeated texts.
    #[arg(long)]
    pub dedup: bool,
    #[arg(long, default_value = "train")]
    pub split: Split,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Only print label statistics of an existing JSONL dataset.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["sources", "output"])]
    pub stats_of: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Treat the input as plain text, one sentence per line.
    #[arg(long)]
    pub text: bool,
    #[arg(long)]
    pub no_urls: bool,
    #[arg(long)]
    pub no_emails: bool,
    #[arg(long)]
    pub no_numbers: bool,
    #[arg(long)]
    pub no_lowercase: bool,
    /// Write `<URL>`, `<mail>`, `<num>` instead of the angle-bracket glyphs.
    #[arg(long)]
    pub ascii_placeholders: bool,
}

#[derive(Debug, Subcommand)]
pub enum AugmentCommand {
    /// Add a random leading or trailing punctuation mark to some sentences.
    Punct(PunctArgs),
    /// Keep sentences containing given letters and label them.
    Alphabet(AlphabetArgs),
    /// Swap annotated named entities within their category.
    Ner(NerArgs),
}

#[derive(Debug, Args)]
pub struct PunctArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub space_prob: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Split of the input; validation and test are refused.
    #[arg(long, default_value = "train")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct AlphabetArgs {
    /// Plain text (one sentence per line), `.conllu` or `.jsonl`.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Letters to look for, e.g. `äö`.
    #[arg(long)]
    pub letters: String,
    /// Labels for the kept sentences, e.g. `nb`.
    #[arg(long)]
    pub labels: LabelSet,
}

#[derive(Debug, Args)]
pub struct NerArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSONL records `{sentence_index, start, end, category, surface}`.
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "train")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct SilverArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSONL records `{item_index, target, translation}`.
    #[arg(long, conflicts_with = "translator_cmd")]
    pub translations: Option<PathBuf>,
    /// Shell command reading `target<TAB>text` on stdin, writing the translation.
    #[arg(long)]
    pub translator_cmd: Option<String>,
    /// Target languages for the translator command.
    #[arg(long, default_value = "da,nb,nn,sv")]
    pub targets: LabelSet,
    /// Where to store translations produced by the command.
    #[arg(long)]
    pub save_translations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub valid: Option<PathBuf>,
    #[arg(long, short)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    /// Input file; standard input when omitted.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write JSONL `{text, labels, top1, probs}` instead of TSV.
    #[arg(long)]
    pub jsonl: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// Predictions as JSONL `{text, labels, top1?}`, aligned with gold by line.
    #[arg(long, required_unless_present = "model", conflicts_with = "model")]
    pub pred: Option<PathBuf>,
    /// Predict with this model instead of reading predictions.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = ["json", "table"])]
    pub format: String,
    /// With --model: also time predictions over this many runs.
    #[arg(long)]
    pub bench_runs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, short)]
    pub model: PathBuf,
    /// Plain text (one sentence per line) or `.jsonl` dataset.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = eval::DEFAULT_RUNS)]
    pub runs: usize,
    /// Skip sentences longer than this many characters.
    #[arg(long, default_value_t = 200)]
    pub max_chars: usize,
}

/// Parse `argv` (including the program name) and run.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult = Result<(), Failure>;

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Augment(a) => cmd_augment(a),
        Command::SilverLabel(a) => cmd_silver(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn parse_source(spec: &str) -> Result<CorpusSource, Failure> {
    let mut parts = spec.splitn(3, ':');
    let (Some(fmt), Some(labels), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Failure::Usage(format!(
            "--source expects FORMAT:LABELS:PATH, got `{spec}`"
        )));
    };
    let format: SourceFormat = fmt.parse().map_err(Failure::Usage)?;
    let labels = if labels.is_empty() {
        None
    } else {
        Some(labels.parse::<LabelSet>().map_err(|e| Failure::Usage(e.to_string()))?)
    };
    Ok(CorpusSource::new(path, format, labels))
}

fn write_json_beside<T: Serialize>(value: &T, output: &Path) -> Result<(), Error> {
    let path = beside(output, "config.json");
    let text = serde_json::to_string_pretty(value).expect("serializes") + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[derive(Serialize)]
struct IngestRun<'a> {
    composition: &'a Composition,
    seed: u64,
}

fn cmd_ingest(a: IngestArgs) -> CliResult {
    if let Some(path) = a.stats_of {
        let d = ingest::read_dataset(&path, Split::Unsplit)?;
        println!("{}", serde_json::to_string_pretty(&ingest::dataset_stats(&d).to_json()).unwrap());
        return Ok(());
    }
    let output = a
        .output
        .ok_or_else(|| Failure::Usage("--output is required".into()))?;
    if a.sources.is_empty() {
        return Err(Failure::Usage("at least one --source is required".into()));
    }
    let sources = a
        .sources
        .iter()
        .map(|s| parse_source(s))
        .collect::<Result<Vec<_>, _>>()?;
    let comp = Composition {
        sources,
        other_sample: a.other_sample,
        dedup: a.dedup,
        split: a.split,
    };
    let d = ingest::compose_training_set(&comp, a.seed)?;
    ingest::write_dataset_file(&d, &output)?;
    write_json_beside(&IngestRun { composition: &comp, seed: a.seed }, &output)?;
    log::info!("wrote {} sentences to {}", d.len(), output.display());
    println!("{}", serde_json::to_string_pretty(&ingest::dataset_stats(&d).to_json()).unwrap());
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig, Error> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, Error> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_lines_from(BufReader::new(f), path)
}

fn read_lines_from<R: BufRead>(r: R, name: &Path) -> Result<Vec<String>, Error> {
    let mut out = Vec::new();
    for (i, line) in r.split(b'\n').enumerate() {
        let bytes = line.map_err(|e| Error::io(name, e))?;
        let line = String::from_utf8(bytes).map_err(|_| Error::Parse {
            path: name.to_path_buf(),
            line: i + 1,
            message: "invalid UTF-8".into(),
        })?;
        out.push(line.trim_end_matches('\r').to_string());
    }
    if out.last().is_some_and(|l| l.is_empty()) {
        out.pop();
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn cmd_normalize(a: NormalizeArgs) -> CliResult {
    let mut cfg = load_config(a.config.as_deref())?;
    let n = &mut cfg.normalize;
    n.replace_urls &= !a.no_urls;
    n.replace_emails &= !a.no_emails;
    n.replace_numbers &= !a.no_numbers;
    n.lowercase &= !a.no_lowercase;
    if a.ascii_placeholders {
        n.placeholders = Placeholders::Ascii;
    }
    let ncfg = cfg.normalize;

    if a.text {
        let lines = read_lines(&a.input)?;
        let mut w = create(&a.output)?;
        for line in lines {
            writeln!(w, "{}", normalize(&line, &ncfg)).map_err(|e| Error::io(&a.output, e))?;
        }
        w.flush().map_err(|e| Error::io(&a.output, e))?;
    } else {
        let mut d = ingest::read_dataset(&a.input, Split::Unsplit)?;
        for item in &mut d.items {
            item.text = normalize(&item.text, &ncfg);
        }
        ingest::write_dataset_file(&d, &a.output)?;
    }
    cfg.write_beside(&a.output)?;
    Ok(())
}

fn cmd_augment(cmd: AugmentCommand) -> CliResult {
    match cmd {
        AugmentCommand::Punct(a) => {
            if a.split.is_evaluation() {
                return Err(Failure::Usage(format!("refusing to augment the {} split", a.split)));
            }
            let mut cfg = load_config(a.config.as_deref())?;
            if let Some(r) = a.rate {
                cfg.punct.rate = r;
            }
            if let Some(p) = a.space_prob {
                cfg.punct.space_prob = p;
            }
            if let Some(s) = a.seed {
                cfg.punct.seed = s;
            }
            let d = ingest::read_dataset(&a.input, a.split)?;
            let out = augment::punctuation_augment(&d, &cfg.punct)?;
            ingest::write_dataset_file(&out, &a.output)?;
            cfg.write_beside(&a.output)?;
            let changed = d.iter().zip(&out).filter(|(x, y)| x.text != y.text).count();
            log::info!("altered {changed} of {} sentences", d.len());
        }
        AugmentCommand::Alphabet(a) => {
            let name = a.input.to_string_lossy();
            let sentences: Vec<String> = if name.ends_with(".conllu") {
                let f = File::open(&a.input).map_err(|e| Error::io(&a.input, e))?;
                ingest::parse_conllu(BufReader::new(f))?.sentences
            } else if name.ends_with(".jsonl") {
                ingest::read_dataset(&a.input, Split::Unsplit)?
                    .items
                    .into_iter()
                    .map(|i| i.text)
                    .collect()
            } else {
                read_lines(&a.input)?
            };
            let letters: Vec<char> = a.letters.chars().filter(|c| !c.is_whitespace()).collect();
            if letters.is_empty() {
                return Err(Failure::Usage("--letters must not be empty".into()));
            }
            let d = augment::extract_alphabet_variants(&sentences, &letters, a.labels);
            ingest::write_dataset_file(&d, &a.output)?;
            write_json_beside(
                &serde_json::json!({"letters": a.letters, "labels": a.labels, "input": a.input}),
                &a.output,
            )?;
            log::info!("kept {} of {} sentences", d.len(), sentences.len());
        }
        AugmentCommand::Ner(a) => {
            if a.split.is_evaluation() {
                return Err(Failure::Usage(format!("refusing to augment the {} split", a.split)));
            }
            let d = ingest::read_dataset(&a.input, a.split)?;
            let anns: Vec<EntityAnnotation> = read_jsonl(&a.annotations)?;
            let out = augment::ner_swap(&d, &anns, a.seed)?;
            ingest::write_dataset_file(&out, &a.output)?;
            write_json_beside(
                &serde_json::json!({"annotations": a.annotations, "seed": a.seed}),
                &a.output,
            )?;
        }
    }
    Ok(())
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, Error> {
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<(), Error> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::Data(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn cmd_silver(a: SilverArgs) -> CliResult {
    let d = ingest::read_dataset(&a.input, Split::Train)?;
    let (records, failed) = match (&a.translations, &a.translator_cmd) {
        (Some(path), _) => (read_jsonl::<TranslationRecord>(path)?, 0),
        (None, Some(cmd)) => {
            let targets: Vec<Language> = a.targets.iter().collect();
            let res = silver::translate_with_command(&d, cmd, &targets)
                .map_err(|e| Error::Data(format!("translator: {e}")))?;
            if let Some(path) = &a.save_translations {
                write_jsonl(&res.records, path)?;
            }
            (res.records, res.failed)
        }
        (None, None) => {
            return Err(Failure::Usage(
                "one of --translations or --translator-cmd is required".into(),
            ))
        }
    };
    let (out, summary) = silver::extend_labels(&d, &records)?;
    ingest::write_dataset_file(&out, &a.output)?;
    write_json_beside(
        &serde_json::json!({
            "input": a.input,
            "translations": a.translations,
            "translator_cmd": a.translator_cmd,
            "targets": a.targets,
        }),
        &a.output,
    )?;
    let mut report = serde_json::to_value(summary).unwrap();
    report["failed_translations"] = failed.into();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}

fn normalized_dataset(path: &Path, split: Split, cfg: &PipelineConfig) -> Result<Dataset, Error> {
    let mut d = ingest::read_dataset(path, split)?;
    for item in &mut d.items {
        item.text = normalize(&item.text, &cfg.normalize);
    }
    Ok(d)
}

fn cmd_train(a: TrainArgs) -> CliResult {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(p) = a.preset {
        cfg.featurizer = PipelineConfig::featurizer_preset(&p).map_err(|e| Failure::Usage(e.to_string()))?;
        cfg.preset = Some(p);
    }
    macro_rules! set {
        ($flag:expr => $field:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    set!(a.epochs => cfg.train.epochs);
    set!(a.batch_size => cfg.train.batch_size);
    set!(a.lr => cfg.train.learning_rate);
    set!(a.seed => cfg.train.seed);
    if a.train.is_some() {
        cfg.paths.train = a.train;
    }
    if a.valid.is_some() {
        cfg.paths.valid = a.valid;
    }
    if a.model.is_some() {
        cfg.paths.model = a.model;
    }
    let train_path = cfg
        .paths
        .train
        .clone()
        .ok_or_else(|| Failure::Usage("no training set (use --train or paths.train)".into()))?;
    let model_path = cfg
        .paths
        .model
        .clone()
        .ok_or_else(|| Failure::Usage("no model path (use --model or paths.model)".into()))?;
    cfg.featurizer
        .validate()
        .and_then(|_| cfg.train.validate())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    log::info!("effective config:\n{}", cfg.to_json());

    let train_set = normalized_dataset(&train_path, Split::Train, &cfg)?;
    let valid_set = match &cfg.paths.valid {
        Some(p) => normalized_dataset(p, Split::Validation, &cfg)?,
        None => Dataset::new(Split::Validation, Vec::new()),
    };
    let (mut m, history) = model::train(&train_set, &valid_set, &cfg.featurizer, &cfg.train)?;
    m.normalize = cfg.normalize;
    model::save_model(&m, &model_path)?;
    cfg.write_beside(&model_path)?;
    let hist_path = beside(&model_path, "history.json");
    fs::write(&hist_path, serde_json::to_string_pretty(&history).unwrap() + "\n")
        .map_err(|e| Error::io(&hist_path, e))?;
    log::info!(
        "saved {} (best step {} of {})",
        model_path.display(),
        history.best_step,
        history.steps
    );
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PredictionRecord {
    text: String,
    labels: LabelSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    top1: Option<Language>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<[f64; 4]>,
}

fn cmd_predict(a: PredictArgs) -> CliResult {
    let m = model::load_model(&a.model)?;
    let lines = match &a.input {
        Some(p) => read_lines(p)?,
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Error::io("<stdin>", e))?;
            read_lines_from(&buf[..], Path::new("<stdin>"))?
        }
    };
    let mut out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let out_name = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    for line in lines {
        let (labels, top1) = m.classify(&line);
        let written = if a.jsonl {
            let rec = PredictionRecord {
                probs: Some(m.probabilities(&line)),
                text: line,
                labels,
                top1: Some(top1),
            };
            serde_json::to_writer(&mut out, &rec)
                .map_err(io::Error::from)
                .and_then(|_| out.write_all(b"\n"))
        } else {
            writeln!(out, "{line}\t{labels}")
        };
        written.map_err(|e| Error::io(&out_name, e))?;
    }
    out.flush().map_err(|e| Error::io(&out_name, e))?;
    if let Some(p) = &a.output {
        write_json_beside(&serde_json::json!({"model": a.model, "input": a.input}), p)?;
    }
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> CliResult {
    let gold = ingest::read_dataset(&a.gold, Split::Test)?;
    let mut report = if let Some(model_path) = &a.model {
        let m = model::load_model(model_path)?;
        let mut r = EvalReport::from_pairs(&eval::predict_pairs(&m, &gold));
        if let Some(runs) = a.bench_runs {
            if runs == 0 {
                return Err(Failure::Usage("--bench-runs must be at least 1".into()));
            }
            let texts: Vec<String> = gold.iter().map(|i| i.text.clone()).collect();
            if !texts.is_empty() {
                r.ms_per_sample = Some(eval::benchmark(|t| m.classify(t), &texts, runs).ms_per_sample);
            }
        }
        r
    } else {
        let pred_path = a.pred.as_ref().expect("clap enforces --pred or --model");
        let preds: Vec<PredictionRecord> = read_jsonl(pred_path)?;
        if preds.len() != gold.len() {
            return Err(Failure::Data(Error::Data(format!(
                "{} predictions for {} gold sentences",
                preds.len(),
                gold.len()
            ))));
        }
        let mut pairs = Vec::with_capacity(gold.len());
        for (i, (p, g)) in preds.iter().zip(&gold).enumerate() {
            if p.text != g.text {
                return Err(Failure::Data(Error::Parse {
                    path: pred_path.clone(),
                    line: i + 1,
                    message: "text differs from gold".into(),
                }));
            }
            pairs.push(EvalPair {
                predicted: p.labels,
                gold: g.labels,
                top1: p.top1,
            });
        }
        EvalReport::from_pairs(&pairs)
    };
    if report.n == 0 {
        report.loose_accuracy = None;
    }
    match a.format.as_str() {
        "table" => print!("{}", report.to_table()),
        _ => println!("{}", report.to_json()),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    if a.runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }
    let m = model::load_model(&a.model)?;
    let texts: Vec<String> = if a.input.to_string_lossy().ends_with(".jsonl") {
        ingest::read_dataset(&a.input, Split::Unsplit)?
            .items
            .into_iter()
            .map(|i| i.text)
            .collect()
    } else {
        read_lines(&a.input)?
    };
    let texts: Vec<String> = texts
        .into_iter()
        .filter(|t| !t.trim().is_empty() && t.chars().count() <= a.max_chars)
        .collect();
    if texts.is_empty() {
        return Err(Failure::Data(Error::Data("no sentences to benchmark".into())));
    }
    let r = eval::benchmark(|t| m.classify(t), &texts, a.runs);
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
    Ok(())
}
