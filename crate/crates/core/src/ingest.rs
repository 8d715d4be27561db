//! Corpus ingestion: CoNLL-U text extraction, JSONL datasets, training-set
//! composition and label statistics.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{Dataset, LabelError, LabelSet, LabeledSentence, Language, Split};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: invalid UTF-8")]
    Utf8 { line: usize },
    #[error("{path}:{line}: {message}")]
    Record {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: {source}")]
    Label {
        path: String,
        line: usize,
        #[source]
        source: LabelError,
    },
    #[error("source {0} needs assigned labels")]
    MissingLabels(String),
    #[error("requested {requested} `other` sentences but only {available} are available")]
    NotEnoughOther { requested: usize, available: usize },
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Sentences pulled out of a CoNLL-U stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConlluText {
    pub sentences: Vec<String>,
    /// Blocks that had no `# text =` comment.
    pub skipped_blocks: usize,
}

/// Extract the `# text = ...` payload of every sentence block.
///
/// Only comment lines and blank-line block separation are looked at; token
/// lines are ignored.
pub fn parse_conllu<R: BufRead>(mut reader: R) -> Result<ConlluText, IngestError> {
    let mut out = ConlluText::default();
    let mut in_block = false;
    let mut block_text: Option<String> = None;
    let mut buf = Vec::new();
    let mut line_no = 0;

    let close_block = |text: &mut Option<String>, out: &mut ConlluText| match text.take() {
        Some(t) => out.sentences.push(t),
        None => out.skipped_blocks += 1,
    };

    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| IngestError::io(Path::new("<conllu>"), e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| IngestError::Utf8 { line: line_no })?;
        let line = line.trim_end_matches(['\n', '\r']);

        if line.trim().is_empty() {
            if in_block {
                close_block(&mut block_text, &mut out);
                in_block = false;
            }
            continue;
        }
        in_block = true;
        if block_text.is_none() {
            if let Some(text) = text_comment(line) {
                block_text = Some(text.to_string());
            }
        }
    }
    if in_block {
        close_block(&mut block_text, &mut out);
    }
    Ok(out)
}

/// Payload of a `# text = ...` line. `# text_en = ...` and similar do not
/// match.
fn text_comment(line: &str) -> Option<&str> {
    let rest = line.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix("text")?.trim_start();
    let rest = rest.strip_prefix('=')?;
    let text = rest.trim();
    (!text.is_empty()).then_some(text)
}

#[derive(Debug, Deserialize)]
struct JsonRecord {
    text: String,
    labels: Vec<String>,
    #[serde(default)]
    source: Option<String>,
}

/// Read a JSONL dataset: one `{"text", "labels", "source"?}` object per line.
/// Blank lines are ignored. Errors carry the 1-based line number.
pub fn read_dataset(path: &Path, split: Split) -> Result<Dataset, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_dataset_from(BufReader::new(file), &path.display().to_string(), split)
}

pub fn read_dataset_from<R: BufRead>(
    reader: R,
    name: &str,
    split: Split,
) -> Result<Dataset, IngestError> {
    let mut items = Vec::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let line_no = i + 1;
        let bytes = line.map_err(|e| IngestError::io(Path::new(name), e))?;
        let line = std::str::from_utf8(&bytes).map_err(|_| IngestError::Utf8 { line: line_no })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonRecord = serde_json::from_str(line).map_err(|e| IngestError::Record {
            path: name.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        let label_err = |source| IngestError::Label {
            path: name.to_string(),
            line: line_no,
            source,
        };
        let labels = LabelSet::parse(&record.labels).map_err(label_err)?;
        let mut item = LabeledSentence::new(record.text, labels).map_err(label_err)?;
        item.source = record.source;
        items.push(item);
    }
    Ok(Dataset::new(split, items))
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    text: &'a str,
    labels: LabelSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<&'a str>,
}

/// Write a dataset as JSONL, labels in canonical order.
pub fn write_dataset<W: Write>(d: &Dataset, mut writer: W) -> io::Result<()> {
    for item in d {
        let record = JsonRecordOut {
            text: &item.text,
            labels: item.labels,
            source: item.source.as_deref(),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_dataset_file(d: &Dataset, path: &Path) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_dataset(d, io::BufWriter::new(file)).map_err(|e| IngestError::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Conllu,
    Jsonl,
    Plaintext,
}

impl FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conllu" => Ok(SourceFormat::Conllu),
            "jsonl" => Ok(SourceFormat::Jsonl),
            "plaintext" | "txt" => Ok(SourceFormat::Plaintext),
            _ => Err(format!("unknown source format `{s}`")),
        }
    }
}

/// One input corpus. For CoNLL-U and plain text, `labels` is applied to every
/// sentence; JSONL records keep their own labels unless `labels` is given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSource {
    pub path: PathBuf,
    pub format: SourceFormat,
    #[serde(default)]
    pub labels: Option<LabelSet>,
}

impl CorpusSource {
    pub fn new(path: impl Into<PathBuf>, format: SourceFormat, labels: Option<LabelSet>) -> Self {
        CorpusSource {
            path: path.into(),
            format,
            labels,
        }
    }

    fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string())
    }

    /// Read every sentence of this source with its labels.
    pub fn read(&self) -> Result<Vec<LabeledSentence>, IngestError> {
        let open = || File::open(&self.path).map_err(|e| IngestError::io(&self.path, e));
        let name = self.name();
        let texts: Vec<String> = match self.format {
            SourceFormat::Jsonl => {
                let d = read_dataset_from(
                    BufReader::new(open()?),
                    &self.path.display().to_string(),
                    Split::Unsplit,
                )?;
                return Ok(d
                    .items
                    .into_iter()
                    .map(|mut item| {
                        if let Some(labels) = self.labels {
                            item.labels = labels;
                        }
                        if item.source.is_none() {
                            item.source = Some(name.clone());
                        }
                        item
                    })
                    .collect());
            }
            SourceFormat::Conllu => {
                let parsed = parse_conllu(BufReader::new(open()?))?;
                if parsed.skipped_blocks > 0 {
                    log::warn!(
                        "{}: skipped {} block(s) without `# text`",
                        self.path.display(),
                        parsed.skipped_blocks
                    );
                }
                parsed.sentences
            }
            SourceFormat::Plaintext => {
                let mut lines = Vec::new();
                for (i, line) in BufReader::new(open()?).split(b'\n').enumerate() {
                    let bytes = line.map_err(|e| IngestError::io(&self.path, e))?;
                    let line =
                        String::from_utf8(bytes).map_err(|_| IngestError::Utf8 { line: i + 1 })?;
                    let line = line.trim();
                    if !line.is_empty() {
                        lines.push(line.to_string());
                    }
                }
                lines
            }
        };
        let labels = self
            .labels
            .ok_or_else(|| IngestError::MissingLabels(self.path.display().to_string()))?;
        Ok(texts
            .into_iter()
            .filter(|t| !t.trim().is_empty())
            .map(|text| LabeledSentence {
                text,
                labels,
                source: Some(name.clone()),
            })
            .collect())
    }
}

/// How to assemble a training set from several corpora.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Composition {
    pub sources: Vec<CorpusSource>,
    /// Number of sentences to draw from the pooled `{other}` sources. `None`
    /// keeps all of them.
    pub other_sample: Option<usize>,
    /// Drop repeated texts, keeping the first occurrence.
    pub dedup: bool,
    pub split: Split,
}

/// Concatenate all sources in declared order. Sources labeled `{other}` are
/// pooled and, when `other_sample` is set, sampled uniformly without
/// replacement using `seed`; the sample keeps pool order and is appended
/// after the Scandinavian sources.
pub fn compose_training_set(comp: &Composition, seed: u64) -> Result<Dataset, IngestError> {
    let mut items = Vec::new();
    let mut pool = Vec::new();
    for source in &comp.sources {
        for item in source.read()? {
            if item.labels.is_other() {
                pool.push(item);
            } else {
                items.push(item);
            }
        }
    }

    match comp.other_sample {
        Some(k) if k < pool.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut keep = vec![false; pool.len()];
            for i in index::sample(&mut rng, pool.len(), k) {
                keep[i] = true;
            }
            items.extend(
                pool.into_iter()
                    .zip(keep)
                    .filter_map(|(item, k)| k.then_some(item)),
            );
        }
        Some(k) if k > pool.len() => {
            return Err(IngestError::NotEnoughOther {
                requested: k,
                available: pool.len(),
            })
        }
        _ => items.extend(pool),
    }

    if comp.dedup {
        let mut seen = HashSet::new();
        items.retain(|item| seen.insert(item.text.clone()));
    }
    Ok(Dataset::new(comp.split, items))
}

/// Per-language sentence counts. A sentence with k labels counts once for
/// each of them; `total` counts unique items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub counts: [usize; 5],
    pub total: usize,
}

impl LabelDistribution {
    pub fn count(&self, lang: Language) -> usize {
        self.counts[lang.index()]
    }

    pub fn label_mentions(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Percentage share of each language among all label mentions.
    pub fn shares(&self) -> [f64; 5] {
        let sum = self.label_mentions();
        let mut out = [0.0; 5];
        if sum > 0 {
            for (o, c) in out.iter_mut().zip(self.counts) {
                *o = 100.0 * c as f64 / sum as f64;
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let shares = self.shares();
        let mut langs = serde_json::Map::new();
        for lang in Language::ALL {
            langs.insert(
                lang.as_str().to_string(),
                serde_json::json!({
                    "count": self.count(lang),
                    "share_percent": shares[lang.index()],
                }),
            );
        }
        serde_json::json!({ "languages": langs, "total": self.total })
    }
}

pub fn dataset_stats(d: &Dataset) -> LabelDistribution {
    let mut dist = LabelDistribution {
        total: d.len(),
        ..Default::default()
    };
    for item in d {
        for lang in item.labels.iter() {
            dist.counts[lang.index()] += 1;
        }
    }
    dist
}
