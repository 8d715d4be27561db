//! Multi-label extension by unchanged translation.
//!
//! If translating a sentence into another Scandinavian language gives back
//! the same sentence, the sentence is already valid in that language and
//! gains its label. Labels are only ever added and translations are never
//! written into the dataset.

use std::io::{self, Write};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::labels::{Dataset, Language};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SilverError {
    #[error("record {record}: item index {index} out of range ({len} items)")]
    IndexOutOfRange {
        record: usize,
        index: usize,
        len: usize,
    },
    #[error("record {record}: translation target cannot be `other`")]
    OtherTarget { record: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub item_index: usize,
    pub target: Language,
    pub translation: String,
}

/// NFC-compose, trim and collapse internal whitespace runs to one space.
pub fn canonical_form(s: &str) -> String {
    let composed: String = s.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Equality after [`canonical_form`]. Case and punctuation still matter.
pub fn canonical_compare(a: &str, b: &str) -> bool {
    canonical_form(a) == canonical_form(b)
}

/// Counts from one [`extend_labels`] run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SilverSummary {
    pub records_seen: usize,
    pub unchanged: usize,
    /// Labels newly added, in (da, nb, nn, sv) order.
    pub added: [usize; 4],
    pub skipped_other: usize,
}

impl SilverSummary {
    pub fn total_added(&self) -> usize {
        self.added.iter().sum()
    }
}

pub fn extend_labels(
    d: &Dataset,
    records: &[TranslationRecord],
) -> Result<(Dataset, SilverSummary), SilverError> {
    for (i, rec) in records.iter().enumerate() {
        if rec.item_index >= d.len() {
            return Err(SilverError::IndexOutOfRange {
                record: i,
                index: rec.item_index,
                len: d.len(),
            });
        }
        if rec.target.is_other() {
            return Err(SilverError::OtherTarget { record: i });
        }
    }

    let mut out = d.clone();
    let mut summary = SilverSummary::default();
    for rec in records {
        summary.records_seen += 1;
        let item = &mut out.items[rec.item_index];
        if item.labels.is_other() {
            summary.skipped_other += 1;
            continue;
        }
        if !canonical_compare(&item.text, &rec.translation) {
            continue;
        }
        summary.unchanged += 1;
        if !item.labels.contains(rec.target) {
            // Cannot fail: neither side is `other`.
            item.labels = item.labels.with(rec.target).expect("scandinavian label");
            summary.added[rec.target.index()] += 1;
        }
    }
    Ok((out, summary))
}

/// Translations gathered from an external command.
#[derive(Debug, Default)]
pub struct CommandTranslations {
    pub records: Vec<TranslationRecord>,
    pub failed: usize,
}

/// Run `command` through `sh -c` once per (item, target) pair, feeding
/// `"<target>\t<text>\n"` on stdin and reading the first stdout line as the
/// translation. A non-zero exit or unreadable output counts as a failure
/// and the pair is skipped.
pub fn translate_with_command(
    d: &Dataset,
    command: &str,
    targets: &[Language],
) -> io::Result<CommandTranslations> {
    let mut result = CommandTranslations::default();
    for (index, item) in d.items.iter().enumerate() {
        if item.labels.is_other() {
            continue;
        }
        for &target in targets {
            if target.is_other() || item.labels.contains(target) {
                continue;
            }
            match run_translator(command, target, &item.text)? {
                Some(translation) => result.records.push(TranslationRecord {
                    item_index: index,
                    target,
                    translation,
                }),
                None => {
                    log::warn!("translator failed for item {index} -> {target}");
                    result.failed += 1;
                }
            }
        }
    }
    Ok(result)
}

fn run_translator(command: &str, target: Language, text: &str) -> io::Result<Option<String>> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()?;
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        // A translator that exits without reading its input is a failure,
        // not an I/O error.
        let line = format!("{target}\t{}\n", text.replace(['\n', '\r'], " "));
        if let Err(e) = stdin.write_all(line.as_bytes()) {
            if e.kind() != io::ErrorKind::BrokenPipe {
                return Err(e);
            }
        }
    }
    let output = child.wait_with_output()?;
    if !output.status.success() {
        return Ok(None);
    }
    let Ok(stdout) = String::from_utf8(output.stdout) else {
        return Ok(None);
    };
    Ok(stdout.lines().next().map(str::to_string))
}
