//! Multi-label sentence-level language identification for Danish, Norwegian
//! Bokmål, Norwegian Nynorsk and Swedish.
//!
//! The crate covers the whole pipeline: corpus ingestion ([`ingest`]), text
//! canonicalization ([`normalize`]), training-data augmentation
//! ([`augment`]), multi-label extension from unchanged translations
//! ([`silver`]), a hashed character n-gram classifier ([`model`]) and the
//! evaluation harness ([`eval`]). The `nordlid` binary exposes each stage as
//! a subcommand.
//!
//! ```no_run
//! use nordlid::model::load_model;
//!
//! let model = load_model("model.slfx".as_ref())?;
//! let (labels, _top1) = model.classify("Jeg har en plan.");
//! println!("{labels}"); // e.g. "da,nb"
//! # Ok::<(), nordlid::Error>(())
//! ```

pub mod augment;
pub mod cli;
pub mod config;
pub mod eval;
pub mod ingest;
pub mod labels;
pub mod model;
pub mod normalize;
pub mod silver;

pub use labels::{Dataset, LabelError, LabelSet, LabeledSentence, Language, Split};

use std::path::PathBuf;

/// Any error the pipeline can produce.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Augment(#[from] augment::AugmentError),
    #[error(transparent)]
    Silver(#[from] silver::SilverError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Data(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
