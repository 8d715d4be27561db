//! Binary model file.
//!
//! Layout (little-endian):
//!
//! ```text
//! "SLFX"            4 bytes magic
//! version           u16
//! header_len        u32
//! header            header_len bytes of UTF-8 JSON
//! embeddings        f32 × bucket_count·embed_dim
//! w1, b1, w2, b2    f32 arrays, row-major
//! crc32             u32 over every preceding byte
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FastModel, FeaturizerConfig, ModelError, HIDDEN, OUTPUTS};
use crate::labels::Language;
use crate::normalize::NormalizeConfig;

pub const MAGIC: &[u8; 4] = b"SLFX";
pub const FORMAT_VERSION: u16 = 1;

const PREAMBLE: usize = 4 + 2 + 4;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    featurizer: FeaturizerConfig,
    normalize: NormalizeConfig,
    hidden: usize,
    outputs: usize,
    threshold: f64,
    labels: Vec<Language>,
}

fn push_f32s(buf: &mut Vec<u8>, values: &[f32]) {
    buf.reserve(values.len() * 4);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serialize to bytes.
pub fn write_model(m: &FastModel) -> Vec<u8> {
    let header = Header {
        featurizer: m.featurizer,
        normalize: m.normalize,
        hidden: HIDDEN,
        outputs: OUTPUTS,
        threshold: m.threshold,
        labels: Language::SCANDINAVIAN.to_vec(),
    };
    let header = serde_json::to_vec(&header).expect("header serializes");
    let floats = m.embeddings.len() + m.w1.len() + m.b1.len() + m.w2.len() + m.b2.len();
    let mut buf = Vec::with_capacity(PREAMBLE + header.len() + floats * 4 + 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(header.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header);
    for arr in [&m.embeddings, &m.w1, &m.b1, &m.w2, &m.b2] {
        push_f32s(&mut buf, arr);
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

/// Parse from bytes. Nothing is returned unless the whole file checks out.
pub fn read_model(bytes: &[u8]) -> Result<FastModel, ModelError> {
    if bytes.len() < MAGIC.len() {
        return Err(ModelError::Checksum(format!(
            "file truncated to {} bytes",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(ModelError::BadMagic {
            expected: String::from_utf8_lossy(MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..4]).into_owned(),
        });
    }
    if bytes.len() < PREAMBLE + 4 {
        return Err(ModelError::Checksum(format!(
            "file truncated to {} bytes",
            bytes.len()
        )));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(ModelError::Checksum(format!(
            "stored {stored:08x}, computed {computed:08x}"
        )));
    }

    let version = u16::from_le_bytes([body[4], body[5]]);
    if version != FORMAT_VERSION {
        return Err(ModelError::Version {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let header_len = u32::from_le_bytes(body[6..10].try_into().expect("4 bytes")) as usize;
    let header_bytes = body
        .get(PREAMBLE..PREAMBLE + header_len)
        .ok_or_else(|| ModelError::Header("header length exceeds file".into()))?;
    let header: Header =
        serde_json::from_slice(header_bytes).map_err(|e| ModelError::Header(e.to_string()))?;
    if header.hidden != HIDDEN || header.outputs != OUTPUTS {
        return Err(ModelError::Header(format!(
            "expected {HIDDEN} hidden / {OUTPUTS} outputs, found {} / {}",
            header.hidden, header.outputs
        )));
    }
    if header.labels != Language::SCANDINAVIAN {
        return Err(ModelError::Header(format!(
            "unexpected output order {:?}",
            header.labels
        )));
    }
    header.featurizer.validate()?;

    let d = header.featurizer.embed_dim;
    let sizes = [
        header.featurizer.bucket_count * d,
        HIDDEN * d,
        HIDDEN,
        OUTPUTS * HIDDEN,
        OUTPUTS,
    ];
    let mut data = &body[PREAMBLE + header_len..];
    let expected_bytes: usize = sizes.iter().sum::<usize>() * 4;
    if data.len() != expected_bytes {
        return Err(ModelError::Header(format!(
            "weight section is {} bytes, expected {expected_bytes}",
            data.len()
        )));
    }
    let mut arrays = sizes.map(|n| {
        let (chunk, rest) = data.split_at(n * 4);
        data = rest;
        chunk
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect::<Vec<f32>>()
    });
    let take = |v: &mut Vec<f32>| std::mem::take(v);
    let model = FastModel {
        featurizer: header.featurizer,
        normalize: header.normalize,
        embeddings: take(&mut arrays[0]),
        w1: take(&mut arrays[1]),
        b1: take(&mut arrays[2]),
        w2: take(&mut arrays[3]),
        b2: take(&mut arrays[4]),
        threshold: header.threshold,
    };
    model.validate()?;
    Ok(model)
}

pub fn save_model(m: &FastModel, path: &Path) -> Result<(), ModelError> {
    let io_err = |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&write_model(m)).map_err(io_err)?;
    f.flush().map_err(io_err)
}

pub fn load_model(path: &Path) -> Result<FastModel, ModelError> {
    let bytes = fs::read(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_model(&bytes)
}
