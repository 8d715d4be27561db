//! Hashed character n-gram features.

use serde::{Deserialize, Serialize};

use super::ModelError;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    fnv1a_extend(FNV_OFFSET, bytes)
}

#[inline]
fn fnv1a_extend(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeaturizerConfig {
    pub min_n: usize,
    pub max_n: usize,
    pub bucket_count: usize,
    pub include_word_unigrams: bool,
    pub embed_dim: usize,
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        FeaturizerConfig {
            min_n: 1,
            max_n: 4,
            bucket_count: 1 << 18,
            include_word_unigrams: true,
            embed_dim: 32,
        }
    }
}

impl FeaturizerConfig {
    /// 322-dimensional sentence embeddings, which puts the classifier head
    /// at 20,932 parameters.
    pub fn paper_head() -> Self {
        FeaturizerConfig {
            bucket_count: 1 << 16,
            embed_dim: 322,
            ..Default::default()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "paper-head" => Some(Self::paper_head()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(1 <= self.min_n && self.min_n <= self.max_n && self.max_n <= 8) {
            return Err(ModelError::Config(format!(
                "need 1 <= min_n <= max_n <= 8, got {}..{}",
                self.min_n, self.max_n
            )));
        }
        if !self.bucket_count.is_power_of_two() || self.bucket_count > u32::MAX as usize {
            return Err(ModelError::Config(format!(
                "bucket_count {} must be a power of two below 2^32",
                self.bucket_count
            )));
        }
        if self.embed_dim == 0 {
            return Err(ModelError::Config("embed_dim must be at least 1".into()));
        }
        Ok(())
    }

    #[inline]
    fn bucket(&self, hash: u64) -> u32 {
        (hash & (self.bucket_count as u64 - 1)) as u32
    }

    /// Bucket ids for every n-gram of every `<token>` in `text`, in order of
    /// token, then start position, then length. Returned as a multiset.
    pub fn featurize(&self, text: &str) -> Vec<u32> {
        let mut out = Vec::new();
        self.featurize_into(text, &mut out);
        out
    }

    pub fn featurize_into(&self, text: &str, out: &mut Vec<u32>) {
        out.clear();
        let mut wrapped = String::new();
        let mut bounds: Vec<usize> = Vec::new();
        for token in text.split_whitespace() {
            wrapped.clear();
            wrapped.push('<');
            wrapped.push_str(token);
            wrapped.push('>');
            bounds.clear();
            bounds.extend(wrapped.char_indices().map(|(i, _)| i));
            bounds.push(wrapped.len());
            let bytes = wrapped.as_bytes();
            let n_chars = bounds.len() - 1;

            for start in 0..n_chars {
                let mut hash = FNV_OFFSET;
                let longest = self.max_n.min(n_chars - start);
                for len in 1..=longest {
                    hash = fnv1a_extend(hash, &bytes[bounds[start + len - 1]..bounds[start + len]]);
                    if len >= self.min_n {
                        out.push(self.bucket(hash));
                    }
                }
            }
            if self.include_word_unigrams {
                out.push(self.bucket(fnv1a(bytes)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent enumeration: build every gram string explicitly.
    fn brute_force_grams(text: &str, cfg: &FeaturizerConfig) -> Vec<String> {
        let mut grams = Vec::new();
        for token in text.split_whitespace() {
            let chars: Vec<char> = format!("<{token}>").chars().collect();
            for n in cfg.min_n..=cfg.max_n {
                for w in chars.windows(n) {
                    grams.push(w.iter().collect());
                }
            }
            if cfg.include_word_unigrams {
                grams.push(format!("<{token}>"));
            }
        }
        grams
    }

    fn sorted(mut v: Vec<u32>) -> Vec<u32> {
        v.sort_unstable();
        v
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn bigram_example() {
        let cfg = FeaturizerConfig {
            min_n: 2,
            max_n: 2,
            include_word_unigrams: false,
            ..Default::default()
        };
        let got = cfg.featurize("ab");
        let expected: Vec<u32> = ["<a", "ab", "b>"]
            .iter()
            .map(|g| cfg.bucket(fnv1a(g.as_bytes())))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn scandinavian_gram_count() {
        let mut cfg = FeaturizerConfig {
            min_n: 1,
            max_n: 2,
            include_word_unigrams: false,
            ..Default::default()
        };
        let grams = brute_force_grams("på hø", &cfg);
        assert_eq!(grams.len(), 14);
        assert_eq!(cfg.featurize("på hø").len(), 14);
        cfg.include_word_unigrams = true;
        assert_eq!(cfg.featurize("på hø").len(), 16);
    }

    #[test]
    fn matches_brute_force_enumeration() {
        let texts = ["", "  ", "hej med dig", "Ærø æble-grød", "x", "blåbærsyltetøj er godt", "a\tb\nc"];
        for min_n in 1..=4 {
            for max_n in min_n..=6 {
                let cfg = FeaturizerConfig {
                    min_n,
                    max_n,
                    bucket_count: 1 << 10,
                    ..Default::default()
                };
                for t in texts {
                    let expected: Vec<u32> = brute_force_grams(t, &cfg)
                        .iter()
                        .map(|g| cfg.bucket(fnv1a(g.as_bytes())))
                        .collect();
                    assert_eq!(sorted(cfg.featurize(t)), sorted(expected), "{t:?} {min_n}..{max_n}");
                }
            }
        }
    }

    #[test]
    fn empty_text_has_no_features() {
        assert!(FeaturizerConfig::default().featurize("").is_empty());
        assert!(FeaturizerConfig::default().featurize(" \t ").is_empty());
    }

    #[test]
    fn buckets_in_range_and_deterministic() {
        let cfg = FeaturizerConfig {
            bucket_count: 64,
            ..Default::default()
        };
        let a = cfg.featurize("det var en gang");
        assert_eq!(a, cfg.featurize("det var en gang"));
        assert!(a.iter().all(|&b| b < 64));
    }

    #[test]
    fn validation() {
        let bad = |f: fn(&mut FeaturizerConfig)| {
            let mut c = FeaturizerConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.min_n = 0));
        assert!(bad(|c| c.max_n = 9));
        assert!(bad(|c| c.min_n = 5));
        assert!(bad(|c| c.bucket_count = 1000));
        assert!(bad(|c| c.embed_dim = 0));
        assert!(FeaturizerConfig::default().validate().is_ok());
        assert!(FeaturizerConfig::paper_head().validate().is_ok());
    }
}
