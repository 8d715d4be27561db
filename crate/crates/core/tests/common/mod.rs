//! Synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use nordlid::{Dataset, LabelSet, LabeledSentence, Language, Split};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Three languages over pairwise disjoint alphabets.
pub const ALPHABETS: [(Language, &str); 3] = [
    (Language::Da, "abcdefgh"),
    (Language::Nb, "ijklmnop"),
    (Language::Sv, "qrstuvwx"),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn word(rng: &mut impl Rng, alphabet: &str, len: std::ops::RangeInclusive<usize>) -> String {
    let letters: Vec<char> = alphabet.chars().collect();
    let n = rng.random_range(len);
    (0..n).map(|_| *letters.choose(rng).unwrap()).collect()
}

/// One synthetic sentence and whether it is a deliberately ambiguous
/// dual-label item.
#[derive(Debug, Clone)]
pub struct SyntheticItem {
    pub sentence: LabeledSentence,
    pub ambiguous: bool,
}

/// `n` sentences. A share `ambiguous` of them alternate words from two
/// alphabets and carry both labels; the rest use one alphabet.
pub fn synthetic_corpus(n: usize, ambiguous: f64, seed: u64) -> Vec<SyntheticItem> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let words = rng.random_range(4..=10);
            let dual = rng.random_bool(ambiguous);
            let a = rng.random_range(0..ALPHABETS.len());
            let b = (a + rng.random_range(1..ALPHABETS.len())) % ALPHABETS.len();
            let first = rng.random_bool(0.5);
            let text: Vec<String> = (0..words)
                .map(|i| {
                    let pick = if dual && (i % 2 == 0) != first { b } else { a };
                    word(&mut rng, ALPHABETS[pick].1, 2..=7)
                })
                .collect();
            let mut labels = LabelSet::single(ALPHABETS[a].0);
            if dual {
                labels = labels.with(ALPHABETS[b].0).unwrap();
            }
            SyntheticItem {
                sentence: LabeledSentence::new(text.join(" "), labels).unwrap(),
                ambiguous: dual,
            }
        })
        .collect()
}

pub fn dataset(items: &[SyntheticItem], split: Split) -> Dataset {
    Dataset::new(split, items.iter().map(|i| i.sentence.clone()).collect())
}

const WORDS: &[&str] = &[
    "jeg", "har", "en", "plan", "og", "det", "er", "ikke", "så", "lett", "eg", "veit", "ikkje",
    "kva", "ho", "seier", "jag", "vet", "inte", "vad", "hon", "säger", "hvad", "siger", "hun",
    "skole", "skule", "skola", "bøker", "böcker", "dag", "i", "morgen", "fjell", "sjø", "hav",
    "København", "Stockholm", "Oslo", "Bergen", "mennesker", "människor", "folk", "vi",
    "også", "äta", "spise", "ete", "kjøpte", "købte", "köpte", "Hello", "world", "the", "is",
];

/// Sentences of at most `max_chars` characters built from a Scandinavian
/// word list with occasional numbers, URLs and punctuation.
pub fn realistic_sentences(n: usize, max_chars: usize, seed: u64) -> Vec<String> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let mut s = String::new();
            let target = rng.random_range(20..=max_chars);
            loop {
                let token = match rng.random_range(0..20) {
                    0 => format!("{}", rng.random_range(0..100_000)),
                    1 => "https://example.no/side".to_string(),
                    _ => WORDS.choose(&mut rng).unwrap().to_string(),
                };
                if s.chars().count() + token.chars().count() + 2 > target {
                    break;
                }
                if !s.is_empty() {
                    s.push(' ');
                }
                s.push_str(&token);
            }
            if s.is_empty() {
                s.push_str("hei");
            }
            s.push('.');
            s
        })
        .collect()
}

/// A random label set: `other` with probability `p_other`, else a
/// non-empty subset of the Scandinavian languages.
pub fn random_labels(rng: &mut impl Rng, p_other: f64) -> LabelSet {
    if rng.random_bool(p_other) {
        return LabelSet::OTHER;
    }
    let bits = rng.random_range(1u8..16);
    LabelSet::from_bits(bits).unwrap()
}
