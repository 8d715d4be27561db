//! Text canonicalization: placeholder substitution for URLs, e-mail
//! addresses and numbers, plus locale-independent lowercasing.
//!
//! Patterns:
//!
//! * URL: `http://`, `https://` or `www.` (case-insensitive) followed by
//!   everything up to the next whitespace.
//! * E-mail: `local@domain.tld`, local part made of word characters and
//!   `._%+-`, top-level domain of at least two ASCII letters.
//! * Number: a maximal run of digits, optionally preceded by a sign, with
//!   groups joined by a single space, period or comma. Only whole tokens are
//!   replaced: a number glued to a letter or digit on either side (`B52`,
//!   `3D`) is left untouched.
//!
//! The fixture list in this module's tests pins the behaviour.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap());

static EMAIL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[\w.%+-]+@[\w-]+(?:\.[\w-]+)*\.[A-Za-z]{2,}\b").unwrap());

/// Placeholder spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placeholders {
    /// `⟨URL⟩`, `⟨mail⟩`, `⟨num⟩`
    #[default]
    Angle,
    /// `<URL>`, `<mail>`, `<num>`; used when writing files.
    Ascii,
}

impl Placeholders {
    pub fn url(self) -> &'static str {
        match self {
            Placeholders::Angle => "⟨URL⟩",
            Placeholders::Ascii => "<URL>",
        }
    }

    pub fn mail(self) -> &'static str {
        match self {
            Placeholders::Angle => "⟨mail⟩",
            Placeholders::Ascii => "<mail>",
        }
    }

    pub fn num(self) -> &'static str {
        match self {
            Placeholders::Angle => "⟨num⟩",
            Placeholders::Ascii => "<num>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeConfig {
    pub replace_urls: bool,
    pub replace_emails: bool,
    pub replace_numbers: bool,
    pub lowercase: bool,
    pub placeholders: Placeholders,
}

impl NormalizeConfig {
    /// Everything on; what the training pipeline uses.
    pub fn training() -> Self {
        NormalizeConfig {
            replace_urls: true,
            replace_emails: true,
            replace_numbers: true,
            lowercase: true,
            placeholders: Placeholders::Angle,
        }
    }

    /// Everything off; what raw ingestion uses.
    pub fn raw() -> Self {
        NormalizeConfig {
            replace_urls: false,
            replace_emails: false,
            replace_numbers: false,
            lowercase: false,
            placeholders: Placeholders::Angle,
        }
    }

    pub fn is_identity(&self) -> bool {
        !(self.replace_urls || self.replace_emails || self.replace_numbers || self.lowercase)
    }
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self::training()
    }
}

/// Replace URLs, e-mail addresses and numbers according to `cfg`.
/// Lowercasing is not applied here; see [`normalize`].
pub fn normalize_regex(text: &str, cfg: &NormalizeConfig) -> String {
    let mut out = text.to_string();
    if cfg.replace_urls {
        out = URL_RE.replace_all(&out, cfg.placeholders.url()).into_owned();
    }
    if cfg.replace_emails {
        out = EMAIL_RE.replace_all(&out, cfg.placeholders.mail()).into_owned();
    }
    if cfg.replace_numbers {
        out = replace_numbers(&out, cfg.placeholders.num());
    }
    out
}

/// Simple (one-to-one) Unicode lowercase mapping, independent of locale.
pub fn lowercase(text: &str) -> String {
    text.chars()
        .map(|c| c.to_lowercase().next().unwrap_or(c))
        .collect()
}

/// The full canonicalization: placeholder substitution, then lowercasing
/// if enabled. Placeholder tokens keep their spelling, so applying this
/// twice is the same as applying it once.
pub fn normalize(text: &str, cfg: &NormalizeConfig) -> String {
    let replaced = normalize_regex(text, cfg);
    if cfg.lowercase {
        lowercase_outside_placeholders(&replaced)
    } else {
        replaced
    }
}

static PLACEHOLDER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"⟨(?:URL|mail|num)⟩|<(?:URL|mail|num)>").unwrap());

fn lowercase_outside_placeholders(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for m in PLACEHOLDER_RE.find_iter(text) {
        out.push_str(&lowercase(&text[last..m.start()]));
        out.push_str(m.as_str());
        last = m.end();
    }
    out.push_str(&lowercase(&text[last..]));
    out
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Whole-token number replacement. Hand-written because the boundary rules
/// need look-behind, which `regex` does not offer.
fn replace_numbers(text: &str, placeholder: &str) -> String {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = String::with_capacity(text.len());
    let mut copied_to = 0; // byte offset
    let mut i = 0;

    while i < chars.len() {
        let (start_byte, c) = chars[i];
        let prev = if i == 0 { None } else { Some(chars[i - 1].1) };
        let prev_is_word = prev.is_some_and(is_word_char);

        // A sign only counts when it is itself at a token boundary.
        let (digits_at, has_sign) = if (c == '+' || c == '-')
            && !prev_is_word
            && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit())
        {
            (i + 1, true)
        } else {
            (i, false)
        };

        if !chars[digits_at].1.is_ascii_digit() {
            i += 1;
            continue;
        }
        let digit_prev_is_word = if has_sign {
            false
        } else {
            prev_is_word
        };

        // Collect group ends: index just past each digit group.
        let mut j = digits_at;
        while j < chars.len() && chars[j].1.is_ascii_digit() {
            j += 1;
        }
        let mut ends = vec![j];
        loop {
            let sep_ok = chars
                .get(j)
                .is_some_and(|(_, s)| matches!(s, ' ' | '.' | ','));
            let digit_follows = chars.get(j + 1).is_some_and(|(_, d)| d.is_ascii_digit());
            if !(sep_ok && digit_follows) {
                break;
            }
            j += 1;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            ends.push(j);
        }

        if digit_prev_is_word {
            // Glued to a preceding word character: skip the whole digit run.
            i = ends[0];
            continue;
        }

        // Longest group prefix that ends at a token boundary.
        let accepted = ends
            .iter()
            .rev()
            .find(|&&end| !chars.get(end).is_some_and(|(_, n)| is_word_char(*n)))
            .copied();

        match accepted {
            Some(end) => {
                out.push_str(&text[copied_to..start_byte]);
                out.push_str(placeholder);
                copied_to = chars.get(end).map_or(text.len(), |(b, _)| *b);
                i = end;
            }
            None => i = ends[0],
        }
    }
    out.push_str(&text[copied_to..]);
    out
}

/// Reference pairs `(input, expected)` for [`normalize_regex`] with URL,
/// e-mail and number replacement on and lowercasing off.
pub const FIXTURES: &[(&str, &str)] = &[
    ("Skriv til ola@example.no i dag", "Skriv til ⟨mail⟩ i dag"),
    ("Ingen treff her.", "Ingen treff her."),
    ("Se https://a.no og 1 234,5 kr", "Se ⟨URL⟩ og ⟨num⟩ kr"),
    ("Besøk www.vg.no nå", "Besøk ⟨URL⟩ nå"),
    ("HTTP://EXAMPLE.COM/x?y=1", "⟨URL⟩"),
    ("Det kostet 100.", "Det kostet ⟨num⟩."),
    ("B52 fløj over", "B52 fløj over"),
    ("3D-film", "3D-film"),
    ("-5 grader", "⟨num⟩ grader"),
    ("COVID-19", "COVID-⟨num⟩"),
    ("2-3", "⟨num⟩-⟨num⟩"),
    ("1, 2 og 3", "⟨num⟩, ⟨num⟩ og ⟨num⟩"),
    ("år 2024.", "år ⟨num⟩."),
    ("x 1 2y", "x ⟨num⟩ 2y"),
    ("1.000.000 kroner", "⟨num⟩ kroner"),
    ("kontakt: a.b-c@firma.co.uk.", "kontakt: ⟨mail⟩."),
    ("Ring 22 33 44 55", "Ring ⟨num⟩"),
    ("+47 99", "⟨num⟩"),
    ("kl. 12:30", "kl. ⟨num⟩:⟨num⟩"),
    ("v2 og 2v", "v2 og 2v"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn regex_only() -> NormalizeConfig {
        NormalizeConfig {
            lowercase: false,
            ..NormalizeConfig::training()
        }
    }

    #[test]
    fn fixtures() {
        let cfg = regex_only();
        for (input, expected) in FIXTURES {
            assert_eq!(normalize_regex(input, &cfg), *expected, "input: {input:?}");
        }
    }

    #[test]
    fn ascii_placeholders() {
        let cfg = NormalizeConfig {
            placeholders: Placeholders::Ascii,
            ..regex_only()
        };
        assert_eq!(
            normalize_regex("Se https://a.no og 1 234,5 kr", &cfg),
            "Se <URL> og <num> kr"
        );
    }

    #[test]
    fn flags_are_independent() {
        let only_numbers = NormalizeConfig {
            replace_numbers: true,
            ..NormalizeConfig::raw()
        };
        assert_eq!(
            normalize_regex("mail a@b.no 5", &only_numbers),
            "mail a@b.no ⟨num⟩"
        );
        assert_eq!(
            normalize_regex("mail a@b.no 5", &NormalizeConfig::raw()),
            "mail a@b.no 5"
        );
    }

    #[test]
    fn lowercase_examples() {
        assert_eq!(lowercase("Låten Heter X"), "låten heter x");
        assert_eq!(lowercase("ÆØÅ ÄÖ"), "æøå äö");
        assert_eq!(lowercase("allerede små"), "allerede små");
    }

    #[test]
    fn full_pipeline_keeps_placeholder_case() {
        let cfg = NormalizeConfig::training();
        assert_eq!(normalize("Se WWW.A.NO", &cfg), "se ⟨URL⟩");
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-zA-Z0-9æøåäö@.,:/+ _-]{0,40}") {
            let cfg = regex_only();
            let once = normalize_regex(&s, &cfg);
            prop_assert_eq!(normalize_regex(&once, &cfg), once);
        }

        #[test]
        fn full_normalize_idempotent(s in "[a-zA-Z0-9ÆØæøåäö@.,:/+ _-]{0,40}") {
            let cfg = NormalizeConfig::training();
            let once = normalize(&s, &cfg);
            prop_assert_eq!(normalize(&once, &cfg), once);
        }

        #[test]
        fn lowercase_preserves_scandinavian_length(s in "[A-ZÆØÅÄÖa-zæøåäö ]{0,30}") {
            prop_assert_eq!(lowercase(&s).chars().count(), s.chars().count());
        }
    }
}
