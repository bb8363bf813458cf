//! Character n-gram language guessing with out-of-place rank distance.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{html_to_paragraphs, IngestError, RawDocument};

/// Texts shorter than this are accepted without a reliable guess.
pub const MIN_VERIFY_CHARS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    /// N-gram orders `1..=max_n`.
    pub max_n: usize,
    /// Profile size.
    pub top_k: usize,
    pub min_training_chars: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { max_n: 5, top_k: 400, min_training_chars: 10_000 }
    }
}

/// The top-K character n-grams of one language, ranked 1..=K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    lang: String,
    max_n: usize,
    ranked: Vec<String>,
    ranks: HashMap<String, usize>,
}

impl LanguageProfile {
    fn from_ranked(lang: String, max_n: usize, ranked: Vec<String>) -> Self {
        let ranks = ranked.iter().enumerate().map(|(i, g)| (g.clone(), i + 1)).collect();
        Self { lang, max_n, ranked, ranks }
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn rank(&self, ngram: &str) -> Option<usize> {
        self.ranks.get(ngram).copied()
    }

    /// N-grams in rank order.
    pub fn ngrams(&self) -> &[String] {
        &self.ranked
    }

    /// Out-of-place distance from `doc` to this profile.
    pub fn distance(&self, doc: &LanguageProfile) -> usize {
        let penalty = self.ranked.len();
        doc.ranked
            .iter()
            .enumerate()
            .map(|(i, g)| match self.ranks.get(g) {
                Some(&r) => r.abs_diff(i + 1),
                None => penalty,
            })
            .sum()
    }

    /// Serializes as lines of `<ngram>\t<rank>`, sorted by rank.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (i, g) in self.ranked.iter().enumerate() {
            let _ = writeln!(out, "{g}\t{}", i + 1);
        }
        out
    }

    /// Inverse of [`to_file_string`](Self::to_file_string).
    pub fn from_file_str(lang: &str, text: &str) -> Result<Self, IngestError> {
        let mut ranked = Vec::new();
        let mut max_n = 1;
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || IngestError::BadProfile { line: idx + 1, content: line.to_owned() };
            let (gram, rank) = line.rsplit_once('\t').ok_or_else(bad)?;
            let rank: usize = rank.parse().map_err(|_| bad())?;
            if rank != ranked.len() + 1 || gram.is_empty() {
                return Err(bad());
            }
            max_n = max_n.max(gram.chars().count());
            ranked.push(gram.to_owned());
        }
        Ok(Self::from_ranked(lang.to_owned(), max_n, ranked))
    }
}

fn count_ngrams(text: &str, max_n: usize) -> HashMap<String, usize> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let lower = text.to_lowercase();
    for word in lower.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        let padded: Vec<char> =
            std::iter::once('_').chain(word.chars()).chain(std::iter::once('_')).collect();
        for n in 1..=max_n.min(padded.len()) {
            for window in padded.windows(n) {
                if n == 1 && window[0] == '_' {
                    continue;
                }
                *counts.entry(window.iter().collect()).or_default() += 1;
            }
        }
    }
    counts
}

fn ranked_profile(lang: &str, text: &str, max_n: usize, top_k: usize) -> LanguageProfile {
    let mut entries: Vec<(String, usize)> = count_ngrams(text, max_n).into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(top_k);
    LanguageProfile::from_ranked(lang.to_owned(), max_n, entries.into_iter().map(|(g, _)| g).collect())
}

/// Builds the rank profile of the `top_k` most frequent n-grams of `training_text`.
pub fn train_language_profile(
    training_text: &str,
    lang: &str,
    options: &ProfileOptions,
) -> Result<LanguageProfile, IngestError> {
    let got = training_text.chars().count();
    if got < options.min_training_chars {
        return Err(IngestError::InsufficientTrainingData {
            lang: lang.to_owned(),
            got,
            needed: options.min_training_chars,
        });
    }
    Ok(ranked_profile(lang, training_text, options.max_n, options.top_k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guess {
    pub lang: String,
    /// `(second - best) / second` over distances; 1.0 with a single profile.
    pub confidence: f64,
    pub distance: usize,
}

/// Picks the profile with minimal out-of-place distance to `text`.
pub fn guess_language(text: &str, profiles: &[LanguageProfile]) -> Result<Guess, IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::EmptyText);
    }
    if profiles.is_empty() {
        return Err(IngestError::NoProfiles);
    }
    let max_n = profiles.iter().map(|p| p.max_n).max().unwrap_or(1);
    let top_k = profiles.iter().map(LanguageProfile::len).max().unwrap_or(0);
    let doc = ranked_profile("", text, max_n, top_k);
    let mut scored: Vec<(usize, &str)> = profiles.iter().map(|p| (p.distance(&doc), p.lang())).collect();
    scored.sort();
    let (best, lang) = scored[0];
    let confidence = match scored.get(1) {
        Some(&(second, _)) if second > 0 => (second - best) as f64 / second as f64,
        Some(_) => 0.0,
        None => 1.0,
    };
    Ok(Guess { lang: lang.to_owned(), confidence, distance: best })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accept { low_confidence: bool },
    Reject { guessed: String },
}

/// Checks that a raw document is written in its expected language.
pub fn verify_language(doc: &RawDocument, profiles: &[LanguageProfile]) -> Result<Verdict, IngestError> {
    if !profiles.iter().any(|p| p.lang() == doc.lang) {
        return Err(IngestError::MissingProfile(doc.lang.clone()));
    }
    let text = html_to_paragraphs(&doc.content).join(" ");
    if text.chars().count() < MIN_VERIFY_CHARS {
        return Ok(Verdict::Accept { low_confidence: true });
    }
    let guess = guess_language(&text, profiles)?;
    Ok(if guess.lang == doc.lang {
        Verdict::Accept { low_confidence: false }
    } else {
        Verdict::Reject { guessed: guess.lang }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(max_n: usize, top_k: usize) -> ProfileOptions {
        ProfileOptions { max_n, top_k, min_training_chars: 0 }
    }

    #[test]
    fn unigram_single_entry() {
        let p = train_language_profile("aaaa", "xx", &opts(1, 1)).unwrap();
        assert_eq!(p.ngrams(), ["a"]);
        assert_eq!(p.rank("a"), Some(1));
    }

    #[test]
    fn training_is_deterministic() {
        let text = "the quick brown fox jumps over the lazy dog and the cat";
        let a = train_language_profile(text, "en", &opts(5, 50)).unwrap();
        let b = train_language_profile(text, "en", &opts(5, 50)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert_eq!(a.rank("_"), None);
    }

    #[test]
    fn insufficient_training_data() {
        let err = train_language_profile("short", "en", &ProfileOptions::default()).unwrap_err();
        assert!(matches!(err, IngestError::InsufficientTrainingData { got: 5, .. }));
    }

    #[test]
    fn empty_text_is_an_error() {
        let p = train_language_profile("abc", "xx", &opts(3, 10)).unwrap();
        assert!(matches!(guess_language("", std::slice::from_ref(&p)), Err(IngestError::EmptyText)));
        assert!(matches!(guess_language("  ", &[p]), Err(IngestError::EmptyText)));
    }

    #[test]
    fn profile_file_round_trip() {
        let p = train_language_profile("le chat et le chien", "fr", &opts(4, 30)).unwrap();
        let text = p.to_file_string();
        assert!(text.lines().next().unwrap().ends_with("\t1"));
        let back = LanguageProfile::from_file_str("fr", &text).unwrap();
        assert_eq!(back.ngrams(), p.ngrams());
        assert!(LanguageProfile::from_file_str("fr", "a\t2\n").is_err());
    }

    #[test]
    fn ties_break_by_language_code() {
        let a = train_language_profile("abc abc", "zz", &opts(2, 10)).unwrap();
        let b = LanguageProfile::from_file_str("aa", &a.to_file_string()).unwrap();
        let g = guess_language("abc", &[a.clone(), b.clone()]).unwrap();
        assert_eq!(g.lang, "aa");
        assert_eq!(g.confidence, 0.0);
        let g2 = guess_language("abc", &[b, a]).unwrap();
        assert_eq!(g, g2);
    }
}
