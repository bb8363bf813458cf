//! Per-language size table and EUROVOC descriptor frequencies.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::tei::{Section, TeiDocument};

/// Number of maximal non-whitespace runs.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Size figures of one language; the title counts as body text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LanguageStats {
    pub lang: String,
    pub n_texts: usize,
    pub body_words: usize,
    /// Characters of body paragraph text, spaces included.
    pub body_chars: usize,
    pub signature_words: usize,
    pub annex_words: usize,
    pub total_words: usize,
    pub avg_body_words: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    texts: usize,
    body_words: usize,
    body_chars: usize,
    signature_words: usize,
    annex_words: usize,
}

impl Counts {
    fn of(doc: &TeiDocument) -> Self {
        let mut c = Counts { texts: 1, ..Counts::default() };
        for p in doc.paragraphs() {
            let words = word_count(&p.text);
            match p.section {
                Section::Head | Section::Body => {
                    c.body_words += words;
                    c.body_chars += p.text.chars().count();
                }
                Section::Signature => c.signature_words += words,
                Section::Annex => c.annex_words += words,
            }
        }
        c
    }

    fn add(self, o: Counts) -> Counts {
        Counts {
            texts: self.texts + o.texts,
            body_words: self.body_words + o.body_words,
            body_chars: self.body_chars + o.body_chars,
            signature_words: self.signature_words + o.signature_words,
            annex_words: self.annex_words + o.annex_words,
        }
    }
}

/// One row per language present, sorted by language code.
pub fn corpus_stats_table(corpus: &[TeiDocument]) -> Vec<LanguageStats> {
    let per_lang = corpus.par_iter().map(|d| BTreeMap::from([(d.lang().to_owned(), Counts::of(d))])).reduce(
        BTreeMap::new,
        |mut a, b| {
            for (lang, c) in b {
                let e = a.entry(lang).or_default();
                *e = e.add(c);
            }
            a
        },
    );
    per_lang
        .into_iter()
        .map(|(lang, c)| LanguageStats {
            lang,
            n_texts: c.texts,
            body_words: c.body_words,
            body_chars: c.body_chars,
            signature_words: c.signature_words,
            annex_words: c.annex_words,
            total_words: c.body_words + c.signature_words + c.annex_words,
            avg_body_words: if c.texts == 0 { 0.0 } else { c.body_words as f64 / c.texts as f64 },
        })
        .collect()
}

const COLUMNS: [&str; 8] = [
    "lang",
    "texts",
    "body_words",
    "body_chars",
    "avg_body_words",
    "signature_words",
    "annex_words",
    "total_words",
];

pub fn stats_to_csv(rows: &[LanguageStats]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.2},{},{},{}",
            r.lang,
            r.n_texts,
            r.body_words,
            r.body_chars,
            r.avg_body_words,
            r.signature_words,
            r.annex_words,
            r.total_words
        );
    }
    out
}

/// Right-aligned columns; the average is truncated to an integer.
pub fn stats_to_text(rows: &[LanguageStats]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.lang.clone(),
                r.n_texts.to_string(),
                r.body_words.to_string(),
                r.body_chars.to_string(),
                (r.avg_body_words.trunc() as u64).to_string(),
                r.signature_words.to_string(),
                r.annex_words.to_string(),
                r.total_words.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|i| cells.iter().map(|c| c[i].len()).chain([COLUMNS[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let header: Vec<&str> = COLUMNS.to_vec();
    for row in std::iter::once(header.iter().map(|s| s.to_string()).collect::<Vec<_>>()).chain(cells) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Descriptor codes with document counts, most frequent first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DescriptorFrequency {
    pub entries: Vec<(u32, usize)>,
}

impl DescriptorFrequency {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eurovoc,documents\n");
        for (code, n) in &self.entries {
            let _ = writeln!(out, "{code},{n}");
        }
        out
    }
}

/// Counts documents per EUROVOC code; ties sort by ascending code.
pub fn eurovoc_frequency(corpus: &[TeiDocument], top_n: usize) -> DescriptorFrequency {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for doc in corpus {
        for &code in doc.eurovoc_codes() {
            *counts.entry(code).or_default() += 1;
        }
    }
    let mut entries: Vec<(u32, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.truncate(top_n);
    DescriptorFrequency { entries }
}
