//! Regular-expression detection of signature and annex blocks.

use std::sync::OnceLock;

use regex::Regex;

use super::{SectionBoundaries, TeiError, FIRST_BODY_N};

const DEFAULT_MARKERS: &str = include_str!("../../data/section_markers.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MarkerKind {
    DoneAt,
    Role,
    Footnote,
    Annex,
}

/// Marker patterns loaded from a `kind<TAB>lang<TAB>regex` table.
#[derive(Debug, Clone)]
pub struct SectionRules {
    markers: Vec<(MarkerKind, Regex)>,
}

impl SectionRules {
    pub fn parse(table: &str) -> Result<Self, TeiError> {
        let mut markers = Vec::new();
        for (idx, line) in table.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| TeiError::BadMarkerTable { line: idx + 1, reason };
            let mut cols = line.splitn(3, '\t');
            let (Some(kind), Some(_lang), Some(pattern)) = (cols.next(), cols.next(), cols.next()) else {
                return Err(bad("expected three tab-separated columns".into()));
            };
            let kind = match kind {
                "done_at" => MarkerKind::DoneAt,
                "role" => MarkerKind::Role,
                "footnote" => MarkerKind::Footnote,
                "annex" => MarkerKind::Annex,
                other => return Err(bad(format!("unknown marker kind {other:?}"))),
            };
            let re = Regex::new(pattern).map_err(|e| bad(e.to_string()))?;
            markers.push((kind, re));
        }
        Ok(Self { markers })
    }

    /// The bundled multilingual marker table.
    pub fn builtin() -> &'static SectionRules {
        static RULES: OnceLock<SectionRules> = OnceLock::new();
        RULES.get_or_init(|| SectionRules::parse(DEFAULT_MARKERS).expect("bundled marker table"))
    }

    fn is(&self, kind: MarkerKind, text: &str) -> bool {
        self.markers.iter().any(|(k, re)| *k == kind && re.is_match(text))
    }

    /// Finds the signature and annex starts among body paragraphs.
    ///
    /// `paragraphs` are the paragraphs following the title, so index `i`
    /// is document paragraph `i + 2`. The signature starts at the last
    /// "Done at" line, else at the first role line, else at a trailing run
    /// of Official Journal footnotes. The annex starts at the first annex
    /// heading after the signature (anywhere after the first paragraph when
    /// there is no signature).
    pub fn classify(&self, paragraphs: &[impl AsRef<str>]) -> SectionBoundaries {
        let texts: Vec<&str> = paragraphs.iter().map(|p| p.as_ref().trim()).collect();
        let find_first = |kind, from: usize| (from..texts.len()).find(|&i| self.is(kind, texts[i]));

        let mut signature = (0..texts.len())
            .rev()
            .find(|&i| self.is(MarkerKind::DoneAt, texts[i]))
            .or_else(|| find_first(MarkerKind::Role, 1));

        let annex = match signature {
            Some(sig) => find_first(MarkerKind::Annex, sig + 1),
            None => find_first(MarkerKind::Annex, 1),
        };

        if signature.is_none() {
            let end = annex.unwrap_or(texts.len());
            let mut start = end;
            while start > 1 && self.is(MarkerKind::Footnote, texts[start - 1]) {
                start -= 1;
            }
            if start < end {
                signature = Some(start);
            }
        }

        let to_n = |i: usize| i as u32 + FIRST_BODY_N;
        SectionBoundaries { signature_start: signature.map(to_n), annex_start: annex.map(to_n) }
    }
}

/// Classifies with the bundled marker table.
pub fn classify_sections(paragraphs: &[impl AsRef<str>]) -> SectionBoundaries {
    SectionRules::builtin().classify(paragraphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_starts_at_done_at() {
        let paras = [
            "Article 1 This Decision is addressed to the Member States.",
            "Done at Brussels, 21 December 1984.",
            "For the Commission",
            "Karl-Heinz NARJES",
            "Member of the Commission",
            "(1) OJ No 196, 16. 8. 1967, p. 1.",
        ];
        let b = classify_sections(&paras);
        assert_eq!(b.signature_start, Some(3));
        assert_eq!(b.annex_start, None);
    }

    #[test]
    fn body_only() {
        let b = classify_sections(&["Article 1", "The Commission shall adopt measures.", "Article 2"]);
        assert_eq!(b, SectionBoundaries::default());
    }

    #[test]
    fn annex_after_signature() {
        let b = classify_sections(&[
            "Considérant ce qui suit:",
            "Fait à Bruxelles, le 13 décembre 2003.",
            "Par le Conseil",
            "Le président",
            "ANNEXE I",
            "Liste des produits",
        ]);
        assert_eq!(b.signature_start, Some(3));
        assert_eq!(b.annex_start, Some(6));
    }

    #[test]
    fn annex_without_signature_and_trailing_footnotes() {
        let b = classify_sections(&[
            "Artikel 1",
            "Text des Artikels.",
            "(1) ABl. L 259 vom 15.10.1979, S. 10.",
            "ANHANG",
            "Tabelle",
        ]);
        assert_eq!(b.signature_start, Some(4));
        assert_eq!(b.annex_start, Some(5));
    }

    #[test]
    fn annex_heading_before_done_at_ignored() {
        let b = classify_sections(&["see ANNEX", "ANNEX", "Done at Luxembourg, 1 June 1990."]);
        assert_eq!(b.signature_start, Some(4));
        assert_eq!(b.annex_start, None);
    }

    #[test]
    fn malformed_table_rejected() {
        assert!(SectionRules::parse("done_at\ten\t(").is_err());
        assert!(SectionRules::parse("preamble\ten\tx").is_err());
        assert!(SectionRules::parse("done_at x").is_err());
        assert!(SectionRules::parse("# comment only\n").is_ok());
    }
}
