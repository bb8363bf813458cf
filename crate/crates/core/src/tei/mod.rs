//! Numbered-paragraph documents and their TEI XML encoding.
//!
//! A document is a title (the `head`, paragraph 1) followed by body
//! paragraphs numbered from 2, optionally ending in a signature block and
//! an annex. Numbering runs across all sections.

mod sections;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use html_escape::{encode_double_quoted_attribute as attr, encode_text as text};
use thiserror::Error;

use crate::celex::{jrc_document_id, parse_celex, CelexId};
use crate::lang;

pub use sections::{classify_sections, SectionRules};

/// Number of the first paragraph after the title.
pub const FIRST_BODY_N: u32 = 2;

pub const DISTRIBUTOR_URL: &str = "http://wt.jrc.it/lt/acquis/";
pub const AUTHENTICITY_NOTE: &str = "Only European Community legislation printed in the paper edition of the Official Journal of the European Union is deemed authentic.";

#[derive(Debug, Error)]
pub enum TeiError {
    #[error("inconsistent section boundaries: {0}")]
    InconsistentBoundaries(String),
    #[error("invalid paragraph {n}: {reason}")]
    InvalidParagraph { n: u32, reason: &'static str },
    #[error("malformed xml: {0}")]
    MalformedXml(#[from] roxmltree::Error),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("bad marker table line {line}: {reason}")]
    BadMarkerTable { line: usize, reason: String },
}

fn schema(msg: impl Into<String>) -> TeiError {
    TeiError::SchemaViolation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Head,
    Body,
    Signature,
    Annex,
}

impl Section {
    pub fn as_str(&self) -> &'static str {
        match self {
            Section::Head => "head",
            Section::Body => "body",
            Section::Signature => "signature",
            Section::Annex => "annex",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub n: u32,
    pub text: String,
    pub section: Section,
}

/// Document-paragraph numbers where the signature and annex begin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SectionBoundaries {
    pub signature_start: Option<u32>,
    pub annex_start: Option<u32>,
}

/// Header metadata of one language version.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentMeta {
    pub celex: CelexId,
    pub lang: String,
    pub title: String,
    pub eurovoc_codes: BTreeSet<u32>,
    pub source_url: String,
    pub download_date: String,
    /// Header creation date; omitted from the header when empty.
    pub created: String,
}

impl DocumentMeta {
    /// Metadata with no EUROVOC codes and empty provenance.
    pub fn new(celex: CelexId, lang: &str, title: &str) -> Self {
        Self {
            celex,
            lang: lang.to_owned(),
            title: title.to_owned(),
            eurovoc_codes: BTreeSet::new(),
            source_url: String::new(),
            download_date: String::new(),
            created: String::new(),
        }
    }
}

/// One language version of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeiDocument {
    meta: DocumentMeta,
    paragraphs: Vec<Paragraph>,
}

fn check_text(n: u32, s: &str) -> Result<(), TeiError> {
    if s.is_empty() {
        return Err(TeiError::InvalidParagraph { n, reason: "empty text" });
    }
    if s.trim() != s {
        return Err(TeiError::InvalidParagraph { n, reason: "untrimmed text" });
    }
    if s.chars().any(|c| c.is_control() && !matches!(c, '\n' | '\t')) {
        return Err(TeiError::InvalidParagraph { n, reason: "control character" });
    }
    Ok(())
}

/// Assembles a document: the title becomes paragraph 1 and `body` is
/// numbered from 2, labeled by `boundaries`.
pub fn build_document(
    meta: DocumentMeta,
    body: Vec<String>,
    boundaries: SectionBoundaries,
) -> Result<TeiDocument, TeiError> {
    let extent = body.len() as u32 + 1;
    let in_range = |n: u32| (FIRST_BODY_N..=extent).contains(&n);
    if let Some(s) = boundaries.signature_start {
        if !in_range(s) {
            return Err(TeiError::InconsistentBoundaries(format!(
                "signature start {s} outside 2..={extent}"
            )));
        }
    }
    if let Some(a) = boundaries.annex_start {
        if !in_range(a) {
            return Err(TeiError::InconsistentBoundaries(format!("annex start {a} outside 2..={extent}")));
        }
    }
    if let (Some(s), Some(a)) = (boundaries.signature_start, boundaries.annex_start) {
        if s >= a {
            return Err(TeiError::InconsistentBoundaries(format!(
                "annex start {a} does not follow signature start {s}"
            )));
        }
    }
    check_text(1, &meta.title)?;
    let mut paragraphs = Vec::with_capacity(body.len() + 1);
    paragraphs.push(Paragraph { n: 1, text: meta.title.clone(), section: Section::Head });
    for (i, t) in body.into_iter().enumerate() {
        let n = i as u32 + FIRST_BODY_N;
        check_text(n, &t)?;
        let section = if boundaries.annex_start.is_some_and(|a| n >= a) {
            Section::Annex
        } else if boundaries.signature_start.is_some_and(|s| n >= s) {
            Section::Signature
        } else {
            Section::Body
        };
        paragraphs.push(Paragraph { n, text: t, section });
    }
    Ok(TeiDocument { meta, paragraphs })
}

impl TeiDocument {
    pub fn id(&self) -> String {
        jrc_document_id(&self.meta.celex, &self.meta.lang)
    }

    pub fn meta(&self) -> &DocumentMeta {
        &self.meta
    }

    pub fn celex(&self) -> &CelexId {
        &self.meta.celex
    }

    pub fn lang(&self) -> &str {
        &self.meta.lang
    }

    pub fn title(&self) -> &str {
        &self.meta.title
    }

    pub fn eurovoc_codes(&self) -> &BTreeSet<u32> {
        &self.meta.eurovoc_codes
    }

    pub fn paragraphs(&self) -> &[Paragraph] {
        &self.paragraphs
    }

    /// Paragraph `n`, if the document has one.
    pub fn paragraph(&self, n: u32) -> Option<&Paragraph> {
        n.checked_sub(1).and_then(|i| self.paragraphs.get(i as usize))
    }

    /// Paragraphs after the title.
    pub fn body_paragraphs(&self) -> &[Paragraph] {
        &self.paragraphs[1..]
    }

    pub fn extent(&self) -> usize {
        self.paragraphs.len()
    }

    pub fn boundaries(&self) -> SectionBoundaries {
        let first = |s| self.paragraphs.iter().find(|p| p.section == s).map(|p| p.n);
        SectionBoundaries { signature_start: first(Section::Signature), annex_start: first(Section::Annex) }
    }
}

fn language_label(code: &str) -> &str {
    lang::english_name(code).unwrap_or(code)
}

/// Writes the TEI XML encoding of `doc`.
pub fn serialize_tei(doc: &TeiDocument) -> String {
    let m = &doc.meta;
    let celex = m.celex.to_string();
    let mut out = String::new();
    let mut line = |indent: usize, s: &str| {
        for _ in 0..indent {
            out.push_str("  ");
        }
        out.push_str(s);
        out.push('\n');
    };
    line(0, r#"<?xml version="1.0" encoding="utf-8"?>"#);
    line(0, &format!(r#"<TEI.2 id="{}" n="{}" lang="{}">"#, attr(&doc.id()), attr(&celex), attr(&m.lang)));
    if m.created.is_empty() {
        line(1, r#"<teiHeader lang="en">"#);
    } else {
        line(1, &format!(r#"<teiHeader lang="en" date.created="{}">"#, attr(&m.created)));
    }
    line(2, "<fileDesc>");
    line(3, "<titleStmt>");
    line(4, &format!("<title>JRC-ACQUIS {} {}</title>", text(&celex), text(language_label(&m.lang))));
    line(4, &format!("<title>{}</title>", text(&m.title)));
    line(3, "</titleStmt>");
    line(3, &format!("<extent>{} paragraph segments</extent>", doc.extent()));
    line(3, "<publicationStmt>");
    line(4, "<distributor>");
    line(5, &format!(r#"<xref url="{DISTRIBUTOR_URL}">{DISTRIBUTOR_URL}</xref>"#));
    line(4, "</distributor>");
    line(3, "</publicationStmt>");
    line(3, "<notesStmt>");
    line(4, &format!("<note>{AUTHENTICITY_NOTE}</note>"));
    line(3, "</notesStmt>");
    line(3, "<sourceDesc>");
    line(
        4,
        &format!(
            r#"<bibl>Downloaded from <xref url="{}">{}</xref> on <date>{}</date></bibl>"#,
            attr(&m.source_url),
            text(&m.source_url),
            text(&m.download_date)
        ),
    );
    line(3, "</sourceDesc>");
    line(2, "</fileDesc>");
    if !m.eurovoc_codes.is_empty() {
        line(2, "<profileDesc>");
        line(3, "<textClass>");
        for code in &m.eurovoc_codes {
            line(4, &format!(r#"<classCode scheme="eurovoc">{code}</classCode>"#));
        }
        line(3, "</textClass>");
        line(2, "</profileDesc>");
    }
    line(1, "</teiHeader>");
    line(1, "<text>");
    line(2, "<body>");
    line(3, &format!(r#"<head n="1">{}</head>"#, text(&doc.paragraphs[0].text)));
    // The body div is always present, even when empty.
    line(3, r#"<div type="body">"#);
    let mut open = Section::Body;
    for p in doc.body_paragraphs() {
        if p.section != open {
            line(3, "</div>");
            line(3, &format!(r#"<div type="{}">"#, p.section));
            open = p.section;
        }
        line(4, &format!(r#"<p n="{}">{}</p>"#, p.n, text(&p.text)));
    }
    line(3, "</div>");
    line(2, "</body>");
    line(1, "</text>");
    line(0, "</TEI.2>");
    out
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Result<roxmltree::Node<'a, 'i>, TeiError> {
    node.children()
        .find(|c| c.has_tag_name(name))
        .ok_or_else(|| schema(format!("<{}> lacks <{name}>", node.tag_name().name())))
}

fn required_attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str, TeiError> {
    node.attribute(name).ok_or_else(|| schema(format!("<{}> lacks @{name}", node.tag_name().name())))
}

fn node_text(node: roxmltree::Node) -> String {
    node.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect()
}

/// Parses the TEI XML encoding produced by [`serialize_tei`].
pub fn parse_tei(xml: &str) -> Result<TeiDocument, TeiError> {
    let tree = roxmltree::Document::parse(xml)?;
    let root = tree.root_element();
    if !root.has_tag_name("TEI.2") {
        return Err(schema(format!("root element is <{}>", root.tag_name().name())));
    }
    let id = required_attr(root, "id")?;
    let celex = parse_celex(required_attr(root, "n")?).map_err(|e| schema(format!("bad @n: {e}")))?;
    let lang = required_attr(root, "lang")?.to_owned();
    if id != jrc_document_id(&celex, &lang) {
        return Err(schema(format!("@id {id:?} does not match celex and lang")));
    }

    let header = child(root, "teiHeader")?;
    let created = header.attribute("date.created").unwrap_or_default().to_owned();
    let file_desc = child(header, "fileDesc")?;
    let titles: Vec<_> =
        child(file_desc, "titleStmt")?.children().filter(|c| c.has_tag_name("title")).collect();
    let title =
        titles.get(1).map(|t| node_text(*t)).ok_or_else(|| schema("titleStmt needs two <title> elements"))?;
    let extent_text = node_text(child(file_desc, "extent")?);
    let extent: usize = extent_text
        .strip_suffix(" paragraph segments")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| schema(format!("bad extent {extent_text:?}")))?;
    let bibl = child(child(file_desc, "sourceDesc")?, "bibl")?;
    let source_url = required_attr(child(bibl, "xref")?, "url")?.to_owned();
    let download_date = node_text(child(bibl, "date")?);

    let mut eurovoc_codes = BTreeSet::new();
    if let Some(profile) = header.children().find(|c| c.has_tag_name("profileDesc")) {
        for code in profile
            .descendants()
            .filter(|d| d.has_tag_name("classCode") && d.attribute("scheme") == Some("eurovoc"))
        {
            let t = node_text(code);
            eurovoc_codes
                .insert(t.trim().parse().map_err(|_| schema(format!("non-numeric eurovoc code {t:?}")))?);
        }
    }

    let body = child(child(root, "text")?, "body")?;
    let head = child(body, "head")?;
    if head.attribute("n") != Some("1") {
        return Err(schema("<head> must carry n=\"1\""));
    }
    let mut paragraphs = vec![Paragraph { n: 1, text: node_text(head), section: Section::Head }];
    let mut last_section = Section::Head;
    let mut saw_body = false;
    for div in body.children().filter(|c| c.has_tag_name("div")) {
        let section = match required_attr(div, "type")? {
            "body" => Section::Body,
            "signature" => Section::Signature,
            "annex" => Section::Annex,
            other => return Err(schema(format!("unknown div type {other:?}"))),
        };
        if section <= last_section {
            return Err(schema(format!("div {section} out of order")));
        }
        saw_body |= section == Section::Body;
        last_section = section;
        for p in div.children().filter(|c| c.has_tag_name("p")) {
            let n: u32 =
                required_attr(p, "n")?.parse().map_err(|_| schema("non-numeric paragraph number"))?;
            let expected = paragraphs.len() as u32 + 1;
            if n != expected {
                return Err(schema(format!("paragraph {n} where {expected} was expected")));
            }
            paragraphs.push(Paragraph { n, text: node_text(p), section });
        }
    }
    if !saw_body {
        return Err(schema("missing <div type=\"body\">"));
    }
    if paragraphs.len() != extent {
        return Err(schema(format!("extent says {extent} but {} paragraphs found", paragraphs.len())));
    }
    for p in &paragraphs {
        check_text(p.n, &p.text)?;
    }
    if paragraphs[0].text != title {
        return Err(schema("head paragraph differs from the title"));
    }
    Ok(TeiDocument {
        meta: DocumentMeta { celex, lang, title, eurovoc_codes, source_url, download_date, created },
        paragraphs,
    })
}

/// Writes the document's paragraph texts, one per line, as `n<TAB>section<TAB>text`.
pub fn paragraph_listing(doc: &TeiDocument) -> String {
    let mut out = String::new();
    for p in &doc.paragraphs {
        let _ = writeln!(out, "{}\t{}\t{}", p.n, p.section, p.text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta(title: &str) -> DocumentMeta {
        DocumentMeta {
            celex: parse_celex("42004D0097").unwrap(),
            lang: "fr".into(),
            title: title.into(),
            eurovoc_codes: BTreeSet::from([4180, 5769]),
            source_url:
                "http://europa.eu.int/eur-lex/lex/LexUriServ/LexUriServ.do?uri=CELEX:42004D0097:fr:HTML"
                    .into(),
            download_date: "2006-02-20/22".into(),
            created: "2006-03-05".into(),
        }
    }

    fn body(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("Paragraphe {i}")).collect()
    }

    #[test]
    fn title_plus_39_paragraphs_has_extent_40() {
        let doc = build_document(meta("Décision"), body(39), SectionBoundaries::default()).unwrap();
        assert_eq!(doc.extent(), 40);
        assert!(serialize_tei(&doc).contains("<extent>40 paragraph segments</extent>"));
        assert_eq!(doc.paragraph(1).unwrap().section, Section::Head);
        assert_eq!(doc.paragraph(2).unwrap().n, 2);
        assert_eq!(doc.id(), "jrc42004D0097-fr");
    }

    #[test]
    fn title_only_document() {
        let doc = build_document(meta("Décision"), vec![], SectionBoundaries::default()).unwrap();
        assert_eq!(doc.extent(), 1);
        assert_eq!(doc.paragraphs()[0].section, Section::Head);
        let xml = serialize_tei(&doc);
        assert_eq!(parse_tei(&xml).unwrap(), doc);
    }

    #[test]
    fn annex_before_signature_rejected() {
        let b = SectionBoundaries { signature_start: Some(6), annex_start: Some(4) };
        assert!(matches!(build_document(meta("T"), body(8), b), Err(TeiError::InconsistentBoundaries(_))));
        let out_of_range = SectionBoundaries { signature_start: Some(20), annex_start: None };
        assert!(build_document(meta("T"), body(8), out_of_range).is_err());
        let on_title = SectionBoundaries { signature_start: Some(1), annex_start: None };
        assert!(build_document(meta("T"), body(8), on_title).is_err());
    }

    #[test]
    fn rejects_blank_paragraphs() {
        let err = build_document(meta("T"), vec!["ok".into(), " ".into()], SectionBoundaries::default());
        assert!(matches!(err, Err(TeiError::InvalidParagraph { n: 3, .. })));
    }

    #[test]
    fn eurovoc_codes_in_header() {
        let doc = build_document(meta("T"), body(2), SectionBoundaries::default()).unwrap();
        let xml = serialize_tei(&doc);
        assert!(xml.contains(r#"<classCode scheme="eurovoc">4180</classCode>"#));
        assert!(xml.contains(r#"<classCode scheme="eurovoc">5769</classCode>"#));
        assert!(xml.contains("<title>JRC-ACQUIS 42004D0097 French</title>"));
    }

    #[test]
    fn signature_div_wraps_its_paragraphs() {
        let mut paras = body(18);
        paras.extend(
            [
                "Done at Brussels, 21 December 1984.",
                "For the Commission",
                "Karl-Heinz NARJES",
                "Member of the Commission",
                "(1) OJ No 196, 16. 8. 1967, p. 1.",
                "(2) OJ No L 259, 15. 10. 1979, p. 10.",
            ]
            .map(String::from),
        );
        let b = classify_sections(&paras);
        assert_eq!(b.signature_start, Some(20));
        let doc = build_document(meta("T"), paras, b).unwrap();
        let xml = serialize_tei(&doc);
        let sig = xml.split(r#"<div type="signature">"#).nth(1).unwrap();
        let sig = sig.split("</div>").next().unwrap();
        let ns: Vec<&str> =
            sig.lines().filter_map(|l| l.trim().strip_prefix("<p n=\"")).map(|l| &l[..2]).collect();
        assert_eq!(ns, ["20", "21", "22", "23", "24", "25"]);
    }

    #[test]
    fn truncated_xml_is_malformed() {
        let doc = build_document(meta("T"), body(3), SectionBoundaries::default()).unwrap();
        let xml = serialize_tei(&doc);
        assert!(matches!(parse_tei(&xml[..xml.len() / 2]), Err(TeiError::MalformedXml(_))));
    }

    #[test]
    fn schema_violations() {
        let doc = build_document(meta("T"), body(3), SectionBoundaries::default()).unwrap();
        let xml = serialize_tei(&doc);
        for (from, to) in [
            ("<extent>4 paragraph", "<extent>5 paragraph"),
            ("<p n=\"3\">", "<p n=\"7\">"),
            ("id=\"jrc42004D0097-fr\"", "id=\"jrc42004D0097-de\""),
            ("<head n=\"1\">T</head>", ""),
            ("<div type=\"body\">", "<div type=\"preface\">"),
        ] {
            let broken = xml.replace(from, to);
            assert!(matches!(parse_tei(&broken), Err(TeiError::SchemaViolation(_))), "{from}");
        }
    }

    fn arb_text() -> impl Strategy<Value = String> {
        proptest::collection::vec("[a-zA-Zéàüœ0-9&<>\"'.,;()]{1,8}", 1..6).prop_map(|w| w.join(" "))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn serialize_parse_round_trip(
            title in arb_text(),
            paras in proptest::collection::vec(arb_text(), 0..12),
            sig in proptest::option::of(0usize..12),
            annex in proptest::option::of(0usize..12),
            codes in proptest::collection::btree_set(1u32..8000, 0..4),
        ) {
            let extent = paras.len() as u32 + 1;
            let clamp = |x: usize| (x as u32 + 2).min(extent);
            let mut b = SectionBoundaries {
                signature_start: sig.filter(|_| extent >= 2).map(clamp),
                annex_start: annex.filter(|_| extent >= 2).map(clamp),
            };
            if let (Some(s), Some(a)) = (b.signature_start, b.annex_start) {
                if s >= a { b.annex_start = None; }
            }
            let mut m = meta(&title);
            m.eurovoc_codes = codes;
            let doc = build_document(m, paras, b).unwrap();
            let xml = serialize_tei(&doc);
            let back = parse_tei(&xml).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(serialize_tei(&back), xml);
            prop_assert_eq!(back.boundaries(), b);
            for (i, p) in back.paragraphs().iter().enumerate() {
                prop_assert_eq!(p.n as usize, i + 1);
            }
        }
    }
}
