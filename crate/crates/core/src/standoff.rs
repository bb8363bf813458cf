//! Stand-off alignment files, in-place bitext generation and alignment
//! statistics.
//!
//! Stand-off XML dialect (one file per language pair):
//!
//! ```xml
//! <linkList src="et" tgt="mt" aligner="gale_church" params="...">
//!   <linkGrp n="31960D0511" id="jrc31960D0511-et-mt">
//!     <link type="2-1" src="6;7" tgt="6" score="3.25"/>
//!   </linkGrp>
//! </linkList>
//! ```
//!
//! The CSV form starts with a `#` line carrying the same provenance,
//! followed by `celex,arity,src_pars,tgt_pars,score`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use html_escape::{encode_double_quoted_attribute as attr, encode_text as text};
use thiserror::Error;

use crate::align::{validate_links, Aligner, AlignmentLink, Arity, BitextAlignment};
use crate::celex::{jrc_pair_id, parse_celex, CelexId};
use crate::tei::{TeiDocument, FIRST_BODY_N};

pub const CSV_VERSION: &str = "acquis-alignment-csv 1";
pub const CSV_HEADER: &str = "celex,arity,src_pars,tgt_pars,score";

#[derive(Debug, Error)]
pub enum StandoffError {
    #[error("malformed xml: {0}")]
    MalformedXml(String),
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    #[error("dangling pointer: {lang} paragraph {n} does not exist in {celex}")]
    DanglingPointer { celex: CelexId, lang: String, n: u32 },
    #[error("documents do not match: {0}")]
    Mismatch(String),
    #[error("mismatched document sets: {0}")]
    MismatchedDocumentSets(String),
    #[error("empty alignment collection")]
    EmptyCollection,
    #[error(transparent)]
    Align(#[from] crate::align::AlignError),
}

impl From<roxmltree::Error> for StandoffError {
    fn from(e: roxmltree::Error) -> Self {
        StandoffError::MalformedXml(e.to_string())
    }
}

/// Pointer-only alignments of one language pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StandoffFile {
    pub src_lang: String,
    pub tgt_lang: String,
    pub aligner: Option<Aligner>,
    pub params_digest: String,
    /// Sorted by celex.
    pub entries: Vec<(CelexId, Vec<AlignmentLink>)>,
}

impl StandoffFile {
    pub fn new(src_lang: &str, tgt_lang: &str) -> Self {
        Self {
            src_lang: src_lang.to_owned(),
            tgt_lang: tgt_lang.to_owned(),
            aligner: None,
            params_digest: String::new(),
            entries: Vec::new(),
        }
    }

    /// Collects alignments of one pair and one aligner, sorted by celex.
    pub fn from_alignments(alignments: &[BitextAlignment]) -> Result<Self, StandoffError> {
        let first = alignments.first().ok_or(StandoffError::EmptyCollection)?;
        let mut file = StandoffFile::new(&first.src_lang, &first.tgt_lang);
        file.aligner = Some(first.aligner);
        file.params_digest = first.params_digest.clone();
        for a in alignments {
            if a.src_lang != file.src_lang || a.tgt_lang != file.tgt_lang || a.aligner != first.aligner {
                return Err(StandoffError::Mismatch(format!(
                    "{} {}-{} by {} in a {}-{} file by {}",
                    a.celex, a.src_lang, a.tgt_lang, a.aligner, file.src_lang, file.tgt_lang, first.aligner
                )));
            }
            file.entries.push((a.celex, a.links.clone()));
        }
        file.entries.sort_by_key(|e| e.0);
        Ok(file)
    }

    /// Expands back into per-document alignments.
    pub fn to_alignments(&self) -> Vec<BitextAlignment> {
        self.entries
            .iter()
            .map(|(celex, links)| BitextAlignment {
                celex: *celex,
                src_lang: self.src_lang.clone(),
                tgt_lang: self.tgt_lang.clone(),
                links: links.clone(),
                aligner: self.aligner.unwrap_or(Aligner::GaleChurch),
                params_digest: self.params_digest.clone(),
            })
            .collect()
    }
}

fn join_pars(pars: &[u32]) -> String {
    pars.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

fn split_pars(s: &str) -> Result<Vec<u32>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|p| p.parse::<u32>().map_err(|_| format!("non-numeric paragraph pointer {p:?}")))
        .collect()
}

fn checked_link(arity: &str, src: &str, tgt: &str, score: Option<f64>) -> Result<AlignmentLink, String> {
    let arity: Arity = arity.parse()?;
    let link = AlignmentLink::new(split_pars(src)?, split_pars(tgt)?, score);
    if link.arity() != arity {
        return Err(format!("type {arity} does not match pointers {src:?}/{tgt:?}"));
    }
    Ok(link)
}

fn required<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str, StandoffError> {
    node.attribute(name)
        .ok_or_else(|| StandoffError::MalformedXml(format!("<{}> lacks {name}", node.tag_name().name())))
}

pub fn export_standoff_xml(file: &StandoffFile) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let _ = write!(out, r#"<linkList src="{}" tgt="{}""#, attr(&file.src_lang), attr(&file.tgt_lang));
    if let Some(a) = file.aligner {
        let _ = write!(out, r#" aligner="{a}""#);
    }
    let _ = writeln!(out, r#" params="{}">"#, attr(&file.params_digest));
    for (celex, links) in &file.entries {
        let _ = writeln!(
            out,
            r#"  <linkGrp n="{celex}" id="{}">"#,
            attr(&jrc_pair_id(celex, &file.src_lang, &file.tgt_lang))
        );
        for link in links {
            let _ = write!(
                out,
                r#"    <link type="{}" src="{}" tgt="{}""#,
                link.arity(),
                join_pars(&link.src_pars),
                join_pars(&link.tgt_pars)
            );
            if let Some(s) = link.score {
                let _ = write!(out, r#" score="{s}""#);
            }
            out.push_str("/>\n");
        }
        out.push_str("  </linkGrp>\n");
    }
    out.push_str("</linkList>\n");
    out
}

pub fn import_standoff_xml(xml: &str) -> Result<StandoffFile, StandoffError> {
    let doc = roxmltree::Document::parse(xml)?;
    let bad = |m: String| StandoffError::MalformedXml(m);
    let root = doc.root_element();
    if !root.has_tag_name("linkList") {
        return Err(bad(format!("unexpected root <{}>", root.tag_name().name())));
    }
    let mut file = StandoffFile::new(required(root, "src")?, required(root, "tgt")?);
    file.aligner = root.attribute("aligner").map(|a| a.parse::<Aligner>().map_err(bad)).transpose()?;
    file.params_digest = root.attribute("params").unwrap_or_default().to_owned();
    for grp in root.children().filter(|c| c.is_element()) {
        if !grp.has_tag_name("linkGrp") {
            return Err(bad(format!("unexpected <{}>", grp.tag_name().name())));
        }
        let celex = parse_celex(required(grp, "n")?).map_err(|e| bad(e.to_string()))?;
        let mut links = Vec::new();
        for l in grp.children().filter(|c| c.is_element()) {
            if !l.has_tag_name("link") {
                return Err(bad(format!("unexpected <{}>", l.tag_name().name())));
            }
            let score = l
                .attribute("score")
                .map(|s| s.parse::<f64>().map_err(|_| bad(format!("bad score {s:?}"))))
                .transpose()?;
            links.push(
                checked_link(required(l, "type")?, required(l, "src")?, required(l, "tgt")?, score)
                    .map_err(bad)?,
            );
        }
        file.entries.push((celex, links));
    }
    if file.entries.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(bad("link groups are not sorted by celex".into()));
    }
    Ok(file)
}

pub fn export_csv(file: &StandoffFile) -> String {
    let mut out = format!(
        "# {CSV_VERSION} src={} tgt={} aligner={} params={}\n",
        file.src_lang,
        file.tgt_lang,
        file.aligner.map_or("", |a| a.as_str()),
        file.params_digest
    );
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let _ = w.write_record(CSV_HEADER.split(','));
    for (celex, links) in &file.entries {
        for link in links {
            let _ = w.write_record([
                celex.to_string(),
                link.arity().to_string(),
                join_pars(&link.src_pars),
                join_pars(&link.tgt_pars),
                link.score.map(|s| format!("{s:.6}")).unwrap_or_default(),
            ]);
        }
    }
    let body = w.into_inner().expect("in-memory writer");
    out.push_str(&String::from_utf8(body).expect("utf-8 fields"));
    out
}

/// Inverse of [`export_csv`]; scores come back rounded to 6 decimals.
/// Documents without links have no rows and are not recovered.
pub fn import_csv(text: &str) -> Result<StandoffFile, StandoffError> {
    let bad = |m: String| StandoffError::MalformedCsv(m);
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let meta = first
        .strip_prefix("# ")
        .and_then(|m| m.strip_prefix(CSV_VERSION))
        .ok_or_else(|| bad(format!("missing version line, found {first:?}")))?;
    let (head, params) = meta.split_once(" params=").unwrap_or((meta, ""));
    let mut kv: HashMap<&str, &str> = HashMap::new();
    for item in head.split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("bad field {item:?}")))?;
        kv.insert(k, v);
    }
    let field = |k: &str| kv.get(k).copied().ok_or_else(|| bad(format!("version line lacks {k}")));
    let mut file = StandoffFile::new(field("src")?, field("tgt")?);
    file.aligner = match field("aligner")? {
        "" => None,
        a => Some(a.parse().map_err(bad)?),
    };
    file.params_digest = params.to_owned();

    let mut reader = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut grouped: BTreeMap<CelexId, Vec<AlignmentLink>> = BTreeMap::new();
    for record in reader.records() {
        let r = record.map_err(|e| bad(e.to_string()))?;
        if r.len() != 5 {
            return Err(bad(format!("expected 5 columns, got {}", r.len())));
        }
        let celex = parse_celex(&r[0]).map_err(|e| bad(e.to_string()))?;
        let score = match &r[4] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| bad(format!("bad score {s:?}")))?),
        };
        let link = checked_link(&r[1], &r[2], &r[3], score).map_err(bad)?;
        grouped.entry(celex).or_default().push(link);
    }
    file.entries = grouped.into_iter().collect();
    Ok(file)
}

/// Writes the bilingual in-place form of one document pair.
///
/// Links must point at existing body paragraphs and cover both documents
/// completely; both titles are emitted as `n="1"` heads.
pub fn generate_inplace(
    src: &TeiDocument,
    tgt: &TeiDocument,
    links: &[AlignmentLink],
) -> Result<String, StandoffError> {
    if src.celex() != tgt.celex() {
        return Err(StandoffError::Mismatch(format!("{} vs {}", src.celex(), tgt.celex())));
    }
    let celex = *src.celex();
    for (doc, pick) in [(src, 0), (tgt, 1)] {
        for link in links {
            let pars = if pick == 0 { &link.src_pars } else { &link.tgt_pars };
            if let Some(&n) = pars.iter().find(|&&n| n < FIRST_BODY_N || doc.paragraph(n).is_none()) {
                return Err(StandoffError::DanglingPointer { celex, lang: doc.lang().to_owned(), n });
            }
        }
    }
    validate_links(links, FIRST_BODY_N, src.extent() as u32, tgt.extent() as u32)?;

    let (sl, tl) = (src.lang(), tgt.lang());
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<div type="body" n="{celex}" select="{} {}" id="{}" org="uniform" sample="complete" part="N" TEIform="div">"#,
        attr(sl),
        attr(tl),
        attr(&jrc_pair_id(&celex, sl, tl))
    );
    for doc in [src, tgt] {
        let _ = writeln!(
            out,
            r#"  <head lang="{}" n="1" TEIform="head">{}</head>"#,
            attr(doc.lang()),
            text(doc.title())
        );
    }
    for link in links {
        let _ = writeln!(out, r#"  <ab type="{}" part="N" TEIform="ab">"#, link.arity());
        for (doc, pars) in [(src, &link.src_pars), (tgt, &link.tgt_pars)] {
            for &n in pars {
                let p = doc.paragraph(n).expect("checked above");
                let _ = writeln!(
                    out,
                    r#"    <seg lang="{}" n="{n}" part="N" TEIform="seg">{}</seg>"#,
                    attr(doc.lang()),
                    text(&p.text)
                );
            }
        }
        out.push_str("  </ab>\n");
    }
    out.push_str("</div>\n");
    Ok(out)
}

/// Content of an in-place bitext, as read back from its XML.
#[derive(Debug, Clone, PartialEq)]
pub struct InplaceBitext {
    pub celex: CelexId,
    pub src_lang: String,
    pub tgt_lang: String,
    pub titles: (String, String),
    /// Links with the segment texts they hold.
    pub beads: Vec<(AlignmentLink, Vec<String>, Vec<String>)>,
}

pub fn parse_inplace(xml: &str) -> Result<InplaceBitext, StandoffError> {
    let doc = roxmltree::Document::parse(xml)?;
    let bad = |m: String| StandoffError::MalformedXml(m);
    let root = doc.root_element();
    let celex = parse_celex(required(root, "n")?).map_err(|e| bad(e.to_string()))?;
    let (sl, tl) = required(root, "select")?
        .split_once(' ')
        .ok_or_else(|| bad("select must name two languages".into()))?;
    let heads: Vec<_> = root.children().filter(|c| c.has_tag_name("head")).collect();
    let head_text = |lang: &str| {
        heads
            .iter()
            .find(|h| h.attribute("lang") == Some(lang))
            .map(|h| h.text().unwrap_or_default().to_owned())
            .ok_or_else(|| bad(format!("no {lang} head")))
    };
    let titles = (head_text(sl)?, head_text(tl)?);
    let mut beads = Vec::new();
    for ab in root.children().filter(|c| c.has_tag_name("ab")) {
        let (mut sp, mut tp, mut st, mut tt) = (vec![], vec![], vec![], vec![]);
        for seg in ab.children().filter(|c| c.has_tag_name("seg")) {
            let n: u32 = required(seg, "n")?.parse().map_err(|_| bad("non-numeric seg number".into()))?;
            let body = seg.text().unwrap_or_default().to_owned();
            match required(seg, "lang")? {
                l if l == sl => {
                    sp.push(n);
                    st.push(body);
                }
                l if l == tl => {
                    tp.push(n);
                    tt.push(body);
                }
                other => return Err(bad(format!("seg in unexpected language {other:?}"))),
            }
        }
        let link = AlignmentLink::new(sp, tp, None);
        if link.arity().to_string() != required(ab, "type")? {
            return Err(bad(format!("ab type does not match its segs ({})", link.arity())));
        }
        beads.push((link, st, tt));
    }
    Ok(InplaceBitext { celex, src_lang: sl.to_owned(), tgt_lang: tl.to_owned(), titles, beads })
}

/// Arity shares by link count and by paragraphs covered (both sides).
#[derive(Debug, Clone, PartialEq)]
pub struct ArityDistribution {
    pub by_link: BTreeMap<Arity, f64>,
    pub by_paragraph: BTreeMap<Arity, f64>,
}

pub fn arity_distribution(alignments: &[BitextAlignment]) -> Result<ArityDistribution, StandoffError> {
    let mut links: BTreeMap<Arity, usize> = BTreeMap::new();
    let mut pars: BTreeMap<Arity, usize> = BTreeMap::new();
    for link in alignments.iter().flat_map(|a| &a.links) {
        *links.entry(link.arity()).or_default() += 1;
        *pars.entry(link.arity()).or_default() += link.arity().total();
    }
    let n_links: usize = links.values().sum();
    let n_pars: usize = pars.values().sum();
    if n_links == 0 {
        return Err(StandoffError::EmptyCollection);
    }
    let share = |m: BTreeMap<Arity, usize>, total: usize| {
        m.into_iter().map(|(k, v)| (k, v as f64 / total as f64)).collect()
    };
    Ok(ArityDistribution { by_link: share(links, n_links), by_paragraph: share(pars, n_pars) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub n_links_a: usize,
    pub n_links_b: usize,
    pub n_shared: usize,
    /// Jaccard index of the two link sets.
    pub exact_match_fraction: f64,
    /// Paragraphs of either side counted by the arity of their link in
    /// `a` and in `b`.
    pub per_arity_confusion: BTreeMap<(Arity, Arity), usize>,
}

impl AgreementReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        let _ = writeln!(out, "n_links_a,{}", self.n_links_a);
        let _ = writeln!(out, "n_links_b,{}", self.n_links_b);
        let _ = writeln!(out, "n_shared,{}", self.n_shared);
        let _ = writeln!(out, "exact_match_fraction,{:.6}", self.exact_match_fraction);
        out.push_str("\narity_a,arity_b,paragraphs\n");
        for ((a, b), n) in &self.per_arity_confusion {
            let _ = writeln!(out, "{a},{b},{n}");
        }
        out
    }
}

type DocKey = (CelexId, String, String);

fn by_document(c: &[BitextAlignment]) -> BTreeMap<DocKey, &BitextAlignment> {
    c.iter().map(|a| ((a.celex, a.src_lang.clone(), a.tgt_lang.clone()), a)).collect()
}

/// Side (0 source, 1 target) and paragraph number mapped to link arity.
fn coverage(links: &[AlignmentLink]) -> HashMap<(u8, u32), Arity> {
    let mut m = HashMap::new();
    for l in links {
        for &n in &l.src_pars {
            m.insert((0, n), l.arity());
        }
        for &n in &l.tgt_pars {
            m.insert((1, n), l.arity());
        }
    }
    m
}

pub fn aligner_agreement(
    a: &[BitextAlignment],
    b: &[BitextAlignment],
) -> Result<AgreementReport, StandoffError> {
    let (da, db) = (by_document(a), by_document(b));
    let keys_a: BTreeSet<_> = da.keys().collect();
    let keys_b: BTreeSet<_> = db.keys().collect();
    if keys_a != keys_b || da.len() != a.len() || db.len() != b.len() {
        let only: Vec<String> =
            keys_a.symmetric_difference(&keys_b).map(|(c, s, t)| format!("{c} {s}-{t}")).collect();
        return Err(StandoffError::MismatchedDocumentSets(if only.is_empty() {
            "duplicate documents".into()
        } else {
            only.join(", ")
        }));
    }
    let mut report = AgreementReport {
        n_links_a: 0,
        n_links_b: 0,
        n_shared: 0,
        exact_match_fraction: 1.0,
        per_arity_confusion: BTreeMap::new(),
    };
    for (key, la) in &da {
        let lb = db[key];
        report.n_links_a += la.links.len();
        report.n_links_b += lb.links.len();
        report.n_shared += la.links.iter().filter(|x| lb.links.iter().any(|y| x.same_pointers(y))).count();
        let cov_b = coverage(&lb.links);
        let mut cov_a: Vec<_> = coverage(&la.links).into_iter().collect();
        cov_a.sort();
        for (par, arity_a) in cov_a {
            if let Some(&arity_b) = cov_b.get(&par) {
                *report.per_arity_confusion.entry((arity_a, arity_b)).or_default() += 1;
            }
        }
    }
    let union = report.n_links_a + report.n_links_b - report.n_shared;
    if union > 0 {
        report.exact_match_fraction = report.n_shared as f64 / union as f64;
    }
    Ok(report)
}
