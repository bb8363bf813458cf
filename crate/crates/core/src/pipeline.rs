//! End-to-end orchestration over an output tree:
//!
//! ```text
//! raw/<celex>-<lang>.html
//! tei/<lang>/jrc<celex>-<lang>.xml        tei/report.tsv
//! alignments/<aligner>/<src>-<tgt>.standoff.xml | .csv
//! alignments/hunalign/<src>-<tgt>.lexicon.tsv
//! bitext/<aligner>/jrc<celex>-<src>-<tgt>.xml
//! stats/corpus_stats.csv | .txt, stats/eurovoc_frequency.csv,
//! stats/arity_<aligner>.csv, stats/agreement/<src>-<tgt>.csv
//! ```
//!
//! Work is spread over a thread pool; results are gathered in sorted order
//! before anything is written, so output does not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::align::gale_church::align_documents;
use crate::align::hunalign::{align_hunalign, realign_with_lexicon, Lexicon};
use crate::align::{AlignError, Aligner, BitextAlignment};
use crate::celex::{document_url, parse_celex, CelexId};
use crate::config::{ConfigError, PipelineConfig};
use crate::ingest::{
    fetch_document, html_to_paragraphs, list_local_inventory, select_corpus, train_language_profile,
    verify_language, FetchSource, IngestError, LanguageProfile, RawDocument, Verdict,
};
use crate::standoff::{
    aligner_agreement, arity_distribution, export_csv, export_standoff_xml, generate_inplace,
    import_standoff_xml, StandoffError, StandoffFile,
};
use crate::stats::{corpus_stats_table, eurovoc_frequency, stats_to_csv, stats_to_text};
use crate::tei::{
    build_document, classify_sections, parse_tei, serialize_tei, DocumentMeta, TeiDocument, TeiError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Tei {
        path: PathBuf,
        #[source]
        source: TeiError,
    },
    #[error("{path}: {source}")]
    Standoff {
        path: PathBuf,
        #[source]
        source: StandoffError,
    },
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl PipelineError {
    /// 1 for problems with the inputs, 2 for failures of the tool itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::Usage(_)
            | PipelineError::Ingest(_)
            | PipelineError::Tei { .. }
            | PipelineError::Standoff { .. }
            | PipelineError::Read { .. } => 1,
            PipelineError::Align(AlignError::InvalidParams(_)) => 1,
            PipelineError::Align(_) | PipelineError::Write { .. } | PipelineError::Pool(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fetch,
    Normalize,
    /// With `reuse_lexicon`, HunAlign reads a stored lexicon and runs only
    /// its final phase.
    Align {
        reuse_lexicon: bool,
    },
    Export,
    Bitext,
    Stats,
    Agree,
    /// Normalize through agree.
    All,
}

/// Files written by a run, plus text meant for standard output.
#[derive(Debug, Default, Clone)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub stdout: String,
}

impl RunReport {
    fn write(&mut self, path: PathBuf, content: &str) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|source| PipelineError::Write { path: dir.to_owned(), source })?;
        }
        std::fs::write(&path, content)
            .map_err(|source| PipelineError::Write { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }

    fn absorb(&mut self, other: RunReport) {
        self.written.extend(other.written);
        self.stdout.push_str(&other.stdout);
    }
}

pub fn run(command: Command, cfg: &PipelineConfig) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    pool.install(|| match command {
        Command::Fetch => fetch(cfg),
        Command::Normalize => normalize(cfg),
        Command::Align { reuse_lexicon } => align(cfg, reuse_lexicon),
        Command::Export => export(cfg),
        Command::Bitext => bitext(cfg),
        Command::Stats => stats(cfg),
        Command::Agree => agree(cfg),
        Command::All => {
            let mut report = normalize(cfg)?;
            report.absorb(align(cfg, false)?);
            report.absorb(export(cfg)?);
            report.absorb(bitext(cfg)?);
            report.absorb(stats(cfg)?);
            if cfg.aligners.len() > 1 {
                report.absorb(agree(cfg)?);
            }
            Ok(report)
        }
    })
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Read { path: path.to_owned(), source })
}

fn wanted(cfg: &PipelineConfig, id: &CelexId) -> bool {
    cfg.celex.is_empty() || cfg.celex.contains(id)
}

/// Documents to consider, with the languages they exist in.
fn inventory(cfg: &PipelineConfig) -> Result<BTreeMap<CelexId, BTreeSet<String>>> {
    let mut inv = match &cfg.source {
        FetchSource::LocalDirectory { root, .. } => list_local_inventory(root)?,
        FetchSource::HttpEndpoint { .. } => {
            if cfg.celex.is_empty() {
                return Err(PipelineError::Usage("an http source needs an explicit celex list".into()));
            }
            let langs: BTreeSet<String> = cfg.languages.iter().cloned().collect();
            cfg.celex.iter().map(|c| (*c, langs.clone())).collect()
        }
    };
    inv.retain(|id, _| wanted(cfg, id));
    Ok(inv)
}

/// Fetches every configured language version of the selected documents.
fn fetch_selected(cfg: &PipelineConfig) -> Result<Vec<RawDocument>> {
    let inv = inventory(cfg)?;
    let jobs: Vec<(CelexId, String)> = inv
        .iter()
        .flat_map(|(id, langs)| {
            langs.iter().filter(|l| cfg.languages.contains(l)).map(move |l| (*id, l.clone()))
        })
        .collect();
    let fetched: Vec<std::result::Result<RawDocument, IngestError>> =
        jobs.par_iter().map(|(id, lang)| fetch_document(&cfg.source, id, lang)).collect();
    let mut docs = Vec::new();
    for r in fetched {
        match r {
            Ok(d) => docs.push(d),
            Err(IngestError::NotFound(what)) => log::warn!("skipping missing document {what}"),
            Err(e) => return Err(e.into()),
        }
    }
    if cfg.selection {
        let available = match cfg.source {
            FetchSource::LocalDirectory { .. } => inv,
            FetchSource::HttpEndpoint { .. } => {
                let mut m: BTreeMap<CelexId, BTreeSet<String>> = BTreeMap::new();
                for d in &docs {
                    m.entry(d.celex).or_default().insert(d.lang.clone());
                }
                m
            }
        };
        let kept = select_corpus(&available)?;
        docs.retain(|d| kept.contains(&d.celex));
    }
    Ok(docs)
}

fn fetch(cfg: &PipelineConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    for d in fetch_selected(cfg)? {
        let path = cfg.output_root.join("raw").join(format!("{}-{}.html", d.celex, d.lang));
        report.write(path, &d.content)?;
    }
    Ok(report)
}

fn load_profiles(cfg: &PipelineConfig) -> Result<Vec<LanguageProfile>> {
    let lid = &cfg.language_id;
    let mut profiles = Vec::new();
    for lang in &cfg.languages {
        let stored = lid.profiles_dir.as_ref().map(|d| d.join(format!("{lang}.profile")));
        let training = lid.training_dir.as_ref().map(|d| d.join(format!("{lang}.txt")));
        if let Some(p) = stored.filter(|p| p.is_file()) {
            profiles.push(LanguageProfile::from_file_str(lang, &read_to_string(&p)?)?);
        } else if let Some(p) = training.filter(|p| p.is_file()) {
            profiles.push(train_language_profile(&read_to_string(&p)?, lang, &lid.options)?);
        }
    }
    Ok(profiles)
}

fn load_eurovoc(cfg: &PipelineConfig) -> Result<BTreeMap<CelexId, BTreeSet<u32>>> {
    let Some(path) = &cfg.eurovoc_file else {
        return Ok(BTreeMap::new());
    };
    let raw: BTreeMap<String, BTreeSet<u32>> = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| PipelineError::Usage(format!("{}: {e}", path.display())))?;
    raw.into_iter()
        .map(|(k, v)| {
            parse_celex(&k)
                .map(|id| (id, v))
                .map_err(|e| PipelineError::Usage(format!("{}: {e}", path.display())))
        })
        .collect()
}

enum Outcome {
    /// The document and an optional verification note.
    Written(TeiDocument, &'static str),
    Skipped(&'static str, String),
}

fn normalize_one(
    cfg: &PipelineConfig,
    raw: &RawDocument,
    profiles: &[LanguageProfile],
    eurovoc: &BTreeMap<CelexId, BTreeSet<u32>>,
) -> Result<Outcome> {
    let mut note = "";
    if profiles.iter().any(|p| p.lang() == raw.lang) {
        match verify_language(raw, profiles)? {
            Verdict::Reject { guessed } => return Ok(Outcome::Skipped("rejected", guessed)),
            Verdict::Accept { low_confidence: true } => note = "low-confidence",
            Verdict::Accept { .. } => {}
        }
    }
    let mut paragraphs = html_to_paragraphs(&raw.content).into_iter();
    let Some(title) = paragraphs.next() else {
        return Ok(Outcome::Skipped("empty", String::new()));
    };
    let body: Vec<String> = paragraphs.collect();
    let boundaries = classify_sections(&body);
    let source_url = cfg
        .header_endpoint
        .and_then(|e| document_url(&raw.celex, &raw.lang, e).ok())
        .unwrap_or_else(|| raw.source_url.clone());
    let meta = DocumentMeta {
        celex: raw.celex,
        lang: raw.lang.clone(),
        title,
        eurovoc_codes: eurovoc.get(&raw.celex).cloned().unwrap_or_default(),
        source_url,
        download_date: raw.retrieved.clone(),
        created: cfg.created.clone(),
    };
    let doc = build_document(meta, body, boundaries)
        .map_err(|source| PipelineError::Tei { path: PathBuf::from(&raw.source_url), source })?;
    Ok(Outcome::Written(doc, note))
}

fn tei_path(cfg: &PipelineConfig, id: &CelexId, lang: &str) -> PathBuf {
    cfg.tei_dir(lang).join(format!("jrc{id}-{lang}.xml"))
}

fn normalize(cfg: &PipelineConfig) -> Result<RunReport> {
    let raws = fetch_selected(cfg)?;
    let profiles = load_profiles(cfg)?;
    let eurovoc = load_eurovoc(cfg)?;
    let outcomes: Vec<Result<Outcome>> =
        raws.par_iter().map(|raw| normalize_one(cfg, raw, &profiles, &eurovoc)).collect();
    let mut report = RunReport::default();
    let mut log_lines = String::from("celex\tlang\tstatus\tdetail\n");
    for (raw, outcome) in raws.iter().zip(outcomes) {
        match outcome? {
            Outcome::Written(doc, note) => {
                report.write(tei_path(cfg, &raw.celex, &raw.lang), &serialize_tei(&doc))?;
                let status = if note.is_empty() { "ok" } else { note };
                let _ = writeln!(log_lines, "{}\t{}\t{status}\t{}", raw.celex, raw.lang, doc.extent());
            }
            Outcome::Skipped(status, detail) => {
                log::warn!("{} {}: {status} {detail}", raw.celex, raw.lang);
                let _ = writeln!(log_lines, "{}\t{}\t{status}\t{detail}", raw.celex, raw.lang);
            }
        }
    }
    report.write(cfg.output_root.join("tei").join("report.tsv"), &log_lines)?;
    Ok(report)
}

/// Parsed TEI documents of one language, sorted by celex.
fn load_language(cfg: &PipelineConfig, lang: &str) -> Result<Vec<TeiDocument>> {
    let dir = cfg.tei_dir(lang);
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|source| PipelineError::Read { path: dir.clone(), source })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "xml"))
        .collect();
    paths.sort();
    let parsed: Vec<Result<TeiDocument>> = paths
        .par_iter()
        .map(|p| {
            parse_tei(&read_to_string(p)?).map_err(|source| PipelineError::Tei { path: p.clone(), source })
        })
        .collect();
    let mut docs = parsed.into_iter().collect::<Result<Vec<_>>>()?;
    docs.retain(|d| wanted(cfg, d.celex()) && d.lang() == lang);
    docs.sort_by_key(|d| *d.celex());
    Ok(docs)
}

/// Documents present in both languages, in celex order.
fn paired(src: Vec<TeiDocument>, tgt: Vec<TeiDocument>) -> (Vec<TeiDocument>, Vec<TeiDocument>) {
    let common: BTreeSet<CelexId> =
        src.iter().map(|d| *d.celex()).filter(|c| tgt.iter().any(|t| t.celex() == c)).collect();
    let keep = |docs: Vec<TeiDocument>| -> Vec<TeiDocument> {
        docs.into_iter().filter(|d| common.contains(d.celex())).collect()
    };
    (keep(src), keep(tgt))
}

fn standoff_path(cfg: &PipelineConfig, aligner: Aligner, src: &str, tgt: &str) -> PathBuf {
    cfg.alignment_dir(aligner).join(format!("{src}-{tgt}.standoff.xml"))
}

fn lexicon_path(cfg: &PipelineConfig, src: &str, tgt: &str) -> PathBuf {
    cfg.alignment_dir(Aligner::Hunalign).join(format!("{src}-{tgt}.lexicon.tsv"))
}

fn align(cfg: &PipelineConfig, reuse_lexicon: bool) -> Result<RunReport> {
    let mut report = RunReport::default();
    let langs: BTreeSet<String> = cfg.language_pairs().into_iter().flat_map(|(a, b)| [a, b]).collect();
    let mut corpus: BTreeMap<String, Vec<TeiDocument>> = BTreeMap::new();
    for lang in langs {
        let docs = load_language(cfg, &lang)?;
        corpus.insert(lang, docs);
    }
    for (src, tgt) in cfg.language_pairs() {
        let (s_docs, t_docs) = paired(corpus[&src].clone(), corpus[&tgt].clone());
        if s_docs.is_empty() {
            log::warn!("no documents shared by {src} and {tgt}");
            continue;
        }
        for &aligner in &cfg.aligners {
            let alignments = match aligner {
                Aligner::GaleChurch => s_docs
                    .par_iter()
                    .zip(t_docs.par_iter())
                    .map(|(s, t)| align_documents(s, t, &cfg.gc_params))
                    .collect::<std::result::Result<Vec<_>, _>>()?,
                Aligner::Hunalign => {
                    let params = cfg.effective_hun_params();
                    let lex_path = lexicon_path(cfg, &src, &tgt);
                    if reuse_lexicon {
                        let lexicon = Lexicon::from_file_str(&read_to_string(&lex_path)?)?;
                        realign_with_lexicon(&s_docs, &t_docs, &lexicon, &params)?
                    } else {
                        match align_hunalign(&s_docs, &t_docs, &params) {
                            Ok(run) => {
                                report.write(lex_path, &run.lexicon.to_file_string())?;
                                run.alignments
                            }
                            Err(AlignError::NoOneToOneLinks) => {
                                log::warn!("{src}-{tgt}: no one-to-one links, skipping hunalign");
                                continue;
                            }
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
            };
            let file = StandoffFile::from_alignments(&alignments).map_err(|source| {
                PipelineError::Standoff { path: standoff_path(cfg, aligner, &src, &tgt), source }
            })?;
            report.write(standoff_path(cfg, aligner, &src, &tgt), &export_standoff_xml(&file))?;
        }
    }
    Ok(report)
}

fn load_standoff(
    cfg: &PipelineConfig,
    aligner: Aligner,
    src: &str,
    tgt: &str,
) -> Result<Option<StandoffFile>> {
    let path = standoff_path(cfg, aligner, src, tgt);
    if !path.is_file() {
        return Ok(None);
    }
    import_standoff_xml(&read_to_string(&path)?)
        .map(Some)
        .map_err(|source| PipelineError::Standoff { path, source })
}

fn export(cfg: &PipelineConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    for &aligner in &cfg.aligners {
        for (src, tgt) in cfg.language_pairs() {
            if let Some(file) = load_standoff(cfg, aligner, &src, &tgt)? {
                let path = cfg.alignment_dir(aligner).join(format!("{src}-{tgt}.csv"));
                report.write(path, &export_csv(&file))?;
            }
        }
    }
    Ok(report)
}

fn bitext(cfg: &PipelineConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    for (src, tgt) in cfg.language_pairs() {
        let by_celex = |docs: Vec<TeiDocument>| -> BTreeMap<CelexId, TeiDocument> {
            docs.into_iter().map(|d| (*d.celex(), d)).collect()
        };
        let (s_docs, t_docs) = (by_celex(load_language(cfg, &src)?), by_celex(load_language(cfg, &tgt)?));
        for &aligner in &cfg.aligners {
            let Some(file) = load_standoff(cfg, aligner, &src, &tgt)? else {
                continue;
            };
            for (celex, links) in file.entries.iter().filter(|(c, _)| wanted(cfg, c)) {
                let (Some(s), Some(t)) = (s_docs.get(celex), t_docs.get(celex)) else {
                    return Err(PipelineError::Usage(format!(
                        "{celex} is aligned for {src}-{tgt} but its TEI files are missing"
                    )));
                };
                let xml = generate_inplace(s, t, links).map_err(|source| PipelineError::Standoff {
                    path: standoff_path(cfg, aligner, &src, &tgt),
                    source,
                })?;
                let path = cfg.bitext_dir(aligner).join(format!("jrc{celex}-{src}-{tgt}.xml"));
                report.write(path, &xml)?;
            }
        }
    }
    Ok(report)
}

fn stats(cfg: &PipelineConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    let mut corpus = Vec::new();
    for lang in &cfg.languages {
        corpus.extend(load_language(cfg, lang)?);
    }
    let rows = corpus_stats_table(&corpus);
    let dir = cfg.stats_dir();
    report.write(dir.join("corpus_stats.csv"), &stats_to_csv(&rows))?;
    report.write(dir.join("corpus_stats.txt"), &stats_to_text(&rows))?;
    report
        .write(dir.join("eurovoc_frequency.csv"), &eurovoc_frequency(&corpus, cfg.eurovoc_top_n).to_csv())?;
    for &aligner in &cfg.aligners {
        let mut all: Vec<BitextAlignment> = Vec::new();
        for (src, tgt) in cfg.language_pairs() {
            if let Some(f) = load_standoff(cfg, aligner, &src, &tgt)? {
                all.extend(f.to_alignments());
            }
        }
        let Ok(dist) = arity_distribution(&all) else {
            continue;
        };
        let mut csv = String::from("arity,link_fraction,paragraph_fraction\n");
        for (arity, frac) in &dist.by_link {
            let _ = writeln!(csv, "{arity},{frac:.6},{:.6}", dist.by_paragraph[arity]);
        }
        report.write(dir.join(format!("arity_{aligner}.csv")), &csv)?;
    }
    Ok(report)
}

fn agree(cfg: &PipelineConfig) -> Result<RunReport> {
    if !(cfg.aligners.contains(&Aligner::GaleChurch) && cfg.aligners.contains(&Aligner::Hunalign)) {
        return Err(PipelineError::Usage("agree needs both aligners configured".into()));
    }
    let mut report = RunReport::default();
    for (src, tgt) in cfg.language_pairs() {
        let a = load_standoff(cfg, Aligner::GaleChurch, &src, &tgt)?;
        let b = load_standoff(cfg, Aligner::Hunalign, &src, &tgt)?;
        let (Some(a), Some(b)) = (a, b) else {
            continue;
        };
        let keep = |f: StandoffFile| -> Vec<BitextAlignment> {
            f.to_alignments().into_iter().filter(|x| wanted(cfg, &x.celex)).collect()
        };
        let r = aligner_agreement(&keep(a), &keep(b)).map_err(|source| PipelineError::Standoff {
            path: standoff_path(cfg, Aligner::Hunalign, &src, &tgt),
            source,
        })?;
        let csv = r.to_csv();
        let _ = writeln!(report.stdout, "# {src}-{tgt}\n{csv}");
        report.write(cfg.stats_dir().join("agreement").join(format!("{src}-{tgt}.csv")), &csv)?;
    }
    Ok(report)
}
