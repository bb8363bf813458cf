//! Paragraph alignment: shared link types and the two aligners.

pub mod gale_church;
pub mod hunalign;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::celex::CelexId;
use crate::tei::{TeiDocument, FIRST_BODY_N};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error("unsupported arity {0}")]
    UnsupportedArity(Arity),
    #[error("instance too large for exhaustive search: {0} paragraphs (limit {1})")]
    InstanceTooLarge(usize, usize),
    #[error("no one-to-one links to sample a lexicon from")]
    NoOneToOneLinks,
    #[error("empty document collection")]
    EmptyCollection,
    #[error("documents are not paired: {0}")]
    Unpaired(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("bad lexicon line {line}: {content:?}")]
    BadLexicon { line: usize, content: String },
}

/// Number of source and target paragraphs joined by one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arity {
    pub src: u8,
    pub tgt: u8,
}

impl Arity {
    pub const fn new(src: u8, tgt: u8) -> Self {
        Self { src, tgt }
    }

    pub const ONE_ONE: Arity = Arity::new(1, 1);
    pub const ONE_ZERO: Arity = Arity::new(1, 0);
    pub const ZERO_ONE: Arity = Arity::new(0, 1);

    pub fn total(&self) -> usize {
        self.src as usize + self.tgt as usize
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl FromStr for Arity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('-').ok_or_else(|| format!("bad arity {s:?}"))?;
        let parse = |x: &str| x.parse::<u8>().map_err(|_| format!("bad arity {s:?}"));
        let arity = Arity::new(parse(a)?, parse(b)?);
        if arity.total() == 0 {
            return Err(format!("bad arity {s:?}"));
        }
        Ok(arity)
    }
}

/// One bead over 0-based positions of the aligned sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bead {
    pub src_start: usize,
    pub tgt_start: usize,
    pub arity: Arity,
}

impl Bead {
    pub fn src_range(&self) -> std::ops::Range<usize> {
        self.src_start..self.src_start + self.arity.src as usize
    }

    pub fn tgt_range(&self) -> std::ops::Range<usize> {
        self.tgt_start..self.tgt_start + self.arity.tgt as usize
    }
}

/// One link between paragraph numbers of two documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentLink {
    pub src_pars: Vec<u32>,
    pub tgt_pars: Vec<u32>,
    /// Aligner score; a cost for Gale-Church, a similarity for HunAlign.
    pub score: Option<f64>,
}

impl AlignmentLink {
    pub fn new(src_pars: Vec<u32>, tgt_pars: Vec<u32>, score: Option<f64>) -> Self {
        Self { src_pars, tgt_pars, score }
    }

    pub fn arity(&self) -> Arity {
        Arity::new(self.src_pars.len() as u8, self.tgt_pars.len() as u8)
    }

    /// Links compare by paragraph identity, ignoring scores.
    pub fn same_pointers(&self, other: &AlignmentLink) -> bool {
        self.src_pars == other.src_pars && self.tgt_pars == other.tgt_pars
    }

    fn from_bead(bead: &Bead, first_n: u32, score: Option<f64>) -> Self {
        let nums = |r: std::ops::Range<usize>| r.map(|i| i as u32 + first_n).collect();
        Self::new(nums(bead.src_range()), nums(bead.tgt_range()), score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aligner {
    GaleChurch,
    Hunalign,
}

impl Aligner {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aligner::GaleChurch => "gale_church",
            Aligner::Hunalign => "hunalign",
        }
    }
}

impl fmt::Display for Aligner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aligner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gale_church" | "gale-church" | "vanilla" => Ok(Aligner::GaleChurch),
            "hunalign" => Ok(Aligner::Hunalign),
            other => Err(format!("unknown aligner {other:?}")),
        }
    }
}

/// All links for one document in one language pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BitextAlignment {
    pub celex: CelexId,
    pub src_lang: String,
    pub tgt_lang: String,
    pub links: Vec<AlignmentLink>,
    pub aligner: Aligner,
    pub params_digest: String,
}

impl BitextAlignment {
    /// Converts beads over body paragraphs (numbered from 2) into links.
    pub fn from_beads(
        src: &TeiDocument,
        tgt: &TeiDocument,
        beads: &[(Bead, f64)],
        aligner: Aligner,
        params_digest: String,
    ) -> Self {
        Self {
            celex: *src.celex(),
            src_lang: src.lang().to_owned(),
            tgt_lang: tgt.lang().to_owned(),
            links: beads.iter().map(|(b, s)| AlignmentLink::from_bead(b, FIRST_BODY_N, Some(*s))).collect(),
            aligner,
            params_digest,
        }
    }

    /// Checks monotonicity, contiguity and full coverage of `first..=src_last`
    /// and `first..=tgt_last`.
    pub fn validate(&self, first: u32, src_last: u32, tgt_last: u32) -> Result<(), AlignError> {
        validate_links(&self.links, first, src_last, tgt_last)
    }
}

/// Checks that links are contiguous, monotone and cover both ranges exactly once.
pub fn validate_links(
    links: &[AlignmentLink],
    first: u32,
    src_last: u32,
    tgt_last: u32,
) -> Result<(), AlignError> {
    let bad = |m: String| Err(AlignError::InvalidAlignment(m));
    let (mut next_src, mut next_tgt) = (first, first);
    for (i, link) in links.iter().enumerate() {
        if link.src_pars.is_empty() && link.tgt_pars.is_empty() {
            return bad(format!("link {i} is empty"));
        }
        for &n in &link.src_pars {
            if n != next_src {
                return bad(format!("link {i}: source paragraph {n}, expected {next_src}"));
            }
            next_src += 1;
        }
        for &n in &link.tgt_pars {
            if n != next_tgt {
                return bad(format!("link {i}: target paragraph {n}, expected {next_tgt}"));
            }
            next_tgt += 1;
        }
    }
    if next_src != src_last + 1 || next_tgt != tgt_last + 1 {
        return bad(format!(
            "coverage ends at {}/{}, expected {src_last}/{tgt_last}",
            next_src - 1,
            next_tgt - 1
        ));
    }
    Ok(())
}

/// Pairs documents of two languages by CELEX id, in source order.
pub fn pair_documents<'a>(
    src_docs: &'a [TeiDocument],
    tgt_docs: &'a [TeiDocument],
) -> Result<Vec<(&'a TeiDocument, &'a TeiDocument)>, AlignError> {
    if src_docs.len() != tgt_docs.len() {
        return Err(AlignError::Unpaired(format!(
            "{} source vs {} target documents",
            src_docs.len(),
            tgt_docs.len()
        )));
    }
    src_docs
        .iter()
        .map(|s| {
            tgt_docs
                .iter()
                .find(|t| t.celex() == s.celex())
                .map(|t| (s, t))
                .ok_or_else(|| AlignError::Unpaired(format!("no target for {}", s.celex())))
        })
        .collect()
}
