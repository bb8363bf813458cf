//! Three-phase similarity aligner with lexicon bootstrapping.
//!
//! Phase 1 aligns with a similarity built from segment lengths, shared word
//! types and shared number tokens. Phase 2 samples the resulting 1-1 links
//! and derives a bilingual token association table from co-occurrence
//! counts. Phase 3 realigns with that table as an extra similarity term.
//! Merges are allowed up to `max_split` segments on one side; 2-2 beads are
//! never produced.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pair_documents, AlignError, Aligner, Arity, Bead, BitextAlignment};
use crate::celex::CelexId;
use crate::tei::{TeiDocument, FIRST_BODY_N};

/// Lowercased tokens of one paragraph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenizedSegment {
    pub paragraph_n: u32,
    pub tokens: Vec<String>,
    pub number_tokens: BTreeSet<String>,
    /// Character count of the original text.
    pub length: usize,
}

fn is_number(token: &str) -> bool {
    token.starts_with(|c: char| c.is_ascii_digit())
        && token.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
}

/// Splits on whitespace and punctuation and lowercases.
///
/// Digit runs joined by a single `.` or `,` (as in `1.000,50`) stay one
/// number token.
pub fn tokenize(text: &str) -> TokenizedSegment {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins_digits = matches!(c, '.' | ',')
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
            && current.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',');
        if c.is_alphanumeric() || joins_digits {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    let number_tokens = tokens.iter().filter(|t| is_number(t)).cloned().collect();
    TokenizedSegment { paragraph_n: 0, tokens, number_tokens, length: chars.len() }
}

fn tokenize_paragraph(n: u32, text: &str) -> TokenizedSegment {
    TokenizedSegment { paragraph_n: n, ..tokenize(text) }
}

/// Jaccard index of two number sets; 1.0 when both are empty.
pub fn number_similarity(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let shared = a.intersection(b).count();
    shared as f64 / (a.len() + b.len() - shared) as f64
}

/// Dice coefficient over token types; 0.0 when both are empty.
pub fn identical_word_ratio(s: &TokenizedSegment, t: &TokenizedSegment) -> f64 {
    dice(&sorted_types(&s.tokens), &sorted_types(&t.tokens))
}

fn sorted_types(tokens: &[String]) -> Vec<String> {
    let mut types = tokens.to_vec();
    types.sort_unstable();
    types.dedup();
    types
}

/// Dice coefficient of two sorted, deduplicated type lists.
fn dice(a: &[String], b: &[String]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    2.0 * shared as f64 / (a.len() + b.len()) as f64
}

fn length_score(s: &TokenizedSegment, t: &TokenizedSegment) -> f64 {
    let (a, b) = (s.length.min(t.length), s.length.max(t.length));
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

/// Bilingual token association weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    by_src: HashMap<String, Vec<(String, f64)>>,
    pub src_counts: HashMap<String, usize>,
    pub tgt_counts: HashMap<String, usize>,
}

impl Lexicon {
    pub fn len(&self) -> usize {
        self.by_src.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_src.is_empty()
    }

    pub fn weight(&self, src: &str, tgt: &str) -> Option<f64> {
        self.by_src.get(src).and_then(|ts| ts.iter().find(|(t, _)| t == tgt)).map(|(_, w)| *w)
    }

    pub fn insert(&mut self, src: &str, tgt: &str, weight: f64) {
        let w = weight.clamp(0.0, 1.0);
        let targets = self.by_src.entry(src.to_owned()).or_default();
        match targets.iter_mut().find(|(t, _)| t == tgt) {
            Some(entry) => entry.1 = w,
            None => targets.push((tgt.to_owned(), w)),
        }
    }

    /// Entries sorted by descending weight, then source and target token.
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<(&str, &str, f64)> = self
            .by_src
            .iter()
            .flat_map(|(s, ts)| ts.iter().map(move |(t, w)| (s.as_str(), t.as_str(), *w)))
            .collect();
        out.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(b.0)).then_with(|| a.1.cmp(b.1)));
        out
    }

    /// Lines of `src<TAB>tgt<TAB>weight`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (s, t, w) in self.entries() {
            let _ = writeln!(out, "{s}\t{t}\t{w}");
        }
        out
    }

    pub fn from_file_str(text: &str) -> Result<Self, AlignError> {
        let mut lex = Lexicon::default();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || AlignError::BadLexicon { line: idx + 1, content: line.to_owned() };
            let mut cols = line.split('\t');
            let (Some(s), Some(t), Some(w), None) = (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(bad());
            };
            let w: f64 = w.parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&w) {
                return Err(bad());
            }
            lex.insert(s, t, w);
        }
        Ok(lex)
    }

    /// Mean over source tokens of the best weight to any target token.
    pub fn score(&self, s: &TokenizedSegment, t: &TokenizedSegment) -> f64 {
        self.score_types(&s.tokens, &sorted_types(&t.tokens))
    }

    /// `target_types` must be sorted and deduplicated.
    fn score_types(&self, source_tokens: &[String], target_types: &[String]) -> f64 {
        if self.by_src.is_empty() || source_tokens.is_empty() {
            return 0.0;
        }
        let total: f64 = source_tokens
            .iter()
            .map(|tok| {
                self.by_src
                    .get(tok)
                    .map(|cands| {
                        cands
                            .iter()
                            .filter(|(c, _)| target_types.binary_search(c).is_ok())
                            .map(|(_, w)| *w)
                            .fold(0.0, f64::max)
                    })
                    .unwrap_or(0.0)
            })
            .sum();
        total / source_tokens.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HunParams {
    pub w_length: f64,
    pub w_identical: f64,
    pub w_number: f64,
    /// Used only when a lexicon is present; the other three weights are
    /// renormalized to sum to one otherwise.
    pub w_lexicon: f64,
    /// Number of 1-1 links sampled for lexicon building.
    pub sample_size: usize,
    pub rng_seed: u64,
    /// Largest number of segments merged on one side of a bead.
    pub max_split: usize,
    /// Minimum co-occurrence count for a lexicon entry.
    pub min_cooc: usize,
    /// Similarity charged for each 1-0 or 0-1 bead.
    pub skip_penalty: f64,
}

impl Default for HunParams {
    fn default() -> Self {
        Self {
            w_length: 0.3,
            w_identical: 0.3,
            w_number: 0.15,
            w_lexicon: 0.25,
            sample_size: 10_000,
            rng_seed: 20060520,
            max_split: 3,
            min_cooc: 2,
            skip_penalty: 0.3,
        }
    }
}

impl HunParams {
    // Negated comparisons reject NaN as well.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), AlignError> {
        let invalid = |m: String| Err(AlignError::InvalidParams(m));
        let w = [self.w_length, self.w_identical, self.w_number, self.w_lexicon];
        if w.iter().any(|x| !(*x >= 0.0)) {
            return invalid("similarity weights must be non-negative".into());
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return invalid(format!("similarity weights sum to {sum}, expected 1"));
        }
        if self.w_length + self.w_identical + self.w_number <= 0.0 {
            return invalid("phase-one weights are all zero".into());
        }
        if self.sample_size == 0 {
            return invalid("sample size must be at least 1".into());
        }
        if self.max_split < 2 {
            return invalid("max_split must be at least 2".into());
        }
        if self.skip_penalty < 0.0 {
            return invalid("skip penalty must be non-negative".into());
        }
        Ok(())
    }

    /// `[length, identical, number, lexicon]` weights for one phase.
    pub fn weights(&self, with_lexicon: bool) -> [f64; 4] {
        if with_lexicon {
            [self.w_length, self.w_identical, self.w_number, self.w_lexicon]
        } else {
            let base = self.w_length + self.w_identical + self.w_number;
            [self.w_length / base, self.w_identical / base, self.w_number / base, 0.0]
        }
    }

    /// Arities considered by the dynamic program, in tie-break order.
    pub fn arities(&self) -> Vec<Arity> {
        let mut out = vec![Arity::ONE_ONE, Arity::ONE_ZERO, Arity::ZERO_ONE];
        for k in 2..=self.max_split.min(u8::MAX as usize) as u8 {
            out.push(Arity::new(k, 1));
            out.push(Arity::new(1, k));
        }
        out
    }

    pub fn digest(&self) -> String {
        let [a, b, c, _] = self.weights(false);
        let [d, e, f, g] = self.weights(true);
        format!(
            "hunalign;phase1=length:{a},identical:{b},number:{c};\
             phase2=sample_size:{},seed:{},min_cooc:{};\
             phase3=length:{d},identical:{e},number:{f},lexicon:{g};\
             max_split={};skip_penalty={}",
            self.sample_size, self.rng_seed, self.min_cooc, self.max_split, self.skip_penalty
        )
    }
}

/// Weighted combination of the component similarities.
pub fn segment_similarity(
    s: &TokenizedSegment,
    t: &TokenizedSegment,
    lexicon: Option<&Lexicon>,
    params: &HunParams,
) -> f64 {
    Group::new(s.clone()).similarity(&Group::new(t.clone()), lexicon, params)
}

/// A segment, or several merged, with its sorted token types.
struct Group {
    seg: TokenizedSegment,
    types: Vec<String>,
}

impl Group {
    fn new(seg: TokenizedSegment) -> Self {
        let types = sorted_types(&seg.tokens);
        Self { seg, types }
    }

    fn similarity(&self, t: &Group, lexicon: Option<&Lexicon>, params: &HunParams) -> f64 {
        let [wl, wi, wn, wx] = params.weights(lexicon.is_some());
        let mut sim = wl * length_score(&self.seg, &t.seg)
            + wi * dice(&self.types, &t.types)
            + wn * number_similarity(&self.seg.number_tokens, &t.seg.number_tokens);
        if let Some(lex) = lexicon {
            sim += wx * lex.score_types(&self.seg.tokens, &t.types);
        }
        sim
    }
}

fn merge(segments: &[TokenizedSegment]) -> TokenizedSegment {
    match segments {
        [only] => only.clone(),
        _ => TokenizedSegment {
            paragraph_n: segments.first().map_or(0, |s| s.paragraph_n),
            tokens: segments.iter().flat_map(|s| s.tokens.iter().cloned()).collect(),
            number_tokens: segments.iter().flat_map(|s| s.number_tokens.iter().cloned()).collect(),
            length: segments.iter().map(|s| s.length).sum(),
        },
    }
}

/// Result of one similarity alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimAlignment {
    /// Beads with their similarity (negative skip penalty for 1-0 and 0-1).
    pub beads: Vec<(Bead, f64)>,
    pub total: f64,
}

/// Score of one bead.
pub fn bead_similarity(
    src: &[TokenizedSegment],
    tgt: &[TokenizedSegment],
    lexicon: Option<&Lexicon>,
    params: &HunParams,
) -> f64 {
    if src.is_empty() || tgt.is_empty() {
        -params.skip_penalty
    } else {
        segment_similarity(&merge(src), &merge(tgt), lexicon, params)
    }
}

/// Maximum-similarity monotone alignment by dynamic programming.
pub fn similarity_align(
    src: &[TokenizedSegment],
    tgt: &[TokenizedSegment],
    lexicon: Option<&Lexicon>,
    params: &HunParams,
) -> SimAlignment {
    let (n, m) = (src.len(), tgt.len());
    let moves = params.arities();
    // groups[a - 1][end] merges the `a` segments ending before `end`.
    let groups = |segs: &[TokenizedSegment]| -> Vec<Vec<Option<Group>>> {
        (1..=params.max_split.max(1))
            .map(|a| {
                (0..=segs.len())
                    .map(|end| (end >= a).then(|| Group::new(merge(&segs[end - a..end]))))
                    .collect()
            })
            .collect()
    };
    let (src_groups, tgt_groups) = (groups(src), groups(tgt));
    let bead = |a: usize, b: usize, i: usize, j: usize| -> f64 {
        if a == 0 || b == 0 {
            return -params.skip_penalty;
        }
        let (s, t) = (&src_groups[a - 1][i], &tgt_groups[b - 1][j]);
        s.as_ref().expect("a <= i").similarity(t.as_ref().expect("b <= j"), lexicon, params)
    };
    let width = m + 1;
    let mut score = vec![f64::NEG_INFINITY; (n + 1) * width];
    let mut back = vec![usize::MAX; (n + 1) * width];
    let mut bead_score = vec![0.0; (n + 1) * width];
    score[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_k = usize::MAX;
            let mut best_bead = 0.0;
            for (k, arity) in moves.iter().enumerate() {
                let (a, b) = (arity.src as usize, arity.tgt as usize);
                if a > i || b > j {
                    continue;
                }
                let prev = score[(i - a) * width + (j - b)];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let sim = bead(a, b, i, j);
                if prev + sim > best {
                    best = prev + sim;
                    best_k = k;
                    best_bead = sim;
                }
            }
            score[i * width + j] = best;
            back[i * width + j] = best_k;
            bead_score[i * width + j] = best_bead;
        }
    }
    let mut beads = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let arity = moves[back[i * width + j]];
        let s = bead_score[i * width + j];
        i -= arity.src as usize;
        j -= arity.tgt as usize;
        beads.push((Bead { src_start: i, tgt_start: j, arity }, s));
    }
    beads.reverse();
    SimAlignment { beads, total: score[n * width + m] }
}

/// Tokenizes the body paragraphs (2..=extent) of a document.
pub fn document_segments(doc: &TeiDocument) -> Vec<TokenizedSegment> {
    doc.body_paragraphs().iter().map(|p| tokenize_paragraph(p.n, &p.text)).collect()
}

/// Builds a lexicon from aligned segment pairs by co-occurrence counting.
///
/// `weight(s, t) = cooc(s, t)^2 / (count(s) * count(t))`, where counts are
/// numbers of pairs containing the token type. Number tokens are left to
/// the number similarity and not counted. Entries with fewer than
/// `min_cooc` co-occurrences are dropped.
pub fn lexicon_from_pairs(pairs: &[(&TokenizedSegment, &TokenizedSegment)], min_cooc: usize) -> Lexicon {
    let types = |seg: &TokenizedSegment| -> BTreeSet<String> {
        seg.tokens.iter().filter(|t| !is_number(t)).cloned().collect()
    };
    let mut src_counts: HashMap<String, usize> = HashMap::new();
    let mut tgt_counts: HashMap<String, usize> = HashMap::new();
    let mut cooc: HashMap<(String, String), usize> = HashMap::new();
    for (s, t) in pairs {
        let (st, tt) = (types(s), types(t));
        for a in &st {
            *src_counts.entry(a.clone()).or_default() += 1;
        }
        for b in &tt {
            *tgt_counts.entry(b.clone()).or_default() += 1;
        }
        for a in &st {
            for b in &tt {
                *cooc.entry((a.clone(), b.clone())).or_default() += 1;
            }
        }
    }
    let mut lexicon = Lexicon { by_src: HashMap::new(), src_counts, tgt_counts };
    let mut kept: Vec<((String, String), usize)> =
        cooc.into_iter().filter(|(_, c)| *c >= min_cooc.max(1)).collect();
    kept.sort();
    for ((a, b), c) in kept {
        let denom = (lexicon.src_counts[&a] * lexicon.tgt_counts[&b]) as f64;
        let w = (c * c) as f64 / denom;
        lexicon.insert(&a, &b, w);
    }
    lexicon
}

/// Phase 2: samples phase-one 1-1 links and builds the lexicon.
pub fn build_lexicon(
    phase1: &[BitextAlignment],
    src_docs: &[TeiDocument],
    tgt_docs: &[TeiDocument],
    params: &HunParams,
) -> Result<Lexicon, AlignError> {
    let segments = |docs: &[TeiDocument]| -> HashMap<CelexId, Vec<TokenizedSegment>> {
        docs.iter().map(|d| (*d.celex(), document_segments(d))).collect()
    };
    let (src_segs, tgt_segs) = (segments(src_docs), segments(tgt_docs));
    let mut candidates: Vec<(&TokenizedSegment, &TokenizedSegment)> = Vec::new();
    for alignment in phase1 {
        for link in &alignment.links {
            if link.arity() != Arity::ONE_ONE {
                continue;
            }
            let s = lookup(&src_segs, &alignment.celex, link.src_pars[0]);
            let t = lookup(&tgt_segs, &alignment.celex, link.tgt_pars[0]);
            match (s, t) {
                (Some(s), Some(t)) => candidates.push((s, t)),
                _ => {
                    return Err(AlignError::Unpaired(format!(
                        "link {:?}-{:?} of {} has no paragraph",
                        link.src_pars, link.tgt_pars, alignment.celex
                    )))
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(AlignError::NoOneToOneLinks);
    }
    let sample: Vec<_> = if candidates.len() > params.sample_size {
        let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        let mut idx = rand::seq::index::sample(&mut rng, candidates.len(), params.sample_size).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| candidates[i]).collect()
    } else {
        candidates
    };
    Ok(lexicon_from_pairs(&sample, params.min_cooc))
}

fn lookup<'a>(
    map: &'a HashMap<CelexId, Vec<TokenizedSegment>>,
    celex: &CelexId,
    n: u32,
) -> Option<&'a TokenizedSegment> {
    map.get(celex)?.get(n.checked_sub(FIRST_BODY_N)? as usize)
}

fn align_pairs(
    pairs: &[(&TeiDocument, &TeiDocument)],
    lexicon: Option<&Lexicon>,
    params: &HunParams,
) -> Vec<BitextAlignment> {
    pairs
        .par_iter()
        .map(|(s, t)| {
            let result = similarity_align(&document_segments(s), &document_segments(t), lexicon, params);
            BitextAlignment::from_beads(s, t, &result.beads, Aligner::Hunalign, params.digest())
        })
        .collect()
}

/// Output of a full three-phase run.
#[derive(Debug, Clone)]
pub struct HunalignRun {
    pub phase1: Vec<BitextAlignment>,
    pub lexicon: Lexicon,
    pub alignments: Vec<BitextAlignment>,
}

/// Runs all three phases over documents paired by CELEX id.
pub fn align_hunalign(
    src_docs: &[TeiDocument],
    tgt_docs: &[TeiDocument],
    params: &HunParams,
) -> Result<HunalignRun, AlignError> {
    params.validate()?;
    let pairs = pair_documents(src_docs, tgt_docs)?;
    let phase1 = align_pairs(&pairs, None, params);
    let lexicon = build_lexicon(&phase1, src_docs, tgt_docs, params)?;
    let alignments = align_pairs(&pairs, Some(&lexicon), params);
    Ok(HunalignRun { phase1, lexicon, alignments })
}

/// Phase 3 alone, with a lexicon from an earlier run.
pub fn realign_with_lexicon(
    src_docs: &[TeiDocument],
    tgt_docs: &[TeiDocument],
    lexicon: &Lexicon,
    params: &HunParams,
) -> Result<Vec<BitextAlignment>, AlignError> {
    params.validate()?;
    let pairs = pair_documents(src_docs, tgt_docs)?;
    Ok(align_pairs(&pairs, Some(lexicon), params))
}

/// Share of number tokens among all tokens of the documents.
pub fn number_token_fraction(docs: &[TeiDocument]) -> Result<f64, AlignError> {
    if docs.is_empty() {
        return Err(AlignError::EmptyCollection);
    }
    let (mut numbers, mut total) = (0usize, 0usize);
    for doc in docs {
        for p in doc.paragraphs() {
            let seg = tokenize(&p.text);
            numbers += seg.tokens.iter().filter(|t| is_number(t)).count();
            total += seg.tokens.len();
        }
    }
    Ok(if total == 0 { 0.0 } else { numbers as f64 / total as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(text: &str) -> TokenizedSegment {
        tokenize(text)
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_extracts_numbers() {
        let s = tokenize("du 13 décembre 2003");
        assert_eq!(s.tokens, ["du", "13", "décembre", "2003"]);
        assert_eq!(s.number_tokens, set(&["13", "2003"]));
        assert_eq!(s.length, 19);
    }

    #[test]
    fn tokenize_plain_words() {
        let s = tokenize("abc def");
        assert_eq!(s.tokens, ["abc", "def"]);
        assert!(s.number_tokens.is_empty());
        assert_eq!(tokenize(""), TokenizedSegment::default());
    }

    #[test]
    fn tokenize_separators_and_punctuation() {
        let s = tokenize("OJ No L 259, 15.10.1979, p. 10; EUR 1.000,50 (2004/97/CE)");
        assert!(s.number_tokens.contains("15.10.1979"));
        assert!(s.number_tokens.contains("1.000,50"));
        assert!(s.number_tokens.contains("259"));
        assert!(s.number_tokens.contains("2004"));
        assert!(s.tokens.contains(&"ce".to_string()));
        assert!(!s.tokens.iter().any(|t| t.ends_with(',') || t.ends_with('.')));
    }

    #[test]
    fn number_similarity_cases() {
        assert_eq!(number_similarity(&set(&["1960", "5"]), &set(&["1960", "5"])), 1.0);
        assert_eq!(number_similarity(&set(&["1960"]), &set(&["1984"])), 0.0);
        assert_eq!(number_similarity(&set(&["1", "2", "3"]), &set(&["2", "3", "4"])), 0.5);
        assert_eq!(number_similarity(&set(&[]), &set(&[])), 1.0);
    }

    #[test]
    fn identical_word_ratio_cases() {
        assert_eq!(identical_word_ratio(&seg("a b c"), &seg("a b c")), 1.0);
        assert_eq!(identical_word_ratio(&seg("a b"), &seg("a c")), 0.5);
        assert_eq!(identical_word_ratio(&seg("a b"), &seg("c d")), 0.0);
        assert_eq!(identical_word_ratio(&seg(""), &seg("")), 0.0);
    }

    #[test]
    fn similarity_of_identical_segments_is_one() {
        let p = HunParams::default();
        let s = seg("Article 5 of Regulation 1960");
        assert!((segment_similarity(&s, &s, None, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_equal_length_scores_length_only() {
        let p = HunParams::default();
        let s = seg("abc 12");
        let t = seg("xyz 34");
        let [wl, ..] = p.weights(false);
        assert!((segment_similarity(&s, &t, None, &p) - wl).abs() < 1e-12);
    }

    #[test]
    fn planted_translation_gains_from_lexicon() {
        let p = HunParams::default();
        let s = seg("haus garten");
        let t = seg("house garden");
        let mut lex = Lexicon::default();
        lex.insert("haus", "house", 1.0);
        lex.insert("garten", "garden", 0.8);
        let without = segment_similarity(&s, &t, None, &p);
        let with = segment_similarity(&s, &t, Some(&lex), &p);
        assert!(with > without, "{with} <= {without}");
        assert!((lex.score(&s, &t) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn identical_documents_align_one_to_one() {
        let texts = ["Article 1", "The Commission shall act.", "Done at Brussels, 5 May 1960."];
        let segs: Vec<_> = texts.iter().map(|t| seg(t)).collect();
        let r = similarity_align(&segs, &segs, None, &HunParams::default());
        assert!(r.beads.iter().all(|(b, _)| b.arity == Arity::ONE_ONE));
        assert_eq!(r.beads.len(), 3);
    }

    /// Best total over every monotone segmentation, for small inputs.
    fn brute_force(src: &[TokenizedSegment], tgt: &[TokenizedSegment], p: &HunParams) -> (f64, Vec<Arity>) {
        fn go(
            i: usize,
            j: usize,
            src: &[TokenizedSegment],
            tgt: &[TokenizedSegment],
            p: &HunParams,
        ) -> (f64, Vec<Arity>) {
            if i == src.len() && j == tgt.len() {
                return (0.0, vec![]);
            }
            let mut best = (f64::NEG_INFINITY, vec![]);
            for a in 0..=p.max_split {
                for b in 0..=p.max_split {
                    let allowed = (a == 1 && b >= 1) || (b == 1 && a >= 1) || (a + b == 1);
                    if !allowed || i + a > src.len() || j + b > tgt.len() {
                        continue;
                    }
                    let here = bead_similarity(&src[i..i + a], &tgt[j..j + b], None, p);
                    let (rest, mut path) = go(i + a, j + b, src, tgt, p);
                    if here + rest > best.0 {
                        path.insert(0, Arity::new(a as u8, b as u8));
                        best = (here + rest, path);
                    }
                }
            }
            best
        }
        go(0, 0, src, tgt, p)
    }

    #[test]
    fn one_to_three_merge_matches_brute_force() {
        let parts = [
            "The Member States shall adopt the measures referred to in Article 4",
            "before 1 January 1985 and shall inform the Commission thereof",
            "in accordance with the procedure laid down in Article 9.",
        ];
        let src = vec![
            seg("Article 3"),
            seg(&parts.join(" ")),
            seg("This Decision is addressed to the Member States."),
        ];
        let mut tgt = vec![seg("Article 3")];
        tgt.extend(parts.iter().map(|t| seg(t)));
        tgt.push(seg("This Decision is addressed to the Member States."));
        let p = HunParams::default();
        let dp = similarity_align(&src, &tgt, None, &p);
        let (best, path) = brute_force(&src, &tgt, &p);
        assert!((dp.total - best).abs() < 1e-9);
        let arities: Vec<Arity> = dp.beads.iter().map(|(b, _)| b.arity).collect();
        assert_eq!(arities, path);
        assert_eq!(arities, [Arity::ONE_ONE, Arity::new(1, 3), Arity::ONE_ONE]);
    }

    #[test]
    fn lexicon_weight_is_one_for_exclusive_pair() {
        let pairs_owned: Vec<_> =
            (0..5).map(|i| (seg(&format!("x filler{i}")), seg(&format!("y other{i}")))).collect();
        let pairs: Vec<_> = pairs_owned.iter().map(|(a, b)| (a, b)).collect();
        let lex = lexicon_from_pairs(&pairs, 2);
        assert_eq!(lex.weight("x", "y"), Some(1.0));
        assert_eq!(lex.weight("filler0", "other0"), None);
        assert_eq!(lex.weight("x", "other0"), None);
    }

    #[test]
    fn lexicon_file_round_trip_and_ordering() {
        let mut lex = Lexicon::default();
        lex.insert("b", "y", 0.5);
        lex.insert("a", "x", 1.0);
        lex.insert("a", "z", 0.5);
        let text = lex.to_file_string();
        assert_eq!(text, "a\tx\t1\na\tz\t0.5\nb\ty\t0.5\n");
        let back = Lexicon::from_file_str(&text).unwrap();
        assert_eq!(back.entries(), lex.entries());
        assert!(Lexicon::from_file_str("a\tb\t1.5\n").is_err());
        assert!(Lexicon::from_file_str("a\tb\n").is_err());
    }

    #[test]
    fn params_validation() {
        assert!(HunParams::default().validate().is_ok());
        let p = HunParams { w_lexicon: 0.5, ..HunParams::default() };
        assert!(p.validate().is_err());
        let p = HunParams { max_split: 1, ..HunParams::default() };
        assert!(p.validate().is_err());
        let [a, b, c, d] = HunParams::default().weights(false);
        assert!((a - 0.4).abs() < 1e-12 && (b - 0.4).abs() < 1e-12 && (c - 0.2).abs() < 1e-12);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn empty_collection_has_no_one_to_one_links() {
        let err = align_hunalign(&[], &[], &HunParams::default()).unwrap_err();
        assert_eq!(err, AlignError::NoOneToOneLinks);
        assert_eq!(number_token_fraction(&[]), Err(AlignError::EmptyCollection));
    }

    fn arb_segment() -> impl Strategy<Value = TokenizedSegment> {
        proptest::collection::vec(prop_oneof!["[a-e]{1,3}", "[0-9]{1,2}"], 0..6)
            .prop_map(|w| tokenize(&w.join(" ")))
    }

    proptest! {
        #[test]
        fn similarity_symmetric_without_lexicon(s in arb_segment(), t in arb_segment()) {
            let p = HunParams::default();
            let a = segment_similarity(&s, &t, None, &p);
            let b = segment_similarity(&t, &s, None, &p);
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        }

        #[test]
        fn never_emits_two_two(
            src in proptest::collection::vec(arb_segment(), 0..7),
            tgt in proptest::collection::vec(arb_segment(), 0..7),
        ) {
            let p = HunParams::default();
            let r = similarity_align(&src, &tgt, None, &p);
            prop_assert!(r.beads.iter().all(|(b, _)| b.arity != Arity::new(2, 2)));
            let cs: usize = r.beads.iter().map(|(b, _)| b.arity.src as usize).sum();
            let ct: usize = r.beads.iter().map(|(b, _)| b.arity.tgt as usize).sum();
            prop_assert_eq!((cs, ct), (src.len(), tgt.len()));
            let (best, _) = brute_force(&src, &tgt, &p);
            prop_assert!((r.total - best).abs() < 1e-9);
        }
    }
}
