//! Length-based paragraph alignment in the style of Gale & Church.
//!
//! A bead's cost is `-ln P(|delta|) - ln prior(arity)`, where
//! `delta = (l2 - l1 * c) / sqrt(l1 * s2)` compares the summed lengths of the
//! two sides and `P(|delta|) = 2 * (1 - Phi(|delta|))`. Insertions and
//! deletions have no length model and pay a fixed penalty instead.

use serde::{Deserialize, Serialize};

use super::{AlignError, Aligner, Arity, Bead, BitextAlignment};
use crate::tei::TeiDocument;

/// Supported arities, in tie-break preference order.
pub const ARITIES: [Arity; 6] = [
    Arity::new(1, 1),
    Arity::new(1, 0),
    Arity::new(0, 1),
    Arity::new(2, 1),
    Arity::new(1, 2),
    Arity::new(2, 2),
];

/// Largest `|src| + |tgt|` accepted by [`exhaustive_align`].
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    Characters,
    Words,
}

impl LengthUnit {
    pub fn measure(&self, text: &str) -> usize {
        match self {
            LengthUnit::Characters => text.chars().count(),
            LengthUnit::Words => text.split_whitespace().count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArityPriors {
    #[serde(rename = "1-1")]
    pub one_one: f64,
    #[serde(rename = "1-0")]
    pub one_zero: f64,
    #[serde(rename = "0-1")]
    pub zero_one: f64,
    #[serde(rename = "2-1")]
    pub two_one: f64,
    #[serde(rename = "1-2")]
    pub one_two: f64,
    #[serde(rename = "2-2")]
    pub two_two: f64,
}

impl Default for ArityPriors {
    fn default() -> Self {
        Self {
            one_one: 0.89,
            one_zero: 0.00495,
            zero_one: 0.00495,
            two_one: 0.0445,
            one_two: 0.0445,
            two_two: 0.011,
        }
    }
}

impl ArityPriors {
    pub fn get(&self, arity: Arity) -> Option<f64> {
        Some(match (arity.src, arity.tgt) {
            (1, 1) => self.one_one,
            (1, 0) => self.one_zero,
            (0, 1) => self.zero_one,
            (2, 1) => self.two_one,
            (1, 2) => self.one_two,
            (2, 2) => self.two_two,
            _ => return None,
        })
    }

    fn all(&self) -> [f64; 6] {
        ARITIES.map(|a| self.get(a).expect("supported arity"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GcParams {
    /// Expected target characters per source character.
    pub mean_ratio: f64,
    /// Variance of the length difference per source character.
    pub variance: f64,
    pub priors: ArityPriors,
    pub length_unit: LengthUnit,
    /// Insertions and deletions cost as much as a match at this `|delta|`.
    pub skip_delta: f64,
    /// Prefix points `(source count, target count)` every alignment must pass.
    pub hard_links: Vec<(usize, usize)>,
}

impl Default for GcParams {
    fn default() -> Self {
        Self {
            mean_ratio: 1.0,
            variance: 6.8,
            priors: ArityPriors::default(),
            length_unit: LengthUnit::Characters,
            skip_delta: 4.0,
            hard_links: Vec::new(),
        }
    }
}

impl GcParams {
    // Negated comparisons reject NaN as well.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), AlignError> {
        let invalid = |m: String| Err(AlignError::InvalidParams(m));
        if !(self.variance > 0.0) {
            return invalid(format!("variance must be positive, got {}", self.variance));
        }
        if !(self.mean_ratio > 0.0) {
            return invalid(format!("mean ratio must be positive, got {}", self.mean_ratio));
        }
        let priors = self.priors.all();
        if priors.iter().any(|p| !(*p > 0.0)) {
            return invalid("arity priors must be positive".into());
        }
        let sum: f64 = priors.iter().sum();
        if sum > 1.0 + 1e-9 {
            return invalid(format!("arity priors sum to {sum} > 1"));
        }
        if !(self.skip_delta >= 0.0) {
            return invalid("skip delta must be non-negative".into());
        }
        Ok(())
    }

    /// Canonical text of every parameter, recorded as alignment provenance.
    pub fn digest(&self) -> String {
        let p = &self.priors;
        let unit = match self.length_unit {
            LengthUnit::Characters => "characters",
            LengthUnit::Words => "words",
        };
        format!(
            "gale_church;c={};s2={};priors=1-1:{},1-0:{},0-1:{},2-1:{},1-2:{},2-2:{};skip_delta={};unit={};hard_links={}",
            self.mean_ratio,
            self.variance,
            p.one_one,
            p.one_zero,
            p.zero_one,
            p.two_one,
            p.one_two,
            p.two_two,
            self.skip_delta,
            unit,
            self.hard_links.len()
        )
    }

    fn skip_penalty(&self) -> f64 {
        match_penalty(self.skip_delta)
    }
}

/// Normalized length discrepancy between a source and a target span.
pub fn length_delta(src_len: usize, tgt_len: usize, params: &GcParams) -> f64 {
    let l1 = src_len as f64;
    let l2 = tgt_len as f64;
    (l2 - l1 * params.mean_ratio) / (l1.max(1.0) * params.variance).sqrt()
}

/// `-ln(2 * (1 - Phi(|delta|)))`.
fn match_penalty(delta: f64) -> f64 {
    let tail = libm::erfc(delta.abs() / std::f64::consts::SQRT_2);
    -tail.max(f64::MIN_POSITIVE).ln()
}

/// Cost of one bead joining `src_lengths` with `tgt_lengths`.
pub fn bead_cost(src_lengths: &[usize], tgt_lengths: &[usize], params: &GcParams) -> Result<f64, AlignError> {
    let arity = Arity::new(
        src_lengths.len().min(u8::MAX as usize) as u8,
        tgt_lengths.len().min(u8::MAX as usize) as u8,
    );
    let prior = params.priors.get(arity).ok_or(AlignError::UnsupportedArity(arity))?;
    Ok(cost_for(arity, src_lengths.iter().sum(), tgt_lengths.iter().sum(), prior, params))
}

fn cost_for(arity: Arity, src_sum: usize, tgt_sum: usize, prior: f64, params: &GcParams) -> f64 {
    let length_term = if arity.src == 0 || arity.tgt == 0 {
        params.skip_penalty()
    } else {
        match_penalty(length_delta(src_sum, tgt_sum, params))
    };
    length_term - prior.ln()
}

/// Result of aligning two length sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct GcAlignment {
    /// Beads with their individual costs, in order.
    pub beads: Vec<(Bead, f64)>,
    pub total_cost: f64,
}

struct Scorer<'a> {
    src_prefix: Vec<usize>,
    tgt_prefix: Vec<usize>,
    priors: [f64; 6],
    params: &'a GcParams,
}

impl<'a> Scorer<'a> {
    fn new(src: &[usize], tgt: &[usize], params: &'a GcParams) -> Self {
        let prefix = |xs: &[usize]| {
            std::iter::once(0)
                .chain(xs.iter().scan(0, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                }))
                .collect()
        };
        Self { src_prefix: prefix(src), tgt_prefix: prefix(tgt), priors: params.priors.all(), params }
    }

    /// Cost of move `k` ending at prefix point `(i, j)`, if the move fits and
    /// respects the hard links.
    fn step(&self, k: usize, i: usize, j: usize) -> Option<f64> {
        let arity = ARITIES[k];
        let (a, b) = (arity.src as usize, arity.tgt as usize);
        if a > i || b > j {
            return None;
        }
        let (pi, pj) = (i - a, j - b);
        let crosses = self.params.hard_links.iter().any(|&(hi, hj)| {
            let end_before = i <= hi && j <= hj;
            let start_after = pi >= hi && pj >= hj;
            !(end_before || start_after)
        });
        if crosses {
            return None;
        }
        let src_sum = self.src_prefix[i] - self.src_prefix[pi];
        let tgt_sum = self.tgt_prefix[j] - self.tgt_prefix[pj];
        Some(cost_for(arity, src_sum, tgt_sum, self.priors[k], self.params))
    }
}

/// Minimum-cost monotone alignment of two length sequences by dynamic programming.
///
/// Ties prefer, at each step of the backtrace, 1-1, then lower combined
/// arity, then the move advancing the source.
pub fn align_lengths(src: &[usize], tgt: &[usize], params: &GcParams) -> GcAlignment {
    let (n, m) = (src.len(), tgt.len());
    let scorer = Scorer::new(src, tgt, params);
    let width = m + 1;
    let mut cost = vec![f64::INFINITY; (n + 1) * width];
    let mut back: Vec<u8> = vec![u8::MAX; (n + 1) * width];
    cost[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut best_k = u8::MAX;
            for (k, arity) in ARITIES.iter().enumerate() {
                let Some(step) = scorer.step(k, i, j) else {
                    continue;
                };
                let (a, b) = (arity.src as usize, arity.tgt as usize);
                let prev = cost[(i - a) * width + (j - b)];
                let total = prev + step;
                if total < best {
                    best = total;
                    best_k = k as u8;
                }
            }
            cost[i * width + j] = best;
            back[i * width + j] = best_k;
        }
    }

    let mut beads = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let k = back[i * width + j] as usize;
        assert!(k < ARITIES.len(), "unreachable cell ({i}, {j}); hard links inconsistent");
        let arity = ARITIES[k];
        let step = scorer.step(k, i, j).expect("backtrace follows valid moves");
        i -= arity.src as usize;
        j -= arity.tgt as usize;
        beads.push((Bead { src_start: i, tgt_start: j, arity }, step));
    }
    beads.reverse();
    GcAlignment { beads, total_cost: cost[n * width + m] }
}

/// Measures texts in the configured unit and aligns them.
pub fn align_gale_church(src: &[&str], tgt: &[&str], params: &GcParams) -> GcAlignment {
    let measure = |xs: &[&str]| -> Vec<usize> { xs.iter().map(|t| params.length_unit.measure(t)).collect() };
    align_lengths(&measure(src), &measure(tgt), params)
}

/// Enumerates every monotone alignment and returns a minimum-cost one.
///
/// Independent of [`align_lengths`]: walks all segmentations depth-first,
/// summing bead costs from the start of the path, and skips a branch only
/// once its partial cost already exceeds the best complete path (bead costs
/// are non-negative). Ties are broken like the dynamic program's backtrace.
pub fn exhaustive_align(src: &[usize], tgt: &[usize], params: &GcParams) -> Result<GcAlignment, AlignError> {
    let size = src.len() + tgt.len();
    if size > EXHAUSTIVE_LIMIT {
        return Err(AlignError::InstanceTooLarge(size, EXHAUSTIVE_LIMIT));
    }
    struct Search<'s> {
        src: &'s [usize],
        tgt: &'s [usize],
        params: &'s GcParams,
        path: Vec<(usize, f64)>,
        best: Option<(f64, Vec<(usize, f64)>)>,
    }
    impl Search<'_> {
        // Preference of a complete path under the backtrace tie-break:
        // compare move indices from the last bead backwards.
        fn prefer(candidate: &[(usize, f64)], incumbent: &[(usize, f64)]) -> bool {
            let a = candidate.iter().rev().map(|(k, _)| *k);
            let b = incumbent.iter().rev().map(|(k, _)| *k);
            a.lt(b)
        }

        fn walk(&mut self, i: usize, j: usize, acc: f64) {
            if let Some((best, _)) = &self.best {
                if acc > *best {
                    return;
                }
            }
            if i == self.src.len() && j == self.tgt.len() {
                let better = match &self.best {
                    None => true,
                    Some((best, incumbent)) => {
                        acc < *best || (acc == *best && Self::prefer(&self.path, incumbent))
                    }
                };
                if better {
                    self.best = Some((acc, self.path.clone()));
                }
                return;
            }
            for (k, arity) in ARITIES.iter().enumerate() {
                let (a, b) = (arity.src as usize, arity.tgt as usize);
                let (ni, nj) = (i + a, j + b);
                if ni > self.src.len() || nj > self.tgt.len() {
                    continue;
                }
                let blocked = self
                    .params
                    .hard_links
                    .iter()
                    .any(|&(hi, hj)| !((ni <= hi && nj <= hj) || (i >= hi && j >= hj)));
                if blocked {
                    continue;
                }
                let cost =
                    bead_cost(&self.src[i..ni], &self.tgt[j..nj], self.params).expect("supported arity");
                self.path.push((k, cost));
                self.walk(ni, nj, acc + cost);
                self.path.pop();
            }
        }
    }
    let mut search = Search { src, tgt, params, path: Vec::new(), best: None };
    search.walk(0, 0, 0.0);
    let (total_cost, path) =
        search.best.ok_or_else(|| AlignError::InvalidParams("hard links admit no alignment".into()))?;
    let (mut i, mut j) = (0, 0);
    let beads = path
        .into_iter()
        .map(|(k, cost)| {
            let bead = Bead { src_start: i, tgt_start: j, arity: ARITIES[k] };
            i += ARITIES[k].src as usize;
            j += ARITIES[k].tgt as usize;
            (bead, cost)
        })
        .collect();
    Ok(GcAlignment { beads, total_cost })
}

/// Aligns the body paragraphs (2..=extent) of two language versions.
pub fn align_documents(
    src: &TeiDocument,
    tgt: &TeiDocument,
    params: &GcParams,
) -> Result<BitextAlignment, AlignError> {
    params.validate()?;
    let texts = |d: &TeiDocument| -> Vec<usize> {
        d.body_paragraphs().iter().map(|p| params.length_unit.measure(&p.text)).collect()
    };
    let result = align_lengths(&texts(src), &texts(tgt), params);
    Ok(BitextAlignment::from_beads(src, tgt, &result.beads, Aligner::GaleChurch, params.digest()))
}
