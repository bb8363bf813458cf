//! Fixture access and seeded synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use acquis_core::align::AlignmentLink;
use acquis_core::celex::CelexId;
use acquis_core::tei::{build_document, parse_tei, DocumentMeta, SectionBoundaries, TeiDocument};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn read_fixture(rel: &str) -> String {
    let path = fixtures().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load_tei(rel: &str) -> TeiDocument {
    parse_tei(&read_fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct synthetic ids `3YYYYDnnnn`, one per index.
pub fn synthetic_celex(i: usize) -> CelexId {
    CelexId::new(3, 1960 + (i / 9000) as u16, 'D', (i % 9000 + 1) as u16, None).unwrap()
}

pub fn document(celex: CelexId, lang: &str, body: Vec<String>) -> TeiDocument {
    let meta = DocumentMeta::new(celex, lang, &format!("Synthetic document {celex}"));
    build_document(meta, body, SectionBoundaries::default()).unwrap()
}

/// Letters-and-spaces text of exactly `len` characters, `len >= 1`.
pub fn filler(rng: &mut impl Rng, len: usize) -> String {
    let mut out = String::with_capacity(len + 9);
    while out.len() < len {
        if !out.is_empty() {
            out.push(' ');
        }
        for _ in 0..rng.random_range(2..9) {
            out.push(rng.random_range(b'a'..=b'z') as char);
        }
    }
    out.truncate(len);
    if out.ends_with(' ') {
        out.pop();
        out.push('x');
    }
    out
}

/// Approximately standard normal (Irwin-Hall with 12 terms).
pub fn gaussian(rng: &mut impl Rng) -> f64 {
    (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0
}

/// A document pair with its true links.
pub struct GoldPair {
    pub src: TeiDocument,
    pub tgt: TeiDocument,
    pub gold: Vec<AlignmentLink>,
}

/// One unit of translation: source-side and target-side paragraph groups.
enum Unit {
    Match,
    Deleted,
    MergedTarget,
    SplitTarget,
}

fn pick_unit(rng: &mut impl Rng, deletion: f64, merge: f64) -> Unit {
    let r: f64 = rng.random();
    if r < deletion {
        Unit::Deleted
    } else if r < deletion + merge / 2.0 {
        Unit::MergedTarget
    } else if r < deletion + merge {
        Unit::SplitTarget
    } else {
        Unit::Match
    }
}

/// Length-only corpus: translations keep length up to Gaussian noise with
/// variance proportional to length. Per source paragraph, `deletion` is the
/// chance it has no translation and `merge` the chance of a 2-1 or 1-2 unit.
pub fn length_corpus(seed: u64, n_docs: usize, deletion: f64, merge: f64) -> Vec<GoldPair> {
    let mut rng = rng(seed);
    (0..n_docs)
        .map(|d| {
            let units = rng.random_range(8..30);
            let (mut src, mut tgt, mut gold) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..units {
                let unit = pick_unit(&mut rng, deletion, merge);
                let mut len = || rng.random_range(25..450usize);
                let (s_lens, t_total): (Vec<usize>, usize) = match unit {
                    Unit::MergedTarget => {
                        let (a, b) = (len(), len());
                        (vec![a, b], a + b)
                    }
                    Unit::Deleted => (vec![len()], 0),
                    Unit::Match | Unit::SplitTarget => {
                        let a = len();
                        (vec![a], a)
                    }
                };
                let noisy = |rng: &mut ChaCha8Rng, l: usize| {
                    let sd = (l as f64 * 2.0).sqrt();
                    ((l as f64 + gaussian(rng) * sd).round() as usize).max(3)
                };
                let t_lens: Vec<usize> = match unit {
                    Unit::Deleted => vec![],
                    Unit::SplitTarget => {
                        let cut = (t_total as f64 * rng.random_range(0.3..0.7)) as usize;
                        vec![noisy(&mut rng, cut.max(3)), noisy(&mut rng, (t_total - cut).max(3))]
                    }
                    _ => vec![noisy(&mut rng, t_total)],
                };
                let s_first = src.len() as u32 + 2;
                let t_first = tgt.len() as u32 + 2;
                for &l in &s_lens {
                    src.push(filler(&mut rng, l));
                }
                for &l in &t_lens {
                    tgt.push(filler(&mut rng, l));
                }
                gold.push(AlignmentLink::new(
                    (s_first..s_first + s_lens.len() as u32).collect(),
                    (t_first..t_first + t_lens.len() as u32).collect(),
                    None,
                ));
            }
            let celex = synthetic_celex(d);
            GoldPair { src: document(celex, "en", src), tgt: document(celex, "fr", tgt), gold }
        })
        .collect()
}

/// A bitext over disjoint vocabularies with known translation pairs.
pub struct PlantedCorpus {
    pub pairs: Vec<GoldPair>,
    pub planted: Vec<(String, String)>,
}

fn letters(mut i: usize, width: usize) -> String {
    let mut s = String::new();
    for _ in 0..width {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
    }
    s
}

/// `n_docs * paras` source paragraphs, each holding two to four of the 50
/// planted source words among independent noise words; the translation
/// holds the planted partners. Noise vocabularies of the two sides are
/// disjoint, and a third of the paragraphs carry a shared number.
pub fn planted_corpus(seed: u64, n_docs: usize, paras: usize, deletion: f64, merge: f64) -> PlantedCorpus {
    let mut rng = rng(seed);
    let planted: Vec<(String, String)> =
        (0..50).map(|i| (format!("q{}", letters(i, 3)), format!("z{}", letters(i, 3)))).collect();
    let noise_src: Vec<String> = (0..3000).map(|i| format!("x{}", letters(i * 7 + 3, 4))).collect();
    let noise_tgt: Vec<String> = (0..3000).map(|i| format!("y{}", letters(i * 11 + 5, 4))).collect();

    let sentence = |rng: &mut ChaCha8Rng| -> (String, String) {
        let k = rng.random_range(2..=4);
        let chosen = rand::seq::index::sample(rng, planted.len(), k).into_vec();
        let noise = rng.random_range(3..9);
        let mut s: Vec<String> = chosen.iter().map(|&i| planted[i].0.clone()).collect();
        let mut t: Vec<String> = chosen.iter().map(|&i| planted[i].1.clone()).collect();
        for _ in 0..noise {
            s.push(noise_src[rng.random_range(0..noise_src.len())].clone());
        }
        for _ in 0..noise + rng.random_range(0..2) {
            t.push(noise_tgt[rng.random_range(0..noise_tgt.len())].clone());
        }
        if rng.random_bool(1.0 / 3.0) {
            let n = rng.random_range(1..2000).to_string();
            s.push(n.clone());
            t.push(n);
        }
        s.shuffle(rng);
        t.shuffle(rng);
        (s.join(" "), t.join(" "))
    };

    let pairs = (0..n_docs)
        .map(|d| {
            let (mut src, mut tgt, mut gold) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..paras {
                let unit = pick_unit(&mut rng, deletion, merge);
                let s_first = src.len() as u32 + 2;
                let t_first = tgt.len() as u32 + 2;
                let (ns, nt) = match unit {
                    Unit::Match => {
                        let (s, t) = sentence(&mut rng);
                        src.push(s);
                        tgt.push(t);
                        (1, 1)
                    }
                    Unit::Deleted => {
                        src.push(sentence(&mut rng).0);
                        (1, 0)
                    }
                    Unit::MergedTarget => {
                        let (s1, t1) = sentence(&mut rng);
                        let (s2, t2) = sentence(&mut rng);
                        src.push(s1);
                        src.push(s2);
                        tgt.push(format!("{t1} {t2}"));
                        (2, 1)
                    }
                    Unit::SplitTarget => {
                        let (s1, t1) = sentence(&mut rng);
                        let (s2, t2) = sentence(&mut rng);
                        src.push(format!("{s1} {s2}"));
                        tgt.push(t1);
                        tgt.push(t2);
                        (1, 2)
                    }
                };
                gold.push(AlignmentLink::new(
                    (s_first..s_first + ns).collect(),
                    (t_first..t_first + nt).collect(),
                    None,
                ));
            }
            let celex = synthetic_celex(d);
            GoldPair { src: document(celex, "en", src), tgt: document(celex, "fr", tgt), gold }
        })
        .collect();
    PlantedCorpus { pairs, planted }
}

/// Exact-match link F1 of `predicted` against `gold`, pooled over documents.
pub fn link_f1(predicted: &[Vec<AlignmentLink>], gold: &[Vec<AlignmentLink>]) -> f64 {
    let (mut hit, mut n_pred, mut n_gold) = (0usize, 0usize, 0usize);
    for (p, g) in predicted.iter().zip(gold) {
        n_pred += p.len();
        n_gold += g.len();
        hit += p.iter().filter(|l| g.iter().any(|x| x.same_pointers(l))).count();
    }
    if hit == 0 {
        return 0.0;
    }
    let (precision, recall) = (hit as f64 / n_pred as f64, hit as f64 / n_gold as f64);
    2.0 * precision * recall / (precision + recall)
}

/// Every file under `root`, keyed by relative path.
pub fn snapshot_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Recursively copies `src` into `dst`.
pub fn copy_dir(src: &Path, dst: &Path) {
    std::fs::create_dir_all(dst).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let path = entry.unwrap().path();
        let target = dst.join(path.file_name().unwrap());
        if path.is_dir() {
            copy_dir(&path, &target);
        } else {
            std::fs::copy(&path, &target).unwrap();
        }
    }
}

/// A scratch copy of the pipeline fixture; returns the config path.
pub fn pipeline_workspace(root: &Path) -> PathBuf {
    copy_dir(&fixtures().join("pipeline"), &root.join("pipeline"));
    copy_dir(&fixtures().join("langid"), &root.join("langid"));
    let _ = std::fs::remove_dir_all(root.join("pipeline").join("out"));
    root.join("pipeline").join("acquis.json")
}
