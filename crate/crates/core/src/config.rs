//! JSON pipeline configuration.
//!
//! Every field has a default; relative paths resolve against the directory
//! holding the configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::align::gale_church::GcParams;
use crate::align::hunalign::HunParams;
use crate::align::Aligner;
use crate::celex::{CelexId, Endpoint};
use crate::ingest::{FetchSource, ProfileOptions};
use crate::lang::{canonical_pair, is_known, LANGUAGES};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanguageIdConfig {
    /// Directory of `<lang>.profile` files.
    pub profiles_dir: Option<PathBuf>,
    /// Directory of `<lang>.txt` training texts, used when no profile exists.
    pub training_dir: Option<PathBuf>,
    pub options: ProfileOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub languages: Vec<String>,
    pub source: FetchSource,
    pub output_root: PathBuf,
    pub aligners: Vec<Aligner>,
    pub gc_params: GcParams,
    pub hun_params: HunParams,
    /// Apply the ten-language availability criterion.
    pub selection: bool,
    /// Overrides the lexicon sampling seed when set.
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    /// Restricts processing to these documents when non-empty.
    pub celex: Vec<CelexId>,
    /// Restricts alignment to these pairs when non-empty.
    pub pairs: Vec<(String, String)>,
    pub language_id: LanguageIdConfig,
    /// JSON object mapping CELEX ids to lists of EUROVOC codes.
    pub eurovoc_file: Option<PathBuf>,
    /// Endpoint whose URL is recorded as the header source; the fetch
    /// location itself when absent.
    pub header_endpoint: Option<Endpoint>,
    /// Header `date.created`; omitted when empty.
    pub created: String,
    /// Rows kept in the descriptor frequency table.
    pub eurovoc_top_n: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            languages: LANGUAGES.iter().map(|(c, _)| c.to_string()).collect(),
            source: FetchSource::local("corpus"),
            output_root: PathBuf::from("out"),
            aligners: vec![Aligner::GaleChurch, Aligner::Hunalign],
            gc_params: GcParams::default(),
            hun_params: HunParams::default(),
            selection: true,
            seed: None,
            jobs: 0,
            celex: Vec::new(),
            pairs: Vec::new(),
            language_id: LanguageIdConfig::default(),
            eurovoc_file: None,
            header_endpoint: Some(Endpoint::Lexuriserv),
            created: String::new(),
            eurovoc_top_n: 20,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl PipelineConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: PipelineConfig = serde_json::from_str(text)?;
        cfg.resolve_paths(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let FetchSource::LocalDirectory { root, .. } = &mut self.source {
            fix(root);
        }
        fix(&mut self.output_root);
        for p in
            [&mut self.language_id.profiles_dir, &mut self.language_id.training_dir, &mut self.eurovoc_file]
                .into_iter()
                .flatten()
        {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.languages.is_empty() {
            return invalid("languages must not be empty".into());
        }
        if let Some(bad) = self.languages.iter().find(|l| !is_known(l)) {
            return invalid(format!("unknown language {bad:?}"));
        }
        for (a, b) in &self.pairs {
            if a == b || !self.languages.contains(a) || !self.languages.contains(b) {
                return invalid(format!("pair {a}-{b} is not over two configured languages"));
            }
        }
        if self.aligners.is_empty() {
            return invalid("at least one aligner is required".into());
        }
        self.gc_params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.effective_hun_params().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// HunAlign parameters with the seed override applied.
    pub fn effective_hun_params(&self) -> HunParams {
        let mut p = self.hun_params.clone();
        if let Some(seed) = self.seed {
            p.rng_seed = seed;
        }
        p
    }

    /// Configured pairs, or every pair over the languages, canonicalized.
    pub fn language_pairs(&self) -> Vec<(String, String)> {
        if self.pairs.is_empty() {
            crate::lang::all_pairs(&self.languages)
        } else {
            let mut out: Vec<(String, String)> = self
                .pairs
                .iter()
                .map(|(a, b)| {
                    let (x, y) = canonical_pair(a, b);
                    (x.to_owned(), y.to_owned())
                })
                .collect();
            out.sort();
            out.dedup();
            out
        }
    }

    pub fn tei_dir(&self, lang: &str) -> PathBuf {
        self.output_root.join("tei").join(lang)
    }

    pub fn alignment_dir(&self, aligner: Aligner) -> PathBuf {
        self.output_root.join("alignments").join(aligner.as_str())
    }

    pub fn bitext_dir(&self, aligner: Aligner) -> PathBuf {
        self.output_root.join("bitext").join(aligner.as_str())
    }

    pub fn stats_dir(&self) -> PathBuf {
        self.output_root.join("stats")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let cfg = PipelineConfig::from_json(r#"{"languages": ["fr", "en"]}"#, Path::new("/base")).unwrap();
        assert_eq!(cfg.output_root, PathBuf::from("/base/out"));
        assert_eq!(cfg.aligners.len(), 2);
        assert_eq!(cfg.language_pairs(), [("en".to_string(), "fr".to_string())]);
        assert_eq!(cfg.hun_params, HunParams::default());
    }

    #[test]
    fn nested_parameters_and_seed_override() {
        let json = r#"{
            "languages": ["et", "mt", "en"],
            "source": {"mode": "local_directory", "root": "/data", "retrieved": "2006-02-20"},
            "gc_params": {"variance": 7.0},
            "hun_params": {"max_split": 4},
            "seed": 7,
            "pairs": [["mt", "et"]],
            "celex": ["31960D0511"]
        }"#;
        let cfg = PipelineConfig::from_json(json, Path::new("/x")).unwrap();
        assert_eq!(cfg.gc_params.variance, 7.0);
        assert_eq!(cfg.gc_params.mean_ratio, 1.0);
        assert_eq!(cfg.effective_hun_params().rng_seed, 7);
        assert_eq!(cfg.effective_hun_params().max_split, 4);
        assert_eq!(cfg.language_pairs(), [("et".to_string(), "mt".to_string())]);
        assert_eq!(cfg.celex[0].to_string(), "31960D0511");
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |j: &str| PipelineConfig::from_json(j, Path::new(".")).is_err();
        assert!(bad(r#"{"languages": []}"#));
        assert!(bad(r#"{"languages": ["xx"]}"#));
        assert!(bad(r#"{"languages": ["en"], "pairs": [["en", "fr"]]}"#));
        assert!(bad(r#"{"languages": ["en"], "typo": 1}"#));
        assert!(bad(r#"{"languages": ["en"], "celex": ["2199D0624"]}"#));
        assert!(bad(r#"{"languages": ["en"], "gc_params": {"variance": -1}}"#));
        assert!(bad(r#"{"languages": ["en"], "aligners": []}"#));
    }
}
