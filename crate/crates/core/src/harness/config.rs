use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::corpus::PreprocessConfig;
use crate::refine::{load_lexicon, RefinementConfig};
use crate::vectorindex::WeightingMode;

/// Summary means quoted for a dataset, checked against the per-query columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadlineMeans {
    pub baseline: f64,
    pub refined: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus_path: PathBuf,
    pub queries: Vec<String>,
    pub refinement: RefinementConfig,
    pub preprocess: PreprocessConfig,
    pub weighting_mode: WeightingMode,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub headline_means: Option<HeadlineMeans>,
}

fn default_k() -> usize {
    5
}
fn default_m() -> usize {
    2
}
fn default_iterations() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corpus_path: PathBuf,
    queries: Vec<String>,
    #[serde(default = "default_k")]
    k_top_docs: usize,
    #[serde(default = "default_m")]
    m_terms: usize,
    #[serde(default = "default_iterations")]
    max_iterations: usize,
    #[serde(default = "default_true")]
    accept_only_improving: bool,
    descriptor_lexicon_path: Option<PathBuf>,
    stopwords_path: Option<PathBuf>,
    #[serde(default)]
    weighting_mode: WeightingMode,
    #[serde(default = "default_output")]
    output_dir: PathBuf,
    #[serde(default)]
    seed: u64,
    headline_means: Option<HeadlineMeans>,
}

impl ExperimentConfig {
    /// Config with bundled stopwords and lexicon.
    pub fn new(corpus_path: impl Into<PathBuf>, queries: Vec<String>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            corpus_path: corpus_path.into(),
            queries,
            refinement: RefinementConfig::default(),
            preprocess: PreprocessConfig::default(),
            weighting_mode: WeightingMode::Paper,
            output_dir: output_dir.into(),
            seed: 0,
            headline_means: None,
        }
    }

    /// Parses a JSON config. Relative paths resolve against the file's
    /// directory.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let raw = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_json(&raw, base)
    }

    pub fn from_json(raw: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let file: ConfigFile = serde_json::from_str(raw).map_err(|e| HarnessError::Config(e.to_string()))?;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };

        let mut refinement = RefinementConfig {
            k_top_docs: file.k_top_docs,
            m_terms: file.m_terms,
            max_iterations: file.max_iterations,
            accept_only_improving: file.accept_only_improving,
            ..RefinementConfig::default()
        };
        if let Some(p) = &file.descriptor_lexicon_path {
            refinement.descriptor_lexicon = load_lexicon(&resolve(p))?;
        }
        let preprocess = match &file.stopwords_path {
            Some(p) => PreprocessConfig::from_stopword_file(&resolve(p))?,
            None => PreprocessConfig::default(),
        };
        let config = Self {
            corpus_path: resolve(&file.corpus_path),
            queries: file.queries,
            refinement,
            preprocess,
            weighting_mode: file.weighting_mode,
            output_dir: resolve(&file.output_dir),
            seed: file.seed,
            headline_means: file.headline_means,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.queries.is_empty() {
            return Err(HarnessError::Config("queries must not be empty".to_owned()));
        }
        self.refinement.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_json(r#"{"corpus_path": "c.jsonl", "queries": ["q"]}"#, Path::new("/base")).unwrap();
        assert_eq!(c.corpus_path, Path::new("/base/c.jsonl"));
        assert_eq!(c.output_dir, Path::new("/base/out"));
        assert_eq!(c.refinement, RefinementConfig::default());
        assert_eq!(c.weighting_mode, WeightingMode::Paper);
        assert_eq!(c.headline_means, None);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = Path::new(".");
        assert!(ExperimentConfig::from_json(r#"{"corpus_path": "c", "queries": []}"#, base).is_err());
        assert!(ExperimentConfig::from_json(r#"{"corpus_path": "c", "queries": ["q"], "max_iterations": 0}"#, base).is_err());
        assert!(ExperimentConfig::from_json(r#"{"corpus_path": "c", "queries": ["q"], "bogus": 1}"#, base).is_err());
        assert!(ExperimentConfig::from_json(r#"{"corpus_path": "c", "queries": ["q"], "weighting_mode": "bm25"}"#, base).is_err());
        assert!(ExperimentConfig::from_json("not json", base).is_err());
    }
}
