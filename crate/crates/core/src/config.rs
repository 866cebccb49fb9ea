//! Run configuration: one JSON file covering corpus location, simulation,
//! training, evaluation, and artifact budgets.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::eval::BootstrapConfig;
use crate::ranker::TrainParams;
use crate::sim::SimConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("corpus directory {0} contains no matching files")]
    EmptyCorpus(PathBuf),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    /// One keyword per line; empty when absent.
    pub keywords_file: Option<PathBuf>,
    /// File extensions indexed from the corpus directory.
    pub corpus_extensions: Vec<String>,
    pub sim: SimConfig,
    pub train: TrainParams,
    pub bootstrap: BootstrapConfig,
    pub split_ratio: f64,
    pub size_budget_bytes: usize,
    pub latency_budget_ms: f64,
    pub latency_candidates: usize,
    pub latency_repetitions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::from("corpus"),
            keywords_file: None,
            corpus_extensions: vec!["py".into()],
            sim: SimConfig::default(),
            train: TrainParams::default(),
            bootstrap: BootstrapConfig::default(),
            split_ratio: 0.8,
            size_budget_bytes: crate::artifact::DEFAULT_SIZE_BUDGET,
            latency_budget_ms: 30.0,
            latency_candidates: 100,
            latency_repetitions: 200,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        config.validate()?;
        // Relative paths resolve against the config file's directory.
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(config.rebase(base))
    }

    fn rebase(mut self, base: &Path) -> Self {
        if self.corpus_dir.is_relative() {
            self.corpus_dir = base.join(&self.corpus_dir);
        }
        if let Some(k) = &self.keywords_file {
            if k.is_relative() {
                self.keywords_file = Some(base.join(k));
            }
        }
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0 < self.split_ratio && self.split_ratio < 1.0) {
            return Err(ConfigError::Invalid("split_ratio must be in (0, 1)".into()));
        }
        if self.latency_candidates == 0 || self.latency_repetitions == 0 {
            return Err(ConfigError::Invalid(
                "latency_candidates and latency_repetitions must be positive".into(),
            ));
        }
        if self.corpus_extensions.is_empty() {
            return Err(ConfigError::Invalid("corpus_extensions must be non-empty".into()));
        }
        Ok(())
    }

    /// All corpus files as `(relative_path, contents)`, sorted by path.
    pub fn load_corpus(&self) -> Result<Vec<(String, String)>, ConfigError> {
        let mut files = Vec::new();
        for entry in WalkDir::new(&self.corpus_dir).sort_by_file_name() {
            let entry = entry.map_err(|e| ConfigError::Io {
                path: self.corpus_dir.clone(),
                source: e.into(),
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let ext = entry.path().extension().and_then(|e| e.to_str()).unwrap_or("");
            if !self.corpus_extensions.iter().any(|want| want == ext) {
                continue;
            }
            let text = fs::read_to_string(entry.path()).map_err(|source| ConfigError::Io {
                path: entry.path().to_path_buf(),
                source,
            })?;
            let rel = entry
                .path()
                .strip_prefix(&self.corpus_dir)
                .unwrap_or(entry.path())
                .to_string_lossy()
                .replace('\\', "/");
            files.push((rel, text));
        }
        files.sort();
        if files.is_empty() {
            return Err(ConfigError::EmptyCorpus(self.corpus_dir.clone()));
        }
        Ok(files)
    }

    pub fn load_keywords(&self) -> Result<BTreeSet<String>, ConfigError> {
        let Some(path) = &self.keywords_file else {
            return Ok(BTreeSet::new());
        };
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn defaults_round_trip() {
        let config = RunConfig::default();
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.split_ratio, 0.8);
        assert_eq!(back.latency_budget_ms, 30.0);
        // empty object is a valid config
        let minimal: RunConfig = serde_json::from_str("{}").unwrap();
        assert!(minimal.validate().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"split_ration": 0.8}"#);
        assert!(err.is_err());
    }

    #[test]
    fn load_resolves_relative_paths_and_reads_corpus() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("src")).unwrap();
        fs::write(dir.path().join("src/a.py"), "def alpha():\n    return 1\n").unwrap();
        fs::write(dir.path().join("src/b.txt"), "ignored").unwrap();
        fs::write(dir.path().join("kw.txt"), "def\nreturn\n# comment\n\n").unwrap();
        let mut f = fs::File::create(dir.path().join("run.json")).unwrap();
        write!(
            f,
            r#"{{"corpus_dir": "src", "keywords_file": "kw.txt"}}"#
        )
        .unwrap();

        let config = RunConfig::load(&dir.path().join("run.json")).unwrap();
        let corpus = config.load_corpus().unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].0, "a.py");
        let kw = config.load_keywords().unwrap();
        assert_eq!(kw.len(), 2);
        assert!(kw.contains("def"));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            corpus_dir: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        assert!(matches!(config.load_corpus(), Err(ConfigError::EmptyCorpus(_))));
    }

    #[test]
    fn bad_split_ratio_rejected() {
        let config = RunConfig { split_ratio: 1.0, ..RunConfig::default() };
        assert!(matches!(config.validate(), Err(ConfigError::Invalid(_))));
    }
}
