//! Run configuration: defaults, then a TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::instance::{ContextBucket, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolChoice {
    Templated,
    External,
}

/// Fully resolved settings for gen and run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tasks: Vec<TaskKind>,
    pub buckets: Vec<ContextBucket>,
    /// Instances per (task, bucket).
    pub n: usize,
    pub seed: u64,
    pub tokenizer: String,
    /// Smallest target length drawn for any instance.
    pub min_tokens: usize,
    pub pool: PoolChoice,
    /// Provider used to write texts when `pool = "external"`.
    pub pool_provider: Option<String>,
    pub idk_few_shot: bool,
    pub provider: String,
    pub concurrency: usize,
    pub retries: u32,
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub instances: PathBuf,
    pub results: PathBuf,
    pub scores: PathBuf,
    pub report_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tasks: TaskKind::ALL.to_vec(),
            buckets: vec![ContextBucket::B32K],
            n: 300,
            seed: 0,
            tokenizer: crate::tokenizer::HeuristicTokenizer::NAME.to_owned(),
            min_tokens: 8192,
            pool: PoolChoice::Templated,
            pool_provider: None,
            idk_few_shot: false,
            provider: "mock:oracle".into(),
            concurrency: 4,
            retries: 3,
            max_output_tokens: 1024,
            temperature: 0.0,
            instances: "instances.jsonl".into(),
            results: "results.jsonl".into(),
            scores: "scores.jsonl".into(),
            report_dir: "report".into(),
        }
    }
}

/// A partial config; unset fields defer to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub tasks: Option<Vec<TaskKind>>,
    pub buckets: Option<Vec<ContextBucket>>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub tokenizer: Option<String>,
    pub min_tokens: Option<usize>,
    pub pool: Option<PoolChoice>,
    pub pool_provider: Option<String>,
    pub idk_few_shot: Option<bool>,
    pub provider: Option<String>,
    pub concurrency: Option<usize>,
    pub retries: Option<u32>,
    pub max_output_tokens: Option<u32>,
    pub temperature: Option<f64>,
    pub instances: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub report_dir: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn load(path: &Path) -> Result<ConfigLayer, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
    }
}

macro_rules! overlay {
    ($cfg:ident, $layer:ident, $($field:ident),*) => {
        $(if let Some(v) = $layer.$field { $cfg.$field = v; })*
    };
}

impl RunConfig {
    pub fn apply(mut self, layer: ConfigLayer) -> RunConfig {
        if layer.pool_provider.is_some() {
            self.pool_provider = layer.pool_provider;
        }
        overlay!(
            self,
            layer,
            tasks,
            buckets,
            n,
            seed,
            tokenizer,
            min_tokens,
            pool,
            idk_few_shot,
            provider,
            concurrency,
            retries,
            max_output_tokens,
            temperature,
            instances,
            results,
            scores,
            report_dir
        );
        self
    }

    /// Defaults, then the optional file, then flags.
    pub fn resolve(file: Option<&Path>, flags: ConfigLayer) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg = cfg.apply(ConfigLayer::load(path)?);
        }
        let cfg = cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.tasks.is_empty() || self.buckets.is_empty() {
            return Err("at least one task and one bucket are required".into());
        }
        if self.concurrency == 0 {
            return Err("concurrency must be at least 1".into());
        }
        if self.pool == PoolChoice::External && self.pool_provider.is_none() {
            return Err("pool = \"external\" needs pool_provider".into());
        }
        for b in &self.buckets {
            if self.min_tokens == 0 || self.min_tokens as f64 > b.max_tokens() as f64 / 1.1 {
                return Err(format!(
                    "min_tokens {} does not fit bucket {b}",
                    self.min_tokens
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "seed = 5\nn = 10\ntasks = [\"idk\"]\nbuckets = [\"128k\"]\n",
        )
        .unwrap();
        let flags = ConfigLayer {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&path), flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.n, 10);
        assert_eq!(cfg.tasks, [TaskKind::Idk]);
        assert_eq!(cfg.buckets, [ContextBucket::B128K]);
        assert_eq!(cfg.concurrency, RunConfig::default().concurrency);
    }

    #[test]
    fn round_trips_and_rejects_unknown_keys() {
        let cfg = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(toml::from_str::<ConfigLayer>("api_key = \"x\"").is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig {
            concurrency: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            min_tokens: 40_000,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            pool: PoolChoice::External,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
