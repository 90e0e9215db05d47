//! Benchmark configuration file (TOML, sectioned key-value) and the stable
//! config digest embedded in every artifact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use asbench_core::models::ForestParams;
use asbench_core::pipeline::PipelineParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteCfg {
    pub dim: usize,
    pub instances_per_class: usize,
}

impl Default for SuiteCfg {
    fn default() -> Self {
        SuiteCfg {
            dim: 5,
            instances_per_class: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PortfolioCfg {
    pub budget_per_dim: usize,
    pub train_repetitions: usize,
    pub truth_repetitions: usize,
}

impl Default for PortfolioCfg {
    fn default() -> Self {
        PortfolioCfg {
            budget_per_dim: 1000,
            train_repetitions: 30,
            truth_repetitions: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesCfg {
    pub samples_per_dim: usize,
    pub noninf_count: usize,
}

impl Default for FeaturesCfg {
    fn default() -> Self {
        FeaturesCfg {
            samples_per_dim: 250,
            noninf_count: asbench_core::features::ELA_FEATURE_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestCfg {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: f64,
    pub bootstrap: bool,
}

impl Default for ForestCfg {
    fn default() -> Self {
        let p = ForestParams::default();
        ForestCfg {
            n_trees: p.n_trees,
            max_depth: p.max_depth,
            min_samples_split: p.min_samples_split,
            min_samples_leaf: p.min_samples_leaf,
            max_features: p.max_features,
            bootstrap: p.bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitsCfg {
    pub lio_test_fraction: f64,
    pub lio_repeats: usize,
}

impl Default for SplitsCfg {
    fn default() -> Self {
        SplitsCfg {
            lio_test_fraction: 1.0 / 3.0,
            lio_repeats: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditCfg {
    pub scale_factors: Vec<f64>,
    pub scale_classes: Vec<usize>,
}

impl Default for AuditCfg {
    fn default() -> Self {
        AuditCfg {
            scale_factors: vec![1e-2, 1e-1, 1.0, 10.0, 100.0],
            scale_classes: vec![4, 13, 24],
        }
    }
}

/// The full benchmark configuration; all defaults match the headline
/// experimental constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub suite: SuiteCfg,
    pub portfolio: PortfolioCfg,
    pub features: FeaturesCfg,
    pub forest: ForestCfg,
    pub splits: SplitsCfg,
    pub audit: AuditCfg,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            master_seed: 42,
            output_dir: PathBuf::from("out"),
            suite: SuiteCfg::default(),
            portfolio: PortfolioCfg::default(),
            features: FeaturesCfg::default(),
            forest: ForestCfg::default(),
            splits: SplitsCfg::default(),
            audit: AuditCfg::default(),
        }
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> anyhow::Result<BenchConfig> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }

    pub fn to_params(&self) -> PipelineParams {
        PipelineParams {
            dim: self.suite.dim,
            instances_per_class: self.suite.instances_per_class,
            budget_per_dim: self.portfolio.budget_per_dim,
            train_repetitions: self.portfolio.train_repetitions,
            truth_repetitions: self.portfolio.truth_repetitions,
            samples_per_dim: self.features.samples_per_dim,
            noninf_count: self.features.noninf_count,
            forest: ForestParams {
                n_trees: self.forest.n_trees,
                max_depth: self.forest.max_depth,
                min_samples_split: self.forest.min_samples_split,
                min_samples_leaf: self.forest.min_samples_leaf,
                max_features: self.forest.max_features,
                bootstrap: self.forest.bootstrap,
                seed: 0,
            },
            lio_test_fraction: self.splits.lio_test_fraction,
            lio_repeats: self.splits.lio_repeats,
            scale_factors: self.audit.scale_factors.clone(),
            scale_classes: self.audit.scale_classes.clone(),
            master_seed: self.master_seed,
        }
    }

    /// Stable hash of the canonicalized content (JSON with struct field
    /// order; the output directory is excluded so moving outputs does not
    /// invalidate caches).
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex_digest(json.as_bytes())
    }

    /// Digest of one pipeline stage: the stage name, the config sections it
    /// depends on, and its parents' digests.
    pub fn stage_digest(&self, stage: &str, sections: &[&str], parents: &[&str]) -> String {
        let full = serde_json::to_value(self).expect("config serializes");
        let mut parts = vec![format!("stage:{stage}"), format!("seed:{}", self.master_seed)];
        for s in sections {
            parts.push(format!("{s}:{}", full[s]));
        }
        for p in parents {
            parts.push(format!("parent:{p}"));
        }
        hex_digest(parts.join("|").as_bytes())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = BenchConfig::default();
        let b = BenchConfig::default();
        assert_eq!(a.digest(), b.digest());
        let mut c = BenchConfig::default();
        c.master_seed = 43;
        assert_ne!(a.digest(), c.digest());
        // output dir does not affect the digest
        let mut d = BenchConfig::default();
        d.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.digest(), d.digest());
    }

    #[test]
    fn stage_digest_tracks_sections_and_parents() {
        let a = BenchConfig::default();
        let mut b = BenchConfig::default();
        b.forest.n_trees = 10;
        // runs do not depend on the forest section
        assert_eq!(
            a.stage_digest("runs-train", &["suite", "portfolio"], &[]),
            b.stage_digest("runs-train", &["suite", "portfolio"], &[])
        );
        assert_ne!(
            a.stage_digest("report", &["forest"], &[]),
            b.stage_digest("report", &["forest"], &[])
        );
        assert_ne!(
            a.stage_digest("x", &[], &["p1"]),
            a.stage_digest("x", &[], &["p2"])
        );
    }

    #[test]
    fn toml_round_trip_with_defaults() {
        let cfg = BenchConfig::default();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: BenchConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        // partial files fill in defaults
        let partial: BenchConfig = toml::from_str("master_seed = 7\n[suite]\ndim = 2\n").unwrap();
        assert_eq!(partial.master_seed, 7);
        assert_eq!(partial.suite.dim, 2);
        assert_eq!(partial.portfolio.budget_per_dim, 1000);
    }
}
