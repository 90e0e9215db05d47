//! Staged pipeline orchestration with on-disk caching.
//!
//! Every stage writes its artifact and records a digest in MANIFEST.json.
//! A stage is recomputed only when its digest no longer matches; downstream
//! stages always consume the on-disk artifacts, so a cached-and-resumed
//! pipeline produces byte-identical reports to a fresh one.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use asbench_core::eval::{leakage_audit, scale_audit, EvaluationReport};
use asbench_core::features::{FeatureSet, FeatureTable};
use asbench_core::io;
use asbench_core::metrics::{build_targets, TargetKind, TargetTable};
use asbench_core::pipeline::{
    build_suite, compute_feature_tables, compute_train_runs, compute_truth_runs, PipelineData,
};
use asbench_core::portfolio::RunTable;
use asbench_core::suite::ProblemInstance;

use crate::config::BenchConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StageEntry {
    pub digest: String,
    pub file: String,
    pub records: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    pub tool_version: String,
    pub master_seed: u64,
    pub stages: BTreeMap<String, StageEntry>,
}

impl Manifest {
    fn load(path: &Path) -> Manifest {
        std::fs::read_to_string(path)
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default()
    }

    fn store(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

pub struct Orchestrator {
    pub cfg: BenchConfig,
    pub out_dir: PathBuf,
    pub no_recompute: bool,
    manifest: Manifest,
}

/// A combined report file holding both audits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinedReport {
    pub config_digest: String,
    pub tool_version: String,
    pub leakage: Option<EvaluationReport>,
    pub scale: Option<EvaluationReport>,
}

impl Orchestrator {
    pub fn new(cfg: BenchConfig, no_recompute: bool) -> anyhow::Result<Orchestrator> {
        let out_dir = cfg.output_dir.clone();
        std::fs::create_dir_all(&out_dir)
            .with_context(|| format!("creating output dir {}", out_dir.display()))?;
        let mut manifest = Manifest::load(&out_dir.join("MANIFEST.json"));
        manifest.config_digest = cfg.digest();
        manifest.tool_version = TOOL_VERSION.to_string();
        manifest.master_seed = cfg.master_seed;
        Ok(Orchestrator {
            cfg,
            out_dir,
            no_recompute,
            manifest,
        })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    /// Cache check: is the stage's artifact present with a matching digest?
    fn cached(&self, stage: &str, file: &str, digest: &str) -> bool {
        self.manifest
            .stages
            .get(stage)
            .map(|e| e.digest == digest && e.file == file && self.path(file).exists())
            .unwrap_or(false)
    }

    fn record(&mut self, stage: &str, file: &str, digest: &str, records: usize) -> anyhow::Result<()> {
        self.manifest.stages.insert(
            stage.to_string(),
            StageEntry {
                digest: digest.to_string(),
                file: file.to_string(),
                records,
            },
        );
        self.manifest.store(&self.path("MANIFEST.json"))
    }

    fn stale(&self, stage: &str) -> anyhow::Error {
        anyhow::anyhow!(
            "stale cache: stage {stage} does not match the current config \
             (run without --no-recompute to rebuild)"
        )
    }

    pub fn suite(&self) -> anyhow::Result<Vec<ProblemInstance>> {
        Ok(build_suite(&self.cfg.to_params())?)
    }

    pub fn runs(&mut self, which: TargetSplit) -> anyhow::Result<RunTable> {
        let (stage, file) = match which {
            TargetSplit::Train => ("runs-train", "runs.csv"),
            TargetSplit::Truth => ("runs-truth", "runs-truth.csv"),
        };
        let digest = self.cfg.stage_digest(stage, &["suite", "portfolio"], &[]);
        let suite = self.suite()?;
        if !self.cached(stage, file, &digest) {
            if self.no_recompute {
                bail!(self.stale(stage));
            }
            let params = self.cfg.to_params();
            let table = match which {
                TargetSplit::Train => compute_train_runs(&params, &suite)?,
                TargetSplit::Truth => compute_truth_runs(&params, &suite)?,
            };
            io::write_runs_csv(&self.path(file), &table)?;
            self.record(stage, file, &digest, table.len())?;
        }
        Ok(io::read_runs_csv(&self.path(file), &suite)?)
    }

    pub fn features(&mut self) -> anyhow::Result<BTreeMap<FeatureSet, FeatureTable>> {
        let digest = self.cfg.stage_digest("features", &["suite", "features"], &[]);
        let all_cached = FeatureSet::ALL
            .iter()
            .all(|s| self.cached(&format!("features-{}", s.name()), &feature_file(*s), &digest));
        if !all_cached {
            if self.no_recompute {
                bail!(self.stale("features"));
            }
            let params = self.cfg.to_params();
            let suite = self.suite()?;
            let tables = compute_feature_tables(&params, &suite)?;
            for (set, table) in &tables {
                let file = feature_file(*set);
                io::write_features_csv(&self.path(&file), table)?;
                self.record(&format!("features-{}", set.name()), &file, &digest, table.len())?;
            }
        }
        let mut out = BTreeMap::new();
        for set in FeatureSet::ALL {
            out.insert(
                set,
                io::read_features_csv(&self.path(&feature_file(set)), set)?,
            );
        }
        Ok(out)
    }

    pub fn targets(&mut self, kind: TargetKind, which: TargetSplit) -> anyhow::Result<TargetTable> {
        let runs_stage = match which {
            TargetSplit::Train => "runs-train",
            TargetSplit::Truth => "runs-truth",
        };
        let stage = format!("targets-{}-{}", kind.name(), which.name());
        let file = format!("targets-{}-{}.csv", kind.name(), which.name());
        let digest = self.cfg.stage_digest(&stage, &["suite", "portfolio"], &[runs_stage]);
        if !self.cached(&stage, &file, &digest) {
            if self.no_recompute {
                bail!(self.stale(&stage));
            }
            let runs = self.runs(which)?;
            let table = build_targets(&runs, kind)?;
            io::write_targets_csv(&self.path(&file), &table)?;
            self.record(&stage, &file, &digest, table.len())?;
        }
        Ok(io::read_targets_csv(&self.path(&file))?)
    }

    fn assemble_data(&mut self) -> anyhow::Result<PipelineData> {
        Ok(PipelineData {
            suite: self.suite()?,
            train_runs: self.runs(TargetSplit::Train)?,
            truth_runs: self.runs(TargetSplit::Truth)?,
            features: self.features()?,
            train_rank_targets: self.targets(TargetKind::Rank, TargetSplit::Train)?,
            train_precision_targets: self.targets(TargetKind::Precision, TargetSplit::Train)?,
            truth_rank_targets: self.targets(TargetKind::Rank, TargetSplit::Truth)?,
            truth_precision_targets: self.targets(TargetKind::Precision, TargetSplit::Truth)?,
        })
    }

    pub fn audit_leakage(&mut self) -> anyhow::Result<EvaluationReport> {
        let stage = "report-leakage";
        let file = "report-leakage.json";
        let digest = self.cfg.stage_digest(
            stage,
            &["suite", "portfolio", "features", "forest", "splits"],
            &["runs-train", "runs-truth", "features"],
        );
        if !self.cached(stage, file, &digest) {
            if self.no_recompute {
                bail!(self.stale(stage));
            }
            let data = self.assemble_data()?;
            let report = leakage_audit(&self.cfg.to_params(), &data)?
                .with_provenance(&self.cfg.digest(), TOOL_VERSION);
            io::write_report_json(&self.path(file), &report)?;
            io::write_plotdata_leakage(&self.path("plotdata-fig1.csv"), &report)?;
            io::write_fold_metrics_csv(&self.path("folds-leakage.csv"), &report)?;
            self.record(stage, file, &digest, report.fold_metrics.len())?;
        }
        let report = io::read_report_json(&self.path(file))?;
        self.write_combined()?;
        Ok(report)
    }

    pub fn audit_scale(&mut self) -> anyhow::Result<EvaluationReport> {
        let stage = "report-scale";
        let file = "report-scale.json";
        let digest = self.cfg.stage_digest(
            stage,
            &["suite", "portfolio", "features", "forest", "audit"],
            &["runs-train", "runs-truth", "features"],
        );
        if !self.cached(stage, file, &digest) {
            if self.no_recompute {
                bail!(self.stale(stage));
            }
            let data = self.assemble_data()?;
            let report = scale_audit(&self.cfg.to_params(), &data)?
                .with_provenance(&self.cfg.digest(), TOOL_VERSION);
            io::write_report_json(&self.path(file), &report)?;
            io::write_plotdata_rescaling(&self.path("plotdata-fig2.csv"), &report)?;
            io::write_plotdata_mse_pre(&self.path("plotdata-fig3.csv"), &report)?;
            io::write_fold_metrics_csv(&self.path("folds-scale.csv"), &report)?;
            self.record(stage, file, &digest, report.fold_metrics.len())?;
        }
        let report = io::read_report_json(&self.path(file))?;
        self.write_combined()?;
        Ok(report)
    }

    /// report.json bundles whatever audits exist so far.
    fn write_combined(&self) -> anyhow::Result<()> {
        let leakage = io::read_report_json(&self.path("report-leakage.json")).ok();
        let scale = io::read_report_json(&self.path("report-scale.json")).ok();
        let combined = CombinedReport {
            config_digest: self.cfg.digest(),
            tool_version: TOOL_VERSION.to_string(),
            leakage,
            scale,
        };
        let mut text = serde_json::to_string_pretty(&combined)?;
        text.push('\n');
        std::fs::write(self.path("report.json"), text)?;
        Ok(())
    }
}

fn feature_file(set: FeatureSet) -> String {
    format!("features-{}.csv", set.name())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSplit {
    Train,
    Truth,
}

impl TargetSplit {
    pub fn name(&self) -> &'static str {
        match self {
            TargetSplit::Train => "train",
            TargetSplit::Truth => "truth",
        }
    }
}
