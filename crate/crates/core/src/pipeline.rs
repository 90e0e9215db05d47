//! End-to-end pipeline stages: suite construction, portfolio runs, feature
//! extraction, and target building, all as pure functions of
//! [`PipelineParams`]. The CLI wraps these with on-disk caching; tests call
//! them directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::Result;
use crate::features::{
    class_feature, ela_features, lhs_sample, noninf_features, noninf_spec, scale_feature,
    DesignSample, FeatureSet, FeatureTable, FeatureVector, ELA_FEATURE_COUNT,
};
use crate::metrics::{build_targets, TargetKind, TargetTable};
use crate::models::ForestParams;
use crate::portfolio::{run_portfolio, RunTable};
use crate::rng::{mix, tags};
use crate::suite::{list_suite, InstanceKey, ProblemInstance};

/// Experimental constants for a full pipeline execution. The defaults are
/// the headline configuration: 24 classes x 15 instances at dimension 5,
/// 1000 evaluations per dimension, 30 training and 100 ground-truth
/// repetitions, 250 samples per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub dim: usize,
    pub instances_per_class: usize,
    pub budget_per_dim: usize,
    pub train_repetitions: usize,
    pub truth_repetitions: usize,
    pub samples_per_dim: usize,
    /// Number of non-informative features; defaults to the ELA catalog size
    /// so the two sets are the same length.
    pub noninf_count: usize,
    pub forest: ForestParams,
    pub lio_test_fraction: f64,
    pub lio_repeats: usize,
    pub scale_factors: Vec<f64>,
    pub scale_classes: Vec<usize>,
    pub master_seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            dim: 5,
            instances_per_class: 15,
            budget_per_dim: 1000,
            train_repetitions: 30,
            truth_repetitions: 100,
            samples_per_dim: 250,
            noninf_count: ELA_FEATURE_COUNT,
            forest: ForestParams::default(),
            lio_test_fraction: 1.0 / 3.0,
            lio_repeats: 10,
            scale_factors: vec![1e-2, 1e-1, 1.0, 10.0, 100.0],
            scale_classes: vec![4, 13, 24],
            master_seed: 42,
        }
    }
}

impl PipelineParams {
    pub fn budget(&self) -> usize {
        self.budget_per_dim * self.dim
    }

    pub fn sample_size(&self) -> usize {
        self.samples_per_dim * self.dim
    }

    /// Master seed of the training run stage.
    pub fn train_master(&self) -> u64 {
        mix(&[self.master_seed, tags::TRAIN])
    }

    /// Master seed of the ground-truth run stage; disjoint from training.
    pub fn truth_master(&self) -> u64 {
        mix(&[self.master_seed, tags::TRUTH])
    }

    /// Seed for the design sample of one instance.
    pub fn lhs_seed(&self, key: InstanceKey) -> u64 {
        mix(&[
            self.master_seed,
            tags::LHS,
            key.class_id as u64,
            key.instance_id as u64,
        ])
    }
}

/// In-memory artifacts of the full pipeline.
#[derive(Debug, Clone)]
pub struct PipelineData {
    pub suite: Vec<ProblemInstance>,
    pub train_runs: RunTable,
    pub truth_runs: RunTable,
    pub features: BTreeMap<FeatureSet, FeatureTable>,
    pub train_rank_targets: TargetTable,
    pub train_precision_targets: TargetTable,
    pub truth_rank_targets: TargetTable,
    pub truth_precision_targets: TargetTable,
}

pub fn build_suite(params: &PipelineParams) -> Result<Vec<ProblemInstance>> {
    list_suite(params.dim, params.instances_per_class)
}

pub fn compute_train_runs(params: &PipelineParams, suite: &[ProblemInstance]) -> Result<RunTable> {
    run_portfolio(
        suite,
        params.budget(),
        params.train_repetitions,
        params.train_master(),
    )
}

pub fn compute_truth_runs(params: &PipelineParams, suite: &[ProblemInstance]) -> Result<RunTable> {
    run_portfolio(
        suite,
        params.budget(),
        params.truth_repetitions,
        params.truth_master(),
    )
}

/// One evaluated design sample per instance, seeded per instance.
pub fn compute_design_samples(
    params: &PipelineParams,
    suite: &[ProblemInstance],
) -> Vec<DesignSample> {
    suite
        .par_iter()
        .map(|inst| lhs_sample(inst, params.sample_size(), params.lhs_seed(inst.key())))
        .collect()
}

/// All four feature tables from one shared set of design samples.
pub fn compute_feature_tables(
    params: &PipelineParams,
    suite: &[ProblemInstance],
) -> Result<BTreeMap<FeatureSet, FeatureTable>> {
    let samples = compute_design_samples(params, suite);
    let spec = noninf_spec(params.noninf_count, params.master_seed);

    let ela_vecs: Vec<(InstanceKey, FeatureVector)> = samples
        .par_iter()
        .map(|s| (s.key(), ela_features(s)))
        .collect();
    let noninf_vecs: Vec<(InstanceKey, FeatureVector)> = samples
        .par_iter()
        .map(|s| (s.key(), noninf_features(s, &spec)))
        .collect();
    let class_vecs: Vec<(InstanceKey, FeatureVector)> = suite
        .iter()
        .map(|inst| (inst.key(), class_feature(inst)))
        .collect();
    let scale_vecs: Vec<(InstanceKey, FeatureVector)> = samples
        .iter()
        .map(|s| (s.key(), scale_feature(s)))
        .collect();

    let mut out = BTreeMap::new();
    out.insert(FeatureSet::Ela, FeatureTable::from_vectors(ela_vecs)?);
    out.insert(FeatureSet::NonInf, FeatureTable::from_vectors(noninf_vecs)?);
    out.insert(FeatureSet::Class, FeatureTable::from_vectors(class_vecs)?);
    out.insert(FeatureSet::Scale, FeatureTable::from_vectors(scale_vecs)?);
    Ok(out)
}

/// Runs every stage in memory: suite, training and truth runs, features,
/// and the four target tables.
pub fn compute_all(params: &PipelineParams) -> Result<PipelineData> {
    let suite = build_suite(params)?;
    let train_runs = compute_train_runs(params, &suite)?;
    let truth_runs = compute_truth_runs(params, &suite)?;
    let features = compute_feature_tables(params, &suite)?;
    let train_rank_targets = build_targets(&train_runs, TargetKind::Rank)?;
    let train_precision_targets = build_targets(&train_runs, TargetKind::Precision)?;
    let truth_rank_targets = build_targets(&truth_runs, TargetKind::Rank)?;
    let truth_precision_targets = build_targets(&truth_runs, TargetKind::Precision)?;
    Ok(PipelineData {
        suite,
        train_runs,
        truth_runs,
        features,
        train_rank_targets,
        train_precision_targets,
        truth_rank_targets,
        truth_precision_targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_params() -> PipelineParams {
        PipelineParams {
            dim: 2,
            instances_per_class: 2,
            budget_per_dim: 100,
            train_repetitions: 2,
            truth_repetitions: 3,
            samples_per_dim: 10,
            noninf_count: 12,
            forest: ForestParams {
                n_trees: 5,
                ..ForestParams::default()
            },
            lio_test_fraction: 0.5,
            lio_repeats: 2,
            scale_factors: vec![0.1, 1.0, 10.0],
            scale_classes: vec![4, 13, 24],
            master_seed: 7,
        }
    }

    #[test]
    fn train_and_truth_seeds_are_disjoint() {
        let p = PipelineParams::default();
        assert_ne!(p.train_master(), p.truth_master());
    }

    #[test]
    fn tiny_pipeline_shapes() {
        let p = tiny_params();
        let data = compute_all(&p).unwrap();
        assert_eq!(data.suite.len(), 48);
        assert_eq!(data.train_runs.len(), 48 * 5 * 2);
        assert_eq!(data.truth_runs.len(), 48 * 5 * 3);
        assert_eq!(data.features.len(), 4);
        for table in data.features.values() {
            assert_eq!(table.len(), 48);
        }
        assert_eq!(data.features[&FeatureSet::NonInf].names.len(), 12);
        assert_eq!(
            data.features[&FeatureSet::Ela].names.len(),
            ELA_FEATURE_COUNT
        );
        assert_eq!(data.train_rank_targets.len(), 48);
        assert_eq!(data.truth_precision_targets.len(), 48);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let p = tiny_params();
        let a = compute_all(&p).unwrap();
        let b = compute_all(&p).unwrap();
        for (ra, rb) in a.train_runs.records().iter().zip(b.train_runs.records()) {
            assert_eq!(ra.best_f.to_bits(), rb.best_f.to_bits());
        }
        assert_eq!(a.features, b.features);
        assert_eq!(a.truth_rank_targets, b.truth_rank_targets);
    }
}
