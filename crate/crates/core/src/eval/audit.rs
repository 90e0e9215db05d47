//! The two headline audits.
//!
//! The leakage audit trains the rank meta-models {random, mean, ela,
//! non-inf, class} under both leave-instance-out and leave-problem-out
//! splits and reports per-fold test PRE against ground-truth rankings from
//! the independent high-repetition run table.
//!
//! The scale audit compares the precision/rank meta-models under
//! leave-problem-out by both MSE and PRE, runs the paired statistical
//! tests, and produces the rescaling table (ranks and precisions of paired
//! runs across scale factors).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::splits::{lio_splits, lpo_splits, SplitKind};
use super::stats_tests::{
    friedman, wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative,
};
use super::{mse, pre_rank_vectors};
use crate::error::{Error, Result};
use crate::features::{lhs_sample, scale_feature, FeatureSet, FeatureTable};
use crate::metrics::{mean_ranks, RankVector, TargetTable};
use crate::models::{fit_meta, ForestParams, MetaModel, MetaModelKind};
use crate::pipeline::{PipelineData, PipelineParams};
use crate::portfolio::{run_portfolio, AlgorithmId};
use crate::rng::{mix, tags};
use crate::stats;
use crate::suite::{make_instance, InstanceKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Pre,
    Mse,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Pre => "pre",
            MetricKind::Mse => "mse",
        }
    }
}

/// One (fold, model, metric) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetric {
    pub protocol: SplitKind,
    pub fold: usize,
    pub model: MetaModelKind,
    pub metric: MetricKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianEntry {
    pub protocol: SplitKind,
    pub model: MetaModelKind,
    pub metric: MetricKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// One row of the rescaling table: one (instance, factor, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub class_id: usize,
    pub instance_id: usize,
    pub factor: f64,
    pub f_scale: f64,
    pub algorithm: AlgorithmId,
    pub mean_precision: f64,
    pub mean_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub audit: String,
    pub master_seed: u64,
    pub config_digest: String,
    pub tool_version: String,
    pub fold_metrics: Vec<FoldMetric>,
    pub medians: Vec<MedianEntry>,
    pub tests: Vec<TestOutcome>,
    pub scale_table: Vec<ScaleRow>,
}

impl EvaluationReport {
    fn new(audit: &str, master_seed: u64) -> EvaluationReport {
        EvaluationReport {
            audit: audit.to_string(),
            master_seed,
            config_digest: String::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            fold_metrics: Vec::new(),
            medians: Vec::new(),
            tests: Vec::new(),
            scale_table: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, digest: &str, version: &str) -> EvaluationReport {
        self.config_digest = digest.to_string();
        self.tool_version = version.to_string();
        self
    }

    /// Per-fold values for one (protocol, model, metric), in fold order.
    pub fn fold_values(
        &self,
        protocol: SplitKind,
        model: MetaModelKind,
        metric: MetricKind,
    ) -> Vec<f64> {
        self.fold_metrics
            .iter()
            .filter(|m| m.protocol == protocol && m.model == model && m.metric == metric)
            .map(|m| m.value)
            .collect()
    }

    pub fn median_of(
        &self,
        protocol: SplitKind,
        model: MetaModelKind,
        metric: MetricKind,
    ) -> Option<f64> {
        self.medians
            .iter()
            .find(|m| m.protocol == protocol && m.model == model && m.metric == metric)
            .map(|m| m.value)
    }

    pub fn test(&self, name: &str) -> Option<&TestOutcome> {
        self.tests.iter().find(|t| t.name == name)
    }

    fn push_fold(&mut self, protocol: SplitKind, fold: usize, model: MetaModelKind, metric: MetricKind, value: f64) {
        self.fold_metrics.push(FoldMetric {
            protocol,
            fold,
            model,
            metric,
            value,
        });
    }

    fn compute_medians(&mut self) {
        let mut groups: BTreeMap<(SplitKind, usize, MetricKind), Vec<f64>> = BTreeMap::new();
        for m in &self.fold_metrics {
            groups
                .entry((m.protocol, model_order(m.model), m.metric))
                .or_default()
                .push(m.value);
        }
        self.medians = groups
            .into_iter()
            .map(|((protocol, model_idx, metric), values)| MedianEntry {
                protocol,
                model: MetaModelKind::ALL[model_idx],
                metric,
                value: stats::median(&values),
            })
            .collect();
    }
}

fn model_order(kind: MetaModelKind) -> usize {
    MetaModelKind::ALL.iter().position(|k| *k == kind).unwrap()
}

fn sort_key(m: &FoldMetric) -> (u8, usize, usize, u8) {
    let proto = match m.protocol {
        SplitKind::Lio => 0u8,
        SplitKind::Lpo => 1u8,
    };
    let metric = match m.metric {
        MetricKind::Pre => 0u8,
        MetricKind::Mse => 1u8,
    };
    (proto, m.fold, model_order(m.model), metric)
}

/// Ground-truth rank vector per instance: the ranking of the mean ranks
/// obtained from the independent truth run table.
fn truth_rank_vectors(truth_rank_targets: &TargetTable) -> BTreeMap<InstanceKey, RankVector> {
    truth_rank_targets
        .rows()
        .map(|(key, row)| (key, RankVector::from_values(row)))
        .collect()
}

fn fold_forest_params(
    base: &ForestParams,
    master_seed: u64,
    protocol: SplitKind,
    fold: usize,
    kind: MetaModelKind,
) -> (ForestParams, u64) {
    let proto_tag = match protocol {
        SplitKind::Lio => 0u64,
        SplitKind::Lpo => 1u64,
    };
    let seed = mix(&[
        master_seed,
        tags::FOREST,
        proto_tag,
        fold as u64,
        model_order(kind) as u64,
    ]);
    (
        ForestParams {
            seed,
            ..base.clone()
        },
        seed,
    )
}

/// Mean test PRE of one fitted model over a fold's test instances.
fn fold_pre(
    model: &MetaModel,
    features: Option<&FeatureTable>,
    test: &[InstanceKey],
    truth: &BTreeMap<InstanceKey, RankVector>,
) -> Result<f64> {
    let mut acc = 0.0;
    for key in test {
        let predicted = model.predict_ranks(*key, features)?;
        let truth_rv = truth
            .get(key)
            .ok_or_else(|| Error::KeyMismatch(format!("no ground truth for {key}")))?;
        acc += pre_rank_vectors(&predicted, truth_rv);
    }
    Ok(acc / test.len() as f64)
}

/// MSE of raw predictions against truth targets over test instances x
/// algorithms.
fn fold_mse(
    model: &MetaModel,
    features: Option<&FeatureTable>,
    test: &[InstanceKey],
    truth_targets: &TargetTable,
) -> Result<f64> {
    let mut predicted = Vec::with_capacity(test.len() * AlgorithmId::COUNT);
    let mut truth = Vec::with_capacity(test.len() * AlgorithmId::COUNT);
    for key in test {
        let p = model.predict_values(*key, features)?;
        let t = truth_targets
            .get(*key)
            .ok_or_else(|| Error::KeyMismatch(format!("no truth targets for {key}")))?;
        predicted.extend_from_slice(&p);
        truth.extend_from_slice(t);
    }
    mse(&predicted, &truth)
}

/// Leakage audit: rank meta-models under LIO and LPO, per-fold PRE.
pub fn leakage_audit(params: &PipelineParams, data: &PipelineData) -> Result<EvaluationReport> {
    let keys: Vec<InstanceKey> = data.suite.iter().map(|i| i.key()).collect();
    let lio = lio_splits(
        &keys,
        params.lio_test_fraction,
        params.lio_repeats,
        mix(&[params.master_seed, tags::LIO]),
    )?;
    let lpo = lpo_splits(&keys)?;
    let truth = truth_rank_vectors(&data.truth_rank_targets);
    let models = [
        MetaModelKind::Random,
        MetaModelKind::Mean,
        MetaModelKind::Ela,
        MetaModelKind::NonInf,
        MetaModelKind::Class,
    ];

    let mut report = EvaluationReport::new("leakage", params.master_seed);
    for plans in [&lio, &lpo] {
        for plan in plans {
            plan.validate()?;
            let train_targets = data.train_rank_targets.restrict(&plan.train)?;
            for kind in models {
                let features = kind.feature_set().map(|s| &data.features[&s]);
                let (fp, seed) =
                    fold_forest_params(&params.forest, params.master_seed, plan.kind, plan.fold_id, kind);
                let model = fit_meta(kind, features, &train_targets, &fp, seed)?;
                let value = fold_pre(&model, features, &plan.test, &truth)?;
                report.push_fold(plan.kind, plan.fold_id, kind, MetricKind::Pre, value);
            }
        }
    }

    // Paired one-sided tests over LPO folds: does the spurious-feature
    // model show an advantage over the mean baseline?
    for kind in [MetaModelKind::Class, MetaModelKind::NonInf] {
        let model_pre = report.fold_values(SplitKind::Lpo, kind, MetricKind::Pre);
        let mean_pre = report.fold_values(SplitKind::Lpo, MetaModelKind::Mean, MetricKind::Pre);
        let t = wilcoxon_signed_rank_with(&model_pre, &mean_pre, Alternative::Less)?;
        report.tests.push(TestOutcome {
            name: format!("lpo_pre_{}_vs_mean_wilcoxon_less", kind.name()),
            statistic: t.statistic,
            p_value: t.p_value,
        });
    }

    report.fold_metrics.sort_by_key(sort_key);
    report.compute_medians();
    Ok(report)
}

/// Scale audit: LPO comparison of the four precision/rank meta-models by
/// MSE and PRE, the paired tests, and the rescaling table.
pub fn scale_audit(params: &PipelineParams, data: &PipelineData) -> Result<EvaluationReport> {
    let keys: Vec<InstanceKey> = data.suite.iter().map(|i| i.key()).collect();
    let lpo = lpo_splits(&keys)?;
    let truth = truth_rank_vectors(&data.truth_rank_targets);
    let scale_features = &data.features[&FeatureSet::Scale];
    let models = [
        MetaModelKind::MeanPrecision,
        MetaModelKind::MeanRank,
        MetaModelKind::RfPrecision,
        MetaModelKind::RfRank,
    ];

    let mut report = EvaluationReport::new("scale", params.master_seed);
    for plan in &lpo {
        plan.validate()?;
        for kind in models {
            let features = kind.feature_set().map(|_| scale_features);
            let train_targets = match kind.target_kind() {
                crate::metrics::TargetKind::Rank => &data.train_rank_targets,
                crate::metrics::TargetKind::Precision => &data.train_precision_targets,
            }
            .restrict(&plan.train)?;
            let (fp, seed) =
                fold_forest_params(&params.forest, params.master_seed, plan.kind, plan.fold_id, kind);
            let model = fit_meta(kind, features, &train_targets, &fp, seed)?;
            let pre_value = fold_pre(&model, features, &plan.test, &truth)?;
            report.push_fold(plan.kind, plan.fold_id, kind, MetricKind::Pre, pre_value);
            if kind.target_kind() == crate::metrics::TargetKind::Precision {
                let mse_value =
                    fold_mse(&model, features, &plan.test, &data.truth_precision_targets)?;
                report.push_fold(plan.kind, plan.fold_id, kind, MetricKind::Mse, mse_value);
            }
        }
    }

    // Wilcoxon on the per-fold MSE pairs of the two precision models.
    let mse_mean = report.fold_values(SplitKind::Lpo, MetaModelKind::MeanPrecision, MetricKind::Mse);
    let mse_rf = report.fold_values(SplitKind::Lpo, MetaModelKind::RfPrecision, MetricKind::Mse);
    let w = wilcoxon_signed_rank(&mse_mean, &mse_rf)?;
    report.tests.push(TestOutcome {
        name: "lpo_mse_mean_precision_vs_rf_precision_wilcoxon".into(),
        statistic: w.statistic,
        p_value: w.p_value,
    });

    // Friedman over the folds x 4 PRE matrix.
    let matrix: Vec<Vec<f64>> = {
        let per_model: Vec<Vec<f64>> = models
            .iter()
            .map(|&k| report.fold_values(SplitKind::Lpo, k, MetricKind::Pre))
            .collect();
        (0..lpo.len())
            .map(|fold| per_model.iter().map(|v| v[fold]).collect())
            .collect()
    };
    let f = friedman(&matrix)?;
    report.tests.push(TestOutcome {
        name: "lpo_pre_four_models_friedman".into(),
        statistic: f.statistic,
        p_value: f.p_value,
    });

    report.scale_table = rescaling_table(params)?;
    report.fold_metrics.sort_by_key(sort_key);
    report.compute_medians();
    Ok(report)
}

/// Paired-seed rescaling experiment: first instances of the configured
/// classes, rescaled by each factor, with per-algorithm mean precision and
/// mean rank plus the f_scale feature measured on a shared design.
fn rescaling_table(params: &PipelineParams) -> Result<Vec<ScaleRow>> {
    let mut rows = Vec::new();
    let fig_master = mix(&[params.master_seed, tags::FIG2]);
    for &class_id in &params.scale_classes {
        let base = make_instance(class_id, 1, params.dim)?;
        for &factor in &params.scale_factors {
            let inst = base.rescale(factor)?;
            let table = run_portfolio(
                std::slice::from_ref(&inst),
                params.budget(),
                params.train_repetitions,
                fig_master,
            )?;
            let key = inst.key();
            let rank_vec = mean_ranks(&table, key)?;
            // Same sample seed across factors: identical points, scaled Y.
            let sample = lhs_sample(&inst, params.sample_size(), params.lhs_seed(key));
            let f_scale = scale_feature(&sample).get("f_scale").expect("f_scale");
            for algo in AlgorithmId::ALL {
                let runs = table.runs(key, algo);
                let mean_precision =
                    runs.iter().map(|r| r.gap()).sum::<f64>() / runs.len() as f64;
                rows.push(ScaleRow {
                    class_id,
                    instance_id: 1,
                    factor,
                    f_scale,
                    algorithm: algo,
                    mean_precision,
                    mean_rank: rank_vec.rank(algo),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::compute_all;

    fn tiny_params() -> PipelineParams {
        PipelineParams {
            dim: 2,
            instances_per_class: 3,
            budget_per_dim: 100,
            train_repetitions: 2,
            truth_repetitions: 3,
            samples_per_dim: 10,
            noninf_count: 8,
            forest: ForestParams {
                n_trees: 5,
                ..ForestParams::default()
            },
            lio_test_fraction: 1.0 / 3.0,
            lio_repeats: 3,
            scale_factors: vec![0.5, 1.0, 2.0],
            scale_classes: vec![4, 13],
            master_seed: 11,
        }
    }

    #[test]
    fn leakage_audit_shape() {
        let p = tiny_params();
        let data = compute_all(&p).unwrap();
        let report = leakage_audit(&p, &data).unwrap();
        // (3 LIO + 24 LPO) folds x 5 models, PRE only
        assert_eq!(report.fold_metrics.len(), (3 + 24) * 5);
        assert!(report
            .fold_metrics
            .iter()
            .all(|m| (0.0..=1.0).contains(&m.value)));
        assert_eq!(report.medians.len(), 2 * 5);
        assert!(report.test("lpo_pre_class_vs_mean_wilcoxon_less").is_some());
        assert!(report
            .test("lpo_pre_non-inf_vs_mean_wilcoxon_less")
            .is_some());
    }

    #[test]
    fn scale_audit_shape_and_rescaling_table() {
        let p = tiny_params();
        let data = compute_all(&p).unwrap();
        let report = scale_audit(&p, &data).unwrap();
        // 24 folds x (4 PRE + 2 MSE)
        assert_eq!(report.fold_metrics.len(), 24 * 6);
        assert_eq!(report.scale_table.len(), 2 * 3 * 5);
        assert!(report
            .test("lpo_mse_mean_precision_vs_rf_precision_wilcoxon")
            .is_some());
        assert!(report.test("lpo_pre_four_models_friedman").is_some());

        // ranks constant across factors; precision and f_scale linear
        for &class_id in &p.scale_classes {
            for algo in AlgorithmId::ALL {
                let rows: Vec<&ScaleRow> = report
                    .scale_table
                    .iter()
                    .filter(|r| r.class_id == class_id && r.algorithm == algo)
                    .collect();
                assert_eq!(rows.len(), 3);
                let base = rows.iter().find(|r| r.factor == 1.0).unwrap();
                for r in &rows {
                    assert_eq!(r.mean_rank, base.mean_rank, "rank moved under rescaling");
                    if base.mean_precision > 0.0 {
                        let expect = base.mean_precision * r.factor;
                        assert!(((r.mean_precision - expect) / expect).abs() < 1e-9);
                    }
                    let expect_scale = base.f_scale * r.factor;
                    assert!(((r.f_scale - expect_scale) / expect_scale).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn audits_are_deterministic() {
        let p = tiny_params();
        let data = compute_all(&p).unwrap();
        let a = leakage_audit(&p, &data).unwrap();
        let b = leakage_audit(&p, &data).unwrap();
        assert_eq!(a, b);
    }
}
