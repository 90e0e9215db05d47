//! Report-level acceptance checks.
//!
//! The thresholds for the six report-derivable criteria live here, in one
//! place, shared by the acceptance test suite and the CLI's
//! `report --check`.

use serde::{Deserialize, Serialize};

use crate::eval::{EvaluationReport, MetricKind, ScaleRow, SplitKind};
use crate::models::MetaModelKind;
use crate::portfolio::AlgorithmId;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub description: String,
    pub passed: bool,
    pub details: String,
}

fn outcome(id: usize, description: &str, passed: bool, details: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        description: description.to_string(),
        passed,
        details,
    }
}

fn median(report: &EvaluationReport, p: SplitKind, m: MetaModelKind, k: MetricKind) -> f64 {
    report.median_of(p, m, k).unwrap_or(f64::NAN)
}

/// Criterion 1: the random baseline sits near PRE 0.5 under both protocols.
pub fn check_random_baseline(leakage: &EvaluationReport) -> CriterionOutcome {
    let lio = median(leakage, SplitKind::Lio, MetaModelKind::Random, MetricKind::Pre);
    let lpo = median(leakage, SplitKind::Lpo, MetaModelKind::Random, MetricKind::Pre);
    let ok = (0.45..=0.55).contains(&lio) && (0.45..=0.55).contains(&lpo);
    outcome(
        1,
        "random baseline: median LIO and LPO PRE in [0.45, 0.55]",
        ok,
        format!("median PRE: LIO {lio:.4}, LPO {lpo:.4}"),
    )
}

/// Criterion 2: under LIO the class feature looks best and the mean
/// baseline trails it by a wide margin.
pub fn check_lio_leakage(leakage: &EvaluationReport) -> CriterionOutcome {
    let m = |k| median(leakage, SplitKind::Lio, k, MetricKind::Pre);
    let (random, mean, ela, noninf, class) = (
        m(MetaModelKind::Random),
        m(MetaModelKind::Mean),
        m(MetaModelKind::Ela),
        m(MetaModelKind::NonInf),
        m(MetaModelKind::Class),
    );
    let ordering = class < ela && class < noninf && ela < mean && noninf < mean && mean < random;
    let ok = ordering && class <= 0.15 && (mean - class) >= 0.10;
    outcome(
        2,
        "LIO leakage: class < {ela, non-inf} < mean < random; class <= 0.15; mean - class >= 0.10",
        ok,
        format!(
            "median LIO PRE: class {class:.4}, ela {ela:.4}, non-inf {noninf:.4}, mean {mean:.4}, random {random:.4}"
        ),
    )
}

/// Criterion 3: under LPO the class and non-informative models collapse to
/// the mean baseline (close medians, no significant one-sided advantage).
pub fn check_lpo_collapse(leakage: &EvaluationReport) -> CriterionOutcome {
    let m = |k| median(leakage, SplitKind::Lpo, k, MetricKind::Pre);
    let mean = m(MetaModelKind::Mean);
    let class = m(MetaModelKind::Class);
    let noninf = m(MetaModelKind::NonInf);
    let close = (class - mean).abs() <= 0.07 && (noninf - mean).abs() <= 0.07;
    let p_class = leakage
        .test("lpo_pre_class_vs_mean_wilcoxon_less")
        .map(|t| t.p_value)
        .unwrap_or(f64::NAN);
    let p_noninf = leakage
        .test("lpo_pre_non-inf_vs_mean_wilcoxon_less")
        .map(|t| t.p_value)
        .unwrap_or(f64::NAN);
    let no_advantage = p_class >= 0.05 && p_noninf >= 0.05;
    outcome(
        3,
        "LPO collapse: |median(m) - median(mean)| <= 0.07 and no significant advantage (p >= 0.05)",
        close && no_advantage,
        format!(
            "median LPO PRE: mean {mean:.4}, class {class:.4}, non-inf {noninf:.4}; one-sided p: class {p_class:.4}, non-inf {p_noninf:.4}"
        ),
    )
}

/// Criterion 4: judged by MSE on raw precision predictions, the
/// single-feature scale model crushes the mean baseline.
pub fn check_scale_mse_illusion(scale: &EvaluationReport) -> CriterionOutcome {
    let mean = scale.fold_values(SplitKind::Lpo, MetaModelKind::MeanPrecision, MetricKind::Mse);
    let rf = scale.fold_values(SplitKind::Lpo, MetaModelKind::RfPrecision, MetricKind::Mse);
    let folds = mean.len();
    let wins = mean.iter().zip(&rf).filter(|(m, r)| r < m).count();
    let ratios: Vec<f64> = mean
        .iter()
        .zip(&rf)
        .map(|(m, r)| if *r > 0.0 { m / r } else { f64::INFINITY })
        .collect();
    let median_ratio = stats::median(&ratios);
    let p = scale
        .test("lpo_mse_mean_precision_vs_rf_precision_wilcoxon")
        .map(|t| t.p_value)
        .unwrap_or(f64::NAN);
    let ok = folds == 24 && wins >= 20 && median_ratio >= 10.0 && p < 0.05;
    outcome(
        4,
        "scale-MSE illusion: rf-precision wins >= 20/24 LPO folds, median MSE ratio >= 10, Wilcoxon p < 0.05",
        ok,
        format!("wins {wins}/{folds}, median ratio {median_ratio:.2}, p {p:.4}"),
    )
}

/// Criterion 5: by PRE the four models are statistically indistinguishable.
pub fn check_pre_equalization(scale: &EvaluationReport) -> CriterionOutcome {
    let t = scale.test("lpo_pre_four_models_friedman");
    let p = t.map(|t| t.p_value).unwrap_or(f64::NAN);
    let chi2 = t.map(|t| t.statistic).unwrap_or(f64::NAN);
    outcome(
        5,
        "PRE equalization: Friedman over the 24x4 PRE matrix has p >= 0.05",
        p >= 0.05,
        format!("chi2 {chi2:.3}, p {p:.4}"),
    )
}

/// Criterion 6: rescaling leaves ranks exactly unchanged while precision
/// and f_scale scale linearly with the factor (1e-6 relative).
pub fn check_rescaling_dichotomy(scale: &EvaluationReport) -> CriterionOutcome {
    let rows = &scale.scale_table;
    if rows.is_empty() {
        return outcome(6, "rescaling dichotomy", false, "empty scale table".into());
    }
    let mut failures = Vec::new();
    let classes: std::collections::BTreeSet<usize> = rows.iter().map(|r| r.class_id).collect();
    for class_id in classes {
        for algo in AlgorithmId::ALL {
            let group: Vec<&ScaleRow> = rows
                .iter()
                .filter(|r| r.class_id == class_id && r.algorithm == algo)
                .collect();
            let base = match group.iter().find(|r| r.factor == 1.0) {
                Some(b) => *b,
                None => {
                    failures.push(format!("class {class_id}/{algo}: no factor-1 row"));
                    continue;
                }
            };
            for r in &group {
                if r.mean_rank != base.mean_rank {
                    failures.push(format!(
                        "class {class_id}/{algo}@{}: rank {} != {}",
                        r.factor, r.mean_rank, base.mean_rank
                    ));
                }
                let expect_p = base.mean_precision * r.factor;
                let p_ok = if expect_p > 0.0 {
                    ((r.mean_precision - expect_p) / expect_p).abs() <= 1e-6
                } else {
                    r.mean_precision == 0.0
                };
                if !p_ok {
                    failures.push(format!(
                        "class {class_id}/{algo}@{}: precision {} vs {}",
                        r.factor, r.mean_precision, expect_p
                    ));
                }
                let expect_s = base.f_scale * r.factor;
                if expect_s <= 0.0 || ((r.f_scale - expect_s) / expect_s).abs() > 1e-6 {
                    failures.push(format!(
                        "class {class_id}/{algo}@{}: f_scale {} vs {}",
                        r.factor, r.f_scale, expect_s
                    ));
                }
            }
        }
    }
    let ok = failures.is_empty();
    outcome(
        6,
        "rescaling dichotomy: ranks exactly constant, precision and f_scale linear in the factor (1e-6)",
        ok,
        if ok {
            format!("{} rows checked", rows.len())
        } else {
            failures.join("; ")
        },
    )
}

/// All six report-derivable criteria. (The remaining acceptance criteria
/// are property suites that live in the test corpus.)
pub fn check_report_criteria(
    leakage: &EvaluationReport,
    scale: &EvaluationReport,
) -> Vec<CriterionOutcome> {
    vec![
        check_random_baseline(leakage),
        check_lio_leakage(leakage),
        check_lpo_collapse(leakage),
        check_scale_mse_illusion(scale),
        check_pre_equalization(scale),
        check_rescaling_dichotomy(scale),
    ]
}
