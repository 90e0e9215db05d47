//! Human-readable report rendering and the acceptance check.

use asbench_core::acceptance::{check_report_criteria, CriterionOutcome};
use asbench_core::eval::{EvaluationReport, MetricKind, SplitKind};
use asbench_core::models::MetaModelKind;

use crate::pipeline::CombinedReport;

const LEAKAGE_MODELS: [MetaModelKind; 5] = [
    MetaModelKind::Random,
    MetaModelKind::Mean,
    MetaModelKind::Ela,
    MetaModelKind::NonInf,
    MetaModelKind::Class,
];

const SCALE_MODELS: [MetaModelKind; 4] = [
    MetaModelKind::MeanPrecision,
    MetaModelKind::MeanRank,
    MetaModelKind::RfPrecision,
    MetaModelKind::RfRank,
];

fn print_median_table(
    report: &EvaluationReport,
    protocols: &[SplitKind],
    models: &[MetaModelKind],
    metric: MetricKind,
) {
    print!("{:16}", "model");
    for p in protocols {
        print!("{:>12}", format!("{} {}", p.name(), metric.name()));
    }
    println!();
    for model in models {
        print!("{:16}", model.name());
        for p in protocols {
            match report.median_of(*p, *model, metric) {
                Some(v) if metric == MetricKind::Mse => print!("{v:>12.3e}"),
                Some(v) => print!("{v:>12.4}"),
                None => print!("{:>12}", "-"),
            }
        }
        println!();
    }
}

fn print_tests(report: &EvaluationReport) {
    for t in &report.tests {
        println!(
            "  {}: statistic {:.4}, p = {:.6}",
            t.name, t.statistic, t.p_value
        );
    }
}

pub fn print_report(combined: &CombinedReport) {
    println!("config digest: {}", combined.config_digest);
    println!("tool version:  {}", combined.tool_version);
    if let Some(leakage) = &combined.leakage {
        println!("\n== leakage audit (median PRE per protocol) ==");
        print_median_table(
            leakage,
            &[SplitKind::Lio, SplitKind::Lpo],
            &LEAKAGE_MODELS,
            MetricKind::Pre,
        );
        print_tests(leakage);
    }
    if let Some(scale) = &combined.scale {
        println!("\n== scale audit (LPO medians) ==");
        print_median_table(scale, &[SplitKind::Lpo], &SCALE_MODELS, MetricKind::Pre);
        println!();
        print_median_table(
            scale,
            &[SplitKind::Lpo],
            &[MetaModelKind::MeanPrecision, MetaModelKind::RfPrecision],
            MetricKind::Mse,
        );
        print_tests(scale);
        if !scale.scale_table.is_empty() {
            println!("\n== rescaling table (first rows) ==");
            println!(
                "{:>6} {:>6} {:>9} {:>12} {:>7} {:>14} {:>10}",
                "class", "inst", "factor", "f_scale", "algo", "mean_prec", "mean_rank"
            );
            for row in scale.scale_table.iter().take(10) {
                println!(
                    "{:>6} {:>6} {:>9} {:>12.4e} {:>7} {:>14.6e} {:>10.3}",
                    row.class_id,
                    row.instance_id,
                    row.factor,
                    row.f_scale,
                    row.algorithm.name(),
                    row.mean_precision,
                    row.mean_rank
                );
            }
            println!("  ... {} rows total", scale.scale_table.len());
        }
    }
}

/// Prints pass/fail lines for the report-derivable acceptance criteria;
/// returns the outcomes for exit-code handling.
pub fn print_checks(combined: &CombinedReport) -> Option<Vec<CriterionOutcome>> {
    match (&combined.leakage, &combined.scale) {
        (Some(leakage), Some(scale)) => {
            println!("\n== acceptance criteria (report-derivable) ==");
            let outcomes = check_report_criteria(leakage, scale);
            for c in &outcomes {
                println!(
                    "criterion {}: {} — {} ({})",
                    c.id,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.description,
                    c.details
                );
            }
            Some(outcomes)
        }
        _ => {
            println!("\nacceptance check needs both audits in report.json");
            None
        }
    }
}
