//! Evaluation protocols: split generators, ranking/regression error
//! metrics, statistical tests, and the two headline audits.

mod audit;
mod splits;

pub use audit::{
    leakage_audit, scale_audit, EvaluationReport, FoldMetric, MedianEntry, MetricKind, ScaleRow,
    TestOutcome,
};
pub use splits::{lio_splits, lpo_splits, SplitKind, SplitPlan};
pub use stats_tests::{
    friedman, wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative, TestResult,
};

use crate::error::{Error, Result};
use crate::metrics::RankVector;

#[inline]
fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Pairwise ranking error: the fraction of ordered algorithm pairs whose
/// relative order differs between the predicted and ground-truth rankings.
/// Equal ranks compare as 0, so a tie against a strict order counts as a
/// mismatch. 0 is a perfect match; a fully reversed ranking gives 1.
pub fn pre(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let k = predicted.len();
    if k < 2 {
        return Err(Error::InvalidArgument("pre needs k >= 2".into()));
    }
    let mut mismatches = 0usize;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let sp = sign(predicted[i] - predicted[j]);
            let sg = sign(truth[i] - truth[j]);
            if sp != sg {
                mismatches += 1;
            }
        }
    }
    Ok(mismatches as f64 / (k * (k - 1)) as f64)
}

/// PRE between two five-algorithm rank vectors.
pub fn pre_rank_vectors(predicted: &RankVector, truth: &RankVector) -> f64 {
    pre(predicted.as_slice(), truth.as_slice()).expect("rank vectors share the key set")
}

/// Mean squared error between two equal-length vectors.
pub fn mse(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("mse of empty vectors".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / predicted.len() as f64)
}
