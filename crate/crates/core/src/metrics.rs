//! Performance metrics: per-instance algorithm ranks and target precision.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::portfolio::{AlgorithmId, RunRecord, RunTable};
use crate::suite::{InstanceKey, ProblemInstance};

/// What a target table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Rank,
    Precision,
}

impl TargetKind {
    pub fn name(&self) -> &'static str {
        match self {
            TargetKind::Rank => "rank",
            TargetKind::Precision => "precision",
        }
    }

    pub fn from_name(s: &str) -> Option<TargetKind> {
        match s {
            "rank" => Some(TargetKind::Rank),
            "precision" => Some(TargetKind::Precision),
            _ => None,
        }
    }
}

/// Averaged-ties ranks of real values: ascending, lower value = rank 1,
/// ties receive the mean of the positions they occupy.
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    assert!(!values.is_empty(), "rank_with_ties of empty slice");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the averaged 1-based rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Per-algorithm ranks in [1, 5]; the sum is always 15.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    ranks: [f64; AlgorithmId::COUNT],
}

impl RankVector {
    /// Ranks the five values (lower = better = rank 1, averaged ties).
    pub fn from_values(values: &[f64; AlgorithmId::COUNT]) -> RankVector {
        let r = rank_with_ties(values);
        RankVector {
            ranks: [r[0], r[1], r[2], r[3], r[4]],
        }
    }

    /// Wraps an already-averaged rank vector (e.g. a mean over repetitions).
    pub fn from_mean_ranks(ranks: [f64; AlgorithmId::COUNT]) -> RankVector {
        debug_assert!((ranks.iter().sum::<f64>() - 15.0).abs() < 1e-6);
        RankVector { ranks }
    }

    pub fn rank(&self, a: AlgorithmId) -> f64 {
        self.ranks[a.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    pub fn sum(&self) -> f64 {
        self.ranks.iter().sum()
    }
}

/// Mean over repetitions of the per-repetition averaged-ties ranks.
///
/// Repetitions are paired by index; within each repetition the five
/// algorithms are ranked on their scale-free gap (the ordering the
/// optimizers themselves observed), which makes the result exactly
/// invariant under rescaling with paired seeds.
pub fn mean_ranks(table: &RunTable, key: InstanceKey) -> Result<RankVector> {
    let per_algo: Vec<&[RunRecord]> = AlgorithmId::ALL
        .iter()
        .map(|&a| table.runs(key, a))
        .collect();
    let reps = per_algo[0].len();
    if reps == 0 {
        return Err(Error::IncompleteTable(format!("no records for {key}")));
    }
    for (a, runs) in AlgorithmId::ALL.iter().zip(&per_algo) {
        if runs.len() != reps {
            return Err(Error::IncompleteTable(format!(
                "{key}/{a}: {} repetitions, expected {reps}",
                runs.len()
            )));
        }
    }
    let mut acc = [0.0; AlgorithmId::COUNT];
    for r in 0..reps {
        let values = [
            per_algo[0][r].raw_gap,
            per_algo[1][r].raw_gap,
            per_algo[2][r].raw_gap,
            per_algo[3][r].raw_gap,
            per_algo[4][r].raw_gap,
        ];
        let ranks = rank_with_ties(&values);
        for (a, r) in acc.iter_mut().zip(ranks) {
            *a += r;
        }
    }
    for a in acc.iter_mut() {
        *a /= reps as f64;
    }
    Ok(RankVector::from_mean_ranks(acc))
}

/// Target precision of one run: `best_f - f_opt`, computed in exact form
/// from the stored scale-free gap.
pub fn target_precision(record: &RunRecord, instance: &ProblemInstance) -> Result<f64> {
    if record.class_id != instance.class_id()
        || record.instance_id != instance.instance_id()
        || record.scale_factor != instance.scale_factor()
    {
        return Err(Error::RecordMismatch(format!(
            "record ({}, {}, scale {}) vs instance ({}, {}, scale {})",
            record.class_id,
            record.instance_id,
            record.scale_factor,
            instance.class_id(),
            instance.instance_id(),
            instance.scale_factor()
        )));
    }
    let gap = record.gap();
    if gap < 0.0 {
        return Err(Error::Integrity(format!(
            "negative precision {gap} for {}",
            record.key()
        )));
    }
    Ok(gap)
}

/// Per-instance, per-algorithm meta-model targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetTable {
    pub kind: TargetKind,
    rows: BTreeMap<InstanceKey, [f64; AlgorithmId::COUNT]>,
}

impl TargetTable {
    pub fn new(kind: TargetKind) -> TargetTable {
        TargetTable {
            kind,
            rows: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: InstanceKey, values: [f64; AlgorithmId::COUNT]) {
        self.rows.insert(key, values);
    }

    pub fn get(&self, key: InstanceKey) -> Option<&[f64; AlgorithmId::COUNT]> {
        self.rows.get(&key)
    }

    pub fn keys(&self) -> impl Iterator<Item = InstanceKey> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (InstanceKey, &[f64; AlgorithmId::COUNT])> {
        self.rows.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sub-table over the given keys; every key must be present.
    pub fn restrict(&self, keys: &[InstanceKey]) -> Result<TargetTable> {
        let mut out = TargetTable::new(self.kind);
        for key in keys {
            let row = self
                .rows
                .get(key)
                .ok_or_else(|| Error::KeyMismatch(format!("missing target row for {key}")))?;
            out.insert(*key, *row);
        }
        Ok(out)
    }
}

/// Builds meta-model targets from a complete run table.
///
/// `kind = Rank`: the per-instance mean rank vector. `kind = Precision`:
/// the per-instance, per-algorithm mean target precision.
pub fn build_targets(table: &RunTable, kind: TargetKind) -> Result<TargetTable> {
    let keys = table.instance_keys();
    let mut out = TargetTable::new(kind);
    for key in keys {
        match kind {
            TargetKind::Rank => {
                let rv = mean_ranks(table, key)?;
                let s = rv.as_slice();
                out.insert(key, [s[0], s[1], s[2], s[3], s[4]]);
            }
            TargetKind::Precision => {
                let mut row = [0.0; AlgorithmId::COUNT];
                let reps = table.runs(key, AlgorithmId::ALL[0]).len();
                for (slot, algo) in row.iter_mut().zip(AlgorithmId::ALL) {
                    let runs = table.runs(key, algo);
                    if runs.is_empty() || runs.len() != reps {
                        return Err(Error::IncompleteTable(format!(
                            "{key}/{algo}: {} repetitions, expected {reps}",
                            runs.len()
                        )));
                    }
                    let mean = runs.iter().map(|r| r.gap()).sum::<f64>() / runs.len() as f64;
                    if mean < 0.0 {
                        return Err(Error::Integrity(format!(
                            "negative mean precision for {key}/{algo}"
                        )));
                    }
                    *slot = mean;
                }
                out.insert(key, row);
            }
        }
    }
    Ok(out)
}
