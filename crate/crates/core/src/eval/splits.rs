//! Train/test split generators: leave-instance-out and leave-problem-out.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::{rng_from, tags};
use crate::suite::{InstanceKey, CLASS_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SplitKind {
    Lio,
    Lpo,
}

impl SplitKind {
    pub fn name(&self) -> &'static str {
        match self {
            SplitKind::Lio => "LIO",
            SplitKind::Lpo => "LPO",
        }
    }
}

impl std::fmt::Display for SplitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One train/test fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub kind: SplitKind,
    pub fold_id: usize,
    pub train: Vec<InstanceKey>,
    pub test: Vec<InstanceKey>,
}

impl SplitPlan {
    /// Train and test must be disjoint.
    pub fn validate(&self) -> Result<()> {
        let mut seen: std::collections::BTreeSet<InstanceKey> =
            self.train.iter().copied().collect();
        for k in &self.test {
            if !seen.insert(*k) {
                return Err(Error::Integrity(format!(
                    "{} fold {}: {k} in both train and test",
                    self.kind, self.fold_id
                )));
            }
        }
        Ok(())
    }
}

fn group_by_class(keys: &[InstanceKey]) -> BTreeMap<usize, Vec<InstanceKey>> {
    let mut groups: BTreeMap<usize, Vec<InstanceKey>> = BTreeMap::new();
    for k in keys {
        groups.entry(k.class_id).or_default().push(*k);
    }
    for g in groups.values_mut() {
        g.sort();
    }
    groups
}

/// Leave-instance-out: per repeat and per class, a seeded shuffle sends the
/// last `ceil(len * test_fraction)` instances to the test side, so every
/// class appears on both sides of every fold.
pub fn lio_splits(
    keys: &[InstanceKey],
    test_fraction: f64,
    n_repeats: usize,
    seed: u64,
) -> Result<Vec<SplitPlan>> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::DegenerateFraction(test_fraction));
    }
    if n_repeats < 1 {
        return Err(Error::InvalidArgument("n_repeats must be >= 1".into()));
    }
    let groups = group_by_class(keys);
    let mut plans = Vec::with_capacity(n_repeats);
    for repeat in 0..n_repeats {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (&class, members) in &groups {
            let n_test = (members.len() as f64 * test_fraction).ceil() as usize;
            if n_test < 1 || n_test >= members.len() {
                return Err(Error::InvalidArgument(format!(
                    "class {class}: fraction {test_fraction} leaves no instances on one side"
                )));
            }
            let mut shuffled = members.clone();
            let mut rng = rng_from(&[seed, tags::LIO, repeat as u64, class as u64]);
            shuffled.shuffle(&mut rng);
            let cut = shuffled.len() - n_test;
            train.extend_from_slice(&shuffled[..cut]);
            test.extend_from_slice(&shuffled[cut..]);
        }
        train.sort();
        test.sort();
        plans.push(SplitPlan {
            kind: SplitKind::Lio,
            fold_id: repeat,
            train,
            test,
        });
    }
    Ok(plans)
}

/// Leave-problem-out: 24 folds, fold c tests every instance of class c and
/// trains on the other 23 classes.
pub fn lpo_splits(keys: &[InstanceKey]) -> Result<Vec<SplitPlan>> {
    let groups = group_by_class(keys);
    if groups.len() != CLASS_COUNT {
        return Err(Error::InvalidArgument(format!(
            "leave-problem-out needs all {CLASS_COUNT} classes, found {}",
            groups.len()
        )));
    }
    let mut plans = Vec::with_capacity(CLASS_COUNT);
    for (fold_id, (&class, members)) in groups.iter().enumerate() {
        let mut train: Vec<InstanceKey> = keys
            .iter()
            .copied()
            .filter(|k| k.class_id != class)
            .collect();
        train.sort();
        plans.push(SplitPlan {
            kind: SplitKind::Lpo,
            fold_id,
            train,
            test: members.clone(),
        });
    }
    Ok(plans)
}
