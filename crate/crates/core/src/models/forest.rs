//! Random-forest regression built on variance-reduction CART trees.
//!
//! Splits maximize the weighted reduction of the sum of squared errors over
//! candidate thresholds at midpoints of consecutive distinct feature values;
//! exact ties keep the lowest (feature index, threshold). Per-tree seeds are
//! derived from (forest seed, tree index), so training is bit-deterministic
//! regardless of how trees are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::rng::{mix, tags};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Fraction of features considered per node, in (0, 1].
    pub max_features: f64,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: 1.0,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidArgument("n_trees must be >= 1".into()));
        }
        if !(self.max_features > 0.0 && self.max_features <= 1.0) {
            return Err(Error::InvalidArgument(
                "max_features must be in (0, 1]".into(),
            ));
        }
        if self.min_samples_split < 2 || self.min_samples_leaf < 1 {
            return Err(Error::InvalidArgument(
                "min_samples_split >= 2 and min_samples_leaf >= 1 required".into(),
            ));
        }
        Ok(())
    }
}

/// Flattened tree node; `feature == -1` marks a leaf carrying the mean of
/// its training targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Node {
    feature: i32,
    threshold: f64,
    left: u32,
    right: u32,
    value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            let node = &self.nodes[at];
            if node.feature < 0 {
                return node.value;
            }
            at = if row[node.feature as usize] <= node.threshold {
                node.left as usize
            } else {
                node.right as usize
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionForest {
    pub params: ForestParams,
    pub feature_names: Vec<String>,
    trees: Vec<Tree>,
}

impl RegressionForest {
    /// Mean of the per-tree leaf values, summed in tree order. If every
    /// tree agrees the shared value is returned exactly.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.feature_names.len());
        let first = self.trees[0].predict(row);
        let mut sum = first;
        let mut all_equal = true;
        for t in &self.trees[1..] {
            let v = t.predict(row);
            all_equal &= v == first;
            sum += v;
        }
        if all_equal {
            first
        } else {
            sum / self.trees.len() as f64
        }
    }

    /// Prediction from a named feature vector; the key set must contain the
    /// training names.
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        let mut row = Vec::with_capacity(self.feature_names.len());
        for name in &self.feature_names {
            let v = x
                .get(name)
                .ok_or_else(|| Error::KeyMismatch(format!("missing feature {name}")))?;
            row.push(v);
        }
        Ok(self.predict_row(&row))
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    n_features: usize,
    k_features: usize,
    params: &'a ForestParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl<'a> TreeBuilder<'a> {
    /// Candidate features for one node: all of them when max_features is 1,
    /// otherwise a seeded draw of k distinct indices, scanned in ascending
    /// order so tie-breaking stays by lowest feature index.
    fn candidate_features(&mut self) -> Vec<usize> {
        if self.k_features >= self.n_features {
            return (0..self.n_features).collect();
        }
        let mut pool: Vec<usize> = (0..self.n_features).collect();
        for i in 0..self.k_features {
            let j = i + self.rng.random_range(0..pool.len() - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..self.k_features].to_vec();
        chosen.sort_unstable();
        chosen
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            feature: -1,
            threshold: 0.0,
            left: 0,
            right: 0,
            value: 0.0,
        });

        let n = idx.len();
        let sum: f64 = idx.iter().map(|&i| self.y[i]).sum();
        let sumsq: f64 = idx.iter().map(|&i| self.y[i] * self.y[i]).sum();
        // Exact mean for constant targets, so constant-target leaves
        // predict that value bit-exactly.
        let first = self.y[idx[0]];
        let mean = if idx.iter().all(|&i| self.y[i] == first) {
            first
        } else {
            sum / n as f64
        };
        let sse = (sumsq - sum * sum / n as f64).max(0.0);

        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, gain)
        if n >= self.params.min_samples_split && sse > 0.0 && depth_ok {
            for f in self.candidate_features() {
                let mut ord: Vec<usize> = idx.to_vec();
                ord.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
                let mut lsum = 0.0;
                let mut lsq = 0.0;
                for i in 1..n {
                    let prev = ord[i - 1];
                    lsum += self.y[prev];
                    lsq += self.y[prev] * self.y[prev];
                    let (va, vb) = (self.x[prev][f], self.x[ord[i]][f]);
                    if va == vb {
                        continue;
                    }
                    if i < self.params.min_samples_leaf || n - i < self.params.min_samples_leaf {
                        continue;
                    }
                    let rsum = sum - lsum;
                    let rsq = sumsq - lsq;
                    let sse_l = (lsq - lsum * lsum / i as f64).max(0.0);
                    let sse_r = (rsq - rsum * rsum / (n - i) as f64).max(0.0);
                    let gain = sse - sse_l - sse_r;
                    if best.map_or(gain > 0.0, |(_, _, g)| gain > g) {
                        // Keep the threshold strictly below the upper value
                        // so `<=` partitions exactly at this scan position.
                        let mut thr = 0.5 * (va + vb);
                        if !(thr < vb) {
                            thr = va;
                        }
                        best = Some((f, thr, gain));
                    }
                }
            }
        }

        match best {
            None => {
                self.nodes[id as usize].value = mean;
                id
            }
            Some((feature, threshold, _)) => {
                let split_at = itertools_partition(idx, |i| self.x[i][feature] <= threshold);
                let (left_idx, right_idx) = idx.split_at_mut(split_at);
                debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
                let mut left_sorted = left_idx.to_vec();
                let mut right_sorted = right_idx.to_vec();
                let left = self.build(&mut left_sorted, depth + 1);
                let right = self.build(&mut right_sorted, depth + 1);
                let node = &mut self.nodes[id as usize];
                node.feature = feature as i32;
                node.threshold = threshold;
                node.left = left;
                node.right = right;
                id
            }
        }
    }
}

/// Stable partition: moves items satisfying the predicate to the front,
/// preserving relative order; returns the boundary.
fn itertools_partition(idx: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let mut front: Vec<usize> = Vec::with_capacity(idx.len());
    let mut back: Vec<usize> = Vec::new();
    for &i in idx.iter() {
        if pred(i) {
            front.push(i);
        } else {
            back.push(i);
        }
    }
    let split = front.len();
    idx[..split].copy_from_slice(&front);
    idx[split..].copy_from_slice(&back);
    split
}

fn fit_tree(
    x: &[Vec<f64>],
    y: &[f64],
    params: &ForestParams,
    n_features: usize,
    tree_index: usize,
) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(&[params.seed, tags::TREE, tree_index as u64]));
    let n = y.len();
    let mut idx: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let k_features = ((params.max_features * n_features as f64).ceil() as usize)
        .clamp(1, n_features);
    let mut builder = TreeBuilder {
        x,
        y,
        n_features,
        k_features,
        params,
        rng,
        nodes: Vec::new(),
    };
    builder.build(&mut idx, 0);
    Tree {
        nodes: builder.nodes,
    }
}

/// Trains a forest on a row-major design matrix.
pub fn fit_forest(
    x: &[Vec<f64>],
    y: &[f64],
    feature_names: &[String],
    params: &ForestParams,
) -> Result<RegressionForest> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(
            "forest training needs at least 2 rows".into(),
        ));
    }
    let n_features = feature_names.len();
    for row in x {
        if row.len() != n_features {
            return Err(Error::LengthMismatch {
                left: row.len(),
                right: n_features,
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("forest design matrix".into()));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forest targets".into()));
    }
    let trees: Vec<Tree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| fit_tree(x, y, params, n_features, t))
        .collect();
    Ok(RegressionForest {
        params: params.clone(),
        feature_names: feature_names.to_vec(),
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn constant_targets_give_single_leaf_constant_predictions() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y = vec![4.2; 10];
        let f = fit_forest(&x, &y, &names(1), &ForestParams::default()).unwrap();
        assert_eq!(f.predict_row(&[123.0]), 4.2);
        assert_eq!(f.predict_row(&[-55.0]), 4.2);
    }

    #[test]
    fn single_tree_without_bootstrap_interpolates_distinct_rows() {
        let params = ForestParams {
            n_trees: 1,
            bootstrap: false,
            ..ForestParams::default()
        };
        let mut rng = crate::rng::rng_from(&[11]);
        let x: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * 3.0 - r[1]).collect();
        let f = fit_forest(&x, &y, &names(2), &params).unwrap();
        let mse = x
            .iter()
            .zip(&y)
            .map(|(r, t)| (f.predict_row(r) - t).powi(2))
            .sum::<f64>()
            / y.len() as f64;
        assert!(mse < 1e-20, "training mse {mse}");
    }

    #[test]
    fn step_function_generalizes() {
        let mut rng = crate::rng::rng_from(&[17]);
        let make = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| {
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![-1.0 + 2.0 * rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let y: Vec<f64> = x.iter().map(|r| if r[0] > 0.0 { 1.0 } else { 0.0 }).collect();
            (x, y)
        };
        let (xt, yt) = make(&mut rng, 200);
        let (xh, yh) = make(&mut rng, 200);
        let params = ForestParams {
            seed: 5,
            ..ForestParams::default()
        };
        let f = fit_forest(&xt, &yt, &names(2), &params).unwrap();
        let mse = xh
            .iter()
            .zip(&yh)
            .map(|(r, t)| (f.predict_row(r) - t).powi(2))
            .sum::<f64>()
            / yh.len() as f64;
        assert!(mse < 0.05, "held-out mse {mse}");
    }

    #[test]
    fn predictions_stay_within_training_range() {
        let mut rng = crate::rng::rng_from(&[23]);
        let x: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.random::<f64>(); 3]).collect();
        let y: Vec<f64> = (0..100).map(|_| -3.0 + 6.0 * rng.random::<f64>()).collect();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let f = fit_forest(&x, &y, &names(3), &ForestParams::default()).unwrap();
        for _ in 0..200 {
            let probe = vec![
                -10.0 + 20.0 * rng.random::<f64>(),
                -10.0 + 20.0 * rng.random::<f64>(),
                -10.0 + 20.0 * rng.random::<f64>(),
            ];
            let p = f.predict_row(&probe);
            assert!(p >= lo && p <= hi, "{p} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn training_is_parallelism_independent_and_serializable() {
        let mut rng = crate::rng::rng_from(&[31]);
        let x: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let y: Vec<f64> = x.iter().map(|r| (10.0 * r[0]).sin() + r[1]).collect();
        let params = ForestParams {
            n_trees: 16,
            seed: 3,
            ..ForestParams::default()
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| fit_forest(&x, &y, &names(2), &params).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| fit_forest(&x, &y, &names(2), &params).unwrap());
        let ja = serde_json::to_string(&one).unwrap();
        let jb = serde_json::to_string(&four).unwrap();
        assert_eq!(ja, jb);
        let back: RegressionForest = serde_json::from_str(&ja).unwrap();
        assert_eq!(back.predict_row(&[0.3, 0.7]), one.predict_row(&[0.3, 0.7]));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let x = vec![vec![1.0], vec![f64::NAN]];
        let y = vec![1.0, 2.0];
        assert!(matches!(
            fit_forest(&x, &y, &names(1), &ForestParams::default()),
            Err(Error::NonFinite(_))
        ));
        let x2 = vec![vec![1.0], vec![2.0]];
        let y2 = vec![1.0, f64::INFINITY];
        assert!(fit_forest(&x2, &y2, &names(1), &ForestParams::default()).is_err());
    }

    #[test]
    fn missing_feature_key_is_an_error() {
        let x = vec![vec![1.0], vec![2.0]];
        let y = vec![1.0, 2.0];
        let f = fit_forest(&x, &y, &names(1), &ForestParams::default()).unwrap();
        let mut fv = crate::features::FeatureVector::new(crate::features::FeatureSet::Scale);
        fv.insert("wrong", 1.0);
        assert!(f.predict(&fv).is_err());
    }
}
