//! The nine named meta-models: baselines plus random-forest regressors
//! mapping instance features to per-algorithm performance.

use serde::{Deserialize, Serialize};

use super::forest::{fit_forest, ForestParams, RegressionForest};
use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureTable};
use crate::metrics::{RankVector, TargetKind, TargetTable};
use crate::portfolio::AlgorithmId;
use crate::rng::{mix, rng_from, tags};
use crate::suite::InstanceKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetaModelKind {
    Random,
    Mean,
    Ela,
    NonInf,
    Class,
    MeanPrecision,
    MeanRank,
    RfPrecision,
    RfRank,
}

impl MetaModelKind {
    pub const ALL: [MetaModelKind; 9] = [
        MetaModelKind::Random,
        MetaModelKind::Mean,
        MetaModelKind::Ela,
        MetaModelKind::NonInf,
        MetaModelKind::Class,
        MetaModelKind::MeanPrecision,
        MetaModelKind::MeanRank,
        MetaModelKind::RfPrecision,
        MetaModelKind::RfRank,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetaModelKind::Random => "random",
            MetaModelKind::Mean => "mean",
            MetaModelKind::Ela => "ela",
            MetaModelKind::NonInf => "non-inf",
            MetaModelKind::Class => "class",
            MetaModelKind::MeanPrecision => "mean-precision",
            MetaModelKind::MeanRank => "mean-rank",
            MetaModelKind::RfPrecision => "rf-precision",
            MetaModelKind::RfRank => "rf-rank",
        }
    }

    pub fn from_name(s: &str) -> Option<MetaModelKind> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Which target table the model trains on and predicts.
    pub fn target_kind(&self) -> TargetKind {
        match self {
            MetaModelKind::MeanPrecision | MetaModelKind::RfPrecision => TargetKind::Precision,
            _ => TargetKind::Rank,
        }
    }

    /// The feature set consumed, if any. `rf-precision` and `rf-rank` share
    /// the scale feature; the baselines ignore features entirely.
    pub fn feature_set(&self) -> Option<FeatureSet> {
        match self {
            MetaModelKind::Ela => Some(FeatureSet::Ela),
            MetaModelKind::NonInf => Some(FeatureSet::NonInf),
            MetaModelKind::Class => Some(FeatureSet::Class),
            MetaModelKind::RfPrecision | MetaModelKind::RfRank => Some(FeatureSet::Scale),
            _ => None,
        }
    }
}

impl std::fmt::Display for MetaModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
enum Predictor {
    /// Seeded uniform permutation of the algorithms per instance.
    Random { seed: u64 },
    /// Per-algorithm constant (mean of the training targets).
    Constant { means: [f64; AlgorithmId::COUNT] },
    /// One independent single-output forest per algorithm.
    Forests(Box<[RegressionForest; AlgorithmId::COUNT]>),
}

/// A fitted meta-model: predicts a value per algorithm for any instance.
#[derive(Debug, Clone)]
pub struct MetaModel {
    pub kind: MetaModelKind,
    predictor: Predictor,
}

/// Fits a meta-model of the given kind.
///
/// `features` must cover every target key (a superset is fine); it is
/// ignored by the random and mean kinds. `seed` drives the random model's
/// permutations; forests derive per-algorithm seeds from `params.seed`.
pub fn fit_meta(
    kind: MetaModelKind,
    features: Option<&FeatureTable>,
    targets: &TargetTable,
    params: &ForestParams,
    seed: u64,
) -> Result<MetaModel> {
    if targets.kind != kind.target_kind() {
        return Err(Error::InvalidArgument(format!(
            "{kind} expects {} targets, got {}",
            kind.target_kind().name(),
            targets.kind.name()
        )));
    }
    if targets.is_empty() {
        return Err(Error::InsufficientData("empty target table".into()));
    }
    let predictor = match kind {
        MetaModelKind::Random => Predictor::Random { seed },
        MetaModelKind::Mean | MetaModelKind::MeanRank | MetaModelKind::MeanPrecision => {
            let mut means = [0.0; AlgorithmId::COUNT];
            for (_, row) in targets.rows() {
                for (m, v) in means.iter_mut().zip(row) {
                    *m += v;
                }
            }
            for m in means.iter_mut() {
                *m /= targets.len() as f64;
            }
            Predictor::Constant { means }
        }
        MetaModelKind::Ela
        | MetaModelKind::NonInf
        | MetaModelKind::Class
        | MetaModelKind::RfPrecision
        | MetaModelKind::RfRank => {
            let set = kind.feature_set().unwrap();
            let table = features.ok_or_else(|| {
                Error::KeyMismatch(format!("{kind} requires the {} feature table", set.name()))
            })?;
            if table.tag != set {
                return Err(Error::KeyMismatch(format!(
                    "{kind} expects {} features, got {}",
                    set.name(),
                    table.tag.name()
                )));
            }
            let mut x: Vec<Vec<f64>> = Vec::with_capacity(targets.len());
            let mut ys: Vec<[f64; AlgorithmId::COUNT]> = Vec::with_capacity(targets.len());
            for (key, row) in targets.rows() {
                let feats = table
                    .row(key)
                    .ok_or_else(|| Error::KeyMismatch(format!("missing features for {key}")))?;
                x.push(feats.to_vec());
                ys.push(*row);
            }
            let forests: Vec<RegressionForest> = AlgorithmId::ALL
                .iter()
                .map(|algo| {
                    let y: Vec<f64> = ys.iter().map(|r| r[algo.index()]).collect();
                    let p = ForestParams {
                        seed: mix(&[params.seed, tags::FOREST, algo.index() as u64]),
                        ..params.clone()
                    };
                    fit_forest(&x, &y, &table.names, &p)
                })
                .collect::<Result<_>>()?;
            Predictor::Forests(Box::new(forests.try_into().expect("five forests")))
        }
    };
    Ok(MetaModel { kind, predictor })
}

impl MetaModel {
    /// Predicted value (rank or precision, per the kind) for each algorithm.
    pub fn predict_values(
        &self,
        key: InstanceKey,
        features: Option<&FeatureTable>,
    ) -> Result<[f64; AlgorithmId::COUNT]> {
        match &self.predictor {
            Predictor::Random { seed } => {
                let mut rng = rng_from(&[
                    *seed,
                    tags::RANDOM_MODEL,
                    key.class_id as u64,
                    key.instance_id as u64,
                ]);
                let mut vals = [0.0, 1.0, 2.0, 3.0, 4.0];
                // Fisher-Yates on the value slots = uniform permutation.
                for i in (1..vals.len()).rev() {
                    let j = rand::Rng::random_range(&mut rng, 0..=i);
                    vals.swap(i, j);
                }
                Ok(vals)
            }
            Predictor::Constant { means } => Ok(*means),
            Predictor::Forests(forests) => {
                let table = features.ok_or_else(|| {
                    Error::KeyMismatch(format!("{} requires features to predict", self.kind))
                })?;
                let row = table
                    .row(key)
                    .ok_or_else(|| Error::KeyMismatch(format!("missing features for {key}")))?;
                let mut out = [0.0; AlgorithmId::COUNT];
                for (slot, forest) in out.iter_mut().zip(forests.iter()) {
                    *slot = forest.predict_row(row);
                }
                Ok(out)
            }
        }
    }

    /// Predicted values converted to a rank vector: the algorithm with the
    /// lowest predicted value (rank or precision) is ranked best.
    pub fn predict_ranks(
        &self,
        key: InstanceKey,
        features: Option<&FeatureTable>,
    ) -> Result<RankVector> {
        let values = self.predict_values(key, features)?;
        Ok(RankVector::from_values(&values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use crate::metrics::rank_with_ties as rwt;

    fn key(c: usize, i: usize) -> InstanceKey {
        InstanceKey {
            class_id: c,
            instance_id: i,
        }
    }

    fn rank_targets(rows: &[(InstanceKey, [f64; 5])]) -> TargetTable {
        let mut t = TargetTable::new(TargetKind::Rank);
        for (k, v) in rows {
            t.insert(*k, *v);
        }
        t
    }

    #[test]
    fn mean_model_predicts_training_mean_everywhere() {
        let targets = rank_targets(&[
            (key(1, 1), [1.0, 2.0, 3.0, 4.0, 5.0]),
            (key(1, 2), [1.8, 2.2, 3.0, 4.0, 4.0]),
        ]);
        let m = fit_meta(
            MetaModelKind::Mean,
            None,
            &targets,
            &ForestParams::default(),
            0,
        )
        .unwrap();
        let p = m.predict_values(key(9, 9), None).unwrap();
        assert!((p[0] - 1.4).abs() < 1e-12);
        assert!((p[1] - 2.1).abs() < 1e-12);
    }

    #[test]
    fn random_model_emits_seeded_permutations() {
        let targets = rank_targets(&[(key(1, 1), [1.0, 2.0, 3.0, 4.0, 5.0])]);
        let m = fit_meta(
            MetaModelKind::Random,
            None,
            &targets,
            &ForestParams::default(),
            7,
        )
        .unwrap();
        let a = m.predict_ranks(key(2, 3), None).unwrap();
        let b = m.predict_ranks(key(2, 3), None).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.as_slice().to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        // Different instances get different orders somewhere.
        let mut distinct = false;
        for i in 1..50 {
            if m.predict_ranks(key(2, 3 + i), None).unwrap() != a {
                distinct = true;
                break;
            }
        }
        assert!(distinct);
    }

    #[test]
    fn predicted_precisions_rank_lowest_first() {
        assert_eq!(
            rwt(&[0.01, 5.0, 0.3, 2.0, 0.2]),
            vec![1.0, 5.0, 3.0, 4.0, 2.0]
        );
    }

    #[test]
    fn ranks_are_invariant_under_monotone_transforms() {
        let vals: [f64; 5] = [0.4, 1.9, 0.05, 7.3, 2.2];
        let transformed: Vec<f64> = vals.iter().map(|v| (v * 3.0).exp()).collect();
        assert_eq!(rwt(&vals), rwt(&transformed));
    }

    fn scale_features(rows: &[(InstanceKey, f64)]) -> FeatureTable {
        let items: Vec<(InstanceKey, FeatureVector)> = rows
            .iter()
            .map(|(k, v)| {
                let mut fv = FeatureVector::new(FeatureSet::Scale);
                fv.insert("f_scale", *v);
                (*k, fv)
            })
            .collect();
        FeatureTable::from_vectors(items).unwrap()
    }

    #[test]
    fn single_tree_forest_model_reproduces_training_ranks() {
        // Distinct features, 1 tree, no bootstrap: CART interpolates, so
        // predicted ranks equal the training ranks (training PRE would be 0).
        let keys: Vec<InstanceKey> = (1..=6).map(|i| key(1, i)).collect();
        let feats = scale_features(
            &keys
                .iter()
                .enumerate()
                .map(|(i, k)| (*k, i as f64 * 10.0))
                .collect::<Vec<_>>(),
        );
        let rows: Vec<(InstanceKey, [f64; 5])> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let base = [1.0, 2.0, 3.0, 4.0, 5.0];
                let mut row = base;
                row.rotate_left(i % 5);
                (*k, row)
            })
            .collect();
        let targets = rank_targets(&rows);
        let params = ForestParams {
            n_trees: 1,
            bootstrap: false,
            ..ForestParams::default()
        };
        let m = fit_meta(MetaModelKind::RfRank, Some(&feats), &targets, &params, 0).unwrap();
        for (k, expected) in &rows {
            let got = m.predict_ranks(*k, Some(&feats)).unwrap();
            assert_eq!(got.as_slice(), rwt(expected).as_slice());
        }
    }

    #[test]
    fn key_mismatch_is_an_error() {
        let targets = rank_targets(&[(key(1, 1), [1.0, 2.0, 3.0, 4.0, 5.0]), (key(1, 2), [1.0, 2.0, 3.0, 4.0, 5.0])]);
        let feats = scale_features(&[(key(1, 1), 1.0)]); // missing key(1,2)
        assert!(matches!(
            fit_meta(
                MetaModelKind::RfRank,
                Some(&feats),
                &targets,
                &ForestParams::default(),
                0
            ),
            Err(Error::KeyMismatch(_))
        ));
        assert!(fit_meta(
            MetaModelKind::RfRank,
            None,
            &targets,
            &ForestParams::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn target_kind_mismatch_is_rejected() {
        let mut precision = TargetTable::new(TargetKind::Precision);
        precision.insert(key(1, 1), [0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!(fit_meta(
            MetaModelKind::Mean,
            None,
            &precision,
            &ForestParams::default(),
            0
        )
        .is_err());
        assert!(fit_meta(
            MetaModelKind::MeanPrecision,
            None,
            &precision,
            &ForestParams::default(),
            0
        )
        .is_ok());
    }

    /// rf-rank and rf-precision share one code path; fitted on identical
    /// inputs they produce identical predictions.
    #[test]
    fn rf_rank_and_rf_precision_share_machinery() {
        let keys: Vec<InstanceKey> = (1..=5).map(|i| key(2, i)).collect();
        let feats = scale_features(
            &keys
                .iter()
                .enumerate()
                .map(|(i, k)| (*k, (i as f64 + 1.0) * 3.0))
                .collect::<Vec<_>>(),
        );
        let values: Vec<(InstanceKey, [f64; 5])> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (*k, [i as f64, 2.0, 3.0, 4.0, 5.0 - i as f64]))
            .collect();
        let mut rank_t = TargetTable::new(TargetKind::Rank);
        let mut prec_t = TargetTable::new(TargetKind::Precision);
        for (k, v) in &values {
            // identical numeric payloads under both kinds
            let mut row = *v;
            let s: f64 = row.iter().sum();
            for r in row.iter_mut() {
                *r += (15.0 - s) / 5.0; // shift so rank rows sum to 15
            }
            rank_t.insert(*k, row);
            prec_t.insert(*k, row.map(|x| x + 10.0)); // keep positive
        }
        let params = ForestParams {
            n_trees: 8,
            seed: 13,
            ..ForestParams::default()
        };
        let mr = fit_meta(MetaModelKind::RfRank, Some(&feats), &rank_t, &params, 0).unwrap();
        let mp = fit_meta(MetaModelKind::RfPrecision, Some(&feats), &prec_t, &params, 0).unwrap();
        for k in &keys {
            let vr = mr.predict_values(*k, Some(&feats)).unwrap();
            let vp = mp.predict_values(*k, Some(&feats)).unwrap();
            for (a, b) in vr.iter().zip(vp) {
                assert!((a + 10.0 - b).abs() < 1e-9);
            }
        }
    }
}
