//! Evaluates a handful of candidate per-class amplitude vectors on one
//! cached pipeline (amplitudes rescale precisions and f_scale linearly;
//! ranks are invariant).

use std::collections::BTreeMap;

use asbench_core::eval::{friedman, lpo_splits, mse, pre, wilcoxon_signed_rank};
use asbench_core::features::{FeatureSet, FeatureTable, FeatureVector};
use asbench_core::metrics::{rank_with_ties, TargetTable};
use asbench_core::models::{fit_meta, ForestParams, MetaModelKind};
use asbench_core::pipeline::{compute_all, PipelineParams};
use asbench_core::suite::InstanceKey;

fn scaled_targets(t: &TargetTable, mult: &[f64; 25]) -> TargetTable {
    let mut out = TargetTable::new(t.kind);
    for (key, row) in t.rows() {
        let m = mult[key.class_id];
        out.insert(key, row.map(|v| v * m));
    }
    out
}

fn main() {
    let params = PipelineParams {
        train_repetitions: 10,
        truth_repetitions: 20,
        samples_per_dim: 100,
        ..PipelineParams::default()
    };
    eprintln!("computing pipeline once...");
    let data = compute_all(&params).unwrap();
    let keys: Vec<InstanceKey> = data.suite.iter().map(|i| i.key()).collect();
    let plans = lpo_splits(&keys).unwrap();
    let truth_rank_vecs: BTreeMap<InstanceKey, Vec<f64>> = data
        .truth_rank_targets
        .rows()
        .map(|(k, row)| (k, rank_with_ties(row)))
        .collect();
    let base_f_scale: BTreeMap<InstanceKey, f64> = data.features[&FeatureSet::Scale]
        .rows()
        .map(|(k, row)| (k, row[0]))
        .collect();

    let mut candidates: Vec<(&str, [f64; 25])> = Vec::new();
    let mut v = [1.0f64; 25];
    candidates.push(("baseline", v));
    v = [1.0; 25];
    v[8] = 1e6;
    v[9] = 1e6;
    v[16] = 1e6;
    candidates.push(("S2: rosen x2 + weier 1e6", v));
    let mut s3 = v;
    s3[15] = 1e4;
    s3[18] = 1e4;
    candidates.push(("S3: S2 + rast-rot/schaff-ill 1e4", s3));
    let mut s4 = s3;
    s4[17] = 1e-2;
    s4[19] = 1e-2;
    s4[20] = 1e-2;
    s4[3] = 1e-2;
    s4[5] = 1e-2;
    candidates.push(("S4: S3 + suppress small multimodal", s4));
    let mut s5 = s3;
    s5[6] = 1e4;
    s5[13] = 1e2;
    candidates.push(("S5: S3 + sector 1e4 + ridge 1e2", s5));
    let full: [f64; 25] = {
        let tail = [
            100.0, 100.0, 1e-4, 100.0, 1e-4, 1e4, 1.0, 1e6, 1e6, 1.0, 1.0, 1e-2, 100.0, 1e-2,
            1e4, 1e6, 1e-4, 1e4, 1e-4, 1e-4, 1.0, 1.0, 1.0, 1.0,
        ];
        let mut m = [1.0; 25];
        m[1..].copy_from_slice(&tail);
        m
    };
    candidates.push(("full search vector", full));

    for (name, mult) in &candidates {
        let train_prec = scaled_targets(&data.train_precision_targets, mult);
        let truth_prec = scaled_targets(&data.truth_precision_targets, mult);
        let items: Vec<(InstanceKey, FeatureVector)> = base_f_scale
            .iter()
            .map(|(k, v)| {
                let mut fv = FeatureVector::new(FeatureSet::Scale);
                fv.insert("f_scale", v * mult[k.class_id]);
                (*k, fv)
            })
            .collect();
        let feats = FeatureTable::from_vectors(items).unwrap();
        let fp = ForestParams {
            n_trees: 25,
            seed: 9,
            ..ForestParams::default()
        };
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 4];
        let mut mse_mean = Vec::new();
        let mut mse_rf = Vec::new();
        for plan in &plans {
            let tp = train_prec.restrict(&plan.train).unwrap();
            let tr = data.train_rank_targets.restrict(&plan.train).unwrap();
            let models = [
                fit_meta(MetaModelKind::MeanPrecision, None, &tp, &fp, 1).unwrap(),
                fit_meta(MetaModelKind::MeanRank, None, &tr, &fp, 2).unwrap(),
                fit_meta(MetaModelKind::RfPrecision, Some(&feats), &tp, &fp, 3).unwrap(),
                fit_meta(MetaModelKind::RfRank, Some(&feats), &tr, &fp, 4).unwrap(),
            ];
            let mut acc = [0.0; 4];
            let mut mp_pred = Vec::new();
            let mut rf_pred = Vec::new();
            let mut truth_vals = Vec::new();
            for key in &plan.test {
                let truth = &truth_rank_vecs[key];
                for (i, m) in models.iter().enumerate() {
                    let f = m.kind.feature_set().map(|_| &feats);
                    let vals = m.predict_values(*key, f).unwrap();
                    acc[i] += pre(&rank_with_ties(&vals), truth).unwrap();
                }
                mp_pred.extend_from_slice(&models[0].predict_values(*key, None).unwrap());
                rf_pred.extend_from_slice(&models[2].predict_values(*key, Some(&feats)).unwrap());
                truth_vals.extend_from_slice(truth_prec.get(*key).unwrap());
            }
            for (c, a) in cols.iter_mut().zip(acc) {
                c.push(a / plan.test.len() as f64);
            }
            mse_mean.push(mse(&mp_pred, &truth_vals).unwrap());
            mse_rf.push(mse(&rf_pred, &truth_vals).unwrap());
        }
        let matrix: Vec<Vec<f64>> = (0..plans.len())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        let fr = friedman(&matrix).unwrap();
        let wins = mse_mean.iter().zip(&mse_rf).filter(|(m, r)| r < m).count();
        let mut ratios: Vec<f64> = mse_mean
            .iter()
            .zip(&mse_rf)
            .map(|(m, r)| if *r > 0.0 { m / r } else { f64::INFINITY })
            .collect();
        ratios.sort_by(f64::total_cmp);
        let w = wilcoxon_signed_rank(&mse_mean, &mse_rf).unwrap();
        let med = |c: &[f64]| asbench_core::stats::median(c);
        println!(
            "{name}: friedman chi2 {:.3} p {:.4} | PRE medians mp {:.3} mr {:.3} rfp {:.3} rfr {:.3} | wins {wins}/24 ratio {:.1} wilcoxon p {:.5}",
            fr.statistic, fr.p_value, med(&cols[0]), med(&cols[1]), med(&cols[2]), med(&cols[3]), ratios[12], w.p_value
        );
    }
}
