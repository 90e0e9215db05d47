//! Suite-wide structural properties: optimum consistency, non-negativity,
//! scale heterogeneity, and the within-class feature similarity the
//! leakage audit relies on.

use rayon::prelude::*;

use asbench_core::features::{lhs_sample, noninf_features, noninf_spec};
use asbench_core::stats;
use asbench_core::suite::{list_suite, make_instance, CLASS_COUNT};

#[test]
fn optimum_consistency_across_the_default_suite() {
    let suite = list_suite(5, 15).unwrap();
    assert_eq!(suite.len(), 360);
    for inst in &suite {
        let diff = (inst.evaluate(inst.x_opt()) - inst.f_opt()).abs();
        assert!(diff <= 1e-9, "class {} inst {}: {diff}", inst.class_id(), inst.instance_id());
    }
}

#[test]
fn fitness_never_drops_below_the_optimum() {
    let suite = list_suite(5, 15).unwrap();
    let bad: Vec<String> = suite
        .par_iter()
        .filter_map(|inst| {
            let sample = lhs_sample(inst, 10_000, 7);
            let min = sample.y_raw.iter().copied().fold(f64::INFINITY, f64::min);
            if min < inst.f_opt() {
                Some(format!(
                    "class {} inst {}: min {} < f_opt {}",
                    inst.class_id(),
                    inst.instance_id(),
                    min,
                    inst.f_opt()
                ))
            } else {
                None
            }
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn cross_class_scale_heterogeneity_spans_six_orders() {
    let ranges: Vec<f64> = (1..=CLASS_COUNT)
        .into_par_iter()
        .map(|class_id| {
            let inst = make_instance(class_id, 1, 5).unwrap();
            let s = lhs_sample(&inst, 10_000, 3);
            let min = s.y_raw.iter().copied().fold(f64::INFINITY, f64::min);
            let max = s.y_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            max - min
        })
        .collect();
    let lo = ranges.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ranges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(
        hi / lo >= 1e6,
        "f-range spread {lo:.3e}..{hi:.3e} is below six orders"
    );
}

/// The high-conditioned ellipsoid's objective range dwarfs the sphere's.
#[test]
fn ellipsoid_range_exceeds_sphere_by_three_orders() {
    let sphere = make_instance(1, 1, 5).unwrap();
    let ellipsoid = make_instance(2, 1, 5).unwrap();
    let range = |inst: &asbench_core::suite::ProblemInstance| {
        let s = lhs_sample(inst, 10_000, 11);
        let min = s.y_raw.iter().copied().fold(f64::INFINITY, f64::min);
        let max = s.y_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max - min
    };
    let rs = range(&sphere);
    let re = range(&ellipsoid);
    assert!(re / rs >= 1e3, "ellipsoid {re:.3e} vs sphere {rs:.3e}");
}

/// Instances of one class sit closer together in non-informative feature
/// space than instances of different classes (the spurious-correlation
/// precondition of the leakage audit).
#[test]
fn within_class_feature_distances_are_smaller_than_cross_class() {
    let suite = list_suite(5, 15).unwrap();
    let spec = noninf_spec(46, 42);
    let vectors: Vec<(usize, Vec<f64>)> = suite
        .par_iter()
        .map(|inst| {
            let sample = lhs_sample(inst, 1250, 1000 + inst.instance_id() as u64);
            let fv = noninf_features(&sample, &spec);
            (inst.class_id(), fv.values.values().copied().collect())
        })
        .collect();
    let mut within = Vec::new();
    let mut cross = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let d = stats::euclidean(&vectors[i].1, &vectors[j].1);
            if vectors[i].0 == vectors[j].0 {
                within.push(d);
            } else {
                cross.push(d);
            }
        }
    }
    let mw = stats::median(&within);
    let mc = stats::median(&cross);
    assert!(
        mw < mc,
        "median within-class distance {mw} is not below cross-class {mc}"
    );
}

/// Positive rescaling never moves the argmin over a sampled point set.
#[test]
fn rescaling_preserves_the_argmin() {
    for class_id in [3, 7, 16, 21] {
        let inst = make_instance(class_id, 2, 5).unwrap();
        let scaled = inst.rescale(1234.5).unwrap();
        let sample = lhs_sample(&inst, 2000, 5);
        let argmin = |vals: Vec<f64>| {
            vals.iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0
        };
        let a = argmin((0..sample.n).map(|i| inst.evaluate(sample.row(i))).collect());
        let b = argmin((0..sample.n).map(|i| scaled.evaluate(sample.row(i))).collect());
        assert_eq!(a, b, "class {class_id}");
    }
}
