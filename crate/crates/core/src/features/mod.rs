//! Design sampling and the landscape feature extractors.
//!
//! Four feature sets are produced per instance: the ELA-like set
//! ([`ela_features`], 46 features in six groups), the non-informative
//! fitness-statistics set ([`noninf_features`]), the bare problem-class
//! feature ([`class_feature`]), and the scale proxy ([`scale_feature`],
//! the only extractor that reads raw unscaled fitness values).

mod ela;
mod noninf;

pub use ela::{ela_features, ELA_FEATURE_COUNT};
pub use noninf::{
    noninf_features, noninf_from_values, noninf_spec, Aggregate, GeneratorSpec, NoninfRecipe,
    Transform, SCALARS,
};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::suite::{InstanceKey, ProblemInstance, DOMAIN_MAX, DOMAIN_MIN};

/// Which extractor produced a feature vector.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Ela,
    NonInf,
    Class,
    Scale,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 4] = [
        FeatureSet::Ela,
        FeatureSet::NonInf,
        FeatureSet::Class,
        FeatureSet::Scale,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FeatureSet::Ela => "ela",
            FeatureSet::NonInf => "noninf",
            FeatureSet::Class => "class",
            FeatureSet::Scale => "scale",
        }
    }

    pub fn from_name(s: &str) -> Option<FeatureSet> {
        Self::ALL.iter().copied().find(|f| f.name() == s)
    }
}

/// Evaluated Latin hypercube design for one instance.
#[derive(Debug, Clone)]
pub struct DesignSample {
    pub class_id: usize,
    pub instance_id: usize,
    pub dim: usize,
    pub n: usize,
    /// Row-major n x dim matrix of points.
    x: Vec<f64>,
    pub y_raw: Vec<f64>,
    /// Min-max scaled to [0, 1]; all zeros when y_raw is constant.
    pub y_scaled: Vec<f64>,
}

impl DesignSample {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            class_id: self.class_id,
            instance_id: self.instance_id,
        }
    }

    /// Assembles a sample from explicit points and fitness values (used by
    /// tests and synthetic landscapes); computes the scaled fitness.
    pub fn from_xy(
        class_id: usize,
        instance_id: usize,
        dim: usize,
        x: Vec<f64>,
        y_raw: Vec<f64>,
    ) -> DesignSample {
        assert_eq!(x.len(), y_raw.len() * dim, "x must be n*dim values");
        let n = y_raw.len();
        let y_scaled = min_max_scale(&y_raw);
        DesignSample {
            class_id,
            instance_id,
            dim,
            n,
            x,
            y_raw,
            y_scaled,
        }
    }
}

fn min_max_scale(y: &[f64]) -> Vec<f64> {
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max > min {
        let range = max - min;
        y.iter().map(|v| (v - min) / range).collect()
    } else {
        vec![0.0; y.len()]
    }
}

/// Latin hypercube sample of the instance's search box.
///
/// Each coordinate's `n` values land one per stratum of `[-5, 5]` divided
/// into `n` equal bins, with the strata permuted independently per
/// coordinate. Draw order per coordinate: stratum permutation, then the
/// `n` in-stratum offsets.
pub fn lhs_sample(instance: &ProblemInstance, n: usize, seed: u64) -> DesignSample {
    assert!(n >= 2, "lhs_sample needs n >= 2");
    let dim = instance.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n * dim];
    let width = DOMAIN_MAX - DOMAIN_MIN;
    for j in 0..dim {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            x[i * dim + j] = DOMAIN_MIN + width * ((s as f64 + u) / n as f64);
        }
    }
    let y_raw: Vec<f64> = (0..n)
        .map(|i| instance.evaluate(&x[i * dim..(i + 1) * dim]))
        .collect();
    let y_scaled = min_max_scale(&y_raw);
    DesignSample {
        class_id: instance.class_id(),
        instance_id: instance.instance_id(),
        dim,
        n,
        x,
        y_raw,
        y_scaled,
    }
}

/// Named numeric features for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub tag: FeatureSet,
    pub values: IndexMap<String, f64>,
}

impl FeatureVector {
    pub fn new(tag: FeatureSet) -> FeatureVector {
        FeatureVector {
            tag,
            values: IndexMap::new(),
        }
    }

    /// Inserts a feature; non-finite values (degenerate fits etc.) are
    /// stored as 0 with a logged flag so vectors stay finite.
    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        let v = if value.is_finite() {
            value
        } else {
            log::warn!("feature {name} degenerate ({value}); storing 0");
            0.0
        };
        self.values.insert(name, v);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Single feature: the problem class id.
pub fn class_feature(instance: &ProblemInstance) -> FeatureVector {
    let mut fv = FeatureVector::new(FeatureSet::Class);
    fv.insert("class", instance.class_id() as f64);
    fv
}

/// Single feature: `f_scale = max(Y) - min(Y)` on the raw (unscaled)
/// fitness values; a proxy for the objective's scale.
pub fn scale_feature(sample: &DesignSample) -> FeatureVector {
    let min = sample.y_raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sample
        .y_raw
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut fv = FeatureVector::new(FeatureSet::Scale);
    fv.insert("f_scale", max - min);
    fv
}

/// Feature vectors for a set of instances, with a consistent key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub tag: FeatureSet,
    pub names: Vec<String>,
    rows: BTreeMap<InstanceKey, Vec<f64>>,
}

impl FeatureTable {
    /// Builds a table, checking that every vector carries the same tag and
    /// the same feature names.
    pub fn from_vectors(items: Vec<(InstanceKey, FeatureVector)>) -> Result<FeatureTable> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty feature table".into()))?;
        let tag = first.1.tag;
        let names: Vec<String> = first.1.values.keys().cloned().collect();
        let mut rows = BTreeMap::new();
        for (key, fv) in &items {
            if fv.tag != tag {
                return Err(Error::KeyMismatch(format!(
                    "mixed feature tags {tag:?} and {:?}",
                    fv.tag
                )));
            }
            let row_names: Vec<&String> = fv.values.keys().collect();
            if row_names.len() != names.len() || row_names.iter().zip(&names).any(|(a, b)| *a != b)
            {
                return Err(Error::KeyMismatch(format!(
                    "inconsistent feature names for {key}"
                )));
            }
            rows.insert(*key, fv.values.values().copied().collect());
        }
        Ok(FeatureTable { tag, names, rows })
    }

    pub fn from_rows(
        tag: FeatureSet,
        names: Vec<String>,
        rows: BTreeMap<InstanceKey, Vec<f64>>,
    ) -> Result<FeatureTable> {
        for (key, row) in &rows {
            if row.len() != names.len() {
                return Err(Error::KeyMismatch(format!("row width mismatch for {key}")));
            }
        }
        Ok(FeatureTable { tag, names, rows })
    }

    pub fn row(&self, key: InstanceKey) -> Option<&[f64]> {
        self.rows.get(&key).map(|v| v.as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = InstanceKey> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (InstanceKey, &[f64])> {
        self.rows.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::make_instance;

    #[test]
    fn lhs_has_one_point_per_stratum() {
        let inst = make_instance(1, 1, 5).unwrap();
        let n = 100;
        let s = lhs_sample(&inst, n, 7);
        assert_eq!(s.n, n);
        for j in 0..5 {
            let mut seen = vec![false; n];
            for i in 0..n {
                let v = s.row(i)[j];
                assert!((DOMAIN_MIN..DOMAIN_MAX).contains(&v));
                let bin = (((v - DOMAIN_MIN) / 10.0) * n as f64).floor() as usize;
                assert!(!seen[bin], "two points in stratum {bin} of coord {j}");
                seen[bin] = true;
            }
        }
    }

    #[test]
    fn lhs_is_deterministic_and_default_size() {
        let inst = make_instance(2, 3, 5).unwrap();
        let a = lhs_sample(&inst, 250 * 5, 42);
        let b = lhs_sample(&inst, 250 * 5, 42);
        assert_eq!(a.n, 1250);
        assert_eq!(a.x, b.x);
        assert_eq!(a.y_raw, b.y_raw);
        let c = lhs_sample(&inst, 250 * 5, 43);
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn scaled_fitness_spans_unit_interval() {
        let inst = make_instance(3, 1, 5).unwrap();
        let s = lhs_sample(&inst, 200, 1);
        let min = s.y_scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let max = s.y_scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, 0.0);
        assert_eq!(max, 1.0);
        for (i, &y) in s.y_raw.iter().enumerate() {
            assert_eq!(y, inst.evaluate(s.row(i)));
        }
    }

    #[test]
    fn constant_fitness_scales_to_zeros() {
        let s = DesignSample::from_xy(1, 1, 2, vec![0.0; 8], vec![5.0; 4]);
        assert!(s.y_scaled.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn class_feature_is_fitness_independent() {
        let inst = make_instance(7, 3, 5).unwrap();
        let fv = class_feature(&inst);
        assert_eq!(fv.get("class"), Some(7.0));
        let scaled = inst.rescale(1000.0).unwrap();
        assert_eq!(class_feature(&scaled), fv);
        for i in 1..=15 {
            let other = make_instance(24, i, 5).unwrap();
            assert_eq!(class_feature(&other).get("class"), Some(24.0));
        }
    }

    #[test]
    fn scale_feature_examples() {
        let s = DesignSample::from_xy(1, 1, 2, vec![0.0; 4], vec![0.0, 10.0]);
        assert_eq!(scale_feature(&s).get("f_scale"), Some(10.0));
        let c = DesignSample::from_xy(1, 1, 2, vec![0.0; 4], vec![3.0, 3.0]);
        assert_eq!(scale_feature(&c).get("f_scale"), Some(0.0));
    }

    #[test]
    fn scale_feature_is_homogeneous_in_rescaling() {
        let inst = make_instance(10, 1, 5).unwrap();
        let scaled = inst.rescale(100.0).unwrap();
        let a = scale_feature(&lhs_sample(&inst, 500, 3));
        let b = scale_feature(&lhs_sample(&scaled, 500, 3));
        let fa = a.get("f_scale").unwrap();
        let fb = b.get("f_scale").unwrap();
        assert!((fb / (100.0 * fa) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn feature_table_rejects_inconsistent_names() {
        let key = |i| InstanceKey {
            class_id: 1,
            instance_id: i,
        };
        let mut a = FeatureVector::new(FeatureSet::NonInf);
        a.insert("x", 1.0);
        let mut b = FeatureVector::new(FeatureSet::NonInf);
        b.insert("y", 2.0);
        assert!(FeatureTable::from_vectors(vec![(key(1), a.clone()), (key(2), b)]).is_err());
        let mut ok = FeatureVector::new(FeatureSet::NonInf);
        ok.insert("x", 3.0);
        let t = FeatureTable::from_vectors(vec![(key(1), a), (key(2), ok)]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.row(key(2)), Some(&[3.0][..]));
    }

    #[test]
    fn non_finite_features_become_zero() {
        let mut fv = FeatureVector::new(FeatureSet::Ela);
        fv.insert("bad", f64::NAN);
        fv.insert("inf", f64::INFINITY);
        assert_eq!(fv.get("bad"), Some(0.0));
        assert_eq!(fv.get("inf"), Some(0.0));
    }
}
