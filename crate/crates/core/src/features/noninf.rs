//! Non-informative features: randomized `agg(tr(sc * Y))` recipes applied
//! to scaled fitness values only. They are designed to identify a problem's
//! class without carrying any information useful for algorithm selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DesignSample, FeatureSet, FeatureVector};
use crate::rng::{rng_from, tags};
use crate::stats;

/// The ten admissible scalars `sc`.
pub const SCALARS: [f64; 10] = [0.2, 0.3, 0.5, 0.7, 1.0, 2.0, 3.0, 5.0, 7.0, 9.0];

/// Transformations `tr`, all defined on `[0, 9]` (the range of
/// `sc * Y_scaled`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Sin,
    Cos,
    Root6,
    Root3,
    Sqrt,
    Square,
    Log1p,
}

impl Transform {
    pub const ALL: [Transform; 7] = [
        Transform::Sin,
        Transform::Cos,
        Transform::Root6,
        Transform::Root3,
        Transform::Sqrt,
        Transform::Square,
        Transform::Log1p,
    ];

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Transform::Sin => x.sin(),
            Transform::Cos => x.cos(),
            Transform::Root6 => x.powf(1.0 / 6.0),
            Transform::Root3 => x.powf(1.0 / 3.0),
            Transform::Sqrt => x.sqrt(),
            Transform::Square => x * x,
            Transform::Log1p => (x + 1.0).ln(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Sin => "sin",
            Transform::Cos => "cos",
            Transform::Root6 => "root6",
            Transform::Root3 => "root3",
            Transform::Sqrt => "sqrt",
            Transform::Square => "square",
            Transform::Log1p => "log1p",
        }
    }
}

/// Aggregates `agg`; quantiles interpolate linearly between order
/// statistics and std is the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Mean,
    Median,
    Std,
    Q5,
    Q25,
    Q75,
    Q95,
}

impl Aggregate {
    pub const ALL: [Aggregate; 7] = [
        Aggregate::Mean,
        Aggregate::Median,
        Aggregate::Std,
        Aggregate::Q5,
        Aggregate::Q25,
        Aggregate::Q75,
        Aggregate::Q95,
    ];

    pub fn apply(&self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Mean => stats::mean(values),
            Aggregate::Median => stats::median(values),
            Aggregate::Std => stats::std_dev(values),
            Aggregate::Q5 => stats::quantile_of(values, 0.05),
            Aggregate::Q25 => stats::quantile_of(values, 0.25),
            Aggregate::Q75 => stats::quantile_of(values, 0.75),
            Aggregate::Q95 => stats::quantile_of(values, 0.95),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Aggregate::Mean => "mean",
            Aggregate::Median => "median",
            Aggregate::Std => "std",
            Aggregate::Q5 => "q5",
            Aggregate::Q25 => "q25",
            Aggregate::Q75 => "q75",
            Aggregate::Q95 => "q95",
        }
    }
}

/// One feature recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoninfRecipe {
    pub scalar: f64,
    pub transform: Transform,
    pub aggregate: Aggregate,
}

/// The ordered recipe list. The recipe at index j is applied to every
/// problem instance, so feature j means the same thing across the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub triples: Vec<NoninfRecipe>,
    pub seed: u64,
}

/// Draws `m` recipes uniformly (scalar, then transform, then aggregate per
/// recipe) from a stream derived from `seed`.
pub fn noninf_spec(m: usize, seed: u64) -> GeneratorSpec {
    assert!(m >= 1, "noninf_spec needs m >= 1");
    let mut rng = rng_from(&[tags::NONINF, seed]);
    let triples = (0..m)
        .map(|_| {
            let scalar = SCALARS[rng.random_range(0..SCALARS.len())];
            let transform = Transform::ALL[rng.random_range(0..Transform::ALL.len())];
            let aggregate = Aggregate::ALL[rng.random_range(0..Aggregate::ALL.len())];
            NoninfRecipe {
                scalar,
                transform,
                aggregate,
            }
        })
        .collect();
    GeneratorSpec { triples, seed }
}

/// Applies the recipe list to the sample's scaled fitness values. Only
/// fitness values are used, never the sampled locations.
pub fn noninf_features(sample: &DesignSample, spec: &GeneratorSpec) -> FeatureVector {
    noninf_from_values(&sample.y_scaled, spec)
}

/// The template core: feature j = `agg_j(tr_j(sc_j * y))`.
///
/// Transformed values are sorted before aggregation, which fixes the
/// floating-point summation order and makes the features bit-invariant
/// under permutation of the sample.
pub fn noninf_from_values(y: &[f64], spec: &GeneratorSpec) -> FeatureVector {
    let mut fv = FeatureVector::new(FeatureSet::NonInf);
    let mut tmp = vec![0.0; y.len()];
    for (j, recipe) in spec.triples.iter().enumerate() {
        for (t, &v) in tmp.iter_mut().zip(y) {
            *t = recipe.transform.apply(recipe.scalar * v);
        }
        tmp.sort_by(f64::total_cmp);
        fv.insert(format!("noninf_{j:03}"), recipe.aggregate.apply(&tmp));
    }
    fv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_draws_are_deterministic_and_in_range() {
        let a = noninf_spec(85, 3);
        let b = noninf_spec(85, 3);
        assert_eq!(a, b);
        assert_eq!(a.triples.len(), 85);
        for r in &a.triples {
            assert!(SCALARS.contains(&r.scalar));
        }
        let c = noninf_spec(85, 4);
        assert_ne!(a, c);
    }

    #[test]
    fn template_hand_computation() {
        // recipe (2, x^2, mean) on y = (1, 2): mean((2*1)^2, (2*2)^2) = 10.
        let spec = GeneratorSpec {
            triples: vec![NoninfRecipe {
                scalar: 2.0,
                transform: Transform::Square,
                aggregate: Aggregate::Mean,
            }],
            seed: 0,
        };
        let fv = noninf_from_values(&[1.0, 2.0], &spec);
        assert_eq!(fv.get("noninf_000"), Some(10.0));
    }

    #[test]
    fn std_of_constant_input_is_zero() {
        let spec = GeneratorSpec {
            triples: vec![NoninfRecipe {
                scalar: 0.5,
                transform: Transform::Log1p,
                aggregate: Aggregate::Std,
            }],
            seed: 0,
        };
        let fv = noninf_from_values(&[0.0; 6], &spec);
        assert_eq!(fv.get("noninf_000"), Some(0.0));
    }

    #[test]
    fn features_are_permutation_invariant() {
        let spec = noninf_spec(20, 9);
        let y = vec![0.1, 0.9, 0.4, 0.0, 1.0, 0.6];
        let mut shuffled = y.clone();
        shuffled.reverse();
        shuffled.swap(0, 3);
        let a = noninf_from_values(&y, &spec);
        let b = noninf_from_values(&shuffled, &spec);
        assert_eq!(a, b);
    }

    #[test]
    fn transforms_are_finite_on_their_domain() {
        for tr in Transform::ALL {
            for i in 0..=90 {
                let x = i as f64 * 0.1;
                assert!(tr.apply(x).is_finite(), "{tr:?}({x})");
            }
        }
    }
}
