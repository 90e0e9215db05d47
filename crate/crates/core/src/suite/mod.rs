//! The benchmark problem suite: 24 problem classes with seeded instances.
//!
//! An instance is a shifted / rotated / offset variant of its class's base
//! function: `f(x) = scale_factor * g(R(x - x_opt)) + f_opt` with `g(0) = 0`
//! and `g >= 0`, so the optimum location and value are known exactly.
//! Construction is a pure function of `(class_id, instance_id, dim)`.

mod functions;
mod rotation;

pub use functions::class_name;
pub use rotation::Rotation;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rng::{rng_from, tags};
use functions::Base;

/// Search domain is the same box for every instance.
pub const DOMAIN_MIN: f64 = -5.0;
pub const DOMAIN_MAX: f64 = 5.0;
/// Number of problem classes in the suite.
pub const CLASS_COUNT: usize = 24;

/// Identifies one instance within the suite.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct InstanceKey {
    pub class_id: usize,
    pub instance_id: usize,
}

impl std::fmt::Display for InstanceKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{}i{}", self.class_id, self.instance_id)
    }
}

/// One concrete objective function.
///
/// Instances are immutable after construction; evaluation is pure and safe
/// to call from any number of threads.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    class_id: usize,
    instance_id: usize,
    dim: usize,
    x_opt: Vec<f64>,
    f_opt: f64,
    scale_factor: f64,
    amplitude: f64,
    rotations: Vec<Rotation>,
    base: Base,
}

impl ProblemInstance {
    pub fn class_id(&self) -> usize {
        self.class_id
    }

    pub fn instance_id(&self) -> usize {
        self.instance_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            class_id: self.class_id,
            instance_id: self.instance_id,
        }
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    /// Offset-free, scale-free base value `g(R(x - x_opt))`.
    ///
    /// This is what the optimizers compare internally: it is exactly
    /// invariant under `rescale`, which in turn makes per-repetition
    /// algorithm ranks exactly invariant under rescaling.
    ///
    /// Panics if `x.len() != dim`; use [`Self::try_evaluate`] for a checked
    /// call.
    pub fn base_value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        let d = self.dim;
        let mut z: SmallVec<[f64; 8]> = SmallVec::from_slice(x);
        for i in 0..d {
            z[i] -= self.x_opt[i];
        }
        let mut u: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, d);
        let mut v: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, d);
        // The max(0) floors out sub-ulp rounding dust in the transcendental
        // classes; at x_opt the value is exactly 0 by construction.
        self.amplitude * self.base.eval(&z, &self.rotations, &mut u, &mut v).max(0.0)
    }

    /// Full objective value `scale_factor * g(R(x - x_opt)) + f_opt`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.scale_factor * self.base_value(x) + self.f_opt
    }

    /// Like [`Self::evaluate`] but reports a dimension mismatch as an error.
    pub fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.evaluate(x))
    }

    /// Copy of the instance with the objective multiplied by `factor`:
    /// the scale factor and the optimum value both scale, so target
    /// precisions scale by exactly `factor` while comparisons between any
    /// two points are preserved.
    pub fn rescale(&self, factor: f64) -> Result<ProblemInstance> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rescale factor must be positive and finite, got {factor}"
            )));
        }
        let mut out = self.clone();
        out.scale_factor *= factor;
        out.f_opt *= factor;
        Ok(out)
    }

    pub fn base_name(&self) -> &'static str {
        class_name(self.class_id)
    }
}

/// Builds an instance deterministically from `(class_id, instance_id, dim)`.
///
/// Draw order from the seeded stream: x_opt coordinates (uniform in
/// [-4, 4]), f_opt (uniform in [-100, 100]), rotation matrices, then any
/// class payload (Gallagher peak layout).
pub fn make_instance(class_id: usize, instance_id: usize, dim: usize) -> Result<ProblemInstance> {
    if !(1..=CLASS_COUNT).contains(&class_id) {
        return Err(Error::UnknownClass(class_id));
    }
    if instance_id < 1 {
        return Err(Error::InvalidArgument(format!(
            "instance_id must be >= 1, got {instance_id}"
        )));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "dim must be >= 2, got {dim}"
        )));
    }
    let mut rng = rng_from(&[tags::SUITE, class_id as u64, instance_id as u64, dim as u64]);
    let x_opt: Vec<f64> = (0..dim).map(|_| -4.0 + 8.0 * rng.random::<f64>()).collect();
    let f_opt = -100.0 + 200.0 * rng.random::<f64>();
    let rotations: Vec<Rotation> = (0..functions::rotation_count(class_id))
        .map(|_| Rotation::seeded(dim, &mut rng))
        .collect();
    let base = Base::build(class_id, dim, &mut rng);
    Ok(ProblemInstance {
        class_id,
        instance_id,
        dim,
        x_opt,
        f_opt,
        scale_factor: 1.0,
        amplitude: functions::amplitude(class_id),
        rotations,
        base,
    })
}

/// All `24 * instances_per_class` instances in (class_id, instance_id)
/// lexicographic order.
pub fn list_suite(dim: usize, instances_per_class: usize) -> Result<Vec<ProblemInstance>> {
    if instances_per_class < 1 {
        return Err(Error::InvalidArgument(
            "instances_per_class must be >= 1".into(),
        ));
    }
    let mut out = Vec::with_capacity(CLASS_COUNT * instances_per_class);
    for class_id in 1..=CLASS_COUNT {
        for instance_id in 1..=instances_per_class {
            out.push(make_instance(class_id, instance_id, dim)?);
        }
    }
    Ok(out)
}
