//! Budget-tracking objective wrapper shared by the five optimizers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::suite::{ProblemInstance, DOMAIN_MAX, DOMAIN_MIN};

/// Counts evaluations and tracks the best (scale-free) base value seen.
///
/// Optimizers compare these base values, never the offset/scaled objective,
/// so a run's search trajectory is bit-identical under `rescale`.
pub(crate) struct Budgeted<'a> {
    inst: &'a ProblemInstance,
    budget: usize,
    used: usize,
    best: f64,
}

impl<'a> Budgeted<'a> {
    pub fn new(inst: &'a ProblemInstance, budget: usize) -> Self {
        Budgeted {
            inst,
            budget,
            used: 0,
            best: f64::INFINITY,
        }
    }

    #[inline]
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        debug_assert!(self.used < self.budget, "evaluation budget exceeded");
        self.used += 1;
        let g = self.inst.base_value(x);
        if g < self.best {
            self.best = g;
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.inst.dim()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

/// Uniform point in the search box.
pub(crate) fn uniform_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim)
        .map(|_| DOMAIN_MIN + (DOMAIN_MAX - DOMAIN_MIN) * rng.random::<f64>())
        .collect()
}

/// Clamp-to-box boundary repair.
pub(crate) fn clamp_point(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(DOMAIN_MIN, DOMAIN_MAX);
    }
}
