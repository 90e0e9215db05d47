//! The optimizer portfolio and the fixed-budget runner.
//!
//! All five algorithms use only order comparisons of fitness (tournaments,
//! greedy replacement, personal/global bests, truncation, rank weights), and
//! they compare the instance's offset-free base values. For a fixed seed the
//! search trajectory is therefore bit-identical under positive rescaling of
//! the objective.

mod cmaes;
mod de;
mod es;
mod evaluator;
mod ga;
mod pso;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::rng::{mix, tags};
use crate::suite::{InstanceKey, ProblemInstance};
use evaluator::Budgeted;

/// The five-algorithm portfolio, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AlgorithmId {
    Ga,
    De,
    Pso,
    Es,
    CmaEs,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 5] = [
        AlgorithmId::Ga,
        AlgorithmId::De,
        AlgorithmId::Pso,
        AlgorithmId::Es,
        AlgorithmId::CmaEs,
    ];
    pub const COUNT: usize = 5;

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Ga => "GA",
            AlgorithmId::De => "DE",
            AlgorithmId::Pso => "PSO",
            AlgorithmId::Es => "ES",
            AlgorithmId::CmaEs => "CMAES",
        }
    }

    pub fn from_name(s: &str) -> Option<AlgorithmId> {
        Self::ALL.iter().copied().find(|a| a.name() == s)
    }

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|a| a == self).unwrap()
    }

    /// Population size, i.e. evaluations per generation; the minimum budget.
    pub fn popsize(&self, dim: usize) -> usize {
        match self {
            AlgorithmId::Ga => ga::POPSIZE,
            AlgorithmId::De => de::POPSIZE,
            AlgorithmId::Pso => pso::SWARM,
            AlgorithmId::Es => es::LAMBDA,
            AlgorithmId::CmaEs => cmaes::lambda_for(dim),
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One optimizer execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub class_id: usize,
    pub instance_id: usize,
    pub algorithm: AlgorithmId,
    pub repetition: usize,
    pub seed: u64,
    pub best_f: f64,
    pub evals_used: usize,
    pub scale_factor: f64,
    /// Scale-free best base value; `best_f = f_opt + scale_factor * raw_gap`.
    /// Kept alongside `best_f` so target precision (`best_f - f_opt`) and
    /// per-repetition ranks are computed without cancellation error.
    pub raw_gap: f64,
}

impl RunRecord {
    /// Target precision of the run: `best_f - f_opt` in exact form.
    pub fn gap(&self) -> f64 {
        self.scale_factor * self.raw_gap
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            class_id: self.class_id,
            instance_id: self.instance_id,
        }
    }
}

/// Executes one algorithm on one instance with a fixed evaluation budget.
///
/// The repetition field of the returned record is 0; [`run_portfolio`]
/// assigns repetition indices.
pub fn run(
    algorithm: AlgorithmId,
    instance: &ProblemInstance,
    budget: usize,
    seed: u64,
) -> Result<RunRecord> {
    let popsize = algorithm.popsize(instance.dim());
    if budget < popsize {
        return Err(Error::BudgetTooSmall {
            algorithm,
            budget,
            popsize,
        });
    }
    let mut ev = Budgeted::new(instance, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match algorithm {
        AlgorithmId::Ga => ga::minimize(&mut ev, &mut rng),
        AlgorithmId::De => de::minimize(&mut ev, &mut rng),
        AlgorithmId::Pso => pso::minimize(&mut ev, &mut rng),
        AlgorithmId::Es => es::minimize(&mut ev, &mut rng),
        AlgorithmId::CmaEs => cmaes::minimize(&mut ev, &mut rng),
    }
    let raw_gap = ev.best();
    let evals_used = ev.used();
    debug_assert!(evals_used <= budget);
    Ok(RunRecord {
        class_id: instance.class_id(),
        instance_id: instance.instance_id(),
        algorithm,
        repetition: 0,
        seed,
        best_f: instance.f_opt() + instance.scale_factor() * raw_gap,
        evals_used,
        scale_factor: instance.scale_factor(),
        raw_gap,
    })
}

/// Indexed collection of run records with lookup by (instance, algorithm).
#[derive(Debug, Clone)]
pub struct RunTable {
    records: Vec<RunRecord>,
    index: HashMap<(InstanceKey, AlgorithmId), Range<usize>>,
}

impl RunTable {
    /// Sorts the records into (class, instance, algorithm, repetition)
    /// order and builds the lookup index, so a table is identical no matter
    /// how its records were produced.
    pub fn new(mut records: Vec<RunRecord>) -> RunTable {
        records.sort_by(|a, b| {
            (a.class_id, a.instance_id, a.algorithm.index(), a.repetition).cmp(&(
                b.class_id,
                b.instance_id,
                b.algorithm.index(),
                b.repetition,
            ))
        });
        let mut index = HashMap::new();
        let mut start = 0;
        for i in 1..=records.len() {
            let boundary = i == records.len() || {
                let (a, b) = (&records[i - 1], &records[i]);
                (a.key(), a.algorithm) != (b.key(), b.algorithm)
            };
            if boundary {
                let r = &records[start];
                index.insert((r.key(), r.algorithm), start..i);
                start = i;
            }
        }
        RunTable { records, index }
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records for one (instance, algorithm) pair, ordered by repetition.
    pub fn runs(&self, key: InstanceKey, algorithm: AlgorithmId) -> &[RunRecord] {
        match self.index.get(&(key, algorithm)) {
            Some(r) => &self.records[r.clone()],
            None => &[],
        }
    }

    /// Sorted unique instance keys present in the table.
    pub fn instance_keys(&self) -> Vec<InstanceKey> {
        let mut keys: Vec<InstanceKey> = self.records.iter().map(|r| r.key()).collect();
        keys.dedup();
        keys.sort();
        keys.dedup();
        keys
    }

    /// Checks that every (instance, algorithm) pair has exactly
    /// `repetitions` records.
    pub fn verify_complete(&self, keys: &[InstanceKey], repetitions: usize) -> Result<()> {
        for key in keys {
            for algo in AlgorithmId::ALL {
                let runs = self.runs(*key, algo);
                if runs.len() != repetitions {
                    return Err(Error::IncompleteTable(format!(
                        "{key}/{algo}: {} records, expected {repetitions}",
                        runs.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Runs every algorithm `repetitions` times on every instance.
///
/// Per-run seeds are `mix(master_seed, RUN, class, instance, algorithm,
/// repetition)` — independent of execution order, parallelism degree, and
/// of the instance's scale factor (so rescaled paired runs share seeds).
pub fn run_portfolio(
    suite: &[ProblemInstance],
    budget: usize,
    repetitions: usize,
    master_seed: u64,
) -> Result<RunTable> {
    if repetitions < 1 {
        return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
    }
    let mut jobs = Vec::with_capacity(suite.len() * AlgorithmId::COUNT * repetitions);
    for inst in suite {
        for algo in AlgorithmId::ALL {
            for rep in 0..repetitions {
                jobs.push((inst, algo, rep));
            }
        }
    }
    let records: Result<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|(inst, algo, rep)| {
            let seed = mix(&[
                master_seed,
                tags::RUN,
                inst.class_id() as u64,
                inst.instance_id() as u64,
                algo.index() as u64,
                *rep as u64,
            ]);
            run(*algo, inst, budget, seed).map(|mut r| {
                r.repetition = *rep;
                r
            })
        })
        .collect();
    Ok(RunTable::new(records?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::make_instance;

    #[test]
    fn runs_are_seed_deterministic() {
        let inst = make_instance(8, 1, 5).unwrap();
        for algo in AlgorithmId::ALL {
            let a = run(algo, &inst, 1000, 7).unwrap();
            let b = run(algo, &inst, 1000, 7).unwrap();
            assert_eq!(a.best_f.to_bits(), b.best_f.to_bits(), "{algo}");
            assert_eq!(a.evals_used, b.evals_used);
        }
    }

    #[test]
    fn budget_is_never_exceeded() {
        let inst = make_instance(3, 2, 5).unwrap();
        for algo in AlgorithmId::ALL {
            for budget in [150, 1000, 5000] {
                let r = run(algo, &inst, budget, 11).unwrap();
                assert!(r.evals_used <= budget, "{algo} {budget} {}", r.evals_used);
            }
        }
    }

    #[test]
    fn best_f_is_bounded_below_by_f_opt() {
        let inst = make_instance(16, 1, 5).unwrap();
        for algo in AlgorithmId::ALL {
            let r = run(algo, &inst, 1000, 3).unwrap();
            assert!(r.best_f >= inst.f_opt());
            assert!(r.raw_gap >= 0.0);
        }
    }

    #[test]
    fn budget_below_popsize_is_an_error() {
        let inst = make_instance(1, 1, 5).unwrap();
        assert!(matches!(
            run(AlgorithmId::Ga, &inst, 99, 1),
            Err(Error::BudgetTooSmall { .. })
        ));
        assert!(matches!(
            run(AlgorithmId::Es, &inst, 139, 1),
            Err(Error::BudgetTooSmall { .. })
        ));
    }

    /// Truncating the budget can never improve the best value: shorter runs
    /// are exact prefixes of longer ones.
    #[test]
    fn anytime_budget_monotonicity() {
        let inst = make_instance(9, 1, 5).unwrap();
        for algo in AlgorithmId::ALL {
            for seed in [1u64, 2, 3] {
                let short = run(algo, &inst, 1500, seed).unwrap();
                let mid = run(algo, &inst, 3000, seed).unwrap();
                let long = run(algo, &inst, 5000, seed).unwrap();
                assert!(short.best_f >= mid.best_f, "{algo} seed {seed}");
                assert!(mid.best_f >= long.best_f, "{algo} seed {seed}");
            }
        }
    }

    /// With paired seeds, rescaling the instance leaves the trajectory (and
    /// so the scale-free gap) bit-identical; best_f scales linearly.
    #[test]
    fn trajectories_are_invariant_under_rescaling() {
        let inst = make_instance(4, 1, 5).unwrap();
        let scaled = inst.rescale(100.0).unwrap();
        for algo in AlgorithmId::ALL {
            let a = run(algo, &inst, 1000, 5).unwrap();
            let b = run(algo, &scaled, 1000, 5).unwrap();
            assert_eq!(a.raw_gap.to_bits(), b.raw_gap.to_bits(), "{algo}");
            let lhs = b.best_f - 100.0 * inst.f_opt();
            let rhs = 100.0 * (a.best_f - inst.f_opt());
            let denom = rhs.abs().max(1e-30);
            assert!(((lhs - rhs) / denom).abs() < 1e-9, "{algo}");
        }
    }

    #[test]
    fn cmaes_converges_on_sphere() {
        let inst = make_instance(1, 1, 5).unwrap();
        for seed in 0..30u64 {
            let r = run(AlgorithmId::CmaEs, &inst, 5000, seed).unwrap();
            assert!(
                r.best_f - inst.f_opt() < 1e-6,
                "seed {seed}: gap {}",
                r.best_f - inst.f_opt()
            );
        }
    }

    #[test]
    fn portfolio_table_shape_and_completeness() {
        let suite: Vec<_> = (1..=3)
            .map(|c| make_instance(c, 1, 5).unwrap())
            .collect();
        let table = run_portfolio(&suite, 200, 2, 42).unwrap();
        assert_eq!(table.len(), 3 * 5 * 2);
        let keys: Vec<InstanceKey> = suite.iter().map(|i| i.key()).collect();
        table.verify_complete(&keys, 2).unwrap();
        assert!(table.verify_complete(&keys, 3).is_err());
    }

    #[test]
    fn portfolio_is_independent_of_worker_count() {
        let suite: Vec<_> = (1..=2)
            .map(|c| make_instance(c, 1, 5).unwrap())
            .collect();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_portfolio(&suite, 200, 2, 9).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_portfolio(&suite, 200, 2, 9).unwrap());
        assert_eq!(one.records().len(), four.records().len());
        for (a, b) in one.records().iter().zip(four.records()) {
            assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
            assert_eq!(a.seed, b.seed);
        }
    }

    #[test]
    fn paired_portfolio_runs_scale_exactly() {
        let inst = make_instance(13, 1, 5).unwrap();
        let scaled = inst.rescale(10.0).unwrap();
        let t1 = run_portfolio(std::slice::from_ref(&inst), 200, 3, 21).unwrap();
        let t2 = run_portfolio(std::slice::from_ref(&scaled), 200, 3, 21).unwrap();
        for (a, b) in t1.records().iter().zip(t2.records()) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.raw_gap.to_bits(), b.raw_gap.to_bits());
        }
    }
}
