//! Differential evolution, DE/rand/1/bin with greedy replacement.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::evaluator::{clamp_point, uniform_point, Budgeted};

pub(crate) const POPSIZE: usize = 100;
const F: f64 = 0.5;
const CR: f64 = 0.9;

fn draw_distinct(rng: &mut ChaCha8Rng, exclude: &[usize]) -> usize {
    loop {
        let r = rng.random_range(0..POPSIZE);
        if !exclude.contains(&r) {
            return r;
        }
    }
}

pub(crate) fn minimize(ev: &mut Budgeted, rng: &mut ChaCha8Rng) {
    let dim = ev.dim();
    let rounds = ev.budget() / POPSIZE;
    let mut pop: Vec<Vec<f64>> = (0..POPSIZE).map(|_| uniform_point(dim, rng)).collect();
    let mut fit: Vec<f64> = pop.iter().map(|x| ev.eval(x)).collect();
    for _ in 1..rounds {
        // Synchronous generation: trials compete against the previous
        // population only.
        let mut next_pop = pop.clone();
        let mut next_fit = fit.clone();
        for i in 0..POPSIZE {
            let r1 = draw_distinct(rng, &[i]);
            let r2 = draw_distinct(rng, &[i, r1]);
            let r3 = draw_distinct(rng, &[i, r1, r2]);
            let j_rand = rng.random_range(0..dim);
            let mut trial = pop[i].clone();
            for j in 0..dim {
                let u: f64 = rng.random();
                if j == j_rand || u < CR {
                    trial[j] = pop[r1][j] + F * (pop[r2][j] - pop[r3][j]);
                }
            }
            clamp_point(&mut trial);
            let g = ev.eval(&trial);
            if g <= fit[i] {
                next_pop[i] = trial;
                next_fit[i] = g;
            }
        }
        pop = next_pop;
        fit = next_fit;
    }
}
