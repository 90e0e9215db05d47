//! (mu, lambda) evolution strategy with self-adaptive scalar step sizes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::evaluator::{clamp_point, uniform_point, Budgeted};

pub(crate) const MU: usize = 20;
pub(crate) const LAMBDA: usize = 140;
const SIGMA0: f64 = 2.0;

pub(crate) fn minimize(ev: &mut Budgeted, rng: &mut ChaCha8Rng) {
    let dim = ev.dim();
    let tau = 1.0 / (2.0 * dim as f64).sqrt();
    let mut parents: Vec<(Vec<f64>, f64)> = Vec::with_capacity(MU);
    for _ in 0..MU {
        let x = uniform_point(dim, rng);
        ev.eval(&x);
        parents.push((x, SIGMA0));
    }
    let gens = (ev.budget() - MU) / LAMBDA;
    for _ in 0..gens {
        let mut offspring: Vec<(Vec<f64>, f64, f64)> = Vec::with_capacity(LAMBDA);
        for _ in 0..LAMBDA {
            let p = rng.random_range(0..MU);
            let sigma = parents[p].1 * (tau * rng.sample::<f64, _>(StandardNormal)).exp();
            let mut x = parents[p].0.clone();
            for v in x.iter_mut() {
                *v += sigma * rng.sample::<f64, _>(StandardNormal);
            }
            clamp_point(&mut x);
            let fit = ev.eval(&x);
            offspring.push((x, sigma, fit));
        }
        // Comma selection: parents are discarded; best MU offspring survive.
        let mut order: Vec<usize> = (0..LAMBDA).collect();
        order.sort_by(|&a, &b| offspring[a].2.total_cmp(&offspring[b].2).then(a.cmp(&b)));
        parents = order
            .iter()
            .take(MU)
            .map(|&i| (offspring[i].0.clone(), offspring[i].1))
            .collect();
    }
}
