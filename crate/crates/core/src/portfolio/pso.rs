//! Particle swarm optimization with linearly decaying inertia and
//! synchronous global-best updates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::evaluator::{clamp_point, uniform_point, Budgeted};

pub(crate) const SWARM: usize = 25;
const C1: f64 = 2.0;
const C2: f64 = 2.0;
/// 0.2 * box width.
const V_MAX: f64 = 2.0;
const W_START: f64 = 0.9;
const W_END: f64 = 0.4;
/// Inertia reaches W_END at this evaluation round (the default 5D budget of
/// 5000 evaluations = 200 rounds of 25) and stays there for longer runs.
/// Anchoring the schedule to the round index keeps shorter budgets an exact
/// prefix of longer ones.
const DECAY_ROUNDS: usize = 200;

pub(crate) fn minimize(ev: &mut Budgeted, rng: &mut ChaCha8Rng) {
    let dim = ev.dim();
    let rounds = ev.budget() / SWARM;
    let mut xs = Vec::with_capacity(SWARM);
    let mut vs = Vec::with_capacity(SWARM);
    for _ in 0..SWARM {
        xs.push(uniform_point(dim, rng));
        let v: Vec<f64> = (0..dim)
            .map(|_| -V_MAX + 2.0 * V_MAX * rng.random::<f64>())
            .collect();
        vs.push(v);
    }
    let mut pbest = xs.clone();
    let mut pbest_fit: Vec<f64> = xs.iter().map(|x| ev.eval(x)).collect();
    let mut gbest_idx = 0;
    for i in 1..SWARM {
        if pbest_fit[i] < pbest_fit[gbest_idx] {
            gbest_idx = i;
        }
    }
    let mut gbest = pbest[gbest_idx].clone();
    let mut gbest_fit = pbest_fit[gbest_idx];

    for round in 2..=rounds {
        let t = ((round - 2) as f64 / (DECAY_ROUNDS - 2) as f64).min(1.0);
        let w = W_START + (W_END - W_START) * t;
        for i in 0..SWARM {
            for j in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = w * vs[i][j]
                    + C1 * r1 * (pbest[i][j] - xs[i][j])
                    + C2 * r2 * (gbest[j] - xs[i][j]);
                vs[i][j] = v.clamp(-V_MAX, V_MAX);
                xs[i][j] += vs[i][j];
            }
            clamp_point(&mut xs[i]);
            let g = ev.eval(&xs[i]);
            if g < pbest_fit[i] {
                pbest_fit[i] = g;
                pbest[i] = xs[i].clone();
            }
        }
        // Synchronous: the global best moves only between rounds.
        for i in 0..SWARM {
            if pbest_fit[i] < gbest_fit {
                gbest_fit = pbest_fit[i];
                gbest = pbest[i].clone();
            }
        }
    }
}
