//! Elitist genetic algorithm: binary tournaments, SBX crossover, polynomial
//! mutation, (mu + lambda) truncation. All selection is comparison-based.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::evaluator::{clamp_point, uniform_point, Budgeted};
use crate::suite::{DOMAIN_MAX, DOMAIN_MIN};

pub(crate) const POPSIZE: usize = 100;
const P_CROSSOVER: f64 = 0.9;
const ETA_CROSSOVER: f64 = 15.0;
const ETA_MUTATION: f64 = 20.0;

fn tournament(fit: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let i = rng.random_range(0..fit.len());
    let j = rng.random_range(0..fit.len());
    if fit[j] < fit[i] {
        j
    } else {
        i
    }
}

fn sbx(p1: &[f64], p2: &[f64], rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() < P_CROSSOVER {
        for k in 0..p1.len() {
            let u: f64 = rng.random();
            let beta = if u <= 0.5 {
                (2.0 * u).powf(1.0 / (ETA_CROSSOVER + 1.0))
            } else {
                (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (ETA_CROSSOVER + 1.0))
            };
            c1[k] = 0.5 * ((1.0 + beta) * p1[k] + (1.0 - beta) * p2[k]);
            c2[k] = 0.5 * ((1.0 - beta) * p1[k] + (1.0 + beta) * p2[k]);
        }
    }
    (c1, c2)
}

fn polynomial_mutation(x: &mut [f64], rng: &mut ChaCha8Rng) {
    let pm = 1.0 / x.len() as f64;
    let range = DOMAIN_MAX - DOMAIN_MIN;
    for v in x.iter_mut() {
        let r: f64 = rng.random();
        if r < pm {
            let u: f64 = rng.random();
            let cur = v.clamp(DOMAIN_MIN, DOMAIN_MAX);
            let delta = if u < 0.5 {
                let d = (cur - DOMAIN_MIN) / range;
                (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d).powf(ETA_MUTATION + 1.0))
                    .powf(1.0 / (ETA_MUTATION + 1.0))
                    - 1.0
            } else {
                let d = (DOMAIN_MAX - cur) / range;
                1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d).powf(ETA_MUTATION + 1.0))
                    .powf(1.0 / (ETA_MUTATION + 1.0))
            };
            *v = cur + delta * range;
        }
    }
}

pub(crate) fn minimize(ev: &mut Budgeted, rng: &mut ChaCha8Rng) {
    let dim = ev.dim();
    let rounds = ev.budget() / POPSIZE;
    let mut pop: Vec<Vec<f64>> = (0..POPSIZE).map(|_| uniform_point(dim, rng)).collect();
    let mut fit: Vec<f64> = pop.iter().map(|x| ev.eval(x)).collect();
    for _ in 1..rounds {
        let mut children = Vec::with_capacity(POPSIZE);
        while children.len() < POPSIZE {
            let p1 = tournament(&fit, rng);
            let p2 = tournament(&fit, rng);
            let (mut c1, mut c2) = sbx(&pop[p1], &pop[p2], rng);
            polynomial_mutation(&mut c1, rng);
            polynomial_mutation(&mut c2, rng);
            clamp_point(&mut c1);
            clamp_point(&mut c2);
            children.push(c1);
            children.push(c2);
        }
        let child_fit: Vec<f64> = children.iter().map(|x| ev.eval(x)).collect();
        // (mu + lambda): keep the best POPSIZE of parents + children; ties
        // resolve to the lower combined index (parents first), so survival
        // depends only on fitness comparisons.
        let mut order: Vec<usize> = (0..2 * POPSIZE).collect();
        let combined = |i: usize| if i < POPSIZE { fit[i] } else { child_fit[i - POPSIZE] };
        order.sort_by(|&a, &b| combined(a).total_cmp(&combined(b)).then(a.cmp(&b)));
        let mut new_pop = Vec::with_capacity(POPSIZE);
        let mut new_fit = Vec::with_capacity(POPSIZE);
        for &i in order.iter().take(POPSIZE) {
            if i < POPSIZE {
                new_pop.push(pop[i].clone());
                new_fit.push(fit[i]);
            } else {
                new_pop.push(children[i - POPSIZE].clone());
                new_fit.push(child_fit[i - POPSIZE]);
            }
        }
        pop = new_pop;
        fit = new_fit;
    }
}
