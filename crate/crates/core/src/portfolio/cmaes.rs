//! Covariance matrix adaptation evolution strategy with standard path and
//! covariance updates (rank-one plus rank-mu, cumulative step-size
//! adaptation).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::evaluator::{clamp_point, Budgeted};

const SIGMA0: f64 = 2.0;

/// Default population size: 4 + floor(3 ln dim).
pub(crate) fn lambda_for(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

pub(crate) fn minimize(ev: &mut Budgeted, rng: &mut ChaCha8Rng) {
    let d = ev.dim();
    let df = d as f64;
    let lambda = lambda_for(d);
    let mu = lambda / 2;
    let mut weights: Vec<f64> = (0..mu)
        .map(|i| ((mu as f64) + 0.5).ln() - ((i + 1) as f64).ln())
        .collect();
    let wsum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= wsum;
    }
    let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

    let c_sigma = (mu_eff + 2.0) / (df + mu_eff + 5.0);
    let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (df + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
    let c_c = (4.0 + mu_eff / df) / (df + 4.0 + 2.0 * mu_eff / df);
    let c_1 = 2.0 / ((df + 1.3) * (df + 1.3) + mu_eff);
    let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((df + 2.0) * (df + 2.0) + mu_eff));
    let chi_n = df.sqrt() * (1.0 - 1.0 / (4.0 * df) + 1.0 / (21.0 * df * df));

    let mut mean = DVector::from_iterator(d, (0..d).map(|_| -4.0 + 8.0 * rng.random::<f64>()));
    let mut sigma = SIGMA0;
    let mut cov = DMatrix::<f64>::identity(d, d);
    let mut b = DMatrix::<f64>::identity(d, d);
    let mut diag = DVector::<f64>::from_element(d, 1.0);
    let mut p_sigma = DVector::<f64>::zeros(d);
    let mut p_c = DVector::<f64>::zeros(d);

    let gens = ev.budget() / lambda;
    let mut xs: Vec<Vec<f64>> = vec![vec![0.0; d]; lambda];
    let mut fit = vec![0.0f64; lambda];

    for gen in 0..gens {
        for k in 0..lambda {
            let z = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let y = &b * z.component_mul(&diag);
            for j in 0..d {
                xs[k][j] = mean[j] + sigma * y[j];
            }
            clamp_point(&mut xs[k]);
            fit[k] = ev.eval(&xs[k]);
        }
        let mut order: Vec<usize> = (0..lambda).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]).then(a.cmp(&b)));

        let old_mean = mean.clone();
        mean = DVector::zeros(d);
        for (i, &k) in order.iter().take(mu).enumerate() {
            for j in 0..d {
                mean[j] += weights[i] * xs[k][j];
            }
        }
        let y_w = (&mean - &old_mean) / sigma;

        // C^{-1/2} y_w = B diag(1/d) B^T y_w
        let mut proj = b.transpose() * &y_w;
        for j in 0..d {
            proj[j] /= diag[j];
        }
        let c_inv_sqrt_yw = &b * proj;

        p_sigma = (1.0 - c_sigma) * &p_sigma
            + (c_sigma * (2.0 - c_sigma) * mu_eff).sqrt() * c_inv_sqrt_yw;
        let ps_norm = p_sigma.norm();
        let denom = (1.0 - (1.0 - c_sigma).powi(2 * (gen as i32 + 1))).sqrt();
        let h_sigma = ps_norm / denom / chi_n < 1.4 + 2.0 / (df + 1.0);
        let h = if h_sigma { 1.0 } else { 0.0 };

        p_c = (1.0 - c_c) * &p_c + h * (c_c * (2.0 - c_c) * mu_eff).sqrt() * &y_w;

        let mut rank_mu = DMatrix::<f64>::zeros(d, d);
        for (i, &k) in order.iter().take(mu).enumerate() {
            let y_i = DVector::from_iterator(d, (0..d).map(|j| (xs[k][j] - old_mean[j]) / sigma));
            rank_mu += weights[i] * &y_i * y_i.transpose();
        }
        let decay = 1.0 - c_1 - c_mu + c_1 * (1.0 - h) * c_c * (2.0 - c_c);
        cov = decay * &cov + c_1 * &p_c * p_c.transpose() + c_mu * rank_mu;

        sigma *= ((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0)).exp();
        sigma = sigma.clamp(1e-250, 1e250);

        // Symmetrize before the eigendecomposition; floor tiny eigenvalues.
        let sym = (&cov + cov.transpose()) * 0.5;
        cov = sym.clone();
        let eig = sym.symmetric_eigen();
        b = eig.eigenvectors;
        diag = eig.eigenvalues.map(|v| v.max(1e-30).sqrt());
    }
}
