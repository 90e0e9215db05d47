//! ELA-like landscape features: 46 values in six groups computed on the
//! scaled fitness of a design sample.
//!
//! Groups: fitness distribution (3), meta-model fits (9), dispersion (16),
//! information content (5), nearest-better clustering (5), and principal
//! components (8). Degenerate cases (singular fits, zero variance) produce
//! 0 with a logged flag rather than non-finite values.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DesignSample, FeatureSet, FeatureVector};
use crate::rng::{mix, tags};
use crate::stats;

/// Size of the catalog below; the default non-informative feature count
/// matches it.
pub const ELA_FEATURE_COUNT: usize = 46;

const DISP_QUANTILES: [(f64, &str); 4] = [
    (0.02, "02"),
    (0.05, "05"),
    (0.10, "10"),
    (0.25, "25"),
];

/// Computes the full ELA-like feature vector. Requires `n >= 10 * dim`.
pub fn ela_features(sample: &DesignSample) -> FeatureVector {
    assert!(
        sample.n >= 10 * sample.dim,
        "ela_features needs n >= 10 * dim"
    );
    let mut fv = FeatureVector::new(FeatureSet::Ela);
    y_distribution(&mut fv, &sample.y_scaled);
    meta_model(&mut fv, sample);
    dispersion(&mut fv, sample);
    information_content(&mut fv, sample);
    nearest_better(&mut fv, sample);
    pca(&mut fv, sample);
    debug_assert_eq!(fv.len(), ELA_FEATURE_COUNT);
    fv
}

// ---------------------------------------------------------------- y-dist

fn y_distribution(fv: &mut FeatureVector, y: &[f64]) {
    fv.insert("ydist_skewness", stats::skewness(y));
    fv.insert("ydist_kurtosis", stats::kurtosis(y));
    fv.insert("ydist_n_peaks", kde_peak_count(y));
}

/// Peaks of a Gaussian KDE on a 512-point grid with Silverman bandwidth;
/// a peak is a local maximum above 10% of the global maximum.
fn kde_peak_count(y: &[f64]) -> f64 {
    let n = y.len();
    let sd = stats::std_dev(y);
    let iqr = stats::quantile_of(y, 0.75) - stats::quantile_of(y, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let bw = 0.9 * spread * (n as f64).powf(-0.2);
    if !(bw > 0.0) {
        return 1.0; // constant sample: one degenerate peak
    }
    let min = y.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * bw;
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bw;
    const GRID: usize = 512;
    let step = (max - min) / (GRID - 1) as f64;
    let inv_bw = 1.0 / bw;
    let mut density = [0.0f64; GRID];
    for (g, d) in density.iter_mut().enumerate() {
        let x = min + g as f64 * step;
        let mut acc = 0.0;
        for &v in y {
            let t = (x - v) * inv_bw;
            acc += (-0.5 * t * t).exp();
        }
        *d = acc;
    }
    let peak_floor = 0.1 * density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Rise/fall tracking with a relative tolerance so last-ulp jitter in
    // the summed kernel values cannot register as structure.
    const TOL: f64 = 1e-12;
    let mut peaks = 0;
    let mut rising = false;
    let mut run_top = density[0];
    for i in 1..GRID {
        if density[i] > density[i - 1] * (1.0 + TOL) {
            rising = true;
            run_top = density[i];
        } else if density[i] < density[i - 1] * (1.0 - TOL) {
            if rising && run_top > peak_floor {
                peaks += 1;
            }
            rising = false;
        }
    }
    peaks as f64
}

// ------------------------------------------------------------ meta-model

fn adj_r2(sse: f64, sst: f64, n: usize, predictors: usize) -> f64 {
    let r2 = 1.0 - sse / sst;
    1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - predictors as f64 - 1.0)
}

fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    if svd.rank(1e-10) < a.ncols() {
        return None;
    }
    let coefs = svd.solve(y, 1e-12).ok()?;
    let resid = y - a * &coefs;
    Some((coefs, resid.norm_squared()))
}

fn meta_model(fv: &mut FeatureVector, sample: &DesignSample) {
    let n = sample.n;
    let d = sample.dim;
    let y = DVector::from_column_slice(&sample.y_scaled);
    let mean = stats::mean(&sample.y_scaled);
    let sst: f64 = sample.y_scaled.iter().map(|v| (v - mean) * (v - mean)).sum();
    let degenerate = |fv: &mut FeatureVector| {
        log::warn!("degenerate meta-model fit; features set to 0");
        for name in [
            "meta_lin_adj_r2",
            "meta_lin_intercept",
            "meta_lin_coef_min",
            "meta_lin_coef_max",
            "meta_lin_coef_max_by_min",
            "meta_quad_adj_r2",
            "meta_quad_cond",
            "meta_quad_coef_min",
            "meta_quad_coef_max",
        ] {
            fv.insert(name, 0.0);
        }
    };
    if sst <= 0.0 {
        degenerate(fv);
        return;
    }

    // Linear: [1, x_1 .. x_d]
    let lin = DMatrix::from_fn(n, 1 + d, |i, j| {
        if j == 0 {
            1.0
        } else {
            sample.row(i)[j - 1]
        }
    });
    // Full quadratic: [1, x_j, x_j^2, x_j x_k (j < k)]
    let qcols = 1 + 2 * d + d * (d - 1) / 2;
    let quad = DMatrix::from_fn(n, qcols, |i, j| {
        let row = sample.row(i);
        if j == 0 {
            1.0
        } else if j <= d {
            row[j - 1]
        } else if j <= 2 * d {
            let k = j - d - 1;
            row[k] * row[k]
        } else {
            let mut idx = j - 2 * d - 1;
            for a in 0..d {
                let span = d - a - 1;
                if idx < span {
                    return row[a] * row[a + 1 + idx];
                }
                idx -= span;
            }
            unreachable!()
        }
    });

    match (least_squares(&lin, &y), least_squares(&quad, &y)) {
        (Some((lc, l_sse)), Some((qc, q_sse))) => {
            let betas: Vec<f64> = (1..=d).map(|j| lc[j].abs()).collect();
            let bmin = betas.iter().copied().fold(f64::INFINITY, f64::min);
            let bmax = betas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            fv.insert("meta_lin_adj_r2", adj_r2(l_sse, sst, n, d));
            fv.insert("meta_lin_intercept", lc[0]);
            fv.insert("meta_lin_coef_min", bmin);
            fv.insert("meta_lin_coef_max", bmax);
            fv.insert(
                "meta_lin_coef_max_by_min",
                if bmin > 0.0 { bmax / bmin } else { 0.0 },
            );
            let quads: Vec<f64> = (d + 1..=2 * d).map(|j| qc[j].abs()).collect();
            let qmin = quads.iter().copied().fold(f64::INFINITY, f64::min);
            let qmax = quads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            fv.insert("meta_quad_adj_r2", adj_r2(q_sse, sst, n, qcols - 1));
            fv.insert("meta_quad_cond", if qmin > 0.0 { qmax / qmin } else { 0.0 });
            fv.insert("meta_quad_coef_min", qmin);
            fv.insert("meta_quad_coef_max", qmax);
        }
        _ => degenerate(fv),
    }
}

// ------------------------------------------------------------ dispersion

fn median_inplace(v: &mut [f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    let mid = n / 2;
    let (before, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = before.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

fn pairwise_dists(sample: &DesignSample, idx: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        let ri = sample.row(i);
        for &j in &idx[a + 1..] {
            out.push(stats::euclidean(ri, sample.row(j)));
        }
    }
    out
}

/// Ratios and differences of mean/median pairwise distance among the
/// best-q% points versus all points, for q in {2, 5, 10, 25}%.
fn dispersion(fv: &mut FeatureVector, sample: &DesignSample) {
    let n = sample.n;
    let all_idx: Vec<usize> = (0..n).collect();
    let mut all = pairwise_dists(sample, &all_idx);
    let mean_all = stats::mean(&all);
    let median_all = median_inplace(&mut all);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sample.y_scaled[a]
            .total_cmp(&sample.y_scaled[b])
            .then(a.cmp(&b))
    });

    for (q, tag) in DISP_QUANTILES {
        let k = ((q * n as f64).ceil() as usize).max(2);
        let subset = &order[..k.min(n)];
        let mut sub = pairwise_dists(sample, subset);
        let mean_sub = stats::mean(&sub);
        let median_sub = median_inplace(&mut sub);
        fv.insert(
            format!("disp_ratio_mean_{tag}"),
            if mean_all > 0.0 { mean_sub / mean_all } else { 0.0 },
        );
        fv.insert(
            format!("disp_ratio_median_{tag}"),
            if median_all > 0.0 { median_sub / median_all } else { 0.0 },
        );
        fv.insert(format!("disp_diff_mean_{tag}"), mean_sub - mean_all);
        fv.insert(format!("disp_diff_median_{tag}"), median_sub - median_all);
    }
}

// -------------------------------------------------- information content

fn symbols(phi: &[f64], eps: f64) -> Vec<i8> {
    phi.iter()
        .map(|&p| {
            if p > eps {
                1
            } else if p < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Entropy (base 6) of consecutive distinct-symbol pairs.
fn block_entropy(sym: &[i8]) -> f64 {
    if sym.len() < 2 {
        return 0.0;
    }
    let mut counts = [0usize; 9];
    let mut total = 0usize;
    for w in sym.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a != b {
            counts[((a + 1) * 3 + (b + 1)) as usize] += 1;
        }
        total += 1;
    }
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.ln();
        }
    }
    h / 6f64.ln()
}

/// Partial information: length of the zero-free, repeat-collapsed symbol
/// sequence relative to the full sequence length.
fn partial_information(sym: &[i8]) -> f64 {
    let mut len = 0usize;
    let mut last: i8 = 0;
    for &s in sym {
        if s != 0 && s != last {
            len += 1;
            last = s;
        }
    }
    len as f64 / sym.len() as f64
}

fn information_content(fv: &mut FeatureVector, sample: &DesignSample) {
    let n = sample.n;
    let seed = mix(&[
        tags::IC_TOUR,
        sample.class_id as u64,
        sample.instance_id as u64,
        n as u64,
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..n);

    // Greedy nearest-neighbor tour from the seeded start.
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    visited[start] = true;
    tour.push(start);
    let mut cur = start;
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        let rc = sample.row(cur);
        for (j, seen) in visited.iter().enumerate() {
            if !seen {
                let d = stats::euclidean(rc, sample.row(j));
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        visited[best] = true;
        tour.push(best);
        cur = best;
    }

    let phi: Vec<f64> = tour
        .windows(2)
        .map(|w| {
            let d = stats::euclidean(sample.row(w[0]), sample.row(w[1]));
            if d > 0.0 {
                (sample.y_scaled[w[1]] - sample.y_scaled[w[0]]) / d
            } else {
                0.0
            }
        })
        .collect();

    // Logarithmic epsilon grid from 1e-5 to 1e15, four points per decade.
    let grid: Vec<f64> = (0..=80).map(|k| 10f64.powf(-5.0 + 0.25 * k as f64)).collect();
    let entropies: Vec<f64> = grid.iter().map(|&e| block_entropy(&symbols(&phi, e))).collect();

    let mut h_max = 0.0f64;
    let mut eps_max = grid[0];
    for (&e, &h) in grid.iter().zip(&entropies) {
        if h > h_max {
            h_max = h;
            eps_max = e;
        }
    }
    let eps_s = grid
        .iter()
        .zip(&entropies)
        .find(|(_, &h)| h < 0.05)
        .map(|(&e, _)| e.log10())
        .unwrap_or(15.0);

    let m0 = partial_information(&symbols(&phi, 0.0));
    let eps_ratio = if m0 > 0.0 {
        grid.iter()
            .find(|&&e| partial_information(&symbols(&phi, e)) < 0.5 * m0)
            .map(|e| e.log10())
            .unwrap_or(15.0)
    } else {
        -5.0
    };

    fv.insert("ic_h_max", h_max);
    fv.insert("ic_eps_s", eps_s);
    fv.insert("ic_eps_max", eps_max.log10());
    fv.insert("ic_m0", m0);
    fv.insert("ic_eps_ratio", eps_ratio);
}

// ---------------------------------------------- nearest-better clustering

fn nearest_better(fv: &mut FeatureVector, sample: &DesignSample) {
    let n = sample.n;
    let y = &sample.y_scaled;
    let mut nn = vec![f64::INFINITY; n];
    let mut nb = vec![f64::INFINITY; n];
    for i in 0..n {
        let ri = sample.row(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = stats::euclidean(ri, sample.row(j));
            if d < nn[i] {
                nn[i] = d;
            }
            if y[j] < y[i] && d < nb[i] {
                nb[i] = d;
            }
        }
    }
    // Points with no strictly better neighbor (the incumbent optima) carry
    // no nearest-better distance and are excluded.
    let valid: Vec<usize> = (0..n).filter(|&i| nb[i].is_finite()).collect();
    let nn_v: Vec<f64> = valid.iter().map(|&i| nn[i]).collect();
    let nb_v: Vec<f64> = valid.iter().map(|&i| nb[i]).collect();
    let y_v: Vec<f64> = valid.iter().map(|&i| y[i]).collect();
    let ratios: Vec<f64> = nn_v
        .iter()
        .zip(&nb_v)
        .map(|(a, b)| if *b > 0.0 { a / b } else { 0.0 })
        .collect();

    let sd_nb = stats::std_dev(&nb_v);
    let mean_nb = stats::mean(&nb_v);
    let mean_ratio = stats::mean(&ratios);
    fv.insert(
        "nbc_nn_nb_sd_ratio",
        if sd_nb > 0.0 { stats::std_dev(&nn_v) / sd_nb } else { 0.0 },
    );
    fv.insert(
        "nbc_nn_nb_mean_ratio",
        if mean_nb > 0.0 { stats::mean(&nn_v) / mean_nb } else { 0.0 },
    );
    fv.insert("nbc_nn_nb_cor", stats::pearson(&nn_v, &nb_v));
    fv.insert(
        "nbc_dist_ratio_cv",
        if mean_ratio > 0.0 { stats::std_dev(&ratios) / mean_ratio } else { 0.0 },
    );
    fv.insert("nbc_nb_fitness_cor", stats::pearson(&nb_v, &y_v));
}

// ------------------------------------------------------------------- pca

/// (share of components needed for 90% variance, first-component share)
fn eigen_summaries(m: DMatrix<f64>) -> Option<(f64, f64)> {
    let p = m.ncols();
    let eig = m.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut acc = 0.0;
    let mut needed = p;
    for (i, v) in vals.iter().enumerate() {
        acc += v;
        if acc >= 0.9 * total {
            needed = i + 1;
            break;
        }
    }
    Some((needed as f64 / p as f64, vals[0] / total))
}

fn covariance(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let p = cols.len();
    let n = cols[0].len();
    let means: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let mut m = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let mut acc = 0.0;
            for i in 0..n {
                acc += (cols[a][i] - means[a]) * (cols[b][i] - means[b]);
            }
            let v = acc / (n as f64 - 1.0);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    m
}

fn correlation(cov: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = cov.ncols();
    let sds: Vec<f64> = (0..p).map(|i| cov[(i, i)].sqrt()).collect();
    if sds.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let mut m = cov.clone();
    for a in 0..p {
        for b in 0..p {
            m[(a, b)] /= sds[a] * sds[b];
        }
    }
    Some(m)
}

fn pca(fv: &mut FeatureVector, sample: &DesignSample) {
    let d = sample.dim;
    let mut cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..sample.n).map(|i| sample.row(i)[j]).collect())
        .collect();
    let cov_x = covariance(&cols);
    cols.push(sample.y_scaled.clone());
    let cov_init = covariance(&cols);

    let mut put = |prefix: &str, summary: Option<(f64, f64)>| match summary {
        Some((ev, pc1)) => {
            fv.insert(format!("pca_expl_var_{prefix}"), ev);
            fv.insert(format!("pca_pc1_{prefix}"), pc1);
        }
        None => {
            log::warn!("degenerate pca ({prefix}); features set to 0");
            fv.insert(format!("pca_expl_var_{prefix}"), 0.0);
            fv.insert(format!("pca_pc1_{prefix}"), 0.0);
        }
    };
    put("cov_x", eigen_summaries(cov_x.clone()));
    put("cor_x", correlation(&cov_x).and_then(eigen_summaries));
    put("cov_init", eigen_summaries(cov_init.clone()));
    put("cor_init", correlation(&cov_init).and_then(eigen_summaries));
}
