use asbench_core::eval::{leakage_audit, scale_audit, MetricKind, SplitKind};
use asbench_core::models::{ForestParams, MetaModelKind};
use asbench_core::pipeline::{compute_all, PipelineParams};
use std::time::Instant;

fn main() {
    let p = PipelineParams {
        train_repetitions: 10,
        truth_repetitions: 20,
        samples_per_dim: 100,
        forest: ForestParams { n_trees: 50, ..ForestParams::default() },
        ..PipelineParams::default()
    };
    let t = Instant::now();
    let data = compute_all(&p).unwrap();
    eprintln!("pipeline {}s", t.elapsed().as_secs());
    let t = Instant::now();
    let leak = leakage_audit(&p, &data).unwrap();
    eprintln!("leakage audit {}s", t.elapsed().as_secs());
    for proto in [SplitKind::Lio, SplitKind::Lpo] {
        for kind in [MetaModelKind::Random, MetaModelKind::Mean, MetaModelKind::Ela, MetaModelKind::NonInf, MetaModelKind::Class] {
            let m = leak.median_of(proto, kind, MetricKind::Pre).unwrap();
            println!("{proto} {kind}: median PRE {m:.4}");
        }
    }
    for t in &leak.tests { println!("{}: stat {:.3} p {:.4}", t.name, t.statistic, t.p_value); }
    let t = Instant::now();
    let scale = scale_audit(&p, &data).unwrap();
    eprintln!("scale audit {}s", t.elapsed().as_secs());
    for kind in [MetaModelKind::MeanPrecision, MetaModelKind::MeanRank, MetaModelKind::RfPrecision, MetaModelKind::RfRank] {
        let m = scale.median_of(SplitKind::Lpo, kind, MetricKind::Pre).unwrap();
        println!("scale {kind}: median PRE {m:.4}");
    }
    for kind in [MetaModelKind::MeanPrecision, MetaModelKind::RfPrecision] {
        let m = scale.median_of(SplitKind::Lpo, kind, MetricKind::Mse).unwrap();
        println!("scale {kind}: median MSE {m:.3e}");
    }
    let mse_mean = scale.fold_values(SplitKind::Lpo, MetaModelKind::MeanPrecision, MetricKind::Mse);
    let mse_rf = scale.fold_values(SplitKind::Lpo, MetaModelKind::RfPrecision, MetricKind::Mse);
    let wins = mse_mean.iter().zip(&mse_rf).filter(|(m, r)| r < m).count();
    let mut ratios: Vec<f64> = mse_mean.iter().zip(&mse_rf).map(|(m, r)| m / r).collect();
    ratios.sort_by(f64::total_cmp);
    println!("rf wins {wins}/24, median ratio {:.2}", ratios[12]);
    for t in &scale.tests { println!("{}: stat {:.3} p {:.6}", t.name, t.statistic, t.p_value); }
}
