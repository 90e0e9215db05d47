use asbench_core::metrics::{build_targets, TargetKind};
use asbench_core::pipeline::{compute_truth_runs, build_suite, PipelineParams};
use asbench_core::portfolio::AlgorithmId;
use asbench_core::suite::class_name;

fn main() {
    let p = PipelineParams { truth_repetitions: 10, ..PipelineParams::default() };
    let suite = build_suite(&p).unwrap();
    let runs = compute_truth_runs(&p, &suite).unwrap();
    let ranks = build_targets(&runs, TargetKind::Rank).unwrap();
    println!("class              GA    DE   PSO    ES  CMAES   (mean rank over 15 instances)");
    for class in 1..=24usize {
        let mut acc = [0.0; 5];
        let mut count = 0.0;
        for (key, row) in ranks.rows() {
            if key.class_id == class {
                for (a, v) in acc.iter_mut().zip(row) { *a += v; }
                count += 1.0;
            }
        }
        print!("{:22}", class_name(class));
        for a in acc { print!("{:6.2}", a / count); }
        println!();
    }
    // how often does each algorithm have the best mean rank per class?
    let mut wins = [0usize; 5];
    for class in 1..=24usize {
        let mut acc = [0.0; 5];
        for (key, row) in ranks.rows() {
            if key.class_id == class {
                for (a, v) in acc.iter_mut().zip(row) { *a += v; }
            }
        }
        let best = acc.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        wins[best] += 1;
    }
    for (algo, w) in AlgorithmId::ALL.iter().zip(wins) {
        println!("{algo}: best on {w} classes");
    }
}
