use asbench_core::portfolio::{run_portfolio};
use asbench_core::suite::list_suite;
use std::time::Instant;

fn main() {
    // One instance per class, all 5 algorithms, 2 reps at full 5000 budget:
    // 240 runs = 1.2M evals; the default pipeline is 234,000 runs.
    let suite = list_suite(5, 1).unwrap();
    let t = Instant::now();
    let table = run_portfolio(&suite, 5000, 2, 1).unwrap();
    let dt = t.elapsed().as_secs_f64();
    let runs = table.len() as f64;
    println!("{} runs in {:.2}s -> {:.1} runs/s/2cores", table.len(), dt, runs / dt);
    println!("default pipeline (234000 runs) projection: {:.1} min", 234000.0 / (runs / dt) / 60.0);
}
