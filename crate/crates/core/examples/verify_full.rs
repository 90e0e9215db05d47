use asbench_core::acceptance::check_report_criteria;
use asbench_core::eval::{leakage_audit, scale_audit};
use asbench_core::pipeline::{compute_all, PipelineParams};
use std::time::Instant;

fn main() {
    let params = PipelineParams::default();
    let t = Instant::now();
    let data = compute_all(&params).unwrap();
    eprintln!("pipeline: {}s", t.elapsed().as_secs());
    let t = Instant::now();
    let leakage = leakage_audit(&params, &data).unwrap();
    eprintln!("leakage: {}s", t.elapsed().as_secs());
    let t = Instant::now();
    let scale = scale_audit(&params, &data).unwrap();
    eprintln!("scale: {}s", t.elapsed().as_secs());
    for c in check_report_criteria(&leakage, &scale) {
        println!(
            "criterion {}: {} — {}",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.details
        );
    }
}
