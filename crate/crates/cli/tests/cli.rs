//! End-to-end CLI tests on a miniature configuration: artifact layout,
//! caching behavior, byte-identical reports, and subcommand wiring.

use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

fn asbench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_asbench"))
}

fn tiny_config(dir: &Path, out: &Path) -> std::path::PathBuf {
    let path = dir.join("bench.toml");
    let text = format!(
        r#"
master_seed = 7
output_dir = "{}"

[suite]
dim = 2
instances_per_class = 2

[portfolio]
budget_per_dim = 100
train_repetitions = 2
truth_repetitions = 3

[features]
samples_per_dim = 10
noninf_count = 8

[forest]
n_trees = 5

[splits]
lio_test_fraction = 0.5
lio_repeats = 2

[audit]
scale_factors = [0.1, 1.0, 10.0]
scale_classes = [4, 13]
"#,
        out.display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn full_pipeline_is_cached_and_byte_deterministic() {
    let dir = tempdir().unwrap();
    let out1 = dir.path().join("out1");
    let cfg = tiny_config(dir.path(), &out1);

    let status = asbench()
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());

    for file in [
        "runs.csv",
        "runs-truth.csv",
        "features-ela.csv",
        "features-noninf.csv",
        "features-class.csv",
        "features-scale.csv",
        "targets-rank-train.csv",
        "targets-precision-train.csv",
        "report-leakage.json",
        "report-scale.json",
        "report.json",
        "plotdata-fig1.csv",
        "plotdata-fig2.csv",
        "plotdata-fig3.csv",
        "MANIFEST.json",
    ] {
        assert!(out1.join(file).exists(), "missing {file}");
    }
    let report1 = std::fs::read(out1.join("report.json")).unwrap();
    let runs1 = std::fs::read(out1.join("runs.csv")).unwrap();

    // deleting one feature artifact recomputes only what is needed and the
    // report comes back byte-identical
    std::fs::remove_file(out1.join("features-ela.csv")).unwrap();
    let status = asbench()
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(out1.join("report.json")).unwrap(), report1);
    assert_eq!(std::fs::read(out1.join("runs.csv")).unwrap(), runs1);

    // a fresh output directory reproduces the report byte-for-byte
    let out2 = dir.path().join("out2");
    let cfg2 = tiny_config(dir.path(), &out2);
    let status = asbench()
        .args(["run", "--config"])
        .arg(&cfg2)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(out2.join("report.json")).unwrap(), report1);

    // the report renders
    let output = asbench()
        .arg("report")
        .arg(out1.join("report.json"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("leakage audit"));
    assert!(text.contains("scale audit"));
    assert!(text.contains("random"));

    // --check evaluates criteria; at this miniature scale they fail, which
    // must map to exit code 2
    let output = asbench()
        .arg("report")
        .arg(out1.join("report.json"))
        .arg("--check")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("criterion 1"));
}

#[test]
fn stale_cache_with_no_recompute_is_an_error() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = tiny_config(dir.path(), &out);
    let status = asbench()
        .args(["audit", "leakage", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());

    // change a run-stage parameter: the cache digests no longer match
    let text = std::fs::read_to_string(&cfg).unwrap();
    std::fs::write(&cfg, text.replace("train_repetitions = 2", "train_repetitions = 3")).unwrap();
    let output = asbench()
        .args(["audit", "leakage", "--no-recompute", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("stale cache"), "{err}");
}

#[test]
fn standalone_subcommands_produce_their_artifacts() {
    let dir = tempdir().unwrap();

    // suite list to stdout
    let output = asbench()
        .args(["suite", "list", "--dim", "2", "--instances", "1", "--range-samples", "200"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.starts_with("class_id,instance_id,dim,f_opt,f_range_estimate"));
    assert_eq!(text.lines().count(), 25);

    // portfolio run -> targets build round trip
    let runs = dir.path().join("runs.csv");
    let status = asbench()
        .args([
            "portfolio",
            "run",
            "--dim",
            "2",
            "--instances",
            "1",
            "--budget-per-dim",
            "100",
            "--reps",
            "2",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&runs)
        .status()
        .unwrap();
    assert!(status.success());
    let targets = dir.path().join("targets.csv");
    let status = asbench()
        .args(["targets", "build", "--dim", "2", "--instances", "1", "--kind", "rank", "--runs"])
        .arg(&runs)
        .arg("--out")
        .arg(&targets)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&targets).unwrap();
    assert!(text.starts_with("kind,class_id,instance_id,algorithm,target"));
    assert_eq!(text.lines().count(), 1 + 24 * 5);

    // features extract for the class set
    let feats = dir.path().join("features.csv");
    let status = asbench()
        .args(["features", "extract", "--dim", "2", "--instances", "1", "--set", "class", "--out"])
        .arg(&feats)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&feats).unwrap();
    assert!(text.starts_with("class_id,instance_id,class"));

    // unknown set is a plain failure
    let output = asbench()
        .args(["features", "extract", "--set", "bogus", "--out", "x.csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
