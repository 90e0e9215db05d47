//! CSV and JSON artifact formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written artifact reloads to bit-identical values and repeated runs
//! produce byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{EvaluationReport, MetricKind, SplitKind};
use crate::features::{FeatureSet, FeatureTable};
use crate::metrics::{TargetKind, TargetTable};
use crate::models::MetaModelKind;
use crate::portfolio::{AlgorithmId, RunRecord, RunTable};
use crate::suite::{InstanceKey, ProblemInstance};

fn malformed(path: &Path, detail: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| malformed(path, format!("bad {field}: {s:?}")))
}

// ------------------------------------------------------------------ runs

pub fn write_runs_csv(path: &Path, table: &RunTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "class_id",
        "instance_id",
        "algorithm",
        "repetition",
        "seed",
        "best_f",
        "evals_used",
        "scale_factor",
    ])?;
    for r in table.records() {
        w.write_record([
            r.class_id.to_string(),
            r.instance_id.to_string(),
            r.algorithm.name().to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            r.best_f.to_string(),
            r.evals_used.to_string(),
            r.scale_factor.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reloads a run table. The scale-free gap is reconstructed as
/// `(best_f - f_opt) / scale_factor` from the suite's optima (floored at
/// 0), which is deterministic but may differ from the in-memory value by
/// rounding of the subtraction.
pub fn read_runs_csv(path: &Path, suite: &[ProblemInstance]) -> Result<RunTable> {
    let f_opt: BTreeMap<InstanceKey, f64> =
        suite.iter().map(|i| (i.key(), i.f_opt())).collect();
    let mut reader = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        if row.len() != 8 {
            return Err(malformed(path, format!("expected 8 columns, got {}", row.len())));
        }
        let class_id: usize = parse(path, "class_id", &row[0])?;
        let instance_id: usize = parse(path, "instance_id", &row[1])?;
        let algorithm = AlgorithmId::from_name(&row[2])
            .ok_or_else(|| malformed(path, format!("unknown algorithm {:?}", &row[2])))?;
        let key = InstanceKey {
            class_id,
            instance_id,
        };
        let base_f_opt = *f_opt
            .get(&key)
            .ok_or_else(|| malformed(path, format!("{key} not in suite")))?;
        let best_f: f64 = parse(path, "best_f", &row[5])?;
        let scale_factor: f64 = parse(path, "scale_factor", &row[7])?;
        let raw_gap = ((best_f - scale_factor * base_f_opt) / scale_factor).max(0.0);
        records.push(RunRecord {
            class_id,
            instance_id,
            algorithm,
            repetition: parse(path, "repetition", &row[3])?,
            seed: parse(path, "seed", &row[4])?,
            best_f,
            evals_used: parse(path, "evals_used", &row[6])?,
            scale_factor,
            raw_gap,
        });
    }
    Ok(RunTable::new(records))
}

// -------------------------------------------------------------- features

pub fn write_features_csv(path: &Path, table: &FeatureTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["class_id".to_string(), "instance_id".to_string()];
    header.extend(table.names.iter().cloned());
    w.write_record(&header)?;
    for (key, row) in table.rows() {
        let mut rec = vec![key.class_id.to_string(), key.instance_id.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv(path: &Path, tag: FeatureSet) -> Result<FeatureTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.len() < 3 || &header[0] != "class_id" || &header[1] != "instance_id" {
        return Err(malformed(path, "feature csv must start with class_id, instance_id"));
    }
    let names: Vec<String> = header.iter().skip(2).map(|s| s.to_string()).collect();
    let mut rows = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let key = InstanceKey {
            class_id: parse(path, "class_id", &row[0])?,
            instance_id: parse(path, "instance_id", &row[1])?,
        };
        let values: Result<Vec<f64>> = row
            .iter()
            .skip(2)
            .map(|s| parse::<f64>(path, "feature", s))
            .collect();
        rows.insert(key, values?);
    }
    FeatureTable::from_rows(tag, names, rows)
}

// --------------------------------------------------------------- targets

/// Long format: kind, class_id, instance_id, algorithm, target.
pub fn write_targets_csv(path: &Path, table: &TargetTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["kind", "class_id", "instance_id", "algorithm", "target"])?;
    for (key, row) in table.rows() {
        for algo in AlgorithmId::ALL {
            w.write_record([
                table.kind.name().to_string(),
                key.class_id.to_string(),
                key.instance_id.to_string(),
                algo.name().to_string(),
                row[algo.index()].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_targets_csv(path: &Path) -> Result<TargetTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut kind: Option<TargetKind> = None;
    let mut rows: BTreeMap<InstanceKey, [f64; AlgorithmId::COUNT]> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let row_kind = TargetKind::from_name(&row[0])
            .ok_or_else(|| malformed(path, format!("unknown target kind {:?}", &row[0])))?;
        match kind {
            None => kind = Some(row_kind),
            Some(k) if k != row_kind => {
                return Err(malformed(path, "mixed target kinds in one file"))
            }
            _ => {}
        }
        let key = InstanceKey {
            class_id: parse(path, "class_id", &row[1])?,
            instance_id: parse(path, "instance_id", &row[2])?,
        };
        let algo = AlgorithmId::from_name(&row[3])
            .ok_or_else(|| malformed(path, format!("unknown algorithm {:?}", &row[3])))?;
        rows.entry(key).or_insert([f64::NAN; AlgorithmId::COUNT])[algo.index()] =
            parse(path, "target", &row[4])?;
    }
    let kind = kind.ok_or_else(|| malformed(path, "empty target file"))?;
    let mut table = TargetTable::new(kind);
    for (key, row) in rows {
        if row.iter().any(|v| v.is_nan()) {
            return Err(malformed(path, format!("incomplete algorithms for {key}")));
        }
        table.insert(key, row);
    }
    Ok(table)
}

// ---------------------------------------------------------------- report

pub fn write_report_json(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<EvaluationReport> {
    let f = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(f)?)
}

/// Long-format per-fold metrics: protocol, fold, model, metric, value.
pub fn write_fold_metrics_csv(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["protocol", "fold", "model", "metric", "value"])?;
    for m in &report.fold_metrics {
        w.write_record([
            m.protocol.name().to_string(),
            m.fold.to_string(),
            m.model.name().to_string(),
            m.metric.name().to_string(),
            m.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plot data in the layout of the leakage figure: the per-split PRE dots
/// of every meta-model under both protocols.
pub fn write_plotdata_leakage(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["protocol", "fold", "model", "pre"])?;
    for m in &report.fold_metrics {
        if m.metric == MetricKind::Pre {
            w.write_record([
                m.protocol.name().to_string(),
                m.fold.to_string(),
                m.model.name().to_string(),
                m.value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Plot data in the layout of the rescaling figure: precision and rank
/// against f_scale for the rescaled instances.
pub fn write_plotdata_rescaling(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "class_id",
        "instance_id",
        "factor",
        "f_scale",
        "algorithm",
        "mean_precision",
        "mean_rank",
    ])?;
    for r in &report.scale_table {
        w.write_record([
            r.class_id.to_string(),
            r.instance_id.to_string(),
            r.factor.to_string(),
            r.f_scale.to_string(),
            r.algorithm.name().to_string(),
            r.mean_precision.to_string(),
            r.mean_rank.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plot data in the layout of the MSE-vs-PRE figure: the MSE panel for the
/// two precision models and the PRE panel for all four models.
pub fn write_plotdata_mse_pre(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["panel", "protocol", "fold", "model", "value"])?;
    for m in &report.fold_metrics {
        let panel = match m.metric {
            MetricKind::Mse => "mse",
            MetricKind::Pre => "pre",
        };
        if m.protocol == SplitKind::Lpo
            && matches!(
                m.model,
                MetaModelKind::MeanPrecision
                    | MetaModelKind::MeanRank
                    | MetaModelKind::RfPrecision
                    | MetaModelKind::RfRank
            )
        {
            w.write_record([
                panel.to_string(),
                m.protocol.name().to_string(),
                m.fold.to_string(),
                m.model.name().to_string(),
                m.value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Suite listing with a sampled objective-range estimate per instance.
pub fn write_suite_csv(path: &Path, rows: &[(InstanceKey, usize, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["class_id", "instance_id", "dim", "f_opt", "f_range_estimate"])?;
    for (key, dim, f_opt, range) in rows {
        w.write_record([
            key.class_id.to_string(),
            key.instance_id.to_string(),
            dim.to_string(),
            f_opt.to_string(),
            range.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::run_portfolio;
    use crate::suite::make_instance;
    use tempfile::tempdir;

    #[test]
    fn runs_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let suite: Vec<_> = (1..=2).map(|c| make_instance(c, 1, 5).unwrap()).collect();
        let table = run_portfolio(&suite, 200, 2, 1).unwrap();
        write_runs_csv(&path, &table).unwrap();
        let back = read_runs_csv(&path, &suite).unwrap();
        assert_eq!(back.len(), table.len());
        for (a, b) in table.records().iter().zip(back.records()) {
            assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.evals_used, b.evals_used);
            assert!((a.raw_gap - b.raw_gap).abs() <= 1e-9 * a.raw_gap.abs().max(1.0));
        }
        // header row present
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("class_id,instance_id,algorithm,"));
    }

    #[test]
    fn features_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let inst = make_instance(1, 1, 5).unwrap();
        let sample = crate::features::lhs_sample(&inst, 100, 3);
        let spec = crate::features::noninf_spec(5, 1);
        let fv = crate::features::noninf_features(&sample, &spec);
        let table =
            FeatureTable::from_vectors(vec![(inst.key(), fv)]).unwrap();
        write_features_csv(&path, &table).unwrap();
        let back = read_features_csv(&path, FeatureSet::NonInf).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn targets_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("targets.csv");
        let suite: Vec<_> = (1..=2).map(|c| make_instance(c, 1, 5).unwrap()).collect();
        let runs = run_portfolio(&suite, 200, 2, 1).unwrap();
        let targets = crate::metrics::build_targets(&runs, TargetKind::Rank).unwrap();
        write_targets_csv(&path, &targets).unwrap();
        let back = read_targets_csv(&path).unwrap();
        assert_eq!(back, targets);
    }

    #[test]
    fn malformed_target_file_is_reported_with_location() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("targets.csv");
        std::fs::write(&path, "kind,class_id,instance_id,algorithm,target\nbogus,1,1,GA,1.0\n")
            .unwrap();
        let err = read_targets_csv(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("targets.csv"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
    }
}
