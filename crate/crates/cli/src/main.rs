//! Benchmark CLI: suite listing, portfolio runs, feature extraction,
//! target building, the two audits, and report rendering.

mod config;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use asbench_core::features::{
    class_feature, ela_features, lhs_sample, noninf_features, noninf_spec, scale_feature,
    FeatureSet, FeatureTable, FeatureVector,
};
use asbench_core::io;
use asbench_core::metrics::{build_targets, TargetKind};
use asbench_core::pipeline::PipelineParams;
use asbench_core::portfolio::run_portfolio;
use asbench_core::rng::{mix, tags};
use asbench_core::suite::{list_suite, InstanceKey};

use config::BenchConfig;
use pipeline::Orchestrator;

#[derive(Parser)]
#[command(
    name = "asbench",
    version,
    about = "Algorithm-selection benchmarking and evaluation audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SuiteArgs {
    /// Problem dimension.
    #[arg(long, default_value_t = 5)]
    dim: usize,
    /// Instances per class.
    #[arg(long, default_value_t = 15)]
    instances: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Problem suite inspection.
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
    /// Optimizer portfolio execution.
    Portfolio {
        #[command(subcommand)]
        cmd: PortfolioCmd,
    },
    /// Landscape feature extraction.
    Features {
        #[command(subcommand)]
        cmd: FeaturesCmd,
    },
    /// Meta-model target construction.
    Targets {
        #[command(subcommand)]
        cmd: TargetsCmd,
    },
    /// The two evaluation audits (cached, config-driven).
    Audit {
        #[command(subcommand)]
        cmd: AuditCmd,
    },
    /// Runs the full pipeline: both audits plus all artifacts.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fail instead of recomputing stages whose cache is stale.
        #[arg(long)]
        no_recompute: bool,
    },
    /// Renders report.json; --check exits nonzero on criterion failure.
    Report {
        /// Path to report.json.
        path: PathBuf,
        /// Evaluate the acceptance criteria and set the exit code.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Emits class_id, instance_id, dim, f_opt, f_range_estimate.
    List {
        #[command(flatten)]
        suite: SuiteArgs,
        /// Sample size for the range estimate.
        #[arg(long, default_value_t = 2000)]
        range_samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PortfolioCmd {
    /// Runs every algorithm on every instance.
    Run {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value_t = 1000)]
        budget_per_dim: usize,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FeaturesCmd {
    /// Extracts one feature set for the whole suite.
    Extract {
        #[command(flatten)]
        suite: SuiteArgs,
        /// One of: ela, noninf, class, scale.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 250)]
        samples_per_dim: usize,
        #[arg(long, default_value_t = asbench_core::features::ELA_FEATURE_COUNT)]
        noninf_count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TargetsCmd {
    /// Builds rank or precision targets from a runs CSV.
    Build {
        #[command(flatten)]
        suite: SuiteArgs,
        /// One of: rank, precision.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AuditCmd {
    /// Leave-instance-out leakage audit.
    Leakage {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        no_recompute: bool,
    },
    /// Scale-sensitive metric audit.
    Scale {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        no_recompute: bool,
    },
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<BenchConfig> {
    match path {
        Some(p) => BenchConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(BenchConfig::default()),
    }
}

fn suite_list(
    args: &SuiteArgs,
    range_samples: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> anyhow::Result<()> {
    let suite = list_suite(args.dim, args.instances)?;
    let rows: Vec<(InstanceKey, usize, f64, f64)> = suite
        .iter()
        .map(|inst| {
            let s = lhs_sample(
                inst,
                range_samples,
                mix(&[
                    seed,
                    tags::LHS,
                    inst.class_id() as u64,
                    inst.instance_id() as u64,
                ]),
            );
            let min = s.y_raw.iter().copied().fold(f64::INFINITY, f64::min);
            let max = s.y_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (inst.key(), inst.dim(), inst.f_opt(), max - min)
        })
        .collect();
    match out {
        Some(path) => io::write_suite_csv(path, &rows)?,
        None => {
            println!("class_id,instance_id,dim,f_opt,f_range_estimate");
            for (key, dim, f_opt, range) in rows {
                println!(
                    "{},{},{},{},{}",
                    key.class_id, key.instance_id, dim, f_opt, range
                );
            }
        }
    }
    Ok(())
}

fn features_extract(
    args: &SuiteArgs,
    set: &str,
    samples_per_dim: usize,
    noninf_count: usize,
    seed: u64,
    out: &PathBuf,
) -> anyhow::Result<()> {
    let set = FeatureSet::from_name(set)
        .ok_or_else(|| anyhow::anyhow!("unknown feature set {set:?} (ela|noninf|class|scale)"))?;
    let suite = list_suite(args.dim, args.instances)?;
    let params = PipelineParams {
        dim: args.dim,
        instances_per_class: args.instances,
        samples_per_dim,
        noninf_count,
        master_seed: seed,
        ..PipelineParams::default()
    };
    let spec = noninf_spec(noninf_count, seed);
    let vectors: Vec<(InstanceKey, FeatureVector)> = suite
        .iter()
        .map(|inst| {
            let fv = match set {
                FeatureSet::Class => class_feature(inst),
                _ => {
                    let sample =
                        lhs_sample(inst, params.sample_size(), params.lhs_seed(inst.key()));
                    match set {
                        FeatureSet::Ela => ela_features(&sample),
                        FeatureSet::NonInf => noninf_features(&sample, &spec),
                        FeatureSet::Scale => scale_feature(&sample),
                        FeatureSet::Class => unreachable!(),
                    }
                }
            };
            (inst.key(), fv)
        })
        .collect();
    let table = FeatureTable::from_vectors(vectors)?;
    io::write_features_csv(out, &table)?;
    println!("wrote {} rows to {}", table.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Suite { cmd } => match cmd {
            SuiteCmd::List {
                suite,
                range_samples,
                seed,
                out,
            } => {
                suite_list(&suite, range_samples, seed, &out)?;
            }
        },
        Command::Portfolio { cmd } => match cmd {
            PortfolioCmd::Run {
                suite,
                budget_per_dim,
                reps,
                seed,
                out,
            } => {
                let instances = list_suite(suite.dim, suite.instances)?;
                let table = run_portfolio(&instances, budget_per_dim * suite.dim, reps, seed)?;
                io::write_runs_csv(&out, &table)?;
                println!("wrote {} runs to {}", table.len(), out.display());
            }
        },
        Command::Features { cmd } => match cmd {
            FeaturesCmd::Extract {
                suite,
                set,
                samples_per_dim,
                noninf_count,
                seed,
                out,
            } => {
                features_extract(&suite, &set, samples_per_dim, noninf_count, seed, &out)?;
            }
        },
        Command::Targets { cmd } => match cmd {
            TargetsCmd::Build {
                suite,
                kind,
                runs,
                out,
            } => {
                let kind = TargetKind::from_name(&kind).ok_or_else(|| {
                    anyhow::anyhow!("unknown target kind {kind:?} (rank|precision)")
                })?;
                let instances = list_suite(suite.dim, suite.instances)?;
                let table = io::read_runs_csv(&runs, &instances)?;
                let targets = build_targets(&table, kind)?;
                io::write_targets_csv(&out, &targets)?;
                println!("wrote {} instances to {}", targets.len(), out.display());
            }
        },
        Command::Audit { cmd } => match cmd {
            AuditCmd::Leakage {
                config,
                no_recompute,
            } => {
                let cfg = load_config(&config)?;
                let mut orch = Orchestrator::new(cfg, no_recompute)?;
                let report = orch.audit_leakage()?;
                println!(
                    "leakage audit complete: {} fold metrics, outputs in {}",
                    report.fold_metrics.len(),
                    orch.out_dir.display()
                );
            }
            AuditCmd::Scale {
                config,
                no_recompute,
            } => {
                let cfg = load_config(&config)?;
                let mut orch = Orchestrator::new(cfg, no_recompute)?;
                let report = orch.audit_scale()?;
                println!(
                    "scale audit complete: {} fold metrics, outputs in {}",
                    report.fold_metrics.len(),
                    orch.out_dir.display()
                );
            }
        },
        Command::Run {
            config,
            no_recompute,
        } => {
            let cfg = load_config(&config)?;
            let mut orch = Orchestrator::new(cfg, no_recompute)?;
            orch.audit_leakage()?;
            orch.audit_scale()?;
            println!("pipeline complete: outputs in {}", orch.out_dir.display());
        }
        Command::Report { path, check } => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let combined: pipeline::CombinedReport = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            report::print_report(&combined);
            if check {
                match report::print_checks(&combined) {
                    Some(outcomes) if outcomes.iter().all(|c| c.passed) => {}
                    _ => return Ok(ExitCode::from(2)),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
