use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orgsim::engine::{EventOrder, LearningScope};
use orgsim::metrics::{format_fixed, SignificanceTest};
use orgsim_cli::{execute, parse_config, preset, structure_from_file, CliError, Overrides, Preset, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    LearnAfterDecision,
    LearnFirst,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    MembersOnly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TestArg {
    Welch,
    Mannwhitney,
}

/// Runs learning/group-adaptation experiment grids on NK landscapes.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Built-in scenario grid. Defaults to paper-main, or custom with --config.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for every scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, short = 'o', default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write per-replication traces and auction logs.
    #[arg(long)]
    emit_traces: bool,
    /// Write an SVG chart of each scenario's performance series.
    #[arg(long)]
    emit_svg: bool,
    /// Replace every scenario's structure with this interdependence matrix.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    event_order: Option<OrderArg>,
    #[arg(long, value_enum)]
    learning_scope: Option<ScopeArg>,
    /// Significance test for the star markers.
    #[arg(long, value_enum, default_value = "welch")]
    test: TestArg,
    /// Override the number of replications.
    #[arg(long)]
    replications: Option<usize>,
    /// Override the number of periods.
    #[arg(long)]
    horizon: Option<usize>,
}

fn run(args: Args) -> Result<(), CliError> {
    let scenarios = match (args.preset, &args.config) {
        (Some(p), Some(_)) if p != Preset::Custom => {
            return Err(CliError::Config("--config can only be combined with --preset custom".into()))
        }
        (_, Some(path)) => parse_config(path)?,
        (Some(Preset::Custom), None) => return Err(CliError::Config("--preset custom needs --config".into())),
        (p, None) => preset(p.unwrap_or(Preset::PaperMain)),
    };
    let overrides = Overrides {
        seed: args.seed,
        structure: args.matrix_file.as_deref().map(structure_from_file).transpose()?,
        event_order: args.event_order.map(|o| match o {
            OrderArg::LearnAfterDecision => EventOrder::LearnAfterDecision,
            OrderArg::LearnFirst => EventOrder::LearnFirst,
        }),
        learning_scope: args.learning_scope.map(|s| match s {
            ScopeArg::All => LearningScope::All,
            ScopeArg::MembersOnly => LearningScope::MembersOnly,
        }),
        replications: args.replications,
        horizon: args.horizon,
    };
    let scenarios = overrides.apply(scenarios)?;
    let opts = RunOptions {
        out: args.out,
        workers: args.workers,
        emit_traces: args.emit_traces,
        emit_svg: args.emit_svg,
        test: match args.test {
            TestArg::Welch => SignificanceTest::Welch,
            TestArg::Mannwhitney => SignificanceTest::MannWhitney,
        },
    };
    let reports = execute(&scenarios, &opts, |line| eprintln!("{line}"))?;
    println!("scenario,mean,final");
    for r in &reports {
        println!("{},{},{}", r.label, format_fixed(r.mean_performance, 4), format_fixed(r.final_performance, 4));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simulate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
