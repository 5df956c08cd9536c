//! Runs a scenario list and writes everything it produces.
//!
//! Layout under the output directory:
//!
//! - `summary.csv`, one row per scenario
//! - `table2.csv` .. `table5.csv` and `significance.csv`, when the scenarios
//!   cover complete learning x composition grids
//! - `series/<label>.csv`, mean normalized performance per period
//! - `<label>/trace.csv` and `<label>/auctions.csv` with `emit_traces`
//! - `<label>/performance.svg` with `emit_svg`

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use orgsim::auction::AuctionRecord;
use orgsim::engine::{run_replication_observed, Runner, Scenario};
use orgsim::metrics::{aggregate, series_svg, write_series, write_summary, write_tables, ScenarioReport, SignificanceTest};
use orgsim::Error;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// 0 uses the available parallelism.
    pub workers: usize,
    pub emit_traces: bool,
    pub emit_svg: bool,
    pub test: SignificanceTest,
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Run(Error::Io { path: path.display().to_string(), message: e.to_string() })
}

fn run_traced(runner: &Runner, scenario: &Scenario, dir: &Path) -> Result<ScenarioReport, CliError> {
    let runs = runner.map_replications(scenario, |s, r| {
        let mut auctions: Vec<AuctionRecord> = Vec::new();
        let mut flags = Vec::with_capacity(s.horizon);
        let trace = run_replication_observed(s, r, |record, _| {
            flags.push(record.auction.is_some());
            if let Some(group) = &record.auction {
                auctions.extend(group.records());
            }
        })?;
        Ok((trace, flags, auctions))
    })?;

    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let trace_path = dir.join("trace.csv");
    let auction_path = dir.join("auctions.csv");
    let write = || -> std::io::Result<()> {
        let mut t = BufWriter::new(File::create(&trace_path)?);
        let mut a = BufWriter::new(File::create(&auction_path)?);
        writeln!(t, "replication,period,raw_performance,normalized_performance,auction_flag")?;
        writeln!(a, "replication,period,slot,winner,winning_bid,price")?;
        for (trace, flags, auctions) in &runs {
            for (i, (raw, norm)) in trace.raw.iter().zip(&trace.normalized).enumerate() {
                writeln!(t, "{},{},{raw:.10},{norm:.10},{}", trace.replication, i + 1, u8::from(flags[i]))?;
            }
            for rec in auctions {
                writeln!(
                    a,
                    "{},{},{},{},{:.10},{:.10}",
                    trace.replication, rec.period, rec.slot, rec.winner, rec.winning_bid, rec.price
                )?;
            }
        }
        t.flush()?;
        a.flush()
    };
    write().map_err(|e| io_error(dir, e))?;
    let traces: Vec<_> = runs.into_iter().map(|(trace, _, _)| trace).collect();
    Ok(aggregate(scenario.clone(), &traces)?)
}

/// Runs every scenario and writes the artifacts. `progress` receives one
/// line per finished scenario and notes about skipped outputs.
pub fn execute<F>(scenarios: &[Scenario], opts: &RunOptions, mut progress: F) -> Result<Vec<ScenarioReport>, CliError>
where
    F: FnMut(&str),
{
    if scenarios.is_empty() {
        return Err(CliError::Config("no scenarios to run".into()));
    }
    let runner = Runner::new(opts.workers)?;
    fs::create_dir_all(&opts.out).map_err(|e| io_error(&opts.out, e))?;

    let mut reports = Vec::with_capacity(scenarios.len());
    for (i, scenario) in scenarios.iter().enumerate() {
        let dir = opts.out.join(scenario.label());
        let report = if opts.emit_traces {
            run_traced(&runner, scenario, &dir)?
        } else {
            runner.run_scenario(scenario)?
        };
        if opts.emit_svg {
            fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
            let path = dir.join("performance.svg");
            fs::write(&path, series_svg(&report)).map_err(|e| io_error(&path, e))?;
        }
        progress(&format!(
            "[{}/{}] {} mean {:.4} final {:.4}",
            i + 1,
            scenarios.len(),
            report.label,
            report.mean_performance,
            report.final_performance
        ));
        reports.push(report);
    }

    write_summary(&reports, &opts.out)?;
    write_series(&reports, &opts.out)?;
    match write_tables(&reports, &opts.out, opts.test) {
        Ok(_) => {}
        Err(Error::IncompleteGrid(why)) => progress(&format!("tables skipped: {why}")),
        Err(e) => return Err(e.into()),
    }
    Ok(reports)
}
