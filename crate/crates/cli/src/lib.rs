//! Command-line front end: dataset ingestion, exact distances, index build
//! and query, Monte-Carlo probes, workload generation and timing.

pub mod args;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod probe;

use std::io::Write;

use args::{Cli, Command};
use error::Result;

/// Exit status of a probe whose claim was not confirmed.
pub const PROBE_FAILED: u8 = 5;

/// Runs a parsed command, writing results to `out`. Returns the exit
/// status of a command that completed.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Dist { file, id1, id2, kind, w } => commands::dist(out, &file, &id1, &id2, kind, w)?,
        Command::Build { file, scheme, dim, seed, out: path } => {
            commands::build(out, &file, &scheme, dim, seed, &path)?
        }
        Command::Query { index, queries } => commands::query(out, &index, &queries)?,
        Command::Probe { scheme, bound, p, q, generate, m, dim, trials, seed } => {
            if p.is_none() && !generate {
                return Err(error::CliError::Input("give --p and --q, or --generate".into()));
            }
            let report = probe::probe(&scheme, bound, p.as_deref(), q.as_deref(), m, dim, trials, seed)?;
            let json = serde_json::to_string(&report).map_err(|e| error::CliError::Input(e.to_string()))?;
            writeln!(out, "{json}")?;
            if !report.passed() {
                return Ok(PROBE_FAILED);
            }
        }
        Command::Gen { n, m, d, planted_r, far_cr, spread, seed, out: path, query_out } => {
            commands::gen(out, n, m, d, planted_r, far_cr, spread, seed, path.as_deref(), query_out.as_deref())?
        }
        Command::Bench { n, m, d, r, queries, seed } => commands::bench(out, n, m, d, r, queries, seed)?,
    }
    Ok(0)
}
