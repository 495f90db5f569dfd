//! `nhqa`: sweeps and checks for non-Hermitian quantum annealing of the
//! transverse-field Ising chain, written as CSV with a JSON sidecar.

mod commands;
mod error;
mod output;
mod runspec;
mod sweep;

use clap::Parser;
use error::CliError;
use runspec::{Cli, RunSpec};
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

fn execute(job: &RunSpec) -> Result<(), CliError> {
    let start = Instant::now();
    let pool = match job.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {k} threads: {e}")))?,
        None => rayon::ThreadPoolBuilder::new().build().map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let threads = pool.current_num_threads();
    let report = pool.install(|| commands::run(job))?;
    let wall = start.elapsed().as_secs_f64();
    match &job.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            report.table.write_csv(std::fs::File::create(path)?)?;
            let meta = output::sidecar(job, &report.table, threads, wall);
            let mut text = serde_json::to_string_pretty(&meta).expect("plain JSON values");
            text.push('\n');
            std::fs::write(output::sidecar_path(path), text)?;
            eprintln!("wrote {} rows to {}", report.table.rows.len(), path.display());
        }
        None => report.table.write_csv(std::io::stdout().lock())?,
    }
    let mut err = std::io::stderr().lock();
    for line in &report.summary {
        let _ = writeln!(err, "{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = RunSpec::resolve(cli, std::env::var("NHQA_THREADS").ok()).and_then(|job| execute(&job));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nhqa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
