//! Experiment harness for `conehull-core`: TOML manifests, seeded parallel
//! runs, oracle joins and CSV/JSON reports, plus the acceptance battery.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod verify;

use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat, ParamValue};
pub use error::{HarnessError, Result};
pub use report::{Report, Row, Status};
pub use verify::{verify_all, Preset, VerifyReport};

/// Runs `f` on a pool of `workers` threads, or the global pool for `None`.
/// Results do not depend on the worker count.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(HarnessError::Config("workers must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Validates and runs a configured experiment, writing the report to the
/// configured output path if there is one.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let outcome = with_workers(cfg.workers, || experiments::execute(cfg))?;
    let report = Report::new(outcome.rows);
    if let Some(path) = &cfg.output {
        report.save(cfg.format, path)?;
    }
    Ok(report)
}

/// Closed-form oracle values as a report.
pub fn closed_forms_table(d: usize, gamma: f64, c: f64, a: f64, b: f64) -> Result<Report> {
    Ok(Report::new(experiments::oracle_table(d, gamma, c, a, b)?))
}

/// Writes a gnuplot script next to a CSV report: `out.csv` gets `out.gp`.
pub fn write_gnuplot(report: &Report, csv_path: &Path) -> Result<()> {
    std::fs::write(csv_path.with_extension("gp"), report.gnuplot_script(csv_path))?;
    Ok(())
}
