//! Report rows and their CSV/JSON serializations.

use std::fmt;
use std::io::Write;
use std::path::Path;

use conehull_core::closed_forms::OracleValue;
use conehull_core::stats::FitTest;
use conehull_core::Estimate;
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// z-threshold of statistical rows.
pub const Z_PASS: f64 = conehull_core::tolerances::Z_PASS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Only for rows without an oracle.
    Info,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub target_id: String,
    pub params: String,
    /// Blank on error rows.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub oracle: OracleValue,
    pub z_score: Option<f64>,
    pub p_value: Option<f64>,
    /// `|z|` bound for statistical rows; `None` for exact or fit rows.
    pub threshold: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub wall_time_ms: Option<u64>,
    pub status: Status,
    /// `heavy-tail`, an error message, or a note.
    pub note: String,
}

impl Row {
    fn base(target_id: &str, params: &str) -> Row {
        Row {
            target_id: target_id.to_string(),
            params: params.to_string(),
            mean: None,
            stderr: None,
            oracle: OracleValue::Unknown,
            z_score: None,
            p_value: None,
            threshold: None,
            replicates: 0,
            seed: 0,
            wall_time_ms: None,
            status: Status::Info,
            note: String::new(),
        }
    }

    /// Monte Carlo estimate against an oracle; passes iff `|z| <= threshold`.
    /// An infinite oracle never passes a finite mean.
    pub fn statistical(params: &str, est: &Estimate, oracle: OracleValue, threshold: f64) -> Row {
        let mut row = Row::base(&est.target_id, params);
        row.mean = Some(est.mean);
        row.stderr = Some(est.stderr);
        row.replicates = est.n_replicates;
        row.seed = est.seed;
        row.threshold = Some(threshold);
        row.status = match oracle {
            OracleValue::Finite(o) => {
                let z = est.z_score(o);
                row.z_score = Some(z);
                if z.abs() <= threshold { Status::Pass } else { Status::Fail }
            }
            OracleValue::Infinite => Status::Fail,
            OracleValue::Unknown => Status::Info,
        };
        row.oracle = oracle;
        row
    }

    /// Two independent estimates of the same quantity; the second is
    /// reported as the oracle.
    pub fn paired(params: &str, target_id: &str, lhs: &Estimate, rhs: &Estimate, threshold: f64) -> Row {
        let mut row = Row::base(target_id, params);
        let z = lhs.z_difference(rhs);
        row.mean = Some(lhs.mean);
        row.stderr = Some(lhs.stderr.hypot(rhs.stderr));
        row.oracle = OracleValue::Finite(rhs.mean);
        row.z_score = Some(z);
        row.threshold = Some(threshold);
        row.replicates = lhs.n_replicates.min(rhs.n_replicates);
        row.seed = lhs.seed;
        row.status = if z.abs() <= threshold { Status::Pass } else { Status::Fail };
        row
    }

    /// A closed-form value on its own.
    pub fn oracle(params: &str, target_id: &str, oracle: OracleValue) -> Row {
        let mut row = Row::base(target_id, params);
        row.oracle = oracle;
        row
    }

    /// Deterministic value compared with `expected` to `tol` absolute.
    pub fn exact(params: &str, target_id: &str, value: f64, expected: f64, tol: f64) -> Row {
        let mut row = Row::base(target_id, params);
        row.mean = Some(value);
        row.stderr = Some(0.0);
        row.oracle = OracleValue::Finite(expected);
        row.status = if (value - expected).abs() <= tol { Status::Pass } else { Status::Fail };
        row
    }

    /// Boolean check; `failures` out of `checked` cases disagreed.
    pub fn count_check(params: &str, target_id: &str, failures: usize, checked: usize) -> Row {
        let mut row = Row::exact(params, target_id, failures as f64, 0.0, 0.0);
        row.replicates = checked;
        row
    }

    /// Goodness-of-fit test at significance `alpha`.
    pub fn fit(params: &str, target_id: &str, test: &FitTest, draws: usize, seed: u64, alpha: f64) -> Row {
        let mut row = Row::base(target_id, params);
        row.mean = Some(test.statistic);
        row.stderr = Some(0.0);
        row.p_value = Some(test.p_value);
        row.replicates = draws;
        row.seed = seed;
        row.status = if test.passes(alpha) { Status::Pass } else { Status::Fail };
        row.note = format!("alpha={alpha}");
        row
    }

    pub fn error(params: &str, target_id: &str, err: &dyn fmt::Display) -> Row {
        let mut row = Row::base(target_id, params);
        row.status = Status::Error;
        row.note = err.to_string();
        row
    }

    pub fn with_note(mut self, note: &str) -> Row {
        if !note.is_empty() {
            if !self.note.is_empty() {
                self.note.push(' ');
            }
            self.note.push_str(note);
        }
        self
    }

    pub fn with_oracle(mut self, oracle: OracleValue) -> Row {
        // Rows without a threshold are exact comparisons.
        let t = self.threshold.unwrap_or(0.0);
        if let (OracleValue::Finite(o), Some(m), Some(s)) = (oracle, self.mean, self.stderr) {
            let est = Estimate { mean: m, stderr: s, n_replicates: self.replicates, seed: self.seed, target_id: String::new() };
            let z = est.z_score(o);
            self.z_score = Some(z);
            self.status = if z.abs() <= t { Status::Pass } else { Status::Fail };
        }
        self.oracle = oracle;
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Info)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub rows: Vec<Row>,
}

const CSV_HEADER: [&str; 13] = [
    "target_id",
    "params",
    "mean",
    "stderr",
    "oracle",
    "z_score",
    "p_value",
    "threshold",
    "replicates",
    "seed",
    "wall_time_ms",
    "status",
    "note",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Report {
    pub fn new(rows: Vec<Row>) -> Self {
        Report { schema_version: SCHEMA_VERSION, rows }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }

    /// 0 if every row passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.target_id.clone(),
                r.params.clone(),
                opt(r.mean),
                opt(r.stderr),
                r.oracle.to_string(),
                opt(r.z_score),
                opt(r.p_value),
                opt(r.threshold),
                r.replicates.to_string(),
                r.seed.to_string(),
                opt(r.wall_time_ms),
                r.status.to_string(),
                r.note.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    pub fn save(&self, format: OutputFormat, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(format, file)
    }

    /// Gnuplot script plotting mean with error bars against the oracle for
    /// every row of the CSV at `csv_path`.
    pub fn gnuplot_script(&self, csv_path: &Path) -> String {
        format!(
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set xtics rotate by 45 right\n\
             set ylabel 'value'\n\
             plot '{0}' using 0:3:4:xtic(1) with yerrorbars title 'mean +- stderr', \\\n\
             \x20    '{0}' using 0:(column(5) eq 'unknown' ? NaN : $5) with points pt 7 title 'oracle'\n",
            csv_path.display()
        )
    }
}
