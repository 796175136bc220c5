use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conehull::closed_forms_table;
use conehull::{
    run, verify_all, with_workers, write_gnuplot, ExperimentConfig, ExperimentKind, HarnessError,
    OutputFormat, Preset, Report, Result,
};
use conehull_core::conic::{conic_profile, Cone};
use conehull_core::geometry::f_vector;
use conehull_core::rng::seeded;
use conehull_core::samplers::{sample_cone, sample_poisson_hull, sample_symmetric_hull, PoissonParams};

#[derive(Parser)]
#[command(name = "conehull", version, about = "Random cones and power-law Poisson hulls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed (default 0, or the manifest's seed).
    #[arg(long, env = "CONEHULL_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Also write a gnuplot script next to the CSV output.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a certified Poisson hull and print it as JSON.
    SampleHull {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Hull of the points and their mirror images.
        #[arg(long)]
        symmetric: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a random cone and print its generators and section f-vector.
    Cone {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form oracle values.
    Table {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment from a TOML manifest and/or flags; flags win.
    Estimate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        /// Comma-separated generator counts for cone-limit.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<f64>>,
        #[arg(long)]
        replicates: Option<usize>,
        /// Record wall-clock times in the report.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Conic intrinsic volumes and Grassmann angles of one random cone, as JSON.
    Conic {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the Grassmann-angle/face-count identity.
    Buchta {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance battery.
    Verify {
        /// fast, full or smoke.
        #[arg(long, default_value = "fast")]
        preset: String,
        /// Test fixture: replace the oracle of `check/target` by a value.
        #[arg(long, hide = true, value_parser = parse_override)]
        override_oracle: Vec<(String, f64)>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_override(s: &str) -> std::result::Result<(String, f64), String> {
    let (id, v) = s.split_once('=').ok_or("expected ID=VALUE")?;
    Ok((id.to_string(), v.parse().map_err(|e| format!("{e}"))?))
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

fn emit_json<T: serde::Serialize>(value: &T, common: &Common) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => writeln!(std::io::stdout(), "{text}")?,
    }
    Ok(())
}

fn emit_report(report: &Report, common: &Common) -> Result<()> {
    let format: OutputFormat = common.format.parse()?;
    match &common.out {
        Some(path) => {
            report.save(format, path)?;
            if common.gnuplot && format == OutputFormat::Csv {
                write_gnuplot(report, path)?;
            }
        }
        None => {
            if common.gnuplot {
                return Err(HarnessError::Config("--gnuplot needs --out".into()));
            }
            report.write(format, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

/// Exit code 0 on success, 1 if some report row failed, 2 on bad
/// configuration.
fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::SampleHull { d, gamma, c, symmetric, common } => {
            let params = PoissonParams::new(d, gamma, c)?;
            let mut rng = seeded(common.seed());
            let hull = if symmetric {
                sample_symmetric_hull(&params, &mut rng)?
            } else {
                sample_poisson_hull(&params, &mut rng)?.1
            };
            emit_json(&hull.to_document(), &common)?;
            Ok(0)
        }
        Command::Cone { d, n, common } => {
            let sample = sample_cone(d, n, &mut seeded(common.seed()))?;
            let f = f_vector(&sample.section_hull()?)?;
            emit_json(&serde_json::json!({ "sample": sample, "section_f_vector": f.counts }), &common)?;
            Ok(0)
        }
        Command::Table { d, gamma, c, a, b, common } => {
            let report = closed_forms_table(d, gamma, c, a, b)?;
            emit_report(&report, &common)?;
            Ok(0)
        }
        Command::Estimate {
            config,
            kind,
            d,
            gamma,
            c,
            n,
            a,
            b,
            k,
            n_grid,
            replicates,
            timing,
            common,
        } => {
            let mut cfg = match (&config, &kind) {
                (Some(path), _) => ExperimentConfig::load(path)?,
                (None, Some(kind)) => ExperimentConfig::new(kind.parse::<ExperimentKind>()?),
                (None, None) => return Err(HarnessError::Config("need --config or --kind".into())),
            };
            if let (Some(_), Some(kind)) = (&config, &kind) {
                cfg.kind = kind.parse()?;
            }
            for (key, value) in [("d", d), ("gamma", gamma), ("c", c), ("n", n), ("a", a), ("b", b), ("k", k)] {
                if let Some(v) = value {
                    cfg = cfg.with_param(key, v);
                }
            }
            if let Some(grid) = n_grid {
                cfg = cfg.with_list("n_grid", grid);
            }
            if let Some(r) = replicates {
                cfg.replicates = r;
            }
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if common.workers.is_some() {
                cfg.workers = common.workers;
            }
            cfg.timing |= timing;
            cfg.format = common.format.parse()?;
            cfg.output = None;
            let report = run(&cfg)?;
            emit_report(&report, &common)?;
            Ok(report.exit_code())
        }
        Command::Conic { d, n, replicates, common } => {
            let mut rng = seeded(common.seed());
            let cone = Cone::from_sample(&sample_cone(d, n, &mut rng)?)?;
            let profile = with_workers(common.workers, || conic_profile(&cone, replicates, &mut rng))??;
            emit_json(&profile, &common)?;
            Ok(0)
        }
        Command::Buchta { d, n, k, replicates, common } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Buchta)
                .with_param("d", d as f64)
                .with_param("n", n as f64)
                .with_param("k", k as f64);
            cfg.replicates = replicates;
            cfg.seed = common.seed();
            cfg.workers = common.workers;
            let report = run(&cfg)?;
            emit_report(&report, &common)?;
            Ok(report.exit_code())
        }
        Command::Verify { preset, override_oracle, common } => {
            let mut p = Preset::by_name(&preset)
                .ok_or_else(|| HarnessError::Config(format!("unknown preset `{preset}`")))?;
            if let Some(seed) = common.seed {
                p.seed = seed;
            }
            for (id, v) in override_oracle {
                p = p.with_override(&id, v);
            }
            let result = with_workers(common.workers, || verify_all(&p))?;
            for check in &result.checks {
                let status = if check.passed() { "pass" } else { "FAIL" };
                eprintln!("criterion {:>2}  {:<26} {status}", check.criterion, check.id);
            }
            emit_report(&result.to_report(), &common)?;
            Ok(result.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                HarnessError::Core(conehull_core::Error::InvalidParams(_))
                | HarnessError::Core(conehull_core::Error::InvalidK { .. }) => 2,
                _ => e.exit_code(),
            };
            ExitCode::from(code as u8)
        }
    }
}
