use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spin_manifold::commands::{self, Table, VerifyOptions};
use spin_manifold::report::{report_json, report_table};
use spin_manifold::{CliError, OutputFormat, Result, RunConfig};

/// Geometry and evolution speed of spin-s clusters under long-range zz Ising coupling.
#[derive(Parser)]
#[command(name = "spin-manifold", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar curvature against theta (`theta,R`).
    Curvature,
    /// Speed of evolution against theta (`theta,v`).
    Speed,
    /// Scalar curvature against speed on both branches (`v,R,branch`).
    CurvatureVsSpeed,
    /// Run the verification suite; exits 1 if any check fails.
    Verify {
        /// Comma-separated check categories to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Replace every tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Field strength minimising the speed for the configured state and direction.
    FieldOptimize {
        /// Also scan field directions at fixed h/J for the slowest and fastest.
        #[arg(long)]
        scan_direction: bool,
    },
}

#[derive(Args)]
struct Options {
    /// Flat JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named figure recipe, applied beneath --config.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    two_s: Option<u32>,
    /// Coupling in Hz.
    #[arg(long, global = true, allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    h_over_j: Option<f64>,
    #[arg(long, global = true)]
    theta_prime: Option<f64>,
    #[arg(long, global = true)]
    phi_prime: Option<f64>,
    /// Exact h/J as P/Q.
    #[arg(long, global = true, allow_hyphen_values = true)]
    ratio: Option<String>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, global = true)]
    theta_min: Option<f64>,
    #[arg(long, global = true)]
    theta_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

impl Options {
    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg = cfg.overlay(&RunConfig::from_file(path)?);
        }
        let flags = RunConfig {
            n: self.n,
            two_s: self.two_s,
            j: self.j,
            gamma: self.gamma,
            h_over_j: self.h_over_j,
            theta_prime: self.theta_prime,
            phi_prime: self.phi_prime,
            ratio: self.ratio.clone(),
            theta: self.theta,
            phi: self.phi,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
            samples: self.samples,
            out: self.out.clone(),
            format: self.format,
            ..Default::default()
        };
        Ok(cfg.overlay(&flags))
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_table(table: &Table, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    for note in &table.notes {
        eprintln!("note: {note}");
    }
    let text = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json())?;
            s.push('\n');
            s
        }
    };
    emit(&text, out)
}

/// `Ok(false)` means a verification failure.
fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.options.run_config()?;
    match &cli.command {
        Command::Verify { only, tol } => {
            let report = commands::cmd_verify(
                &cfg,
                &VerifyOptions {
                    only: only.clone(),
                    tolerance: *tol,
                },
            )?;
            let json = report_json(&report);
            if let Some(path) = &cfg.out {
                std::fs::write(path, &json)?;
            }
            match cfg.format.unwrap_or_default() {
                OutputFormat::Json if cfg.out.is_none() => emit(&json, None)?,
                _ => emit(&report_table(&report), None)?,
            }
            Ok(report.pass())
        }
        command => {
            let res = cfg.resolve()?;
            let out = res.out.as_deref();
            match command {
                Command::Curvature => emit_table(&commands::cmd_curvature(&res)?, res.format, out)?,
                Command::Speed => emit_table(&commands::cmd_speed(&res)?, res.format, out)?,
                Command::CurvatureVsSpeed => emit_table(&commands::cmd_curvature_vs_speed(&res)?, res.format, out)?,
                Command::FieldOptimize { scan_direction } => {
                    let value = commands::cmd_field_optimize(&res, *scan_direction)?;
                    let mut text = serde_json::to_string_pretty(&value)?;
                    text.push('\n');
                    emit(&text, out)?;
                }
                Command::Verify { .. } => unreachable!("handled above"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Model(spin_manifold_core::Error::DegenerateDirection) = e {
                eprintln!("the field direction has no component transverse to the state");
            }
            ExitCode::from(2)
        }
    }
}
