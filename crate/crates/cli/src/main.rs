//! `jlgeom`: verification suites, octahedral tables and evolution runs.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage or
//! configuration errors.

mod config;
mod evolve;
mod report;
mod suites;
mod tables;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{CommonArgs, Format, RunConfig};
use evolve::{EvolveConfig, HamiltonianSource};
use report::VerifyReport;
use suites::Suite;

#[derive(Parser)]
#[command(name = "jlgeom", version, about = "Jordan-Lie algebras, projective lines and geometric time evolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Markdown,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
    },
    /// Write the derived octahedral table and the reference-table audit.
    Tables {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evolve an observable and a state in the three pictures.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, value_enum, default_value = "random")]
        hamiltonian: HamiltonianSource,
        /// JSON matrix `{rows, cols, re, im}` holding the Hamiltonian at the foot.
        #[arg(long)]
        hamiltonian_file: Option<PathBuf>,
        #[arg(long = "out", value_enum, default_value = "csv")]
        out: DataFormat,
    },
}

enum Failure {
    Check(String),
    Config(String),
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn verify(suite: Suite, common: &CommonArgs, format: ReportFormat) -> Result<(), Failure> {
    let fmt = match format {
        ReportFormat::Json => Format::Json,
        ReportFormat::Markdown => Format::Markdown,
    };
    let cfg = RunConfig::from_args(common, fmt).map_err(Failure::Config)?;
    let checks = suites::run(suite, &cfg, common.parallel).map_err(|e| Failure::Check(format!("suite aborted: {e}")))?;
    let name = suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let report = VerifyReport::new(&name, cfg, checks);
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&report).map_err(|e| Failure::Config(e.to_string()))? + "\n",
        ReportFormat::Markdown => report.to_markdown(),
    };
    write_output(common.output.as_deref(), &text)?;
    match report.first_failure() {
        Some(c) => Err(Failure::Check(format!(
            "check failed: {} / {} (measured {:.3e}, threshold {:.1e})",
            c.suite, c.name, c.measured, c.threshold
        ))),
        None => Ok(()),
    }
}

fn tables(common: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(common, Format::Markdown).map_err(Failure::Config)?;
    let dir = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from("."));
    let w = tables::emit(cfg.n, cfg.seed, &dir).map_err(Failure::Config)?;
    eprintln!(
        "wrote {} and {} (reference table audit: {})",
        w.markdown.display(),
        w.json.display(),
        if w.audit_pass { "consistent" } else { "discrepancies listed" }
    );
    Ok(())
}

fn run_evolve(cfg: EvolveConfig, out: DataFormat) -> Result<(), Failure> {
    let path = cfg.run.output_path.clone();
    let result = evolve::run(cfg).map_err(Failure::Config)?;
    let text = match out {
        DataFormat::Csv => result.to_csv(),
        DataFormat::Json => result.to_json(),
    }
    .map_err(Failure::Config)?;
    write_output(path.as_deref(), &text)?;
    match result.summary.failure {
        Some(f) => Err(Failure::Check(format!("check failed: {f}"))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify { suite, common, format } => verify(suite, &common, format),
        Command::Tables { common } => tables(&common),
        Command::Evolve {
            common,
            t_max,
            steps,
            hamiltonian,
            hamiltonian_file,
            out,
        } => {
            let fmt = match out {
                DataFormat::Csv => Format::Csv,
                DataFormat::Json => Format::Json,
            };
            match RunConfig::from_args(&common, fmt) {
                Ok(run) => run_evolve(
                    EvolveConfig {
                        run,
                        t_max,
                        steps,
                        hamiltonian,
                        hamiltonian_file,
                    },
                    out,
                ),
                Err(e) => Err(Failure::Config(e)),
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
