use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Matrix size of the underlying algebra.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Positive part of the signature; defaults to n - q.
    #[arg(long)]
    pub p: Option<usize>,
    /// Negative part of the signature.
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Output file (verify, evolve) or directory (tables). Defaults to stdout
    /// or the current directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run independent suites on separate threads.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub signature: (usize, usize),
    pub seed: u64,
    pub tol: f64,
    pub hbar: f64,
    pub trials: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs, format: Format) -> Result<Self, String> {
        if a.n == 0 {
            return Err("--n must be at least 1".into());
        }
        if a.q > a.n {
            return Err(format!("--q {} exceeds --n {}", a.q, a.n));
        }
        let p = a.p.unwrap_or(a.n - a.q);
        if p + a.q != a.n {
            return Err(format!("signature ({p}, {}) does not add up to n = {}", a.q, a.n));
        }
        if !(a.tol > 0.0 && a.tol.is_finite()) {
            return Err("--tol must be positive".into());
        }
        if a.trials == 0 {
            return Err("--trials must be at least 1".into());
        }
        if !(a.hbar.is_finite() && a.hbar != 0.0) {
            return Err("--hbar must be finite and nonzero".into());
        }
        Ok(RunConfig {
            n: a.n,
            signature: (p, a.q),
            seed: a.seed,
            tol: a.tol,
            hbar: a.hbar,
            trials: a.trials,
            output_path: a.output.clone(),
            format,
        })
    }
}
