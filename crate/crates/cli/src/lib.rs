//! Command-line front end for the damped-oscillator toolkit.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use dho_core::discretize::{MatrixForm, Stencil};
use dho_core::weyl::{parse_rational, Rational};

use commands::classical::ClassicalOptions;
use commands::evolve::InitialState;
use config::{Overrides, RunConfig};
pub use error::CliError;
pub use output::{Outcome, Status};

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "dho", version, about = "Damped harmonic oscillator: symbolic identities, spectra and dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// key = value configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "R", value_parser = rational)]
    pub lambda: Option<Rational>,
    #[arg(long, global = true, value_name = "R", value_parser = rational)]
    pub omega: Option<Rational>,
    #[arg(long = "grid-n", global = true, value_name = "INT")]
    pub grid_n: Option<usize>,
    #[arg(long = "grid-l", global = true, value_name = "R", value_parser = rational)]
    pub grid_l: Option<Rational>,
    /// eq2 | eq5
    #[arg(long, global = true, value_parser = |s: &str| s.parse::<MatrixForm>())]
    pub form: Option<MatrixForm>,
    /// second | fourth
    #[arg(long, global = true, value_parser = |s: &str| s.parse::<Stencil>())]
    pub stencil: Option<Stencil>,
    #[arg(long, global = true, value_name = "INT")]
    pub levels: Option<usize>,
    #[arg(long, global = true, value_name = "R", value_parser = rational)]
    pub dt: Option<Rational>,
    #[arg(long, global = true, value_name = "INT")]
    pub steps: Option<usize>,
    /// Directory for reports and datasets
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout (human output goes to stderr)
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact operator identities at the configured and at random parameters
    VerifyIdentities {
        #[arg(long, default_value_t = commands::identities::DEFAULT_RANDOM_SETS)]
        random_sets: usize,
        #[arg(long, default_value_t = commands::identities::DEFAULT_SEED)]
        seed: u64,
    },
    /// Discretize, diagonalize and match the low-lying levels
    Spectrum {
        /// Loop over lambda = a, a+step, ..., b
        #[arg(long, value_name = "A:B:STEP")]
        lambda_sweep: Option<String>,
        /// Also write the assembled matrix
        #[arg(long)]
        save_matrix: bool,
    },
    /// Matrix identities, form equivalence and eigenfunction residuals
    GaugeCheck,
    /// Propagate an eigenstate and fit the norm growth rate
    Evolve {
        /// Level `n` or superposition `a+b`
        #[arg(long, default_value = "0")]
        state: InitialState,
    },
    /// Classical trajectory and the quantum level spacing
    Classical {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        q0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Exact equality of two expressions: check-op <expr> == <expr>
    CheckOp {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        equation: Vec<String>,
    },
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            lambda: self.lambda.clone(),
            omega: self.omega.clone(),
            half_width: self.grid_l.clone(),
            points: self.grid_n,
            levels: self.levels,
            dt: self.dt.clone(),
            steps: self.steps,
            form: self.form,
            stencil: self.stencil,
            out: self.out.clone(),
        }
    }

    /// File values (or defaults), then flag overrides, then validation.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(self.overrides())?;
        Ok(cfg)
    }
}

/// Runs one subcommand.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.global.resolve()?;
    let outcome = match &cli.command {
        Command::VerifyIdentities { random_sets, seed } => commands::identities::run(&cfg, *random_sets, *seed)?.1,
        Command::Spectrum { lambda_sweep: Some(spec), .. } => commands::spectrum::run_sweep(&cfg, spec)?.1,
        Command::Spectrum { lambda_sweep: None, save_matrix } => commands::spectrum::run(&cfg, *save_matrix)?.1,
        Command::GaugeCheck => commands::gauge::run(&cfg)?.1,
        Command::Evolve { state } => commands::evolve::run(&cfg, *state)?.1,
        Command::Classical { q0, v0, t_max, step } => {
            commands::classical::run(&cfg, ClassicalOptions { q0: *q0, v0: *v0, t_max: *t_max, step: *step })?.1
        }
        Command::CheckOp { equation } => commands::check_op::run(&cfg, equation)?.1,
    };
    Ok(outcome)
}
