use abel_sonin_cli::config::Overrides;
use abel_sonin_cli::run::{self, BasisFlags, PairFlags};
use abel_sonin_cli::CliError;
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Solve Abel–Sonin integral equations by Jacobi expansion.
#[derive(Parser)]
#[command(name = "abel-sonin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (report or diagnostics document).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation N.
    #[arg(long)]
    n_modes: Option<usize>,
    /// Order of the inner quadrature rules.
    #[arg(long)]
    quad_order: Option<usize>,
    /// Tolerance for the Sonin-condition check.
    #[arg(long)]
    tol_sonin: Option<f64>,
    /// Seed for the randomized operator-bound estimates.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            n_modes: self.n_modes,
            quad_order: self.quad_order,
            tol_sonin: self.tol_sonin,
            seed: self.seed,
        }
    }

    fn require_config(&self) -> Result<&PathBuf, CliError> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::precondition("config", "--config is required"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write a report plus ψ samples and traces as CSV.
    Solve(Common),
    /// Solve and write only the diagnostics.
    Diagnose(Common),
    /// Print the Sonin residuals of a kernel pair at the probe points.
    VerifyPair {
        #[command(flatten)]
        common: Common,
        /// rl or cosine.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Length of the interval (0, length) to verify on.
        #[arg(long)]
        length: Option<f64>,
    },
    /// Print normalization constants of a Jacobi basis.
    BasisInfo {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long)]
        max_degree: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve(c) => run::run_solve(c.require_config()?, c.out.as_deref(), &c.overrides()),
        Command::Diagnose(c) => run::run_diagnose(c.require_config()?, c.out.as_deref(), &c.overrides()),
        Command::VerifyPair {
            common,
            pair,
            alpha,
            lambda,
            length,
        } => run::run_verify_pair(
            common.config.as_deref(),
            &PairFlags {
                pair,
                alpha,
                lambda,
                length,
            },
            &common.overrides(),
        ),
        Command::BasisInfo {
            common,
            beta,
            gamma,
            a,
            b,
            max_degree,
        } => run::run_basis_info(
            common.config.as_deref(),
            &BasisFlags {
                beta,
                gamma,
                a,
                b,
                max_degree,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::precondition("arguments", first.trim_start_matches("error: ")));
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
