mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pvi_core::FieldKind;

#[derive(Parser, Debug)]
#[command(name = "pvi-rh-lab", version, about = "Painleve VI verification lab")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// State document (JSON).
    #[arg(long, global = true)]
    pub state: Option<PathBuf>,
    /// Parameters k0,k1,k2,k3,k4 as "p/q" or decimal literals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Backend for literals given on the command line.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<FieldKind>,
    /// Write the JSON output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write tabular data (trajectories, ladders, curve points) as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Leave `wall_time_s` out of reports.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

fn parse_field(s: &str) -> Result<FieldKind, String> {
    match s {
        "exact" => Ok(FieldKind::Exact),
        "approx" => Ok(FieldKind::Approx),
        other => Err(format!("unknown field `{other}` (expected exact or approx)")),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weyl group action on parameters.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Cubic surface coefficients of the parameters.
    Theta,
    #[command(subcommand)]
    Backlund(BacklundCmd),
    #[command(subcommand)]
    Ham(HamCmd),
    #[command(subcommand)]
    Flow(FlowCmd),
    #[command(subcommand)]
    Fuchsian(FuchsianCmd),
    /// Limit of the three-point equation as t_k merges into t_j.
    Coalesce {
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    #[command(subcommand)]
    Rh(RhCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum WeylCmd {
    /// Apply a word such as "0,2,1"; letters act left to right.
    Apply {
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
enum BacklundCmd {
    /// Apply a word to a state.
    Apply {
        #[arg(long)]
        word: String,
    },
    /// Expand D(Q, P, sigma0 k) - D(q, p, k) for both candidate maps.
    Heuristic {
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum HamCmd {
    /// Hamiltonians of a state.
    Eval,
}

#[derive(Subcommand, Debug)]
enum FlowCmd {
    /// Move t_m along a straight segment and flow (q, p).
    Run {
        #[arg(long, default_value_t = 3)]
        moving: usize,
        /// End point of t_m, e.g. "3+0.5*i".
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
}

#[derive(Subcommand, Debug)]
enum FuchsianCmd {
    /// Linear equation of a state and its obstruction at z = q.
    Build {
        /// Gauge to the normal form (three finite points only).
        #[arg(long)]
        normalize: bool,
    },
}

#[derive(Subcommand, Debug)]
enum RhCmd {
    /// Monodromy and trace coordinates of a state.
    Compute,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Invariance of x under Backlund generators on sampled states.
    Main {
        #[arg(long, default_value = "0,1,2,3,4")]
        gens: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Constancy of x along the flow of t3.
    Isomono {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
    },
    /// Trace at the merged point against -2 cos(pi sqrt(Delta)).
    Coalesce {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "1e-1,1e-2,1e-3")]
        ladder: String,
        #[arg(long, default_value_t = 3)]
        min_pass: usize,
        /// Give up after this many rejected draws.
        #[arg(long, default_value_t = 40)]
        max_rejected: usize,
    },
    /// Row classification of the domain against its defining inequalities.
    Takano {
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        curve_points: usize,
    },
}

fn main() -> ExitCode {
    report::start_clock();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.common, &cli.command) {
        Ok(out) => match report::emit(&cli.common, &out) {
            Ok(()) if out.pass == Some(false) => ExitCode::from(2),
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
