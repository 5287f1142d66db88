//! `pdgal`: integrability checks, Kolchin reduction, quadrature towers and
//! Galois classification for linear partial differential systems.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "pdgal", version, about = "Exact differential algebra for linear partial differential systems")]
struct Cli {
    /// Emit one JSON document instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Directory used to resolve relative input paths that do not exist.
    #[arg(long, global = true, value_name = "DIR")]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test the compatibility relations of a system.
    Check { system: String },
    /// Print the one-derivation form D Y = A_D Y.
    Reduce {
        system: String,
        /// Names for the u indeterminates.
        #[arg(long, value_delimiter = ',')]
        u_names: Option<Vec<String>>,
    },
    /// Check a fundamental matrix over a tower.
    Verify { system: String, tower: String, matrix: String },
    /// Solve an upper-triangular system by quadratures.
    SolveTriangular { system: String },
    /// Classify the steps of a tower.
    CertifyTower { tower: String },
    /// Classify the Galois group of an integrable system.
    Classify { system: String },
    /// Classify x^2 y'' = c y.
    Euler {
        #[arg(allow_hyphen_values = true)]
        c: String,
    },
    /// Compare two expressions in the ordering with t_{i+1} < t_i < every positive constant.
    OrderCmp {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
        /// Variable order, most significant first.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Report on the gradient flow of lambda x^2 + mu y^2.
    Gradient {
        #[arg(allow_hyphen_values = true)]
        lambda: i64,
        #[arg(allow_hyphen_values = true)]
        mu: i64,
        /// Level of the first integral.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        value: String,
    },
    /// Syntax-check a document.
    Parse {
        file: String,
        /// Context for bare matrix files.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let io = commands::Inputs::new(cli.fixtures.clone());
    match &cli.command {
        Command::Check { system } => commands::check(&io, system),
        Command::Reduce { system, u_names } => commands::reduce(&io, system, u_names.as_deref()),
        Command::Verify { system, tower, matrix } => commands::verify(&io, system, tower, matrix),
        Command::SolveTriangular { system } => commands::solve_triangular(&io, system),
        Command::CertifyTower { tower } => commands::certify_tower(&io, tower),
        Command::Classify { system } => commands::classify(&io, system),
        Command::Euler { c } => commands::euler(c),
        Command::OrderCmp { f, g, vars } => commands::order_cmp(f, g, vars.as_deref()),
        Command::Gradient { lambda, mu, value } => commands::gradient(*lambda, *mu, value),
        Command::Parse { file, vars } => commands::parse(&io, file, vars.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    std::panic::set_hook(Box::new(|_| {}));
    let outcome = std::panic::catch_unwind(|| run(&cli)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unexpected failure".into());
        Err(Failure::internal(msg))
    });
    let (out, err, code) = match outcome {
        Ok(r) => (r.render(cli.json), None, r.code),
        Err(f) => (f.render_stdout(cli.json), Some(f.render_stderr()), report::USAGE),
    };
    if let Some(text) = out {
        print!("{text}");
    }
    if let Some(text) = err {
        eprintln!("{text}");
    }
    ExitCode::from(code)
}
