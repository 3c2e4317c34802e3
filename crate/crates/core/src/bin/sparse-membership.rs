use std::process;

use clap::{Args, Parser, Subcommand};
use sparse_membership::cli::{self, CliError, ExitCode, Flags, Outcome, Problem, Settings};

/// Sparse effective ideal membership: support bounds, certificates and exact solutions.
///
/// Exit codes: 0 success/feasible/true, 1 infeasible/false, 2 undecided
/// within the Gröbner budget, 3 input error.
#[derive(Parser)]
#[command(name = "sparse-membership", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Restrict to these theorems (mac, macproduct, noether, ag, hickel, kollar, agprod, hickelprod, kollarprod).
    #[arg(long, global = true, value_delimiter = ',')]
    theorem: Vec<String>,
    /// Scaling e with supp Φ ⊆ eP, as p or p/q.
    #[arg(long, global = true)]
    e: Option<String>,
    /// Order of vanishing at infinity replacing Vol(P) in the sharpened bounds.
    #[arg(long, global = true)]
    r: Option<String>,
    /// Solve at Q = cP instead of a certificate.
    #[arg(long, global = true)]
    c: Option<i64>,
    /// Exponent ν used with --c.
    #[arg(long, global = true)]
    nu: Option<u32>,
    /// Gröbner pair budget (default 50000).
    #[arg(long, global = true, env = "MEMBERSHIP_BUDGET")]
    budget: Option<usize>,
    /// Emit certificates whose hypotheses could not be decided.
    #[arg(long, global = true)]
    force: bool,
    /// Use the lattice-refined polytope where available.
    #[arg(long, global = true)]
    sharpen: bool,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Polytope, fan and smoothness data of the problem.
    Analyze { file: String },
    /// Bound certificates, sorted by Vol(Q).
    Bounds { file: String },
    /// Solve at a certificate's Q (or at --c) and verify the result.
    Solve {
        file: String,
        /// Certificate JSON, or the output of `bounds` (its first certificate is used).
        #[arg(long)]
        certificate: Option<String>,
    },
    /// Check a solution file against the problem.
    Verify {
        file: String,
        #[arg(long)]
        solution: String,
    },
    /// Face systems at infinity.
    CheckInfinity { file: String },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    let flags = Flags {
        theorem: c.theorem.clone(),
        e: c.e.clone(),
        r: c.r.clone(),
        c: c.c,
        nu: c.nu,
        budget: c.budget,
        force: c.force,
        sharpen: c.sharpen,
        seed: c.seed,
    };
    let file = match &cli.cmd {
        Cmd::Analyze { file }
        | Cmd::Bounds { file }
        | Cmd::Solve { file, .. }
        | Cmd::Verify { file, .. }
        | Cmd::CheckInfinity { file } => file,
    };
    let problem = Problem::from_path(file)?;
    let settings = Settings::resolve(&flags, &problem.options)?;
    match &cli.cmd {
        Cmd::Analyze { .. } => cli::analyze(&problem, &settings),
        Cmd::Bounds { .. } => cli::bounds(&problem, &settings),
        Cmd::Solve { certificate, .. } => {
            let cert = certificate
                .as_deref()
                .map(|p| Ok::<_, CliError>(serde_json::from_str(&cli::read(p)?)?))
                .transpose()?;
            cli::solve(&problem, &settings, cert.as_ref())
        }
        Cmd::Verify { solution, .. } => {
            let doc = serde_json::from_str(&cli::read(solution)?)?;
            cli::verify(&problem, &doc)
        }
        Cmd::CheckInfinity { .. } => cli::check_infinity(&problem, &settings),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::InputError as i32 } else { 0 };
            let _ = e.print();
            process::exit(code);
        }
    };
    let outcome = run(&cli).unwrap_or_else(|e| e.outcome());
    if outcome.code == ExitCode::InputError && !cli.common.pretty {
        eprintln!("{}", outcome.json["error"].as_str().unwrap_or("input error"));
    }
    let text = outcome.render(cli.common.pretty);
    if cli.common.pretty {
        print!("{text}");
    } else {
        println!("{text}");
    }
    process::exit(outcome.code as i32);
}
