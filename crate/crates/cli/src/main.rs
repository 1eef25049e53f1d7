use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermarkov::states::{GeneratorKind, ParityMode};
use fermarkov::Tolerances;

mod commands;

#[derive(Parser)]
#[command(name = "fermarkov", version, about = "SSA saturation and Markov structure for fermionic lattice states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the exact algebra identities for n = 1..=n-max.
    Selftest {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Run against a corrupted representation (negative control).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Generate a state file.
    Gen(GenArgs),
    /// SSA gap and Markov verdict for a state file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Write the factors of rho = x y.
    Factorize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_x: PathBuf,
        #[arg(long)]
        out_y: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Block decomposition of an even Markov state.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Generate and analyze many states, one CSV row each.
    Sweep {
        #[command(flatten)]
        gen: GenSpecArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, env = "FERMARKOV_SEED", default_value_t = 0)]
        seed0: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args, Clone)]
struct TolArgs {
    #[arg(long, default_value_t = Tolerances::default().equality)]
    tol_equality: f64,
    #[arg(long, default_value_t = Tolerances::default().member)]
    tol_member: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances { equality: self.tol_equality, member: self.tol_member, ..Tolerances::default() }
    }
}

#[derive(Args, Clone)]
struct GenSpecArgs {
    #[arg(long)]
    kind: GeneratorKind,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// e.g. A=0,1:B=2:C=3; defaults to a contiguous split.
    #[arg(long)]
    regions: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    floor_fraction: f64,
    /// Make the A_C factor of product states noneven.
    #[arg(long)]
    noneven: bool,
    #[arg(long, default_value_t = 1)]
    k_fixed: usize,
    #[arg(long, default_value_t = 0)]
    n_pairs: usize,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Perturb toward a generic, non-even state.
    #[arg(long)]
    break_even: bool,
}

impl GenSpecArgs {
    fn parity_mode(&self) -> ParityMode {
        if self.noneven { ParityMode::EvenNoneven } else { ParityMode::EvenEven }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: GenSpecArgs,
    #[arg(long, env = "FERMARKOV_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Selftest { n_max, inject_fault } => commands::selftest(n_max, inject_fault.as_deref()),
        Command::Gen(a) => commands::gen(&a.spec, a.seed, a.out.as_deref()),
        Command::Analyze { input, tol, out, format } => commands::analyze(&input, &tol.tolerances(), out.as_deref(), &format),
        Command::Factorize { input, out_x, out_y, tol } => commands::factorize(&input, &out_x, &out_y, &tol.tolerances()),
        Command::Decompose { input, out, format, tol } => {
            commands::decompose(&input, out.as_deref(), &format, &tol.tolerances())
        }
        Command::Sweep { gen, count, seed0, csv, tol } => commands::sweep(&gen, count, seed0, csv.as_deref(), &tol.tolerances()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
