use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pencil_cli::commands::{cmd_analyze, cmd_generate, cmd_table1, parse_list, AnalyzeArgs, GenerateArgs, Source};
use pencil_cli::CliError;

/// Local eigenstructure of matrix pencils A + λE.
#[derive(Debug, Parser)]
#[command(name = "pencil", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal indices, partial multiplicities, minimal basis and root
    /// polynomials of a pencil, as JSON.
    Analyze {
        /// Pencil document (JSON). Omit when using --A/--E.
        input: Option<PathBuf>,
        /// Matrix Market file holding A.
        #[arg(long = "A", requires = "e_file", conflicts_with = "input")]
        a_file: Option<PathBuf>,
        /// Matrix Market file holding E.
        #[arg(long = "E", requires = "a_file")]
        e_file: Option<PathBuf>,
        /// Expansion point, e.g. "0", "1.5-2i". Defaults to the document's
        /// value, then 0.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<String>,
        /// Absolute rank tolerance (default sqrt(max(m,n)·eps)·scale).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 2)]
        refine_iters: usize,
        /// Cross-check all counts against block Toeplitz ranks.
        #[arg(long)]
        verify: bool,
        /// Report coefficients in powers of λ instead of λ-λ0.
        #[arg(long)]
        expand_monomial: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random pencil with a planted staircase structure, as JSON.
    Generate {
        /// Row sizes s1,s2,... of the staircase.
        #[arg(long, default_value = "")]
        s: String,
        /// Column sizes t1,t2,... of the staircase.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hide the structure behind random unitary transformations.
        #[arg(long)]
        disguise: bool,
        /// "gaussian" (real) or "complex".
        #[arg(long, default_value = "gaussian")]
        fill: String,
        /// Size of an extra regular block without structure at λ0.
        #[arg(long, default_value_t = 0)]
        tail: usize,
        /// Plant the structure at this point instead of 0.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Residual table over random pencils with s=(4,2,0), t=(5,3,1), as CSV.
    Table1 {
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long)]
        disguise: bool,
        #[arg(long, default_value_t = 2)]
        refine_iters: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{newline}").and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { input, a_file, e_file, lambda0, tol, refine_iters, verify, expand_monomial, output } => {
            let source = match (input, a_file, e_file) {
                (Some(p), None, None) => Source::Json(p),
                (None, Some(a), Some(e)) => Source::MatrixMarket { a, e },
                _ => return Err(CliError::Input("give either a JSON document or both --A and --E".into())),
            };
            let args = AnalyzeArgs { source, lambda0, tol, refine_iters, verify, expand_monomial };
            emit(&cmd_analyze(&args)?.to_json(), output.as_ref())
        }
        Command::Generate { s, t, seed, disguise, fill, tail, lambda0, output } => {
            let args = GenerateArgs { s: parse_list(&s)?, t: parse_list(&t)?, seed, disguise, fill, tail, lambda0 };
            emit(&cmd_generate(&args)?.to_json(), output.as_ref())
        }
        Command::Table1 { seeds, first_seed, disguise, refine_iters, output } => {
            emit(&cmd_table1(seeds, first_seed, disguise, refine_iters)?, output.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pencil: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
