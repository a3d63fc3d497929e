//! `kmsw`: solve and verify graph weights, 2D CW weights and KMS functionals.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on input errors.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kms_weights::a2::DecayLaw;
use kms_weights::cw::CwMode;
use kms_weights::path_algebra::DEFAULT_BETA_SIGN;
use kms_weights::weight::{DEFAULT_EPS, DEFAULT_TOL};

use commands::{CliError, Ctx, Output, Settings};
use report::{digest, RunReport};

#[derive(Parser)]
#[command(name = "kmsw", version, about = "Graph weights, 2D CW weights and KMS-weight functionals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Residual tolerance for floating-point checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Width to which irrational roots are isolated.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Sign of beta in the KMS condition, `+` or `-`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_sign)]
    beta_sign: Option<i8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Standard,
    Tight,
}

impl From<Mode> for CwMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Standard => CwMode::Standard,
            Mode::Tight => CwMode::Tight,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    LinearExponent,
    DoubledExponent,
    FirstAxisOnly,
}

impl From<Law> for DecayLaw {
    fn from(l: Law) -> Self {
        match l {
            Law::LinearExponent => DecayLaw::LinearExponent,
            Law::DoubledExponent => DecayLaw::DoubledExponent,
            Law::FirstAxisOnly => DecayLaw::FirstAxisOnly,
        }
    }
}

fn parse_sign(s: &str) -> Result<i8, String> {
    match s {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => Err(format!("expected + or -, got `{s}`")),
    }
}

fn parse_bound(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected m1,m2, got `{s}`"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((n(a)?, n(b)?))
}

#[derive(Subcommand)]
enum Command {
    /// Print the boundary graph of a complex in the graph format.
    BoundaryGraph { input: Option<PathBuf> },
    /// Special graph weights of a graph, or of a complex's skeleton or boundary graph.
    SolveGraph {
        input: Option<PathBuf>,
        /// Solve on the boundary graph of the input complex.
        #[arg(long)]
        boundary: bool,
        /// Write the first faithful weight to this file.
        #[arg(long)]
        emit_weight: Option<PathBuf>,
    },
    /// Special 2D CW weights of a complex.
    SolveCw {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Standard)]
        mode: Mode,
        /// Restrict to special weights (constant eta).
        #[arg(long)]
        special: bool,
        #[arg(long)]
        emit_weight: Option<PathBuf>,
    },
    /// Special triangular weights of a triangular complex or triangle presentation.
    SolveTriangular {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Tight)]
        mode: Mode,
        #[arg(long)]
        emit_weight: Option<PathBuf>,
    },
    /// Check a weight file against a graph, complex, presentation or amalgam.
    Verify {
        structure: PathBuf,
        /// Weight file; standard input when absent.
        weight: Option<PathBuf>,
    },
    /// Check the KMS identity and gauge invariance of the functional of a weight.
    KmsCheck {
        structure: PathBuf,
        weight: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_path_len: usize,
        /// Number of mixed rank-2 monomial pairs sampled on complexes.
        #[arg(long, default_value_t = 256)]
        mixed: usize,
    },
    /// Splice the weights of the pieces of an amalgam into a weight on its foundation.
    Splice {
        input: Option<PathBuf>,
        /// Directory holding `<piece>.json` for every piece; without it each
        /// piece is solved for its first faithful special standard weight.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        emit_weight: Option<PathBuf>,
    },
    /// Triangle presentations and the rank-2 building constructions.
    A2 {
        #[command(subcommand)]
        command: A2Command,
    },
    /// Print a built-in example, or list them.
    Fixtures { name: Option<String> },
}

#[derive(Subcommand)]
enum A2Command {
    /// Print the one-vertex complex of a presentation.
    Complex { input: Option<PathBuf> },
    /// Build the sector graphs and check the constant matched pair.
    Sectors {
        input: Option<PathBuf>,
        /// Also search matched special weights.
        #[arg(long)]
        search: bool,
    },
    /// Check the weight equation on the shape lattice.
    LatticeCheck {
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value = "4,4", value_parser = parse_bound)]
        bound: (usize, usize),
        #[arg(long, value_enum, default_value_t = Law::LinearExponent)]
        law: Law,
        /// Base values `letter=value`, comma separated.
        #[arg(long, default_value = "o=1", value_delimiter = ',')]
        base: Vec<String>,
    },
}

fn run(command: &Command, ctx: &mut Ctx) -> Result<Output, CliError> {
    use Command::*;
    match command {
        BoundaryGraph { input } => commands::boundary_graph(ctx, input.as_deref()),
        SolveGraph {
            input,
            boundary,
            emit_weight,
        } => commands::solve_graph(ctx, input.as_deref(), *boundary, emit_weight.as_ref()),
        SolveCw {
            input,
            mode,
            special,
            emit_weight,
        } => commands::solve_cw(ctx, input.as_deref(), (*mode).into(), *special, emit_weight.as_ref()),
        SolveTriangular { input, mode, emit_weight } => {
            commands::solve_triangular(ctx, input.as_deref(), (*mode).into(), emit_weight.as_ref())
        }
        Verify { structure, weight } => commands::verify(ctx, structure, weight.as_deref()),
        KmsCheck {
            structure,
            weight,
            max_path_len,
            mixed,
        } => commands::kms(ctx, structure, weight.as_deref(), *max_path_len, *mixed),
        Splice {
            input,
            weights,
            emit_weight,
        } => commands::splice(ctx, input.as_deref(), weights.as_deref(), emit_weight.as_ref()),
        A2 { command } => match command {
            A2Command::Complex { input } => commands::a2_complex(ctx, input.as_deref()),
            A2Command::Sectors { input, search } => commands::a2_sectors(ctx, input.as_deref(), *search),
            A2Command::LatticeCheck { q, bound, law, base } => commands::a2_lattice(*q, *bound, (*law).into(), base),
        },
        Fixtures { name } => commands::fixtures(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let g = &cli.global;
    let mut ctx = Ctx::new(Settings {
        tol: g.tol,
        eps: g.eps,
        beta_sign: g.beta_sign.unwrap_or(DEFAULT_BETA_SIGN),
    });
    match run(&cli.command, &mut ctx) {
        Err(CliError::Input(msg)) => {
            eprintln!("kmsw: {msg}");
            ExitCode::from(2)
        }
        Ok(Output::Raw(v)) => {
            emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialise")));
            ExitCode::SUCCESS
        }
        Ok(Output::Report { results, passed }) => {
            let report = RunReport {
                command: argv[1..].to_vec(),
                inputs_digest: digest(&ctx.inputs),
                results,
                passed,
            };
            emit(&match g.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("json values serialise")),
                Format::Table => report.to_table(),
            });
            ExitCode::from(report.exit_code())
        }
    }
}

/// Write to stdout; a reader that closed the pipe early is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
