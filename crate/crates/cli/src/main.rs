//! `ctorsion`: quivers, mapping class maps and torsion of surface mapping tori.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "CTORSION_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ctorsion", version, about = "Twisted Alexander polynomials and torsion of surface mapping tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Write the result to a file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the quiver of an n-triangulation.
    Quiver(SurfaceArgs),
    /// Print the action of a mapping class on cluster coordinates.
    Map(MapArgs),
    /// Solve for a fixed point and compute det(tJ - I) and the torsion.
    Torsion(TorsionArgs),
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// Built-in surface name or path to a triangulation JSON file.
    #[arg(long, default_value = "once-punctured-torus")]
    surface: String,

    /// Rank n >= 2.
    #[arg(short, default_value_t = 3)]
    n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Numeric,
    Exact,
    Symbolic,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Word over L and R, or path to a flip-program JSON file.
    #[arg(long, default_value = "")]
    word: String,

    /// `symbolic` prints component formulas; otherwise the mutation program.
    #[arg(long, value_enum, default_value = "numeric")]
    mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    /// Lift rank-2 fixed points (n > 2), multistart at n = 2.
    Auto,
    Lift,
    Multistart,
    /// Start from `--point`.
    Point,
}

#[derive(Args, Debug)]
struct TorsionArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Word over L and R, or path to a flip-program JSON file.
    #[arg(long)]
    word: String,

    #[arg(long, value_enum, default_value = "numeric")]
    mode: Mode,

    /// Square-free discriminant for exact mode.
    #[arg(short, allow_negative_numbers = true)]
    d: Option<i64>,

    /// Seed of all multistart sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value = "auto")]
    strategy: Strategy,

    /// Number of multistart starts.
    #[arg(long, default_value_t = 100)]
    starts: usize,

    /// Explicit start as a JSON array of [re, im] pairs; implies `--strategy point`.
    #[arg(long)]
    point: Option<String>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<commands::Output, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Quiver(a) => commands::quiver(&a.surface, a.n, cli.json),
        Command::Map(a) => commands::map(&a.surface.surface, &a.word, a.surface.n, a.mode == Mode::Symbolic, cli.json),
        Command::Torsion(a) => {
            let exact = match (a.mode, a.d) {
                (Mode::Exact, Some(d)) => Some(d),
                (Mode::Exact, None) => return Err(CliError::validation("--mode exact requires -d <discriminant>")),
                (Mode::Symbolic, _) => {
                    return Err(CliError::validation("--mode symbolic applies to `map`; use numeric or exact"))
                }
                (Mode::Numeric, _) => None,
            };
            let strategy = match (a.strategy, &a.point) {
                (_, Some(p)) => commands::Seed::Point(p.clone()),
                (Strategy::Point, None) => return Err(CliError::validation("--strategy point requires --point")),
                (Strategy::Auto, None) => commands::Seed::Auto,
                (Strategy::Lift, None) => commands::Seed::Lift,
                (Strategy::Multistart, None) => commands::Seed::Multistart,
            };
            let job = commands::TorsionJob {
                surface: &a.surface.surface,
                word: &a.word,
                n: a.surface.n,
                exact,
                seed: a.seed,
                starts: a.starts,
                strategy,
            };
            commands::torsion(&job, cli.json)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(4);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                let _ = emit(&cli, &format!("{}\n", e.to_json()));
            }
            eprintln!("error: {}", e.message);
            for detail in &e.details {
                eprintln!("  - {detail}");
            }
            ExitCode::from(e.code)
        }
    }
}
