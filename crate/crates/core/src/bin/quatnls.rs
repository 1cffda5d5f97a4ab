use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quatnls::cli::{init_threads, run, Command, Grid, RunConfig};
use quatnls::verify::Level;

/// Multisoliton solutions of the focusing NLS equation on a nonvanishing background.
#[derive(Parser)]
#[command(name = "quatnls", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a triplet and print its boundary data.
    Build(Common),
    /// Write q and its gauge transform on an (x, t) grid as CSV.
    Sample(Common),
    /// Run the verification suite and write a JSON report.
    Verify(Common),
    /// Locate the zeros of the bracket determinant at a fixed time.
    ScanSingular(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 201)]
    nx: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 1)]
    nt: usize,
    /// Time of the singular-locus scan.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    level: LevelArg,
    /// Relative tolerance for admissibility and compatibility.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, hide = true)]
    corrupt_p_r: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Build(c) => (Command::Build, c),
        Cmd::Sample(c) => (Command::Sample, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::ScanSingular(c) => (Command::ScanSingular, c),
    };
    init_threads();
    let cfg = RunConfig {
        input: c.config,
        command,
        grid: Grid { x_min: c.x_min, x_max: c.x_max, nx: c.nx, t_min: c.t_min, t_max: c.t_max, nt: c.nt },
        t: c.t,
        level: match c.level {
            LevelArg::Fast => Level::Fast,
            LevelArg::Full => Level::Full,
        },
        tol: c.tol,
        output: c.out,
        corrupt_p_r: c.corrupt_p_r,
    };
    let code = run(&cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
