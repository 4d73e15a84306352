use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use renyi_hyp_cli::{load_spec, render, run, CliError, Command, OutputFormat, RunOptions};

#[derive(Parser)]
#[command(name = "renyi-hyp", version, about = "Rényi divergence measures, exponents and finite-n test oracles")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Family divergence and closed-form measures at each order.
    Measure(Common),
    /// Error and strong converse exponents at each rate.
    Exponents(Common),
    /// Exact finite-n oracles and fitted exponents against theory.
    Verify(Common),
    /// Universal distribution statistics and dominance checks.
    Universal(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Report,
    Table,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    spec: PathBuf,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format` in the spec.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    no_timestamp: bool,
    /// Exit with status 4 if any minimization did not converge.
    #[arg(long)]
    strict: bool,
}

fn execute(command: Command, args: &Common) -> Result<(), CliError> {
    let parsed = load_spec(&args.spec)?;
    let opts = RunOptions { threads: args.threads, timestamp: !args.no_timestamp };
    let report = run(&parsed, command, &opts)?;
    let format = match args.format {
        Some(Format::Report) => OutputFormat::Report,
        Some(Format::Table) => OutputFormat::Table,
        None => parsed.spec.output.format,
    };
    let text = render(&report, format)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    if args.strict && !report.non_converged.is_empty() {
        return Err(CliError::NonConvergence(report.non_converged.join(", ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Measure(a) => (Command::Measure, a),
        Cmd::Exponents(a) => (Command::Exponents, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Universal(a) => (Command::Universal, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
