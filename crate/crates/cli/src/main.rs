use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use praginfo_cli::{execute, Invocation, Kind};

#[derive(Parser)]
#[command(name = "praginfo", version, about = "Pragmatic-information experiments from scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Horse-race doubling rates, side information and Monte Carlo wealth.
    Kelly(Common),
    /// Simulated GARCH(1,1) returns and their mean inefficiency.
    Garch(Common),
    /// Exact pragmatic-information rates of a coupled source.
    Rates(Common),
    /// Expected length of a code built for the wrong distribution.
    Wrongcode(Common),
    /// Inefficiency of an ingested return series.
    Efficiency(Common),
    /// Entropy, relative entropy and mutual information of given tables.
    Entropy(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Seed; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the scenario's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-step CSV series.
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the malformed-input code.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (kind, c) = match cli.command {
        Command::Kelly(c) => (Kind::Kelly, c),
        Command::Garch(c) => (Kind::Garch, c),
        Command::Rates(c) => (Kind::Rates, c),
        Command::Wrongcode(c) => (Kind::WrongCode, c),
        Command::Efficiency(c) => (Kind::Efficiency, c),
        Command::Entropy(c) => (Kind::Entropy, c),
    };
    let inv = Invocation {
        kind,
        config: c.config,
        seed: c.seed,
        out: c.out,
        csv: c.csv,
    };
    match execute(&inv) {
        Ok(out) => {
            println!("{}", out.report.display());
            for s in &out.series {
                println!("{}", s.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("praginfo {}: {e}", kind.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
