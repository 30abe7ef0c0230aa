//! `moe`: batch runner for the games, verification sweeps, bound tables and
//! protocol self-tests. Every command writes newline-delimited JSON records.

mod bound;
mod config;
mod game;
mod output;
mod selftest;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coset_moe::Error;

use output::Emitter;

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "moe",
    version,
    about = "Monogamy-of-entanglement games, checks and bounds"
)]
#[command(args_override_self = true)]
struct Cli {
    /// key=value file with default flag values; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,

    /// Write records to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a game harness with a baseline strategy.
    Game(game::GameArgs),
    /// Run a verification sweep.
    #[command(subcommand)]
    Verify(verify::VerifyCommand),
    /// Tabulate an analytic bound.
    #[command(subcommand)]
    Bound(bound::BoundCommand),
    /// Protocol round-trips for all five constructions.
    Selftest(selftest::SelftestArgs),
}

/// How a command finished.
pub enum Outcome {
    Ok,
    CheckFailed,
}

/// Exit codes: 0 ok, 1 configuration, 2 trial abort, 3 check failure.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Abort { .. }
        | Error::Strategy(_)
        | Error::State(_)
        | Error::Numeric(_)
        | Error::Internal(_) => 2,
        Error::Param(_) | Error::Capacity(_) | Error::Decode(_) => 1,
    }
}

fn configure_workers() -> Result<(), String> {
    if let Ok(v) = std::env::var("MOE_WORKERS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("MOE_WORKERS={v} is not a positive integer"))?;
        if n == 0 {
            return Err("MOE_WORKERS must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_workers() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let mut out = match Emitter::open(cli.output.as_deref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Game(a) => game::run(&a, &mut out),
        Command::Verify(v) => verify::run(&v, &mut out),
        Command::Bound(b) => bound::run(&b, &mut out),
        Command::Selftest(s) => selftest::run(&s, &mut out),
    };
    if let Err(e) = out.finish() {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
