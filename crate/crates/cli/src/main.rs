mod commands;
mod config;

use std::process::ExitCode;

use awcalc::ErrorClass;
use clap::{Parser, Subcommand};

use commands::{CmdError, CmdResult, DeqArgs, ExpandArgs, GrowthArgs, InModule, TknArgs, WvArgs};
use config::{Format, GlobalArgs, RunConfig};

/// Askey-Wilson series, growth profiles and Newton polygons.
#[derive(Parser, Debug)]
#[command(name = "awcalc", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a function in the basis phi_n(x; 1) and write a series file.
    Expand(ExpandArgs),
    /// Maximal term, central index, max modulus and diagnostics per radius.
    Growth(GrowthArgs),
    /// Table of T(k, n) for k <= kmax.
    Tkn(TknArgs),
    /// Newton polygon, predicted central index and optional growth certificate.
    Deq(DeqArgs),
    /// Trend of the Wiman-Valiron ratio and the tail sum over the grid.
    Wvcheck(WvArgs),
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Validation => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Invariant => 4,
    }
}

fn run(cli: &Cli) -> CmdResult<()> {
    let default_format = match cli.cmd {
        Command::Growth(_) => Format::Csv,
        _ => Format::Json,
    };
    let mut cfg = RunConfig::from_args(&cli.global, default_format).in_module("config")?;
    match &cli.cmd {
        Command::Expand(a) => commands::expand(&cfg, a),
        Command::Growth(a) => commands::growth(&mut cfg, a),
        Command::Tkn(a) => commands::tkn(&cfg, a),
        Command::Deq(a) => commands::deq(&mut cfg, a),
        Command::Wvcheck(a) => commands::wvcheck(&mut cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError { module, err }) => {
            eprintln!("awcalc: {module}: {err}");
            ExitCode::from(exit_code(err.class()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(exit_code(ErrorClass::Validation), 2);
        assert_eq!(exit_code(ErrorClass::Numerical), 3);
        assert_eq!(exit_code(ErrorClass::Invariant), 4);
    }
}
