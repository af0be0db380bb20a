use clap::{Parser, Subcommand};
use cmpadic_cli::{execute, CliError, Command, Overrides, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cmpadic", version, about = "Verification runs for CM families and their p-adic constants")]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
    /// scenario INI file (defaults to the built-in d = 7, p = 11 fixture)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// decimal digits requested for the complex computations
    #[arg(long, global = true)]
    precision_digits: Option<u32>,
    /// p-adic digits M
    #[arg(long, global = true)]
    padic_precision: Option<u32>,
    /// q-expansion bound B
    #[arg(long, global = true)]
    qexp_bound: Option<usize>,
    /// keep only checks whose names start with one of these
    #[arg(long, global = true, value_delimiter = ',')]
    check: Option<Vec<String>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// CM forms g_ψ: level and Hecke eigenvalues
    CmForm,
    /// p-stabilization g♯
    Stabilize,
    /// Petersson identities
    Petersson,
    /// Euler-factor identities
    VerifyEuler,
    /// local Rankin-Selberg integrals at random data
    LocalIntegral,
    /// Λ-adic families against classical forms
    Family,
    /// normalization constants and e_p
    Constants,
    /// constants plus the cross-checks that don't close
    FullLedger,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::CmForm => Command::CmForm,
            Sub::Stabilize => Command::Stabilize,
            Sub::Petersson => Command::Petersson,
            Sub::VerifyEuler => Command::VerifyEuler,
            Sub::LocalIntegral => Command::LocalIntegral,
            Sub::Family => Command::Family,
            Sub::Constants => Command::Constants,
            Sub::FullLedger => Command::FullLedger,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let mut s = match &cli.scenario {
        Some(p) => Scenario::from_path(p).map_err(CliError::Schema)?,
        None => Scenario::default(),
    };
    Overrides { precision_digits: cli.precision_digits, padic_precision: cli.padic_precision, qexp_bound: cli.qexp_bound }.apply(&mut s);
    let rep = execute(cli.cmd.into(), &s, cli.check.as_deref())?;
    let text = rep.to_json();
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    for c in rep.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {} (error {:.3e}, tolerance {:.3e})", c.name, c.error, c.tolerance);
    }
    eprintln!("{}: {}/{} checks pass", rep.subcommand, rep.summary.passed, rep.summary.total);
    Ok(rep.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
