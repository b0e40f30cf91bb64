use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamvar::cli::{self, NumericOverrides, Options, ProblemFile, Report};

/// Verify lambda-variational symmetries of Euler-Lagrange ODEs and reduce
/// along the resulting conditional first integral.
#[derive(Parser)]
#[command(name = "lamvar", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the three equivalent lambda-variational checks.
    Check(Common),
    /// Check, then build I, Itilde and the reduced equation.
    Reduce(Common),
    /// Check, reduce and integrate numerically.
    Verify(VerifyArgs),
    /// Full pipeline; numerics run when an initial condition is available.
    Report(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Problem file.
    file: PathBuf,
    /// Lift coefficient A for the covering condition.
    #[arg(long = "A", value_name = "EXPR", allow_hyphen_values = true)]
    a: Option<String>,
    /// Print line-oriented key=value output.
    #[arg(long)]
    machine: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Initial condition, e.g. "u=2, u1=0.5, w=0".
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    /// Integration range a:b.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// RK4 step.
    #[arg(long)]
    step: Option<String>,
    /// Tolerance for the residual and the drift of Itilde.
    #[arg(long)]
    tol: Option<String>,
    /// Write the covering trajectory as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

fn run(common: &Common, opts: Options, f: fn(&ProblemFile, &Options) -> Report) -> ExitCode {
    let rep = match ProblemFile::load(&common.file) {
        Ok(file) => f(&file, &opts),
        Err(e) => {
            let mut rep = Report { exit: cli::exit_code(&e), ..Report::default() };
            rep.text = format!("error: {e}\n");
            rep.pairs.push(("error".into(), e.to_string()));
            rep
        }
    };
    print!("{}", rep.render(common.machine));
    ExitCode::from(rep.exit as u8)
}

fn verify_opts(v: &VerifyArgs) -> Options {
    Options {
        a: v.common.a.clone(),
        numeric: NumericOverrides {
            ic: v.ic.clone(),
            range: v.range.clone(),
            step: v.step.clone(),
            tol: v.tol.clone(),
        },
        csv: v.csv.clone(),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_PARSE as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match &args.cmd {
        Cmd::Check(c) => run(c, Options { a: c.a.clone(), ..Options::default() }, cli::run_check),
        Cmd::Reduce(c) => run(c, Options { a: c.a.clone(), ..Options::default() }, cli::run_reduce),
        Cmd::Verify(v) => run(&v.common, verify_opts(v), cli::run_verify),
        Cmd::Report(v) => run(&v.common, verify_opts(v), cli::run_report),
    }
}
