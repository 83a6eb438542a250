//! Command-line surface: problem files in, CSV and reports out.

mod commands;
mod format;
mod problem_file;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_check, cmd_kernel, cmd_oracle_compare, cmd_solve, exit_code, read_column, CommandOutput,
    Settings, EXIT_BOUNDARY, EXIT_FAILED, EXIT_NOT_ADMISSIBLE, EXIT_OK, EXIT_USAGE,
};
pub use format::{csv, fmt_num};
pub use problem_file::{
    emit_problem, parse_problem_file, parse_problem_str, ProblemFile, RunOptions,
};

#[derive(Parser, Debug)]
#[command(
    name = "fracvisc",
    version,
    about = "Distributed-order viscoelastic oscillator solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the force-side symbol for zeros and classify the weights
    Check(Common),
    /// Tabulate the fundamental kernel l and its running integral
    Kernel(Common),
    /// Solve by fixed-point iteration and print t, y, z, z - z_ode
    Solve(SolveArgs),
    /// Compare the fixed-point solution with the direct time-stepper
    OracleCompare(CompareArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem file (TOML)
    problem: PathBuf,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of grid steps
    #[arg(long)]
    grid_n: Option<usize>,
    /// End time
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Stop when successive iterates differ by less than this (sup norm)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap; hitting it exits with status 2
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relaxation factor in (0, 1]
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Largest accepted sup-norm disagreement
    #[arg(long, default_value_t = 5e-3)]
    agree_tol: f64,
}

fn usage(msg: String) -> CommandOutput {
    CommandOutput {
        stdout: String::new(),
        stderr: msg,
        code: EXIT_USAGE,
    }
}

fn load(common: &Common) -> Result<(crate::solver::ProblemSpec, Settings), CommandOutput> {
    let file = parse_problem_file(&common.problem).map_err(|e| usage(format!("error: {e}\n")))?;
    let mut spec = file.spec;
    let mut settings = Settings::from_run(&spec, &file.run);
    if let Some(n) = common.grid_n {
        if n < 4 {
            return Err(usage("error: --grid-n must be at least 4\n".into()));
        }
        settings.n_steps = n;
    }
    if let Some(h) = common.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(usage("error: --horizon must be positive\n".into()));
        }
        settings.horizon = h;
        spec.horizon = h;
    }
    Ok((spec, settings))
}

fn apply_solver_flags(s: &SolveArgs, settings: &mut Settings) -> Result<(), CommandOutput> {
    if let Some(t) = s.tol {
        if !(t > 0.0) {
            return Err(usage("error: --tol must be positive\n".into()));
        }
        settings.solve.tol = t;
    }
    if let Some(m) = s.max_iter {
        settings.solve.max_iter = m.max(1);
    }
    if let Some(w) = s.damping {
        if !(w > 0.0 && w <= 1.0) {
            return Err(usage("error: --damping must lie in (0, 1]\n".into()));
        }
        settings.solve.damping = w;
    }
    Ok(())
}

/// Parses arguments and runs one command. With `--out` the main output goes
/// to the file and `stdout` comes back empty.
pub fn execute<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutput {
                        stdout: text,
                        stderr: String::new(),
                        code: EXIT_OK,
                    }
                }
                _ => usage(text),
            };
        }
    };
    let (out_path, result) = match &cli.command {
        Command::Check(c) => (&c.out, load(c).map(|(spec, _)| cmd_check(&spec))),
        Command::Kernel(c) => (&c.out, load(c).map(|(spec, s)| cmd_kernel(&spec, &s))),
        Command::Solve(a) => (
            &a.common.out,
            load(&a.common).and_then(|(spec, mut s)| {
                apply_solver_flags(a, &mut s)?;
                Ok(cmd_solve(&spec, &s))
            }),
        ),
        Command::OracleCompare(a) => (
            &a.solve.common.out,
            load(&a.solve.common).and_then(|(spec, mut s)| {
                apply_solver_flags(&a.solve, &mut s)?;
                s.agree_tol = a.agree_tol;
                Ok(cmd_oracle_compare(&spec, &s))
            }),
        ),
    };
    let mut output = result.unwrap_or_else(|e| e);
    if let Some(path) = out_path {
        if !output.stdout.is_empty() {
            if let Err(e) = std::fs::write(path, &output.stdout) {
                output
                    .stderr
                    .push_str(&format!("error: {}: {e}\n", path.display()));
                output.code = EXIT_USAGE;
            }
            output.stdout.clear();
        }
    }
    output
}
