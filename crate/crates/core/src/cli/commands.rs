use super::format::{csv, fmt_num, meta};
use super::problem_file::RunOptions;
use crate::dist_order::{classify_weight, OrderWeight, WeightClass, WeightRole};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::laplace::{check_a0, fundamental_solution, Verdict};
use crate::oracles::direct_coupled_solve;
use crate::solver::{classify_solution, picard_solve, ProblemSpec, SolveOptions};
use std::fmt::Write as _;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_NOT_ADMISSIBLE: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;

/// What a command produced: the main output, diagnostics, and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CommandOutput {
    fn new(stdout: String, code: i32) -> Self {
        CommandOutput {
            stdout,
            stderr: String::new(),
            code,
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) => EXIT_USAGE,
        Error::NotAdmissible(_) | Error::Indeterminate(_) => EXIT_NOT_ADMISSIBLE,
        Error::BoundaryDegenerate(_) => EXIT_BOUNDARY,
        _ => EXIT_FAILED,
    }
}

/// Grid and solver settings after command-line overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub horizon: f64,
    pub n_steps: usize,
    pub solve: SolveOptions,
    pub agree_tol: f64,
}

impl Settings {
    pub fn from_run(spec: &ProblemSpec, run: &RunOptions) -> Self {
        Settings {
            horizon: spec.horizon,
            n_steps: run.n_steps,
            solve: SolveOptions {
                tol: run.tol,
                max_iter: run.max_iter,
                damping: run.damping,
                certify: true,
            },
            agree_tol: 5e-3,
        }
    }

    fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.n_steps)
    }
}

fn weight_line(out: &mut String, name: &str, w: &OrderWeight, role: WeightRole) -> WeightClass {
    let class = classify_weight(w, role);
    meta_plain(out, name, w);
    meta_plain(out, &format!("{name}_class"), &class);
    if w.is_signed() {
        meta_plain(out, &format!("{name}_note"), "density changes sign");
    }
    class
}

fn meta_plain(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

/// Admissibility of the force-side symbol and the weight classes.
pub fn cmd_check(spec: &ProblemSpec) -> CommandOutput {
    let mut out = String::new();
    weight_line(&mut out, "phi1", &spec.phi1, WeightRole::Phi1);
    let c2 = weight_line(&mut out, "phi2", &spec.phi2, WeightRole::Phi2);
    let caps = spec.forcing.capabilities();
    meta_plain(
        &mut out,
        "forcing_flags",
        format!(
            "growth_bound={} lipschitz={} joint_lipschitz={}",
            caps.growth_bound, caps.lipschitz, caps.joint_lipschitz
        ),
    );
    let code = match (&c2, &spec.phi2) {
        (WeightClass::Unclassified { .. }, _) => {
            meta_plain(&mut out, "verdict", "unsupported");
            EXIT_NOT_ADMISSIBLE
        }
        (_, OrderWeight::Atomic(a)) if a.len() == 1 => {
            meta_plain(&mut out, "verdict", Verdict::Admissible);
            meta_plain(&mut out, "winding_count", 0);
            meta_plain(
                &mut out,
                "notes",
                "single atom: constant multiple of s^gamma",
            );
            EXIT_OK
        }
        (_, OrderWeight::Atomic(_)) => match check_a0(&spec.phi2) {
            Ok(r) => {
                meta_plain(&mut out, "verdict", r.verdict);
                meta_plain(&mut out, "winding_count", r.winding_count);
                meta_plain(&mut out, "r_inner", fmt_num(r.r_inner));
                meta_plain(&mut out, "r_outer", fmt_num(r.r_outer));
                let zeros: Vec<String> = r
                    .axis_zeros
                    .iter()
                    .map(|z| format!("{}i (|F| = {})", fmt_num(z.ordinate), fmt_num(z.residual)))
                    .collect();
                meta_plain(&mut out, "axis_zeros", zeros.join(", "));
                meta_plain(&mut out, "notes", &r.notes);
                match r.verdict {
                    Verdict::Admissible => EXIT_OK,
                    Verdict::BoundaryDegenerate => EXIT_BOUNDARY,
                    Verdict::NotAdmissible | Verdict::Indeterminate => EXIT_NOT_ADMISSIBLE,
                }
            }
            Err(e) => {
                meta_plain(&mut out, "verdict", "error");
                meta_plain(&mut out, "notes", &e);
                exit_code(&e)
            }
        },
        _ => {
            meta_plain(&mut out, "verdict", Verdict::Admissible);
            meta_plain(
                &mut out,
                "notes",
                "continuous phi2 on [0,1]: symbol zero-free",
            );
            EXIT_OK
        }
    };
    meta_plain(&mut out, "classification", classify_solution(spec));
    CommandOutput::new(out, code)
}

fn error_output(e: Error) -> CommandOutput {
    CommandOutput {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: exit_code(&e),
    }
}

/// `t, l(t), ∫₀ᵗ l` on the requested grid.
pub fn cmd_kernel(spec: &ProblemSpec, settings: &Settings) -> CommandOutput {
    let run = || -> Result<String> {
        let grid = settings.grid()?;
        let k = fundamental_solution(&spec.phi2, &grid)?;
        let mut out = String::new();
        meta(&mut out, "regularity", k.regularity);
        meta(&mut out, "atomic_coef", fmt_num(k.atomic_coef));
        let t: Vec<f64> = grid.nodes().collect();
        out.push_str(&csv(
            &["t", "l", "cumulative"],
            &[&t, k.regular.values(), k.cumulative.values()],
        ));
        Ok(out)
    };
    match run() {
        Ok(s) => CommandOutput::new(s, EXIT_OK),
        Err(e) => error_output(e),
    }
}

/// `t, y, z, z − z_ode` followed by run diagnostics.
pub fn cmd_solve(spec: &ProblemSpec, settings: &Settings) -> CommandOutput {
    let run = || -> Result<CommandOutput> {
        let grid = settings.grid()?;
        let sol = picard_solve(spec, &grid, &settings.solve)?;
        let t: Vec<f64> = grid.nodes().collect();
        let resid = sol.z.add_scaled(-1.0, &sol.z_ode)?;
        let mut out = csv(
            &["t", "y", "z", "z_ode_residual"],
            &[&t, sol.y.values(), sol.z.values(), resid.values()],
        );
        meta(&mut out, "delta_used", fmt_num(sol.delta_used));
        meta(&mut out, "certified", sol.certified);
        if let Some(c) = &sol.certificate {
            meta(&mut out, "delta_certified", fmt_num(c.delta));
        }
        meta(&mut out, "iterations", sol.picard_iters);
        meta(&mut out, "converged", sol.converged);
        meta(
            &mut out,
            "fixed_point_residual",
            fmt_num(sol.fixed_point_residual),
        );
        meta(
            &mut out,
            "constitutive_residual",
            fmt_num(sol.constitutive_residual),
        );
        meta(&mut out, "ode_residual", fmt_num(sol.ode_residual));
        meta(&mut out, "dissipation_work", fmt_num(sol.dissipation_work));
        meta(&mut out, "kernel_regularity", sol.kernel_regularity);
        if sol.classification.grants().is_empty() {
            meta(&mut out, "classification", "none");
        }
        for g in sol.classification.grants() {
            meta(&mut out, &format!("class {}", g.class), g.clause);
        }
        let mut stderr = String::new();
        for w in &sol.warnings {
            let _ = writeln!(out, "# warning: {w}");
            let _ = writeln!(stderr, "warning: {w}");
        }
        let code = if sol.converged { EXIT_OK } else { EXIT_FAILED };
        if !sol.converged {
            let _ = writeln!(
                stderr,
                "not converged after {} iterations",
                sol.picard_iters
            );
        }
        Ok(CommandOutput {
            stdout: out,
            stderr,
            code,
        })
    };
    run().unwrap_or_else(error_output)
}

/// Fixed-point solution against the direct time-stepper on the same grid.
pub fn cmd_oracle_compare(spec: &ProblemSpec, settings: &Settings) -> CommandOutput {
    let run = || -> Result<CommandOutput> {
        let grid = settings.grid()?;
        let sol = picard_solve(spec, &grid, &settings.solve)?;
        let oracle = direct_coupled_solve(spec, &grid)?;
        let diff: Vec<f64> = sol
            .y
            .values()
            .iter()
            .zip(oracle.y.values())
            .map(|(a, b)| (a - b).abs())
            .collect();
        let sup = diff.iter().copied().fold(0.0, f64::max);
        let t: Vec<f64> = grid.nodes().collect();
        let mut out = csv(
            &["t", "y_solver", "y_oracle", "abs_diff"],
            &[&t, sol.y.values(), oracle.y.values(), &diff],
        );
        meta(&mut out, "sup_diff", fmt_num(sup));
        meta(&mut out, "agree_tol", fmt_num(settings.agree_tol));
        meta(&mut out, "solver_converged", sol.converged);
        let ok = sup <= settings.agree_tol && sol.converged;
        let stderr = if ok {
            String::new()
        } else {
            format!(
                "disagreement {} exceeds {}\n",
                fmt_num(sup),
                fmt_num(settings.agree_tol)
            )
        };
        Ok(CommandOutput {
            stdout: out,
            stderr,
            code: if ok { EXIT_OK } else { EXIT_FAILED },
        })
    };
    run().unwrap_or_else(|e| match e {
        Error::OracleFailure(m) => CommandOutput {
            stdout: String::new(),
            stderr: format!("oracle failure: {m}\n"),
            code: EXIT_FAILED,
        },
        e => error_output(e),
    })
}

/// Reads a numeric CSV column back (skipping `#` lines and the header).
pub fn read_column(csv_text: &str, name: &str) -> Option<Vec<f64>> {
    let mut lines = csv_text.lines().filter(|l| !l.starts_with('#'));
    let idx = lines.next()?.split(',').position(|h| h == name)?;
    lines.map(|l| l.split(',').nth(idx)?.parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ForcingTerm;

    fn spec(
        phi1: &[(f64, f64)],
        phi2: &[(f64, f64)],
        y0: f64,
        v0: f64,
        horizon: f64,
    ) -> ProblemSpec {
        ProblemSpec::new(
            OrderWeight::atoms(phi1).unwrap(),
            OrderWeight::atoms(phi2).unwrap(),
            ForcingTerm::Zero,
            y0,
            v0,
            horizon,
            2.0,
        )
        .unwrap()
    }

    fn settings(s: &ProblemSpec, n: usize) -> Settings {
        Settings::from_run(
            s,
            &RunOptions {
                n_steps: n,
                ..RunOptions::default()
            },
        )
    }

    #[test]
    fn check_exit_codes() {
        let bad = spec(&[(1.0, 0.0)], &[(1.0, 1.0), (-1.0, 0.0)], 0.0, 0.0, 1.0);
        let out = cmd_check(&bad);
        assert_eq!(out.code, EXIT_NOT_ADMISSIBLE);
        assert!(out.stdout.contains("winding_count = 1"), "{}", out.stdout);
        let ok = spec(&[(1.0, 0.0)], &[(1.0, 0.5), (1.0, 0.0)], 0.0, 0.0, 1.0);
        assert_eq!(cmd_check(&ok).code, EXIT_OK);
        let edge = spec(
            &[(1.0, 0.0)],
            &[(1.0, 1.5), (-1.0, 0.5), (2f64.sqrt(), 0.0)],
            0.0,
            0.0,
            1.0,
        );
        assert_eq!(cmd_check(&edge).code, EXIT_BOUNDARY);
    }

    #[test]
    fn solve_harmonic_csv() {
        let s = spec(&[(1.0, 0.0)], &[(1.0, 0.0)], 1.0, 0.0, 1.0);
        let out = cmd_solve(&s, &settings(&s, 400));
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let t = read_column(&out.stdout, "t").unwrap();
        let y = read_column(&out.stdout, "y").unwrap();
        let err = t
            .iter()
            .zip(&y)
            .map(|(t, y)| (y - t.cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3);
        assert!(out.stdout.contains("# class mild = "));
    }

    #[test]
    fn kernel_csv_matches_mittag_leffler() {
        use crate::oracles::{mittag_leffler, MLParams};
        let s = spec(&[(1.0, 0.0)], &[(1.0, 0.5), (1.0, 0.0)], 0.0, 0.0, 2.0);
        let out = cmd_kernel(&s, &settings(&s, 200));
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.starts_with("# regularity = "));
        let t = read_column(&out.stdout, "t").unwrap();
        let l = read_column(&out.stdout, "l").unwrap();
        for (t, l) in t.iter().zip(&l).filter(|p| *p.0 >= 0.05) {
            let want =
                mittag_leffler(MLParams::new(0.5, 0.5, -t.sqrt()).unwrap()).unwrap() / t.sqrt();
            assert!((l - want).abs() < 1e-4, "t={t}");
        }
    }

    #[test]
    fn kernel_refusal_codes() {
        let bad = spec(&[(1.0, 0.0)], &[(1.0, 1.0), (-1.0, 0.0)], 0.0, 0.0, 1.0);
        assert_eq!(
            cmd_kernel(&bad, &settings(&bad, 10)).code,
            EXIT_NOT_ADMISSIBLE
        );
    }

    #[test]
    fn oracle_compare_agrees() {
        let s = spec(&[(1.0, 0.0)], &[(1.0, 0.0)], 1.0, 0.0, 0.5);
        let out = cmd_oracle_compare(&s, &settings(&s, 400));
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let cont = ProblemSpec {
            phi2: OrderWeight::exponential(1.2).unwrap(),
            ..s
        };
        let out = cmd_oracle_compare(&cont, &settings(&cont, 40));
        assert_eq!(out.code, EXIT_FAILED);
        assert!(out.stderr.starts_with("oracle failure"));
    }
}
