//! Independent reference computations used to cross-check the main pipeline:
//! Mittag-Leffler series, the power rule, polynomial root finding for
//! rational-order symbols, and a Grünwald–Letnikov time-stepper for the
//! coupled system.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::dist_order::{Atom, OrderWeight};
use crate::error::{invalid, Error, Result};
use crate::grid::{GridFunction, TimeGrid};
use crate::quadrature::{gamma, ln_gamma};
use crate::solver::ProblemSpec;

/// Largest argument accepted by [`mittag_leffler`].
pub const ML_MAX_ARG: f64 = 10.0;
const ML_MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64, x: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!(
                "Mittag-Leffler needs alpha, beta > 0, got {alpha}, {beta}"
            )));
        }
        if !x.is_finite() {
            return Err(invalid("Mittag-Leffler argument must be finite"));
        }
        Ok(MLParams { alpha, beta, x })
    }
}

/// `E_{α,β}(x) = Σ x^k / Γ(αk + β)` by direct summation, `|x| ≤ 10`.
pub fn mittag_leffler(p: MLParams) -> Result<f64> {
    let MLParams { alpha, beta, x } = p;
    if x.abs() > ML_MAX_ARG {
        return Err(Error::Domain(format!(
            "|x| = {} exceeds {ML_MAX_ARG}",
            x.abs()
        )));
    }
    if x == 0.0 {
        return Ok(1.0 / gamma(beta));
    }
    // Neumaier summation
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let ln_x = x.abs().ln();
    for k in 0..ML_MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let mag = if arg < 170.0 && k < 300 {
            x.abs().powi(k as i32) / gamma(arg)
        } else {
            (k as f64 * ln_x - ln_gamma(arg)).exp()
        };
        let term = if x < 0.0 && k % 2 == 1 { -mag } else { mag };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if k > 0 && mag < 1e-16 * (sum + comp).abs() && alpha * k as f64 + beta > 2.0 {
            return Ok(sum + comp);
        }
    }
    Err(Error::Domain(format!(
        "series for E_({alpha},{beta})({x}) did not converge in {ML_MAX_TERMS} terms"
    )))
}

/// `I^γ t^p = Γ(p+1)/Γ(p+1+γ) · t^{p+γ}`.
pub fn power_rule_reference(gamma_order: f64, p: f64, t: f64) -> f64 {
    (ln_gamma(p + 1.0) - ln_gamma(p + 1.0 + gamma_order)).exp() * t.powf(p + gamma_order)
}

/// Zeros of `Σ aᵢ s^{γᵢ}` in `Re s > 0` (with multiplicity) for orders sharing
/// a denominator `q ≤ 12`, found as companion-matrix eigenvalues in `w = s^{1/q}`.
pub fn halfplane_roots_oracle(phi2: &OrderWeight) -> Result<Vec<Complex64>> {
    let atoms: &[Atom] = match phi2 {
        OrderWeight::Atomic(a) if !a.is_empty() => a,
        _ => {
            return Err(Error::OracleFailure(
                "roots oracle needs a nonempty atomic weight".into(),
            ))
        }
    };
    let q = (1..=12u32)
        .find(|&q| atoms.iter().all(|a| is_integer(a.order * q as f64)))
        .ok_or_else(|| Error::OracleFailure("orders have no common denominator <= 12".into()))?;
    let powers: Vec<i64> = atoms
        .iter()
        .map(|a| (a.order * q as f64).round() as i64)
        .collect();
    let lowest = *powers.iter().min().expect("nonempty");
    let degree = (powers.iter().max().expect("nonempty") - lowest) as usize;
    if degree == 0 {
        return Ok(Vec::new());
    }
    // coeffs[k] multiplies w^k
    let mut coeffs = vec![0.0; degree + 1];
    for (a, p) in atoms.iter().zip(&powers) {
        coeffs[(p - lowest) as usize] += a.coef;
    }
    let lead = coeffs[degree];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    let eigs = companion_eigenvalues(&companion)?;
    let sector = std::f64::consts::PI / (2.0 * q as f64);
    let mut roots: Vec<Complex64> = eigs
        .iter()
        .filter(|w| w.norm() > 0.0 && w.arg().abs() < sector)
        .map(|w| w.powu(q))
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Eigenvalues via a capped real Schur iteration. Companion matrices of
/// `w^n − c` are scaled cyclic permutations on which unshifted-start QR
/// stalls; a diagonal shift breaks the symmetry and is undone afterwards.
fn companion_eigenvalues(c: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = c.nrows();
    for shift in [0.0, 0.37, -0.61] {
        let m = c + DMatrix::<f64>::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(m, f64::EPSILON, 10_000) {
            return Ok(schur
                .complex_eigenvalues()
                .iter()
                .map(|z| Complex64::new(z.re - shift, z.im))
                .collect());
        }
    }
    Err(Error::OracleFailure(
        "companion eigenvalue iteration did not converge".into(),
    ))
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

/// `(y, z)` from the reference time-stepper.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub y: GridFunction,
    pub z: GridFunction,
}

/// Grünwald–Letnikov weights `g_m` of order `γ` (any sign), `m = 0..=n`.
fn gl_weights(order: f64, n: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(n + 1);
    g.push(1.0);
    for m in 1..=n {
        g.push(g[m - 1] * (1.0 - (order + 1.0) / m as f64));
    }
    g
}

/// Marches `y'' + z = f(t, y)`, `Σ bⱼD^{βⱼ}y = Σ aᵢD^{γᵢ}z` with a backward
/// second difference and Grünwald–Letnikov sums, solving each step for
/// `(y_n, z_n)` by eliminating `z_n` and a scalar Newton iteration on `y_n`.
/// Atomic weights only.
pub fn direct_coupled_solve(problem: &ProblemSpec, grid: &TimeGrid) -> Result<CoupledSolution> {
    let atoms_of = |w: &OrderWeight, name: &str| -> Result<Vec<Atom>> {
        match w {
            OrderWeight::Atomic(a) => Ok(a.clone()),
            _ => Err(Error::OracleFailure(format!("{name} must be atomic"))),
        }
    };
    let phi1 = atoms_of(&problem.phi1, "phi1")?;
    let phi2 = atoms_of(&problem.phi2, "phi2")?;
    if phi2.is_empty() {
        return Err(Error::OracleFailure("phi2 has no atoms".into()));
    }
    let n_nodes = grid.len();
    let h = grid.step();
    let f = &problem.forcing;
    let scaled = |atoms: &[Atom]| -> Vec<(f64, Vec<f64>)> {
        atoms
            .iter()
            .map(|a| (a.coef * h.powf(-a.order), gl_weights(a.order, n_nodes)))
            .collect()
    };
    let zs = scaled(&phi2);
    let ys = scaled(&phi1);
    let a_sum: f64 = zs.iter().map(|(c, _)| c).sum();
    let b_sum: f64 = ys.iter().map(|(c, _)| c).sum();
    if a_sum == 0.0 || !a_sum.is_finite() {
        return Err(Error::OracleFailure(
            "constitutive step is singular (sum a h^-gamma = 0)".into(),
        ));
    }
    let history = |terms: &[(f64, Vec<f64>)], v: &[f64], n: usize| -> f64 {
        terms
            .iter()
            .map(|(c, g)| c * (1..=n).map(|m| g[m] * v[n - m]).sum::<f64>())
            .sum()
    };

    let mut y = vec![0.0; n_nodes];
    let mut z = vec![0.0; n_nodes];
    y[0] = problem.y0;
    z[0] = b_sum / a_sum * y[0];
    y[1] = problem.y0 + problem.v0 * h + 0.5 * h * h * (f.eval(0.0, problem.y0) - z[0]);
    z[1] = (b_sum * y[1] + history(&ys, &y, 1) - history(&zs, &z, 1)) / a_sum;
    let ratio = b_sum / a_sum;
    for n in 2..n_nodes {
        let t = grid.node(n);
        let hist = (history(&ys, &y, n) - history(&zs, &z, n)) / a_sum;
        // y_n/h² + ratio·y_n − f(t, y_n) = (2y_{n−1} − y_{n−2})/h² − hist
        let rhs = (2.0 * y[n - 1] - y[n - 2]) / (h * h) - hist;
        let mut u = 2.0 * y[n - 1] - y[n - 2];
        let mut done = false;
        for _ in 0..50 {
            let res = u / (h * h) + ratio * u - f.eval(t, u) - rhs;
            let slope = 1.0 / (h * h) + ratio - f.du(t, u);
            if slope == 0.0 || !slope.is_finite() {
                return Err(Error::OracleFailure(format!(
                    "singular step system at t = {t}"
                )));
            }
            let du = res / slope;
            u -= du;
            if du.abs() <= 1e-14 * (1.0 + u.abs()) {
                done = true;
                break;
            }
        }
        if !done || !u.is_finite() {
            return Err(Error::OracleFailure(format!(
                "Newton step failed at t = {t}"
            )));
        }
        y[n] = u;
        z[n] = ratio * u + hist;
    }
    Ok(CoupledSolution {
        y: GridFunction::new(*grid, y)?,
        z: GridFunction::new(*grid, z)?,
    })
}
