use num_complex::Complex64;

use super::classify::{classify_solution, Classification};
use super::delta::{delta_estimate, DeltaEstimate};
use super::operators::FixedPointMap;
use super::ProblemSpec;
use crate::dist_order::{distributed_derivative, symbol_eval_unchecked, TIME_QUADRATURE_NODES};
use crate::error::{invalid, Error, Result};
use crate::exec::try_map_nodes;
use crate::grid::{diff1, diff2, same_grid, trapezoid, GridFunction, TimeGrid};
use crate::laplace::{
    fundamental_solution, talbot_ilt, FundamentalSolution, Regularity, DEFAULT_TALBOT_NODES,
};
use crate::quadrature::rgamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// relaxation `ω ∈ (0, 1]`
    pub damping: f64,
    /// compute the self-map certificate for the grid horizon
    pub certify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 200,
            damping: 1.0,
            certify: true,
        }
    }
}

/// A computed `(y, z)` pair with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionPair {
    pub y: GridFunction,
    pub z: GridFunction,
    /// `f(·, y) − y''` from the equation of motion
    pub z_ode: GridFunction,
    /// end of the interval actually solved on
    pub delta_used: f64,
    pub certificate: Option<DeltaEstimate>,
    /// the grid horizon lies within the certified `δ`
    pub certified: bool,
    pub picard_iters: usize,
    pub converged: bool,
    /// `sup|Ty − y|`
    pub fixed_point_residual: f64,
    /// `sup_{t>0} |∫φ₁D^γy − ∫φ₂D^γz|`
    pub constitutive_residual: f64,
    /// `sup|z − z_ode|`
    pub ode_residual: f64,
    pub dissipation_work: f64,
    pub classification: Classification,
    pub kernel_regularity: Regularity,
    pub warnings: Vec<String>,
}

/// Picard iteration `y ← (1−ω)y + ω·Ty` from `y₀ + v₀t`.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged == false`. A non-finite iterate is.
pub fn picard_solve(
    problem: &ProblemSpec,
    grid: &TimeGrid,
    opts: &SolveOptions,
) -> Result<SolutionPair> {
    problem.validate()?;
    if !(opts.tol > 0.0) {
        return Err(invalid(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(invalid(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    let kernel = fundamental_solution(&problem.phi2, grid)?;
    let mut warnings = Vec::new();
    let certificate = if opts.certify {
        let cert_problem = ProblemSpec {
            horizon: grid.horizon(),
            ..problem.clone()
        };
        match delta_estimate(&cert_problem, &kernel) {
            Ok(d) => Some(d),
            Err(Error::NoBall { radius }) => {
                warnings.push(format!(
                    "no self-mapping ball of radius {radius}; running uncertified"
                ));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let certified = certificate.is_some_and(|d| d.delta >= grid.horizon());
    if let Some(d) = certificate.filter(|_| !certified) {
        warnings.push(format!(
            "horizon {} exceeds certified delta {}; running uncertified",
            grid.horizon(),
            d.delta
        ));
    }

    let map = FixedPointMap::new(problem, &kernel, grid)?;
    let omega = opts.damping;
    let mut y = map.affine().clone();
    let mut iters = 0;
    let mut converged = false;
    while iters < opts.max_iter {
        iters += 1;
        let ty = map.apply(&y)?;
        let mut next = if omega == 1.0 {
            ty
        } else {
            y.scaled(1.0 - omega).add_scaled(omega, &ty)?
        };
        next.values_mut()[0] = problem.y0;
        if next.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration: iters });
        }
        let step = next.sup_diff(&y)?;
        y = next;
        if step < opts.tol {
            converged = true;
            break;
        }
    }
    let fixed_point_residual = map.apply(&y)?.sup_diff(&y)?;

    let rz = recover_z(problem, &kernel, &y)?;
    let lhs = distributed_derivative(&problem.phi1, &y)?;
    let rhs = distributed_derivative(&problem.phi2, &rz.z)?;
    let constitutive_residual = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .skip(1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dissipation = dissipation_work(&y, &rz.z)?;

    Ok(SolutionPair {
        delta_used: grid.horizon(),
        certificate,
        certified,
        picard_iters: iters,
        converged,
        fixed_point_residual,
        constitutive_residual,
        ode_residual: rz.max_discrepancy,
        dissipation_work: dissipation,
        classification: classify_solution(problem),
        kernel_regularity: kernel.regularity,
        warnings,
        y,
        z: rz.z,
        z_ode: rz.z_ode,
    })
}

/// `z` from the constitutive law and the equation-of-motion cross-check.
#[derive(Debug, Clone)]
pub struct RecoveredZ {
    /// `l * ∫φ₁D^γy dγ`
    pub z: GridFunction,
    /// `f(·, y) − y''`
    pub z_ode: GridFunction,
    pub max_discrepancy: f64,
}

/// `z = l * ∫φ₁(γ)D^γy dγ`.
///
/// The initial-data part `y₀ + v₀t` is split off: its derivatives are
/// distributions at 0 (a point mass for order 1), so `l` convolved with them
/// is inverted directly from `Φ₁(s)(y₀/s + v₀/s²)/F(s)`. The remainder vanishes
/// to second order at 0 and goes through the grid convolution.
pub fn recover_z(
    problem: &ProblemSpec,
    kernel: &FundamentalSolution,
    y: &GridFunction,
) -> Result<RecoveredZ> {
    let grid = y.grid();
    if kernel.regular.grid() != grid {
        return Err(invalid("kernel was built on a different grid"));
    }
    let (y0, v0) = (problem.y0, problem.v0);
    let w = y.add_scaled(-1.0, &grid.sample(|t| y0 + v0 * t))?;
    let core = kernel.convolve(&distributed_derivative(&problem.phi1, &w)?)?;

    let initial = if problem.phi1.is_empty() || (y0 == 0.0 && v0 == 0.0) {
        grid.zeros()
    } else if kernel.regularity == Regularity::Algebraic {
        let terms = problem.phi1.terms(TIME_QUADRATURE_NODES);
        let c = kernel.atomic_coef;
        let vals = (0..grid.len())
            .map(|j| {
                let t = grid.node(j);
                c * terms
                    .iter()
                    .map(|&(b, g)| {
                        b * (y0 * t.powf(-g) * rgamma(1.0 - g)
                            + v0 * t.powf(1.0 - g) * rgamma(2.0 - g))
                    })
                    .sum::<f64>()
            })
            .collect();
        extrapolate_origin(GridFunction::new(*grid, vals)?)
    } else {
        let phi1 = &problem.phi1;
        let phi2 = &problem.phi2;
        let transform = |s: Complex64| {
            let data = Complex64::new(y0, 0.0) / s + Complex64::new(v0, 0.0) / (s * s);
            symbol_eval_unchecked(phi1, s) * data / symbol_eval_unchecked(phi2, s)
        };
        let vals = try_map_nodes(grid.len(), |j| {
            if j == 0 {
                Ok(f64::NAN)
            } else {
                talbot_ilt(transform, grid.node(j), DEFAULT_TALBOT_NODES)
            }
        })?;
        extrapolate_origin(GridFunction::new(*grid, vals)?)
    };
    let z = core.add_scaled(1.0, &initial)?;

    let f = &problem.forcing;
    let ypp = diff2(y)?;
    let z_ode = GridFunction::new(
        *grid,
        (0..grid.len())
            .map(|j| f.eval(grid.node(j), y.values()[j]) - ypp.values()[j])
            .collect(),
    )?;
    let max_discrepancy = z.sup_diff(&z_ode)?;
    Ok(RecoveredZ {
        z,
        z_ode,
        max_discrepancy,
    })
}

/// Replaces a non-finite value at `t = 0` by linear extrapolation.
fn extrapolate_origin(mut g: GridFunction) -> GridFunction {
    let v = g.values_mut();
    if !v[0].is_finite() {
        let e = 2.0 * v[1] - v[2];
        v[0] = if e.is_finite() { e } else { 0.0 };
    }
    g
}

/// `A_d = ∫₀ᵀ z y' dt` (trapezoid, discrete `y'`).
pub fn dissipation_work(y: &GridFunction, z: &GridFunction) -> Result<f64> {
    same_grid(y, z)?;
    let dy = diff1(y)?;
    let prod = GridFunction::new(
        *y.grid(),
        z.values()
            .iter()
            .zip(dy.values())
            .map(|(a, b)| a * b)
            .collect(),
    )?;
    Ok(trapezoid(&prod))
}
