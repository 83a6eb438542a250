use super::ProblemSpec;
use crate::dist_order::TIME_QUADRATURE_NODES;
use crate::error::{Error, Result};
use crate::laplace::FundamentalSolution;
use crate::quadrature::rgamma;

/// Largest certified time `δ` together with the constants of the self-map bound
/// `D_δ M_δ r + C_δ r^α + |v₀|δ + |y₀| ≤ r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// `∫|φ₁(γ)| t^{2−γ}/Γ(3−γ) dγ`
    pub m_delta: f64,
    /// `∫₀ᵗ |l|`
    pub d_delta: f64,
    /// `∫₀ᵗ h(x)(t − x) dx`
    pub c_delta: f64,
    pub alpha: f64,
    pub radius: f64,
    /// `r − lhs`, nonnegative
    pub slack: f64,
}

/// Evaluates the self-map bound at time `t`. `D_t` is read from the kernel
/// grid at the first node `≥ t`, which over-estimates it.
pub fn self_map_bound(
    problem: &ProblemSpec,
    kernel: &FundamentalSolution,
    t: f64,
) -> DeltaEstimate {
    let mass = kernel.abs_mass();
    bound_with(problem, kernel, &mass, t)
}

fn bound_with(
    problem: &ProblemSpec,
    kernel: &FundamentalSolution,
    mass: &[f64],
    t: f64,
) -> DeltaEstimate {
    let grid = kernel.regular.grid();
    let j = ((t / grid.step()).ceil() as usize).min(grid.n_steps());
    let d = mass[j];
    let m: f64 = problem
        .phi1
        .terms(TIME_QUADRATURE_NODES)
        .iter()
        .map(|&(c, g)| c.abs() * t.powf(2.0 - g) * rgamma(3.0 - g))
        .sum();
    let (c, alpha) = problem.forcing.growth_moment(t);
    let r = problem.ball_radius;
    let lhs = d * m * r + c * r.powf(alpha) + problem.v0.abs() * t + problem.y0.abs();
    DeltaEstimate {
        delta: t,
        m_delta: m,
        d_delta: d,
        c_delta: c,
        alpha,
        radius: r,
        slack: r - lhs,
    }
}

/// Bisects for the largest `δ ≤ min(horizon, kernel horizon)` at which the map
/// sends the ball of radius `r` into itself.
pub fn delta_estimate(
    problem: &ProblemSpec,
    kernel: &FundamentalSolution,
) -> Result<DeltaEstimate> {
    problem.validate()?;
    let grid = kernel.regular.grid();
    let mass = kernel.abs_mass();
    let at = |t: f64| bound_with(problem, kernel, &mass, t);
    let top = problem.horizon.min(grid.horizon());
    let full = at(top);
    if full.slack >= 0.0 {
        return Ok(full);
    }
    let h = grid.step().min(top);
    if at(h).slack < 0.0 {
        return Err(Error::NoBall {
            radius: problem.ball_radius,
        });
    }
    let (mut lo, mut hi) = (h, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid).slack >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(lo))
}
