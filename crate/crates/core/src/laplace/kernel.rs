use std::fmt;

use num_complex::Complex64;

use super::admissibility::{check_a0, Verdict};
use super::talbot::{talbot_ilt, DEFAULT_TALBOT_NODES};
use crate::dist_order::{
    classify_weight, symbol_eval_unchecked, OrderWeight, Phi2Class, WeightRole,
};
use crate::error::{invalid, Error, Result};
use crate::exec::try_map_nodes;
use crate::grid::{GridFunction, TimeGrid};
use crate::quadrature::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// `l = c·δ`: the constitutive law is algebraic in `z`
    Algebraic,
    /// locally integrable, possibly unbounded at 0
    L1Loc,
    /// absolutely continuous on `[0, T]`
    AbsolutelyContinuous,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularity::Algebraic => "algebraic",
            Regularity::L1Loc => "L1loc",
            Regularity::AbsolutelyContinuous => "AC",
        })
    }
}

/// Kernel `l = L⁻¹(1/F)` split into a point mass at 0 and a regular part.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    /// weight of `δ` at 0 (nonzero only when `F` is a constant)
    pub atomic_coef: f64,
    pub regular: GridFunction,
    /// `K(t) = ∫₀ᵗ l`
    pub cumulative: GridFunction,
    pub regularity: Regularity,
}

impl FundamentalSolution {
    /// `l * g`, routed by regularity.
    pub fn convolve(&self, g: &GridFunction) -> Result<GridFunction> {
        match self.regularity {
            Regularity::Algebraic => Ok(g.scaled(self.atomic_coef)),
            Regularity::AbsolutelyContinuous => crate::grid::conv_causal(&self.regular, g),
            Regularity::L1Loc => crate::grid::stieltjes_conv(&self.cumulative, g),
        }
    }

    /// `∫₀^{t_j} |l|` at every node, with the first cell taken from `K`.
    pub fn abs_mass(&self) -> Vec<f64> {
        let n = self.regular.len();
        if self.regularity == Regularity::Algebraic {
            let mut out = vec![self.atomic_coef.abs(); n];
            out[0] = 0.0;
            return out;
        }
        let l = self.regular.values();
        let k = self.cumulative.values();
        if l.iter().all(|&v| v >= 0.0) {
            return k.iter().map(|v| v.max(0.0)).collect();
        }
        let h = self.regular.grid().step();
        let mut out = vec![0.0; n];
        out[1] = k[1].abs();
        for j in 2..n {
            out[j] = out[j - 1] + 0.5 * h * (l[j - 1].abs() + l[j].abs());
        }
        out
    }
}

/// Fundamental kernel of `∫φ₂(γ) D^γ z dγ = g` on `grid` with the default
/// Talbot node count.
pub fn fundamental_solution(phi2: &OrderWeight, grid: &TimeGrid) -> Result<FundamentalSolution> {
    fundamental_solution_with(phi2, grid, DEFAULT_TALBOT_NODES)
}

pub fn fundamental_solution_with(
    phi2: &OrderWeight,
    grid: &TimeGrid,
    talbot_nodes: usize,
) -> Result<FundamentalSolution> {
    match classify_weight(phi2, WeightRole::Phi2) {
        crate::dist_order::WeightClass::Phi2(Phi2Class::AtomicBelowTwo) => {
            atomic_kernel(phi2, grid, talbot_nodes)
        }
        crate::dist_order::WeightClass::Phi2(Phi2Class::ContinuousUnit) => {
            let (regular, cumulative) = invert(phi2, grid, talbot_nodes, None)?;
            Ok(FundamentalSolution {
                atomic_coef: 0.0,
                regular,
                cumulative,
                regularity: Regularity::L1Loc,
            })
        }
        crate::dist_order::WeightClass::Unclassified { reason } => {
            Err(Error::UnsupportedKernel(reason))
        }
        crate::dist_order::WeightClass::Phi1(_) => unreachable!("classified as phi2"),
    }
}

fn atomic_kernel(phi2: &OrderWeight, grid: &TimeGrid, m: usize) -> Result<FundamentalSolution> {
    let OrderWeight::Atomic(atoms) = phi2 else {
        return Err(invalid("expected atomic phi2"));
    };
    let (a0, g0) = (atoms[0].coef, atoms[0].order);
    if g0 == 0.0 {
        if atoms.len() > 1 {
            return Err(Error::UnsupportedKernel(
                "top order 0 with several atoms: 1/F does not decay".into(),
            ));
        }
        return Ok(FundamentalSolution {
            atomic_coef: 1.0 / a0,
            regular: grid.zeros(),
            cumulative: grid.zeros(),
            regularity: Regularity::Algebraic,
        });
    }
    let report = check_a0(phi2)?;
    match report.verdict {
        Verdict::Admissible => {}
        Verdict::NotAdmissible => return Err(Error::NotAdmissible(Box::new(report))),
        Verdict::BoundaryDegenerate => return Err(Error::BoundaryDegenerate(Box::new(report))),
        Verdict::Indeterminate => return Err(Error::Indeterminate(report.notes)),
    }
    let gk = atoms[atoms.len() - 1].order;
    // leading behaviour l(t) ~ t^{γ₀−1}/(a₀Γ(γ₀)) at 0
    let h = grid.step();
    let node0 = if g0 > 1.0 {
        0.0
    } else if g0 == 1.0 {
        1.0 / a0
    } else {
        h.powf(g0 - 1.0) / (a0 * gamma(g0 + 1.0))
    };
    let (regular, cumulative) = invert(phi2, grid, m, Some(node0))?;
    Ok(FundamentalSolution {
        atomic_coef: 0.0,
        regular,
        cumulative,
        regularity: if g0 - gk > 1.0 {
            Regularity::AbsolutelyContinuous
        } else {
            Regularity::L1Loc
        },
    })
}

/// Samples of `L⁻¹(1/F)` and `L⁻¹(1/(sF))` at the grid nodes. Node 0 of the
/// regular part is `node0` if given, else the first-cell average `K(h)/h`.
fn invert(
    phi2: &OrderWeight,
    grid: &TimeGrid,
    m: usize,
    node0: Option<f64>,
) -> Result<(GridFunction, GridFunction)> {
    let inv = |s: Complex64| 1.0 / symbol_eval_unchecked(phi2, s);
    let n = grid.len();
    let mut reg = try_map_nodes(n, |j| {
        if j == 0 {
            Ok(0.0)
        } else {
            talbot_ilt(inv, grid.node(j), m)
        }
    })?;
    let cum = try_map_nodes(n, |j| {
        if j == 0 {
            Ok(0.0)
        } else {
            talbot_ilt(|s| inv(s) / s, grid.node(j), m)
        }
    })?;
    reg[0] = node0.unwrap_or(cum[1] / grid.step());
    Ok((
        GridFunction::new(*grid, reg)?,
        GridFunction::new(*grid, cum)?,
    ))
}
