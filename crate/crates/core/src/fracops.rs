//! Riemann–Liouville fractional integrals and derivatives on grid functions.
//!
//! `I^γ` uses product-trapezoid weights: `y` is treated as piecewise linear
//! between nodes and the kernel `(t−τ)^{γ−1}/Γ(γ)` is integrated exactly on each
//! cell. This stays well defined for the weakly singular kernels `γ < 1`.
//! `D^γ` is `d^k/dt^k ∘ I^{k−γ}` with `k = ⌈γ⌉`.

use crate::error::{invalid, Result};
use crate::exec::map_nodes;
use crate::grid::{diff1, diff2, GridFunction, TimeGrid};
use crate::quadrature::gamma;

/// Samples of `f_α(t) = H(t) t^{α−1}/Γ(α)`.
///
/// For `α < 1` the kernel is unbounded at 0, so node 0 holds the average of
/// `f_α` over the first cell, `h^{α−1}/Γ(α+1)`.
pub fn f_alpha(alpha: f64, grid: &TimeGrid) -> Result<GridFunction> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("f_alpha needs alpha > 0, got {alpha}")));
    }
    let g = gamma(alpha);
    let h = grid.step();
    let mut f = grid.sample(|t| t.powf(alpha - 1.0) / g);
    f.values_mut()[0] = if alpha > 1.0 {
        0.0
    } else if alpha == 1.0 {
        1.0
    } else {
        h.powf(alpha - 1.0) / gamma(alpha + 1.0)
    };
    Ok(f)
}

/// A linear combination `Σ c_q I^{γ_q}` of product-trapezoid integrals,
/// collapsed into one set of weights.
///
/// `(Σ c_q I^{γ_q} y)(t_n) = start[n]·y₀ + Σ_{j=1}^{n−1} toeplitz[n−j]·y_j + diag·y_n`.
/// Building it costs O(N) per term; applying it is a single O(N²) pass no matter
/// how many orders went in, which is what makes the continuous-weight operators
/// affordable inside the fixed-point loop.
#[derive(Debug, Clone)]
pub struct IntegralWeights {
    grid: TimeGrid,
    start: Vec<f64>,
    toeplitz: Vec<f64>,
    diag: f64,
}

impl IntegralWeights {
    pub fn zero(grid: &TimeGrid) -> Self {
        let n = grid.len();
        IntegralWeights {
            grid: *grid,
            start: vec![0.0; n],
            toeplitz: vec![0.0; n],
            diag: 0.0,
        }
    }

    /// Weights of `c·I^γ`, `γ > 0`.
    pub fn single(grid: &TimeGrid, coef: f64, order: f64) -> Result<Self> {
        let mut w = Self::zero(grid);
        w.add_term(coef, order)?;
        Ok(w)
    }

    /// Terms `(coef, order)` are accumulated in the order given.
    pub fn from_terms(grid: &TimeGrid, terms: &[(f64, f64)]) -> Result<Self> {
        let mut w = Self::zero(grid);
        for &(c, g) in terms {
            w.add_term(c, g)?;
        }
        Ok(w)
    }

    pub fn add_term(&mut self, coef: f64, order: f64) -> Result<()> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(invalid(format!(
                "fractional integral order must be > 0, got {order}"
            )));
        }
        let h = self.grid.step();
        let scale = coef * h.powf(order) / gamma(order + 2.0);
        let p = order + 1.0;
        self.diag += scale;
        for k in 1..self.toeplitz.len() {
            let kf = k as f64;
            let c = (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p);
            self.toeplitz[k] += scale * c;
        }
        for n in 1..self.start.len() {
            let nf = n as f64;
            let s = (nf - 1.0).powf(p) - (nf - 1.0 - order) * nf.powf(order);
            self.start[n] += scale * s;
        }
        Ok(())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn apply(&self, y: &GridFunction) -> Result<GridFunction> {
        if *y.grid() != self.grid {
            return Err(invalid("integral weights built for a different grid"));
        }
        let v = y.values();
        let values = map_nodes(v.len(), |n| {
            if n == 0 {
                return 0.0;
            }
            let mut acc = self.start[n] * v[0];
            for j in 1..n {
                acc += self.toeplitz[n - j] * v[j];
            }
            acc + self.diag * v[n]
        });
        Ok(GridFunction::from_vec_unchecked(self.grid, values))
    }
}

/// `I^γ y`; `γ = 0` returns `y` unchanged.
pub fn frac_integral(y: &GridFunction, gamma_order: f64) -> Result<GridFunction> {
    if !(gamma_order >= 0.0) || !gamma_order.is_finite() {
        return Err(invalid(format!(
            "fractional integral order must be >= 0, got {gamma_order}"
        )));
    }
    if gamma_order == 0.0 {
        return Ok(y.clone());
    }
    IntegralWeights::single(y.grid(), 1.0, gamma_order)?.apply(y)
}

/// Derivative order split `γ = k − (k − γ)` with `k = ⌈γ⌉` (`k = 1` at `γ = 1`).
pub(crate) fn derivative_split(gamma_order: f64) -> (usize, f64) {
    if gamma_order == 0.0 {
        (0, 0.0)
    } else if gamma_order <= 1.0 {
        (1, 1.0 - gamma_order)
    } else {
        (2, 2.0 - gamma_order)
    }
}

/// Riemann–Liouville `D^γ y = d^k/dt^k I^{k−γ} y`, `0 ≤ γ < 2`.
///
/// A constant does not differentiate to zero here: `D^γ 1 = t^{−γ}/Γ(1−γ)`.
pub fn frac_derivative(y: &GridFunction, gamma_order: f64) -> Result<GridFunction> {
    if !(0.0..2.0).contains(&gamma_order) {
        return Err(invalid(format!(
            "fractional derivative order must lie in [0, 2), got {gamma_order}"
        )));
    }
    let (k, int_order) = derivative_split(gamma_order);
    let inner = frac_integral(y, int_order)?;
    match k {
        0 => Ok(inner),
        1 => diff1(&inner),
        _ => diff2(&inner),
    }
}
