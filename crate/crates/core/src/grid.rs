//! Uniform causal grids and the discrete convolution / differencing
//! operators everything else is built on.

use crate::error::{invalid, Result};
use crate::exec::map_nodes;

/// Uniform grid `t_j = j·T/N`, `j = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!(
                "grid horizon must be positive, got {horizon}"
            )));
        }
        if n_steps < 2 {
            return Err(invalid(format!(
                "grid needs at least 2 steps, got {n_steps}"
            )));
        }
        Ok(TimeGrid { horizon, n_steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.horizon / self.n_steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.node(j))
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction {
            grid: *self,
            values: self.nodes().map(f).collect(),
        }
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction {
            grid: *self,
            values: vec![0.0; self.len()],
        }
    }
}

/// Convenience wrapper for [`TimeGrid::new`].
pub fn make_grid(horizon: f64, n_steps: usize) -> Result<TimeGrid> {
    TimeGrid::new(horizon, n_steps)
}

/// Samples of a causal function (zero for `t < 0`) on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "grid function has {} samples, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// `self + c·other`
    pub fn add_scaled(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        same_grid(self, other)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_diff(&self, other: &GridFunction) -> Result<f64> {
        same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Linear interpolation; clamps outside `[0, T]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let h = self.grid.step();
        if t <= 0.0 {
            return self.values[0];
        }
        let x = t / h;
        let j = x.floor() as usize;
        if j >= self.grid.n_steps {
            return self.last();
        }
        let w = x - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }
}

pub(crate) fn same_grid(u: &GridFunction, v: &GridFunction) -> Result<()> {
    if u.grid != v.grid {
        return Err(invalid("grid functions live on different grids"));
    }
    Ok(())
}

/// Trapezoidal product quadrature of `∫₀^{t_n} u(τ) v(t_n − τ) dτ`; zero at `t_0`.
pub fn conv_causal(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    same_grid(u, v)?;
    let h = u.grid.step();
    let (a, b) = (&u.values, &v.values);
    let values = map_nodes(u.len(), |n| {
        if n == 0 {
            return 0.0;
        }
        let mut acc = 0.5 * (a[0] * b[n] + a[n] * b[0]);
        for j in 1..n {
            acc += a[j] * b[n - j];
        }
        h * acc
    });
    Ok(GridFunction::from_vec_unchecked(u.grid, values))
}

/// Riemann–Stieltjes convolution `∫ g(t_n − τ) dK(τ)` for a kernel given by its
/// running integral `K(t) = ∫₀ᵗ l`. `g` is taken at cell midpoints.
pub fn stieltjes_conv(cumulative: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    same_grid(cumulative, g)?;
    let k = &cumulative.values;
    let gv = &g.values;
    let values = map_nodes(g.len(), |n| {
        let mut acc = 0.0;
        for j in 0..n {
            let mid = 0.5 * (gv[n - j] + gv[n - j - 1]);
            acc += mid * (k[j + 1] - k[j]);
        }
        acc
    });
    Ok(GridFunction::from_vec_unchecked(g.grid, values))
}

/// Discrete first derivative: central differences inside, second-order
/// one-sided at the two ends.
pub fn diff1(y: &GridFunction) -> Result<GridFunction> {
    let n = y.grid.n_steps;
    if n < 2 {
        return Err(invalid("first difference needs N >= 2"));
    }
    let h = y.grid.step();
    let v = &y.values;
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for j in 1..n {
        out[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    }
    out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    Ok(GridFunction::from_vec_unchecked(y.grid, out))
}

/// Discrete second derivative: central differences inside, four-point
/// second-order one-sided stencils at the ends.
pub fn diff2(y: &GridFunction) -> Result<GridFunction> {
    let n = y.grid.n_steps;
    if n < 4 {
        return Err(invalid(format!("second difference needs N >= 4, got {n}")));
    }
    let h2 = y.grid.step() * y.grid.step();
    let v = &y.values;
    let mut out = vec![0.0; n + 1];
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    for j in 1..n {
        out[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / h2;
    }
    out[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / h2;
    Ok(GridFunction::from_vec_unchecked(y.grid, out))
}

/// Trapezoidal integral over the whole grid.
pub fn trapezoid(y: &GridFunction) -> f64 {
    let v = &y.values;
    let n = v.len() - 1;
    let inner: f64 = v[1..n].iter().sum();
    y.grid.step() * (0.5 * (v[0] + v[n]) + inner)
}
