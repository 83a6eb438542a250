use super::ProblemSpec;
use crate::dist_order::{OrderWeight, TIME_QUADRATURE_NODES};
use crate::error::{invalid, Result};
use crate::fracops::IntegralWeights;
use crate::grid::{same_grid, GridFunction, TimeGrid};
use crate::laplace::FundamentalSolution;

/// Weights of `J = ∫φ₁(γ) I^{2−γ} dγ` on `grid`.
pub(crate) fn j_weights(phi1: &OrderWeight, grid: &TimeGrid) -> Result<IntegralWeights> {
    if let Some((_, hi)) = phi1.support() {
        if hi >= 2.0 {
            return Err(invalid(format!("phi1 support reaches order {hi} >= 2")));
        }
    }
    let terms: Vec<(f64, f64)> = phi1
        .terms(TIME_QUADRATURE_NODES)
        .into_iter()
        .map(|(c, g)| (c, 2.0 - g))
        .collect();
    IntegralWeights::from_terms(grid, &terms)
}

/// `Jy = ∫φ₁(γ) I^{2−γ}y dγ`.
pub fn j_op(phi1: &OrderWeight, y: &GridFunction) -> Result<GridFunction> {
    j_weights(phi1, y.grid())?.apply(y)
}

/// The map `Ty = −l * Jy + I²f(·, y) + v₀t + y₀` with its weights precomputed.
pub struct FixedPointMap<'a> {
    problem: &'a ProblemSpec,
    kernel: &'a FundamentalSolution,
    j: IntegralWeights,
    i2: IntegralWeights,
    affine: GridFunction,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(
        problem: &'a ProblemSpec,
        kernel: &'a FundamentalSolution,
        grid: &TimeGrid,
    ) -> Result<Self> {
        if kernel.regular.grid() != grid {
            return Err(invalid("kernel was built on a different grid"));
        }
        let (y0, v0) = (problem.y0, problem.v0);
        Ok(FixedPointMap {
            problem,
            kernel,
            j: j_weights(&problem.phi1, grid)?,
            i2: IntegralWeights::single(grid, 1.0, 2.0)?,
            affine: grid.sample(|t| y0 + v0 * t),
        })
    }

    pub fn affine(&self) -> &GridFunction {
        &self.affine
    }

    pub fn apply(&self, y: &GridFunction) -> Result<GridFunction> {
        same_grid(y, &self.affine)?;
        let r = self.kernel.convolve(&self.j.apply(y)?)?;
        let grid = y.grid();
        let f = &self.problem.forcing;
        let fy: Vec<f64> = y
            .values()
            .iter()
            .enumerate()
            .map(|(j, &u)| f.eval(grid.node(j), u))
            .collect();
        if let Some(j) = fy.iter().position(|v| !v.is_finite()) {
            return Err(crate::Error::Evaluation(format!(
                "forcing is not finite at t = {}",
                grid.node(j)
            )));
        }
        let g = self.i2.apply(&GridFunction::new(*grid, fy)?)?;
        self.affine.add_scaled(-1.0, &r)?.add_scaled(1.0, &g)
    }
}

/// One application of the fixed-point map.
pub fn t_op(
    problem: &ProblemSpec,
    kernel: &FundamentalSolution,
    y: &GridFunction,
) -> Result<GridFunction> {
    FixedPointMap::new(problem, kernel, y.grid())?.apply(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_order::Density;
    use crate::laplace::fundamental_solution;
    use crate::solver::ForcingTerm;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::new(1.0, n).unwrap()
    }

    fn atoms(p: &[(f64, f64)]) -> OrderWeight {
        OrderWeight::atoms(p).unwrap()
    }

    #[test]
    fn j_examples() {
        let g = grid(200);
        let one = g.sample(|_| 1.0);
        let j0 = j_op(&atoms(&[(1.0, 0.0)]), &one).unwrap();
        let exact = g.sample(|t| t * t / 2.0);
        assert!(j0.sup_diff(&exact).unwrap() < 1e-12);
        let j1 = j_op(&atoms(&[(1.0, 1.0)]), &one).unwrap();
        assert!(j1.sup_diff(&g.sample(|t| t)).unwrap() < 1e-12);
    }

    #[test]
    fn j_uniform_density() {
        // ∫₀¹ 1/Γ(3−γ) dγ, reference from adaptive quadrature
        let g = grid(200);
        let phi = OrderWeight::continuous(Density::Constant(1.0), 0.0, 1.0).unwrap();
        let j = j_op(&phi, &g.sample(|_| 1.0)).unwrap();
        assert!((j.last() - 0.7518497).abs() < 2e-3, "{}", j.last());
    }

    #[test]
    fn j_refuses_order_two() {
        let g = grid(10);
        let phi = OrderWeight::continuous(Density::Constant(1.0), 1.0, 2.0).unwrap();
        assert!(j_op(&phi, &g.sample(|_| 1.0)).is_err());
    }

    fn spec(phi1: OrderWeight, phi2: OrderWeight, y0: f64, v0: f64) -> ProblemSpec {
        ProblemSpec::new(phi1, phi2, ForcingTerm::Zero, y0, v0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn t_with_empty_phi1_is_affine() {
        let g = grid(50);
        let p = spec(OrderWeight::zero(), atoms(&[(1.0, 0.5)]), 0.3, -0.1);
        let k = fundamental_solution(&p.phi2, &g).unwrap();
        let ty = t_op(&p, &k, &g.sample(|t| t.sin() * 7.0)).unwrap();
        assert!(ty.sup_diff(&g.sample(|t| 0.3 - 0.1 * t)).unwrap() < 1e-15);
    }

    #[test]
    fn t_algebraic_example() {
        let g = grid(100);
        let w = atoms(&[(1.0, 0.0)]);
        let p = spec(w.clone(), w, 0.0, 0.0);
        let k = fundamental_solution(&p.phi2, &g).unwrap();
        let ty = t_op(&p, &k, &g.sample(|_| 1.0)).unwrap();
        assert!(ty.sup_diff(&g.sample(|t| -t * t / 2.0)).unwrap() < 1e-12);
    }

    #[test]
    fn cosine_is_nearly_fixed() {
        let g = grid(400);
        let w = atoms(&[(1.0, 0.0)]);
        let p = spec(w.clone(), w, 1.0, 0.0);
        let k = fundamental_solution(&p.phi2, &g).unwrap();
        let y = g.sample(f64::cos);
        let ty = t_op(&p, &k, &y).unwrap();
        assert!(ty.sup_diff(&y).unwrap() < 5e-3);
    }

    #[test]
    fn superposition_without_forcing() {
        let g = grid(120);
        let p = spec(
            atoms(&[(1.0, 1.2), (0.5, 0.3)]),
            atoms(&[(1.0, 0.5), (1.0, 0.0)]),
            0.2,
            0.4,
        );
        let k = fundamental_solution(&p.phi2, &g).unwrap();
        let map = FixedPointMap::new(&p, &k, &g).unwrap();
        let t0 = map.apply(&g.zeros()).unwrap();
        let y1 = g.sample(|t| (3.0 * t).sin());
        let y2 = g.sample(|t| t * t - 0.5);
        let lhs = map
            .apply(&y1.add_scaled(2.0, &y2).unwrap())
            .unwrap()
            .add_scaled(-1.0, &t0)
            .unwrap();
        let a = map.apply(&y1).unwrap().add_scaled(-1.0, &t0).unwrap();
        let b = map.apply(&y2).unwrap().add_scaled(-1.0, &t0).unwrap();
        let rhs = a.add_scaled(2.0, &b).unwrap();
        assert!(lhs.sup_diff(&rhs).unwrap() < 1e-10);
    }
}
