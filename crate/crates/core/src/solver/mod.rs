//! Fixed-point solver for the coupled oscillator/constitutive system.

mod classify;
mod delta;
mod forcing;
mod operators;
mod picard;

pub use classify::{classify_solution, Classification, Grant, SolutionClass};
pub use delta::{delta_estimate, self_map_bound, DeltaEstimate};
pub use forcing::{Capabilities, ForcingTerm, Profile};
pub use operators::{j_op, t_op, FixedPointMap};
pub use picard::{
    dissipation_work, picard_solve, recover_z, RecoveredZ, SolutionPair, SolveOptions,
};

use crate::dist_order::OrderWeight;
use crate::error::{invalid, Result};

/// One instance of the initial-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub phi1: OrderWeight,
    pub phi2: OrderWeight,
    pub forcing: ForcingTerm,
    pub y0: f64,
    pub v0: f64,
    /// requested end time
    pub horizon: f64,
    /// radius `r` of the ball the fixed-point map must preserve
    pub ball_radius: f64,
}

impl ProblemSpec {
    pub fn new(
        phi1: OrderWeight,
        phi2: OrderWeight,
        forcing: ForcingTerm,
        y0: f64,
        v0: f64,
        horizon: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        let spec = ProblemSpec {
            phi1,
            phi2,
            forcing,
            y0,
            v0,
            horizon,
            ball_radius,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.y0.is_finite() || !self.v0.is_finite() {
            return Err(invalid("initial data must be finite"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        let floor = self.y0.abs().max(self.v0.abs());
        if !(self.ball_radius > floor && self.ball_radius.is_finite()) {
            return Err(invalid(format!(
                "ball radius {} must exceed max(|y0|, |v0|) = {floor}",
                self.ball_radius
            )));
        }
        Ok(())
    }

    /// Radius used when none is given: twice the larger initial datum, at least 1.
    pub fn default_radius(y0: f64, v0: f64) -> f64 {
        (2.0 * y0.abs().max(v0.abs())).max(1.0)
    }
}
