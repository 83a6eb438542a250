//! Solvability of the constitutive law and its fundamental kernel.

mod admissibility;
mod kernel;
mod talbot;

pub use admissibility::{bracket_zero_region, check_a0, AdmissibilityReport, AxisZero, Verdict};
pub use kernel::{
    fundamental_solution, fundamental_solution_with, FundamentalSolution, Regularity,
};
pub use talbot::{talbot_ilt, DEFAULT_TALBOT_NODES};
