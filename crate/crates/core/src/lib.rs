//! Solver for a second-order oscillator coupled to a distributed-order
//! viscoelastic constitutive law:
//!
//! ```text
//! y''(t) + z(t) = f(t, y(t)),
//! ∫ φ₁(γ) D^γ y dγ = ∫ φ₂(γ) D^γ z dγ,
//! y(0) = y₀, y'(0) = v₀,
//! ```
//!
//! where `D^γ` is the Riemann–Liouville derivative. The pipeline is:
//!
//! 1. check that the symbol `F(s) = ⟨φ₂, s^γ⟩` has no zeros in `Re s > 0`
//!    ([`laplace::check_a0`]),
//! 2. build the fundamental kernel `l = L⁻¹(1/F)` by Talbot inversion
//!    ([`laplace::fundamental_solution`]),
//! 3. iterate the fixed-point map
//!    `Ty = −l * ∫φ₁ I^{2−γ}y dγ + I²f(·,y) + v₀t + y₀` ([`solver::picard_solve`]),
//! 4. recover `z`, report residuals, dissipation work and the solution class.
//!
//! Everything runs on a uniform grid ([`grid::TimeGrid`]). Inner loops that are
//! independent per output node run on rayon when the `parallel` feature is on
//! (the default); results are bit-identical either way because every per-node
//! reduction is sequential.

pub mod cli;
pub mod dist_order;
pub mod error;
mod exec;
pub mod fracops;
pub mod grid;
pub mod laplace;
pub mod oracles;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{GridFunction, TimeGrid};
