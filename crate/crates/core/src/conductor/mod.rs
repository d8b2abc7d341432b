//! Perfect conductors: induced surface charge and current by a flat-panel
//! boundary element method, and the shielding and force-consistency checks
//! built on them.

pub mod charge;
pub mod current;
mod quadrature;
pub mod shield;

pub use charge::{solve_induced_charge, ChargeSolver, InducedChargeSolution};
pub use current::{solve_induced_current, CurrentSolver, InducedCurrentSolution};
pub use quadrature::NEAR_FIELD_RATIOS;
pub use shield::*;
