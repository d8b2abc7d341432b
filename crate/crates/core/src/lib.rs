//! Vacuum-energy interaction between discretized charge/current
//! distributions, interferometric Aharonov-Bohm and Aharonov-Casher phases,
//! and perfect-conductor shielding solved with a flat-panel boundary element
//! method.
//!
//! All quantities are SI. Sources are clouds of [`CurrentElement`]s; the
//! interaction between two subsystems is [`interaction_energy`], and every
//! phase is `-(1/hbar) int dt Delta E_12` along a prescribed arm.

pub mod conductor;
pub mod constants;
pub mod error;
pub mod kernel;
pub mod mesh;
pub mod phases;
pub mod sources;

pub type Vec3 = nalgebra::Vector3<f64>;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use kernel::{
    electric_field, fourier_kernel_check, interaction_energy, magnetic_field, scalar_potential,
    vector_potential, InteractionEnergy, QuadratureSettings, SofteningMode,
};
pub use mesh::{Panel, SurfaceMesh};
pub use phases::{
    ac_arm_phase, ac_arm_phase_pairwise, ac_interaction_energy, ac_loop_difference,
    electric_ab_phase, magnetic_ab_arm_phase, magnetic_ab_loop_difference, winding_number,
    PhaseResult, PotentialTimeline,
};
pub use sources::{
    current_from_wavefunction, discretize_solenoid, discretize_wire, moving_carrier_distribution,
    Carrier, CurrentElement, Distribution, PathSpec, SolenoidSpec, WavefunctionGrid, WireSpec,
};
