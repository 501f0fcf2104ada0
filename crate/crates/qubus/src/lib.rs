//! Exact simulation of qubit–bus conditional-displacement dynamics, plus
//! planners that generate, validate and error-budget bus-operation schedules
//! for 2D cluster-state construction with ancilla reuse.
//!
//! The crate is organized around five pieces:
//!
//! - [`state`]: the exact joint state of a qubit register and one bus, with
//!   the displacement composition rule everything else builds on;
//! - [`planner`] / [`schedule`] / [`search`]: schedule generation for m×n
//!   lattices under four strategies, operation-count formulas, a combinatorial
//!   validator, and an exhaustive edge-bound oracle;
//! - [`budget`]: the dephasing model and brick-size threshold solvers;
//! - [`parallel`] / [`multibus`]: time-slotted multi-bus strip schedules with
//!   collision checking and an exact merged-state simulator;
//! - [`verify`] / [`phase`]: stabilizer verification and effective-unitary
//!   extraction used to certify every constructed schedule.
//!
//! Simulation and budget math are generic over the scalar type via
//! [`Float`](float::Float); concrete `f64` aliases are exported below.

pub mod budget;
pub mod error;
pub mod float;
pub mod lattice;
pub mod multibus;
pub mod parallel;
pub mod phase;
pub mod planner;
pub mod schedule;
pub mod search;
pub mod state;
pub mod verify;

pub use error::{QubusError, Result};
pub use float::{default_beta, default_beta_sq, Float};
pub use lattice::LatticeSpec;
pub use state::{CondDisplacement, HybridState, Quadrature, Sign};

/// `f64` joint state, the default precision for desk-scale verification.
pub type HybridState64 = state::HybridState<f64>;
/// `f32` joint state for reduced-precision experiments.
pub type HybridState32 = state::HybridState<f32>;
/// `f64` conditional displacement.
pub type CondDisplacement64 = state::CondDisplacement<f64>;
/// `f64` noise parameters.
pub type NoiseParams64 = budget::NoiseParams<f64>;
/// `f64` per-branch phase table.
pub type PhaseTable64 = phase::PhaseTable<f64>;
/// `f64` merged multi-bus state.
pub type MultiBusState64 = multibus::MultiBusState<f64>;
