//! Semiclassical two- and three-level laser models.
//!
//! * [`model`]: parameter and state types, physical ↔ dimensionless reduction.
//! * [`steady`]: closed-form steady-state photon numbers, thresholds, lasing
//!   windows and optimum pump rates.
//! * [`dynamics`]: phase-reduced Maxwell–Bloch equations, an adaptive
//!   Dormand–Prince integrator and fixed-point detection.
//! * [`numerics`]: root bracketing, golden-section maximization, the
//!   algebraic steady-state oracle and pump sweeps.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod steady;

pub use error::{DynamicsError, ModelError, NumericsError};
pub use model::{
    BlochState2, BlochState3, DimensionlessSchemeA, DimensionlessSchemeB, DimensionlessThreeLevel,
    DimensionlessTwoLevel, PhysicalThreeLevel, PhysicalTwoLevel, Regime, Scheme, SteadyResult,
};
