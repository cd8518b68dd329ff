//! Steady 3D transonic shocks in a cylindrical nozzle sector.
//!
//! The background is a radially symmetric normal shock. Perturbations of the
//! inlet state and exit pressure are carried through a supersonic march, a
//! shock-fitted coordinate change, characteristic transport of `B`, `K` and
//! the first vorticity component, and a deformation-curl elliptic solve,
//! iterated to a fixed point.

pub mod background;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod fixed_point;
pub mod gas;
pub mod geometry;
pub mod grid;
pub mod inflow;
pub mod modal;
pub mod rh;
pub mod runner;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

pub type GasModel = gas::GasModel<f64>;
pub type FlowState = gas::FlowState<f64>;
pub type PerturbationState = gas::PerturbationState<f64>;
pub use background::{BackgroundCoefficients, BackgroundSolution, Geometry, InletState};
