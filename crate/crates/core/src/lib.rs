//! Dynamics of a two-photon Tavis–Cummings atom moving through a standing-wave
//! cavity mode with a dynamical Stark shift.
//!
//! The crate bundles the special functions needed for the closed-form
//! solutions, an adaptive integrator for the semiclassical equations, chaos
//! diagnostics, the atom–field purity in both coupling regimes and a scenario
//! runner that writes plot-ready CSV files.

pub mod analytic;
pub mod chaos;
pub mod error;
pub mod ode;
pub mod quantum;
pub mod scenario;
pub mod semiclassical;
pub mod specfun;

pub use error::{Error, Result};
