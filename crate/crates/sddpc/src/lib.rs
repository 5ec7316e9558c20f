//! Sampling-based stochastic data-driven predictive control.
//!
//! From a single persistently exciting input-output trajectory of a disturbed
//! ARX system, this crate builds the set of disturbance data consistent with
//! the recording, per-sample multi-step predictors, offline sampled
//! deterministic approximations of the probabilistic output constraints,
//! data-driven terminal ingredients, and a recursively feasible online QP
//! controller, together with the Monte Carlo machinery to validate the
//! closed loop.

pub mod behavioral;
pub mod consistency;
pub mod controller;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod predictor;
pub mod rng;
pub mod scenario;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
