//! Random graphs grown by three-vertex interactions with preferential
//! attachment.
//!
//! * [`params`]: model parameters and derived constants,
//! * [`theory`]: exact and asymptotic limit distributions,
//! * [`sim`]: the stochastic process itself,
//! * [`analysis`]: comparison of simulated graphs with the theory.

pub mod analysis;
pub mod params;
pub mod scalar;
pub mod sim;
pub mod theory;

pub use params::{Constants, DerivedConstants, ExactConstants, ModelParams, ParamError};
