//! Simulation library for a laser-driven dissipative optomechanical system
//! with cross-Kerr-enhanced single-photon coupling.
//!
//! The crate is organized along the computation pipeline:
//!
//! * [`params`] — parameter model, unit conventions, validation;
//! * [`steadystate`] — classical steady states, occupations, effective
//!   coupling, and the coupling-regime classification;
//! * [`dynamics`] — linearized fluctuation drift matrices plus
//!   Routh-Hurwitz and eigenvalue stability verdicts;
//! * [`scattering`] — input-output scattering matrices, transmission
//!   probabilities, vacuum contributions, spectral sweeps, peak analysis;
//! * [`linalg`] — the fixed-size complex matrix routines behind it all.
//!
//! All frequencies and rates are angular (rad/s). Every type is immutable
//! after construction and every solver is a pure function, so parameter
//! grids can be evaluated in parallel with no shared state.

pub mod dynamics;
pub mod linalg;
pub mod params;
pub mod scattering;
pub mod steadystate;

pub use linalg::C64;
