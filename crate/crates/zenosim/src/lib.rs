//! Simulation of a driven three-level atom whose unitary evolution is
//! interrupted by projective measurements.
//!
//! The crate covers:
//! - Rabi dynamics of the double-transition ladder system, with a closed-form
//!   propagator and an independent eigendecomposition route ([`dynamics`]).
//! - Projective reduction, discrete measurement schedules, and survival-curve
//!   sampling ([`measurement`]).
//! - A Lindblad master equation whose dephasing rate can model pulsed
//!   measurements of finite strength ([`master`]).
//! - Recurrence-time references and detection of measurement-enhanced or
//!   measurement-suppressed decay over a time window ([`analysis`]).
//! - Experiment configuration, batch runs, and CSV / SVG / JSON output
//!   ([`config`], [`experiment`], [`output`]).

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod master;
pub mod measurement;
pub mod output;

pub use error::{Error, Result};
