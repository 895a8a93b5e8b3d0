//! Simulation of population-passage quantum gates for electrons floating on
//! liquid helium.
//!
//! The crate is split along the physics pipeline:
//!
//! * [`spectral`]: bound states of the 1D image potential and their dipole
//!   matrix elements.
//! * [`pulses`]: control pulse shapes, pulse areas and the adiabaticity
//!   parameter.
//! * [`dynamics`]: fourth-order Runge-Kutta propagation of state vectors and
//!   of the Euler-angle parametrization of two-level propagators.
//! * [`gates`]: scenario Hamiltonians (single-qubit SCRAP, two-qubit passages),
//!   analytic gate matrices and gate reports.
//! * [`cli`]: configuration, presets and the scenario runner behind the
//!   `he-qubit` binary.
//!
//! Unit conventions: lengths in μm, times in ns, fields in V/m. Hamiltonians
//! handed to the propagators are angular frequencies in rad/ns.

// Negated comparisons below reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod pulses;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
