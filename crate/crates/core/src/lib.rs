//! Tunnel splittings of one-dimensional asymmetric double wells.
//!
//! The semiclassical splitting of the ground doublet is computed from the
//! barrier action and the well frequencies, refined to first order in the
//! bias over the oscillator quantum, and checked against a direct solve of
//! the matching condition and a finite-difference reference spectrum.

pub mod action;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod potential;
pub mod splitting;

pub use error::{Error, Result};
