//! Link-level simulator for RIS-aided mmWave MIMO links.
//!
//! The library models a point-to-point mmWave link in which a blocked
//! base-station-to-user channel is restored through a reconfigurable
//! intelligent surface (RIS). Three surface schemes are supported:
//!
//! - **plug-in**: the surface is split into sub-RIS panels, each carrying a
//!   fixed, pre-configured reflection beam toward one spatial segment of the
//!   dead zone; the transmitter illuminates the panel that serves the user.
//! - **semi-passive**: a benchmark surface that re-configures its phases to
//!   the matched (phase-conjugate) profile on every channel realization.
//! - **blind**: a benchmark surface with uniformly random phases.
//!
//! Modules follow the processing chain: [`geometry`] (array responses and
//! beam footprints), [`channel`] (LOS channel synthesis and phase profiles),
//! [`link`] (signal model and ML detection), [`analysis`] (error bounds,
//! rate, power and complexity models), and [`sim`] (scenario presets and the
//! Monte Carlo engine).

pub mod analysis;
pub mod channel;
pub mod geometry;
pub mod link;
pub mod sim;

use std::fmt;

/// Errors reported by library operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a precondition (non-finite value, zero count, ...).
    InvalidInput(String),
    /// The inputs are outside the mathematical domain of the operation.
    Domain(String),
    /// Matrix/vector dimensions do not conform.
    DimensionMismatch(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
