//! Numerical toolkit probing how well the late-time saturation of Krylov
//! complexity tracks quantum chaos.
//!
//! The pipeline: build an Ising chain with a longitudinal-transverse field
//! ([`spin_model`]), restrict everything to the positive-parity sector of
//! its reflection symmetry, run the Lanczos recursion on the Liouvillian for
//! a chosen operator ([`krylov`]), evolve the resulting one-dimensional
//! hopping chain and read off the K-complexity plateau ([`dynamics`]), and
//! compare against the spectral chaos indicator eta ([`spectral`]) across
//! the integrability-chaos transition ([`experiments`]). [`normalize`]
//! rescales the sweep curves onto the eta range for joint plotting.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod krylov;
pub mod normalize;
pub mod spectral;
pub mod spin_model;
pub mod tridiag;

pub use error::{Error, Result};
pub use spin_model::{Axis, Parity, SectorOperator, SpinChainParams};
