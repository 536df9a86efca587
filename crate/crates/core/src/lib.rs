//! Lattice simulator for the continuous and instantaneous aspects of the
//! Aharonov-Bohm effect.
//!
//! Units are ħ = m = 1 throughout, and the charge is absorbed into the
//! dimensionless flux `alpha = eΦ/ħc`, the holonomy of the gauge field around
//! the solenoid.
//!
//! * [`grid`] – spatial lattice, wave fields and packet constructors.
//! * [`observables`] – density, current, velocity and the modular-momentum
//!   expectation `⟨exp(i p_x L)⟩`.
//! * [`gauge`] – Peierls link phases in the zero, string and symmetric gauges.
//! * [`propagate`] – the ADI Crank-Nicolson lattice engine, the staged
//!   free-evolution engine, and the line-electron ⊗ cylinder engine.
//! * [`rotor`] – the exactly solvable cylinder/electron rotor pair.
//! * [`scenario`] – drivers producing [`scenario::ScenarioReport`]s.
//! * [`io`] – configuration parsing and file formats.
//! * [`selftest`] – quick example checks behind `abflux selftest`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod gauge;
pub mod grid;
pub mod io;
pub mod observables;
pub mod propagate;
pub mod rotor;
pub mod scenario;
pub mod selftest;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string echoed into every output directory.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
