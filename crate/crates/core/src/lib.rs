//! Free vibration of simply supported curved nanobeams (carbon nanotube
//! arches) under Eringen nonlocal elasticity, with an optional part-through
//! crack modelled as a rotational spring.
//!
//! The pipeline is `model` (physical inputs, nondimensionalization) ->
//! `kernel` (characteristic roots, boundary matrices, determinants) ->
//! `solver` (root bracketing, refinement, mode shapes) -> `sweep`
//! (parameter studies and CSV output), fronted by `cli`.

pub mod cli;
pub mod crack;
pub mod error;
pub mod kernel;
pub mod model;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
