//! szkit: a numerical toolkit for symplectic dynamics at desk scale.
//!
//! The crate computes Conley-Zehnder indices of symplectic matrix paths,
//! winding numbers of unitary loops and first Chern numbers of sphere
//! bundles via trivialization transition loops, Hamiltonian flows with
//! periodic-orbit search and twist classification, Hofer semi-norms and
//! distances, action functionals and spectra, and Riemannian
//! center-of-mass bounding discs on model phase spaces (flat space, flat
//! tori, the round two-sphere).
//!
//! Conventions are fixed once in [`linalg`] (the symplectic form, the
//! complex structure, the Hamiltonian vector field sign) and every other
//! module inherits them; the `verify` module cross-validates the whole
//! stack with end-to-end experiments.

pub mod action;
pub mod chern;
pub mod config;
pub mod cz;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod hofer;
pub mod io;
pub mod linalg;
pub mod sampling;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
