//! Classical emulation of Schrödingerised elastic wave simulations.
//!
//! The crate assembles semi-discrete elastic wave systems (spectral symmetric
//! velocity–stress, staggered-grid velocity–stress and the first-order
//! displacement system), maps them to Hamiltonian systems with the warped phase
//! transformation, evolves them, recovers the physical fields and compares
//! against classical references. Resource formulas for the corresponding
//! quantum algorithms are in [`resources`].

pub mod eigen;
mod error;
pub mod evolution;
pub mod formulations;
pub mod grid;
pub mod medium;
pub mod operator;
pub mod recovery;
pub mod reference;
pub mod resources;
pub mod schrodinger;
pub mod spectral;
pub mod stencil;

pub use error::{Error, Result};
pub use faer::c64;
pub use grid::{Grid1D, PGrid};
pub use operator::Operator;
