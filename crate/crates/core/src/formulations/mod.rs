//! Semi-discrete elastic wave formulations.

pub mod displacement;
pub mod smf;
pub mod staggered;

use faer::Mat;

use crate::schrodinger::LinearOdeSystem;
use crate::spectral::{apply_along_axes, FourierBasis};
use crate::{c64, Grid1D, Operator};

pub use displacement::{assemble_displacement, DerivativeScheme, DisplacementSystem};
pub use smf::{assemble_smf, smf_coefficient_matrices, smf_transform, SmfSystem, SmfTransform};
pub use staggered::{assemble_staggered_vs, StaggeredVsSystem};

/// Physical fields decoded from a state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet {
    pub names: Vec<String>,
    /// Sample coordinates per component.
    pub points: Vec<Vec<Vec<f64>>>,
    pub values: Vec<Vec<f64>>,
}

impl FieldSet {
    pub fn component(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k].as_slice())
    }
}

/// A semi-discrete system together with its map back to physical fields.
pub trait Formulation {
    fn ode(&self) -> LinearOdeSystem;
    /// Number of physical unknowns; the leading entries of any augmented state.
    fn state_len(&self) -> usize;
    fn decode(&self, state: &[c64]) -> FieldSet;
}

pub(crate) fn dense_real(m: &Mat<f64>) -> Operator {
    let mut t = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)] != 0.0 {
                t.push((r, c, c64::new(m[(r, c)], 0.0)));
            }
        }
    }
    Operator::from_triplets(m.nrows(), m.ncols(), t)
}

/// Physical-space node coordinates of a `d`-dimensional periodic grid.
pub(crate) fn grid_points(grid: &Grid1D, d: usize) -> Vec<Vec<f64>> {
    crate::medium::staggered_points(grid, d, &vec![false; d])
}

/// Unnormalised forward DFT (`Φ^†` along every axis) of each component block.
pub(crate) fn dft_components(data: &mut [c64], grid: &Grid1D, d: usize) {
    let basis = FourierBasis::for_grid(grid);
    let block = grid.len().pow(d as u32);
    for chunk in data.chunks_mut(block) {
        apply_along_axes(chunk, grid.len(), d, |v| basis.analyze(v));
    }
}

/// Inverse of [`dft_components`].
pub(crate) fn idft_components(data: &mut [c64], grid: &Grid1D, d: usize) {
    let basis = FourierBasis::for_grid(grid);
    let m = grid.len();
    let block = m.pow(d as u32);
    let scale = 1.0 / m as f64;
    for chunk in data.chunks_mut(block) {
        apply_along_axes(chunk, m, d, |v| {
            basis.synthesize(v);
            v.iter_mut().for_each(|x| *x *= scale);
        });
    }
}
