//! Fourier pseudospectral matrices and fast transforms on periodic grids.
//!
//! With nodes `x_j = a + j·h` and frequencies `μ_l = 2π(l − M/2)/(b − a)`, the
//! synthesis matrix is `Φ_{jl} = e^{iμ_l x_j}` and `Φ^{-1} = Φ^†/M`.

use std::sync::Arc;

use faer::Mat;
use rustfft::{Fft, FftPlanner};

use crate::grid::{fourier_frequencies, Grid1D};
use crate::{c64, Operator};

/// Dense spectral matrices for one grid axis.
#[derive(Clone, Debug)]
pub struct SpectralOperators {
    pub phi: Mat<c64>,
    pub phi_inv: Mat<c64>,
    pub mu: Vec<f64>,
    pub pmu: Mat<c64>,
}

impl SpectralOperators {
    pub fn new(grid: &Grid1D) -> Self {
        let m = grid.len();
        let mu = grid.frequencies();
        let x = grid.nodes();
        let phi = Mat::<c64>::from_fn(m, m, |j, l| c64::cis(mu[l] * x[j]));
        let phi_inv = Mat::<c64>::from_fn(m, m, |l, j| phi[(j, l)].conj() / m as f64);
        let dphi = Mat::<c64>::from_fn(m, m, |j, l| phi[(j, l)] * mu[l]);
        let pmu = &dphi * &phi_inv;
        Self { phi, phi_inv, mu, pmu }
    }

    /// `D_μ` as a diagonal operator.
    pub fn dmu(&self) -> Operator {
        Operator::diagonal(&self.mu.iter().map(|&m| c64::new(m, 0.0)).collect::<Vec<_>>())
    }

    pub fn pmu_operator(&self) -> Operator {
        Operator::from_mat(&self.pmu)
    }
}

/// Fast application of `Φ`, `Φ^†` and `Φ^{-1}` for a periodic grid of `n`
/// points starting at `lo` over a window of length `len`.
#[derive(Clone)]
pub struct FourierBasis {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `e^{iμ_l·lo}`
    phase: Vec<c64>,
}

impl std::fmt::Debug for FourierBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierBasis").field("n", &self.n).finish()
    }
}

impl FourierBasis {
    pub fn new(n: usize, lo: f64, len: f64) -> Self {
        let mut planner = FftPlanner::new();
        let mu = fourier_frequencies(n, len);
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            phase: mu.iter().map(|&m| c64::cis(m * lo)).collect(),
        }
    }

    pub fn for_grid(grid: &Grid1D) -> Self {
        Self::new(grid.len(), grid.a(), grid.length())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place `v ← Φ v`.
    pub fn synthesize(&self, v: &mut [c64]) {
        assert_eq!(v.len(), self.n);
        for (x, p) in v.iter_mut().zip(&self.phase) {
            *x *= p;
        }
        self.inverse.process(v);
        for x in v.iter_mut().skip(1).step_by(2) {
            *x = -*x;
        }
    }

    /// In place `v ← Φ^† v` (unnormalised analysis).
    pub fn analyze(&self, v: &mut [c64]) {
        assert_eq!(v.len(), self.n);
        for x in v.iter_mut().skip(1).step_by(2) {
            *x = -*x;
        }
        self.forward.process(v);
        for (x, p) in v.iter_mut().zip(&self.phase) {
            *x *= p.conj();
        }
    }

    /// In place `v ← Φ^{-1} v`.
    pub fn analyze_normalized(&self, v: &mut [c64]) {
        self.analyze(v);
        let s = 1.0 / self.n as f64;
        v.iter_mut().for_each(|x| *x *= s);
    }
}

/// Applies a 1-D in-place transform along every axis of a `d`-dimensional
/// array of side `m` stored row-major (axis 1 slowest).
pub fn apply_along_axes<F>(data: &mut [c64], m: usize, d: usize, f: F)
where
    F: Fn(&mut [c64]),
{
    assert_eq!(data.len(), m.pow(d as u32));
    let mut line = vec![c64::new(0.0, 0.0); m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let outer = data.len() / (m * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * m * stride + s;
                for (k, x) in line.iter_mut().enumerate() {
                    *x = data[base + k * stride];
                }
                f(&mut line);
                for (k, x) in line.iter().enumerate() {
                    data[base + k * stride] = *x;
                }
            }
        }
    }
}
