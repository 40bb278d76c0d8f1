//! First-order hyperbolic displacement system `∂_t w + L w + F = 0`.
//!
//! In three dimensions `w = (ξ, ζ_1, ζ_2, p)` with `ζ_1 = (ζ11, ζ22, ζ33)` and
//! `ζ_2 = (ζ23, ζ13, ζ12)`; in one dimension `w = (ξ, ε, p)` and
//! `−L = B ∂_x` with `B = [[0, 1/ρ, 1/ρ], [2μ, 0, 0], [λ, 0, 0]]`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{dft_components, grid_points, idft_components, FieldSet, Formulation};
use crate::medium::IsotropicMedium;
use crate::operator::lift_axis;
use crate::schrodinger::LinearOdeSystem;
use crate::spectral::SpectralOperators;
use crate::stencil::central_difference_matrix;
use crate::{c64, Error, Grid1D, Operator, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeScheme {
    /// Fourier pseudospectral; the state lives in Fourier space.
    Spectral,
    /// Second-order central differences in physical space.
    Central,
}

impl FromStr for DerivativeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "central" => Ok(Self::Central),
            other => Err(Error::InvalidArgument(format!("unknown derivative scheme {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DisplacementSystem {
    pub grid: Grid1D,
    pub d: usize,
    pub medium: IsotropicMedium,
    pub scheme: DerivativeScheme,
    /// The dispersion operator `L`; the ODE generator is `−L`.
    pub lgen: Operator,
    /// `F` in the state representation (Fourier space for the spectral scheme).
    pub fvec: Vec<c64>,
    pub w0: Vec<c64>,
}

pub fn component_names(d: usize) -> Vec<String> {
    let names: &[&str] = match d {
        1 => &["xi", "eps", "p"],
        _ => &["xi1", "xi2", "xi3", "zeta11", "zeta22", "zeta33", "zeta23", "zeta13", "zeta12", "p"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn component_count(d: usize) -> usize {
    if d == 1 {
        3
    } else {
        10
    }
}

/// Assembles the system; `force` holds one sample vector per displacement
/// component and `initial` one per component of `w`.
pub fn assemble_displacement(
    grid: &Grid1D,
    medium: &IsotropicMedium,
    d: usize,
    scheme: DerivativeScheme,
    force: Option<&[Vec<f64>]>,
    initial: &[Vec<f64>],
) -> Result<DisplacementSystem> {
    if d != 1 && d != 3 {
        return Err(Error::InvalidArgument(format!("displacement system supports d = 1 or 3, got {d}")));
    }
    medium.validate()?;
    let deriv = match scheme {
        DerivativeScheme::Spectral => SpectralOperators::new(grid).dmu().scale(c64::new(0.0, 1.0)),
        DerivativeScheme::Central => central_difference_matrix(grid),
    };
    let k: Vec<Operator> = (1..=d).map(|a| lift_axis(&deriv, a, d)).collect::<Result<_>>()?;
    let block = grid.len().pow(d as u32);
    let nc = component_count(d);
    let (rho, lam, mu) = (medium.rho, medium.lambda, medium.mu);

    // (row component, column component, coefficient, axis) of −L.
    let mut terms: Vec<(usize, usize, f64, usize)> = Vec::new();
    if d == 1 {
        terms.extend([(0, 1, 1.0 / rho, 0), (0, 2, 1.0 / rho, 0), (1, 0, 2.0 * mu, 0), (2, 0, lam, 0)]);
    } else {
        // ζ_2 = (ζ23, ζ13, ζ12) sits at components 6, 7, 8; M(k) couples
        // ξ_i with ζ_2 entry j through the axis completing {i, j}.
        let m_axis = [[None, Some(2), Some(1)], [Some(2), None, Some(0)], [Some(1), Some(0), None]];
        for i in 0..3 {
            terms.push((i, 3 + i, 1.0 / rho, i));
            terms.push((i, 9, 1.0 / rho, i));
            terms.push((3 + i, i, 2.0 * mu, i));
            terms.push((9, i, lam, i));
            for j in 0..3 {
                if let Some(axis) = m_axis[i][j] {
                    terms.push((i, 6 + j, 1.0 / rho, axis));
                    terms.push((6 + i, j, mu, axis));
                }
            }
        }
    }
    let mut trip = Vec::new();
    for (r, c, coef, axis) in terms {
        for (i, j, v) in k[axis].triplets() {
            trip.push((r * block + i, c * block + j, -coef * v));
        }
    }
    let lgen = Operator::from_triplets(nc * block, nc * block, trip);

    let mut fvec = vec![c64::new(0.0, 0.0); nc * block];
    if let Some(f) = force {
        if f.len() != d || f.iter().any(|v| v.len() != block) {
            return Err(Error::Dimension(format!("force needs {d} components of length {block}")));
        }
        for (c, comp) in f.iter().enumerate() {
            for (j, &x) in comp.iter().enumerate() {
                fvec[c * block + j] = c64::new(x, 0.0);
            }
        }
    }
    if initial.len() != nc || initial.iter().any(|v| v.len() != block) {
        return Err(Error::Dimension(format!("initial state needs {nc} components of length {block}")));
    }
    let mut w0: Vec<c64> = initial.iter().flatten().map(|&x| c64::new(x, 0.0)).collect();
    if scheme == DerivativeScheme::Spectral {
        dft_components(&mut fvec, grid, d);
        dft_components(&mut w0, grid, d);
    }
    Ok(DisplacementSystem { grid: *grid, d, medium: *medium, scheme, lgen, fvec, w0 })
}

impl Formulation for DisplacementSystem {
    fn ode(&self) -> LinearOdeSystem {
        LinearOdeSystem::new(
            self.lgen.scale_real(-1.0),
            self.fvec.iter().map(|x| -x).collect(),
            self.w0.clone(),
        )
        .expect("assembled displacement system is consistent")
    }

    fn state_len(&self) -> usize {
        self.lgen.rows()
    }

    fn decode(&self, state: &[c64]) -> FieldSet {
        let block = self.grid.len().pow(self.d as u32);
        let mut w = state[..self.lgen.rows()].to_vec();
        if self.scheme == DerivativeScheme::Spectral {
            idft_components(&mut w, &self.grid, self.d);
        }
        let values = w.chunks(block).map(|c| c.iter().map(|x| x.re).collect()).collect();
        let nc = component_count(self.d);
        FieldSet { names: component_names(self.d), points: vec![grid_points(&self.grid, self.d); nc], values }
    }
}
