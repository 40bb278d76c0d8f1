//! Staggered-grid velocity–stress system for variable media.
//!
//! State layout is `(v_1..v_d, σ_normal.., σ_shear..)`, component-major, with
//! `∂_t (v, σ) = A_H (v, σ)`, `A_H = [[0, R^{-1}L_v], [−C L_vᵀ, 0]]`.

use super::smf::{stress_count, stress_names, velocity_names, VelocityStressFields};
use super::{FieldSet, Formulation};
use crate::medium::{sample_medium, shear_pairs, staggered_points, StaggeredSamples, VariableMedium};
use crate::schrodinger::LinearOdeSystem;
use crate::stencil::staggered_divergence;
use crate::{c64, Error, Grid1D, Operator, Result};

#[derive(Clone, Debug)]
pub struct StaggeredVsSystem {
    pub grid: Grid1D,
    pub d: usize,
    pub samples: StaggeredSamples,
    /// ρ at velocity points.
    pub r: Operator,
    /// Stiffness acting on the stress unknowns.
    pub c: Operator,
    pub lv: Operator,
    pub ah: Operator,
    pub u0: Vec<c64>,
}

pub fn assemble_staggered_vs(
    grid: &Grid1D,
    medium: &VariableMedium,
    d: usize,
    initial: &VelocityStressFields,
) -> Result<StaggeredVsSystem> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidArgument(format!("staggered system needs d in {{2, 3}}, got {d}")));
    }
    let samples = sample_medium(medium, grid, d)?;
    let block = grid.len().pow(d as u32);
    let ns = stress_count(d);
    let lv = staggered_divergence(d, grid)?;

    let rho: Vec<c64> = samples.rho.iter().flatten().map(|&x| c64::new(x, 0.0)).collect();
    let r = Operator::diagonal(&rho);
    let rinv = Operator::diagonal(&rho.iter().map(|x| 1.0 / x).collect::<Vec<_>>());

    let mut t = Vec::with_capacity(block * (d * d + ns - d));
    for j in 0..block {
        let (l, m) = (samples.lambda[j], samples.mu_normal[j]);
        for a in 0..d {
            for b in 0..d {
                let v = if a == b { l + 2.0 * m } else { l };
                t.push((a * block + j, b * block + j, c64::new(v, 0.0)));
            }
        }
        for (k, mu) in samples.mu_shear.iter().enumerate() {
            let row = (d + k) * block + j;
            t.push((row, row, c64::new(mu[j], 0.0)));
        }
    }
    let c = Operator::from_triplets(ns * block, ns * block, t);

    let upper = rinv.matmul(&lv);
    let lower = c.matmul(&lv.transpose()).scale_real(-1.0);
    let nv = d * block;
    let zv = Operator::zeros(nv, nv);
    let zs = Operator::zeros(ns * block, ns * block);
    let ah = Operator::block(&[vec![Some(&zv), Some(&upper)], vec![Some(&lower), Some(&zs)]]);

    let ok = initial.velocity.len() == d
        && initial.stress.len() == ns
        && initial.velocity.iter().chain(&initial.stress).all(|v| v.len() == block);
    if !ok {
        return Err(Error::Dimension(format!("initial fields need {d} velocities and {ns} stresses of length {block}")));
    }
    let u0 = initial.velocity.iter().chain(&initial.stress).flatten().map(|&x| c64::new(x, 0.0)).collect();
    Ok(StaggeredVsSystem { grid: *grid, d, samples, r, c, lv, ah, u0 })
}

impl StaggeredVsSystem {
    pub fn component_names(&self) -> Vec<String> {
        velocity_names(self.d).iter().chain(stress_names(self.d)).map(|s| s.to_string()).collect()
    }

    /// Sample points of each component in layout order.
    pub fn component_points(&self) -> Vec<Vec<Vec<f64>>> {
        component_points(&self.grid, self.d)
    }
}

pub fn component_points(grid: &Grid1D, d: usize) -> Vec<Vec<Vec<f64>>> {
    let shift = |axes: &[usize]| -> Vec<bool> { (0..d).map(|a| axes.contains(&a)).collect() };
    let mut out = Vec::new();
    for i in 0..d {
        out.push(staggered_points(grid, d, &shift(&[i])));
    }
    for _ in 0..d {
        out.push(staggered_points(grid, d, &shift(&[])));
    }
    for (i, j) in shear_pairs(d) {
        out.push(staggered_points(grid, d, &shift(&[i, j])));
    }
    out
}

impl Formulation for StaggeredVsSystem {
    fn ode(&self) -> LinearOdeSystem {
        LinearOdeSystem::new(self.ah.clone(), vec![c64::new(0.0, 0.0); self.ah.rows()], self.u0.clone())
            .expect("assembled staggered system is consistent")
    }

    fn state_len(&self) -> usize {
        self.ah.rows()
    }

    fn decode(&self, state: &[c64]) -> FieldSet {
        let block = self.grid.len().pow(self.d as u32);
        let values = state[..self.ah.rows()].chunks(block).map(|c| c.iter().map(|x| x.re).collect()).collect();
        FieldSet { names: self.component_names(), points: self.component_points(), values }
    }
}
