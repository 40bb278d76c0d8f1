//! Spectral discretisation of the symmetric velocity–stress form.
//!
//! The unknown is `Ũ = (σ/ρ, v)`; with `Ã_0 = diag(ρC^{-1}, I)` and
//! `M = diag(M½, I)`, `M½ = PᵀΛ^{-1/2}P`, the symmetrised unknown `U = M^{-1}Ũ`
//! obeys `∂_t U = Σ A_axis ∂_axis U + f` with `A_axis = M Ã_axis M`.
//! Reductions to one and two dimensions keep the plane-strain components.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use super::{dense_real, dft_components, grid_points, idft_components, FieldSet, Formulation};
use crate::medium::IsotropicMedium;
use crate::operator::lift_axis;
use crate::schrodinger::LinearOdeSystem;
use crate::spectral::SpectralOperators;
use crate::{c64, Error, Grid1D, Operator, Result};

/// Diagonalisation `ρC^{-1} = PᵀΛP` and the symmetriser `M½`.
#[derive(Clone, Debug)]
pub struct SmfTransform {
    pub d: usize,
    pub lambda: Vec<f64>,
    pub p: Mat<f64>,
    pub mhalf: Mat<f64>,
    /// `ρC^{-1}` assembled directly from the medium.
    pub rho_cinv: Mat<f64>,
}

pub fn stress_count(d: usize) -> usize {
    d * (d + 1) / 2
}

pub fn stress_names(d: usize) -> &'static [&'static str] {
    match d {
        1 => &["sigma11"],
        2 => &["sigma11", "sigma22", "sigma12"],
        _ => &["sigma11", "sigma22", "sigma33", "sigma12", "sigma13", "sigma23"],
    }
}

pub fn velocity_names(d: usize) -> &'static [&'static str] {
    &["v1", "v2", "v3"][..d]
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("dimension must be 1, 2 or 3, got {d}")))
    }
}

pub fn smf_transform(medium: &IsotropicMedium, d: usize) -> Result<SmfTransform> {
    check_dim(d)?;
    medium.validate()?;
    let (cp2, cs2) = (medium.cp().powi(2), medium.cs().powi(2));
    let q = 3.0 * cp2 - 4.0 * cs2;
    if !(q > 0.0) {
        return Err(Error::Medium(format!("3c_p² − 4c_s² = {q} is not positive")));
    }
    let n = stress_count(d);
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let (lambda, p_rows, rho_cinv): (Vec<f64>, Vec<Vec<f64>>, Mat<f64>) = match d {
        1 => (vec![1.0 / cp2], vec![vec![1.0]], Mat::from_fn(1, 1, |_, _| 1.0 / cp2)),
        2 => {
            let (l, m, rho) = (medium.lambda, medium.mu, medium.rho);
            let den = 4.0 * m * (l + m);
            let (a, b, c) = (rho * (l + 2.0 * m) / den, -rho * l / den, 1.0 / cs2);
            let rc = [[a, b, 0.0], [b, a, 0.0], [0.0, 0.0, c]];
            (
                vec![1.0 / (2.0 * (cp2 - cs2)), 1.0 / (2.0 * cs2), 1.0 / cs2],
                vec![vec![1.0 / s2, 1.0 / s2, 0.0], vec![1.0 / s2, -1.0 / s2, 0.0], vec![0.0, 0.0, 1.0]],
                Mat::from_fn(3, 3, |i, j| rc[i][j]),
            )
        }
        _ => {
            let a = (cp2 - cs2) / (cs2 * q);
            let b = -(cp2 - 2.0 * cs2) / (cs2 * (6.0 * cp2 - 8.0 * cs2));
            let c = 1.0 / cs2;
            let rc = Mat::from_fn(6, 6, |i, j| match (i < 3, j < 3) {
                (true, true) if i == j => a,
                (true, true) => b,
                _ if i == j => c,
                _ => 0.0,
            });
            let mut rows = vec![
                vec![1.0 / s3, 1.0 / s3, 1.0 / s3],
                vec![1.0 / s2, -1.0 / s2, 0.0],
                vec![1.0 / s6, 1.0 / s6, -2.0 / s6],
            ];
            for r in rows.iter_mut() {
                r.extend([0.0; 3]);
            }
            for k in 3..6 {
                let mut r = vec![0.0; 6];
                r[k] = 1.0;
                rows.push(r);
            }
            (vec![1.0 / q, 0.5 / cs2, 0.5 / cs2, c, c, c], rows, rc)
        }
    };
    let p = Mat::from_fn(n, n, |i, j| p_rows[i][j]);
    let scaled = Mat::from_fn(n, n, |i, j| p[(i, j)] / lambda[i].sqrt());
    let mhalf = p.transpose() * &scaled;
    Ok(SmfTransform { d, lambda, p, mhalf, rho_cinv })
}

/// `L_axis` matrices (one per axis, `d × n_stress`) selecting the stresses
/// whose `axis` derivative drives each velocity component.
pub fn selection_matrices(d: usize) -> Vec<Mat<f64>> {
    let n = stress_count(d);
    let ones: Vec<Vec<(usize, usize)>> = match d {
        1 => vec![vec![(0, 0)]],
        2 => vec![vec![(0, 0), (1, 2)], vec![(0, 2), (1, 1)]],
        _ => vec![
            vec![(0, 0), (1, 3), (2, 4)],
            vec![(0, 3), (1, 1), (2, 5)],
            vec![(0, 4), (1, 5), (2, 2)],
        ],
    };
    ones.into_iter()
        .map(|pos| {
            let mut m = Mat::<f64>::zeros(d, n);
            for (r, c) in pos {
                m[(r, c)] = 1.0;
            }
            m
        })
        .collect()
}

/// Unsymmetrised `Ã_axis = [[0, L_axisᵀ], [L_axis, 0]]`.
pub fn raw_coefficient_matrices(d: usize) -> Vec<Mat<f64>> {
    let n = stress_count(d);
    selection_matrices(d)
        .into_iter()
        .map(|l| {
            Mat::from_fn(n + d, n + d, |i, j| match (i < n, j < n) {
                (true, false) => l[(j - n, i)],
                (false, true) => l[(i - n, j)],
                _ => 0.0,
            })
        })
        .collect()
}

/// Symmetric `A_axis = M Ã_axis M`.
pub fn smf_coefficient_matrices(t: &SmfTransform) -> Vec<Mat<f64>> {
    let n = stress_count(t.d);
    let full = full_symmetriser(t);
    raw_coefficient_matrices(t.d)
        .into_iter()
        .map(|raw| {
            let a = &full * &raw * &full;
            let scale = (0..n + t.d)
                .flat_map(|i| (0..n + t.d).map(move |j| (i, j)))
                .fold(0.0f64, |m, (i, j)| m.max(a[(i, j)].abs()));
            // Mirror the upper triangle so the rounding of the product cannot break
            // symmetry, and drop rounding residue so structural zeros stay zero.
            Mat::from_fn(n + t.d, n + t.d, |i, j| {
                let x = if i <= j { a[(i, j)] } else { a[(j, i)] };
                if x.abs() <= 1e-14 * scale {
                    0.0
                } else {
                    x
                }
            })
        })
        .collect()
}

fn full_symmetriser(t: &SmfTransform) -> Mat<f64> {
    let n = stress_count(t.d);
    Mat::from_fn(n + t.d, n + t.d, |i, j| match (i < n, j < n) {
        (true, true) => t.mhalf[(i, j)],
        (false, false) if i == j => 1.0,
        _ => 0.0,
    })
}

/// Physical fields sampled on the grid, one vector of length `M^d` per component.
#[derive(Clone, Debug, Default)]
pub struct VelocityStressFields {
    pub stress: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct SmfSystem {
    pub grid: Grid1D,
    pub d: usize,
    pub medium: IsotropicMedium,
    pub transform: SmfTransform,
    /// `A_x, A_y, A_z` restricted to the first `d` axes.
    pub coefficients: Vec<Mat<f64>>,
    pub generator: Operator,
    pub fhat: Vec<c64>,
    pub u0hat: Vec<c64>,
}

/// Assembles `dÛ/dt = i Σ A_axis ⊗ D_axis Û + f̂` in Fourier space.
///
/// `force` holds one sample vector per velocity component (the body force of the
/// momentum equation); `None` means source-free.
pub fn assemble_smf(
    grid: &Grid1D,
    medium: &IsotropicMedium,
    d: usize,
    force: Option<&[Vec<f64>]>,
    initial: &VelocityStressFields,
) -> Result<SmfSystem> {
    check_dim(d)?;
    let transform = smf_transform(medium, d)?;
    let coefficients = smf_coefficient_matrices(&transform);
    let ns = stress_count(d);
    let block = grid.len().pow(d as u32);

    let dmu = SpectralOperators::new(grid).dmu();
    let mut generator = Operator::zeros((ns + d) * block, (ns + d) * block);
    for (axis, a) in coefficients.iter().enumerate() {
        let lifted = lift_axis(&dmu, axis + 1, d)?;
        generator = generator.add(&dense_real(a).kron(&lifted));
    }
    let generator = generator.scale(c64::new(0.0, 1.0));

    let check = |v: &[Vec<f64>], want: usize, what: &str| -> Result<()> {
        if v.len() != want || v.iter().any(|x| x.len() != block) {
            return Err(Error::Dimension(format!("{what}: need {want} components of length {block}")));
        }
        Ok(())
    };
    let mut fhat = vec![c64::new(0.0, 0.0); (ns + d) * block];
    if let Some(f) = force {
        check(f, d, "force")?;
        for (k, comp) in f.iter().enumerate() {
            for (j, &x) in comp.iter().enumerate() {
                fhat[(ns + k) * block + j] = c64::new(x / medium.rho, 0.0);
            }
        }
        dft_components(&mut fhat, grid, d);
    }

    check(&initial.stress, ns, "initial stress")?;
    check(&initial.velocity, d, "initial velocity")?;
    let minv = transform.mhalf.partial_piv_lu().inverse();
    let mut u0 = vec![c64::new(0.0, 0.0); (ns + d) * block];
    for j in 0..block {
        for r in 0..ns {
            let s: f64 = (0..ns).map(|c| minv[(r, c)] * initial.stress[c][j] / medium.rho).sum();
            u0[r * block + j] = c64::new(s, 0.0);
        }
        for k in 0..d {
            u0[(ns + k) * block + j] = c64::new(initial.velocity[k][j], 0.0);
        }
    }
    dft_components(&mut u0, grid, d);

    Ok(SmfSystem { grid: *grid, d, medium: *medium, transform, coefficients, generator, fhat, u0hat: u0 })
}

impl SmfSystem {
    pub fn component_names(&self) -> Vec<String> {
        stress_names(self.d).iter().chain(velocity_names(self.d)).map(|s| s.to_string()).collect()
    }
}

impl Formulation for SmfSystem {
    fn ode(&self) -> LinearOdeSystem {
        LinearOdeSystem::new(self.generator.clone(), self.fhat.clone(), self.u0hat.clone())
            .expect("assembled SMF system is consistent")
    }

    fn state_len(&self) -> usize {
        self.generator.rows()
    }

    fn decode(&self, state: &[c64]) -> FieldSet {
        let (d, ns) = (self.d, stress_count(self.d));
        let block = self.grid.len().pow(d as u32);
        let mut u = state[..(ns + d) * block].to_vec();
        idft_components(&mut u, &self.grid, d);
        let mut values = vec![vec![0.0; block]; ns + d];
        for j in 0..block {
            for r in 0..ns {
                values[r][j] =
                    self.medium.rho * (0..ns).map(|c| self.transform.mhalf[(r, c)] * u[c * block + j].re).sum::<f64>();
            }
            for k in 0..d {
                values[ns + k][j] = u[(ns + k) * block + j].re;
            }
        }
        let pts = grid_points(&self.grid, d);
        FieldSet { names: self.component_names(), points: vec![pts; ns + d], values }
    }
}
