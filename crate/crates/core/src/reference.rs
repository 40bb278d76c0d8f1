//! Classical reference solves, the exact one-dimensional benchmark and error norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::evolution::{evolve, EvolutionConfig};
use crate::formulations::{assemble_displacement, DerivativeScheme, Formulation};
use crate::medium::IsotropicMedium;
use crate::schrodinger::{homogenize, HomogenizationScale, LinearOdeSystem};
use crate::{c64, Error, Grid1D, Result};

/// Integrates `du/dt = A u + b` directly with the configured scheme.
pub fn classical_solve(sys: &LinearOdeSystem, cfg: &EvolutionConfig) -> Result<Vec<c64>> {
    let n = sys.dim();
    // Appending r ≡ 1 reproduces the forced one-step recursions exactly.
    let aug = homogenize(sys, HomogenizationScale::Fixed(1.0))?;
    let mut out = evolve(&aug.a, &aug.u0, cfg, false)?.state;
    out.truncate(n);
    Ok(out)
}

/// Exact solution of `∂_t(ξ, ε, p) = B ∂_x(ξ, ε, p)` with `ρ = λ + 2μ`:
/// `ξ = −4π sin4πt sin4πx + cos8πt sin8πx`,
/// `ε = 2μ(4π cos4πt cos4πx + sin8πt cos8πx)`, `p = λε/(2μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactHyperbolicSolution {
    pub rho: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ExactHyperbolicSolution {
    pub fn new(medium: &IsotropicMedium) -> Result<Self> {
        medium.validate()?;
        let gap = medium.rho - (medium.lambda + 2.0 * medium.mu);
        if gap.abs() > 1e-12 * medium.rho {
            return Err(Error::Medium(format!("exact solution needs ρ = λ + 2μ, off by {gap:e}")));
        }
        Ok(Self { rho: medium.rho, lambda: medium.lambda, mu: medium.mu })
    }

    pub fn eval(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let (a, b) = (4.0 * PI, 8.0 * PI);
        let xi = -a * (a * t).sin() * (a * x).sin() + (b * t).cos() * (b * x).sin();
        let eps = 2.0 * self.mu * (a * (a * t).cos() * (a * x).cos() + (b * t).sin() * (b * x).cos());
        (xi, eps, self.lambda * eps / (2.0 * self.mu))
    }

    /// `∂_t` of `(ξ, ε, p)`.
    pub fn time_derivative(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let (a, b) = (4.0 * PI, 8.0 * PI);
        let xi = -a * a * (a * t).cos() * (a * x).sin() - b * (b * t).sin() * (b * x).sin();
        let eps = 2.0 * self.mu * (-a * a * (a * t).sin() * (a * x).cos() + b * (b * t).cos() * (b * x).cos());
        (xi, eps, self.lambda * eps / (2.0 * self.mu))
    }

    /// `[ξ, ε, p]` sampled at the given nodes.
    pub fn sample(&self, x: &[f64], t: f64) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(x.len()); 3];
        for &xj in x {
            let (a, b, c) = self.eval(xj, t);
            out[0].push(a);
            out[1].push(b);
            out[2].push(c);
        }
        out
    }
}

pub fn exact_hyperbolic(x: &[f64], t: f64, medium: &IsotropicMedium) -> Result<Vec<Vec<f64>>> {
    Ok(ExactHyperbolicSolution::new(medium)?.sample(x, t))
}

/// Largest entry of `A w(t) − ∂_t w(t)` with `A` the force-free spectral
/// displacement generator on `M` nodes of `[0, 1)`.
pub fn spectral_residual(medium: &IsotropicMedium, m: usize, t: f64) -> Result<f64> {
    let exact = ExactHyperbolicSolution::new(medium)?;
    let grid = Grid1D::new(0.0, 1.0, m)?;
    let x = grid.nodes();
    let sys = assemble_displacement(&grid, medium, 1, DerivativeScheme::Spectral, None, &exact.sample(&x, t))?;
    let ode = sys.ode();
    let rate = sys.decode(&ode.a.matvec(&ode.u0));
    let mut worst = 0.0f64;
    for (j, &xj) in x.iter().enumerate() {
        let (a, b, c) = exact.time_derivative(xj, t);
        for (k, v) in [a, b, c].into_iter().enumerate() {
            worst = worst.max((rate.values[k][j] - v).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentError {
    pub name: String,
    pub l2_abs: f64,
    /// `None` when the reference norm vanishes.
    pub l2_rel: Option<f64>,
    pub linf_abs: f64,
    pub linf_rel: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub components: Vec<ComponentError>,
    /// Weight of each sample in the discrete L2 norm.
    pub cell_volume: f64,
    pub samples_per_component: usize,
    /// Relative L2 error of the stacked state.
    pub combined_l2_rel: Option<f64>,
}

impl ErrorReport {
    pub fn component(&self, name: &str) -> Option<&ComponentError> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn max_l2_rel(&self) -> Option<f64> {
        self.components.iter().map(|c| c.l2_rel).try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
    }

    /// Largest component `linf_abs / linf(reference)` over components with a
    /// non-zero reference.
    pub fn max_linf_rel(&self) -> f64 {
        self.components.iter().filter_map(|c| c.linf_rel).fold(0.0, f64::max)
    }
}

/// Discrete norms with `‖u‖² = w·Σ|u_j|²`, `w` the cell volume.
pub fn error_norms(names: &[String], u: &[Vec<f64>], reference: &[Vec<f64>], cell_volume: f64) -> Result<ErrorReport> {
    if names.len() != u.len() || u.len() != reference.len() {
        return Err(Error::Dimension(format!(
            "{} names for {} fields and {} references",
            names.len(),
            u.len(),
            reference.len()
        )));
    }
    if !(cell_volume > 0.0) {
        return Err(Error::InvalidArgument("cell volume must be positive".into()));
    }
    let samples = u.first().map_or(0, |v| v.len());
    let mut components = Vec::with_capacity(u.len());
    let (mut err_total, mut ref_total) = (0.0, 0.0);
    for ((name, a), b) in names.iter().zip(u).zip(reference) {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!("component {name}: {} vs {} samples", a.len(), b.len())));
        }
        let e2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let r2: f64 = b.iter().map(|y| y * y).sum();
        let einf = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let rinf = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
        err_total += e2;
        ref_total += r2;
        let l2_abs = (cell_volume * e2).sqrt();
        let l2_ref = (cell_volume * r2).sqrt();
        components.push(ComponentError {
            name: name.clone(),
            l2_abs,
            l2_rel: (l2_ref > 0.0).then(|| l2_abs / l2_ref),
            linf_abs: einf,
            linf_rel: (rinf > 0.0).then(|| einf / rinf),
        });
    }
    Ok(ErrorReport {
        components,
        cell_volume,
        samples_per_component: samples,
        combined_l2_rel: (ref_total > 0.0).then(|| (err_total / ref_total).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Operator;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn zero_generator_keeps_state() {
        let sys = LinearOdeSystem::homogeneous(Operator::zeros(2, 2), vec![c64::new(1.0, 0.0), c64::new(0.0, 2.0)]).unwrap();
        let cfg = EvolutionConfig::new(crate::evolution::Scheme::CrankNicolson, 0.1, 1.0).unwrap();
        assert_eq!(classical_solve(&sys, &cfg).unwrap(), sys.u0);
    }

    #[test]
    fn forced_scalar_matches_recursion() {
        // du/dt = −u + 1 under CN: u_{n+1} = ((1 − h/2)u_n + h)/(1 + h/2).
        let sys = LinearOdeSystem::new(Operator::diagonal(&[c64::new(-1.0, 0.0)]), vec![c64::new(1.0, 0.0)], vec![c64::new(0.0, 0.0)]).unwrap();
        let cfg = EvolutionConfig::new(crate::evolution::Scheme::CrankNicolson, 0.1, 1.0).unwrap();
        let got = classical_solve(&sys, &cfg).unwrap()[0].re;
        let mut u = 0.0;
        for _ in 0..10 {
            u = ((1.0 - 0.05) * u + 0.1) / 1.05;
        }
        assert!((got - u).abs() < 1e-14);
    }

    #[test]
    fn initial_profiles() {
        let m = IsotropicMedium::new(1.41, 0.61, 0.4).unwrap();
        let e = ExactHyperbolicSolution::new(&m).unwrap();
        for x in [0.0, 0.13, 0.77] {
            let (xi, eps, p) = e.eval(x, 0.0);
            assert!((xi - (8.0 * PI * x).sin()).abs() < 1e-14);
            assert!((eps - 8.0 * PI * 0.4 * (4.0 * PI * x).cos()).abs() < 1e-13);
            assert!((p - 0.61 * 4.0 * PI * (4.0 * PI * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_triple_solves_spectral_system() {
        for (lam, mu) in [(0.71, 0.35), (0.61, 0.40)] {
            let m = IsotropicMedium::new(1.41, lam, mu).unwrap();
            for t in [0.0, 0.3, 1.0] {
                assert!(spectral_residual(&m, 64, t).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn table_rows_satisfy_constraint() {
        assert!(ExactHyperbolicSolution::new(&IsotropicMedium::new(1.41, 0.71, 0.35).unwrap()).is_ok());
        assert!(ExactHyperbolicSolution::new(&IsotropicMedium::new(1.41, 0.61, 0.40).unwrap()).is_ok());
        assert!(ExactHyperbolicSolution::new(&IsotropicMedium::new(1.0, 0.61, 0.40).unwrap()).is_err());
    }

    #[test]
    fn norms() {
        let a = vec![vec![1.0, 2.0, 3.0]];
        let z = error_norms(&names(1), &a, &a, 0.5).unwrap();
        assert_eq!(z.components[0].l2_abs, 0.0);
        assert_eq!(z.components[0].linf_abs, 0.0);
        let mut b = a.clone();
        b[0][1] += 0.25;
        let r = error_norms(&names(1), &b, &a, 0.5).unwrap();
        assert_eq!(r.components[0].linf_abs, 0.25);
        assert!((r.components[0].l2_abs - (0.5f64 * 0.0625).sqrt()).abs() < 1e-15);
        let zero = error_norms(&names(1), &b, &[vec![0.0; 3]], 1.0).unwrap();
        assert!(zero.components[0].l2_rel.is_none());
        assert!(error_norms(&names(1), &a, &[vec![0.0; 2]], 1.0).is_err());
    }

    #[test]
    fn sampled_sine_norm() {
        // Δx·Σ sin²(2πx_j) over M = 16 nodes of [0, 1) equals 1/2 exactly.
        let x: Vec<f64> = (0..16).map(|j| j as f64 / 16.0).collect();
        let s: Vec<f64> = x.iter().map(|&v| (2.0 * PI * v).sin()).collect();
        let r = error_norms(&names(1), &[s], &[vec![0.0; 16]], 1.0 / 16.0).unwrap();
        assert!((r.components[0].l2_abs - 0.5f64.sqrt()).abs() < 1e-14);
    }
}
