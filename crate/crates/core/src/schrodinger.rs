//! Schrödingerisation: homogenisation, Hermitian split, warped phase
//! transformation and the discrete Fourier transform in p.
//!
//! For `du/dt = A u` with `A = H1 + iH2`, the warped variable `v = g(p) u`
//! satisfies `∂_t v = −H1 ∂_p v + iH2 v`. Discretising p spectrally and
//! writing `c = (I ⊗ Φ_p^{-1}) v_h` gives `dc/dt = −i H_s c` with
//! `H_s = H1 ⊗ D_p − H2 ⊗ I`, index `base·N + p_mode`.

use std::fmt;
use std::sync::Arc;

use crate::eigen::lambda_max;
use crate::spectral::FourierBasis;
use crate::{c64, Error, Operator, PGrid, Result};

/// `du/dt = A u + b`, `u(0) = u0`.
#[derive(Clone, Debug)]
pub struct LinearOdeSystem {
    pub a: Operator,
    pub b: Vec<c64>,
    pub u0: Vec<c64>,
}

impl LinearOdeSystem {
    pub fn new(a: Operator, b: Vec<c64>, u0: Vec<c64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("generator is {}x{}", a.rows(), a.cols())));
        }
        if b.len() != a.rows() || u0.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "generator {n}x{n} with source of length {} and initial state of length {}",
                b.len(),
                u0.len(),
                n = a.rows()
            )));
        }
        Ok(Self { a, b, u0 })
    }

    pub fn homogeneous(a: Operator, u0: Vec<c64>) -> Result<Self> {
        let n = a.rows();
        Self::new(a, vec![c64::new(0.0, 0.0); n], u0)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn has_source(&self) -> bool {
        self.b.iter().any(|x| *x != c64::new(0.0, 0.0))
    }
}

/// Scale `c` of the auxiliary block in the homogenised system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HomogenizationScale {
    /// `c = ‖b‖_∞`.
    Auto,
    Fixed(f64),
}

/// `[[A, diag(b)/c], [0, 0]]` acting on `(u, r)` with `r(0) = c·1`. Returns the
/// input unchanged when `b = 0`.
pub fn homogenize(sys: &LinearOdeSystem, scale: HomogenizationScale) -> Result<LinearOdeSystem> {
    if let HomogenizationScale::Fixed(c) = scale {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("homogenisation scale must be positive, got {c}")));
        }
    }
    if !sys.has_source() {
        return Ok(sys.clone());
    }
    let c = match scale {
        HomogenizationScale::Auto => sys.b.iter().map(|x| x.norm()).fold(0.0, f64::max),
        HomogenizationScale::Fixed(c) => c,
    };
    let n = sys.dim();
    let coupling = Operator::diagonal(&sys.b.iter().map(|x| x / c).collect::<Vec<_>>());
    let zero = Operator::zeros(n, n);
    let a = Operator::block(&[vec![Some(&sys.a), Some(&coupling)], vec![Some(&zero), Some(&zero)]]);
    let mut u0 = sys.u0.clone();
    u0.extend(std::iter::repeat(c64::new(c, 0.0)).take(n));
    LinearOdeSystem::homogeneous(a, u0)
}

/// Pads a source-free system with inert unknowns (initial value one) to the
/// next power-of-two dimension. Returns the padded system and the pad count.
pub fn pad_to_power_of_two(sys: &LinearOdeSystem) -> Result<(LinearOdeSystem, usize)> {
    if sys.has_source() {
        return Err(Error::InvalidArgument("pad a homogenised system".into()));
    }
    let n = sys.dim();
    let target = n.next_power_of_two();
    let mut u0 = sys.u0.clone();
    u0.resize(target, c64::new(1.0, 0.0));
    Ok((LinearOdeSystem::homogeneous(sys.a.pad_square(target), u0)?, target - n))
}

/// `A = H1 + i H2` with both parts Hermitian.
#[derive(Clone, Debug)]
pub struct HermitianPair {
    pub h1: Operator,
    pub h2: Operator,
}

pub fn hermitian_split(a: &Operator) -> Result<HermitianPair> {
    if !a.is_square() {
        return Err(Error::Dimension("Hermitian split needs a square operator".into()));
    }
    let adj = a.adjoint();
    let half = c64::new(0.5, 0.0);
    let h1 = a.lin_comb(half, &adj, half).into_hermitian()?;
    // (A − A†)/(2i) = −i/2·A + i/2·A†.
    let h2 = a.lin_comb(c64::new(0.0, -0.5), &adj, c64::new(0.0, 0.5)).into_hermitian()?;
    Ok(HermitianPair { h1, h2 })
}

impl HermitianPair {
    pub fn reconstruct(&self) -> Operator {
        self.h1.lin_comb(c64::new(1.0, 0.0), &self.h2, c64::new(0.0, 1.0))
    }
}

/// Initial profile `g(p)` of the warped variable: `e^{−p}` for `p > 0` and a
/// left branch `h(p)` for `p ≤ 0`.
#[derive(Clone)]
pub enum WarpFunction {
    /// `g(p) = e^{−|p|}`.
    ExactKink,
    /// `h(p) = e^{p}·q(p)` with `q` the degree-`k` polynomial making `g` of class `C^k` at 0.
    Smooth { order: u32, coeffs: Vec<f64> },
    /// User branch for `p ≤ 0` with caller-declared smoothness.
    Custom { order: u32, left: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for WarpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExactKink => write!(f, "ExactKink"),
            Self::Smooth { order, .. } => write!(f, "Smooth({order})"),
            Self::Custom { order, .. } => write!(f, "Custom({order})"),
        }
    }
}

impl WarpFunction {
    /// The built-in smooth family. Matching `h^{(j)}(0) = (−1)^j` for
    /// `j ≤ k` gives `j!·a_j = (−1)^j − Σ_{i<j} C(j,i)·i!·a_i`.
    pub fn smooth(order: u32) -> Self {
        let k = order as usize;
        let mut fact = vec![1.0f64; k + 1];
        for i in 1..=k {
            fact[i] = fact[i - 1] * i as f64;
        }
        let binom = |n: usize, r: usize| fact[n] / (fact[r] * fact[n - r]);
        let mut a = vec![0.0; k + 1];
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let s: f64 = (0..j).map(|i| binom(j, i) * fact[i] * a[i]).sum();
            a[j] = (sign - s) / fact[j];
        }
        Self::Smooth { order, coeffs: a }
    }

    pub fn custom(order: u32, left: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Self {
        Self::Custom { order, left }
    }

    /// Smoothness order at `p = 0` (`0` for the kink).
    pub fn order(&self) -> u32 {
        match self {
            Self::ExactKink => 0,
            Self::Smooth { order, .. } | Self::Custom { order, .. } => *order,
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        if p > 0.0 {
            return (-p).exp();
        }
        match self {
            Self::ExactKink => p.exp(),
            Self::Smooth { coeffs, .. } => p.exp() * coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c),
            Self::Custom { left, .. } => left(p),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::ExactKink => "exact-kink".into(),
            Self::Smooth { order, .. } => format!("smooth:{order}"),
            Self::Custom { order, .. } => format!("custom:{order}"),
        }
    }
}

/// The Hamiltonian system `dc/dt = −i H_s c`.
#[derive(Clone, Debug)]
pub struct SchrodingerizedSystem {
    pub hs: Operator,
    pub pgrid: PGrid,
    pub c0: Vec<c64>,
    /// Base dimension (after homogenisation and padding).
    pub n_aug: usize,
    pub pad: usize,
}

/// Builds `H_s = H1 ⊗ D_p − H2 ⊗ I` and `c0 = (I ⊗ Φ_p^{-1})(u0 ⊗ g(p_j))`.
///
/// `pad` is recorded for reporting only.
pub fn schrodingerize(
    pair: &HermitianPair,
    u0: &[c64],
    pgrid: &PGrid,
    warp: &WarpFunction,
    pad: usize,
) -> Result<SchrodingerizedSystem> {
    let modes = schrodingerize_modes(pair, u0, pgrid, warp, pad)?;
    let hs = modes.hamiltonian.assemble()?;
    Ok(SchrodingerizedSystem { hs, pgrid: modes.pgrid, c0: modes.c0, n_aug: modes.n_aug, pad })
}

/// `H_s` in factored form. `D_p` is diagonal, so `H_s` is block diagonal over
/// p-modes with block `k` equal to `μ_k H1 − H2`.
#[derive(Clone, Debug)]
pub struct ModeHamiltonian {
    pub h1: Operator,
    pub h2: Operator,
    pub freq: Vec<f64>,
}

impl ModeHamiltonian {
    pub fn new(pair: &HermitianPair, pgrid: &PGrid) -> Result<Self> {
        if pair.h1.rows() != pair.h2.rows() || !pair.h1.is_square() || !pair.h2.is_square() {
            return Err(Error::Dimension("Hermitian pair blocks differ in size".into()));
        }
        Ok(Self { h1: pair.h1.clone(), h2: pair.h2.clone(), freq: pgrid.frequencies() })
    }

    pub fn base_dim(&self) -> usize {
        self.h1.rows()
    }

    pub fn dim(&self) -> usize {
        self.h1.rows() * self.freq.len()
    }

    /// `μ_k H1 − H2`. Real combinations of Hermitian parts stay Hermitian.
    pub fn block(&self, k: usize) -> Result<Operator> {
        self.h1.lin_comb(c64::new(self.freq[k], 0.0), &self.h2, c64::new(-1.0, 0.0)).into_hermitian()
    }

    /// `(sparsity, max-norm)` of the assembled `H_s`.
    pub fn metadata(&self) -> (usize, f64) {
        let zero = c64::new(0.0, 0.0);
        let (mut s, mut hmax) = (0usize, 0.0f64);
        let mut merged = Vec::new();
        for i in 0..self.base_dim() {
            merge_rows(&self.h1, &self.h2, i, &mut merged);
            for &mu in &self.freq {
                let mut count = 0;
                for &(_, x, y) in &merged {
                    let v = x * mu - y;
                    if v != zero {
                        count += 1;
                        hmax = hmax.max(v.norm());
                    }
                }
                s = s.max(count);
            }
        }
        (s, hmax)
    }

    pub fn assemble(&self) -> Result<Operator> {
        warped_hamiltonian(&self.h1, &self.h2, &self.freq)?.into_hermitian()
    }

    /// `H_s c` without assembling `H_s`.
    pub fn apply(&self, c: &[c64]) -> Vec<c64> {
        let np = self.freq.len();
        let mut out = vec![c64::new(0.0, 0.0); c.len()];
        let mut merged = Vec::new();
        for i in 0..self.base_dim() {
            merge_rows(&self.h1, &self.h2, i, &mut merged);
            for (k, &mu) in self.freq.iter().enumerate() {
                out[i * np + k] = merged.iter().map(|&(j, x, y)| (x * mu - y) * c[j * np + k]).sum();
            }
        }
        out
    }
}

/// `H_s` kept per p-mode together with its initial state.
#[derive(Clone, Debug)]
pub struct ModeSystem {
    pub hamiltonian: ModeHamiltonian,
    pub pgrid: PGrid,
    pub c0: Vec<c64>,
    pub n_aug: usize,
    pub pad: usize,
}

pub fn schrodingerize_modes(
    pair: &HermitianPair,
    u0: &[c64],
    pgrid: &PGrid,
    warp: &WarpFunction,
    pad: usize,
) -> Result<ModeSystem> {
    let n = pair.h1.rows();
    if pair.h2.rows() != n || u0.len() != n {
        return Err(Error::Dimension(format!(
            "pair of size {n}/{} with initial state of length {}",
            pair.h2.rows(),
            u0.len()
        )));
    }
    let np = pgrid.len();
    let basis = FourierBasis::new(np, pgrid.lo(), pgrid.hi() - pgrid.lo());
    let mut profile: Vec<c64> = pgrid.nodes().iter().map(|&p| c64::new(warp.eval(p), 0.0)).collect();
    basis.analyze_normalized(&mut profile);
    let mut c0 = Vec::with_capacity(n * np);
    for &u in u0 {
        c0.extend(profile.iter().map(|&g| u * g));
    }
    if c0.iter().all(|x| x.norm() == 0.0) {
        return Err(Error::InvalidArgument("initial state vanishes".into()));
    }
    Ok(ModeSystem { hamiltonian: ModeHamiltonian::new(pair, pgrid)?, pgrid: *pgrid, c0, n_aug: n, pad })
}

/// Column-merged entries `(col, h1, h2)` of row `i`.
fn merge_rows(h1: &Operator, h2: &Operator, i: usize, merged: &mut Vec<(usize, c64, c64)>) {
    let zero = c64::new(0.0, 0.0);
    merged.clear();
    let (c1, v1) = h1.row(i);
    let (c2, v2) = h2.row(i);
    let (mut a, mut b) = (0, 0);
    while a < c1.len() || b < c2.len() {
        if b >= c2.len() || (a < c1.len() && c1[a] < c2[b]) {
            merged.push((c1[a], v1[a], zero));
            a += 1;
        } else if a >= c1.len() || c2[b] < c1[a] {
            merged.push((c2[b], zero, v2[b]));
            b += 1;
        } else {
            merged.push((c1[a], v1[a], v2[b]));
            a += 1;
            b += 1;
        }
    }
}

/// `H1 ⊗ diag(freq) − H2 ⊗ I`, assembled row by row without intermediates.
fn warped_hamiltonian(h1: &Operator, h2: &Operator, freq: &[f64]) -> Result<Operator> {
    let (n, np) = (h1.rows(), freq.len());
    let zero = c64::new(0.0, 0.0);
    let mut indptr = Vec::with_capacity(n * np + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    let mut merged: Vec<(usize, c64, c64)> = Vec::new();
    for i in 0..n {
        merge_rows(h1, h2, i, &mut merged);
        for (k, &mu) in freq.iter().enumerate() {
            for &(j, x, y) in &merged {
                let v = x * mu - y;
                if v != zero {
                    indices.push(j * np + k);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
    }
    Operator::from_csr(n * np, n * np, indptr, indices, values)
}

/// `max(λ_max(H1)·T, 0)`.
pub fn pstar(h1: &Operator, t: f64) -> Result<f64> {
    Ok((lambda_max(h1)? * t).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn smallest_homogenisation() {
        let sys = LinearOdeSystem::new(Operator::zeros(1, 1), vec![c(1.0)], vec![c(0.25)]).unwrap();
        let h = homogenize(&sys, HomogenizationScale::Fixed(1.0)).unwrap();
        assert_eq!(h.a.get(0, 1), c(1.0));
        assert_eq!(h.a.nnz(), 1);
        assert_eq!(h.u0, vec![c(0.25), c(1.0)]);
    }

    #[test]
    fn source_free_is_unchanged() {
        let sys = LinearOdeSystem::homogeneous(Operator::identity(3), vec![c(1.0); 3]).unwrap();
        let h = homogenize(&sys, HomogenizationScale::Auto).unwrap();
        assert_eq!(h.a, sys.a);
        assert_eq!(h.u0, sys.u0);
        assert!(homogenize(&sys, HomogenizationScale::Fixed(0.0)).is_err());
    }

    #[test]
    fn auto_scale_uses_sup_norm() {
        let sys = LinearOdeSystem::new(Operator::zeros(2, 2), vec![c(0.5), c(-2.0)], vec![c(0.0); 2]).unwrap();
        let h = homogenize(&sys, HomogenizationScale::Auto).unwrap();
        assert_eq!(h.u0[2], c(2.0));
        assert_eq!(h.a.get(1, 3), c(-1.0));
    }

    #[test]
    fn padding() {
        let sys = LinearOdeSystem::homogeneous(Operator::identity(5), vec![c(2.0); 5]).unwrap();
        let (p, pad) = pad_to_power_of_two(&sys).unwrap();
        assert_eq!((p.dim(), pad), (8, 3));
        assert_eq!(&p.u0[5..], &[c(1.0); 3]);
        assert_eq!(p.a.nnz(), 5);
    }

    #[test]
    fn split_examples() {
        let h = Operator::from_triplets(2, 2, [(0, 1, c64::new(0.0, 1.0)), (1, 0, c64::new(0.0, -1.0)), (0, 0, c(2.0))]);
        let pair = hermitian_split(&h).unwrap();
        assert_eq!(pair.h1.max_abs_diff(&h), 0.0);
        assert_eq!(pair.h2.nnz(), 0);
        let skew = Operator::from_triplets(2, 2, [(0, 1, c(1.0)), (1, 0, c(-1.0))]);
        let pair = hermitian_split(&skew).unwrap();
        assert_eq!(pair.h1.nnz(), 0);
        assert_eq!(pair.h2.get(0, 1), c64::new(0.0, -1.0));
        assert_eq!(pair.h2.get(1, 0), c64::new(0.0, 1.0));
        assert!(pair.reconstruct().max_abs_diff(&skew) == 0.0);
    }

    #[test]
    fn smooth_warp_matches_derivatives() {
        for k in 0..5u32 {
            let g = WarpFunction::smooth(k);
            // Finite-difference check of continuity of the first derivatives at 0.
            let e = 1e-4;
            assert!((g.eval(-1e-12) - 1.0).abs() < 1e-9);
            if k >= 1 {
                let left = (g.eval(0.0) - g.eval(-e)) / e;
                assert!((left + 1.0).abs() < 1e-3, "k={k}: {left}");
            }
            assert!(g.eval(-40.0).abs() < 1e-10);
        }
        assert_eq!(WarpFunction::smooth(0).eval(-0.7), (-0.7f64).exp());
    }

    #[test]
    fn pstar_clamps_at_zero() {
        let h = Operator::diagonal(&[c(-1.0), c(-3.0)]);
        assert_eq!(pstar(&h, 2.0).unwrap(), 0.0);
        let h = Operator::diagonal(&[c(0.5), c(-3.0)]);
        assert_eq!(pstar(&h, 2.0).unwrap(), 1.0);
    }

    fn sample_generator() -> Operator {
        let t: Vec<(usize, usize, c64)> = (0..5)
            .flat_map(|i| {
                [(i, (i + 1) % 5, c64::new(0.3 * i as f64 - 0.4, 0.1)), (i, (i + 3) % 5, c64::new(-0.2, 0.05 * i as f64))]
            })
            .chain([(0, 0, c(0.7)), (4, 4, c(-0.3))])
            .collect();
        Operator::from_triplets(5, 5, t)
    }

    #[test]
    fn factored_hamiltonian_matches_assembled() {
        let pair = hermitian_split(&sample_generator()).unwrap();
        let pg = PGrid::symmetric(2.0, 16).unwrap();
        let u0: Vec<c64> = (0..5).map(|i| c64::new(1.0 + i as f64, -0.5)).collect();
        let full = schrodingerize(&pair, &u0, &pg, &WarpFunction::ExactKink, 0).unwrap();
        let modes = schrodingerize_modes(&pair, &u0, &pg, &WarpFunction::ExactKink, 0).unwrap();
        assert_eq!(full.c0, modes.c0);
        let (s, hmax) = modes.hamiltonian.metadata();
        assert_eq!(s, full.hs.sparsity());
        assert!((hmax - full.hs.max_norm()).abs() < 1e-15);
        let x: Vec<c64> = (0..80).map(|i| c64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos())).collect();
        let a = full.hs.matvec(&x);
        let b = modes.hamiltonian.apply(&x);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-13));
        let cfg = crate::evolution::EvolutionConfig::new(crate::evolution::Scheme::CrankNicolson, 0.01, 0.2).unwrap();
        let direct = crate::evolution::evolve(&full.hs, &full.c0, &cfg, true).unwrap().state;
        let blocked = crate::evolution::evolve_modes(&modes.hamiltonian, &modes.c0, &cfg).unwrap();
        assert!(direct.iter().zip(&blocked).all(|(p, q)| (p - q).norm() < 1e-12));
    }
}
