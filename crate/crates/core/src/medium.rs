//! Isotropic elastic media, constant or spatially varying.

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::{Error, Grid1D, Result};

/// Constant isotropic medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicMedium {
    pub rho: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl IsotropicMedium {
    pub fn new(rho: f64, lambda: f64, mu: f64) -> Result<Self> {
        let m = Self { rho, lambda, mu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_sample(self.rho, self.lambda, self.mu)
    }

    /// Builds the medium from wave speeds and density.
    pub fn from_speeds(rho: f64, cp: f64, cs: f64) -> Result<Self> {
        let mu = rho * cs * cs;
        Self::new(rho, rho * cp * cp - 2.0 * mu, mu)
    }

    pub fn cp(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho).sqrt()
    }

    pub fn cs(&self) -> f64 {
        (self.mu / self.rho).sqrt()
    }
}

fn check_sample(rho: f64, lambda: f64, mu: f64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::Medium(format!("density must be positive, got {rho}")));
    }
    if !(mu > 0.0) {
        return Err(Error::Medium(format!("shear modulus must be positive, got {mu}")));
    }
    if !(3.0 * lambda + 2.0 * mu > 0.0) {
        return Err(Error::Medium(format!("need 3λ + 2μ > 0, got λ = {lambda}, μ = {mu}")));
    }
    Ok(())
}

/// A scalar material field on the periodic domain.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    /// `base + amp·sin(x)·cos(y)`
    SinCos { base: f64, amp: f64 },
    Tabulated(TabulatedField),
}

impl ScalarField {
    /// Value at a point with one to three coordinates.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::SinCos { base, amp } => {
                let y = x.get(1).copied().unwrap_or(0.0);
                base + amp * x[0].sin() * y.cos()
            }
            Self::Tabulated(t) => t.eval(x[0], x.get(1).copied().unwrap_or(0.0)),
        }
    }
}

/// Samples on a periodic `nx × ny` node grid, evaluated by bilinear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedField {
    x: Grid1D,
    y: Grid1D,
    values: Vec<f64>,
}

impl TabulatedField {
    pub fn new(x: Grid1D, y: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != x.len() * y.len() {
            return Err(Error::Dimension(format!(
                "tabulated field needs {} samples, got {}",
                x.len() * y.len(),
                values.len()
            )));
        }
        Ok(Self { x, y, values })
    }

    /// Parses `x y value` lines sampled on the nodes of `x` × `y`; every node
    /// must appear exactly once.
    pub fn parse<R: BufRead>(reader: R, x: Grid1D, y: Grid1D) -> Result<Self> {
        let mut values = vec![f64::NAN; x.len() * y.len()];
        let locate = |g: &Grid1D, v: f64| -> Result<usize> {
            let k = ((v - g.a()) / g.h()).round();
            let k = k as i64;
            if k < 0 || k as usize >= g.len() || (g.node(k as usize) - v).abs() > 1e-9 * g.length() {
                return Err(Error::Parse(format!("coordinate {v} is not a grid node")));
            }
            Ok(k as usize)
        };
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let f: Vec<f64> = t
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?;
            if f.len() != 3 {
                return Err(Error::Parse(format!("expected `x y value`, got {t:?}")));
            }
            let (i, j) = (locate(&x, f[0])?, locate(&y, f[1])?);
            values[i * y.len() + j] = f[2];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("tabulated field is missing nodes".into()));
        }
        Self::new(x, y, values)
    }

    pub fn eval(&self, px: f64, py: f64) -> f64 {
        let (nx, ny) = (self.x.len(), self.y.len());
        let fx = ((px - self.x.a()) / self.x.h()).rem_euclid(nx as f64);
        let fy = ((py - self.y.a()) / self.y.h()).rem_euclid(ny as f64);
        let (i0, j0) = (fx.floor() as usize % nx, fy.floor() as usize % ny);
        let (tx, ty) = (fx - fx.floor(), fy - fy.floor());
        let (i1, j1) = ((i0 + 1) % nx, (j0 + 1) % ny);
        let v = |i: usize, j: usize| self.values[i * ny + j];
        (1.0 - tx) * ((1.0 - ty) * v(i0, j0) + ty * v(i0, j1)) + tx * ((1.0 - ty) * v(i1, j0) + ty * v(i1, j1))
    }
}

/// Spatially varying isotropic medium.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableMedium {
    pub rho: ScalarField,
    pub lambda: ScalarField,
    pub mu: ScalarField,
}

impl VariableMedium {
    pub fn constant(m: IsotropicMedium) -> Self {
        Self {
            rho: ScalarField::Constant(m.rho),
            lambda: ScalarField::Constant(m.lambda),
            mu: ScalarField::Constant(m.mu),
        }
    }

    /// ρ = 1 + 0.5 sin x cos y, λ = 0.5 + 0.2 sin x cos y, μ = 0.5 + 0.15 sin x cos y.
    pub fn sincos_preset() -> Self {
        Self {
            rho: ScalarField::SinCos { base: 1.0, amp: 0.5 },
            lambda: ScalarField::SinCos { base: 0.5, amp: 0.2 },
            mu: ScalarField::SinCos { base: 0.5, amp: 0.15 },
        }
    }

    pub fn at(&self, x: &[f64]) -> (f64, f64, f64) {
        (self.rho.eval(x), self.lambda.eval(x), self.mu.eval(x))
    }
}

/// Material samples aligned with the staggered velocity–stress layout.
///
/// Velocity component `i` lives at the node shifted by half a cell along axis
/// `i`; normal stresses at nodes; shear stress `σ_ij` at the node shifted along
/// both `i` and `j`.
#[derive(Clone, Debug)]
pub struct StaggeredSamples {
    /// ρ at each velocity component's points.
    pub rho: Vec<Vec<f64>>,
    /// λ at normal-stress points.
    pub lambda: Vec<f64>,
    /// μ at normal-stress points.
    pub mu_normal: Vec<f64>,
    /// μ at each shear component's points, in layout order.
    pub mu_shear: Vec<Vec<f64>>,
}

/// Shear stress axis pairs in layout order.
pub fn shear_pairs(d: usize) -> Vec<(usize, usize)> {
    match d {
        2 => vec![(0, 1)],
        3 => vec![(0, 1), (0, 2), (1, 2)],
        _ => Vec::new(),
    }
}

/// Points of a `d`-dimensional grid with the given per-axis half-cell shifts.
pub fn staggered_points(grid: &Grid1D, d: usize, shift: &[bool]) -> Vec<Vec<f64>> {
    let m = grid.len();
    let total = m.pow(d as u32);
    (0..total)
        .map(|lin| {
            (0..d)
                .map(|axis| {
                    let k = (lin / m.pow((d - 1 - axis) as u32)) % m;
                    if shift[axis] {
                        grid.half_node(k)
                    } else {
                        grid.node(k)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn sample_medium(medium: &VariableMedium, grid: &Grid1D, d: usize) -> Result<StaggeredSamples> {
    let shifted = |axes: &[usize]| {
        let s: Vec<bool> = (0..d).map(|a| axes.contains(&a)).collect();
        staggered_points(grid, d, &s)
    };
    let sample = |f: &ScalarField, pts: &[Vec<f64>]| pts.iter().map(|p| f.eval(p)).collect::<Vec<_>>();
    let rho: Vec<Vec<f64>> = (0..d).map(|i| sample(&medium.rho, &shifted(&[i]))).collect();
    let centers = shifted(&[]);
    let lambda = sample(&medium.lambda, &centers);
    let mu_normal = sample(&medium.mu, &centers);
    let mu_shear: Vec<Vec<f64>> =
        shear_pairs(d).iter().map(|&(i, j)| sample(&medium.mu, &shifted(&[i, j]))).collect();
    for r in rho.iter().flatten() {
        if !(*r > 0.0) {
            return Err(Error::Medium(format!("density sample {r} is not positive")));
        }
    }
    for (&l, &m) in lambda.iter().zip(&mu_normal) {
        check_sample(1.0, l, m)?;
    }
    for m in mu_shear.iter().flatten() {
        if !(*m > 0.0) {
            return Err(Error::Medium(format!("shear modulus sample {m} is not positive")));
        }
    }
    Ok(StaggeredSamples { rho, lambda, mu_normal, mu_shear })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn preset_at_origin() {
        let (r, l, m) = VariableMedium::sincos_preset().at(&[0.0, 0.0]);
        assert_eq!((r, l, m), (1.0, 0.5, 0.5));
    }

    #[test]
    fn preset_density_range() {
        let g = Grid1D::new(0.0, 2.0 * PI, 32).unwrap();
        let s = sample_medium(&VariableMedium::sincos_preset(), &g, 2).unwrap();
        for r in s.rho.iter().flatten() {
            assert!((0.5..=1.5).contains(r));
        }
    }

    #[test]
    fn constant_fields_are_uniform() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let m = IsotropicMedium::new(2.0, 1.0, 0.5).unwrap();
        let s = sample_medium(&VariableMedium::constant(m), &g, 2).unwrap();
        assert!(s.rho.iter().flatten().all(|&r| r == 2.0));
        assert!(s.mu_shear.iter().flatten().all(|&r| r == 0.5));
    }

    #[test]
    fn rejects_invalid_media() {
        assert!(IsotropicMedium::new(0.0, 1.0, 1.0).is_err());
        assert!(IsotropicMedium::new(1.0, 1.0, 0.0).is_err());
        assert!(IsotropicMedium::new(1.0, -1.0, 1.0).is_err());
        let bad = VariableMedium { rho: ScalarField::SinCos { base: 0.2, amp: 0.5 }, ..VariableMedium::sincos_preset() };
        let g = Grid1D::new(0.0, 2.0 * PI, 8).unwrap();
        assert!(sample_medium(&bad, &g, 2).is_err());
    }

    #[test]
    fn speeds() {
        let m = IsotropicMedium::from_speeds(1.0, 2.0, 1.0).unwrap();
        assert_eq!((m.lambda, m.mu), (2.0, 1.0));
        assert_eq!((m.cp(), m.cs()), (2.0, 1.0));
    }

    #[test]
    fn tabulated_round_trip() {
        let g = Grid1D::new(0.0, 2.0 * PI, 8).unwrap();
        let f = ScalarField::SinCos { base: 1.0, amp: 0.5 };
        let mut text = String::new();
        for x in g.nodes() {
            for y in g.nodes() {
                text.push_str(&format!("{x:.17e} {y:.17e} {:.17e}\n", f.eval(&[x, y])));
            }
        }
        let t = TabulatedField::parse(text.as_bytes(), g, g).unwrap();
        for x in g.nodes() {
            for y in g.nodes() {
                assert!((t.eval(x, y) - f.eval(&[x, y])).abs() < 1e-14);
            }
        }
        assert!(TabulatedField::parse("0 0 1\n".as_bytes(), g, g).is_err());
    }
}
