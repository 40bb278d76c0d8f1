//! Inverse p-transform and recovery of the physical solution from the warped one.

use serde::{Deserialize, Serialize};

use crate::spectral::FourierBasis;
use crate::{c64, Error, PGrid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryMode {
    Point,
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryPlan {
    pub mode: RecoveryMode,
    pub p_star: f64,
    /// Evaluation node for point mode; first summed node for integral mode.
    pub p1_index: usize,
}

impl RecoveryPlan {
    /// Point recovery at the first node with `p_j >= p*`.
    pub fn point(pgrid: &PGrid, p_star: f64) -> Result<Self> {
        let p_star = check_pstar(p_star)?;
        let k = pgrid.first_at_or_above(p_star).ok_or_else(|| outside(pgrid, p_star))?;
        Ok(Self { mode: RecoveryMode::Point, p_star, p1_index: k })
    }

    /// Point recovery at the node nearest to a requested `p1`.
    pub fn point_at(pgrid: &PGrid, p_star: f64, p1: f64) -> Result<Self> {
        let p_star = check_pstar(p_star)?;
        let k = pgrid.nearest(p1).ok_or_else(|| outside(pgrid, p1))?;
        Ok(Self { mode: RecoveryMode::Point, p_star, p1_index: k })
    }

    /// Integral recovery over the nodes with `p_j >= p*`.
    pub fn integral(pgrid: &PGrid, p_star: f64) -> Result<Self> {
        let p_star = check_pstar(p_star)?;
        let k = pgrid.first_at_or_above(p_star).ok_or_else(|| {
            Error::InvalidArgument(format!("empty integration range: p* = {p_star} >= p_hi = {}", pgrid.hi()))
        })?;
        Ok(Self { mode: RecoveryMode::Integral, p_star, p1_index: k })
    }

    /// True when the evaluation node lies below `p*`.
    pub fn below_pstar(&self, pgrid: &PGrid) -> bool {
        pgrid.node(self.p1_index) < self.p_star - 1e-12
    }
}

fn check_pstar(p: f64) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p* must be a non-negative number, got {p}")));
    }
    Ok(p)
}

fn outside(pgrid: &PGrid, p: f64) -> Error {
    Error::InvalidArgument(format!("p = {p} outside the window [{}, {})", pgrid.lo(), pgrid.hi()))
}

fn check_len(len: usize, n_aug: usize, pgrid: &PGrid) -> Result<()> {
    if len != n_aug * pgrid.len() {
        return Err(Error::Dimension(format!("state of length {len} is not {n_aug} x {}", pgrid.len())));
    }
    Ok(())
}

fn basis(pgrid: &PGrid) -> FourierBasis {
    FourierBasis::new(pgrid.len(), pgrid.lo(), pgrid.hi() - pgrid.lo())
}

/// `v_h = (I ⊗ Φ_p) c`.
pub fn qft_p(c: &[c64], n_aug: usize, pgrid: &PGrid) -> Result<Vec<c64>> {
    check_len(c.len(), n_aug, pgrid)?;
    let b = basis(pgrid);
    let mut v = c.to_vec();
    v.chunks_mut(pgrid.len()).for_each(|row| b.synthesize(row));
    Ok(v)
}

/// `c = (I ⊗ Φ_p^{-1}) v_h`.
pub fn ift_p(v: &[c64], n_aug: usize, pgrid: &PGrid) -> Result<Vec<c64>> {
    check_len(v.len(), n_aug, pgrid)?;
    let b = basis(pgrid);
    let mut c = v.to_vec();
    c.chunks_mut(pgrid.len()).for_each(|row| b.analyze_normalized(row));
    Ok(c)
}

/// `u = e^{p_{j*}} v_h[·, j*]`.
pub fn recover_point(v_h: &[c64], n_aug: usize, pgrid: &PGrid, plan: &RecoveryPlan) -> Result<Vec<c64>> {
    check_len(v_h.len(), n_aug, pgrid)?;
    if plan.mode != RecoveryMode::Point {
        return Err(Error::InvalidArgument("plan is not a point recovery".into()));
    }
    let k = plan.p1_index;
    if k >= pgrid.len() {
        return Err(Error::InvalidArgument(format!("p1 index {k} outside the window of {} nodes", pgrid.len())));
    }
    let w = pgrid.node(k).exp();
    Ok(v_h.chunks(pgrid.len()).map(|row| row[k] * w).collect())
}

/// `u = Σ_{p_j >= p_{j*}} v_h[·, j] Δp / (e^{−p_{j*}} − e^{−p_hi})`.
///
/// The denominator is the integral of `e^{−p}` over the summed range, so the
/// formula reproduces `u` at `t = 0` up to the rectangle-rule error.
pub fn recover_integral(v_h: &[c64], n_aug: usize, pgrid: &PGrid, plan: &RecoveryPlan) -> Result<Vec<c64>> {
    check_len(v_h.len(), n_aug, pgrid)?;
    if plan.mode != RecoveryMode::Integral {
        return Err(Error::InvalidArgument("plan is not an integral recovery".into()));
    }
    let k = plan.p1_index;
    if k >= pgrid.len() {
        return Err(Error::InvalidArgument("empty integration range".into()));
    }
    let norm = (-pgrid.node(k)).exp() - (-pgrid.hi()).exp();
    let w = pgrid.dp() / norm;
    Ok(v_h.chunks(pgrid.len()).map(|row| row[k..].iter().sum::<c64>() * w).collect())
}

/// Dispatches on the plan's mode.
pub fn recover(v_h: &[c64], n_aug: usize, pgrid: &PGrid, plan: &RecoveryPlan) -> Result<Vec<c64>> {
    match plan.mode {
        RecoveryMode::Point => recover_point(v_h, n_aug, pgrid, plan),
        RecoveryMode::Integral => recover_integral(v_h, n_aug, pgrid, plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kink_state(u: &[c64], pgrid: &PGrid) -> Vec<c64> {
        let g: Vec<f64> = pgrid.nodes().iter().map(|p| (-p.abs()).exp()).collect();
        u.iter().flat_map(|&x| g.iter().map(move |&w| x * w)).collect()
    }

    #[test]
    fn round_trip() {
        let p = PGrid::new(-4.2, 5.0, 64).unwrap();
        let v: Vec<c64> = (0..128).map(|i| c64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let back = qft_p(&ift_p(&v, 2, &p).unwrap(), 2, &p).unwrap();
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_is_constant() {
        let p = PGrid::symmetric(2.0, 32).unwrap();
        let mut c = vec![c64::new(0.0, 0.0); 32];
        c[16] = c64::new(1.0, 0.0);
        let v = qft_p(&c, 1, &p).unwrap();
        assert!(v.iter().all(|x| (x - c64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn initial_time_recovery() {
        let p = PGrid::symmetric(3.0, 256).unwrap();
        let u = [c64::new(0.7, 0.0), c64::new(-1.2, 0.5)];
        let v = kink_state(&u, &p);
        for p1 in [0.1, 1.0, 2.5] {
            let plan = RecoveryPlan::point_at(&p, 0.0, p1).unwrap();
            let r = recover_point(&v, 2, &p, &plan).unwrap();
            for (a, b) in r.iter().zip(&u) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let plan = RecoveryPlan::integral(&p, 0.0).unwrap();
        let r = recover_integral(&v, 2, &p, &plan).unwrap();
        for (a, b) in r.iter().zip(&u) {
            assert!((a - b).norm() <= p.dp() * b.norm());
        }
    }

    #[test]
    fn plan_errors() {
        let p = PGrid::symmetric(1.0, 64).unwrap();
        assert!(RecoveryPlan::integral(&p, 10.0).is_err());
        assert!(RecoveryPlan::point(&p, -1.0).is_err());
        assert!(RecoveryPlan::point_at(&p, 0.0, 7.0).is_err());
        let plan = RecoveryPlan::point(&p, 0.0).unwrap();
        assert!(recover_integral(&vec![c64::new(0.0, 0.0); 64], 1, &p, &plan).is_err());
    }
}
