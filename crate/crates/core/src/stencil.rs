//! Periodic finite-difference stencils and the staggered divergence operator.

use crate::operator::lift_axis;
use crate::{c64, Error, Grid1D, Operator, Result};

/// Periodic central difference, `(q_{i+1} − q_{i−1})/(2h)`.
pub fn central_difference_matrix(grid: &Grid1D) -> Operator {
    let m = grid.len();
    let w = 1.0 / (2.0 * grid.h());
    Operator::from_triplets(
        m,
        m,
        (0..m).flat_map(|i| [(i, (i + 1) % m, c64::new(w, 0.0)), (i, (i + m - 1) % m, c64::new(-w, 0.0))]),
    )
}

/// Periodic forward difference, `(q_{i+1} − q_i)/h`, read at `x_{i+1/2}`.
pub fn staggered_forward_difference(grid: &Grid1D) -> Operator {
    let m = grid.len();
    let w = 1.0 / grid.h();
    Operator::from_triplets(
        m,
        m,
        (0..m).flat_map(|i| [(i, (i + 1) % m, c64::new(w, 0.0)), (i, i, c64::new(-w, 0.0))]),
    )
}

/// Staggered divergence `L_v` mapping stresses to velocity tendencies.
///
/// Stress ordering is normal components first, then shear: `(σ11, σ22, σ12)` in
/// two dimensions and `(σ11, σ22, σ33, σ12, σ13, σ23)` in three.
pub fn staggered_divergence(d: usize, grid: &Grid1D) -> Result<Operator> {
    let s = staggered_forward_difference(grid);
    let si: Vec<Operator> = (1..=d).map(|a| lift_axis(&s, a, d)).collect::<Result<_>>()?;
    let st: Vec<Operator> = si.iter().map(|x| x.transpose().scale_real(-1.0)).collect();
    match d {
        2 => Ok(Operator::block(&[
            vec![Some(&si[0]), None, Some(&st[1])],
            vec![None, Some(&si[1]), Some(&st[0])],
        ])),
        3 => Ok(Operator::block(&[
            vec![Some(&si[0]), None, None, Some(&st[1]), Some(&st[2]), None],
            vec![None, Some(&si[1]), None, Some(&st[0]), None, Some(&st[2])],
            vec![None, None, Some(&si[2]), None, Some(&st[0]), Some(&st[1])],
        ])),
        _ => Err(Error::InvalidArgument(format!("staggered divergence needs d in {{2, 3}}, got {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn central_four_point() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let d = central_difference_matrix(&g);
        assert_eq!(d.get(0, 1).re, 2.0);
        assert_eq!(d.get(1, 0).re, -2.0);
        assert_eq!(d.get(0, 3).re, -2.0);
        assert_eq!(d.get(3, 0).re, 2.0);
        assert_eq!(d.sparsity(), 2);
        assert_eq!(d.add(&d.transpose()).nnz(), 0);
    }

    #[test]
    fn central_second_order_on_sine() {
        let err = |m: usize| {
            let g = Grid1D::new(0.0, 1.0, m).unwrap();
            let v: Vec<c64> = g.nodes().iter().map(|&x| c64::new((2.0 * PI * x).sin(), 0.0)).collect();
            let dv = central_difference_matrix(&g).matvec(&v);
            g.nodes()
                .iter()
                .zip(&dv)
                .map(|(&x, y)| (y.re - 2.0 * PI * (2.0 * PI * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e64, e128) = (err(64), err(128));
        // Leading term (2π)³h²/6.
        assert!(e64 <= (2.0 * PI).powi(3) / 6.0 / 64f64.powi(2) * 1.01);
        assert!((e64 / e128 - 4.0).abs() < 0.05);
    }

    #[test]
    fn forward_two_point() {
        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        let s = staggered_forward_difference(&g);
        for (r, c, v) in [(0, 0, -2.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, -2.0)] {
            assert_eq!(s.get(r, c).re, v);
        }
    }

    #[test]
    fn forward_difference_at_midpoints() {
        let err = |m: usize| {
            let g = Grid1D::new(0.0, 1.0, m).unwrap();
            let v: Vec<c64> = g.nodes().iter().map(|&x| c64::new((2.0 * PI * x).sin(), 0.0)).collect();
            let dv = staggered_forward_difference(&g).matvec(&v);
            (0..m).map(|i| (dv[i].re - 2.0 * PI * (2.0 * PI * g.half_node(i)).cos()).abs()).fold(0.0, f64::max)
        };
        assert!((err(32) / err(64) - 4.0).abs() < 0.05);
    }

    #[test]
    fn row_sums_vanish() {
        let g = Grid1D::new(0.0, 2.0, 8).unwrap();
        let ones = vec![c64::new(1.0, 0.0); 8];
        assert!(staggered_forward_difference(&g).matvec(&ones).iter().all(|x| x.norm() == 0.0));
        assert!(central_difference_matrix(&g).matvec(&ones).iter().all(|x| x.norm() == 0.0));
        let lv = staggered_divergence(3, &g).unwrap();
        let ones = vec![c64::new(1.0, 0.0); lv.cols()];
        assert!(lv.matvec(&ones).iter().all(|x| x.norm() < 1e-13));
    }

    #[test]
    fn divergence_shapes() {
        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        let lv = staggered_divergence(3, &g).unwrap();
        assert_eq!(lv.dim(), (24, 48));
        assert_eq!(lv.sparsity(), 6);
        let s1 = lift_axis(&staggered_forward_difference(&g), 1, 3).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(lv.get(r, c), s1.get(r, c));
            }
        }
        let lv2 = staggered_divergence(2, &Grid1D::new(0.0, 1.0, 4).unwrap()).unwrap();
        assert_eq!(lv2.dim(), (32, 48));
        assert!(staggered_divergence(1, &g).is_err());
    }
}
