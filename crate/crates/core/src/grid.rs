//! Uniform periodic grids in space and in the auxiliary variable p.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic grid on `[a, b)` with `m` nodes, `m` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    m: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Grid(format!("need a < b, got [{a}, {b}]")));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Grid(format!("M = {m} is not a power of two >= 2")));
        }
        Ok(Self { a, b, m })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.m as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    /// Node shifted by half a cell, `x_{j+1/2}`.
    pub fn half_node(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    /// Frequencies `2π(l − M/2)/(b − a)` for `l = 0..M`.
    pub fn frequencies(&self) -> Vec<f64> {
        fourier_frequencies(self.m, self.length())
    }
}

/// Frequencies for an `n`-point periodic grid of the given length, ordered from
/// `−πn/len` upward, with the zero frequency at index `n/2`.
pub fn fourier_frequencies(n: usize, len: f64) -> Vec<f64> {
    let half = (n / 2) as f64;
    (0..n).map(|l| 2.0 * PI * (l as f64 - half) / len).collect()
}

/// Uniform periodic grid in p over `[lo, hi)` with `n` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl PGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::Grid(format!("need p_lo < p_hi, got [{lo}, {hi}]")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("N = {n} is not a power of two >= 2")));
        }
        Ok(Self { lo, hi, n })
    }

    /// The symmetric window `[−πL, πL]`.
    pub fn symmetric(l: f64, n: usize) -> Result<Self> {
        Self::new(-PI * l, PI * l, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dp(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.dp()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        fourier_frequencies(self.n, self.hi - self.lo)
    }

    /// First index with `p_j >= p`, if any lies inside the window.
    pub fn first_at_or_above(&self, p: f64) -> Option<usize> {
        let mut k = ((p - self.lo) / self.dp()).floor().clamp(0.0, self.n as f64) as usize;
        while k < self.n && self.node(k) < p {
            k += 1;
        }
        while k > 0 && self.node(k - 1) >= p {
            k -= 1;
        }
        (k < self.n).then_some(k)
    }

    /// Index of the node nearest to `p`, if `p` lies inside the window.
    pub fn nearest(&self, p: f64) -> Option<usize> {
        let k = ((p - self.lo) / self.dp()).round();
        (k >= 0.0 && (k as usize) < self.n).then_some(k as usize)
    }
}
