//! Convergence sweeps over `M`, `N` or `dt` with least-squares observed orders.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail};
use elastic_schro::evolution::{EvolutionConfig, Scheme};
use elastic_schro::reference::{classical_solve, error_norms, ExactHyperbolicSolution};
use elastic_schro::resources::linear_fit;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::num;
use crate::pipeline::{evolution_config, grid_of, prepare, run, RunOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    M,
    N,
    Dt,
}

impl FromStr for SweepAxis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m" => Ok(Self::M),
            "n" => Ok(Self::N),
            "dt" => Ok(Self::Dt),
            other => bail!("unknown sweep axis {other:?}; expected M, N or dt"),
        }
    }
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::M => "M",
            Self::N => "N",
            Self::Dt => "dt",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    /// Skip the Schrödingerised runs and sweep only the classical solver.
    pub classical_only: bool,
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    /// `Δx`, `Δp` or `dt`.
    pub step: f64,
    pub quantum_error: Option<f64>,
    pub classical_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub name: String,
    pub config_hash: String,
    pub axis: SweepAxis,
    /// What each error column is measured against.
    pub reference: String,
    pub points: Vec<SweepPoint>,
    pub quantum_order: Option<f64>,
    pub classical_order: Option<f64>,
}

fn check_values(axis: SweepAxis, values: &[f64]) -> anyhow::Result<()> {
    if values.len() < 3 {
        bail!("a sweep needs at least 3 values, got {}", values.len());
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !up && !down {
        bail!("sweep values must be strictly monotone");
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        bail!("sweep values must be positive");
    }
    if axis != SweepAxis::Dt && values.iter().any(|v| v.fract() != 0.0) {
        bail!("{} values must be integers", axis.as_str());
    }
    Ok(())
}

fn configure(base: &ExperimentConfig, axis: SweepAxis, value: f64) -> ExperimentConfig {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::M => {
            cfg.grid.m = value as usize;
            // A fixed p1 belongs to one resolution; p* moves with M.
            cfg.recovery.p1 = None;
        }
        SweepAxis::N => cfg.p.n = value as usize,
        SweepAxis::Dt => cfg.time.dt = value,
    }
    cfg
}

fn step_of(cfg: &ExperimentConfig, axis: SweepAxis) -> f64 {
    match axis {
        SweepAxis::M => (cfg.grid.b - cfg.grid.a) / cfg.grid.m as f64,
        SweepAxis::N => (cfg.p.hi - cfg.p.lo) / cfg.p.n as f64,
        SweepAxis::Dt => cfg.time.dt,
    }
}

fn reference_label(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::M => "exact solution",
        SweepAxis::N => "classical solve at the same (M, dt)",
        SweepAxis::Dt => "exact exponential of the semi-discrete system",
    }
}

fn point(cfg: &ExperimentConfig, axis: SweepAxis, opts: &SweepOptions) -> anyhow::Result<SweepPoint> {
    let prep = prepare(cfg)?;
    let form = prep.assembled.formulation();
    let ecfg = evolution_config(cfg)?;
    let classical = form.decode(&classical_solve(&prep.ode, &ecfg)?);
    let names = classical.names.clone();
    let cell = grid_of(cfg)?.h().powi(cfg.dimension as i32);
    let exact = if axis == SweepAxis::M {
        let m = cfg.medium.constant().ok_or_else(|| anyhow!("an M sweep compares against the exact solution"))?;
        let x: Vec<f64> = classical.points[0].iter().map(|p| p[0]).collect();
        Some(ExactHyperbolicSolution::new(&m)?.sample(&x, cfg.time.t))
    } else {
        None
    };
    let oracle = if axis == SweepAxis::Dt {
        let exp = EvolutionConfig::new(Scheme::ExactExponential, cfg.time.dt, cfg.time.t)?;
        Some(form.decode(&classical_solve(&prep.ode, &exp)?).values)
    } else {
        None
    };
    let reference: Vec<Vec<f64>> = match axis {
        SweepAxis::M => exact.clone().expect("set above"),
        SweepAxis::N => classical.values.clone(),
        SweepAxis::Dt => oracle.clone().expect("set above"),
    };
    let rel = |u: &[Vec<f64>]| -> anyhow::Result<f64> {
        error_norms(&names, u, &reference, cell)?.max_l2_rel().ok_or_else(|| anyhow!("reference field vanishes"))
    };
    let classical_error = match axis {
        SweepAxis::N => None,
        _ => Some(rel(&classical.values)?),
    };
    let quantum_error = if opts.classical_only {
        None
    } else {
        let mut qcfg = cfg.clone();
        qcfg.compare.classical = false;
        qcfg.compare.exact = false;
        let out = run(&qcfg, &RunOptions { strict: opts.strict })?;
        Some(rel(&out.quantum.values)?)
    };
    Ok(SweepPoint { value: 0.0, step: step_of(cfg, axis), quantum_error, classical_error })
}

/// Least-squares slope of `log error` against `log step`.
pub fn observed_order(steps: &[f64], errors: &[f64]) -> Option<f64> {
    if errors.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let x: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    linear_fit(&x, &y).ok().map(|(slope, _, _)| slope)
}

/// Runs every sweep point, concurrently on the current rayon pool.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64], opts: &SweepOptions) -> anyhow::Result<SweepResult> {
    check_values(axis, values)?;
    let points: Vec<SweepPoint> = values
        .par_iter()
        .map(|&v| {
            let cfg = configure(base, axis, v);
            point(&cfg, axis, opts).map(|p| SweepPoint { value: v, ..p })
        })
        .collect::<anyhow::Result<_>>()?;
    let steps: Vec<f64> = points.iter().map(|p| p.step).collect();
    let order = |f: fn(&SweepPoint) -> Option<f64>| -> Option<f64> {
        let e: Option<Vec<f64>> = points.iter().map(f).collect();
        e.and_then(|e| observed_order(&steps, &e))
    };
    Ok(SweepResult {
        name: base.name.clone(),
        config_hash: base.hash(),
        axis,
        reference: reference_label(axis).to_string(),
        quantum_order: order(|p| p.quantum_error),
        classical_order: order(|p| p.classical_error),
        points,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One row per value followed by an `observed_order` row.
pub fn sweep_csv(r: &SweepResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# name={}", r.name);
    let _ = writeln!(s, "# config_hash={}", r.config_hash);
    let _ = writeln!(s, "# reference={}", r.reference);
    let _ = writeln!(s, "axis,value,step,quantum_error,classical_error");
    for p in &r.points {
        let _ = writeln!(s, "{},{},{},{},{}", r.axis.as_str(), num(p.value), num(p.step), opt(p.quantum_error), opt(p.classical_error));
    }
    let _ = writeln!(s, "{},observed_order,,{},{}", r.axis.as_str(), opt(r.quantum_order), opt(r.classical_order));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_checks() {
        assert!(check_values(SweepAxis::M, &[16.0, 32.0]).is_err());
        assert!(check_values(SweepAxis::M, &[16.0, 64.0, 32.0]).is_err());
        assert!(check_values(SweepAxis::M, &[16.0, 32.5, 64.0]).is_err());
        assert!(check_values(SweepAxis::Dt, &[0.04, 0.02, 0.01]).is_ok());
    }

    #[test]
    fn order_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        assert!((observed_order(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert!(observed_order(&h, &[1.0, 0.0, 1.0]).is_none());
    }
}
