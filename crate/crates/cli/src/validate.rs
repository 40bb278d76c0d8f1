//! Desk-scale invariant suite behind the `validate` subcommand.

use std::time::Instant;

use anyhow::Context;
use elastic_schro::evolution::{evolve, evolve_modes, expm, EvolutionConfig, Scheme};
use elastic_schro::formulations::DerivativeScheme;
use elastic_schro::medium::IsotropicMedium;
use elastic_schro::recovery::{recover, RecoveryPlan};
use elastic_schro::reference::spectral_residual;
use elastic_schro::resources::{measure_modes, pstar_scaling, predict, ComplexityScenario, FormulationTag};
use elastic_schro::schrodinger::{schrodingerize_modes, ModeHamiltonian};
use elastic_schro::stencil::central_difference_matrix;
use elastic_schro::{c64, Grid1D, Operator};
use faer::Mat;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::pipeline::{choose_window, prepare, recovery_plan, warped_solution, Prepared, RunOptions};

/// A deliberate defect, used to show the suite catches it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Negates the periodic wrap entry of the first row of the
    /// central-difference matrix.
    CentralWrapSignFlip,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
}

impl InvariantResult {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance, seconds: 0.0 }
    }

    fn failed(name: impl Into<String>, err: &anyhow::Error) -> Self {
        Self { name: format!("{} ({err:#})", name.into()), value: f64::NAN, tolerance: f64::NAN, pass: false, seconds: 0.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub results: Vec<InvariantResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.results.iter().filter(|r| !r.pass)
    }
}

const DESK_TEMPLATES: [(&str, &str); 4] = [
    (
        "smf",
        r#"
name = "desk-smf"
formulation = "smf"
dimension = 1
[grid]
a = 0.0
b = 10.0
m = 8
[medium]
rho = 1.0
lambda = 2.0
mu = 1.0
[force]
kind = "constant"
value = 0.1
[initial]
kind = "gaussian"
field = "sigma11"
center = [5.0]
width = 1.5
"#,
    ),
    (
        "staggered-vs",
        r#"
name = "desk-staggered-vs"
formulation = "staggered-vs"
dimension = 2
[grid]
a = 0.0
b = 6.283185307179586
m = 4
[medium]
preset = "paper-6.2"
[initial]
kind = "gaussian"
field = "sigma11"
center = [3.141592653589793, 3.141592653589793]
width = 1.5
"#,
    ),
    (
        "displacement-spectral",
        r#"
name = "desk-displacement-spectral"
formulation = "displacement-spectral"
dimension = 1
[grid]
a = 0.0
b = 1.0
m = 8
[medium]
rho = 1.41
lambda = 0.61
mu = 0.40
[initial]
kind = "gaussian"
field = "xi"
center = [0.5]
width = 0.25
"#,
    ),
    (
        "displacement-central",
        r#"
name = "desk-displacement-central"
formulation = "displacement-central"
dimension = 1
[grid]
a = 0.0
b = 1.0
m = 8
[medium]
rho = 1.41
lambda = 0.61
mu = 0.40
[initial]
kind = "gaussian"
field = "xi"
center = [0.5]
width = 0.25
"#,
    ),
];

const DESK_COMMON: &str = r#"
[p]
lo = -9.42477796076938
hi = 9.42477796076938
n = 64
[time]
scheme = "cn"
dt = 0.01
t = 1.0
[recovery]
mode = "point"
[compare]
classical = true
"#;

/// One small configuration per formulation (`M ≤ 8`, `N = 64`).
pub fn desk_configs() -> Vec<ExperimentConfig> {
    DESK_TEMPLATES
        .iter()
        .map(|(_, body)| {
            let src = format!("{body}{DESK_COMMON}");
            ExperimentConfig::parse(&src).expect("bundled desk configuration parses")
        })
        .collect()
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn diff_norm(a: &[c64], b: &[c64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `max |D + Dᵀ|` of the periodic central-difference matrix.
pub fn central_antisymmetry(m: usize, mutation: Mutation) -> anyhow::Result<f64> {
    let grid = Grid1D::new(0.0, 1.0, m)?;
    let mut d = central_difference_matrix(&grid);
    if mutation == Mutation::CentralWrapSignFlip {
        let t = d
            .triplets()
            .map(|(i, j, v)| if (i, j) == (0, m - 1) { (i, j, -v) } else { (i, j, v) })
            .collect::<Vec<_>>();
        d = Operator::from_triplets(m, m, t);
    }
    Ok(d.add(&d.transpose()).max_norm())
}

fn p_window(prep: &Prepared, cfg: &ExperimentConfig) -> anyhow::Result<(elastic_schro::PGrid, f64)> {
    let p_star = (prep.lambda_max * cfg.time.t).max(0.0);
    let mut warnings = Vec::new();
    let (pgrid, _) = choose_window(cfg, p_star, &RunOptions::default(), &mut warnings)?;
    Ok((pgrid, p_star))
}

/// Relative distance between the recovered state and the dense exponential of
/// the augmented generator, with its tolerance `5(Δp + dt²)`.
pub fn oracle_equivalence(cfg: &ExperimentConfig) -> anyhow::Result<(f64, f64)> {
    let prep = prepare(cfg)?;
    let (pgrid, p_star) = p_window(&prep, cfg)?;
    let plan = recovery_plan(cfg, &pgrid, p_star)?;
    let (v_h, modes) = warped_solution(&prep, cfg, &pgrid)?;
    let got = recover(&v_h, modes.n_aug, &pgrid, &plan)?;
    let a = prep.augmented.a.to_dense();
    let t = cfg.time.t;
    let prop = expm(&Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * t));
    let u0 = &prep.augmented.u0;
    let n = prep.assembled.formulation().state_len();
    let oracle: Vec<c64> = (0..n).map(|i| (0..u0.len()).map(|j| prop[(i, j)] * u0[j]).sum()).collect();
    let rel = diff_norm(&got[..n], &oracle) / norm(&oracle);
    let dt = cfg.time.dt;
    Ok((rel, 5.0 * (pgrid.dp() + dt * dt)))
}

fn mode_hamiltonian(cfg: &ExperimentConfig) -> anyhow::Result<(Prepared, ModeHamiltonian, Vec<c64>)> {
    let prep = prepare(cfg)?;
    let (pgrid, _) = p_window(&prep, cfg)?;
    let modes = schrodingerize_modes(&prep.pair, &prep.augmented.u0, &pgrid, &cfg.warp.build(), prep.pad)?;
    Ok((prep, modes.hamiltonian, modes.c0))
}

/// Relative change of `‖c‖` after 1000 Crank–Nicolson steps of `H_s`.
pub fn unitarity_drift(cfg: &ExperimentConfig) -> anyhow::Result<f64> {
    let (_, h, c0) = mode_hamiltonian(cfg)?;
    let ecfg = EvolutionConfig::new(Scheme::CrankNicolson, 1e-3, 1.0)?;
    let c = evolve_modes(&h, &c0, &ecfg)?;
    Ok((norm(&c) - norm(&c0)).abs() / norm(&c0))
}

/// Largest deviation of the Hermitian split from `A`, and `H_s` from Hermitian.
pub fn hermitian_structure(cfg: &ExperimentConfig) -> anyhow::Result<(f64, f64)> {
    let (prep, h, _) = mode_hamiltonian(cfg)?;
    let split = prep.pair.reconstruct().max_abs_diff(&prep.augmented.a);
    Ok((split, h.assemble()?.hermitian_defect()))
}

/// Differences between the reported `(s, ‖H‖_max)` and a row-by-row count of
/// the assembled `H_s`.
pub fn metadata_brute_force(cfg: &ExperimentConfig) -> anyhow::Result<(f64, f64)> {
    let (_, h, _) = mode_hamiltonian(cfg)?;
    let est = measure_modes(&h, cfg.time.t, cfg.resources.delta, cfg.resources.m_e)?;
    let full = h.assemble()?;
    let (mut s, mut hmax) = (0usize, 0.0f64);
    for r in 0..full.rows() {
        let (_, vals) = full.row(r);
        s = s.max(vals.iter().filter(|v| v.norm() > 0.0).count());
        hmax = vals.iter().fold(hmax, |m, v| m.max(v.norm()));
    }
    let ds = (est.s.unwrap_or(0) as f64 - s as f64).abs();
    let dh = (est.hmax.unwrap_or(f64::NAN) - hmax).abs();
    Ok((ds, dh))
}

/// Point and integral recovery from the same warped state, as
/// `‖u_point − u_integral‖ / ‖u_point‖`, with the tolerance `3Δp`.
pub fn recovery_consistency(cfg: &ExperimentConfig) -> anyhow::Result<(f64, f64)> {
    let prep = prepare(cfg)?;
    let (pgrid, p_star) = p_window(&prep, cfg)?;
    let (v_h, modes) = warped_solution(&prep, cfg, &pgrid)?;
    let n = prep.assembled.formulation().state_len();
    let point = recover(&v_h, modes.n_aug, &pgrid, &RecoveryPlan::point(&pgrid, p_star)?)?;
    let integral = recover(&v_h, modes.n_aug, &pgrid, &RecoveryPlan::integral(&pgrid, p_star)?)?;
    Ok((diff_norm(&point[..n], &integral[..n]) / norm(&point[..n]), 3.0 * pgrid.dp()))
}

/// Spread of point recoveries over the nodes in `[p*, p* + 1]`, relative to
/// `‖u‖`, with the tolerance `3Δp`.
pub fn point_robustness(cfg: &ExperimentConfig) -> anyhow::Result<(f64, f64)> {
    let prep = prepare(cfg)?;
    let (pgrid, p_star) = p_window(&prep, cfg)?;
    let (v_h, modes) = warped_solution(&prep, cfg, &pgrid)?;
    let n = prep.assembled.formulation().state_len();
    let first = RecoveryPlan::point(&pgrid, p_star)?;
    let base = recover(&v_h, modes.n_aug, &pgrid, &first)?;
    let mut worst = 0.0f64;
    let mut j = first.p1_index + 1;
    while j < pgrid.len() && pgrid.node(j) <= p_star + 1.0 {
        let plan = RecoveryPlan { p1_index: j, ..first.clone() };
        let u = recover(&v_h, modes.n_aug, &pgrid, &plan)?;
        worst = worst.max(diff_norm(&u[..n], &base[..n]));
        j += 1;
    }
    Ok((worst / norm(&base[..n]), 3.0 * pgrid.dp()))
}

/// Relative drift of `‖u‖` per 100 classical Crank–Nicolson steps of the
/// force-free SMF system.
pub fn smf_energy_drift() -> anyhow::Result<f64> {
    let mut cfg = desk_configs().remove(0);
    cfg.force = crate::config::ForceSpec::None;
    cfg.grid.m = 16;
    let prep = prepare(&cfg)?;
    let ecfg = EvolutionConfig::new(Scheme::CrankNicolson, 0.01, 1.0)?;
    let u = evolve(&prep.ode.a, &prep.ode.u0, &ecfg, false)?.state;
    Ok((norm(&u) - norm(&prep.ode.u0)).abs() / norm(&prep.ode.u0))
}

/// Fit quality of `λ_max(H_1)` against `M` for both displacement schemes.
pub fn pstar_fit() -> anyhow::Result<(f64, f64, f64)> {
    let medium = IsotropicMedium::new(1.41, 0.61, 0.40)?;
    let ms = [16, 32, 64];
    let spectral = pstar_scaling(DerivativeScheme::Spectral, &ms, &medium, 0.0, 1.0)?;
    let cent = pstar_scaling(DerivativeScheme::Central, &ms, &medium, 0.0, 1.0)?;
    let ratio = spectral
        .lambda_max
        .windows(2)
        .map(|w| (w[1] / w[0] - 2.0).abs())
        .fold(0.0, f64::max);
    Ok((spectral.r_squared, cent.r_squared, ratio))
}

/// Number of monotonicity violations of `predict` in `T`, `1/ε` and `d`.
pub fn predict_monotone() -> anyhow::Result<f64> {
    let tags = [
        FormulationTag::Smf,
        FormulationTag::StaggeredVs,
        FormulationTag::DisplacementSpectral,
        FormulationTag::DisplacementCentral,
    ];
    let gate = |tag, d, eps, t| -> anyhow::Result<f64> { Ok(predict(&ComplexityScenario::new(tag, d, 2.0, eps, t)?)?.n_gate) };
    let mut bad = 0;
    for tag in tags {
        let ds: &[usize] = match tag {
            FormulationTag::Smf => &[1, 2, 3],
            FormulationTag::StaggeredVs => &[2, 3],
            _ => &[1, 3],
        };
        for &d in ds {
            for (e0, e1) in [(1e-1, 1e-2), (1e-2, 1e-3)] {
                bad += (gate(tag, d, e1, 1.0)? < gate(tag, d, e0, 1.0)?) as u32;
            }
            bad += (gate(tag, d, 1e-2, 2.0)? < gate(tag, d, 1e-2, 1.0)?) as u32;
        }
        for w in ds.windows(2) {
            bad += (gate(tag, w[1], 1e-2, 1.0)? < gate(tag, w[0], 1e-2, 1.0)?) as u32;
        }
    }
    Ok(bad as f64)
}

fn timed<F>(out: &mut Vec<InvariantResult>, label: &str, f: F)
where
    F: FnOnce() -> anyhow::Result<Vec<InvariantResult>>,
{
    let start = Instant::now();
    match f().with_context(|| label.to_string()) {
        Ok(rs) => {
            let secs = start.elapsed().as_secs_f64() / rs.len().max(1) as f64;
            out.extend(rs.into_iter().map(|r| InvariantResult { seconds: secs, ..r }));
        }
        Err(e) => out.push(InvariantResult::failed(label, &e)),
    }
}

pub fn run_suite(mutation: Mutation) -> ValidationReport {
    let mut out = Vec::new();
    timed(&mut out, "central difference antisymmetry", || {
        Ok(vec![InvariantResult::at_most("central difference antisymmetry |D + Dᵀ|", central_antisymmetry(8, mutation)?, 1e-14)])
    });
    for cfg in desk_configs() {
        let tag = cfg.formulation.as_str();
        timed(&mut out, &format!("{tag}: hermitian structure"), || {
            let (split, herm) = hermitian_structure(&cfg)?;
            Ok(vec![
                InvariantResult::at_most(format!("{tag}: |H1 + iH2 − A|"), split, 1e-12),
                InvariantResult::at_most(format!("{tag}: H_s Hermitian defect"), herm, 1e-12),
            ])
        });
        timed(&mut out, &format!("{tag}: unitarity"), || {
            Ok(vec![InvariantResult::at_most(format!("{tag}: CN norm drift over 1000 steps"), unitarity_drift(&cfg)?, 1e-12)])
        });
        timed(&mut out, &format!("{tag}: oracle equivalence"), || {
            let (rel, tol) = oracle_equivalence(&cfg)?;
            Ok(vec![InvariantResult::at_most(format!("{tag}: recovered vs dense exponential"), rel, tol)])
        });
        timed(&mut out, &format!("{tag}: metadata"), || {
            let (ds, dh) = metadata_brute_force(&cfg)?;
            Ok(vec![
                InvariantResult::at_most(format!("{tag}: sparsity vs row count"), ds, 0.0),
                InvariantResult::at_most(format!("{tag}: max norm vs entry scan"), dh, 0.0),
            ])
        });
        timed(&mut out, &format!("{tag}: recovery"), || {
            let (c, tc) = recovery_consistency(&cfg)?;
            let (r, tr) = point_robustness(&cfg)?;
            Ok(vec![
                InvariantResult::at_most(format!("{tag}: point vs integral recovery"), c, tc),
                InvariantResult::at_most(format!("{tag}: point recovery spread on [p*, p*+1]"), r, tr),
            ])
        });
    }
    timed(&mut out, "smf energy", || {
        Ok(vec![InvariantResult::at_most("smf: force-free CN energy drift", smf_energy_drift()?, 1e-10)])
    });
    timed(&mut out, "exact triple residual", || {
        let m = IsotropicMedium::new(1.41, 0.61, 0.40)?;
        let worst = [0.0, 0.5, 1.0].iter().map(|&t| spectral_residual(&m, 64, t)).collect::<Result<Vec<_>, _>>()?;
        Ok(vec![InvariantResult::at_most("exact triple spectral residual (M = 64)", worst.into_iter().fold(0.0, f64::max), 1e-10)])
    });
    timed(&mut out, "p* scaling", || {
        let (rs, rc, ratio) = pstar_fit()?;
        Ok(vec![
            InvariantResult::at_most("spectral λ_max vs M: 1 − R²", 1.0 - rs, 1e-3),
            InvariantResult::at_most("central λ_max vs M: 1 − R²", 1.0 - rc, 1e-3),
            InvariantResult::at_most("spectral λ_max doubling ratio − 2", ratio, 0.05),
        ])
    });
    timed(&mut out, "predict monotone", || {
        Ok(vec![InvariantResult::at_most("predict monotone in T, 1/ε, d (violations)", predict_monotone()?, 0.0)])
    });
    ValidationReport { results: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_flip_breaks_antisymmetry() {
        assert_eq!(central_antisymmetry(8, Mutation::None).unwrap(), 0.0);
        assert!(central_antisymmetry(8, Mutation::CentralWrapSignFlip).unwrap() > 1.0);
    }

    #[test]
    fn desk_configs_parse() {
        let tags: Vec<_> = desk_configs().iter().map(|c| c.formulation).collect();
        assert_eq!(tags.len(), 4);
    }
}
