//! assemble → homogenise → split → schrödingerise → evolve → recover → compare.

use anyhow::{anyhow, bail, Context};
use elastic_schro::eigen::lambda_max;
use elastic_schro::evolution::{evolve_modes, EvolutionConfig};
use elastic_schro::formulations::displacement::component_names as displacement_names;
use elastic_schro::formulations::smf::{stress_count, stress_names, velocity_names, VelocityStressFields};
use elastic_schro::formulations::staggered::component_points;
use elastic_schro::formulations::{
    assemble_displacement, assemble_smf, assemble_staggered_vs, DerivativeScheme, DisplacementSystem, FieldSet,
    Formulation, SmfSystem, StaggeredVsSystem,
};
use elastic_schro::medium::staggered_points;
use elastic_schro::recovery::{qft_p, recover, RecoveryMode, RecoveryPlan};
use elastic_schro::reference::{classical_solve, error_norms, ErrorReport, ExactHyperbolicSolution};
use elastic_schro::resources::{measure_modes, predicted_qubits, FormulationTag, GridSize, ResourceEstimate};
use elastic_schro::schrodinger::{
    hermitian_split, homogenize, pad_to_power_of_two, schrodingerize_modes, HermitianPair, LinearOdeSystem, ModeSystem,
};
use elastic_schro::{c64, Grid1D, PGrid};
use serde::Serialize;

use crate::config::{ExperimentConfig, InitialSpec};

pub enum Assembled {
    Smf(SmfSystem),
    Staggered(StaggeredVsSystem),
    Displacement(DisplacementSystem),
}

impl Assembled {
    pub fn formulation(&self) -> &dyn Formulation {
        match self {
            Self::Smf(s) => s,
            Self::Staggered(s) => s,
            Self::Displacement(s) => s,
        }
    }
}

/// Component names in state-layout order.
pub fn field_names(tag: FormulationTag, d: usize) -> Vec<String> {
    match tag {
        FormulationTag::Smf => stress_names(d).iter().chain(velocity_names(d)).map(|s| s.to_string()).collect(),
        FormulationTag::StaggeredVs => {
            velocity_names(d).iter().chain(stress_names(d)).map(|s| s.to_string()).collect()
        }
        _ => displacement_names(d),
    }
}

fn field_points(tag: FormulationTag, grid: &Grid1D, d: usize) -> Vec<Vec<Vec<f64>>> {
    let n = field_names(tag, d).len();
    match tag {
        FormulationTag::StaggeredVs => component_points(grid, d),
        _ => vec![staggered_points(grid, d, &vec![false; d]); n],
    }
}

/// Initial samples per component in state-layout order.
pub fn initial_fields(cfg: &ExperimentConfig, grid: &Grid1D) -> anyhow::Result<Vec<Vec<f64>>> {
    let d = cfg.dimension;
    let names = field_names(cfg.formulation, d);
    let points = field_points(cfg.formulation, grid, d);
    match &cfg.initial {
        InitialSpec::Gaussian { field, center, width } => {
            let k = names
                .iter()
                .position(|n| n == field)
                .ok_or_else(|| anyhow!("initial.field {field:?} is not one of {}", names.join(", ")))?;
            let mut out = vec![vec![0.0; points[0].len()]; names.len()];
            out[k] = points[k]
                .iter()
                .map(|x| {
                    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                    (-r2 / (width * width)).exp()
                })
                .collect();
            Ok(out)
        }
        InitialSpec::Exact => {
            let m = cfg.medium.constant().ok_or_else(|| anyhow!("exact initial data needs a constant medium"))?;
            let x: Vec<f64> = points[0].iter().map(|p| p[0]).collect();
            Ok(ExactHyperbolicSolution::new(&m)?.sample(&x, 0.0))
        }
    }
}

pub fn grid_of(cfg: &ExperimentConfig) -> anyhow::Result<Grid1D> {
    Ok(Grid1D::new(cfg.grid.a, cfg.grid.b, cfg.grid.m)?)
}

pub fn assemble(cfg: &ExperimentConfig) -> anyhow::Result<Assembled> {
    let grid = grid_of(cfg)?;
    let d = cfg.dimension;
    let block = cfg.grid_nodes();
    let init = initial_fields(cfg, &grid)?;
    let force = cfg.force_value().map(|f| vec![vec![f; block]; d]);
    Ok(match cfg.formulation {
        FormulationTag::Smf => {
            let ns = stress_count(d);
            let fields = VelocityStressFields { stress: init[..ns].to_vec(), velocity: init[ns..].to_vec() };
            let m = cfg.medium.constant().ok_or_else(|| anyhow!("smf needs a constant medium"))?;
            Assembled::Smf(assemble_smf(&grid, &m, d, force.as_deref(), &fields)?)
        }
        FormulationTag::StaggeredVs => {
            let fields = VelocityStressFields { velocity: init[..d].to_vec(), stress: init[d..].to_vec() };
            Assembled::Staggered(assemble_staggered_vs(&grid, &cfg.medium.variable(), d, &fields)?)
        }
        FormulationTag::DisplacementSpectral | FormulationTag::DisplacementCentral => {
            let scheme = if cfg.formulation == FormulationTag::DisplacementSpectral {
                DerivativeScheme::Spectral
            } else {
                DerivativeScheme::Central
            };
            let m = cfg.medium.constant().ok_or_else(|| anyhow!("displacement needs a constant medium"))?;
            Assembled::Displacement(assemble_displacement(&grid, &m, d, scheme, force.as_deref(), &init)?)
        }
    })
}

/// Everything up to and including the Hermitian split.
pub struct Prepared {
    pub assembled: Assembled,
    pub ode: LinearOdeSystem,
    /// Homogenised and padded system.
    pub augmented: LinearOdeSystem,
    pub pad: usize,
    pub pair: HermitianPair,
    pub lambda_max: f64,
}

/// Assembly, homogenisation, padding and the Hermitian split, without `λ_max`.
pub fn split(cfg: &ExperimentConfig) -> anyhow::Result<(LinearOdeSystem, HermitianPair)> {
    let ode = assemble(cfg)?.formulation().ode();
    let (augmented, _) = pad_to_power_of_two(&homogenize(&ode, cfg.homogenization)?)?;
    let pair = hermitian_split(&augmented.a)?;
    Ok((augmented, pair))
}

pub fn prepare(cfg: &ExperimentConfig) -> anyhow::Result<Prepared> {
    let assembled = assemble(cfg)?;
    let ode = assembled.formulation().ode();
    let homog = homogenize(&ode, cfg.homogenization)?;
    let (augmented, pad) = pad_to_power_of_two(&homog)?;
    let pair = hermitian_split(&augmented.a)?;
    let lambda_max = lambda_max(&pair.h1).context("largest eigenvalue of H1")?;
    Ok(Prepared { assembled, ode, augmented, pad, pair, lambda_max })
}

pub fn evolution_config(cfg: &ExperimentConfig) -> anyhow::Result<EvolutionConfig> {
    Ok(EvolutionConfig::new(cfg.time.scheme, cfg.time.dt, cfg.time.t)?)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Fail instead of extending the p window when `p*` lies outside it.
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Dimensions {
    pub physical: usize,
    pub augmented: usize,
    pub pad: usize,
    pub hamiltonian: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PWindowReport {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub extended: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub config_hash: String,
    pub formulation: FormulationTag,
    pub dimension: usize,
    pub dims: Dimensions,
    pub lambda_max_h1: f64,
    pub p_star: f64,
    pub p_window: PWindowReport,
    pub recovery_mode: RecoveryMode,
    pub p1: f64,
    pub p1_index: usize,
    pub p1_below_p_star: bool,
    pub warnings: Vec<String>,
    pub quantum_vs_classical: Option<ErrorReport>,
    pub quantum_vs_exact: Option<ErrorReport>,
    pub classical_vs_exact: Option<ErrorReport>,
    pub checks: Vec<Check>,
    pub resources: ResourceEstimate,
    pub predicted_m_h: u32,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub struct RunOutcome {
    pub report: RunReport,
    pub names: Vec<String>,
    pub points: Vec<Vec<Vec<f64>>>,
    pub quantum: FieldSet,
    pub classical: Option<FieldSet>,
    pub exact: Option<Vec<Vec<f64>>>,
}

/// Chooses the p window: the configured one, or `[lo, p* + 1]` when no node
/// of it lies at or above `p*`.
pub fn choose_window(cfg: &ExperimentConfig, p_star: f64, opts: &RunOptions, warnings: &mut Vec<String>) -> anyhow::Result<(PGrid, bool)> {
    let w = &cfg.p;
    let needed = cfg.recovery.p1.map_or(p_star, |p1| p1.max(p_star));
    let configured = PGrid::new(w.lo, w.hi, w.n)?;
    if configured.first_at_or_above(needed).is_some() {
        return Ok((configured, false));
    }
    let msg = format!("p window [{}, {}] does not contain p = {needed:.6}", w.lo, w.hi);
    if opts.strict {
        bail!("{msg}");
    }
    let mut hi = needed + 1.0;
    let mut grid = PGrid::new(w.lo, hi, w.n)?;
    // Coarse windows may need more room before a node lands at or above p*.
    while grid.first_at_or_above(needed).is_none() {
        hi += 1.0;
        grid = PGrid::new(w.lo, hi, w.n)?;
    }
    warnings.push(format!("{msg}; extended to [{}, {hi:.6}]", w.lo));
    Ok((grid, true))
}

pub fn recovery_plan(cfg: &ExperimentConfig, pgrid: &PGrid, p_star: f64) -> anyhow::Result<RecoveryPlan> {
    Ok(match (cfg.recovery.mode, cfg.recovery.p1) {
        (RecoveryMode::Point, Some(p1)) => RecoveryPlan::point_at(pgrid, p_star, p1)?,
        (RecoveryMode::Point, None) => RecoveryPlan::point(pgrid, p_star)?,
        (RecoveryMode::Integral, p1) => {
            let mut plan = RecoveryPlan::integral(pgrid, p1.map_or(p_star, |p| p.max(0.0)))?;
            plan.p_star = p_star;
            plan
        }
    })
}

/// Schrödingerises the prepared system on `pgrid`, evolves every p-mode and
/// recovers the augmented state.
pub fn quantum_solve(prep: &Prepared, cfg: &ExperimentConfig, pgrid: &PGrid, plan: &RecoveryPlan) -> anyhow::Result<(Vec<c64>, ModeSystem)> {
    let (v_h, modes) = warped_solution(prep, cfg, pgrid)?;
    Ok((recover(&v_h, modes.n_aug, pgrid, plan)?, modes))
}

/// The warped state `v_h(T)` on the p nodes, before recovery.
pub fn warped_solution(prep: &Prepared, cfg: &ExperimentConfig, pgrid: &PGrid) -> anyhow::Result<(Vec<c64>, ModeSystem)> {
    let ecfg = evolution_config(cfg)?;
    let modes = schrodingerize_modes(&prep.pair, &prep.augmented.u0, pgrid, &cfg.warp.build(), prep.pad)?;
    let c_t = evolve_modes(&modes.hamiltonian, &modes.c0, &ecfg)?;
    Ok((qft_p(&c_t, modes.n_aug, pgrid)?, modes))
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> anyhow::Result<RunOutcome> {
    let prep = prepare(cfg)?;
    let form = prep.assembled.formulation();
    let t = cfg.time.t;
    let p_star = (prep.lambda_max * t).max(0.0);
    let mut warnings = Vec::new();
    let (pgrid, extended) = choose_window(cfg, p_star, opts, &mut warnings)?;

    let plan = recovery_plan(cfg, &pgrid, p_star)?;
    let below = plan.below_pstar(&pgrid);
    if below {
        warnings.push(format!(
            "recovery node p = {:.6} lies below p* = {p_star:.6}; recovery is not guaranteed",
            pgrid.node(plan.p1_index)
        ));
    }

    let ecfg = evolution_config(cfg)?;
    let (recovered, modes) = quantum_solve(&prep, cfg, &pgrid, &plan)?;
    let n_phys = form.state_len();
    let quantum = form.decode(&recovered[..n_phys]);

    let classical = if cfg.compare.classical {
        Some(form.decode(&classical_solve(&prep.ode, &ecfg)?))
    } else {
        None
    };
    let grid = grid_of(cfg)?;
    let exact = if cfg.compare.exact {
        let m = cfg.medium.constant().ok_or_else(|| anyhow!("exact comparison needs a constant medium"))?;
        let x: Vec<f64> = quantum.points[0].iter().map(|p| p[0]).collect();
        Some(ExactHyperbolicSolution::new(&m)?.sample(&x, t))
    } else {
        None
    };

    let cell = grid.h().powi(cfg.dimension as i32);
    let names = quantum.names.clone();
    let vs_classical = classical.as_ref().map(|c| error_norms(&names, &quantum.values, &c.values, cell)).transpose()?;
    let vs_exact = exact.as_ref().map(|e| error_norms(&names, &quantum.values, e, cell)).transpose()?;
    let classical_vs_exact = match (&classical, &exact) {
        (Some(c), Some(e)) => Some(error_norms(&names, &c.values, e, cell)?),
        _ => None,
    };

    let (reference, label) = match (&vs_exact, &vs_classical) {
        (Some(r), _) => (Some(r), "exact"),
        (None, Some(r)) => (Some(r), "classical"),
        _ => (None, ""),
    };
    let mut checks = Vec::new();
    if let Some(r) = reference {
        if let Some(tol) = cfg.compare.rel_l2 {
            let value = r.max_l2_rel().unwrap_or(f64::INFINITY);
            checks.push(Check { name: format!("max relative L2 vs {label}"), value, tolerance: tol, pass: value <= tol });
        }
        if let Some(tol) = cfg.compare.rel_linf {
            let value = r.max_linf_rel();
            checks.push(Check { name: format!("max relative Linf vs {label}"), value, tolerance: tol, pass: value <= tol });
        }
    }

    let resources = measure_modes(&modes.hamiltonian, t, cfg.resources.delta, cfg.resources.m_e)?;
    let predicted_m_h = predicted_qubits(
        cfg.formulation,
        cfg.dimension,
        &GridSize { m: cfg.grid.m, n_p: pgrid.len(), forced: prep.ode.has_source() },
    );

    let report = RunReport {
        name: cfg.name.clone(),
        config_hash: cfg.hash(),
        formulation: cfg.formulation,
        dimension: cfg.dimension,
        dims: Dimensions {
            physical: n_phys,
            augmented: modes.n_aug,
            pad: prep.pad,
            hamiltonian: modes.hamiltonian.dim(),
        },
        lambda_max_h1: prep.lambda_max,
        p_star,
        p_window: PWindowReport { lo: pgrid.lo(), hi: pgrid.hi(), n: pgrid.len(), extended },
        recovery_mode: plan.mode,
        p1: pgrid.node(plan.p1_index),
        p1_index: plan.p1_index,
        p1_below_p_star: below,
        warnings,
        quantum_vs_classical: vs_classical,
        quantum_vs_exact: vs_exact,
        classical_vs_exact,
        checks,
        resources,
        predicted_m_h,
    };
    let points = quantum.points.clone();
    Ok(RunOutcome { report, names, points, quantum, classical, exact })
}

/// Measured simulation counts and the predicted register width, without evolving.
pub fn measure_config(cfg: &ExperimentConfig, opts: &RunOptions) -> anyhow::Result<(ResourceEstimate, u32)> {
    let prep = prepare(cfg)?;
    let p_star = (prep.lambda_max * cfg.time.t).max(0.0);
    let (pgrid, _) = choose_window(cfg, p_star, opts, &mut Vec::new())?;
    let modes = schrodingerize_modes(&prep.pair, &prep.augmented.u0, &pgrid, &cfg.warp.build(), prep.pad)?;
    let est = measure_modes(&modes.hamiltonian, cfg.time.t, cfg.resources.delta, cfg.resources.m_e)?;
    let predicted = predicted_qubits(
        cfg.formulation,
        cfg.dimension,
        &GridSize { m: cfg.grid.m, n_p: pgrid.len(), forced: prep.ode.has_source() },
    );
    Ok((est, predicted))
}
