//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion on stdout.

use std::io::Write;
use std::time::Instant;

use elastic_schro::medium::IsotropicMedium;
use elastic_schro::recovery::RecoveryMode;
use elastic_schro::reference::spectral_residual;
use elastic_schro::resources::{predict, ComplexityScenario, FormulationTag};
use elastic_schro::schrodinger::ModeHamiltonian;
use elastic_schro::{Operator, PGrid};
use schro_cli::config::{ExperimentConfig, PWindow};
use schro_cli::pipeline::{prepare, run, split, RunOptions, RunReport};
use schro_cli::sweep::{sweep, SweepAxis, SweepOptions};
use schro_cli::validate::{desk_configs, oracle_equivalence, unitarity_drift};

struct Outcome {
    id: u32,
    pass: bool,
}

fn emit(id: u32, title: &str, pass: bool, secs: f64, budget: f64, detail: &str) -> Outcome {
    let within = secs < budget;
    let pass = pass && within;
    let line = format!(
        "[{}] criterion {id:>2}: {title} | {detail} | {secs:.2} s (budget {budget} s{})\n",
        if pass { "PASS" } else { "FAIL" },
        if within { "" } else { ", exceeded" }
    );
    // Written past the test harness capture so the lines always show.
    let mut out = std::io::stdout();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    Outcome { id, pass }
}

fn preset(name: &str) -> ExperimentConfig {
    ExperimentConfig::preset(name).expect("bundled preset")
}

/// Largest number of non-zero entries in a row.
fn row_sparsity(op: &Operator) -> usize {
    (0..op.rows()).map(|r| op.row(r).1.iter().filter(|v| v.norm() > 0.0).count()).max().unwrap_or(0)
}

const D3_TAIL: &str = r#"
[p]
lo = -4.0
hi = 4.0
n = 8
[time]
scheme = "cn"
dt = 0.1
t = 1.0
[recovery]
mode = "point"
[compare]
classical = false
"#;

fn d3_config(formulation: &str, m: usize, medium: &str, field: &str, force: bool) -> ExperimentConfig {
    let force = if force { "[force]\nkind = \"constant\"\nvalue = 0.1\n" } else { "" };
    let src = format!(
        "name = \"d3-{formulation}\"\nformulation = \"{formulation}\"\ndimension = 3\n\
         [grid]\na = 0.0\nb = 1.0\nm = {m}\n[medium]\n{medium}\n{force}\
         [initial]\nkind = \"gaussian\"\nfield = \"{field}\"\ncenter = [0.5, 0.5, 0.5]\nwidth = 0.3\n{D3_TAIL}"
    );
    ExperimentConfig::parse(&src).expect("three-dimensional config parses")
}

fn generator_and_hs_sparsity(cfg: &ExperimentConfig) -> (usize, usize) {
    let (augmented, pair) = split(cfg).expect("assembles");
    let pgrid = PGrid::new(cfg.p.lo, cfg.p.hi, cfg.p.n).expect("p grid");
    let (s, _) = ModeHamiltonian::new(&pair, &pgrid).expect("mode Hamiltonian").metadata();
    (row_sparsity(&augmented.a), s)
}

fn crit1() -> Outcome {
    let t = Instant::now();
    let prep = prepare(&preset("paper-6.1")).expect("prepares");
    let lam = prep.lambda_max;
    emit(
        1,
        "velocity-stress eigenvalue regression",
        (lam - 3.200).abs() <= 0.005,
        t.elapsed().as_secs_f64(),
        10.0,
        &format!("λ_max(H1) = {lam:.6}, target 3.200 ± 0.005"),
    )
}

fn crit2() -> Outcome {
    let t = Instant::now();
    let spectral = preset("paper-6.3-spectral-row2");
    let p_star = prepare(&spectral).expect("prepares").lambda_max * spectral.time.t;
    let spec_secs = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let lam_c = prepare(&preset("paper-6.3-central-row2")).expect("prepares").lambda_max;
    let cent_secs = t.elapsed().as_secs_f64();
    emit(
        2,
        "p* regressions",
        (p_star - 6.759).abs() <= 0.01 && (lam_c - 4.303).abs() <= 0.01 && spec_secs < 10.0 && cent_secs < 10.0,
        spec_secs.max(cent_secs),
        10.0,
        &format!("spectral p* = {p_star:.4} (6.759 ± 0.01); central λ_max = {lam_c:.4} (4.303 ± 0.01)"),
    )
}

fn crit3() -> Outcome {
    let t = Instant::now();
    let zero_lambda = "rho = 1.0\nlambda = 0.0\nmu = 1.0";
    let generic = "rho = 1.0\nlambda = 2.0\nmu = 1.0";
    let (smf, smf_hs) = generator_and_hs_sparsity(&d3_config("smf", 2, zero_lambda, "sigma11", false));
    let (smf_generic, _) = generator_and_hs_sparsity(&d3_config("smf", 2, generic, "sigma11", false));
    let (stag, stag_hs) = generator_and_hs_sparsity(&d3_config("staggered-vs", 2, generic, "sigma11", false));
    // Two nodes per axis make the periodic central difference vanish; four is
    // the smallest grid with a non-trivial stencil.
    let cmed = "rho = 1.41\nlambda = 0.61\nmu = 0.40";
    let (cent, cent_hs) = generator_and_hs_sparsity(&d3_config("displacement-central", 4, cmed, "xi1", true));
    emit(
        3,
        "sparsity regressions (d = 3)",
        smf == 3 && stag == 6 && cent == 9,
        t.elapsed().as_secs_f64(),
        5.0,
        &format!(
            "generator s: smf {smf} (λ = 0; {smf_generic} for λ ≠ 0), staggered {stag}, central {cent}; \
             H_s s: smf {smf_hs}, staggered {stag_hs}, central {cent_hs}"
        ),
    )
}

fn rel_l2(r: &RunReport, vs_exact: bool, name: &str) -> f64 {
    let rep = if vs_exact { r.quantum_vs_exact.as_ref() } else { r.quantum_vs_classical.as_ref() };
    rep.and_then(|e| e.component(name)).and_then(|c| c.l2_rel).unwrap_or(f64::INFINITY)
}

fn crit4(reports: &mut Vec<RunReport>) -> Outcome {
    let t = Instant::now();
    let out = run(&preset("paper-6.1"), &RunOptions::default()).expect("runs");
    let (v, s) = (rel_l2(&out.report, false, "v1"), rel_l2(&out.report, false, "sigma11"));
    reports.push(out.report);
    emit(
        4,
        "velocity-stress end-to-end vs classical",
        v <= 2e-2 && s <= 2e-2,
        t.elapsed().as_secs_f64(),
        120.0,
        &format!("relative L2: v1 {v:.4e}, sigma11 {s:.4e} (≤ 2e-2)"),
    )
}

fn crit5(reports: &mut Vec<RunReport>) -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in [
        "paper-6.3-spectral-row1",
        "paper-6.3-spectral-row2",
        "paper-6.3-central-row1",
        "paper-6.3-central-row2",
    ] {
        let out = run(&preset(name), &RunOptions::default()).expect("runs");
        let errs: Vec<f64> = ["xi", "eps", "p"].iter().map(|c| rel_l2(&out.report, true, c)).collect();
        pass &= errs.iter().all(|&e| e <= 2e-2);
        parts.push(format!("{name} ξ/ε/p {:.3e}/{:.3e}/{:.3e}", errs[0], errs[1], errs[2]));
        reports.push(out.report);
    }
    emit(
        5,
        "displacement end-to-end vs exact (≤ 2e-2 per component)",
        pass,
        t.elapsed().as_secs_f64(),
        300.0,
        &parts.join("; "),
    )
}

fn crit6(reports: &mut Vec<RunReport>) -> Outcome {
    let t = Instant::now();
    let out = run(&preset("paper-6.2"), &RunOptions::default()).expect("runs");
    let rep = out.report.quantum_vs_classical.as_ref().expect("classical comparison");
    let worst = rep
        .components
        .iter()
        .map(|c| c.linf_rel.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let detail = format!(
        "max relative L∞ over {} fields {worst:.4e} (≤ 3e-2); p window [{:.3}, {:.3}]{}",
        rep.components.len(),
        out.report.p_window.lo,
        out.report.p_window.hi,
        if out.report.p_window.extended { " (extended)" } else { "" }
    );
    reports.push(out.report);
    emit(6, "variable-coefficient staggered vs classical", worst <= 3e-2, t.elapsed().as_secs_f64(), 600.0, &detail)
}

fn crit7() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for cfg in desk_configs() {
        let (rel, tol) = oracle_equivalence(&cfg).expect("oracle runs");
        pass &= rel <= tol;
        parts.push(format!("{} {rel:.2e} (≤ {tol:.2e})", cfg.formulation.as_str()));
    }
    emit(7, "oracle equivalence (M ≤ 8, N = 64)", pass, t.elapsed().as_secs_f64(), 60.0, &parts.join("; "))
}

fn crit8() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for cfg in desk_configs() {
        worst = worst.max(unitarity_drift(&cfg).expect("evolves"));
    }
    emit(
        8,
        "Crank–Nicolson unitarity of H_s",
        worst <= 1e-12,
        t.elapsed().as_secs_f64(),
        60.0,
        &format!("max relative norm drift over 1000 steps {worst:.2e} (≤ 1e-12)"),
    )
}

fn crit9() -> Outcome {
    let t = Instant::now();
    let classical = SweepOptions { classical_only: true, strict: false };
    let central = preset("paper-6.3-central-row2");
    let space = sweep(&central, SweepAxis::M, &[32.0, 64.0, 128.0], &classical)
        .expect("M sweep")
        .classical_order
        .unwrap_or(f64::NAN);
    let time = sweep(&central, SweepAxis::Dt, &[0.004, 0.002, 0.001], &classical)
        .expect("dt sweep")
        .classical_order
        .unwrap_or(f64::NAN);
    let mut pcfg = preset("paper-6.1");
    pcfg.p = PWindow { lo: -10.0, hi: 10.0, n: pcfg.p.n };
    pcfg.recovery.mode = RecoveryMode::Integral;
    pcfg.recovery.p1 = None;
    let p = sweep(&pcfg, SweepAxis::N, &[128.0, 256.0, 512.0, 1024.0], &SweepOptions::default())
        .expect("N sweep")
        .quantum_order
        .unwrap_or(f64::NAN);
    emit(
        9,
        "convergence orders",
        (space - 2.0).abs() <= 0.2 && (time - 2.0).abs() <= 0.2 && (p - 1.0).abs() <= 0.3,
        t.elapsed().as_secs_f64(),
        300.0,
        &format!("central space {space:.3} (2 ± 0.2), CN time {time:.3} (2 ± 0.2), Δp {p:.3} (1 ± 0.3)"),
    )
}

fn crit10() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for (lam, mu) in [(0.71, 0.35), (0.61, 0.40)] {
        let m = IsotropicMedium::new(1.41, lam, mu).expect("medium");
        for ti in [0.0, 0.25, 0.5, 1.0] {
            worst = worst.max(spectral_residual(&m, 64, ti).expect("residual"));
        }
    }
    emit(
        10,
        "exact-solution spectral residual (M = 64)",
        worst <= 1e-10,
        t.elapsed().as_secs_f64(),
        5.0,
        &format!("max residual {worst:.2e} (≤ 1e-10)"),
    )
}

fn crit11(reports: &[RunReport]) -> Outcome {
    let t = Instant::now();
    let sc = ComplexityScenario::new(FormulationTag::Smf, 3, 2.0, 1e-2, 1.0).expect("scenario");
    let proxy = predict(&sc).expect("predicts").n_gate;
    let hand = (5.0 + 1.5 * 100f64.log2()) * 100.0;
    let mut agree = proxy == hand;
    let mut parts = vec![format!("smf proxy {proxy:.4} vs hand {hand:.4}")];
    for r in reports {
        let m = r.resources.m_h.unwrap_or(0);
        agree &= m == r.predicted_m_h;
        parts.push(format!("{} m_H {m}/{}", r.name, r.predicted_m_h));
    }
    agree &= reports.len() == 6;
    emit(11, "resource proxies and register widths", agree, t.elapsed().as_secs_f64(), 5.0, &parts.join("; "))
}

#[test]
fn acceptance() {
    let mut reports = Vec::new();
    let results = vec![
        crit1(),
        crit2(),
        crit3(),
        crit4(&mut reports),
        crit5(&mut reports),
        crit6(&mut reports),
        crit7(),
        crit8(),
        crit9(),
        crit10(),
        crit11(&reports),
    ];
    let failed: Vec<u32> = results.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
