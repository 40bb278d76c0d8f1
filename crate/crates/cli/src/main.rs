use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use elastic_schro::resources::{predict, ComplexityScenario, FormulationTag};
use schro_cli::config::{ExperimentConfig, PRESETS};
use schro_cli::output::{resources_csv, write_atomic, write_json, write_run, ResourceRow};
use schro_cli::pipeline::{measure_config, run, RunOptions};
use schro_cli::sweep::{sweep, sweep_csv, SweepAxis, SweepOptions};
use schro_cli::validate::{run_suite, Mutation};

#[derive(Parser)]
#[command(name = "elastic-schro", version, about = "Schrödingerised elastic wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Experiment config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(p), _) => ExperimentConfig::load(p),
            (None, Some(n)) => ExperimentConfig::preset(n),
            (None, None) => bail!("pass --config PATH or --preset NAME"),
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long, env = "SCHRO_OUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    CentralWrapSignFlip,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its result table and report.
    Run {
        #[command(flatten)]
        source: Source,
        /// Fail when p* lies outside the p window instead of extending it.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Convergence sweep along one axis.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// M, N or dt.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated monotone values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Only sweep the classical solver.
        #[arg(long)]
        classical_only: bool,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite.
    Validate {
        /// Inject a known defect; the suite is expected to fail.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Resource comparison table from configs and complexity scenarios.
    Resources {
        /// Config files to measure.
        #[arg(long)]
        config: Vec<PathBuf>,
        /// Presets to measure; `all` for every bundled preset.
        #[arg(long)]
        preset: Vec<String>,
        /// Formulations for predicted rows.
        #[arg(long, value_delimiter = ',')]
        formulation: Vec<FormulationTag>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        d: Vec<usize>,
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-2")]
        epsilon: Vec<f64>,
        #[arg(long = "time", default_value_t = 1.0)]
        t: f64,
        /// Smooth warp order.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_run(source: &Source, strict: bool, out: &Path) -> anyhow::Result<bool> {
    let cfg = source.load()?;
    let outcome = run(&cfg, &RunOptions { strict })?;
    let r = &outcome.report;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    println!("{} [{}] λ_max(H1) = {:.6}, p* = {:.6}, p1 = {:.6}", r.name, r.formulation.as_str(), r.lambda_max_h1, r.p_star, r.p1);
    for c in &r.checks {
        println!("{} {}: {:.6e} (tolerance {:.3e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    report_paths(&write_run(out, &cfg.output.stem, &outcome)?);
    Ok(r.passed())
}

fn cmd_sweep(source: &Source, axis: SweepAxis, values: &[f64], opts: SweepOptions, out: &Path) -> anyhow::Result<bool> {
    let cfg = source.load()?;
    let res = sweep(&cfg, axis, values, &opts)?;
    let stem = format!("{}-sweep-{}", cfg.output.stem, axis.as_str());
    let csv = out.join(format!("{stem}.csv"));
    let json = out.join(format!("{stem}.json"));
    let text = sweep_csv(&res);
    print!("{text}");
    write_atomic(&csv, text.as_bytes())?;
    write_json(&json, &res)?;
    report_paths(&[csv, json]);
    Ok(true)
}

fn cmd_validate(mutation: Mutation, out: &Path) -> anyhow::Result<bool> {
    let report = run_suite(mutation);
    for r in &report.results {
        println!(
            "[{}] {}: {:.3e} (tolerance {:.1e}, {:.2} s)",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.value,
            r.tolerance,
            r.seconds
        );
    }
    let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
    if !failed.is_empty() {
        println!("{} invariant(s) failed: {}", failed.len(), failed.join("; "));
    }
    let path = out.join("validate.json");
    write_json(&path, &report)?;
    report_paths(&[path]);
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
fn cmd_resources(
    configs: &[PathBuf],
    presets: &[String],
    formulations: &[FormulationTag],
    ds: &[usize],
    r: f64,
    epsilons: &[f64],
    t: f64,
    k: Option<u32>,
    strict: bool,
    out: &Path,
) -> anyhow::Result<bool> {
    let mut cfgs = Vec::new();
    for p in configs {
        cfgs.push(ExperimentConfig::load(p)?);
    }
    for name in presets {
        if name == "all" {
            for (n, _) in PRESETS {
                cfgs.push(ExperimentConfig::preset(n)?);
            }
        } else {
            cfgs.push(ExperimentConfig::preset(name)?);
        }
    }
    let mut rows = Vec::new();
    let mut agree = true;
    for cfg in &cfgs {
        let (est, predicted) = measure_config(cfg, &RunOptions { strict })?;
        let measured = est.m_h.unwrap_or(0);
        println!("{}: m_H measured {measured}, predicted {predicted}", cfg.name);
        agree &= measured == predicted;
        rows.push(ResourceRow { source: "measured", formulation: cfg.formulation, d: cfg.dimension, t: cfg.time.t, estimate: est });
    }
    for &f in formulations {
        for &d in ds {
            for &eps in epsilons {
                let mut sc = ComplexityScenario::new(f, d, r, eps, t)?;
                if let Some(k) = k {
                    sc = sc.with_warp_order(k);
                }
                rows.push(ResourceRow { source: "predicted", formulation: f, d, t, estimate: predict(&sc)? });
            }
        }
    }
    if rows.is_empty() {
        bail!("nothing to report; pass --config, --preset or --formulation");
    }
    let text = resources_csv(&rows);
    print!("{text}");
    let csv = out.join("resources.csv");
    let json = out.join("resources.json");
    write_atomic(&csv, text.as_bytes())?;
    write_json(&json, &rows)?;
    report_paths(&[csv, json]);
    Ok(agree)
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { source, strict, common } => {
            init_threads(common.threads)?;
            cmd_run(&source, strict, &common.out)
        }
        Command::Sweep { source, axis, values, classical_only, strict, common } => {
            init_threads(common.threads)?;
            cmd_sweep(&source, axis, &values, SweepOptions { classical_only, strict }, &common.out)
        }
        Command::Validate { mutate, common } => {
            init_threads(common.threads)?;
            let m = match mutate {
                Some(MutationArg::CentralWrapSignFlip) => Mutation::CentralWrapSignFlip,
                None => Mutation::None,
            };
            cmd_validate(m, &common.out)
        }
        Command::Resources { config, preset, formulation, d, r, epsilon, t, k, strict, common } => {
            init_threads(common.threads)?;
            cmd_resources(&config, &preset, &formulation, &d, r, &epsilon, t, k, strict, &common.out)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
