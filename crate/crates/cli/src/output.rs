//! CSV and JSON artifacts, written atomically.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use elastic_schro::resources::{FormulationTag, ResourceEstimate};

use crate::pipeline::RunOutcome;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Per-sample comparison table with a `#`-prefixed metadata header.
pub fn result_table_csv(out: &RunOutcome) -> String {
    let r = &out.report;
    let d = r.dimension;
    let mut s = String::new();
    let _ = writeln!(s, "# name={}", r.name);
    let _ = writeln!(s, "# config_hash={}", r.config_hash);
    let _ = writeln!(s, "# formulation={}", r.formulation.as_str());
    let _ = writeln!(s, "# p_star={}", num(r.p_star));
    let _ = writeln!(s, "# p1={}", num(r.p1));
    let axes = ["x", "y", "z"];
    let _ = writeln!(s, "component,{},quantum_value,classical_value,exact_value,abs_err,rel_err", axes[..d].join(","));
    for (k, name) in out.names.iter().enumerate() {
        let q = &out.quantum.values[k];
        let c = out.classical.as_ref().map(|c| &c.values[k]);
        let e = out.exact.as_ref().map(|e| &e[k]);
        let reference = e.or(c);
        let scale = reference.map(|v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        for (j, p) in out.points[k].iter().enumerate() {
            let rv = reference.map(|v| v[j]);
            let abs = rv.map(|v| (q[j] - v).abs());
            let rel = match (abs, scale) {
                (Some(a), Some(sc)) if sc > 0.0 => Some(a / sc),
                _ => None,
            };
            let coords: Vec<String> = p.iter().map(|&x| num(x)).collect();
            let _ = writeln!(
                s,
                "{name},{},{},{},{},{},{}",
                coords.join(","),
                num(q[j]),
                opt_num(c.map(|v| v[j])),
                opt_num(e.map(|v| v[j])),
                opt_num(abs),
                opt_num(rel)
            );
        }
    }
    s
}

/// One row of the resources comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceRow {
    /// `measured` from an assembled Hamiltonian or `predicted` from the asymptotic formulas.
    pub source: &'static str,
    pub formulation: FormulationTag,
    pub d: usize,
    pub t: f64,
    pub estimate: ResourceEstimate,
}

pub fn resources_csv(rows: &[ResourceRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", elastic_schro::resources::PROXY_LABEL);
    let _ = writeln!(s, "formulation,d,r,epsilon,T,s,hmax,tau,m_H,n_query,n_gate_proxy,classical_ops_proxy,source");
    for row in rows {
        let e = &row.estimate;
        let sc = e.scenario.as_ref();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.formulation.as_str(),
            row.d,
            opt_num(sc.map(|c| c.r)),
            opt_num(sc.map(|c| c.epsilon)),
            num(row.t),
            e.s.map(|v| v.to_string()).unwrap_or_default(),
            opt_num(e.hmax),
            opt_num(e.tau),
            e.m_h.map(|v| v.to_string()).unwrap_or_default(),
            e.n_query.map(|v| v.to_string()).unwrap_or_default(),
            num(e.n_gate),
            opt_num(e.classical_ops),
            row.source
        );
    }
    s
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_run(dir: &Path, stem: &str, out: &RunOutcome) -> anyhow::Result<Vec<PathBuf>> {
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    write_atomic(&csv, result_table_csv(out).as_bytes())?;
    write_json(&json, &out.report)?;
    Ok(vec![csv, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("schro-out-{}", std::process::id()));
        let p = dir.join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        fs::remove_dir_all(dir).unwrap();
    }
}
