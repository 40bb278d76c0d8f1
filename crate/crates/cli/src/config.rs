//! Experiment configuration: TOML with dotted sections, validated in one pass.

use std::fmt;
use std::path::Path;

use elastic_schro::evolution::Scheme;
use elastic_schro::medium::{IsotropicMedium, VariableMedium};
use elastic_schro::recovery::RecoveryMode;
use elastic_schro::resources::FormulationTag;
use elastic_schro::schrodinger::{HomogenizationScale, WarpFunction};
use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

pub const PRESETS: &[(&str, &str)] = &[
    ("paper-6.1", include_str!("../presets/paper-6.1.toml")),
    ("paper-6.2", include_str!("../presets/paper-6.2.toml")),
    ("paper-6.3-spectral-row1", include_str!("../presets/paper-6.3-spectral-row1.toml")),
    ("paper-6.3-spectral-row2", include_str!("../presets/paper-6.3-spectral-row2.toml")),
    ("paper-6.3-central-row1", include_str!("../presets/paper-6.3-central-row1.toml")),
    ("paper-6.3-central-row2", include_str!("../presets/paper-6.3-central-row2.toml")),
];

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Every problem found while reading a config.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub missing: Vec<String>,
    pub invalid: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration")?;
        for k in &self.missing {
            writeln!(f, "  missing key: {k}")?;
        }
        for m in &self.invalid {
            writeln!(f, "  {m}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MediumSpec {
    Constant(IsotropicMedium),
    /// `paper-6.2`: ρ, λ, μ = base + amp·sin x cos y.
    Preset { name: String },
}

impl MediumSpec {
    pub fn constant(&self) -> Option<IsotropicMedium> {
        match self {
            Self::Constant(m) => Some(*m),
            Self::Preset { .. } => None,
        }
    }

    pub fn variable(&self) -> VariableMedium {
        match self {
            Self::Constant(m) => VariableMedium::constant(*m),
            Self::Preset { .. } => VariableMedium::sincos_preset(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ForceSpec {
    None,
    /// The same constant on every momentum component.
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialSpec {
    /// `exp(−|x − center|²/width²)` on one named field, zero elsewhere.
    Gaussian { field: String, center: Vec<f64>, width: f64 },
    /// The exact one-dimensional benchmark at `t = 0`.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PWindow {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WarpSpec {
    ExactKink,
    Smooth { order: u32 },
}

impl WarpSpec {
    pub fn build(&self) -> WarpFunction {
        match self {
            Self::ExactKink => WarpFunction::ExactKink,
            Self::Smooth { order } => WarpFunction::smooth(*order),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSpec {
    pub scheme: Scheme,
    pub dt: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoverySpec {
    pub mode: RecoveryMode,
    pub p1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareSpec {
    pub classical: bool,
    pub exact: bool,
    /// Pass threshold on the largest per-component relative L2 error.
    pub rel_l2: Option<f64>,
    /// Pass threshold on the largest per-component relative L∞ error.
    pub rel_linf: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceSpec {
    pub delta: f64,
    pub m_e: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputSpec {
    pub stem: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub formulation: FormulationTag,
    pub dimension: usize,
    pub grid: GridSpec,
    pub medium: MediumSpec,
    pub force: ForceSpec,
    pub initial: InitialSpec,
    pub p: PWindow,
    pub warp: WarpSpec,
    pub time: TimeSpec,
    #[serde(serialize_with = "ser_scale")]
    pub homogenization: HomogenizationScale,
    pub recovery: RecoverySpec,
    pub compare: CompareSpec,
    pub resources: ResourceSpec,
    pub output: OutputSpec,
}

fn ser_scale<S: serde::Serializer>(s: &HomogenizationScale, ser: S) -> Result<S::Ok, S::Error> {
    match s {
        HomogenizationScale::Auto => ser.serialize_str("auto"),
        HomogenizationScale::Fixed(c) => ser.serialize_f64(*c),
    }
}

impl ExperimentConfig {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let table: Table = src.parse().map_err(|e: toml::de::Error| ConfigError {
            missing: Vec::new(),
            invalid: vec![format!("syntax: {}", e.message())],
        })?;
        Self::from_table(&table)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        Ok(Self::parse(&src)?)
    }

    pub fn preset(name: &str) -> anyhow::Result<Self> {
        let src = preset_source(name).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            anyhow::anyhow!("unknown preset {name:?}; available: {}", known.join(", "))
        })?;
        Ok(Self::parse(src)?)
    }

    /// SHA-256 of the canonical JSON rendering of the parsed config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn grid_nodes(&self) -> usize {
        self.grid.m.pow(self.dimension as u32)
    }

    fn from_table(t: &Table) -> Result<Self, ConfigError> {
        let mut r = Reader { root: t, missing: Vec::new(), invalid: Vec::new() };
        let name = r.opt_str("name").unwrap_or_else(|| "experiment".into());
        let formulation = r.req_str("formulation").and_then(|s| r.check(s.parse::<FormulationTag>(), "formulation"));
        let dimension = r.req_usize("dimension");
        let grid = (r.req_f64("grid.a"), r.req_f64("grid.b"), r.req_usize("grid.m"));

        let medium = match r.opt_str("medium.preset") {
            Some(p) if p == "paper-6.2" => Some(MediumSpec::Preset { name: p }),
            Some(p) => {
                r.invalid.push(format!("medium.preset: unknown preset {p:?} (known: paper-6.2)"));
                None
            }
            None => {
                let (rho, lam, mu) = (r.req_f64("medium.rho"), r.req_f64("medium.lambda"), r.req_f64("medium.mu"));
                match (rho, lam, mu) {
                    (Some(a), Some(b), Some(c)) => {
                        r.check(IsotropicMedium::new(a, b, c), "medium").map(MediumSpec::Constant)
                    }
                    _ => None,
                }
            }
        };

        let force = match r.opt_str("force.kind").as_deref().unwrap_or("none") {
            "none" => Some(ForceSpec::None),
            "constant" => r.req_f64("force.value").map(|value| ForceSpec::Constant { value }),
            other => {
                r.invalid.push(format!("force.kind: expected none or constant, got {other:?}"));
                None
            }
        };

        let initial = match r.req_str("initial.kind").as_deref() {
            Some("gaussian") => {
                let field = r.req_str("initial.field");
                let center = r.req_f64_list("initial.center");
                let width = r.opt_f64("initial.width").unwrap_or(1.0);
                if !(width > 0.0) {
                    r.invalid.push(format!("initial.width must be positive, got {width}"));
                }
                match (field, center) {
                    (Some(field), Some(center)) => Some(InitialSpec::Gaussian { field, center, width }),
                    _ => None,
                }
            }
            Some("exact") => Some(InitialSpec::Exact),
            Some(other) => {
                r.invalid.push(format!("initial.kind: expected gaussian or exact, got {other:?}"));
                None
            }
            None => None,
        };

        let p = (r.req_f64("p.lo"), r.req_f64("p.hi"), r.req_usize("p.n"));
        let warp = match r.opt_str("warp").as_deref().unwrap_or("exact-kink") {
            "exact-kink" => Some(WarpSpec::ExactKink),
            s => match s.strip_prefix("smooth:").and_then(|k| k.parse::<u32>().ok()) {
                Some(order) if order > 0 => Some(WarpSpec::Smooth { order }),
                _ => {
                    r.invalid.push(format!("warp: expected exact-kink or smooth:K, got {s:?}"));
                    None
                }
            },
        };
        let scheme = r.req_str("time.scheme").and_then(|s| r.check(s.parse::<Scheme>(), "time.scheme"));
        let time = (scheme, r.req_f64("time.dt"), r.req_f64("time.t"));

        let homogenization = match r.root_get("homogenization.c") {
            None => Some(HomogenizationScale::Fixed(1.0)),
            Some(Value::String(s)) if s == "auto" => Some(HomogenizationScale::Auto),
            Some(v) => match v.as_float().or_else(|| v.as_integer().map(|i| i as f64)) {
                Some(c) if c > 0.0 => Some(HomogenizationScale::Fixed(c)),
                _ => {
                    r.invalid.push("homogenization.c: expected a positive number or \"auto\"".into());
                    None
                }
            },
        };

        let mode = match r.opt_str("recovery.mode").as_deref().unwrap_or("point") {
            "point" => Some(RecoveryMode::Point),
            "integral" => Some(RecoveryMode::Integral),
            other => {
                r.invalid.push(format!("recovery.mode: expected point or integral, got {other:?}"));
                None
            }
        };
        let p1 = r.opt_f64("recovery.p1");
        let compare = CompareSpec {
            classical: r.opt_bool("compare.classical").unwrap_or(true),
            exact: r.opt_bool("compare.exact").unwrap_or(false),
            rel_l2: r.opt_f64("compare.rel_l2"),
            rel_linf: r.opt_f64("compare.rel_linf"),
        };
        let resources = ResourceSpec {
            delta: r.opt_f64("resources.delta").unwrap_or(1e-2),
            m_e: r.opt_usize("resources.m_e").unwrap_or(16) as u32,
        };
        if !(resources.delta > 0.0 && resources.delta < 1.0) {
            r.invalid.push(format!("resources.delta must lie in (0, 1), got {}", resources.delta));
        }
        let output = OutputSpec { stem: r.opt_str("output.stem").unwrap_or_else(|| name.clone()) };
        r.unknown_keys();

        let cfg = match (formulation, dimension, grid, medium, force, initial, p, warp, time, homogenization, mode) {
            (
                Some(formulation),
                Some(dimension),
                (Some(a), Some(b), Some(m)),
                Some(medium),
                Some(force),
                Some(initial),
                (Some(lo), Some(hi), Some(n)),
                Some(warp),
                (Some(scheme), Some(dt), Some(t)),
                Some(homogenization),
                Some(mode),
            ) if r.missing.is_empty() && r.invalid.is_empty() => Self {
                name,
                formulation,
                dimension,
                grid: GridSpec { a, b, m },
                medium,
                force,
                initial,
                p: PWindow { lo, hi, n },
                warp,
                time: TimeSpec { scheme, dt, t },
                homogenization,
                recovery: RecoverySpec { mode, p1 },
                compare,
                resources,
                output,
            },
            _ => return Err(ConfigError { missing: r.missing, invalid: r.invalid }),
        };
        cfg.check_semantics()?;
        Ok(cfg)
    }

    fn check_semantics(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        let d = self.dimension;
        match self.formulation {
            FormulationTag::Smf if !(1..=3).contains(&d) => bad.push(format!("smf needs dimension 1..3, got {d}")),
            FormulationTag::StaggeredVs if !(2..=3).contains(&d) => {
                bad.push(format!("staggered-vs needs dimension 2 or 3, got {d}"))
            }
            FormulationTag::DisplacementSpectral | FormulationTag::DisplacementCentral if d != 1 && d != 3 => {
                bad.push(format!("displacement needs dimension 1 or 3, got {d}"))
            }
            _ => {}
        }
        if !matches!(self.formulation, FormulationTag::StaggeredVs) && self.medium.constant().is_none() {
            bad.push("medium.preset is only supported by staggered-vs".into());
        }
        if matches!(self.formulation, FormulationTag::StaggeredVs) && self.force != ForceSpec::None {
            bad.push("staggered-vs runs are source-free".into());
        }
        if let InitialSpec::Gaussian { center, .. } = &self.initial {
            if center.len() != d {
                bad.push(format!("initial.center has {} entries for dimension {d}", center.len()));
            }
        }
        if self.initial == InitialSpec::Exact {
            let ok = matches!(self.formulation, FormulationTag::DisplacementSpectral | FormulationTag::DisplacementCentral)
                && d == 1;
            if !ok {
                bad.push("initial.kind = exact needs a one-dimensional displacement formulation".into());
            }
        }
        if self.compare.exact && self.initial != InitialSpec::Exact {
            bad.push("compare.exact needs initial.kind = exact".into());
        }
        if !(self.grid.b > self.grid.a) || !self.grid.m.is_power_of_two() {
            bad.push("grid: need b > a and m a power of two".into());
        }
        if !(self.p.hi > self.p.lo) || !self.p.n.is_power_of_two() || self.p.n < 2 {
            bad.push("p: need hi > lo and n a power of two".into());
        }
        if !(self.time.dt > 0.0) || !(self.time.t >= 0.0) {
            bad.push("time: need dt > 0 and t >= 0".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { missing: Vec::new(), invalid: bad })
        }
    }

    /// The momentum force samples or `None` when the run is source-free.
    pub fn force_value(&self) -> Option<f64> {
        match self.force {
            ForceSpec::None => None,
            ForceSpec::Constant { value } => Some(value),
        }
    }
}

struct Reader<'a> {
    root: &'a Table,
    missing: Vec<String>,
    invalid: Vec<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "formulation",
    "dimension",
    "warp",
    "grid.a",
    "grid.b",
    "grid.m",
    "medium.preset",
    "medium.rho",
    "medium.lambda",
    "medium.mu",
    "force.kind",
    "force.value",
    "initial.kind",
    "initial.field",
    "initial.center",
    "initial.width",
    "p.lo",
    "p.hi",
    "p.n",
    "time.scheme",
    "time.dt",
    "time.t",
    "homogenization.c",
    "recovery.mode",
    "recovery.p1",
    "compare.classical",
    "compare.exact",
    "compare.rel_l2",
    "compare.rel_linf",
    "resources.delta",
    "resources.m_e",
    "output.stem",
];

impl<'a> Reader<'a> {
    fn root_get(&self, key: &str) -> Option<&'a Value> {
        let mut parts = key.split('.');
        let mut cur = self.root.get(parts.next()?)?;
        for p in parts {
            cur = cur.as_table()?.get(p)?;
        }
        Some(cur)
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        self.root_get(key)
    }

    fn check<T, E: fmt::Display>(&mut self, r: Result<T, E>, key: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.invalid.push(format!("{key}: {e}"));
                None
            }
        }
    }

    fn typed<T>(&mut self, key: &str, required: bool, what: &str, f: impl Fn(&Value) -> Option<T>) -> Option<T> {
        match self.get(key) {
            None => {
                if required {
                    self.missing.push(key.to_string());
                }
                None
            }
            Some(v) => {
                let out = f(v);
                if out.is_none() {
                    self.invalid.push(format!("{key}: expected {what}, got {v}"));
                }
                out
            }
        }
    }

    fn req_str(&mut self, key: &str) -> Option<String> {
        self.typed(key, true, "a string", |v| v.as_str().map(String::from))
    }

    fn opt_str(&mut self, key: &str) -> Option<String> {
        self.typed(key, false, "a string", |v| v.as_str().map(String::from))
    }

    fn req_f64(&mut self, key: &str) -> Option<f64> {
        self.typed(key, true, "a number", as_f64)
    }

    fn opt_f64(&mut self, key: &str) -> Option<f64> {
        self.typed(key, false, "a number", as_f64)
    }

    fn req_usize(&mut self, key: &str) -> Option<usize> {
        self.typed(key, true, "a non-negative integer", as_usize)
    }

    fn opt_usize(&mut self, key: &str) -> Option<usize> {
        self.typed(key, false, "a non-negative integer", as_usize)
    }

    fn opt_bool(&mut self, key: &str) -> Option<bool> {
        self.typed(key, false, "a boolean", |v| v.as_bool())
    }

    fn req_f64_list(&mut self, key: &str) -> Option<Vec<f64>> {
        self.typed(key, true, "an array of numbers", |v| v.as_array()?.iter().map(as_f64).collect())
    }

    fn unknown_keys(&mut self) {
        let mut all = Vec::new();
        flatten("", self.root, &mut all);
        for k in all {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                self.invalid.push(format!("unknown key: {k}"));
            }
        }
    }
}

fn flatten(prefix: &str, t: &Table, out: &mut Vec<String>) {
    for (k, v) in t {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(inner) => flatten(&key, inner, out),
            _ => out.push(key),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).filter(|x| x.is_finite())
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_integer().and_then(|i| usize::try_from(i).ok())
}
