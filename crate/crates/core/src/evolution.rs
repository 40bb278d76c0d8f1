//! Time integration of `du/dt = G u`, with `G = −iH` for Hamiltonian input.
//!
//! The step matrix is split into the connected components of the generator's
//! coupling graph and each component is advanced on its own. Small components
//! use a dense propagator; larger ones reuse a sparse LU factorisation across
//! all steps. For `H_s` every p-mode is its own component, so the memory high
//! water mark is one factorised mode rather than the full system.

use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::schrodinger::ModeHamiltonian;
use crate::{c64, Error, Operator, Result};

/// Components up to this size are advanced with a dense propagator.
pub const DENSE_COMPONENT_LIMIT: usize = 32;
/// Largest component the exact-exponential scheme accepts.
pub const EXACT_COMPONENT_LIMIT: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    CrankNicolson,
    ImplicitEuler,
    ExactExponential,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crank-nicolson" | "cn" => Ok(Self::CrankNicolson),
            "implicit-euler" | "ie" => Ok(Self::ImplicitEuler),
            "exact-exponential" | "exact" => Ok(Self::ExactExponential),
            other => Err(Error::InvalidArgument(format!("unknown time scheme {other:?}"))),
        }
    }
}

impl Scheme {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::CrankNicolson => "crank-nicolson",
            Self::ImplicitEuler => "implicit-euler",
            Self::ExactExponential => "exact-exponential",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    /// Record the state every this many steps (and at the final time).
    pub record_every: Option<usize>,
}

impl EvolutionConfig {
    pub fn new(scheme: Scheme, dt: f64, t_final: f64) -> Result<Self> {
        let cfg = Self { scheme, dt, t_final, record_every: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_recording(mut self, every: usize) -> Self {
        self.record_every = Some(every.max(1));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument(format!("final time must be non-negative, got {}", self.t_final)));
        }
        if self.t_final > 0.0 && self.t_final < self.dt * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!("final time {} is shorter than dt {}", self.t_final, self.dt)));
        }
        Ok(())
    }

    /// Step count; the step is shrunk to `T/steps` when `T` is not a multiple of dt.
    pub fn steps(&self) -> usize {
        if self.t_final == 0.0 {
            0
        } else {
            ((self.t_final / self.dt).round() as usize).max(1)
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            n => self.t_final / n as f64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: Vec<c64>,
    /// `(time, state)` samples when recording was requested.
    pub trajectory: Vec<(f64, Vec<c64>)>,
    pub steps: usize,
    pub components: usize,
}

/// Advances `state0` to `cfg.t_final`. With `hamiltonian` set the input is `H`
/// and the law is `dc/dt = −iH c`; otherwise `du/dt = A u`.
pub fn evolve(op: &Operator, state0: &[c64], cfg: &EvolutionConfig, hamiltonian: bool) -> Result<Evolution> {
    Evolver::default().evolve(op, state0, cfg, hamiltonian)
}

/// Repeated evolutions that share symbolic factorisations between calls.
#[derive(Default)]
pub struct Evolver {
    cache: SymbolicCache,
}

impl Evolver {
    pub fn evolve(&mut self, op: &Operator, state0: &[c64], cfg: &EvolutionConfig, hamiltonian: bool) -> Result<Evolution> {
        evolve_with(op, state0, cfg, hamiltonian, &mut self.cache)
    }
}

fn evolve_with(
    op: &Operator,
    state0: &[c64],
    cfg: &EvolutionConfig,
    hamiltonian: bool,
    cache: &mut SymbolicCache,
) -> Result<Evolution> {
    cfg.validate()?;
    if !op.is_square() || op.rows() != state0.len() {
        return Err(Error::Dimension(format!(
            "operator {}x{} with state of length {}",
            op.rows(),
            op.cols(),
            state0.len()
        )));
    }
    let steps = cfg.steps();
    let h = cfg.effective_dt();
    let record_steps: Vec<usize> = match cfg.record_every {
        Some(k) => {
            let mut v: Vec<usize> = (0..=steps).step_by(k).collect();
            if *v.last().unwrap() != steps {
                v.push(steps);
            }
            v
        }
        None => Vec::new(),
    };
    let mut trajectory: Vec<(f64, Vec<c64>)> =
        record_steps.iter().map(|&s| (s as f64 * h, vec![c64::new(0.0, 0.0); state0.len()])).collect();
    if steps == 0 {
        for (_, s) in trajectory.iter_mut() {
            s.copy_from_slice(state0);
        }
        return Ok(Evolution { state: state0.to_vec(), trajectory, steps, components: 0 });
    }

    // G = −iH or A.
    let factor = if hamiltonian { c64::new(0.0, -1.0) } else { c64::new(1.0, 0.0) };
    let parts = Components::of(op);
    let mut state = vec![c64::new(0.0, 0.0); state0.len()];
    let mut x = Vec::new();
    for comp in 0..parts.count() {
        let members = parts.members(comp);
        x.clear();
        x.extend(members.iter().map(|&g| state0[g]));
        let g = local_generator(op, members, &parts.local, factor);
        let mut stepper = Stepper::new(&g, cfg.scheme, h, cache)?;
        let mut rec = 0;
        for s in 0..=steps {
            if s > 0 {
                stepper.step(&mut x);
            }
            if rec < record_steps.len() && record_steps[rec] == s {
                for (k, &gl) in members.iter().enumerate() {
                    trajectory[rec].1[gl] = x[k];
                }
                rec += 1;
            }
        }
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular(format!("non-finite state in component {comp} of size {}", members.len())));
        }
        for (k, &gl) in members.iter().enumerate() {
            state[gl] = x[k];
        }
    }
    Ok(Evolution { state, trajectory, steps, components: parts.count() })
}

/// Evolves `dc/dt = −i H_s c` one p-mode block at a time.
pub fn evolve_modes(h: &ModeHamiltonian, c0: &[c64], cfg: &EvolutionConfig) -> Result<Vec<c64>> {
    let (n, np) = (h.base_dim(), h.freq.len());
    if c0.len() != n * np {
        return Err(Error::Dimension(format!("state of length {} for {n} x {np} modes", c0.len())));
    }
    let mut evolver = Evolver::default();
    let mut out = vec![c64::new(0.0, 0.0); c0.len()];
    let mut x = vec![c64::new(0.0, 0.0); n];
    for k in 0..np {
        for (j, v) in x.iter_mut().enumerate() {
            *v = c0[j * np + k];
        }
        let y = evolver.evolve(&h.block(k)?, &x, cfg, true)?.state;
        for (j, v) in y.into_iter().enumerate() {
            out[j * np + k] = v;
        }
    }
    Ok(out)
}

/// Connected components of the symmetric coupling pattern, ordered by smallest member.
struct Components {
    ptr: Vec<usize>,
    members: Vec<usize>,
    /// Position of each global index inside its component.
    local: Vec<usize>,
}

impl Components {
    fn of(op: &Operator) -> Self {
        let n = op.rows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (r, c, _) in op.triplets() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
        // Roots are the smallest member, so labelling in root order sorts components.
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut of_node = vec![0usize; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            of_node[i] = label[r];
        }
        let mut ptr = vec![0usize; count + 1];
        for &c in &of_node {
            ptr[c + 1] += 1;
        }
        for c in 0..count {
            ptr[c + 1] += ptr[c];
        }
        let mut next = ptr.clone();
        let mut members = vec![0usize; n];
        let mut local = vec![0usize; n];
        for i in 0..n {
            let c = of_node[i];
            members[next[c]] = i;
            local[i] = next[c] - ptr[c];
            next[c] += 1;
        }
        Self { ptr, members, local }
    }

    fn count(&self) -> usize {
        self.ptr.len() - 1
    }

    fn members(&self, c: usize) -> &[usize] {
        &self.members[self.ptr[c]..self.ptr[c + 1]]
    }
}

/// Local copy of `factor·op` restricted to one component.
fn local_generator(op: &Operator, members: &[usize], local: &[usize], factor: c64) -> Operator {
    let mut indptr = Vec::with_capacity(members.len() + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    let mut row: Vec<(usize, c64)> = Vec::new();
    for &g in members {
        let (cs, vs) = op.row(g);
        row.clear();
        row.extend(cs.iter().zip(vs).map(|(&c, &v)| (local[c], factor * v)));
        row.sort_unstable_by_key(|e| e.0);
        for &(c, v) in &row {
            indices.push(c);
            values.push(v);
        }
        indptr.push(indices.len());
    }
    Operator::from_csr(members.len(), members.len(), indptr, indices, values).expect("component extraction")
}

enum Stepper {
    Scalar(c64),
    Dense { p: Vec<c64>, n: usize, tmp: Vec<c64> },
    Sparse { right: Option<Operator>, lu: Lu<usize, c64>, rhs: Mat<c64>, tmp: Vec<c64> },
}

impl Stepper {
    fn new(g: &Operator, scheme: Scheme, h: f64, cache: &mut SymbolicCache) -> Result<Self> {
        let n = g.rows();
        if n == 1 {
            let z = g.get(0, 0) * h;
            let one = c64::new(1.0, 0.0);
            let p = match scheme {
                Scheme::CrankNicolson => (one + z * 0.5) / (one - z * 0.5),
                Scheme::ImplicitEuler => one / (one - z),
                Scheme::ExactExponential => z.exp(),
            };
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::Singular(format!("scalar step matrix {}", one - z)));
            }
            return Ok(Self::Scalar(p));
        }
        if n <= DENSE_COMPONENT_LIMIT || scheme == Scheme::ExactExponential {
            if n > EXACT_COMPONENT_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "exact exponential needs coupled blocks of at most {EXACT_COMPONENT_LIMIT} unknowns, found {n}"
                )));
            }
            let gd = g.to_dense();
            let p = dense_propagator(&gd, scheme, h)?;
            let flat = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| p[(i, j)]).collect();
            return Ok(Self::Dense { p: flat, n, tmp: vec![c64::new(0.0, 0.0); n] });
        }
        let theta = if scheme == Scheme::CrankNicolson { 0.5 } else { 1.0 };
        let one = c64::new(1.0, 0.0);
        let id = Operator::identity(n);
        let left = id.lin_comb(one, g, c64::new(-theta * h, 0.0));
        let right = (scheme == Scheme::CrankNicolson).then(|| id.lin_comb(one, g, c64::new((1.0 - theta) * h, 0.0)));
        let trip: Vec<Triplet<usize, usize, c64>> = left.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Singular(format!("step matrix assembly: {e:?}")))?;
        let symbolic = cache.get(&mat)?;
        let lu = Lu::try_new_with_symbolic(symbolic, mat.as_ref()).map_err(|e| Error::Singular(format!("{e:?}")))?;
        Ok(Self::Sparse { right, lu, rhs: Mat::zeros(n, 1), tmp: vec![c64::new(0.0, 0.0); n] })
    }

    fn step(&mut self, x: &mut [c64]) {
        match self {
            Self::Scalar(p) => x[0] *= *p,
            Self::Dense { p, n, tmp } => {
                for i in 0..*n {
                    let row = &p[i * *n..(i + 1) * *n];
                    tmp[i] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                }
                x.copy_from_slice(tmp);
            }
            Self::Sparse { right, lu, rhs, tmp } => {
                match right {
                    Some(r) => r.matvec_into(x, tmp),
                    None => tmp.copy_from_slice(x),
                }
                for (i, v) in tmp.iter().enumerate() {
                    rhs[(i, 0)] = *v;
                }
                lu.solve_in_place(rhs.as_mut());
                for (i, v) in x.iter_mut().enumerate() {
                    *v = rhs[(i, 0)];
                }
            }
        }
    }
}

/// Reuses symbolic factorisations across components with identical patterns.
#[derive(Default)]
struct SymbolicCache {
    entries: Vec<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl SymbolicCache {
    fn get(&mut self, mat: &SparseColMat<usize, c64>) -> Result<SymbolicLu<usize>> {
        let s = mat.symbolic();
        let (cp, ri) = (s.col_ptr(), s.row_idx());
        if let Some((_, _, sym)) = self.entries.iter().find(|(c, r, _)| c == cp && r == ri) {
            return Ok(sym.clone());
        }
        let sym = SymbolicLu::try_new(s).map_err(|e| Error::Singular(format!("symbolic LU: {e:?}")))?;
        if self.entries.len() >= 8 {
            self.entries.remove(0);
        }
        self.entries.push((cp.to_vec(), ri.to_vec(), sym.clone()));
        Ok(sym)
    }
}

fn dense_propagator(g: &Mat<c64>, scheme: Scheme, h: f64) -> Result<Mat<c64>> {
    let n = g.nrows();
    let id = |i: usize, j: usize| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
    let p = match scheme {
        Scheme::ExactExponential => return Ok(expm(&Mat::from_fn(n, n, |i, j| g[(i, j)] * h))),
        Scheme::CrankNicolson => {
            let left = Mat::from_fn(n, n, |i, j| id(i, j) - g[(i, j)] * (0.5 * h));
            let right = Mat::from_fn(n, n, |i, j| id(i, j) + g[(i, j)] * (0.5 * h));
            left.partial_piv_lu().solve(&right)
        }
        Scheme::ImplicitEuler => {
            let left = Mat::from_fn(n, n, |i, j| id(i, j) - g[(i, j)] * h);
            left.partial_piv_lu().solve(Mat::<c64>::identity(n, n))
        }
    };
    for i in 0..n {
        for j in 0..n {
            if !p[(i, j)].re.is_finite() || !p[(i, j)].im.is_finite() {
                return Err(Error::Singular(format!("dense step matrix of size {n}")));
            }
        }
    }
    Ok(p)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &Mat<c64>) -> Mat<c64> {
    let n = a.nrows();
    let inf_norm = (0..n).map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = if inf_norm > 0.5 { (inf_norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let x = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let mut result = Mat::<c64>::identity(n, n);
    let mut term = Mat::<c64>::identity(n, n);
    for k in 1..=30 {
        let next = &term * &x;
        term = Mat::from_fn(n, n, |i, j| next[(i, j)] / k as f64);
        result = Mat::from_fn(n, n, |i, j| result[(i, j)] + term[(i, j)]);
        let tn = (0..n).map(|i| (0..n).map(|j| term[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}
