//! Sparse complex operators in compressed-row form.

use std::io::{BufRead, Write};

use faer::Mat;

use crate::{c64, Error, Result};

/// Tolerance used when checking entry-wise conjugate symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A complex matrix stored row-compressed, with column indices sorted per row.
///
/// `sparsity` and `max_norm` are computed from the stored entries on demand, so
/// they cannot drift from the data they describe.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<c64>,
    hermitian: bool,
}

impl Operator {
    /// Builds an operator from raw CSR arrays.
    ///
    /// Columns inside each row must be strictly increasing.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<c64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indices.len() != values.len() {
            return Err(Error::Dimension("malformed CSR arrays".into()));
        }
        if indptr[0] != 0 || *indptr.last().unwrap() != indices.len() {
            return Err(Error::Dimension("malformed CSR row pointers".into()));
        }
        for r in 0..rows {
            let row = &indices[indptr[r]..indptr[r + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c >= cols) {
                return Err(Error::Dimension(format!("row {r} has unsorted or out-of-range columns")));
            }
        }
        Ok(Self { rows, cols, indptr, indices, values, hermitian: false })
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, c64)>,
    {
        let mut per_row: Vec<Vec<(usize, c64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            per_row[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in per_row {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut acc = c64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == col {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != c64::new(0.0, 0.0) {
                    indices.push(col);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows, cols, indptr, indices, values, hermitian: false }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new(), values: Vec::new(), hermitian: false }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![c64::new(1.0, 0.0); n])
    }

    /// Diagonal operator; zero diagonal entries are not stored.
    pub fn diagonal(diag: &[c64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Row-major dense data to sparse form, dropping exact zeros.
    pub fn from_dense(rows: usize, cols: usize, data: &[c64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self::from_triplets(
            rows,
            cols,
            (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| (r, c, data[r * cols + c])),
        )
    }

    pub fn from_mat(m: &Mat<c64>) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut t = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = m[(r, c)];
                if v != c64::new(0.0, 0.0) {
                    t.push((r, c, v));
                }
            }
        }
        Self::from_triplets(rows, cols, t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Maximum number of stored nonzeros in any row.
    pub fn sparsity(&self) -> usize {
        self.indptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[c64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// True when the operator was built by a routine that guarantees Hermiticity.
    pub fn hermitian_flag(&self) -> bool {
        self.hermitian
    }

    /// Sets the Hermitian flag after checking conjugate symmetry within
    /// [`HERMITIAN_TOL`] (scaled by the max-norm when it exceeds one).
    pub fn into_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_defect();
        let tol = HERMITIAN_TOL * self.max_norm().max(1.0);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        self.hermitian = true;
        Ok(self)
    }

    /// max |A_ij − conj(A_ji)|; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let adj = self.adjoint();
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            let (ca, va) = self.row(r);
            let (cb, vb) = adj.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ca.len() || j < cb.len() {
                let d = if j >= cb.len() || (i < ca.len() && ca[i] < cb[j]) {
                    i += 1;
                    va[i - 1].norm()
                } else if i >= ca.len() || cb[j] < ca[i] {
                    j += 1;
                    vb[j - 1].norm()
                } else {
                    i += 1;
                    j += 1;
                    (va[i - 1] - vb[j - 1]).norm()
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn transpose(&self) -> Self {
        self.transposed(false)
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transposed(true);
        t.hermitian = self.hermitian;
        t
    }

    fn transposed(&self, conj: bool) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![c64::new(0.0, 0.0); self.nnz()];
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let k = next[c];
                indices[k] = r;
                values[k] = if conj { v.conj() } else { v };
                next[c] += 1;
            }
        }
        Self { rows: self.cols, cols: self.rows, indptr, indices, values, hermitian: false }
    }

    pub fn scale(&self, alpha: c64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out.hermitian = self.hermitian && alpha.im == 0.0;
        if alpha == c64::new(0.0, 0.0) {
            return Self::zeros(self.rows, self.cols);
        }
        out
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.scale(c64::new(alpha, 0.0))
    }

    /// `alpha·self + beta·other`, merging rows; exact cancellations are dropped.
    pub fn lin_comb(&self, alpha: c64, other: &Self, beta: c64) -> Self {
        assert_eq!(self.dim(), other.dim(), "lin_comb dimension mismatch");
        let zero = c64::new(0.0, 0.0);
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        indptr.push(0);
        for r in 0..self.rows {
            let (ca, va) = self.row(r);
            let (cb, vb) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ca.len() || j < cb.len() {
                let (c, v) = if j >= cb.len() || (i < ca.len() && ca[i] < cb[j]) {
                    i += 1;
                    (ca[i - 1], alpha * va[i - 1])
                } else if i >= ca.len() || cb[j] < ca[i] {
                    j += 1;
                    (cb[j - 1], beta * vb[j - 1])
                } else {
                    i += 1;
                    j += 1;
                    (ca[i - 1], alpha * va[i - 1] + beta * vb[j - 1])
                };
                if v != zero {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows: self.rows, cols: self.cols, indptr, indices, values, hermitian: false }
    }

    pub fn add(&self, other: &Self) -> Self {
        let one = c64::new(1.0, 0.0);
        self.lin_comb(one, other, one)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(c64::new(1.0, 0.0), other, c64::new(-1.0, 0.0))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let zero = c64::new(0.0, 0.0);
        let mut acc = vec![zero; other.cols];
        let mut mark = vec![usize::MAX; other.cols];
        let mut touched = Vec::new();
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            touched.clear();
            let (ca, va) = self.row(r);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&c, &b) in cb.iter().zip(vb) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = zero;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != zero {
                    indices.push(c);
                    values.push(acc[c]);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows: self.rows, cols: other.cols, indptr, indices, values, hermitian: false }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(self.nnz() * other.nnz());
        let mut values = Vec::with_capacity(self.nnz() * other.nnz());
        indptr.push(0);
        for ra in 0..self.rows {
            let (ca, va) = self.row(ra);
            for rb in 0..other.rows {
                let (cb, vb) = other.row(rb);
                for (&i, &a) in ca.iter().zip(va) {
                    for (&j, &b) in cb.iter().zip(vb) {
                        indices.push(i * other.cols + j);
                        values.push(a * b);
                    }
                }
                indptr.push(indices.len());
            }
        }
        Self { rows, cols, indptr, indices, values, hermitian: self.hermitian && other.hermitian }
    }

    /// Assembles a block matrix; `None` marks a zero block. Every block row must
    /// contain at least one block fixing its height, and likewise for columns.
    pub fn block(blocks: &[Vec<Option<&Operator>>]) -> Self {
        let nbr = blocks.len();
        let nbc = blocks[0].len();
        let mut heights = vec![None; nbr];
        let mut widths = vec![None; nbc];
        for (i, brow) in blocks.iter().enumerate() {
            assert_eq!(brow.len(), nbc, "ragged block layout");
            for (j, b) in brow.iter().enumerate() {
                if let Some(b) = b {
                    assert!(heights[i].map_or(true, |h| h == b.rows), "block height mismatch");
                    assert!(widths[j].map_or(true, |w| w == b.cols), "block width mismatch");
                    heights[i] = Some(b.rows);
                    widths[j] = Some(b.cols);
                }
            }
        }
        let heights: Vec<usize> = heights.into_iter().map(|h| h.expect("empty block row")).collect();
        let widths: Vec<usize> = widths.into_iter().map(|w| w.expect("empty block column")).collect();
        let mut col_off = vec![0; nbc + 1];
        for j in 0..nbc {
            col_off[j + 1] = col_off[j] + widths[j];
        }
        let rows: usize = heights.iter().sum();
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (i, brow) in blocks.iter().enumerate() {
            for r in 0..heights[i] {
                for (j, b) in brow.iter().enumerate() {
                    if let Some(b) = b {
                        let (cs, vs) = b.row(r);
                        indices.extend(cs.iter().map(|&c| c + col_off[j]));
                        values.extend_from_slice(vs);
                    }
                }
                indptr.push(indices.len());
            }
        }
        Self { rows, cols: col_off[nbc], indptr, indices, values, hermitian: false }
    }

    /// Principal submatrix on `index` (which must be sorted) keeping only the
    /// couplings inside the index set.
    pub fn principal_submatrix(&self, index: &[usize]) -> Self {
        let mut local = std::collections::HashMap::with_capacity(index.len());
        for (k, &g) in index.iter().enumerate() {
            local.insert(g, k);
        }
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for &g in index {
            let (cs, vs) = self.row(g);
            for (&c, &v) in cs.iter().zip(vs) {
                if let Some(&k) = local.get(&c) {
                    indices.push(k);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        let n = index.len();
        Self { rows: n, cols: n, indptr, indices, values, hermitian: false }
    }

    /// Zero-pads a square operator to size `n`.
    pub fn pad_square(&self, n: usize) -> Self {
        assert!(self.is_square() && n >= self.rows);
        let mut out = self.clone();
        out.indptr.resize(n + 1, self.nnz());
        out.rows = n;
        out.cols = n;
        out
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![c64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.cols, "matvec input length");
        assert_eq!(y.len(), self.rows, "matvec output length");
        for (r, out) in y.iter_mut().enumerate() {
            let (cs, vs) = self.row(r);
            *out = cs.iter().zip(vs).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// max |self − other| over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.sub(other).max_norm()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    /// Writes the coordinate-triplet text form: a `dim rows cols nnz` header then
    /// one `row col real imag` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dim {} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {:.16e} {:.16e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty operator file".into()))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 || head[0] != "dim" {
            return Err(Error::Parse(format!("bad operator header {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let (rows, cols, nnz) = (num(head[1])?, num(head[2])?, num(head[3])?);
        let mut t = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::Parse(format!("bad triplet line {line:?}")));
            }
            let re = f[2].parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
            let im = f[3].parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
            let (r, c) = (num(f[0])?, num(f[1])?);
            if r >= rows || c >= cols {
                return Err(Error::Parse(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            t.push((r, c, c64::new(re, im)));
        }
        if t.len() != nnz {
            return Err(Error::Parse(format!("header promised {nnz} entries, found {}", t.len())));
        }
        Ok(Self::from_triplets(rows, cols, t))
    }
}

/// `I_{n^(axis-1)} ⊗ base ⊗ I_{n^(d-axis)}` with `n = base.rows()`; `axis` is 1-based.
pub fn lift_axis(base: &Operator, axis: usize, d: usize) -> Result<Operator> {
    if !base.is_square() {
        return Err(Error::Dimension("lift_axis needs a square base".into()));
    }
    if axis == 0 || axis > d {
        return Err(Error::InvalidArgument(format!("axis {axis} outside 1..={d}")));
    }
    let n = base.rows();
    let left = Operator::identity(n.pow(axis as u32 - 1));
    let right = Operator::identity(n.pow((d - axis) as u32));
    Ok(left.kron(base).kron(&right))
}

/// Writes a state vector as `index real imag` lines.
pub fn write_state<W: Write>(state: &[c64], mut w: W) -> std::io::Result<()> {
    for (i, v) in state.iter().enumerate() {
        writeln!(w, "{i} {:.16e} {:.16e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_state<R: BufRead>(r: R) -> Result<Vec<c64>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("bad state line {line:?}")));
        }
        let idx: usize = f[0].parse().map_err(|_| Error::Parse(format!("bad index {:?}", f[0])))?;
        if idx != out.len() {
            return Err(Error::Parse(format!("state index {idx} out of order")));
        }
        let re = f[1].parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
        let im = f[2].parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
        out.push(c64::new(re, im));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = Operator::from_triplets(2, 2, [(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(1.0)), (1, 0, c(-1.0))]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), c(3.0));
        assert_eq!(a.sparsity(), 1);
    }

    #[test]
    fn kron_matches_definition() {
        let a = Operator::from_dense(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        let b = Operator::from_dense(2, 2, &[c(0.0), c(5.0), c(6.0), c(7.0)]);
        let k = a.kron(&b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k.get(i * 2 + p, j * 2 + q), a.get(i, j) * b.get(p, q));
                    }
                }
            }
        }
    }

    #[test]
    fn matmul_against_dense() {
        let a = Operator::from_dense(2, 3, &[c(1.0), c(0.0), c(2.0), c(0.0), c(3.0), c(0.0)]);
        let b = Operator::from_dense(3, 2, &[c(1.0), c(1.0), c(0.0), c(2.0), c(4.0), c(0.0)]);
        let p = a.matmul(&b);
        let dense = a.to_dense() * b.to_dense();
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(p.get(r, col), dense[(r, col)]);
            }
        }
    }

    #[test]
    fn triplet_text_round_trip() {
        let a = Operator::from_triplets(3, 2, [(0, 1, c64::new(0.1, -2.5)), (2, 0, c(1e-300))]);
        let mut buf = Vec::new();
        a.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("dim 3 2 2\n"));
        let b = Operator::read_triplets(&buf[..]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn state_round_trip() {
        let s = vec![c64::new(1.0, 2.0), c64::new(-0.3, 1e-17)];
        let mut buf = Vec::new();
        write_state(&s, &mut buf).unwrap();
        assert_eq!(read_state(&buf[..]).unwrap(), s);
    }

    #[test]
    fn block_offsets() {
        let i2 = Operator::identity(2);
        let z = Operator::from_triplets(2, 3, [(1, 2, c(5.0))]);
        let b = Operator::block(&[vec![Some(&i2), None], vec![None, Some(&z)]]);
        assert_eq!(b.dim(), (4, 5));
        assert_eq!(b.get(3, 4), c(5.0));
        assert_eq!(b.get(1, 1), c(1.0));
    }

    #[test]
    fn lift_axis_layout() {
        let b = Operator::from_dense(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        assert_eq!(lift_axis(&b, 1, 1).unwrap(), b);
        let l = lift_axis(&b, 2, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(l.get(i * 2 + j, i * 2 + k), b.get(j, k));
                }
            }
        }
        assert!(lift_axis(&b, 3, 2).is_err());
    }

    #[test]
    fn hermitian_flag_requires_symmetry() {
        let a = Operator::from_triplets(2, 2, [(0, 1, c64::new(0.0, 1.0)), (1, 0, c64::new(0.0, 1.0))]);
        assert!(a.clone().into_hermitian().is_err());
        let h = Operator::from_triplets(2, 2, [(0, 1, c64::new(0.0, 1.0)), (1, 0, c64::new(0.0, -1.0))]);
        assert!(h.into_hermitian().unwrap().hermitian_flag());
    }
}
