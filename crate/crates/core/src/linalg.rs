//! Dense exact linear algebra over [`Scalar`]: fraction-free rank and
//! determinants, kernels, pseudo-reflection recognition, centralizer
//! dimensions, spectrum certificates and block assembly.
//!
//! There is deliberately no eigensolver here: every spectrum question is a
//! verification against caller-supplied candidate eigenvalues, which keeps
//! everything decidable in exact mode.

use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalar::{Scalar, ScalarField};
use std::fmt;

/// Dense square matrix, row-major, all entries in one field.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    field: ScalarField,
    dim: usize,
    entries: Vec<Scalar>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix[{}x{}]", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.at(i, j).render()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl SquareMatrix {
    pub fn from_fn(field: &ScalarField, dim: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> SquareMatrix {
        assert!(dim >= 1, "dimension must be >= 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let s = f(i, j);
                assert!(s.field() == field, "entry field mismatch");
                entries.push(s);
            }
        }
        SquareMatrix {
            field: field.clone(),
            dim,
            entries,
        }
    }

    pub fn from_rows(field: &ScalarField, rows: Vec<Vec<Scalar>>) -> Result<SquareMatrix> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("matrix rows must form a square".into()));
        }
        for r in &rows {
            for s in r {
                if s.field() != field {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(SquareMatrix {
            field: field.clone(),
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Parse a row-major grid of scalar literals.
    pub fn from_literals(field: &ScalarField, rows: &[&[&str]]) -> Result<SquareMatrix> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let mut row = Vec::with_capacity(r.len());
            for lit in *r {
                row.push(field.parse(lit)?);
            }
            out.push(row);
        }
        SquareMatrix::from_rows(field, out)
    }

    pub fn identity(field: &ScalarField, dim: usize) -> SquareMatrix {
        let one = field.one();
        let zero = field.zero();
        SquareMatrix::from_fn(field, dim, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn zero(field: &ScalarField, dim: usize) -> SquareMatrix {
        let zero = field.zero();
        SquareMatrix::from_fn(field, dim, |_, _| zero.clone())
    }

    pub fn scalar_matrix(s: &Scalar, dim: usize) -> SquareMatrix {
        let zero = s.field().zero();
        SquareMatrix::from_fn(s.field(), dim, |i, j| if i == j { s.clone() } else { zero.clone() })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.dim).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.dim).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn with_entry(&self, i: usize, j: usize, v: Scalar) -> SquareMatrix {
        let mut m = self.clone();
        m.entries[i * self.dim + j] = v;
        m
    }

    pub fn transpose(&self) -> SquareMatrix {
        SquareMatrix::from_fn(&self.field, self.dim, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let zero = self.field.zero();
        SquareMatrix::from_fn(&self.field, self.dim, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.dim {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = other.at(k, j);
                if b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        })
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        SquareMatrix::from_fn(&self.field, self.dim, |i, j| self.at(i, j) + other.at(i, j))
    }

    pub fn sub(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        SquareMatrix::from_fn(&self.field, self.dim, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn scale(&self, s: &Scalar) -> SquareMatrix {
        SquareMatrix::from_fn(&self.field, self.dim, |i, j| s * self.at(i, j))
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = self.field.zero();
                for k in 0..self.dim {
                    let a = self.at(i, k);
                    if !a.is_zero() && !v[k].is_zero() {
                        acc = &acc + &(a * &v[k]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let one = self.field.one();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.at(i, j);
                if i == j {
                    if *e != one {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Some(c) iff the matrix equals c * I.
    pub fn as_scalar(&self) -> Option<Scalar> {
        let c = self.at(0, 0).clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    if *self.at(i, j) != c {
                        return None;
                    }
                } else if !self.at(i, j).is_zero() {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Rank via fraction-free (Bareiss) elimination with fill-reducing pivots.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.to_rows())
    }

    /// Determinant via fraction-free elimination.
    pub fn det(&self) -> Scalar {
        let mut rows = self.to_rows();
        let n = self.dim;
        let field = self.field.clone();
        let mut prev = field.one();
        let mut sign = false;
        for t in 0..n {
            // pivot search (first nonzero in column order keeps det bookkeeping simple)
            let mut piv = None;
            'outer: for j in t..n {
                for i in t..n {
                    if !rows[i][j].is_zero() {
                        piv = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let (pi, pj) = match piv {
                Some(p) => p,
                None => return field.zero(),
            };
            if pi != t {
                rows.swap(pi, t);
                sign = !sign;
            }
            if pj != t {
                for row in rows.iter_mut() {
                    row.swap(pj, t);
                }
                sign = !sign;
            }
            let pivot = rows[t][t].clone();
            for i in t + 1..n {
                for j in t + 1..n {
                    let num = &(&pivot * &rows[i][j]) - &(&rows[i][t] * &rows[t][j]);
                    rows[i][j] = num.div(&prev).expect("bareiss divisor is nonzero");
                }
                rows[i][t] = field.zero();
            }
            prev = pivot;
        }
        if sign {
            -prev
        } else {
            prev
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    /// Basis of the kernel, RREF-style: one vector per free column,
    /// ordered by free column index.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        kernel_of_rows(&self.field, self.to_rows(), self.dim)
    }

    pub fn inverse(&self) -> Result<SquareMatrix> {
        let n = self.dim;
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        let zero = self.field.zero();
        let one = self.field.one();
        for i in 0..n {
            let mut r = self.row(i);
            for j in 0..n {
                r.push(if i == j { one.clone() } else { zero.clone() });
            }
            rows.push(r);
        }
        let pivots = rref(&mut rows);
        if pivots.len() != n || pivots.iter().enumerate().any(|(t, &c)| c != t) {
            return Err(Error::SingularMatrix);
        }
        Ok(SquareMatrix::from_fn(&self.field, n, |i, j| rows[i][n + j].clone()))
    }

    /// Integer matrix power; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Result<SquareMatrix> {
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut acc = SquareMatrix::identity(&self.field, self.dim);
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Q * self * Q^-1.
    pub fn conjugate_by(&self, q: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(q.mul(self).mul(&q.inverse()?))
    }

    /// Pseudo-reflection recognition.
    ///
    /// Returns the rank-one data (u, e, special) with M = I - u e^T when
    /// M - I is supported on a single column e; for other rank-one shapes
    /// returns the general factorization M = I - u v^T. None if
    /// rank(M - I) != 1 or det(M) = 1.
    pub fn is_pseudo_reflection(&self) -> Result<Option<RankOneDecomposition>> {
        let n = self.dim;
        let ident = SquareMatrix::identity(&self.field, n);
        let r = self.sub(&ident);
        if r.rank() != 1 {
            // singularity only matters once we know we have a candidate;
            // still honor the contract that singular input is an error
            if self.rank() != n {
                return Err(Error::SingularMatrix);
            }
            return Ok(None);
        }
        if self.rank() != n {
            return Err(Error::SingularMatrix);
        }
        let nonzero_cols: Vec<usize> = (0..n)
            .filter(|&j| (0..n).any(|i| !r.at(i, j).is_zero()))
            .collect();
        if nonzero_cols.len() == 1 {
            let e = nonzero_cols[0];
            let u: Vec<Scalar> = (0..n).map(|i| -r.at(i, e)).collect();
            let special = &self.field.one() - &u[e];
            if special.is_one() {
                return Ok(None);
            }
            return Ok(Some(RankOneDecomposition {
                u,
                e: Some(e),
                v: None,
                special,
            }));
        }
        // general rank-one shape
        let q = nonzero_cols[0];
        let p = (0..n).find(|&i| !r.at(i, q).is_zero()).unwrap();
        let u: Vec<Scalar> = (0..n).map(|i| r.at(i, q).clone()).collect();
        let mut v: Vec<Scalar> = (0..n)
            .map(|j| -r.at(p, j).div(r.at(p, q)).unwrap())
            .collect();
        // canonical scaling: first nonzero of v pinned to one
        let j0 = v.iter().position(|x| !x.is_zero()).unwrap();
        let c = v[j0].clone();
        let u: Vec<Scalar> = u.iter().map(|x| x * &c).collect();
        for x in &mut v {
            *x = x.div(&c).unwrap();
        }
        let mut dot = self.field.zero();
        for i in 0..n {
            dot = &dot + &(&v[i] * &u[i]);
        }
        let special = &self.field.one() - &dot;
        if special.is_one() {
            return Ok(None);
        }
        Ok(Some(RankOneDecomposition {
            u,
            e: None,
            v: Some(v),
            special,
        }))
    }

    /// dim { B : MB = BM }, as m^2 minus the rank of the Sylvester map.
    pub fn centralizer_dim(&self) -> usize {
        let n = self.dim;
        let zero = self.field.zero();
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // row for entry (i,j) of MB - BM, unknowns B[k][l] at k*n+l
                let mut row = vec![zero.clone(); n * n];
                for k in 0..n {
                    let a = self.at(i, k);
                    if !a.is_zero() {
                        row[k * n + j] = &row[k * n + j] + a;
                    }
                }
                for l in 0..n {
                    let b = self.at(l, j);
                    if !b.is_zero() {
                        row[i * n + l] = &row[i * n + l] - b;
                    }
                }
                rows.push(row);
            }
        }
        n * n - rank_of_rows(rows)
    }

    /// Certify that the matrix is semisimple with exactly the claimed
    /// spectrum: the product of (M - lambda I) over the distinct claimed
    /// eigenvalues must vanish and each eigenspace must have the claimed
    /// dimension.
    pub fn verify_semisimple_spectrum(&self, spectrum: &[(Scalar, usize)]) -> Result<(bool, Report)> {
        let m = self.dim;
        let total: usize = spectrum.iter().map(|(_, d)| *d).sum();
        if total != m {
            return Err(Error::DimensionMismatch(format!(
                "multiplicities sum to {total}, dimension is {m}"
            )));
        }
        for (i, (a, _)) in spectrum.iter().enumerate() {
            for (b, _) in &spectrum[i + 1..] {
                if a == b {
                    return Err(Error::InvalidParams(
                        "claimed eigenvalues must be pairwise distinct".into(),
                    ));
                }
            }
        }
        let mut report = Report::new();
        let ident = SquareMatrix::identity(&self.field, m);
        let mut prod = ident.clone();
        for (lam, _) in spectrum {
            prod = prod.mul(&self.sub(&SquareMatrix::scalar_matrix(lam, m)));
        }
        let ann = prod.rank() == 0;
        report.push("product of (M - lambda I) vanishes", ann);
        let mut ok = ann;
        for (lam, d) in spectrum {
            let ker = self.sub(&SquareMatrix::scalar_matrix(lam, m)).kernel_basis();
            let pass = ker.len() == *d;
            report.push_detail(
                format!("eigenspace dim at {}", lam.render()),
                pass,
                format!("claimed {d}, found {}", ker.len()),
            );
            ok &= pass;
        }
        Ok((ok, report))
    }

    /// Kernel basis of (M - lambda I), each vector rescaled so its first
    /// nonzero coordinate is one, ordered by pivot position.
    pub fn eigenspace_basis(&self, lambda: &Scalar) -> Vec<Vec<Scalar>> {
        let m = self.dim;
        let shifted = self.sub(&SquareMatrix::scalar_matrix(lambda, m));
        let mut vecs = shifted.kernel_basis();
        if vecs.is_empty() {
            return vecs;
        }
        // re-echelonize the basis itself so pinning and ordering are canonical
        let pivots = rref(&mut vecs);
        vecs.truncate(pivots.len());
        vecs
    }
}

/// Rank-one data for a pseudo-reflection M = I - u e^T (or I - u v^T when no
/// standard direction exists). `special` is the special eigenvalue det(M).
#[derive(Clone, Debug)]
pub struct RankOneDecomposition {
    pub u: Vec<Scalar>,
    pub e: Option<usize>,
    pub v: Option<Vec<Scalar>>,
    pub special: Scalar,
}

impl RankOneDecomposition {
    pub fn reconstruct(&self, field: &ScalarField) -> SquareMatrix {
        let n = self.u.len();
        let ident = SquareMatrix::identity(field, n);
        SquareMatrix::from_fn(field, n, |i, j| {
            let row_j = match (&self.e, &self.v) {
                (Some(e), _) => {
                    if j == *e {
                        field.one()
                    } else {
                        field.zero()
                    }
                }
                (None, Some(v)) => v[j].clone(),
                _ => unreachable!(),
            };
            ident.at(i, j) - &(&self.u[i] * &row_j)
        })
    }
}

/// Blocks accepted by [`block_assemble`].
#[derive(Clone, Debug)]
pub enum Block {
    Mat(SquareMatrix),
    /// c * I_n
    ScaledIdentity(usize, Scalar),
    /// 1x1 block
    Entry(Scalar),
    Zero(usize, usize),
    /// rows x cols rectangular block, row-major
    Rect(usize, usize, Vec<Scalar>),
}

impl Block {
    fn shape(&self) -> (usize, usize) {
        match self {
            Block::Mat(m) => (m.dim(), m.dim()),
            Block::ScaledIdentity(n, _) => (*n, *n),
            Block::Entry(_) => (1, 1),
            Block::Zero(r, c) => (*r, *c),
            Block::Rect(r, c, _) => (*r, *c),
        }
    }

    fn at(&self, field: &ScalarField, i: usize, j: usize) -> Scalar {
        match self {
            Block::Mat(m) => m.at(i, j).clone(),
            Block::ScaledIdentity(_, s) => {
                if i == j {
                    s.clone()
                } else {
                    field.zero()
                }
            }
            Block::Entry(s) => s.clone(),
            Block::Zero(..) => field.zero(),
            Block::Rect(_, c, v) => v[i * c + j].clone(),
        }
    }
}

/// Assemble a block grid into a square matrix. Row heights and column widths
/// must be consistent and the result must be square.
pub fn block_assemble(field: &ScalarField, grid: &[Vec<Block>]) -> Result<SquareMatrix> {
    if grid.is_empty() || grid.iter().any(|r| r.len() != grid[0].len()) {
        return Err(Error::DimensionMismatch("ragged block grid".into()));
    }
    let rows = grid.len();
    let cols = grid[0].len();
    let mut row_h = vec![0usize; rows];
    let mut col_w = vec![0usize; cols];
    for (bi, row) in grid.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            let (h, w) = b.shape();
            if row_h[bi] == 0 {
                row_h[bi] = h;
            } else if row_h[bi] != h {
                return Err(Error::DimensionMismatch(format!(
                    "block ({bi},{bj}) has height {h}, row expects {}",
                    row_h[bi]
                )));
            }
            if col_w[bj] == 0 {
                col_w[bj] = w;
            } else if col_w[bj] != w {
                return Err(Error::DimensionMismatch(format!(
                    "block ({bi},{bj}) has width {w}, column expects {}",
                    col_w[bj]
                )));
            }
        }
    }
    let total_r: usize = row_h.iter().sum();
    let total_c: usize = col_w.iter().sum();
    if total_r != total_c {
        return Err(Error::DimensionMismatch(format!(
            "assembled matrix is {total_r}x{total_c}"
        )));
    }
    let row_off: Vec<usize> = row_h
        .iter()
        .scan(0, |acc, h| {
            let o = *acc;
            *acc += h;
            Some(o)
        })
        .collect();
    let col_off: Vec<usize> = col_w
        .iter()
        .scan(0, |acc, w| {
            let o = *acc;
            *acc += w;
            Some(o)
        })
        .collect();
    let mut m = SquareMatrix::zero(field, total_r);
    for (bi, row) in grid.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            let (h, w) = b.shape();
            for i in 0..h {
                for j in 0..w {
                    let v = b.at(field, i, j);
                    if !v.is_zero() {
                        m = m.with_entry(row_off[bi] + i, col_off[bj] + j, v);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Direct sum of square blocks.
pub fn block_diag(field: &ScalarField, blocks: &[SquareMatrix]) -> SquareMatrix {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut m = SquareMatrix::zero(field, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let v = b.at(i, j);
                if !v.is_zero() {
                    m = m.with_entry(off + i, off + j, v.clone());
                }
            }
        }
        off += b.dim();
    }
    m
}

/// Joint kernel of a family of matrices (kernel of the vertical stack).
pub fn joint_kernel(field: &ScalarField, mats: &[SquareMatrix]) -> Vec<Vec<Scalar>> {
    assert!(!mats.is_empty());
    let n = mats[0].dim();
    let mut rows = vec![];
    for m in mats {
        assert_eq!(m.dim(), n, "dimension mismatch");
        rows.extend(m.to_rows());
    }
    kernel_of_rows(field, rows, n)
}

// ---- elimination internals ----

/// Reduced row echelon form in place; returns pivot column indices.
pub(crate) fn rref(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    if rows.is_empty() {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(pi) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pi);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for j in c..ncols {
            if !rows[r][j].is_zero() {
                rows[r][j] = &rows[r][j] * &inv;
            }
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    if !rows[r][j].is_zero() {
                        rows[i][j] = &rows[i][j] - &(&f * &rows[r][j]);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Kernel basis of an arbitrary stack of rows acting on `ncols` unknowns.
pub(crate) fn kernel_of_rows(field: &ScalarField, mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Vec<Vec<Scalar>> {
    let pivots = rref(&mut rows);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = vec![];
    for f in 0..ncols {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[f] = field.one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[row][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Fraction-free Bareiss rank with a light fill-reducing pivot choice.
pub(crate) fn rank_of_rows(mut rows: Vec<Vec<Scalar>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let nrows = rows.len();
    let field = rows[0][0].field().clone();
    let mut prev = field.one();
    let mut rank = 0;
    let steps = nrows.min(ncols);
    let mut col_perm: Vec<usize> = (0..ncols).collect();
    for t in 0..steps {
        // pivot choice: nonzero entry whose row has the fewest nonzeros
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..nrows {
            let nnz = (t..ncols).filter(|&j| !rows[i][col_perm[j]].is_zero()).count();
            if nnz == 0 {
                continue;
            }
            let j = (t..ncols).find(|&j| !rows[i][col_perm[j]].is_zero()).unwrap();
            match best {
                Some((_, _, bn)) if bn <= nnz => {}
                _ => best = Some((i, j, nnz)),
            }
        }
        let Some((pi, pj, _)) = best else {
            break;
        };
        rows.swap(t, pi);
        col_perm.swap(t, pj);
        rank += 1;
        let pivot = rows[t][col_perm[t]].clone();
        for i in t + 1..nrows {
            let lead = rows[i][col_perm[t]].clone();
            if lead.is_zero() {
                // Bareiss still rescales untouched rows by pivot/prev
                let f = pivot.div(&prev).expect("bareiss divisor nonzero");
                if !f.is_one() {
                    for j in t + 1..ncols {
                        let c = col_perm[j];
                        if !rows[i][c].is_zero() {
                            rows[i][c] = &rows[i][c] * &f;
                        }
                    }
                }
            } else {
                for j in t + 1..ncols {
                    let c = col_perm[j];
                    let num = &(&pivot * &rows[i][c]) - &(&lead * &rows[t][c]);
                    rows[i][c] = if num.is_zero() {
                        num
                    } else {
                        num.div(&prev).expect("bareiss division is exact")
                    };
                }
                rows[i][col_perm[t]] = field.zero();
            }
        }
        prev = pivot;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarField {
        ScalarField::rationals()
    }

    fn m2(f: &ScalarField, e: [[i64; 2]; 2]) -> SquareMatrix {
        SquareMatrix::from_fn(f, 2, |i, j| f.integer(e[i][j]))
    }

    #[test]
    fn rank_examples() {
        let f = q();
        assert_eq!(SquareMatrix::identity(&f, 3).rank(), 3);
        assert_eq!(SquareMatrix::zero(&f, 4).rank(), 0);
        // A_1 - I with A_1 = [[1,-1],[0,-1]]
        let a1 = m2(&f, [[1, -1], [0, -1]]);
        let r = a1.sub(&SquareMatrix::identity(&f, 2));
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let f = q();
        assert!(SquareMatrix::identity(&f, 3).kernel_basis().is_empty());
        assert_eq!(SquareMatrix::zero(&f, 2).kernel_basis().len(), 2);
        let a1 = m2(&f, [[1, -1], [0, -1]]);
        let k = a1.sub(&SquareMatrix::identity(&f, 2)).kernel_basis();
        assert_eq!(k.len(), 1);
        // spans the first coordinate axis
        assert_eq!(k[0][0], f.one());
        assert!(k[0][1].is_zero());
    }

    #[test]
    fn rank_plus_kernel_is_dim() {
        let f = ScalarField::exact(5).unwrap();
        let z = f.root_of_unity(5, 1).unwrap();
        let m = SquareMatrix::from_fn(&f, 3, |i, j| {
            // a rank-deficient cyclotomic matrix: row2 = row0 + row1
            let base = match (i, j) {
                (0, _) => z.pow(j as i64).unwrap(),
                (1, _) => f.integer((j + 1) as i64),
                (2, _) => &z.pow(j as i64).unwrap() + &f.integer((j + 1) as i64),
                _ => unreachable!(),
            };
            base
        });
        assert_eq!(m.rank() + m.kernel_basis().len(), 3);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn pseudo_reflection_recognition() {
        let f = q();
        assert!(SquareMatrix::identity(&f, 3)
            .is_pseudo_reflection()
            .unwrap()
            .is_none());
        // diag(5,1,1)
        let d = SquareMatrix::from_fn(&f, 3, |i, j| {
            if i == j {
                f.integer(if i == 0 { 5 } else { 1 })
            } else {
                f.zero()
            }
        });
        let dec = d.is_pseudo_reflection().unwrap().unwrap();
        assert_eq!(dec.e, Some(0));
        assert_eq!(dec.special, f.integer(5));
        // [[1,-1],[0,-1]] -> u = (1,2), e = 1, special -1
        let a1 = m2(&f, [[1, -1], [0, -1]]);
        let dec = a1.is_pseudo_reflection().unwrap().unwrap();
        assert_eq!(dec.e, Some(1));
        assert_eq!(dec.u, vec![f.integer(1), f.integer(2)]);
        assert_eq!(dec.special, f.integer(-1));
        assert_eq!(dec.special, a1.det());
        assert_eq!(dec.reconstruct(&f), a1);
        // transvection is excluded
        let t = m2(&f, [[1, 1], [0, 1]]);
        assert!(t.is_pseudo_reflection().unwrap().is_none());
        // singular input errors
        let s = m2(&f, [[1, 0], [0, 0]]);
        assert!(s.is_pseudo_reflection().is_err());
        // general rank-one shape: conjugated reflection
        let g = m2(&f, [[3, 2], [-2, -1]]); // = I - u v^T with u=(-2,2), v=(1,1), det 1... adjust
        let gi = g.is_pseudo_reflection().unwrap();
        // det(g) = 3*(-1) - 2*(-2) = 1 -> excluded
        assert!(gi.is_none());
        let g2 = m2(&f, [[3, 4], [-1, -1]]); // det = -3+4 = 1 .. also excluded; build one with det 2
        assert!(g2.det() == f.one());
        let g3 = m2(&f, [[3, 2], [-1, 0]]); // det = 2, M - I = [[2,2],[-1,-1]] rank 1
        let dec = g3.is_pseudo_reflection().unwrap().unwrap();
        assert!(dec.e.is_none());
        assert_eq!(dec.special, f.integer(2));
        assert_eq!(dec.reconstruct(&f), g3);
    }

    #[test]
    fn centralizer_examples() {
        let f = q();
        assert_eq!(SquareMatrix::identity(&f, 3).centralizer_dim(), 9);
        for n in 2..5usize {
            let d = SquareMatrix::from_fn(&f, n, |i, j| {
                if i == j {
                    f.integer(if i == n - 1 { 7 } else { 2 })
                } else {
                    f.zero()
                }
            });
            assert_eq!(d.centralizer_dim(), (n - 1) * (n - 1) + 1);
        }
        let jordan = m2(&f, [[3, 1], [0, 3]]);
        assert_eq!(jordan.centralizer_dim(), 2);
    }

    #[test]
    fn spectrum_certificate() {
        let f = q();
        let i2 = SquareMatrix::identity(&f, 2);
        let (ok, _) = i2.verify_semisimple_spectrum(&[(f.one(), 2)]).unwrap();
        assert!(ok);
        let jordan = m2(&f, [[3, 1], [0, 3]]);
        let (ok, rep) = jordan.verify_semisimple_spectrum(&[(f.integer(3), 2)]).unwrap();
        assert!(!ok);
        assert!(!rep.passed());
        // Omega_inf of the cusp model over Q(zeta_3)
        let f3 = ScalarField::exact(3).unwrap();
        let m = SquareMatrix::from_literals(&f3, &[&["-1", "1"], &["-1", "0"]]).unwrap();
        let z = f3.root_of_unity(3, 1).unwrap();
        let z2 = f3.root_of_unity(3, 2).unwrap();
        let (ok, _) = m.verify_semisimple_spectrum(&[(z, 1), (z2, 1)]).unwrap();
        assert!(ok);
        // mismatched multiplicity sum errors
        assert!(i2.verify_semisimple_spectrum(&[(f.one(), 1)]).is_err());
    }

    #[test]
    fn eigenspace_pinning() {
        let f = q();
        let i2 = SquareMatrix::identity(&f, 2);
        let b = i2.eigenspace_basis(&f.one());
        assert_eq!(b.len(), 2);
        assert_eq!(b[0][0], f.one());
        assert_eq!(b[1][1], f.one());
        let d = m2(&f, [[2, 0], [0, 3]]);
        assert!(d.eigenspace_basis(&f.integer(5)).is_empty());
    }

    #[test]
    fn block_assembly() {
        let f = q();
        let i2 = SquareMatrix::identity(&f, 2);
        let m = block_assemble(
            &f,
            &[
                vec![Block::Mat(i2.clone()), Block::Zero(2, 2)],
                vec![Block::Zero(2, 2), Block::Mat(i2.clone())],
            ],
        )
        .unwrap();
        assert!(m.is_identity());
        // 1 (+) P (+) P
        let p = m2(&f, [[1, 2], [3, 4]]);
        let m = block_diag(&f, &[SquareMatrix::identity(&f, 1), p.clone(), p.clone()]);
        assert_eq!(m.dim(), 5);
        assert_eq!(m.at(1, 2), p.at(0, 1));
        assert_eq!(m.at(3, 3), p.at(0, 0));
        // dimension mismatch
        assert!(block_assemble(
            &f,
            &[vec![Block::Mat(i2.clone()), Block::Zero(3, 2)]]
        )
        .is_err());
    }

    #[test]
    fn inverse_and_pow() {
        let f = ScalarField::exact(3).unwrap();
        let m = SquareMatrix::from_literals(&f, &[&["0", "1"], &["1", "0"]]).unwrap();
        assert!(m.pow(2).unwrap().is_identity());
        assert!(m.inverse().unwrap() == m);
        let a = SquareMatrix::from_literals(&f, &[&["1", "-1"], &["0", "-1"]]).unwrap();
        assert!(a.mul(&a.inverse().unwrap()).is_identity());
        assert!(a.pow(-2).unwrap() == a.pow(2).unwrap().inverse().unwrap());
    }

    #[test]
    fn det_examples() {
        let f = q();
        let a = m2(&f, [[1, -1], [0, -1]]);
        assert_eq!(a.det(), f.integer(-1));
        let z = SquareMatrix::zero(&f, 3);
        assert!(z.det().is_zero());
        let m = SquareMatrix::from_fn(&f, 3, |i, j| f.integer([[2, 0, 1], [1, 1, 0], [0, 3, 1]][i][j]));
        assert_eq!(m.det(), f.integer(5)); // 2*(1) - 0 + 1*(3) = 5
    }
}
