//! Exact rational linear algebra on sparse matrices.
//!
//! Everything here works over ℚ with arbitrary-precision entries. Elimination
//! is fraction-free: rows are scaled to primitive integer vectors and combined
//! by integer cross-multiplication, with the content divided out after every
//! step so entries stay small on the structured matrices this crate produces.
//!
//! Subspaces are always stored in a canonical form (reduced row echelon,
//! each basis vector scaled to a primitive integer vector with positive
//! leading entry), so two equal subspaces have identical bases.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("inner basis vector {index} is not contained in the outer subspace")]
    ContainmentViolation { index: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// A sparse vector of fixed dimension with strictly increasing indices and no
/// stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        SparseVec { dim, entries: Vec::new() }
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        assert!(index < dim, "unit vector index out of range");
        SparseVec { dim, entries: vec![(index, Rational::one())] }
    }

    /// Builds a vector from arbitrary (index, value) pairs; duplicates are summed.
    pub fn from_entries<I>(dim: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in it {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            *acc.entry(i).or_insert_with(Rational::zero) += v;
        }
        SparseVec { dim, entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Self::from_dense(&values.iter().map(|&v| rat(v)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        SparseVec { dim: self.dim, entries: self.entries.iter().map(|(i, v)| (*i, v * s)).collect() }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: &Rational, other: &SparseVec) -> Self {
        assert_eq!(self.dim, other.dim, "vector dimension mismatch");
        if s.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, va)), Some((ib, vb))) => {
                    if ia < ib {
                        out.push((*ia, va.clone()));
                        a.next();
                    } else if ib < ia {
                        out.push((*ib, vb * s));
                        b.next();
                    } else {
                        let v = va + vb * s;
                        if !v.is_zero() {
                            out.push((*ia, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((ia, va)), None) => {
                    out.push((*ia, va.clone()));
                    a.next();
                }
                (None, Some((ib, vb))) => {
                    out.push((*ib, vb * s));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { dim: self.dim, entries: out }
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        self.add_scaled(&-Rational::one(), other)
    }

    /// Concatenates `self` followed by `other`.
    pub fn concat(&self, other: &SparseVec) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(i, v)| (i + self.dim, v.clone())));
        SparseVec { dim: self.dim + other.dim, entries }
    }

    /// The coordinates in `[start, start + len)`, reindexed from zero.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        SparseVec {
            dim: len,
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= start && *i < start + len)
                .map(|(i, v)| (i - start, v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense();
        write!(f, "(")?;
        for (i, v) in dense.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Immutable sparse matrix over ℚ, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, Rational::one())]).collect(),
        }
    }

    /// Builds a matrix from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in it {
            assert!(r < rows && c < cols, "entry ({r}, {c}) out of bounds for {rows}x{cols}");
            *acc[r].entry(c).or_insert_with(Rational::zero) += v;
        }
        SparseMatrix {
            rows,
            cols,
            data: acc
                .into_iter()
                .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn from_dense(rows: usize, cols: usize, values: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        if values.len() != rows || values.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::ShapeMismatch(format!("expected {rows}x{cols} dense matrix")));
        }
        Ok(SparseMatrix {
            rows,
            cols,
            data: values
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(c, v)| (c, v.clone()))
                        .collect()
                })
                .collect(),
        })
    }

    /// Convenience constructor from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let dense: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
        Self::from_dense(rows.len(), cols, &dense).expect("ragged integer matrix")
    }

    pub fn from_rows(cols: usize, rows: &[SparseVec]) -> Self {
        SparseMatrix {
            rows: rows.len(),
            cols,
            data: rows
                .iter()
                .map(|r| {
                    assert_eq!(r.dim, cols, "row dimension mismatch");
                    r.entries.clone()
                })
                .collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        Self::from_rows(rows, columns).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.data[r].binary_search_by_key(&c, |(i, _)| *i) {
            Ok(pos) => self.data[r][pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn row(&self, r: usize) -> SparseVec {
        SparseVec { dim: self.cols, entries: self.data[r].clone() }
    }

    pub fn row_entries(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    /// Iterates over all nonzero entries as (row, col, value).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec {
            dim: self.rows,
            entries: self
                .data
                .iter()
                .enumerate()
                .filter_map(|(r, row)| {
                    row.binary_search_by_key(&c, |(i, _)| *i).ok().map(|pos| (r, row[pos].1.clone()))
                })
                .collect(),
        }
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let t = self.transpose();
        (0..t.rows).map(|r| t.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_dense()).collect()
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        assert_eq!(self.cols, v.dim, "matrix-vector dimension mismatch");
        let entries = self
            .data
            .iter()
            .enumerate()
            .filter_map(|(r, row)| {
                let mut acc = Rational::zero();
                let (mut a, mut b) = (row.iter().peekable(), v.entries.iter().peekable());
                while let (Some((ia, va)), Some((ib, vb))) = (a.peek(), b.peek()) {
                    if ia < ib {
                        a.next();
                    } else if ib < ia {
                        b.next();
                    } else {
                        acc += va * vb;
                        a.next();
                        b.next();
                    }
                }
                (!acc.is_zero()).then_some((r, acc))
            })
            .collect();
        SparseVec { dim: self.rows, entries }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        self.add_scaled(&-Rational::one(), other)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: &Rational, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = (0..self.rows).map(|r| self.row(r).add_scaled(s, &other.row(r)).entries).collect();
        Ok(SparseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect()).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_triplets(
            self.rows * r2,
            self.cols * c2,
            self.triplets().flat_map(|(r, c, a)| {
                other.triplets().map(move |(rr, cc, b)| (r * r2 + rr, c * c2 + cc, a * b))
            }),
        )
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        SparseMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows
                .iter()
                .map(|r| {
                    let mut row: Vec<(usize, Rational)> = self.data[*r]
                        .iter()
                        .filter_map(|(c, v)| col_pos.get(c).map(|p| (*p, v.clone())))
                        .collect();
                    row.sort_by_key(|(c, _)| *c);
                    row
                })
                .collect(),
        }
    }

    /// Returns a copy with entry (r, c) replaced.
    pub fn with_entry(&self, r: usize, c: usize, value: Rational) -> SparseMatrix {
        let mut out = self.clone();
        let row = &mut out.data[r];
        match row.binary_search_by_key(&c, |(i, _)| *i) {
            Ok(pos) => {
                if value.is_zero() {
                    row.remove(pos);
                } else {
                    row[pos].1 = value;
                }
            }
            Err(pos) => {
                if !value.is_zero() {
                    row.insert(pos, (c, value));
                }
            }
        }
        out
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Fraction-free elimination on primitive integer rows.

type IntRow = Vec<(usize, BigInt)>;

fn to_int_row(v: &[(usize, Rational)]) -> IntRow {
    let lcm = v.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let mut row: IntRow = v.iter().map(|(i, x)| (*i, x.numer() * (&lcm / x.denom()))).collect();
    make_primitive(&mut row);
    row
}

/// Divides out the content and makes the leading entry positive.
fn make_primitive(row: &mut IntRow) {
    let Some(first) = row.first() else { return };
    let mut g = first.1.abs();
    for (_, x) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// `a * x - b * y`, dropping zeros.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut p, mut q) = (x.iter().peekable(), y.iter().peekable());
    loop {
        match (p.peek(), q.peek()) {
            (Some((i, u)), Some((j, w))) => {
                if i < j {
                    out.push((*i, a * u));
                    p.next();
                } else if j < i {
                    out.push((*j, -(b * w)));
                    q.next();
                } else {
                    let v = a * u - b * w;
                    if !v.is_zero() {
                        out.push((*i, v));
                    }
                    p.next();
                    q.next();
                }
            }
            (Some((i, u)), None) => {
                out.push((*i, a * u));
                p.next();
            }
            (None, Some((j, w))) => {
                out.push((*j, -(b * w)));
                q.next();
            }
            (None, None) => break,
        }
    }
    out
}

/// Rows with pairwise distinct leading columns.
#[derive(Default)]
struct Echelon {
    rows: Vec<IntRow>,
    pivot_of: BTreeMap<usize, usize>,
}

impl Echelon {
    /// Reduces `r` against the current pivots and keeps it if nonzero.
    fn insert(&mut self, mut r: IntRow) -> bool {
        let mut k = 0;
        while let Some(off) = r[k..].iter().position(|(c, _)| self.pivot_of.contains_key(c)) {
            let idx = k + off;
            let (col, coeff) = r[idx].clone();
            let prow = &self.rows[self.pivot_of[&col]];
            let lead = &prow[0].1;
            let g = lead.gcd(&coeff);
            r = combine(&(lead / &g), &r, &(&coeff / &g), prow);
            make_primitive(&mut r);
            k = idx;
        }
        if r.is_empty() {
            return false;
        }
        self.pivot_of.insert(r[0].0, self.rows.len());
        self.rows.push(r);
        true
    }

    fn from_rows<'a, I>(rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [(usize, Rational)]>,
    {
        let mut int_rows: Vec<IntRow> = rows.into_iter().filter(|r| !r.is_empty()).map(to_int_row).collect();
        // sparsest rows first keeps fill-in low
        int_rows.sort_by_key(Vec::len);
        let mut ech = Echelon::default();
        for r in int_rows {
            ech.insert(r);
        }
        ech
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Fully reduced rows sorted by pivot column.
    fn into_reduced(self) -> Vec<IntRow> {
        let mut rows = self.rows;
        rows.sort_by_key(|r| r[0].0);
        let pivots: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, r)| (r[0].0, i)).collect();
        for i in (0..rows.len()).rev() {
            let mut r = std::mem::take(&mut rows[i]);
            let mut k = 1;
            while let Some(off) = r[k..].iter().position(|(c, _)| pivots.contains_key(c)) {
                let idx = k + off;
                let (col, coeff) = r[idx].clone();
                let prow = &rows[pivots[&col]];
                let lead = &prow[0].1;
                let g = lead.gcd(&coeff);
                r = combine(&(lead / &g), &r, &(&coeff / &g), prow);
                make_primitive(&mut r);
                k = idx;
            }
            rows[i] = r;
        }
        rows
    }
}

fn int_row_to_vec(dim: usize, r: &IntRow) -> SparseVec {
    SparseVec { dim, entries: r.iter().map(|(i, x)| (*i, Rational::from_integer(x.clone()))).collect() }
}

/// Exact rank over ℚ.
pub fn rank(m: &SparseMatrix) -> usize {
    // eliminate along the shorter side
    if m.cols < m.rows {
        let t = m.transpose();
        Echelon::from_rows(t.data.iter().map(Vec::as_slice)).rank()
    } else {
        Echelon::from_rows(m.data.iter().map(Vec::as_slice)).rank()
    }
}

/// Basis of the null space `{v : m v = 0}`.
pub fn kernel(m: &SparseMatrix) -> Subspace {
    let reduced = Echelon::from_rows(m.data.iter().map(Vec::as_slice)).into_reduced();
    let pivots: BTreeMap<usize, &IntRow> = reduced.iter().map(|r| (r[0].0, r)).collect();
    let vectors: Vec<SparseVec> = (0..m.cols)
        .filter(|c| !pivots.contains_key(c))
        .map(|free| {
            let mut entries = vec![(free, Rational::one())];
            for (pc, row) in &pivots {
                if let Ok(pos) = row.binary_search_by_key(&free, |(i, _)| *i) {
                    entries.push((*pc, -Rational::new(row[pos].1.clone(), row[0].1.clone())));
                }
            }
            SparseVec::from_entries(m.cols, entries)
        })
        .collect();
    Subspace::span(m.cols, &vectors)
}

/// Basis of the column space.
pub fn image(m: &SparseMatrix) -> Subspace {
    Subspace::span(m.rows, &m.columns())
}

/// `dim outer − dim inner`, after checking that `inner ⊆ outer`.
pub fn subquotient_dim(outer: &Subspace, inner: &Subspace) -> Result<usize, LinalgError> {
    if outer.ambient_dim != inner.ambient_dim {
        return Err(LinalgError::AmbientMismatch { left: outer.ambient_dim, right: inner.ambient_dim });
    }
    if let Some(index) = inner.basis.iter().position(|v| !outer.contains(v)) {
        return Err(LinalgError::ContainmentViolation { index });
    }
    Ok(outer.dim() - inner.dim())
}

/// Basis of `a ∩ b`.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace, LinalgError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LinalgError::AmbientMismatch { left: a.ambient_dim, right: b.ambient_dim });
    }
    let n = a.ambient_dim;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    if a.dim() == n {
        return Ok(b.clone());
    }
    if b.dim() == n {
        return Ok(a.clone());
    }
    // solve Σ x_i a_i − Σ y_j b_j = 0
    let mut cols: Vec<SparseVec> = a.basis.clone();
    cols.extend(b.basis.iter().map(|v| v.scale(&-Rational::one())));
    let k = kernel(&SparseMatrix::from_columns(n, &cols));
    let vectors: Vec<SparseVec> = k
        .basis
        .iter()
        .map(|sol| {
            sol.entries
                .iter()
                .filter(|(i, _)| *i < a.dim())
                .fold(SparseVec::zero(n), |acc, (i, x)| acc.add_scaled(x, &a.basis[*i]))
        })
        .collect();
    Ok(Subspace::span(n, &vectors))
}

/// `{v : m v ∈ target}`.
pub fn preimage(m: &SparseMatrix, target: &Subspace) -> Result<Subspace, LinalgError> {
    if m.rows != target.ambient_dim {
        return Err(LinalgError::AmbientMismatch { left: m.rows, right: target.ambient_dim });
    }
    if target.dim() == 0 {
        return Ok(kernel(m));
    }
    let mut cols = m.columns();
    cols.extend(target.basis.iter().cloned());
    let k = kernel(&SparseMatrix::from_columns(m.rows, &cols));
    let vectors: Vec<SparseVec> = k.basis.iter().map(|sol| sol.slice(0, m.cols)).collect();
    Ok(Subspace::span(m.cols, &vectors))
}

/// A linear subspace of ℚ^n held in canonical reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: (0..ambient_dim).map(|i| SparseVec::unit(ambient_dim, i)).collect() }
    }

    /// The span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vectors: &[SparseVec]) -> Self {
        for v in vectors {
            assert_eq!(v.dim, ambient_dim, "spanning vector has wrong dimension");
        }
        let reduced = Echelon::from_rows(vectors.iter().map(|v| v.entries.as_slice())).into_reduced();
        Subspace { ambient_dim, basis: reduced.iter().map(|r| int_row_to_vec(ambient_dim, r)).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient_dim × dim` matrix.
    pub fn basis_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.ambient_dim, &self.basis)
    }

    /// Coordinates of `v` in this basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Rational>> {
        assert_eq!(v.dim, self.ambient_dim, "vector dimension mismatch");
        let mut residual = v.clone();
        let mut coords = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let (pc, lead) = b.leading().expect("basis vectors are nonzero");
            let c = residual.get(pc) / lead;
            if !c.is_zero() {
                residual = residual.add_scaled(&-c.clone(), b);
            }
            coords.push(c);
        }
        residual.is_zero().then_some(coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && other.basis.iter().all(|v| self.contains(v))
    }

    /// `self + other`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::AmbientMismatch { left: self.ambient_dim, right: other.ambient_dim });
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Ok(Subspace::span(self.ambient_dim, &all))
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &SparseMatrix) -> Result<Subspace, LinalgError> {
        if m.cols != self.ambient_dim {
            return Err(LinalgError::AmbientMismatch { left: m.cols, right: self.ambient_dim });
        }
        let imgs: Vec<SparseVec> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Ok(Subspace::span(m.rows, &imgs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(2)), 2);
        assert_eq!(rank(&SparseMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&SparseMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        for n in 0..5 {
            assert_eq!(kernel(&SparseMatrix::identity(n)).dim(), 0);
            assert_eq!(kernel(&SparseMatrix::zeros(n, n)).dim(), n);
        }
        let k = kernel(&SparseMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.basis(), &[SparseVec::from_i64(&[1, -1])]);
    }

    #[test]
    fn image_examples() {
        assert_eq!(image(&SparseMatrix::identity(3)), Subspace::full(3));
        assert_eq!(image(&SparseMatrix::zeros(3, 2)).dim(), 0);
        let im = image(&SparseMatrix::from_i64(&[&[1], &[2]]));
        assert_eq!(im.basis(), &[SparseVec::from_i64(&[1, 2])]);
    }

    #[test]
    fn subquotient_examples() {
        assert_eq!(subquotient_dim(&Subspace::full(2), &Subspace::zero(2)), Ok(2));
        let s = Subspace::span(3, &[SparseVec::from_i64(&[1, 2, 3])]);
        assert_eq!(subquotient_dim(&s, &s), Ok(0));
        let plane = Subspace::span(3, &[SparseVec::from_i64(&[1, 0, 0]), SparseVec::from_i64(&[0, 1, 0])]);
        assert_eq!(subquotient_dim(&Subspace::full(3), &plane), Ok(1));
        assert_eq!(subquotient_dim(&s, &plane), Err(LinalgError::ContainmentViolation { index: 0 }));
        assert!(matches!(
            subquotient_dim(&Subspace::full(2), &plane),
            Err(LinalgError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn intersect_examples() {
        let xy = Subspace::span(3, &[SparseVec::from_i64(&[1, 0, 0]), SparseVec::from_i64(&[0, 1, 0])]);
        let xz = Subspace::span(3, &[SparseVec::from_i64(&[1, 0, 0]), SparseVec::from_i64(&[0, 0, 1])]);
        assert_eq!(intersect(&xy, &xy).unwrap(), xy);
        assert_eq!(intersect(&xy, &xz).unwrap(), Subspace::span(3, &[SparseVec::from_i64(&[1, 0, 0])]));
        assert_eq!(intersect(&xy, &Subspace::zero(3)).unwrap().dim(), 0);
        assert!(intersect(&xy, &Subspace::zero(2)).is_err());
        // a skew pair that meets in a line
        let a = Subspace::span(3, &[SparseVec::from_i64(&[1, 1, 0]), SparseVec::from_i64(&[0, 1, 1])]);
        let b = Subspace::span(3, &[SparseVec::from_i64(&[1, 0, 0]), SparseVec::from_i64(&[0, 0, 1])]);
        let meet = intersect(&a, &b).unwrap();
        assert_eq!(meet.basis(), &[SparseVec::from_i64(&[1, 0, -1])]);
    }

    #[test]
    fn canonical_form_is_primitive_with_positive_lead() {
        let s = Subspace::span(2, &[SparseVec::from_dense(&[ratio(-1, 2), ratio(-3, 4)])]);
        assert_eq!(s.basis(), &[SparseVec::from_i64(&[2, 3])]);
    }

    #[test]
    fn preimage_and_coordinates() {
        let m = SparseMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]]);
        let line = Subspace::span(2, &[SparseVec::from_i64(&[1, 1])]);
        let pre = preimage(&m, &line).unwrap();
        assert_eq!(pre.dim(), 2);
        assert!(pre.contains(&SparseVec::from_i64(&[3, 3, 7])));
        assert!(!pre.contains(&SparseVec::from_i64(&[1, 0, 0])));
        let c = line.coordinates(&SparseVec::from_i64(&[5, 5])).unwrap();
        assert_eq!(c, vec![rat(5)]);
    }

    #[test]
    fn kron_of_identities() {
        let k = SparseMatrix::identity(2).kron(&SparseMatrix::identity(3));
        assert_eq!(k, SparseMatrix::identity(6));
    }
}
