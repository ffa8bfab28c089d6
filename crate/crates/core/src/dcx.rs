//! The double complex `C^{p,q} = ⊕_{ḡ ∈ G^(q)} ⋀^p (Ω^(q)_ḡ)*`, its total
//! cohomology and the first two spectral-sequence pages.
//!
//! Coordinates on `C^{p,q}` are tuple-major (nerve order), monomial-minor
//! (lexicographic). `δ` raises `q`, `ψ` raises `p`; both are stored unsigned.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{self, kernel, rank, rat, Rational, SparseMatrix, SparseVec, Subspace};
use crate::fingroupoid;
use crate::laq::{face_matrices, lifted_field_of, nerve_algebroid, LaGroupoid, NerveAlgebroid, NerveError};
use crate::superalg::{derivation_matrix, exterior_basis, pullback_matrix};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{identity} fails in block ({p},{q}) at entry ({row},{col}): {value}")]
pub struct IdentityViolation {
    pub identity: String,
    pub p: usize,
    pub q: usize,
    pub row: usize,
    pub col: usize,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DcxError {
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Identity(#[from] IdentityViolation),
    #[error("window ({}, {}) cannot certify this request; need at least ({}, {})", .window.0, .window.1, .needed.0, .needed.1)]
    WindowTooSmall { needed: (usize, usize), window: (usize, usize) },
    #[error("action generator {generator} is not compatible in block ({}, {}): {detail}", .block.0, .block.1)]
    ActionNotCompatible { generator: usize, block: (usize, usize), detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Take `δ` (the `q`-direction) first.
    DeltaFirst,
    /// Take `ψ` (the `p`-direction) first.
    PsiFirst,
}

impl std::str::FromStr for Orientation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta-first" => Ok(Orientation::DeltaFirst),
            "psi-first" => Ok(Orientation::PsiFirst),
            other => Err(format!("unknown orientation {other:?}")),
        }
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Orientation::DeltaFirst => "delta-first",
            Orientation::PsiFirst => "psi-first",
        })
    }
}

/// Blocks `C^{p,q}` for `p ≤ p_max`, `q ≤ q_max` with their differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleComplex {
    p_max: usize,
    q_max: usize,
    dims: Vec<Vec<usize>>,
    /// `delta[p][q]: C^{p,q−1} → C^{p,q}`; `delta[p][0]` has no columns.
    delta: Vec<Vec<SparseMatrix>>,
    /// `psi[p][q]: C^{p,q} → C^{p+1,q}` for `p < p_max`.
    psi: Vec<Vec<SparseMatrix>>,
}

impl DoubleComplex {
    /// From raw blocks; shapes are checked.
    pub fn from_blocks(
        p_max: usize,
        q_max: usize,
        dims: Vec<Vec<usize>>,
        delta: Vec<Vec<SparseMatrix>>,
        psi: Vec<Vec<SparseMatrix>>,
    ) -> Result<Self, String> {
        let grid_ok = dims.len() == p_max + 1 && dims.iter().all(|r| r.len() == q_max + 1);
        if !grid_ok || delta.len() != p_max + 1 || psi.len() != p_max {
            return Err("block grid does not match the window".into());
        }
        for p in 0..=p_max {
            if delta[p].len() != q_max + 1 {
                return Err(format!("δ row {p} has the wrong length"));
            }
            for q in 0..=q_max {
                let cols = if q == 0 { 0 } else { dims[p][q - 1] };
                if delta[p][q].rows() != dims[p][q] || delta[p][q].cols() != cols {
                    return Err(format!("δ block ({p},{q}) has the wrong shape"));
                }
                if p < p_max && (psi[p][q].rows() != dims[p + 1][q] || psi[p][q].cols() != dims[p][q]) {
                    return Err(format!("ψ block ({p},{q}) has the wrong shape"));
                }
            }
        }
        Ok(DoubleComplex { p_max, q_max, dims, delta, psi })
    }

    /// Every block zero-dimensional.
    pub fn zero(p_max: usize, q_max: usize) -> Self {
        let dims = vec![vec![0; q_max + 1]; p_max + 1];
        let delta = vec![vec![SparseMatrix::zeros(0, 0); q_max + 1]; p_max + 1];
        let psi = vec![vec![SparseMatrix::zeros(0, 0); q_max + 1]; p_max];
        DoubleComplex { p_max, q_max, dims, delta, psi }
    }

    pub fn window(&self) -> (usize, usize) {
        (self.p_max, self.q_max)
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims[p][q]
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    /// `δ: C^{p,q−1} → C^{p,q}` for `1 ≤ q ≤ q_max`.
    pub fn delta(&self, p: usize, q: usize) -> &SparseMatrix {
        &self.delta[p][q]
    }

    /// `ψ: C^{p,q} → C^{p+1,q}` for `p < p_max`.
    pub fn psi(&self, p: usize, q: usize) -> &SparseMatrix {
        &self.psi[p][q]
    }

    /// The same complex with one `δ` entry replaced.
    pub fn with_delta_entry(&self, p: usize, q: usize, row: usize, col: usize, value: Rational) -> Self {
        let mut out = self.clone();
        out.delta[p][q] = out.delta[p][q].with_entry(row, col, value);
        out
    }

    /// The same complex with one `ψ` entry replaced.
    pub fn with_psi_entry(&self, p: usize, q: usize, row: usize, col: usize, value: Rational) -> Self {
        let mut out = self.clone();
        out.psi[p][q] = out.psi[p][q].with_entry(row, col, value);
        out
    }
}

fn alternating(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Builds and verifies the double complex in the window `(p_max, q_max)`.
pub fn assemble(l: &LaGroupoid, p_max: usize, q_max: usize) -> Result<DoubleComplex, DcxError> {
    let c = assemble_with_signs(l, p_max, q_max, alternating)?;
    verify_double_complex(&c)?;
    Ok(c)
}

/// Builds without verification, weighting face `i` by `sign(i)` in `δ`.
pub fn assemble_with_signs<S>(l: &LaGroupoid, p_max: usize, q_max: usize, sign: S) -> Result<DoubleComplex, DcxError>
where
    S: Fn(usize) -> i64 + Sync,
{
    let nerves: Vec<NerveAlgebroid> =
        (0..=q_max).into_par_iter().map(|q| nerve_algebroid(l, q)).collect::<Result<_, _>>()?;
    // faces[q][i][tuple] for q ≥ 1
    let faces: Vec<Vec<Vec<SparseMatrix>>> = (0..=q_max)
        .into_par_iter()
        .map(|q| {
            if q == 0 {
                return Ok(Vec::new());
            }
            (0..=q).map(|i| face_matrices(l, &nerves[q], &nerves[q - 1], i)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, NerveError>>()?;
    let fields: Vec<_> = nerves.iter().map(lifted_field_of).collect();
    let block_dim = |p: usize, q: usize| -> Vec<usize> {
        nerves[q].fibers.iter().map(|f| exterior_basis(f.dim(), p).len()).collect()
    };
    let offsets = |sizes: &[usize]| -> Vec<usize> {
        let mut o = vec![0];
        for s in sizes {
            o.push(o.last().unwrap() + s);
        }
        o
    };
    let sizes: Vec<Vec<Vec<usize>>> = (0..=p_max).map(|p| (0..=q_max).map(|q| block_dim(p, q)).collect()).collect();
    let dims: Vec<Vec<usize>> = sizes.iter().map(|r| r.iter().map(|s| s.iter().sum()).collect()).collect();

    let cells: Vec<(usize, usize)> = (0..=p_max).flat_map(|p| (0..=q_max).map(move |q| (p, q))).collect();
    let deltas: Vec<SparseMatrix> = cells
        .par_iter()
        .map(|&(p, q)| {
            if q == 0 {
                return SparseMatrix::zeros(dims[p][0], 0);
            }
            let (row_off, col_off) = (offsets(&sizes[p][q]), offsets(&sizes[p][q - 1]));
            let mut trip = Vec::new();
            for (i, per_tuple) in faces[q].iter().enumerate() {
                let s = rat(sign(i));
                for (k, f) in per_tuple.iter().enumerate() {
                    let down = fingroupoid::face(l.base(), q, i, &nerves[q].fibers[k].tuple).expect("valid face");
                    let j = nerves[q - 1].level.position(&down).expect("face in nerve");
                    let block = pullback_matrix(f, p);
                    trip.extend(block.triplets().map(|(r, c, x)| (r + row_off[k], c + col_off[j], x * &s)));
                }
            }
            SparseMatrix::from_triplets(dims[p][q], dims[p][q - 1], trip)
        })
        .collect();
    let psis: Vec<SparseMatrix> = cells
        .par_iter()
        .filter(|&&(p, _)| p < p_max)
        .map(|&(p, q)| {
            let blocks: Vec<SparseMatrix> = fields[q].fields.iter().map(|d| derivation_matrix(d, p)).collect();
            crate::laq::block_diag(&blocks)
        })
        .collect();
    let mut delta = vec![Vec::with_capacity(q_max + 1); p_max + 1];
    for (&(p, _), m) in cells.iter().zip(deltas) {
        delta[p].push(m);
    }
    let mut psi = vec![Vec::with_capacity(q_max + 1); p_max];
    for (&(p, _), m) in cells.iter().filter(|(p, _)| *p < p_max).zip(psis) {
        psi[p].push(m);
    }
    Ok(DoubleComplex { p_max, q_max, dims, delta, psi })
}

fn first_nonzero(m: &SparseMatrix) -> Option<(usize, usize, Rational)> {
    m.triplets().next().map(|(r, c, x)| (r, c, x.clone()))
}

fn require_zero(m: SparseMatrix, identity: &str, p: usize, q: usize) -> Result<(), IdentityViolation> {
    match first_nonzero(&m) {
        None => Ok(()),
        Some((row, col, value)) => Err(IdentityViolation { identity: identity.into(), p, q, row, col, value }),
    }
}

/// Checks `δ² = 0`, `ψ² = 0`, `ψδ = δψ` and `D² = 0` in every block of the window.
pub fn verify_double_complex(c: &DoubleComplex) -> Result<(), IdentityViolation> {
    let (pm, qm) = c.window();
    for p in 0..=pm {
        for q in 1..qm {
            require_zero(c.delta(p, q + 1).mul(c.delta(p, q)).expect("shapes"), "δ∘δ = 0", p, q + 1)?;
        }
    }
    for p in 0..pm.saturating_sub(1) {
        for q in 0..=qm {
            require_zero(c.psi(p + 1, q).mul(c.psi(p, q)).expect("shapes"), "ψ∘ψ = 0", p + 2, q)?;
        }
    }
    for p in 0..pm {
        for q in 1..=qm {
            let lhs = c.psi(p, q).mul(c.delta(p, q)).expect("shapes");
            let rhs = c.delta(p + 1, q).mul(c.psi(p, q - 1)).expect("shapes");
            require_zero(lhs.sub(&rhs).expect("shapes"), "ψ∘δ = δ∘ψ", p + 1, q)?;
        }
    }
    let top = pm.min(qm);
    for n in 0..top.saturating_sub(1) {
        let dd = total_matrix(c, n + 1).and_then(|b| Ok(b.mul(&total_matrix(c, n)?).expect("shapes")));
        require_zero(dd.expect("inside the window"), "D∘D = 0", n + 2, 0)?;
    }
    Ok(())
}

/// Offsets of the components `C^{p, n−p}`, `p = 0..=n`, inside `T^n`.
fn total_offsets(c: &DoubleComplex, n: usize) -> Vec<usize> {
    let mut o = vec![0];
    for p in 0..=n {
        o.push(o.last().unwrap() + c.dim(p, n - p));
    }
    o
}

pub fn total_dim(c: &DoubleComplex, n: usize) -> usize {
    (0..=n).map(|p| c.dim(p, n - p)).sum()
}

/// `D = ψ + (−1)^p δ: T^n → T^{n+1}`.
pub fn total_matrix(c: &DoubleComplex, n: usize) -> Result<SparseMatrix, DcxError> {
    let (pm, qm) = c.window();
    if n + 1 > pm.min(qm) {
        return Err(DcxError::WindowTooSmall { needed: (n + 1, n + 1), window: (pm, qm) });
    }
    let (src, tgt) = (total_offsets(c, n), total_offsets(c, n + 1));
    let mut trip = Vec::new();
    for p in 0..=n {
        let q = n - p;
        // ψ lands in component p + 1 of T^{n+1}, δ in component p
        trip.extend(c.psi(p, q).triplets().map(|(r, col, x)| (r + tgt[p + 1], col + src[p], x.clone())));
        let s = rat(alternating(p));
        trip.extend(c.delta(p, q + 1).triplets().map(|(r, col, x)| (r + tgt[p], col + src[p], x * &s)));
    }
    Ok(SparseMatrix::from_triplets(tgt[n + 2], src[n + 1], trip))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub dims: Vec<usize>,
    pub window: (usize, usize),
}

/// `dim H^n` of the total complex for `n ≤ top`.
pub fn total_cohomology(c: &DoubleComplex, top: usize) -> Result<CohomologyTable, DcxError> {
    let (pm, qm) = c.window();
    if pm < top + 1 || qm < top + 1 {
        return Err(DcxError::WindowTooSmall { needed: (top + 1, top + 1), window: (pm, qm) });
    }
    let ranks: Vec<usize> =
        (0..=top).into_par_iter().map(|n| total_matrix(c, n).map(|m| rank(&m))).collect::<Result<_, _>>()?;
    let dims = (0..=top)
        .map(|n| total_dim(c, n) - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] })
        .collect();
    Ok(CohomologyTable { dims, window: (pm, qm) })
}

/// One page of a spectral sequence; `dims[p][q]` is meaningful only where `valid[p][q]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPage {
    pub page: u8,
    pub orientation: Orientation,
    pub dims: Vec<Vec<usize>>,
    pub valid: Vec<Vec<bool>>,
}

impl SpectralPage {
    pub fn get(&self, p: usize, q: usize) -> Option<usize> {
        self.valid.get(p).and_then(|r| r.get(q)).and_then(|&v| v.then(|| self.dims[p][q]))
    }
}

struct Orient<'a> {
    c: &'a DoubleComplex,
    o: Orientation,
}

impl Orient<'_> {
    /// First differential out of `(p,q)`.
    fn first_out(&self, p: usize, q: usize) -> Option<&SparseMatrix> {
        let (pm, qm) = self.c.window();
        match self.o {
            Orientation::DeltaFirst => (q < qm).then(|| self.c.delta(p, q + 1)),
            Orientation::PsiFirst => (p < pm).then(|| self.c.psi(p, q)),
        }
    }

    /// First differential into `(p,q)`.
    fn first_in(&self, p: usize, q: usize) -> Option<&SparseMatrix> {
        match self.o {
            Orientation::DeltaFirst => (q > 0).then(|| self.c.delta(p, q)),
            Orientation::PsiFirst => (p > 0).then(|| self.c.psi(p - 1, q)),
        }
    }

    /// Second differential out of `(p,q)` and the cell it lands in.
    fn second_out(&self, p: usize, q: usize) -> Option<(&SparseMatrix, (usize, usize))> {
        let (pm, qm) = self.c.window();
        match self.o {
            Orientation::DeltaFirst => (p < pm).then(|| (self.c.psi(p, q), (p + 1, q))),
            Orientation::PsiFirst => (q < qm).then(|| (self.c.delta(p, q + 1), (p, q + 1))),
        }
    }

    /// The cell whose second differential lands in `(p,q)`.
    fn second_source(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        match self.o {
            Orientation::DeltaFirst => (p > 0).then(|| (p - 1, q)),
            Orientation::PsiFirst => (q > 0).then(|| (p, q - 1)),
        }
    }

    fn cycles(&self, p: usize, q: usize) -> Option<Subspace> {
        self.first_out(p, q).map(kernel)
    }

    fn boundaries(&self, p: usize, q: usize) -> Subspace {
        match self.first_in(p, q) {
            Some(m) => exactla::image(m),
            None => Subspace::zero(self.c.dim(p, q)),
        }
    }
}

fn grid(c: &DoubleComplex) -> Vec<(usize, usize)> {
    let (pm, qm) = c.window();
    (0..=pm).flat_map(|p| (0..=qm).map(move |q| (p, q))).collect()
}

fn page_from_cells(c: &DoubleComplex, page: u8, orientation: Orientation, cells: Vec<Option<usize>>) -> SpectralPage {
    let (pm, qm) = c.window();
    let mut dims = vec![vec![0; qm + 1]; pm + 1];
    let mut valid = vec![vec![false; qm + 1]; pm + 1];
    for ((p, q), v) in grid(c).into_iter().zip(cells) {
        if let Some(d) = v {
            dims[p][q] = d;
            valid[p][q] = true;
        }
    }
    SpectralPage { page, orientation, dims, valid }
}

/// Cohomology with respect to the first differential; the outermost band is masked.
pub fn e1_page(c: &DoubleComplex, orientation: Orientation) -> SpectralPage {
    let o = Orient { c, o: orientation };
    let cells = grid(c)
        .par_iter()
        .map(|&(p, q)| o.cycles(p, q).map(|z| z.dim() - o.boundaries(p, q).dim()))
        .collect();
    page_from_cells(c, 1, orientation, cells)
}

/// Cohomology of the first page under the induced differential; two bands are masked.
pub fn e2_page(c: &DoubleComplex, orientation: Orientation) -> SpectralPage {
    let o = Orient { c, o: orientation };
    let cells = grid(c)
        .par_iter()
        .map(|&(p, q)| {
            let z = o.cycles(p, q)?;
            let (d, next) = o.second_out(p, q)?;
            let z2 = exactla::intersect(&z, &exactla::preimage(d, &o.boundaries(next.0, next.1)).ok()?).ok()?;
            let mut b2 = o.boundaries(p, q);
            if let Some((sp, sq)) = o.second_source(p, q) {
                let (d_in, _) = o.second_out(sp, sq).expect("source maps here");
                let z_prev = o.cycles(sp, sq).expect("source cycles exist inside the valid band");
                b2 = b2.sum(&z_prev.map(d_in).ok()?).ok()?;
            }
            exactla::subquotient_dim(&z2, &b2).ok()
        })
        .collect();
    page_from_cells(c, 2, orientation, cells)
}

/// Linear operators on every block, one family per group generator:
/// `generators[k][p][q]` acts on `C^{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainAction {
    pub generators: Vec<Vec<Vec<SparseMatrix>>>,
}

impl CochainAction {
    pub fn trivial(c: &DoubleComplex) -> Self {
        let ops = c.dims.iter().map(|r| r.iter().map(|&d| SparseMatrix::identity(d)).collect()).collect();
        CochainAction { generators: vec![ops] }
    }
}

/// The action on cochains induced by a base-preserving automorphism:
/// `side[x]` on `A_x` and `top[g]` on `Ω_g`, applied componentwise on nerve fibers.
pub fn automorphism_action(
    l: &LaGroupoid,
    window: (usize, usize),
    side: &[SparseMatrix],
    top: &[SparseMatrix],
) -> Result<Vec<Vec<SparseMatrix>>, DcxError> {
    let (pm, qm) = window;
    let mut ops = vec![Vec::with_capacity(qm + 1); pm + 1];
    for q in 0..=qm {
        let nerve = nerve_algebroid(l, q)?;
        let restricted = nerve
            .fibers
            .iter()
            .map(|f| {
                let ambient = match f.tuple.as_object() {
                    Some(x) => side[x].clone(),
                    None => crate::laq::block_diag(&f.tuple.components().iter().map(|&g| top[g].clone()).collect::<Vec<_>>()),
                };
                let cols = f
                    .subspace
                    .basis()
                    .iter()
                    .map(|b| f.subspace.coordinates(&ambient.mul_vec(b)).map(|v| SparseVec::from_dense(&v)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| DcxError::ActionNotCompatible {
                        generator: 0,
                        block: (0, q),
                        detail: format!("fiber over {} is not preserved", f.tuple.display(l.base())),
                    })?;
                Ok(SparseMatrix::from_columns(f.dim(), &cols))
            })
            .collect::<Result<Vec<_>, DcxError>>()?;
        for (p, row) in ops.iter_mut().enumerate() {
            let blocks: Vec<SparseMatrix> = restricted.iter().map(|m| pullback_matrix(m, p)).collect();
            row.push(crate::laq::block_diag(&blocks));
        }
    }
    Ok(ops)
}

fn restrict_to(m: &SparseMatrix, source: &Subspace, target: &Subspace) -> Option<SparseMatrix> {
    let cols = source
        .basis()
        .iter()
        .map(|b| target.coordinates(&m.mul_vec(b)).map(|v| SparseVec::from_dense(&v)))
        .collect::<Option<Vec<_>>>()?;
    Some(SparseMatrix::from_columns(target.dim(), &cols))
}

/// Restricts `c` to the vectors fixed by every generator.
pub fn invariant_subcomplex(c: &DoubleComplex, action: &CochainAction) -> Result<DoubleComplex, DcxError> {
    let (pm, qm) = c.window();
    let incompatible = |k: usize, p: usize, q: usize, detail: &str| DcxError::ActionNotCompatible {
        generator: k,
        block: (p, q),
        detail: detail.to_string(),
    };
    for (k, ops) in action.generators.iter().enumerate() {
        let shaped = ops.len() == pm + 1
            && ops.iter().enumerate().all(|(p, r)| {
                r.len() == qm + 1 && r.iter().enumerate().all(|(q, m)| m.rows() == c.dim(p, q) && m.cols() == c.dim(p, q))
            });
        if !shaped {
            return Err(incompatible(k, 0, 0, "operators do not match the block grid"));
        }
        for p in 0..=pm {
            for q in 0..=qm {
                if q > 0 && ops[p][q].mul(c.delta(p, q)).ok() != c.delta(p, q).mul(&ops[p][q - 1]).ok() {
                    return Err(incompatible(k, p, q, "does not commute with δ"));
                }
                if p < pm && ops[p + 1][q].mul(c.psi(p, q)).ok() != c.psi(p, q).mul(&ops[p][q]).ok() {
                    return Err(incompatible(k, p, q, "does not commute with ψ"));
                }
            }
        }
    }
    let inv: Vec<Vec<Subspace>> = (0..=pm)
        .map(|p| {
            (0..=qm)
                .map(|q| {
                    let n = c.dim(p, q);
                    let rows: Vec<SparseVec> = action
                        .generators
                        .iter()
                        .flat_map(|ops| {
                            let shifted = ops[p][q].sub(&SparseMatrix::identity(n)).expect("square");
                            (0..n).map(move |r| shifted.row(r))
                        })
                        .collect();
                    kernel(&SparseMatrix::from_rows(n, &rows))
                })
                .collect()
        })
        .collect();
    let dims = inv.iter().map(|r| r.iter().map(Subspace::dim).collect()).collect();
    let mut delta = Vec::with_capacity(pm + 1);
    for p in 0..=pm {
        let mut row = vec![SparseMatrix::zeros(inv[p][0].dim(), 0)];
        for q in 1..=qm {
            row.push(restrict_to(c.delta(p, q), &inv[p][q - 1], &inv[p][q]).ok_or_else(|| incompatible(0, p, q, "δ leaves the invariants"))?);
        }
        delta.push(row);
    }
    let mut psi = Vec::with_capacity(pm);
    for p in 0..pm {
        let row = (0..=qm)
            .map(|q| restrict_to(c.psi(p, q), &inv[p][q], &inv[p + 1][q]).ok_or_else(|| incompatible(0, p, q, "ψ leaves the invariants")))
            .collect::<Result<Vec<_>, _>>()?;
        psi.push(row);
    }
    Ok(DoubleComplex::from_blocks(pm, qm, dims, delta, psi).expect("restricted shapes are consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{constant_bundle, equivariant, pair_zero, trivial_algebroid, trivial_groupoid, GroupActionOnBundle};
    use crate::fingroupoid::FiniteGroupoid;
    use crate::liealg::{ce_cohomology_dims, LieAlgebra};

    fn point(fiber: &LieAlgebra) -> LaGroupoid {
        trivial_algebroid(&constant_bundle(&["*"], fiber))
    }

    fn swap_model() -> LaGroupoid {
        let swap = SparseMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let action = GroupActionOnBundle::over_point(FiniteGroupoid::cyclic(2), |g| {
            if g == 0 {
                SparseMatrix::identity(2)
            } else {
                swap.clone()
            }
        });
        equivariant(&constant_bundle(&["*"], &LieAlgebra::abelian(2)), &action).unwrap()
    }

    #[test]
    fn trivial_algebroid_alternation() {
        let c = assemble(&point(&LieAlgebra::abelian(2)), 2, 4).unwrap();
        for p in 0..=2 {
            for q in 1..=4 {
                let expected = if q % 2 == 0 { SparseMatrix::identity(c.dim(p, q)) } else { SparseMatrix::zeros(c.dim(p, q), c.dim(p, q)) };
                assert_eq!(*c.delta(p, q), expected, "δ at ({p},{q})");
            }
        }
    }

    #[test]
    fn trivial_groupoid_blocks_vanish_off_p0() {
        let c = assemble(&trivial_groupoid(&FiniteGroupoid::cyclic(2)), 3, 3).unwrap();
        for q in 0..=3 {
            assert_eq!(c.dim(0, q), 1 << q);
            assert_eq!(c.dim(1, q), 0);
        }
        assert_eq!(total_cohomology(&c, 2).unwrap().dims, vec![1, 0, 0]);
    }

    #[test]
    fn collapse_examples() {
        for (alg, top) in [(LieAlgebra::abelian(2), 3), (LieAlgebra::sl2(), 3), (LieAlgebra::heisenberg(), 3)] {
            let c = assemble(&point(&alg), top + 1, top + 1).unwrap();
            assert_eq!(total_cohomology(&c, top).unwrap().dims, ce_cohomology_dims(&alg, top));
        }
        let c = assemble(&pair_zero(&["a".into(), "b".into()]).unwrap(), 3, 3).unwrap();
        assert_eq!(total_cohomology(&c, 2).unwrap().dims, vec![1, 0, 0]);
    }

    #[test]
    fn zero_degree_map_on_abelian() {
        let c = assemble(&point(&LieAlgebra::abelian(2)), 2, 2).unwrap();
        let d0 = total_matrix(&c, 0).unwrap();
        assert_eq!((d0.rows(), d0.cols()), (3, 1));
        assert!(d0.is_zero());
        assert!(matches!(total_matrix(&c, 2), Err(DcxError::WindowTooSmall { .. })));
        assert!(matches!(total_cohomology(&c, 2), Err(DcxError::WindowTooSmall { .. })));
    }

    #[test]
    fn zero_complex() {
        let z = DoubleComplex::zero(3, 3);
        assert_eq!(verify_double_complex(&z), Ok(()));
        assert_eq!(total_cohomology(&z, 2).unwrap().dims, vec![0, 0, 0]);
        assert!(e1_page(&z, Orientation::DeltaFirst).dims.iter().flatten().all(|&d| d == 0));
        assert!(e2_page(&z, Orientation::PsiFirst).dims.iter().flatten().all(|&d| d == 0));
        assert!(total_matrix(&z, 1).unwrap().is_zero());
    }

    #[test]
    fn corrupted_delta_is_named() {
        let c = assemble(&point(&LieAlgebra::abelian(2)), 2, 3).unwrap();
        // δ^1 = 0 on C^{0,0}; a nonzero entry survives δ^2 = id
        let bad = c.with_delta_entry(0, 1, 0, 0, rat(1));
        let err = verify_double_complex(&bad).unwrap_err();
        assert_eq!((err.identity.as_str(), err.p, err.q), ("δ∘δ = 0", 0, 2));
        let unsigned = assemble_with_signs(&point(&LieAlgebra::abelian(2)), 3, 3, |_| 1).unwrap();
        assert!(verify_double_complex(&unsigned).is_err());
    }

    #[test]
    fn pages_of_trivial_sl2() {
        let c = assemble(&point(&LieAlgebra::sl2()), 4, 3).unwrap();
        let e1 = e1_page(&c, Orientation::DeltaFirst);
        for p in 0..=4 {
            assert_eq!(e1.get(p, 0), Some([1, 3, 3, 1, 0][p]));
            assert_eq!(e1.get(p, 1), Some(0));
            assert_eq!(e1.get(p, 3), None);
        }
        let e2 = e2_page(&c, Orientation::DeltaFirst);
        for p in 0..4 {
            assert_eq!(e2.get(p, 0), Some([1, 0, 0, 1][p]));
            assert_eq!(e2.get(p, 2), Some(0));
        }
        assert_eq!(e2.get(4, 0), None);
        let psi_first = e1_page(&c, Orientation::PsiFirst);
        assert_eq!(psi_first.get(4, 0), None);
        assert_eq!(psi_first.get(3, 0), Some(1));
    }

    #[test]
    fn equivariant_swap_pages_and_invariants() {
        let l = swap_model();
        let c = assemble(&l, 3, 3).unwrap();
        assert_eq!(total_cohomology(&c, 2).unwrap().dims, vec![1, 1, 0]);
        let e1 = e1_page(&c, Orientation::DeltaFirst);
        assert_eq!((0..3).map(|p| e1.get(p, 0).unwrap()).collect::<Vec<_>>(), vec![1, 1, 0]);
        assert!((0..=3).all(|p| (1..3).all(|q| e1.get(p, q) == Some(0))));
        let e2 = e2_page(&c, Orientation::DeltaFirst);
        assert_eq!((0..3).map(|p| e2.get(p, 0).unwrap()).collect::<Vec<_>>(), vec![1, 1, 0]);

        let swap = SparseMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let ops = automorphism_action(&l, c.window(), &[swap.clone()], &[swap.clone(), swap]).unwrap();
        let inv = invariant_subcomplex(&c, &CochainAction { generators: vec![ops] }).unwrap();
        assert_eq!((0..3).map(|p| inv.dim(p, 0)).collect::<Vec<_>>(), vec![1, 1, 0]);
        assert_eq!(verify_double_complex(&inv), Ok(()));
        assert_eq!(total_cohomology(&inv, 2).unwrap().dims, vec![1, 1, 0]);
    }

    #[test]
    fn trivial_action_changes_nothing() {
        let c = assemble(&point(&LieAlgebra::heisenberg()), 3, 3).unwrap();
        assert_eq!(invariant_subcomplex(&c, &CochainAction::trivial(&c)).unwrap(), c);
    }

    #[test]
    fn incompatible_action_is_rejected() {
        let l = point(&LieAlgebra::abelian(2));
        let c = assemble(&l, 2, 2).unwrap();
        let scale = SparseMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        let mut ops = automorphism_action(&l, c.window(), &[scale.clone()], &[scale]).unwrap();
        ops[1][1] = SparseMatrix::identity(c.dim(1, 1));
        let err = invariant_subcomplex(&c, &CochainAction { generators: vec![ops] }).unwrap_err();
        assert!(matches!(err, DcxError::ActionNotCompatible { .. }));
    }
}
