//! LA-groupoids with zero anchors over finite groupoids, their nerve
//! algebroids, and the lifted Chevalley–Eilenberg fields.
//!
//! All linear maps are stored as `target × source` matrices. Elements of a
//! nerve fiber `Ω^(q)_ḡ` are tuples `(v_1, …, v_q)` with `v_i ∈ Ω_{g_i}` and
//! `src_lin(v_i) = tgt_lin(v_{i+1})`; level 0 is the side bundle `A`.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::{self, rank, Rational, SparseMatrix, SparseVec, Subspace};
use crate::fingroupoid::{self, validate_groupoid, ComposableTuple, FiniteGroupoid, GroupoidError, NerveLevel};
use crate::liealg::{check_lie_morphism, is_related, LieAlgebra, LieFiberBundle, RelatednessFailure, StructureConstants};
use crate::superalg::{is_homological, DerivationSpec};

/// Which family of checks produced a [`LaFailure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LaCheck {
    Base,
    Fibers,
    Shapes,
    /// (a) projections are surjective Lie morphisms.
    Projections,
    /// (b) groupoid laws on fiber products.
    GroupoidLaws,
    /// (c) multiplication is a Lie morphism on the fiber product.
    Multiplication,
    /// (d) unit and inverse maps are Lie morphisms.
    UnitInverse,
}

impl LaCheck {
    pub fn tag(self) -> &'static str {
        match self {
            LaCheck::Base => "base",
            LaCheck::Fibers => "fibers",
            LaCheck::Shapes => "shapes",
            LaCheck::Projections => "a",
            LaCheck::GroupoidLaws => "b",
            LaCheck::Multiplication => "c",
            LaCheck::UnitInverse => "d",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("check ({}) failed at {location}: {detail}", .check.tag())]
pub struct LaFailure {
    pub check: LaCheck,
    pub location: String,
    pub detail: String,
}

impl LaFailure {
    fn new(check: LaCheck, location: impl Into<String>, detail: impl ToString) -> Self {
        LaFailure { check, location: location.into(), detail: detail.to_string() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error(transparent)]
    Index(#[from] GroupoidError),
    #[error("level {level} fiber over {tuple} is not closed under the bracket of e{} and e{}", .pair.0 + 1, .pair.1 + 1)]
    NotClosed { level: usize, tuple: String, pair: (usize, usize) },
    #[error("face σ_{face} at level {level} sends the fiber over {tuple} outside its target fiber")]
    FaceOutside { level: usize, face: usize, tuple: String },
}

/// The raw data of an LA-groupoid. See [`LaGroupoid`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaParts {
    pub base: FiniteGroupoid,
    /// `A`, over objects.
    pub side: LieFiberBundle,
    /// `Ω`, over arrows.
    pub top: LieFiberBundle,
    /// `Ω_g → A_{s(g)}`.
    pub src_lin: Vec<SparseMatrix>,
    /// `Ω_g → A_{t(g)}`.
    pub tgt_lin: Vec<SparseMatrix>,
    /// `Ω_g ⊕ Ω_h → Ω_{gh}` for every composable `(g, h)`.
    pub mult_lin: HashMap<(usize, usize), SparseMatrix>,
    /// `A_x → Ω_{1_x}`.
    pub unit_lin: Vec<SparseMatrix>,
    /// `Ω_g → Ω_{g⁻¹}`.
    pub inv_lin: Vec<SparseMatrix>,
}

/// An LA-groupoid whose maps have consistent shapes. Construction does not
/// run the algebraic checks; call [`validate_la`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaGroupoid {
    parts: LaParts,
}

impl LaGroupoid {
    pub fn from_parts(parts: LaParts) -> Result<Self, LaFailure> {
        let g = &parts.base;
        let shape = |what: &str, label: &str| LaFailure::new(LaCheck::Shapes, format!("{what}[{label}]"), "wrong shape");
        if parts.side.len() != g.object_count() {
            return Err(LaFailure::new(LaCheck::Shapes, "A", "one fiber per object required"));
        }
        if parts.top.len() != g.arrow_count() {
            return Err(LaFailure::new(LaCheck::Shapes, "Ω", "one fiber per arrow required"));
        }
        let a = |x: usize| parts.side.fiber(x).dim();
        let o = |h: usize| parts.top.fiber(h).dim();
        let fits = |m: &SparseMatrix, r: usize, c: usize| m.rows() == r && m.cols() == c;
        if parts.src_lin.len() != g.arrow_count()
            || parts.tgt_lin.len() != g.arrow_count()
            || parts.inv_lin.len() != g.arrow_count()
            || parts.unit_lin.len() != g.object_count()
        {
            return Err(LaFailure::new(LaCheck::Shapes, "structure maps", "wrong number of maps"));
        }
        for (h, arrow) in g.arrows().iter().enumerate() {
            if !fits(&parts.src_lin[h], a(arrow.src), o(h)) {
                return Err(shape("src_lin", &arrow.label));
            }
            if !fits(&parts.tgt_lin[h], a(arrow.tgt), o(h)) {
                return Err(shape("tgt_lin", &arrow.label));
            }
            if !fits(&parts.inv_lin[h], o(g.inverse(h)), o(h)) {
                return Err(shape("inv_lin", &arrow.label));
            }
        }
        for x in 0..g.object_count() {
            if !fits(&parts.unit_lin[x], o(g.unit(x)), a(x)) {
                return Err(shape("unit_lin", &g.objects()[x]));
            }
        }
        for p in 0..g.arrow_count() {
            for h in 0..g.arrow_count() {
                let Some(ph) = g.compose(p, h) else { continue };
                let label = format!("{},{}", g.arrows()[p].label, g.arrows()[h].label);
                match parts.mult_lin.get(&(p, h)) {
                    Some(m) if fits(m, o(ph), o(p) + o(h)) => {}
                    _ => return Err(shape("mult_lin", &label)),
                }
            }
        }
        Ok(LaGroupoid { parts })
    }

    pub fn parts(&self) -> &LaParts {
        &self.parts
    }

    pub fn into_parts(self) -> LaParts {
        self.parts
    }

    pub fn base(&self) -> &FiniteGroupoid {
        &self.parts.base
    }

    pub fn side(&self) -> &LieFiberBundle {
        &self.parts.side
    }

    pub fn top(&self) -> &LieFiberBundle {
        &self.parts.top
    }

    pub fn src_lin(&self, g: usize) -> &SparseMatrix {
        &self.parts.src_lin[g]
    }

    pub fn tgt_lin(&self, g: usize) -> &SparseMatrix {
        &self.parts.tgt_lin[g]
    }

    pub fn mult_lin(&self, g: usize, h: usize) -> Option<&SparseMatrix> {
        self.parts.mult_lin.get(&(g, h))
    }

    pub fn unit_lin(&self, x: usize) -> &SparseMatrix {
        &self.parts.unit_lin[x]
    }

    pub fn inv_lin(&self, g: usize) -> &SparseMatrix {
        &self.parts.inv_lin[g]
    }

    fn arrow_label(&self, g: usize) -> &str {
        &self.parts.base.arrows()[g].label
    }

    fn top_dim(&self, g: usize) -> usize {
        self.parts.top.fiber(g).dim()
    }

    fn side_dim(&self, x: usize) -> usize {
        self.parts.side.fiber(x).dim()
    }
}

/// Horizontal concatenation `[a | b]`.
pub fn hstack(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    assert_eq!(a.rows(), b.rows(), "hstack row mismatch");
    let shift = a.cols();
    let trip = a
        .triplets()
        .map(|(r, c, x)| (r, c, x.clone()))
        .chain(b.triplets().map(|(r, c, x)| (r, c + shift, x.clone())));
    SparseMatrix::from_triplets(a.rows(), a.cols() + b.cols(), trip)
}

/// Block-diagonal matrix.
pub fn block_diag(blocks: &[SparseMatrix]) -> SparseMatrix {
    let rows = blocks.iter().map(SparseMatrix::rows).sum();
    let cols = blocks.iter().map(SparseMatrix::cols).sum();
    let mut trip = Vec::new();
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        trip.extend(b.triplets().map(|(r, c, x)| (r + r0, c + c0, x.clone())));
        r0 += b.rows();
        c0 += b.cols();
    }
    SparseMatrix::from_triplets(rows, cols, trip)
}

/// Places `m` at block position `(r0, c0)` of a `rows × cols` zero matrix.
fn embed(m: &SparseMatrix, rows: usize, cols: usize, r0: usize, c0: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(rows, cols, m.triplets().map(|(r, c, x)| (r + r0, c + c0, x.clone())))
}

fn morphism_check(
    check: LaCheck,
    location: String,
    source: &LieAlgebra,
    target: &LieAlgebra,
    f: &SparseMatrix,
) -> Result<(), LaFailure> {
    check_lie_morphism(source.constants(), target.constants(), f).map_err(|e| LaFailure::new(check, location, e))
}

/// Runs every structural check. The first failure is returned with its location.
pub fn validate_la(l: &LaGroupoid) -> Result<(), LaFailure> {
    let g = l.base();
    validate_groupoid(g).map_err(|e| LaFailure::new(LaCheck::Base, "groupoid", e))?;
    l.side()
        .validate()
        .map_err(|(x, e)| LaFailure::new(LaCheck::Fibers, format!("A[{}]", g.objects()[x]), e))?;
    l.top()
        .validate()
        .map_err(|(h, e)| LaFailure::new(LaCheck::Fibers, format!("Ω[{}]", l.arrow_label(h)), e))?;

    // (a)
    for h in 0..g.arrow_count() {
        for (name, m, x) in [("src_lin", l.src_lin(h), g.src(h)), ("tgt_lin", l.tgt_lin(h), g.tgt(h))] {
            let loc = format!("{name}[{}]", l.arrow_label(h));
            morphism_check(LaCheck::Projections, loc.clone(), l.top().fiber(h), l.side().fiber(x), m)?;
            if rank(m) != l.side_dim(x) {
                return Err(LaFailure::new(LaCheck::Projections, loc, "not surjective"));
            }
        }
    }

    // (d)
    for x in 0..g.object_count() {
        let loc = format!("unit_lin[{}]", g.objects()[x]);
        morphism_check(LaCheck::UnitInverse, loc, l.side().fiber(x), l.top().fiber(g.unit(x)), l.unit_lin(x))?;
    }
    for h in 0..g.arrow_count() {
        let loc = format!("inv_lin[{}]", l.arrow_label(h));
        morphism_check(LaCheck::UnitInverse, loc, l.top().fiber(h), l.top().fiber(g.inverse(h)), l.inv_lin(h))?;
    }

    check_laws(l)?;

    // (c)
    for (pair, fiber) in fiber_products(l) {
        let (p, h) = pair;
        let m = l.mult_lin(p, h).expect("shape-checked");
        let ph = g.compose(p, h).expect("composable");
        let amb = l.top().fiber(p).constants().direct_sum(l.top().fiber(h).constants());
        let target = l.top().fiber(ph).constants();
        let basis = fiber.basis();
        let loc = format!("mult_lin[{},{}]", l.arrow_label(p), l.arrow_label(h));
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                let lhs = m.mul_vec(&amb.bracket(&basis[a], &basis[b]));
                let rhs = target.bracket(&m.mul_vec(&basis[a]), &m.mul_vec(&basis[b]));
                let defect = lhs.sub(&rhs);
                if !defect.is_zero() {
                    return Err(LaFailure::new(
                        LaCheck::Multiplication,
                        loc,
                        format!("bracket of fiber-product vectors {} and {} has defect {}", basis[a], basis[b], defect),
                    ));
                }
            }
        }
    }
    Ok(())
}

fn fiber_products(l: &LaGroupoid) -> Vec<((usize, usize), Subspace)> {
    let g = l.base();
    fingroupoid::nerve(g, 2)
        .into_iter()
        .map(|t| {
            let c = t.components();
            ((c[0], c[1]), compatibility_subspace(l, c))
        })
        .collect()
}

/// `{(v_1, …, v_q) : src_lin(v_i) = tgt_lin(v_{i+1})}` inside `⊕ Ω_{g_i}`.
pub fn compatibility_subspace(l: &LaGroupoid, comps: &[usize]) -> Subspace {
    let offsets = component_offsets(l, comps);
    let n = *offsets.last().expect("offsets");
    let g = l.base();
    let mut blocks = Vec::new();
    for i in 0..comps.len().saturating_sub(1) {
        let rows = l.side_dim(g.src(comps[i]));
        let left = embed(l.src_lin(comps[i]), rows, n, 0, offsets[i]);
        let right = embed(l.tgt_lin(comps[i + 1]), rows, n, 0, offsets[i + 1]);
        blocks.push(left.sub(&right).expect("same shape"));
    }
    let stacked_rows: Vec<SparseVec> = blocks.iter().flat_map(|b| (0..b.rows()).map(move |r| b.row(r))).collect();
    exactla::kernel(&SparseMatrix::from_rows(n, &stacked_rows))
}

fn component_offsets(l: &LaGroupoid, comps: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0];
    for &c in comps {
        offsets.push(offsets.last().unwrap() + l.top_dim(c));
    }
    offsets
}

fn law_residue(
    location: impl Into<String>,
    law: &str,
    lhs: &SparseVec,
    rhs: &SparseVec,
) -> Result<(), LaFailure> {
    let defect = lhs.sub(rhs);
    if defect.is_zero() {
        Ok(())
    } else {
        Err(LaFailure::new(LaCheck::GroupoidLaws, location, format!("{law}: residue {defect}")))
    }
}

/// (b): endpoint compatibility, associativity, unit and inverse laws.
fn check_laws(l: &LaGroupoid) -> Result<(), LaFailure> {
    let g = l.base();
    for (pair, fiber) in fiber_products(l) {
        let (p, h) = pair;
        let ph = g.compose(p, h).expect("composable");
        let m = l.mult_lin(p, h).expect("shape-checked");
        let op = l.top_dim(p);
        let loc = format!("mult_lin[{},{}]", l.arrow_label(p), l.arrow_label(h));
        for v in fiber.basis() {
            let mv = m.mul_vec(v);
            let (v1, v2) = (v.slice(0, op), v.slice(op, l.top_dim(h)));
            law_residue(&loc, "src ∘ mult = src ∘ pr2", &l.src_lin(ph).mul_vec(&mv), &l.src_lin(h).mul_vec(&v2))?;
            law_residue(&loc, "tgt ∘ mult = tgt ∘ pr1", &l.tgt_lin(ph).mul_vec(&mv), &l.tgt_lin(p).mul_vec(&v1))?;
        }
    }
    for t in fingroupoid::nerve(g, 3) {
        let c = t.components();
        let (a, b, d) = (c[0], c[1], c[2]);
        let (ab, bd) = (g.compose(a, b).expect("composable"), g.compose(b, d).expect("composable"));
        let (oa, ob, od) = (l.top_dim(a), l.top_dim(b), l.top_dim(d));
        let loc = format!("({},{},{})", l.arrow_label(a), l.arrow_label(b), l.arrow_label(d));
        for v in compatibility_subspace(l, c).basis() {
            let (v1, v2, v3) = (v.slice(0, oa), v.slice(oa, ob), v.slice(oa + ob, od));
            let left = l.mult_lin(ab, d).expect("shape-checked").mul_vec(&l.mult_lin(a, b).expect("shape-checked").mul_vec(&v1.concat(&v2)).concat(&v3));
            let right = l.mult_lin(a, bd).expect("shape-checked").mul_vec(&v1.concat(&l.mult_lin(b, d).expect("shape-checked").mul_vec(&v2.concat(&v3))));
            law_residue(&loc, "associativity", &left, &right)?;
        }
    }
    for x in 0..g.object_count() {
        let e = g.unit(x);
        let loc = format!("unit_lin[{}]", g.objects()[x]);
        for i in 0..l.side_dim(x) {
            let v = SparseVec::unit(l.side_dim(x), i);
            let u = l.unit_lin(x).mul_vec(&v);
            law_residue(&loc, "src ∘ unit = id", &l.src_lin(e).mul_vec(&u), &v)?;
            law_residue(&loc, "tgt ∘ unit = id", &l.tgt_lin(e).mul_vec(&u), &v)?;
        }
    }
    for h in 0..g.arrow_count() {
        let (s, t) = (g.src(h), g.tgt(h));
        let (ut, us) = (g.unit(t), g.unit(s));
        let hi = g.inverse(h);
        let loc = l.arrow_label(h).to_string();
        for i in 0..l.top_dim(h) {
            let v = SparseVec::unit(l.top_dim(h), i);
            let tv = l.tgt_lin(h).mul_vec(&v);
            let sv = l.src_lin(h).mul_vec(&v);
            let left_unit = l.mult_lin(ut, h).expect("shape-checked").mul_vec(&l.unit_lin(t).mul_vec(&tv).concat(&v));
            law_residue(&loc, "mult(unit(tgt v), v) = v", &left_unit, &v)?;
            let right_unit = l.mult_lin(h, us).expect("shape-checked").mul_vec(&v.concat(&l.unit_lin(s).mul_vec(&sv)));
            law_residue(&loc, "mult(v, unit(src v)) = v", &right_unit, &v)?;
            let iv = l.inv_lin(h).mul_vec(&v);
            law_residue(&loc, "src ∘ inv = tgt", &l.src_lin(hi).mul_vec(&iv), &tv)?;
            law_residue(&loc, "tgt ∘ inv = src", &l.tgt_lin(hi).mul_vec(&iv), &sv)?;
            let right_inv = l.mult_lin(h, hi).expect("shape-checked").mul_vec(&v.concat(&iv));
            law_residue(&loc, "mult(v, inv v) = unit(tgt v)", &right_inv, &l.unit_lin(t).mul_vec(&tv))?;
            let left_inv = l.mult_lin(hi, h).expect("shape-checked").mul_vec(&iv.concat(&v));
            law_residue(&loc, "mult(inv v, v) = unit(src v)", &left_inv, &l.unit_lin(s).mul_vec(&sv))?;
        }
    }
    Ok(())
}

/// True iff every `src_lin` is a linear isomorphism.
pub fn vacancy_check(l: &LaGroupoid) -> bool {
    (0..l.base().arrow_count()).all(|h| {
        let m = l.src_lin(h);
        m.rows() == m.cols() && rank(m) == m.cols()
    })
}

/// One fiber of a nerve algebroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NerveFiber {
    pub tuple: ComposableTuple,
    /// Start of each component inside the ambient direct sum, plus the total.
    pub offsets: Vec<usize>,
    pub subspace: Subspace,
    /// Induced structure in the canonical subspace basis.
    pub algebra: LieAlgebra,
}

impl NerveFiber {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// The subspace basis as columns of an `ambient × dim` matrix.
    pub fn inclusion(&self) -> SparseMatrix {
        self.subspace.basis_matrix()
    }
}

/// `Ω^(q)` over the level-`q` nerve, in nerve order.
#[derive(Clone, Debug)]
pub struct NerveAlgebroid {
    pub level: NerveLevel,
    pub fibers: Vec<NerveFiber>,
}

impl NerveAlgebroid {
    pub fn q(&self) -> usize {
        self.level.q
    }

    pub fn fiber_of(&self, t: &ComposableTuple) -> Option<&NerveFiber> {
        self.level.position(t).map(|i| &self.fibers[i])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.fibers.iter().map(NerveFiber::dim).collect()
    }
}

fn ambient_constants(l: &LaGroupoid, t: &ComposableTuple) -> StructureConstants {
    match t.as_object() {
        Some(x) => l.side().fiber(x).constants().clone(),
        None => t
            .components()
            .iter()
            .map(|&h| l.top().fiber(h).constants().clone())
            .reduce(|a, b| a.direct_sum(&b))
            .expect("nonempty tuple"),
    }
}

fn build_fiber(l: &LaGroupoid, t: ComposableTuple) -> Result<NerveFiber, NerveError> {
    let (offsets, subspace) = match t.as_object() {
        Some(x) => (vec![0, l.side_dim(x)], Subspace::full(l.side_dim(x))),
        None => (component_offsets(l, t.components()), compatibility_subspace(l, t.components())),
    };
    let amb = ambient_constants(l, &t);
    let basis = subspace.basis();
    let d = basis.len();
    let mut entries = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let w = amb.bracket(&basis[a], &basis[b]);
            let coords = subspace.coordinates(&w).ok_or_else(|| NerveError::NotClosed {
                level: t.level(),
                tuple: t.display(l.base()),
                pair: (a, b),
            })?;
            entries.extend(coords.into_iter().enumerate().filter(|(_, c)| !num_traits::Zero::is_zero(c)).map(|(k, c)| (a, b, k, c)));
        }
    }
    let constants = StructureConstants::from_brackets(d, entries).expect("indices in range");
    Ok(NerveFiber { tuple: t, offsets, subspace, algebra: LieAlgebra::from_constants_unchecked(constants) })
}

/// Builds `Ω^(q)`; fibers are computed independently.
pub fn nerve_algebroid(l: &LaGroupoid, q: usize) -> Result<NerveAlgebroid, NerveError> {
    let level = NerveLevel::new(l.base(), q);
    let fibers = level.tuples.par_iter().map(|t| build_fiber(l, t.clone())).collect::<Result<Vec<_>, _>>()?;
    Ok(NerveAlgebroid { level, fibers })
}

/// Ambient face map `⊕Ω_{g_i} → ⊕Ω_{(σ_i ḡ)_j}` for a tuple at level `q ≥ 1`.
fn ambient_face(l: &LaGroupoid, q: usize, i: usize, t: &ComposableTuple) -> SparseMatrix {
    let c = t.components();
    let dims: Vec<usize> = c.iter().map(|&h| l.top_dim(h)).collect();
    let n: usize = dims.iter().sum();
    if q == 1 {
        return if i == 0 { l.src_lin(c[0]).clone() } else { l.tgt_lin(c[0]).clone() };
    }
    let proj = |lo: usize, hi: usize| {
        let start: usize = dims[..lo].iter().sum();
        let len: usize = dims[lo..hi].iter().sum();
        SparseMatrix::from_triplets(len, n, (0..len).map(|r| (r, start + r, Rational::from_integer(1.into()))))
    };
    if i == 0 {
        return proj(1, q);
    }
    if i == q {
        return proj(0, q - 1);
    }
    let m = l.mult_lin(c[i - 1], c[i]).expect("shape-checked");
    let before = proj(0, i - 1);
    let pair = proj(i - 1, i + 1);
    let after = proj(i + 1, q);
    let merged = m.mul(&pair).expect("shape");
    let rows: Vec<SparseVec> = [before, merged, after]
        .iter()
        .flat_map(|b| (0..b.rows()).map(move |r| b.row(r)).collect::<Vec<_>>())
        .collect();
    SparseMatrix::from_rows(n, &rows)
}

/// Expresses `ambient · (basis of source)` in the basis of `target`.
fn restrict(
    ambient: &SparseMatrix,
    source: &NerveFiber,
    target: &NerveFiber,
) -> Option<SparseMatrix> {
    let cols = source
        .subspace
        .basis()
        .iter()
        .map(|b| target.subspace.coordinates(&ambient.mul_vec(b)).map(|c| SparseVec::from_dense(&c)))
        .collect::<Option<Vec<_>>>()?;
    Some(SparseMatrix::from_columns(target.dim(), &cols))
}

/// Face map `σ_i` on `Ω^(q)` in subspace coordinates, one matrix per tuple
/// in nerve order.
pub fn nerve_face_linear(l: &LaGroupoid, q: usize, i: usize) -> Result<Vec<SparseMatrix>, NerveError> {
    if q == 0 || i > q {
        return Err(GroupoidError::IndexOutOfRange { level: q, index: i }.into());
    }
    let upper = nerve_algebroid(l, q)?;
    let lower = nerve_algebroid(l, q - 1)?;
    face_matrices(l, &upper, &lower, i)
}

/// Face matrices between two precomputed consecutive levels.
pub fn face_matrices(
    l: &LaGroupoid,
    upper: &NerveAlgebroid,
    lower: &NerveAlgebroid,
    i: usize,
) -> Result<Vec<SparseMatrix>, NerveError> {
    let q = upper.q();
    upper
        .fibers
        .par_iter()
        .map(|f| {
            let target_tuple = fingroupoid::face(l.base(), q, i, &f.tuple)?;
            let target = lower.fiber_of(&target_tuple).expect("face lands in the nerve");
            restrict(&ambient_face(l, q, i, &f.tuple), f, target).ok_or_else(|| NerveError::FaceOutside {
                level: q,
                face: i,
                tuple: f.tuple.display(l.base()),
            })
        })
        .collect()
}

/// Degeneracy `Δ_i` on `Ω^(q)` in subspace coordinates: inserts the unit
/// image of the vertex value at `x_i`.
pub fn nerve_degeneracy_linear(l: &LaGroupoid, q: usize, i: usize) -> Result<Vec<SparseMatrix>, NerveError> {
    if i > q {
        return Err(GroupoidError::IndexOutOfRange { level: q, index: i }.into());
    }
    let lower = nerve_algebroid(l, q)?;
    let upper = nerve_algebroid(l, q + 1)?;
    let g = l.base();
    lower
        .fibers
        .iter()
        .map(|f| {
            let t = &f.tuple;
            let up = fingroupoid::degeneracy(g, q, i, t)?;
            let target = upper.fiber_of(&up).expect("degeneracy lands in the nerve");
            let x = t.vertex(g, i);
            let unit = l.unit_lin(x);
            let n = f.ambient_dim();
            let ambient = match t.as_object() {
                Some(_) => unit.clone(),
                None => {
                    let c = t.components();
                    let dims: Vec<usize> = c.iter().map(|&h| l.top_dim(h)).collect();
                    // vertex value: tgt(v_1) at x_0, src(v_i) otherwise
                    let vertex = if i == 0 {
                        embed(l.tgt_lin(c[0]), l.side_dim(x), n, 0, 0)
                    } else {
                        embed(l.src_lin(c[i - 1]), l.side_dim(x), n, 0, f.offsets[i - 1])
                    };
                    let inserted = unit.mul(&vertex).expect("shape");
                    let split: usize = dims[..i].iter().sum();
                    let id = |lo: usize, len: usize| {
                        SparseMatrix::from_triplets(len, n, (0..len).map(|r| (r, lo + r, Rational::from_integer(1.into()))))
                    };
                    let rows: Vec<SparseVec> = [id(0, split), inserted, id(split, n - split)]
                        .iter()
                        .flat_map(|b| (0..b.rows()).map(move |r| b.row(r)).collect::<Vec<_>>())
                        .collect();
                    SparseMatrix::from_rows(n, &rows)
                }
            };
            restrict(&ambient, f, target).ok_or_else(|| NerveError::FaceOutside {
                level: q,
                face: i,
                tuple: t.display(g),
            })
        })
        .collect()
}

/// The Chevalley–Eilenberg field of every fiber at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedField {
    pub q: usize,
    pub fields: Vec<DerivationSpec>,
}

impl LiftedField {
    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(DerivationSpec::is_zero)
    }

    /// Index of the first fiber whose field does not square to zero.
    pub fn first_defect(&self) -> Option<usize> {
        self.fields.iter().position(|d| !is_homological(d).map(|v| v.holds()).unwrap_or(false))
    }
}

pub fn lifted_field_of(nerve: &NerveAlgebroid) -> LiftedField {
    LiftedField { q: nerve.q(), fields: nerve.fibers.iter().map(|f| f.algebra.constants().ce_derivation()).collect() }
}

pub fn lifted_differential(l: &LaGroupoid, q: usize) -> Result<LiftedField, NerveError> {
    Ok(lifted_field_of(&nerve_algebroid(l, q)?))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultiplicativityFailure {
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error("field at level {level} is not related to level {} along σ_{face} over {tuple}: {failure}", .level - 1)]
    Relatedness { level: usize, face: usize, tuple: String, failure: RelatednessFailure },
}

/// Relatedness of `ψ^(1)` to `d_A` along source and target, and of `ψ^(2)`
/// to `ψ^(1)` along the three level-2 faces.
pub fn check_multiplicative(l: &LaGroupoid) -> Result<(), MultiplicativityFailure> {
    check_relatedness_up_to(l, 2)
}

/// Relatedness along every face `σ_i^q` for `1 ≤ q ≤ q_max`.
pub fn check_relatedness_up_to(l: &LaGroupoid, q_max: usize) -> Result<(), MultiplicativityFailure> {
    let mut lower = nerve_algebroid(l, 0)?;
    let mut lower_field = lifted_field_of(&lower);
    for q in 1..=q_max {
        let upper = nerve_algebroid(l, q)?;
        let upper_field = lifted_field_of(&upper);
        for i in 0..=q {
            let faces = face_matrices(l, &upper, &lower, i)?;
            for (k, f) in faces.iter().enumerate() {
                let tuple = &upper.fibers[k].tuple;
                let down = fingroupoid::face(l.base(), q, i, tuple).map_err(NerveError::from)?;
                let target_index = lower.level.position(&down).expect("face in nerve");
                is_related(f, &upper_field.fields[k], &lower_field.fields[target_index]).map_err(|failure| {
                    MultiplicativityFailure::Relatedness { level: q, face: i, tuple: tuple.display(l.base()), failure }
                })?;
            }
        }
        lower = upper;
        lower_field = upper_field;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn trivial(points: usize, fiber: &LieAlgebra) -> LaGroupoid {
        let labels: Vec<String> = (1..=points).map(|i| i.to_string()).collect();
        let base = FiniteGroupoid::identity(&labels).unwrap();
        let n = fiber.dim();
        let id = SparseMatrix::identity(n);
        let mult = hstack(&SparseMatrix::zeros(n, n), &id);
        LaGroupoid::from_parts(LaParts {
            side: LieFiberBundle::constant(labels.clone(), fiber),
            top: LieFiberBundle::constant(base.arrows().iter().map(|a| a.label.clone()).collect(), fiber),
            src_lin: vec![id.clone(); points],
            tgt_lin: vec![id.clone(); points],
            mult_lin: (0..points).map(|x| ((x, x), mult.clone())).collect(),
            unit_lin: vec![id.clone(); points],
            inv_lin: vec![id; points],
            base,
        })
        .unwrap()
    }

    /// One object, one arrow, `A = 0`, `Ω = ℚ`, multiplication `v + w`.
    fn with_core() -> LaGroupoid {
        let base = FiniteGroupoid::from_labels(&["*"], &[("e", "*", "*")], &[("e", "e", "e")], &[("*", "e")], &[("e", "e")])
            .unwrap();
        LaGroupoid::from_parts(LaParts {
            base,
            side: LieFiberBundle::zero(vec!["*".into()]),
            top: LieFiberBundle::constant(vec!["e".into()], &LieAlgebra::abelian(1)),
            src_lin: vec![SparseMatrix::zeros(0, 1)],
            tgt_lin: vec![SparseMatrix::zeros(0, 1)],
            mult_lin: [((0, 0), SparseMatrix::from_i64(&[&[1, 1]]))].into_iter().collect(),
            unit_lin: vec![SparseMatrix::zeros(1, 0)],
            inv_lin: vec![SparseMatrix::from_i64(&[&[-1]])],
        })
        .unwrap()
    }

    #[test]
    fn trivial_squares_validate() {
        for fiber in [LieAlgebra::abelian(2), LieAlgebra::sl2(), LieAlgebra::heisenberg()] {
            let l = trivial(2, &fiber);
            assert_eq!(validate_la(&l), Ok(()));
            assert!(vacancy_check(&l));
            assert_eq!(check_multiplicative(&l), Ok(()));
        }
    }

    #[test]
    fn core_example_is_legal_but_not_vacant() {
        let l = with_core();
        assert_eq!(validate_la(&l), Ok(()));
        assert!(!vacancy_check(&l));
        assert_eq!(nerve_algebroid(&l, 3).unwrap().dims(), vec![3]);
        assert_eq!(check_relatedness_up_to(&l, 3), Ok(()));
    }

    #[test]
    fn broken_laws_are_named() {
        let mut p = with_core().into_parts();
        p.mult_lin.insert((0, 0), SparseMatrix::from_i64(&[&[1, 2]]));
        let l = LaGroupoid::from_parts(p).unwrap();
        assert_eq!(validate_la(&l).unwrap_err().check, LaCheck::GroupoidLaws);

        let mut p = trivial(1, &LieAlgebra::sl2()).into_parts();
        p.tgt_lin[0] = SparseMatrix::identity(3).scale(&rat(2));
        let err = validate_la(&LaGroupoid::from_parts(p).unwrap()).unwrap_err();
        assert_eq!(err.check, LaCheck::Projections);
        assert!(err.to_string().starts_with("check (a) failed at tgt_lin[1_1]"));

        let mut p = trivial(1, &LieAlgebra::abelian(2)).into_parts();
        p.src_lin[0] = SparseMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(validate_la(&LaGroupoid::from_parts(p).unwrap()).unwrap_err().check, LaCheck::Projections);

        let mut p = trivial(1, &LieAlgebra::abelian(2)).into_parts();
        p.unit_lin.pop();
        assert_eq!(LaGroupoid::from_parts(p).unwrap_err().check, LaCheck::Shapes);
    }

    #[test]
    fn low_levels_are_side_and_top() {
        let l = trivial(2, &LieAlgebra::sl2());
        let n0 = nerve_algebroid(&l, 0).unwrap();
        assert_eq!(n0.fibers[1].algebra, *l.side().fiber(1));
        let n1 = nerve_algebroid(&l, 1).unwrap();
        assert_eq!(n1.fibers[0].algebra, *l.top().fiber(0));
        let n2 = nerve_algebroid(&l, 2).unwrap();
        // the diagonal copy of sl2
        assert_eq!(n2.dims(), vec![3, 3]);
        assert_eq!(n2.fibers[0].algebra.constants(), l.side().fiber(0).constants());
    }

    #[test]
    fn faces_at_levels_one_and_two() {
        let l = trivial(1, &LieAlgebra::heisenberg());
        assert_eq!(nerve_face_linear(&l, 1, 0).unwrap()[0], *l.src_lin(0));
        assert_eq!(nerve_face_linear(&l, 1, 1).unwrap()[0], *l.tgt_lin(0));
        for i in 0..3 {
            assert_eq!(nerve_face_linear(&l, 2, i).unwrap()[0], SparseMatrix::identity(3));
        }
        assert!(matches!(nerve_face_linear(&l, 2, 3), Err(NerveError::Index(_))));

        let l = with_core();
        assert_eq!(nerve_face_linear(&l, 2, 1).unwrap()[0], SparseMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(nerve_face_linear(&l, 2, 2).unwrap()[0], SparseMatrix::from_i64(&[&[1, 0]]));
        assert_eq!(nerve_face_linear(&l, 2, 0).unwrap()[0], SparseMatrix::from_i64(&[&[0, 1]]));
    }

    #[test]
    fn face_degeneracy_identities() {
        for l in [with_core(), trivial(2, &LieAlgebra::sl2())] {
            for q in 0..3 {
                for i in 0..=q {
                    let deg = nerve_degeneracy_linear(&l, q, i).unwrap();
                    for j in [i, i + 1] {
                        let face = nerve_face_linear(&l, q + 1, j).unwrap();
                        let lower = nerve_algebroid(&l, q).unwrap();
                        let upper = nerve_algebroid(&l, q + 1).unwrap();
                        for (k, f) in lower.fibers.iter().enumerate() {
                            let up = fingroupoid::degeneracy(l.base(), q, i, &f.tuple).unwrap();
                            let pos = upper.level.position(&up).unwrap();
                            let composite = face[pos].mul(&deg[k]).unwrap();
                            assert_eq!(composite, SparseMatrix::identity(f.dim()), "σ_{j} Δ_{i} at q={q}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mutations_break_relatedness() {
        let base = trivial(1, &LieAlgebra::sl2());
        let mut p = base.parts().clone();
        let bad = StructureConstants::from_i64(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 2)]);
        p.top = p.top.with_fiber(0, LieAlgebra::from_constants_unchecked(bad.clone()));
        let l = LaGroupoid::from_parts(p).unwrap();
        assert!(matches!(check_multiplicative(&l), Err(MultiplicativityFailure::Relatedness { level: 1, .. })));

        let mut p = base.parts().clone();
        p.side = p.side.with_fiber(0, LieAlgebra::from_constants_unchecked(bad));
        assert!(check_multiplicative(&LaGroupoid::from_parts(p).unwrap()).is_err());

        let mut p = base.parts().clone();
        p.tgt_lin[0] = p.tgt_lin[0].scale(&rat(2));
        let err = check_multiplicative(&LaGroupoid::from_parts(p).unwrap()).unwrap_err();
        assert!(matches!(err, MultiplicativityFailure::Relatedness { level: 1, face: 1, .. }));
    }

    #[test]
    fn lifted_fields_are_homological() {
        let l = trivial(2, &LieAlgebra::heisenberg());
        for q in 0..4 {
            let f = lifted_differential(&l, q).unwrap();
            assert_eq!(f.first_defect(), None);
            assert!(!f.is_zero());
        }
        assert!(lifted_differential(&with_core(), 2).unwrap().is_zero());
        assert_eq!(check_relatedness_up_to(&l, 4), Ok(()));
    }
}
