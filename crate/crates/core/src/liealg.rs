//! Lie algebras given by structure constants, bundles of them over finite
//! sets, and the Chevalley–Eilenberg differential.
//!
//! Over a finite base the anchor of a Lie algebroid has nowhere to land
//! (there are no nonzero vector fields on a finite set), so the Leibniz rule
//! makes the bracket fiberwise: a Lie algebroid over a finite set is exactly a
//! bundle of Lie algebras, one per point. [`LieFiberBundle`] records that.
//!
//! The CE convention used throughout is `(dλ)(X, Y) = −λ([X, Y])` on
//! 1-forms, extended to higher forms by the graded Leibniz rule.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{self, rat, Rational, SparseMatrix, SparseVec};
use crate::superalg::{
    self, derivation_matrix, exterior_basis, DerivationSpec, Element, ExteriorFrame, Monomial, SuperalgError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("bracket entry ({i}, {j}, {k}) must satisfy 1 ≤ i < j ≤ {dim} and 1 ≤ k ≤ {dim}")]
    BadBracketIndex { i: usize, j: usize, k: usize, dim: usize },
    #[error(transparent)]
    Jacobi(#[from] JacobiFailure),
    #[error(transparent)]
    Superalg(#[from] SuperalgError),
}

/// Jacobiator of a basis triple (0-based indices) that fails to vanish.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("Jacobi identity fails on (e{}, e{}, e{}): defect {defect}", .triple.0 + 1, .triple.1 + 1, .triple.2 + 1)]
pub struct JacobiFailure {
    pub triple: (usize, usize, usize),
    pub defect: SparseVec,
}

/// Raw structure constants `[e_i, e_j] = Σ_k c[i][j][k] e_k` with antisymmetry
/// materialized. No Jacobi guarantee.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureConstants {
    dim: usize,
    table: Vec<Rational>,
}

impl StructureConstants {
    pub fn abelian(dim: usize) -> Self {
        StructureConstants { dim, table: vec![Rational::zero(); dim * dim * dim] }
    }

    /// From 0-based entries `(i, j, k, c)` with `i < j`, meaning `[e_i, e_j] ∋ c e_k`.
    pub fn from_brackets<I>(dim: usize, entries: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        let mut s = Self::abelian(dim);
        for (i, j, k, c) in entries {
            if !(i < j && j < dim && k < dim) {
                return Err(LieError::BadBracketIndex { i: i + 1, j: j + 1, k: k + 1, dim });
            }
            let slot = s.index(i, j, k);
            s.table[slot] += &c;
            let v = s.table[slot].clone();
            let anti = s.index(j, i, k);
            s.table[anti] = -v;
        }
        Ok(s)
    }

    /// Integer convenience form of [`Self::from_brackets`]; panics on bad indices.
    pub fn from_i64(dim: usize, entries: &[(usize, usize, usize, i64)]) -> Self {
        Self::from_brackets(dim, entries.iter().map(|&(i, j, k, c)| (i, j, k, rat(c)))).expect("valid bracket indices")
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[self.index(i, j, k)]
    }

    /// Nonzero entries with `i < j`, 0-based.
    pub fn brackets(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    let c = self.coefficient(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(Zero::is_zero)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        SparseVec::from_entries(self.dim, (0..self.dim).map(|k| (k, self.coefficient(i, j, k).clone())))
    }

    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero(self.dim);
        for (i, a) in x.entries() {
            for (j, b) in y.entries() {
                if i != j {
                    out = out.add_scaled(&(a * b), &self.bracket_basis(*i, *j));
                }
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &StructureConstants) -> StructureConstants {
        let n = self.dim;
        let mut entries = self.brackets();
        entries.extend(other.brackets().into_iter().map(|(i, j, k, c)| (i + n, j + n, k + n, c)));
        Self::from_brackets(n + other.dim, entries).expect("indices shifted consistently")
    }

    /// The CE derivation `dξ_k = −Σ_{i<j} c_ij^k ξ_i ξ_j`, without checking Jacobi.
    pub fn ce_derivation(&self) -> DerivationSpec {
        let n = self.dim;
        let mut images = vec![Element::zero(n); n];
        for (i, j, k, c) in self.brackets() {
            let m = Monomial::from_indices(&[i, j]).expect("i < j");
            images[k] = images[k].add(&Element::monomial(n, m, -c)).expect("same frame");
        }
        DerivationSpec::new(n, 1, images).expect("images are quadratic")
    }
}

/// Checks the Jacobi identity on every basis triple `i < j < k`.
pub fn validate_lie(c: &StructureConstants) -> Result<(), JacobiFailure> {
    let n = c.dim;
    let e = |i| SparseVec::unit(n, i);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t1 = c.bracket(&c.bracket_basis(i, j), &e(k));
                let t2 = c.bracket(&c.bracket_basis(j, k), &e(i));
                let t3 = c.bracket(&c.bracket_basis(k, i), &e(j));
                let defect = t1.add_scaled(&Rational::one(), &t2).add_scaled(&Rational::one(), &t3);
                if !defect.is_zero() {
                    return Err(JacobiFailure { triple: (i, j, k), defect });
                }
            }
        }
    }
    Ok(())
}

/// A Lie algebra whose structure constants passed [`validate_lie`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieAlgebra {
    constants: StructureConstants,
}

impl LieAlgebra {
    pub fn new(constants: StructureConstants) -> Result<Self, JacobiFailure> {
        validate_lie(&constants)?;
        Ok(LieAlgebra { constants })
    }

    /// Skips validation. Only for building deliberately broken fixtures.
    pub fn from_constants_unchecked(constants: StructureConstants) -> Self {
        LieAlgebra { constants }
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { constants: StructureConstants::abelian(dim) }
    }

    /// Basis (h, e, f) with `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        Self::new(StructureConstants::from_i64(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)])).expect("sl2")
    }

    /// Basis (e1, e2, e3) with `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::new(StructureConstants::from_i64(3, &[(0, 1, 2, 1)])).expect("heisenberg")
    }

    pub fn dim(&self) -> usize {
        self.constants.dim
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        LieAlgebra { constants: self.constants.direct_sum(&other.constants) }
    }
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim {}", self.dim())?;
        for (i, j, k, c) in self.constants.brackets() {
            write!(f, ", [e{},e{}]∋({c})e{}", i + 1, j + 1, k + 1)?;
        }
        Ok(())
    }
}

/// Matrix of the CE differential `⋀^p g* → ⋀^{p+1} g*`.
pub fn ce_matrix(g: &LieAlgebra, p: usize) -> SparseMatrix {
    derivation_matrix(&g.constants.ce_derivation(), p)
}

/// `dim H^p_CE(g)` for `p = 0..=p_max`.
pub fn ce_cohomology_dims(g: &LieAlgebra, p_max: usize) -> Vec<usize> {
    let n = g.dim();
    let ranks: Vec<usize> = (0..=p_max).map(|p| exactla::rank(&ce_matrix(g, p))).collect();
    (0..=p_max)
        .map(|p| {
            let dim = exterior_basis(n, p).len();
            dim - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 }
        })
        .collect()
}

/// The degree-shifted frame of `g` together with its CE derivation.
pub fn shifted_frame(c: &StructureConstants) -> Result<(ExteriorFrame, DerivationSpec), LieError> {
    validate_lie(c)?;
    Ok((ExteriorFrame::new(c.dim)?, c.ce_derivation()))
}

/// A linear map between Lie algebras; `matrix` is `target.dim × source.dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLieMorphism {
    pub source: StructureConstants,
    pub target: StructureConstants,
    pub matrix: SparseMatrix,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismFailure {
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    Shape { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("f[e{},e{}] − [f e{}, f e{}] = {defect}", .pair.0 + 1, .pair.1 + 1, .pair.0 + 1, .pair.1 + 1)]
    Bracket { pair: (usize, usize), defect: SparseVec },
}

impl LinearLieMorphism {
    pub fn is_lie_morphism(&self) -> Result<(), MorphismFailure> {
        check_lie_morphism(&self.source, &self.target, &self.matrix)
    }
}

/// Checks `f[x, y] = [f x, f y]` on every basis pair.
pub fn check_lie_morphism(
    source: &StructureConstants,
    target: &StructureConstants,
    f: &SparseMatrix,
) -> Result<(), MorphismFailure> {
    if f.rows() != target.dim || f.cols() != source.dim {
        return Err(MorphismFailure::Shape {
            rows: f.rows(),
            cols: f.cols(),
            expected_rows: target.dim,
            expected_cols: source.dim,
        });
    }
    let cols = f.columns();
    for i in 0..source.dim {
        for j in i + 1..source.dim {
            let lhs = f.mul_vec(&source.bracket_basis(i, j));
            let rhs = target.bracket(&cols[i], &cols[j]);
            let defect = lhs.sub(&rhs);
            if !defect.is_zero() {
                return Err(MorphismFailure::Bracket { pair: (i, j), defect });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelatednessFailure {
    #[error(transparent)]
    Frame(#[from] SuperalgError),
    #[error("relatedness fails on generator ξ{}: residue {residue}", .generator + 1)]
    Residue { generator: usize, residue: Element },
}

/// For `f: source → target` (a `target × source` matrix), checks
/// `f*(d_target ξ) = d_source(f* ξ)` on every generator ξ of the target frame.
pub fn is_related(
    f: &SparseMatrix,
    d_source: &DerivationSpec,
    d_target: &DerivationSpec,
) -> Result<(), RelatednessFailure> {
    if f.cols() != d_source.frame() {
        return Err(SuperalgError::FrameMismatch { left: f.cols(), right: d_source.frame() }.into());
    }
    if f.rows() != d_target.frame() {
        return Err(SuperalgError::FrameMismatch { left: f.rows(), right: d_target.frame() }.into());
    }
    let pulled = superalg::pullback_generators(f);
    for (a, image) in d_target.images().iter().enumerate() {
        let lhs = superalg::pullback(f, image)?;
        let rhs = superalg::apply_derivation(d_source, &pulled[a])?;
        let residue = lhs.sub(&rhs)?;
        if !residue.is_zero() {
            return Err(RelatednessFailure::Residue { generator: a, residue });
        }
    }
    Ok(())
}

/// A bundle of Lie algebras over a finite set of labelled points. The anchor
/// is identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieFiberBundle {
    labels: Vec<String>,
    fibers: Vec<LieAlgebra>,
}

impl LieFiberBundle {
    pub fn new(labels: Vec<String>, fibers: Vec<LieAlgebra>) -> Self {
        assert_eq!(labels.len(), fibers.len(), "one fiber per base point");
        LieFiberBundle { labels, fibers }
    }

    pub fn constant(labels: Vec<String>, fiber: &LieAlgebra) -> Self {
        let fibers = vec![fiber.clone(); labels.len()];
        LieFiberBundle { labels, fibers }
    }

    pub fn zero(labels: Vec<String>) -> Self {
        Self::constant(labels, &LieAlgebra::abelian(0))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fibers(&self) -> &[LieAlgebra] {
        &self.fibers
    }

    pub fn fiber(&self, point: usize) -> &LieAlgebra {
        &self.fibers[point]
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    /// Re-validates every fiber.
    pub fn validate(&self) -> Result<(), (usize, JacobiFailure)> {
        for (x, g) in self.fibers.iter().enumerate() {
            validate_lie(g.constants()).map_err(|e| (x, e))?;
        }
        Ok(())
    }

    pub fn with_fiber(&self, point: usize, fiber: LieAlgebra) -> Self {
        let mut out = self.clone();
        out.fibers[point] = fiber;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::is_homological;

    fn mono(idx: &[usize]) -> Monomial {
        Monomial::from_indices(&idx.iter().map(|i| i - 1).collect::<Vec<_>>()).unwrap()
    }

    fn broken() -> StructureConstants {
        // [e1,e2] = e1, [e2,e3] = e2, [e1,e3] = 0
        StructureConstants::from_i64(3, &[(0, 1, 0, 1), (1, 2, 1, 1)])
    }

    #[test]
    fn jacobi_examples() {
        assert!(validate_lie(&StructureConstants::abelian(4)).is_ok());
        assert!(validate_lie(LieAlgebra::sl2().constants()).is_ok());
        let err = validate_lie(&broken()).unwrap_err();
        assert_eq!(err.triple, (0, 1, 2));
        assert_eq!(err.defect, SparseVec::from_i64(&[-1, 0, 0]));
    }

    #[test]
    fn bad_bracket_index_rejected() {
        let e = StructureConstants::from_brackets(2, [(1, 0, 0, rat(1))]);
        assert!(matches!(e, Err(LieError::BadBracketIndex { .. })));
    }

    #[test]
    fn ce_matrix_examples() {
        let ab = LieAlgebra::abelian(3);
        for p in 0..4 {
            assert!(ce_matrix(&ab, p).is_zero());
        }
        let g = LieAlgebra::sl2();
        assert!(ce_matrix(&g, 0).is_zero());
        let d = g.constants().ce_derivation();
        // dh* = −e*∧f*, de* = −2 h*∧e*, df* = +2 h*∧f*
        let n = 3;
        assert_eq!(d.images()[0], Element::monomial(n, mono(&[2, 3]), rat(-1)));
        assert_eq!(d.images()[1], Element::monomial(n, mono(&[1, 2]), rat(-2)));
        assert_eq!(d.images()[2], Element::monomial(n, mono(&[1, 3]), rat(2)));
        assert_eq!(exactla::rank(&ce_matrix(&g, 1)), 3);
    }

    #[test]
    fn ce_cohomology_examples() {
        assert_eq!(ce_cohomology_dims(&LieAlgebra::abelian(2), 2), vec![1, 2, 1]);
        assert_eq!(ce_cohomology_dims(&LieAlgebra::sl2(), 3), vec![1, 0, 0, 1]);
        assert_eq!(ce_cohomology_dims(&LieAlgebra::heisenberg(), 3), vec![1, 2, 2, 1]);
    }

    #[test]
    fn morphism_examples() {
        let g = LieAlgebra::sl2();
        let c = g.constants();
        assert!(check_lie_morphism(c, c, &SparseMatrix::identity(3)).is_ok());
        assert!(check_lie_morphism(c, c, &SparseMatrix::zeros(3, 3)).is_ok());
        // e ↔ f, h ↦ h
        let swap = SparseMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        match check_lie_morphism(c, c, &swap) {
            Err(MorphismFailure::Bracket { pair, defect }) => {
                assert_eq!(pair, (0, 1));
                // f[h,e] = 2f but [h, f] = −2f
                assert_eq!(defect, SparseVec::from_i64(&[0, 0, 4]));
            }
            other => panic!("expected bracket failure, got {other:?}"),
        }
        // e ↔ f, h ↦ −h is an automorphism
        let theta = SparseMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let m = LinearLieMorphism { source: c.clone(), target: c.clone(), matrix: theta };
        assert!(m.is_lie_morphism().is_ok());
    }

    #[test]
    fn shifted_frame_examples() {
        let (frame, d) = shifted_frame(&StructureConstants::abelian(2)).unwrap();
        assert_eq!(frame.generator_count, 2);
        assert!(d.is_zero());
        let (_, d) = shifted_frame(LieAlgebra::sl2().constants()).unwrap();
        assert!(is_homological(&d).unwrap().holds());
        assert!(matches!(shifted_frame(&broken()), Err(LieError::Jacobi(_))));
    }

    #[test]
    fn relatedness_examples() {
        let g = LieAlgebra::sl2();
        let d = g.constants().ce_derivation();
        assert!(is_related(&SparseMatrix::identity(3), &d, &d).is_ok());
        let z = DerivationSpec::zero(2, 1);
        assert!(is_related(&SparseMatrix::from_i64(&[&[1, 2], &[0, 1]]), &z, &z).is_ok());
        // projection of the 2-dim nonabelian algebra [x, y] = y onto its abelianization
        let aff = StructureConstants::from_i64(2, &[(0, 1, 1, 1)]);
        let proj = SparseMatrix::from_i64(&[&[1, 0]]);
        assert!(is_related(&proj, &aff.ce_derivation(), &StructureConstants::abelian(1).ce_derivation()).is_ok());
        // the inclusion of the ideal span{y} is a morphism too
        let incl = SparseMatrix::from_i64(&[&[0], &[1]]);
        assert!(is_related(&incl, &StructureConstants::abelian(1).ce_derivation(), &aff.ce_derivation()).is_ok());
        // scaling by 2 is not a morphism of a nonabelian algebra
        let twice = SparseMatrix::identity(2).scale(&rat(2));
        assert!(matches!(
            is_related(&twice, &aff.ce_derivation(), &aff.ce_derivation()),
            Err(RelatednessFailure::Residue { .. })
        ));
    }
}
