//! Graded-commutative algebras on degree-one generators.
//!
//! A frame of `n` odd generators ξ_1..ξ_n spans the exterior algebra ⋀ℚ^n,
//! which is the fiberwise function algebra of a degree-one graded vector
//! bundle over a point. Monomials are stored as bitmasks in canonical
//! (strictly increasing) order and every Koszul sign is produced at merge
//! time.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{Rational, SparseMatrix, SparseVec};

/// Largest supported generator count (monomials are `u64` bitmasks).
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuperalgError {
    #[error("frame mismatch: {left} vs {right} generators")]
    FrameMismatch { left: usize, right: usize },
    #[error("derivation has degree {degree}, expected +1")]
    DegreeMismatch { degree: i32 },
    #[error("image of generator {generator} is not homogeneous of degree {expected}")]
    ImageDegree { generator: usize, expected: i32 },
    #[error("{0} generators exceeds the supported maximum of {MAX_GENERATORS}")]
    TooManyGenerators(usize),
    #[error("monomial indices must be strictly increasing and below the generator count")]
    BadMonomial,
}

/// Frame of odd generators, each of degree +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExteriorFrame {
    pub generator_count: usize,
}

impl ExteriorFrame {
    pub const GENERATOR_DEGREE: i32 = 1;

    pub fn new(generator_count: usize) -> Result<Self, SuperalgError> {
        if generator_count > MAX_GENERATORS {
            return Err(SuperalgError::TooManyGenerators(generator_count));
        }
        Ok(ExteriorFrame { generator_count })
    }
}

/// A product of distinct generators in increasing index order (0-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn generator(i: usize) -> Self {
        assert!(i < MAX_GENERATORS);
        Monomial(1 << i)
    }

    /// From a strictly increasing list of 0-based indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self, SuperalgError> {
        let mut bits = 0u64;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(SuperalgError::BadMonomial);
            }
        }
        for &i in indices {
            if i >= MAX_GENERATORS {
                return Err(SuperalgError::BadMonomial);
            }
            bits |= 1 << i;
        }
        Ok(Monomial(bits))
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut b = self.0;
        while b != 0 {
            let i = b.trailing_zeros() as usize;
            out.push(i);
            b &= b - 1;
        }
        out
    }

    fn highest(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// `self ∧ other` as a signed monomial, or `None` if they share a generator.
    pub fn merge(self, other: Monomial) -> Option<(bool, Monomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count inversions: pairs (i in self, j in other) with i > j
        let mut inversions = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            inversions += if j >= 63 { 0 } else { (self.0 >> (j + 1)).count_ones() };
            b &= b - 1;
        }
        Some((inversions % 2 == 1, Monomial(self.0 | other.0)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let idx: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "ξ{{{}}}", idx.join(","))
    }
}

/// All degree-`p` monomials on `n` generators, in lexicographic order.
pub fn exterior_basis(n: usize, p: usize) -> Vec<Monomial> {
    fn rec(start: usize, n: usize, left: usize, bits: u64, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial(bits));
            return;
        }
        for i in start..=(n - left) {
            rec(i + 1, n, left - 1, bits | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, 0, &mut out);
    }
    out
}

/// Position lookup for [`exterior_basis`].
pub fn basis_index(n: usize, p: usize) -> HashMap<Monomial, usize> {
    exterior_basis(n, p).into_iter().enumerate().map(|(i, m)| (m, i)).collect()
}

/// An element of the exterior algebra on a fixed frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    frame: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Element {
    pub fn zero(frame: usize) -> Self {
        Element { frame, terms: BTreeMap::new() }
    }

    pub fn one(frame: usize) -> Self {
        Self::monomial(frame, Monomial::ONE, Rational::one())
    }

    pub fn generator(frame: usize, i: usize) -> Self {
        assert!(i < frame, "generator {i} outside a frame of {frame}");
        Self::monomial(frame, Monomial::generator(i), Rational::one())
    }

    pub fn monomial(frame: usize, m: Monomial, coeff: Rational) -> Self {
        assert!(m.highest().is_none_or(|h| h < frame), "monomial {m} outside a frame of {frame}");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        Element { frame, terms }
    }

    pub fn from_terms<I>(frame: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut e = Self::zero(frame);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        assert!(m.highest().is_none_or(|h| h < self.frame), "monomial {m} outside frame");
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn frame(&self) -> usize {
        self.frame
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms; `None` for zero or mixed elements.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Degree-zero component (the evaluation map to functions on the base point).
    pub fn evaluate(&self) -> Rational {
        self.coefficient(Monomial::ONE)
    }

    pub fn add(&self, other: &Element) -> Result<Element, SuperalgError> {
        check_frames(self.frame, other.frame)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, SuperalgError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Element {
        if s.is_zero() {
            return Element::zero(self.frame);
        }
        Element { frame: self.frame, terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect() }
    }

    /// Coefficient vector in the degree-`p` basis of [`exterior_basis`].
    pub fn to_vector(&self, p: usize, index: &HashMap<Monomial, usize>) -> SparseVec {
        SparseVec::from_entries(
            index.len(),
            self.terms.iter().filter(|(m, _)| m.degree() == p).map(|(m, c)| (index[m], c.clone())),
        )
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{m}")?;
        }
        Ok(())
    }
}

fn check_frames(a: usize, b: usize) -> Result<(), SuperalgError> {
    if a != b {
        return Err(SuperalgError::FrameMismatch { left: a, right: b });
    }
    Ok(())
}

/// Graded-commutative product.
pub fn wedge(a: &Element, b: &Element) -> Result<Element, SuperalgError> {
    check_frames(a.frame, b.frame)?;
    let mut out = Element::zero(a.frame);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            if let Some((neg, m)) = ma.merge(*mb) {
                let c = ca * cb;
                out.add_term(m, if neg { -c } else { c });
            }
        }
    }
    Ok(out)
}

/// A graded derivation determined by its values on the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationSpec {
    frame: usize,
    degree: i32,
    images: Vec<Element>,
}

impl DerivationSpec {
    pub fn new(frame: usize, degree: i32, images: Vec<Element>) -> Result<Self, SuperalgError> {
        ExteriorFrame::new(frame)?;
        if images.len() != frame {
            return Err(SuperalgError::FrameMismatch { left: frame, right: images.len() });
        }
        let expected = ExteriorFrame::GENERATOR_DEGREE + degree;
        for (k, img) in images.iter().enumerate() {
            check_frames(frame, img.frame)?;
            if img.terms.keys().any(|m| m.degree() as i32 != expected) {
                return Err(SuperalgError::ImageDegree { generator: k, expected });
            }
        }
        Ok(DerivationSpec { frame, degree, images })
    }

    pub fn zero(frame: usize, degree: i32) -> Self {
        DerivationSpec { frame, degree, images: vec![Element::zero(frame); frame] }
    }

    pub fn frame(&self) -> usize {
        self.frame
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Element::is_zero)
    }
}

/// Applies `d` through the graded Leibniz rule.
pub fn apply_derivation(d: &DerivationSpec, x: &Element) -> Result<Element, SuperalgError> {
    check_frames(d.frame, x.frame)?;
    let n = d.frame;
    let mut out = Element::zero(n);
    for (m, c) in &x.terms {
        let idx = m.indices();
        for (k, &g) in idx.iter().enumerate() {
            let img = &d.images[g];
            if img.is_zero() {
                continue;
            }
            let left = Monomial::from_indices(&idx[..k]).expect("sorted");
            let right = Monomial::from_indices(&idx[k + 1..]).expect("sorted");
            // passing d across k odd generators
            let negate = (d.degree.rem_euclid(2) == 1) && k % 2 == 1;
            for (mi, ci) in &img.terms {
                let Some((s1, lm)) = left.merge(*mi) else { continue };
                let Some((s2, full)) = lm.merge(right) else { continue };
                let coeff = c * ci;
                out.add_term(full, if negate ^ s1 ^ s2 { -coeff } else { coeff });
            }
        }
    }
    Ok(out)
}

/// The super bracket `[d1, d2] = d1∘d2 − (−1)^{|d1||d2|} d2∘d1`.
pub fn bracket(d1: &DerivationSpec, d2: &DerivationSpec) -> Result<DerivationSpec, SuperalgError> {
    check_frames(d1.frame, d2.frame)?;
    let sign_odd = (d1.degree * d2.degree).rem_euclid(2) == 1;
    let images = (0..d1.frame)
        .map(|k| {
            let a = apply_derivation(d1, &d2.images[k])?;
            let b = apply_derivation(d2, &d1.images[k])?;
            if sign_odd {
                a.add(&b)
            } else {
                a.sub(&b)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DerivationSpec { frame: d1.frame, degree: d1.degree + d2.degree, images })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologicalVerdict {
    Homological,
    /// `d²(ξ_generator) = residue ≠ 0`.
    Defect { generator: usize, residue: Element },
}

impl HomologicalVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, HomologicalVerdict::Homological)
    }
}

/// Checks `d² = 0` on generators, which suffices by the Leibniz rule.
pub fn is_homological(d: &DerivationSpec) -> Result<HomologicalVerdict, SuperalgError> {
    if d.degree != 1 {
        return Err(SuperalgError::DegreeMismatch { degree: d.degree });
    }
    for (k, img) in d.images.iter().enumerate() {
        let residue = apply_derivation(d, img)?;
        if !residue.is_zero() {
            return Ok(HomologicalVerdict::Defect { generator: k, residue });
        }
    }
    Ok(HomologicalVerdict::Homological)
}

/// Algebra map ⋀(target frame) → ⋀(source frame) induced by a linear map
/// `f: source → target` (a `target × source` matrix): ξ_a ↦ Σ_b f[a][b] ξ_b.
pub fn pullback(f: &SparseMatrix, x: &Element) -> Result<Element, SuperalgError> {
    check_frames(f.rows(), x.frame)?;
    let n = f.cols();
    let gens: Vec<Element> = (0..f.rows())
        .map(|a| {
            Element::from_terms(n, f.row_entries(a).iter().map(|(b, v)| (Monomial::generator(*b), v.clone())))
        })
        .collect();
    let mut out = Element::zero(n);
    for (m, c) in &x.terms {
        let mut acc = Element::one(n).scale(c);
        for g in m.indices() {
            acc = wedge(&acc, &gens[g])?;
            if acc.is_zero() {
                break;
            }
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// The images of the generators under [`pullback`], as a derivation-free helper.
pub fn pullback_generators(f: &SparseMatrix) -> Vec<Element> {
    (0..f.rows())
        .map(|a| pullback(f, &Element::generator(f.rows(), a)).expect("frames agree"))
        .collect()
}

/// Matrix of `d` from degree `p` to degree `p + 1` in the lexicographic bases.
pub fn derivation_matrix(d: &DerivationSpec, p: usize) -> SparseMatrix {
    let n = d.frame;
    let src = exterior_basis(n, p);
    let tgt_degree = (p as i64 + d.degree as i64).max(0) as usize;
    let tgt = basis_index(n, tgt_degree);
    let mut trip = Vec::new();
    for (col, m) in src.iter().enumerate() {
        let img = apply_derivation(d, &Element::monomial(n, *m, Rational::one())).expect("frames agree");
        for (mm, c) in img.terms() {
            trip.push((tgt[mm], col, c.clone()));
        }
    }
    SparseMatrix::from_triplets(tgt.len(), src.len(), trip)
}

/// Matrix of ⋀^p f^*: ⋀^p(target)^* → ⋀^p(source)^* for `f: source → target`.
pub fn pullback_matrix(f: &SparseMatrix, p: usize) -> SparseMatrix {
    let (n_src, n_tgt) = (f.cols(), f.rows());
    let cols = exterior_basis(n_tgt, p);
    let rows = basis_index(n_src, p);
    let gens: Vec<Element> = (0..n_tgt)
        .map(|a| {
            Element::from_terms(n_src, f.row_entries(a).iter().map(|(b, v)| (Monomial::generator(*b), v.clone())))
        })
        .collect();
    let mut trip = Vec::new();
    for (col, m) in cols.iter().enumerate() {
        let mut acc = Element::one(n_src);
        for g in m.indices() {
            acc = wedge(&acc, &gens[g]).expect("frames agree");
            if acc.is_zero() {
                break;
            }
        }
        for (mm, c) in acc.terms() {
            trip.push((rows[mm], col, c.clone()));
        }
    }
    SparseMatrix::from_triplets(rows.len(), cols.len(), trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn mono(idx: &[usize]) -> Monomial {
        Monomial::from_indices(&idx.iter().map(|i| i - 1).collect::<Vec<_>>()).unwrap()
    }

    fn gen(n: usize, i: usize) -> Element {
        Element::generator(n, i - 1)
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(exterior_basis(3, 2), vec![mono(&[1, 2]), mono(&[1, 3]), mono(&[2, 3])]);
        assert_eq!(exterior_basis(4, 0), vec![Monomial::ONE]);
        assert_eq!(exterior_basis(0, 0), vec![Monomial::ONE]);
        assert!(exterior_basis(2, 3).is_empty());
        assert_eq!(exterior_basis(5, 3).len(), 10);
    }

    #[test]
    fn wedge_signs() {
        let n = 2;
        let e12 = Element::monomial(n, mono(&[1, 2]), rat(1));
        assert_eq!(wedge(&gen(n, 1), &gen(n, 2)).unwrap(), e12);
        assert_eq!(wedge(&gen(n, 2), &gen(n, 1)).unwrap(), e12.scale(&rat(-1)));
        assert!(wedge(&gen(n, 1), &gen(n, 1)).unwrap().is_zero());
        assert!(matches!(wedge(&gen(2, 1), &gen(3, 1)), Err(SuperalgError::FrameMismatch { .. })));
    }

    #[test]
    fn derivation_examples() {
        let n = 3;
        let x23 = wedge(&gen(n, 2), &gen(n, 3)).unwrap();
        let d = DerivationSpec::new(n, 1, vec![x23, Element::zero(n), Element::zero(n)]).unwrap();
        assert!(apply_derivation(&d, &Element::one(n)).unwrap().is_zero());
        let img = wedge(&gen(n, 1), &gen(n, 2)).unwrap();
        let d = DerivationSpec::new(n, 1, vec![Element::zero(n), Element::zero(n), img.clone()]).unwrap();
        assert_eq!(apply_derivation(&d, &gen(n, 3)).unwrap(), img);
        let d0 = DerivationSpec::zero(n, 1);
        assert!(apply_derivation(&d0, &img).unwrap().is_zero());
    }

    #[test]
    fn homological_examples() {
        let n = 3;
        assert!(is_homological(&DerivationSpec::zero(n, 1)).unwrap().holds());
        let x12 = Element::monomial(n, mono(&[1, 2]), rat(1));
        let d = DerivationSpec::new(n, 1, vec![Element::zero(n), Element::zero(n), x12]).unwrap();
        assert!(is_homological(&d).unwrap().holds());

        let d = DerivationSpec::new(
            n,
            1,
            vec![
                Element::monomial(n, mono(&[1, 2]), rat(-1)),
                Element::monomial(n, mono(&[2, 3]), rat(-1)),
                Element::zero(n),
            ],
        )
        .unwrap();
        match is_homological(&d).unwrap() {
            HomologicalVerdict::Defect { generator, residue } => {
                assert_eq!(generator, 0);
                assert_eq!(residue, Element::monomial(n, mono(&[1, 2, 3]), rat(-1)));
            }
            v => panic!("expected a defect, got {v:?}"),
        }
        assert_eq!(
            is_homological(&DerivationSpec::zero(n, 2)),
            Err(SuperalgError::DegreeMismatch { degree: 2 })
        );
    }

    #[test]
    fn bracket_of_odd_derivation_is_twice_square() {
        let n = 3;
        let d = DerivationSpec::new(
            n,
            1,
            vec![
                Element::monomial(n, mono(&[1, 2]), rat(-1)),
                Element::monomial(n, mono(&[2, 3]), rat(-1)),
                Element::zero(n),
            ],
        )
        .unwrap();
        let b = bracket(&d, &d).unwrap();
        assert_eq!(b.degree(), 2);
        for k in 0..n {
            let twice = apply_derivation(&d, &d.images()[k]).unwrap().scale(&rat(2));
            assert_eq!(b.images()[k], twice);
        }
        assert!(bracket(&DerivationSpec::zero(n, 1), &d).unwrap().is_zero());
        assert!(bracket(&DerivationSpec::zero(n, 1), &DerivationSpec::zero(n, 0)).unwrap().is_zero());
    }

    #[test]
    fn pullback_is_minor_matrix() {
        // f = [[1,2],[3,4]]: ⋀^2 f^* is multiplication by det = -2
        let f = SparseMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        assert_eq!(pullback_matrix(&f, 2), SparseMatrix::from_i64(&[&[-2]]));
        assert_eq!(pullback_matrix(&f, 1), f.transpose());
        assert_eq!(pullback_matrix(&f, 0), SparseMatrix::identity(1));
        assert_eq!(pullback_generators(&f)[0].coefficient(mono(&[2])), rat(2));
    }

    #[test]
    fn evaluation_is_degree_zero_part() {
        let e = Element::one(2).scale(&rat(5)).add(&gen(2, 1)).unwrap();
        assert_eq!(e.evaluate(), rat(5));
        assert_eq!(e.degree(), None);
    }
}
