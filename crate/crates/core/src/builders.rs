//! Constructors for the standard families of LA-groupoids.

use std::collections::HashMap;

use thiserror::Error;

use crate::exactla::{rank, SparseMatrix};
use crate::fingroupoid::{validate_groupoid, AxiomFailure, FiniteGroupoid, GroupoidError};
use crate::laq::{block_diag, hstack, LaGroupoid, LaParts};
use crate::liealg::{check_lie_morphism, LieAlgebra, LieFiberBundle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid action at {location}: {reason}")]
    ActionInvalid { location: String, reason: String },
    #[error("the point set is empty")]
    EmptySet,
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("base groupoid: {0}")]
    Axiom(#[from] AxiomFailure),
}

fn invalid(location: impl Into<String>, reason: impl ToString) -> BuildError {
    BuildError::ActionInvalid { location: location.into(), reason: reason.to_string() }
}

fn labels_of(g: &FiniteGroupoid) -> Vec<String> {
    g.arrows().iter().map(|a| a.label.clone()).collect()
}

/// Zero bundles over `g`: the double complex is the groupoid cochain complex.
pub fn trivial_groupoid(g: &FiniteGroupoid) -> LaGroupoid {
    let composable = (0..g.arrow_count())
        .flat_map(|a| (0..g.arrow_count()).map(move |b| (a, b)))
        .filter(|&(a, b)| g.compose(a, b).is_some())
        .map(|k| (k, SparseMatrix::zeros(0, 0)));
    LaGroupoid::from_parts(LaParts {
        side: LieFiberBundle::zero(g.objects().to_vec()),
        top: LieFiberBundle::zero(labels_of(g)),
        src_lin: vec![SparseMatrix::zeros(0, 0); g.arrow_count()],
        tgt_lin: vec![SparseMatrix::zeros(0, 0); g.arrow_count()],
        mult_lin: composable.collect(),
        unit_lin: vec![SparseMatrix::zeros(0, 0); g.object_count()],
        inv_lin: vec![SparseMatrix::zeros(0, 0); g.arrow_count()],
        base: g.clone(),
    })
    .expect("zero maps have matching shapes")
}

/// `A` over the identity groupoid of its base, every structure map the identity.
pub fn trivial_algebroid(a: &LieFiberBundle) -> LaGroupoid {
    let base = FiniteGroupoid::identity(a.labels()).expect("bundle labels are distinct");
    let lifts = a.fibers().iter().map(|f| SparseMatrix::identity(f.dim())).collect();
    vacant_matched_pair(&base, a, lifts).expect("identity lifts are valid")
}

/// Checks that `lifts[g]: A_{s(g)} → A_{t(g)}` are Lie isomorphisms with
/// `lift(gh) = lift(g) ∘ lift(h)` and `lift(1_x) = id`.
pub fn check_lifts(g: &FiniteGroupoid, a: &LieFiberBundle, lifts: &[SparseMatrix]) -> Result<(), BuildError> {
    if lifts.len() != g.arrow_count() {
        return Err(invalid("lifts", format!("expected {} lifts, got {}", g.arrow_count(), lifts.len())));
    }
    let label = |h: usize| g.arrows()[h].label.clone();
    for (h, m) in lifts.iter().enumerate() {
        let (s, t) = (a.fiber(g.src(h)), a.fiber(g.tgt(h)));
        check_lie_morphism(s.constants(), t.constants(), m).map_err(|e| invalid(label(h), e))?;
        if s.dim() != t.dim() || rank(m) != s.dim() {
            return Err(invalid(label(h), "lift is not invertible"));
        }
    }
    for x in 0..g.object_count() {
        if lifts[g.unit(x)] != SparseMatrix::identity(a.fiber(x).dim()) {
            return Err(invalid(label(g.unit(x)), "unit does not act by the identity"));
        }
    }
    for p in 0..g.arrow_count() {
        for h in 0..g.arrow_count() {
            if let Some(ph) = g.compose(p, h) {
                if lifts[p].mul(&lifts[h]).ok().as_ref() != Some(&lifts[ph]) {
                    return Err(invalid(format!("{}·{}", label(p), label(h)), "lifts do not compose"));
                }
            }
        }
    }
    Ok(())
}

/// The vacant LA-groupoid of a groupoid acting on a bundle: `Ω_g = A_{s(g)}`,
/// `src_lin = id`, `tgt_lin = lift(g)`, and `(g, v)·(h, w) = (gh, w)`.
pub fn vacant_matched_pair(
    g: &FiniteGroupoid,
    a: &LieFiberBundle,
    lifts: Vec<SparseMatrix>,
) -> Result<LaGroupoid, BuildError> {
    validate_groupoid(g)?;
    if a.len() != g.object_count() {
        return Err(invalid("bundle", "one fiber per object required"));
    }
    check_lifts(g, a, &lifts)?;
    let dim = |x: usize| a.fiber(x).dim();
    let id_src: Vec<SparseMatrix> = (0..g.arrow_count()).map(|h| SparseMatrix::identity(dim(g.src(h)))).collect();
    let mut mult = HashMap::new();
    for p in 0..g.arrow_count() {
        for h in 0..g.arrow_count() {
            if g.compose(p, h).is_some() {
                let n = dim(g.src(h));
                mult.insert((p, h), hstack(&SparseMatrix::zeros(n, dim(g.src(p))), &SparseMatrix::identity(n)));
            }
        }
    }
    let top = LieFiberBundle::new(labels_of(g), (0..g.arrow_count()).map(|h| a.fiber(g.src(h)).clone()).collect());
    Ok(LaGroupoid::from_parts(LaParts {
        base: g.clone(),
        side: a.clone(),
        top,
        src_lin: id_src.clone(),
        tgt_lin: lifts.clone(),
        mult_lin: mult,
        unit_lin: (0..g.object_count()).map(|x| SparseMatrix::identity(dim(x))).collect(),
        inv_lin: lifts,
    })
    .expect("shapes follow from the lifts"))
}

/// A group acting on the right on labelled points, with fiber lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupActionOnBundle {
    /// One-object groupoid.
    pub group: FiniteGroupoid,
    /// `point_action[x][γ]` is the index of `x·γ`.
    pub point_action: Vec<Vec<usize>>,
    /// `lifts[x][γ]: A_{x·γ} → A_x`.
    pub lifts: Vec<Vec<SparseMatrix>>,
}

impl GroupActionOnBundle {
    /// Every point fixed and every element acting through `lift_of(γ)`.
    pub fn over_point(group: FiniteGroupoid, lift_of: impl Fn(usize) -> SparseMatrix) -> Self {
        let n = group.arrow_count();
        GroupActionOnBundle {
            point_action: vec![(0..n).map(|_| 0).collect()],
            lifts: vec![(0..n).map(lift_of).collect()],
            group,
        }
    }
}

/// The action groupoid of `action` with `A` pulled back along the source.
pub fn equivariant(a: &LieFiberBundle, action: &GroupActionOnBundle) -> Result<LaGroupoid, BuildError> {
    let gamma = &action.group;
    validate_groupoid(gamma)?;
    if !gamma.is_one_object() {
        return Err(invalid("group", "expected a one-object groupoid"));
    }
    let n = a.len();
    let m = gamma.arrow_count();
    if action.point_action.len() != n || action.point_action.iter().any(|r| r.len() != m || r.iter().any(|&y| y >= n)) {
        return Err(invalid("point action", "table does not match the points and group"));
    }
    let e = gamma.unit(0);
    for x in 0..n {
        if action.point_action[x][e] != x {
            return Err(invalid(&a.labels()[x], "identity moves the point"));
        }
        for p in 0..m {
            for h in 0..m {
                let ph = gamma.compose(p, h).expect("one object");
                if action.point_action[action.point_action[x][p]][h] != action.point_action[x][ph] {
                    return Err(invalid(&a.labels()[x], "not a right action"));
                }
            }
        }
    }
    let base = FiniteGroupoid::action(a.labels(), gamma, &action.point_action)?;
    let lifts = action.lifts.iter().flatten().cloned().collect();
    vacant_matched_pair(&base, a, lifts)
}

/// Pair groupoid with zero bundles.
pub fn pair_zero(points: &[String]) -> Result<LaGroupoid, BuildError> {
    if points.is_empty() {
        return Err(BuildError::EmptySet);
    }
    Ok(trivial_groupoid(&FiniteGroupoid::pair(points)?))
}

/// Componentwise product.
pub fn product(l1: &LaGroupoid, l2: &LaGroupoid) -> LaGroupoid {
    let (g1, g2) = (l1.base(), l2.base());
    let base = FiniteGroupoid::product(g1, g2);
    let (n2, m2) = (g2.object_count(), g2.arrow_count());
    let sum = |x: &LieAlgebra, y: &LieAlgebra| x.direct_sum(y);
    let side = LieFiberBundle::new(
        base.objects().to_vec(),
        (0..g1.object_count())
            .flat_map(|x| (0..n2).map(move |y| (x, y)))
            .map(|(x, y)| sum(l1.side().fiber(x), l2.side().fiber(y)))
            .collect(),
    );
    let arrow_pairs: Vec<(usize, usize)> = (0..g1.arrow_count()).flat_map(|a| (0..m2).map(move |b| (a, b))).collect();
    let top = LieFiberBundle::new(
        labels_of(&base),
        arrow_pairs.iter().map(|&(a, b)| sum(l1.top().fiber(a), l2.top().fiber(b))).collect(),
    );
    let pairwise = |f1: &dyn Fn(usize) -> SparseMatrix, f2: &dyn Fn(usize) -> SparseMatrix| {
        arrow_pairs.iter().map(|&(a, b)| block_diag(&[f1(a), f2(b)])).collect::<Vec<_>>()
    };
    let mut mult = HashMap::new();
    for (i, &(a1, b1)) in arrow_pairs.iter().enumerate() {
        for (j, &(a2, b2)) in arrow_pairs.iter().enumerate() {
            let (Some(m1), Some(m2)) = (l1.mult_lin(a1, a2), l2.mult_lin(b1, b2)) else { continue };
            // (ω1_g, ω2_g, ω1_h, ω2_h) ↦ (m1(ω1_g, ω1_h), m2(ω2_g, ω2_h))
            let (d1g, d2g) = (l1.top().fiber(a1).dim(), l2.top().fiber(b1).dim());
            let (d1h, d2h) = (l1.top().fiber(a2).dim(), l2.top().fiber(b2).dim());
            let cols = d1g + d2g + d1h + d2h;
            let trip = m1
                .triplets()
                .map(|(r, c, x)| (r, if c < d1g { c } else { c - d1g + d1g + d2g }, x.clone()))
                .chain(m2.triplets().map(|(r, c, x)| {
                    (r + m1.rows(), if c < d2g { c + d1g } else { c - d2g + d1g + d2g + d1h }, x.clone())
                }));
            mult.insert((i, j), SparseMatrix::from_triplets(m1.rows() + m2.rows(), cols, trip));
        }
    }
    let parts = LaParts {
        src_lin: pairwise(&|a| l1.src_lin(a).clone(), &|b| l2.src_lin(b).clone()),
        tgt_lin: pairwise(&|a| l1.tgt_lin(a).clone(), &|b| l2.tgt_lin(b).clone()),
        inv_lin: pairwise(&|a| l1.inv_lin(a).clone(), &|b| l2.inv_lin(b).clone()),
        unit_lin: (0..g1.object_count())
            .flat_map(|x| (0..n2).map(move |y| (x, y)))
            .map(|(x, y)| block_diag(&[l1.unit_lin(x).clone(), l2.unit_lin(y).clone()]))
            .collect(),
        mult_lin: mult,
        base,
        side,
        top,
    };
    LaGroupoid::from_parts(parts).expect("componentwise shapes agree")
}

/// The bundle over labelled points with the same fiber everywhere.
pub fn constant_bundle(points: &[&str], fiber: &LieAlgebra) -> LieFiberBundle {
    LieFiberBundle::constant(points.iter().map(|s| s.to_string()).collect(), fiber)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::SparseMatrix;
    use crate::laq::{check_multiplicative, nerve_algebroid, validate_la, vacancy_check};

    fn point(fiber: &LieAlgebra) -> LieFiberBundle {
        constant_bundle(&["*"], fiber)
    }

    fn swap() -> SparseMatrix {
        SparseMatrix::from_i64(&[&[0, 1], &[1, 0]])
    }

    fn sl2_involution() -> SparseMatrix {
        SparseMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]])
    }

    fn z2_acting(m: SparseMatrix) -> GroupActionOnBundle {
        let n = m.cols();
        GroupActionOnBundle::over_point(FiniteGroupoid::cyclic(2), move |g| {
            if g == 0 {
                SparseMatrix::identity(n)
            } else {
                m.clone()
            }
        })
    }

    fn all_outputs() -> Vec<LaGroupoid> {
        let pts = |n: usize| (1..=n).map(|i| i.to_string()).collect::<Vec<_>>();
        vec![
            trivial_groupoid(&FiniteGroupoid::cyclic(2)),
            trivial_groupoid(&FiniteGroupoid::symmetric(3)),
            trivial_algebroid(&point(&LieAlgebra::sl2())),
            trivial_algebroid(&constant_bundle(&["x", "y"], &LieAlgebra::heisenberg())),
            equivariant(&point(&LieAlgebra::abelian(2)), &z2_acting(swap())).unwrap(),
            equivariant(&point(&LieAlgebra::sl2()), &z2_acting(sl2_involution())).unwrap(),
            pair_zero(&pts(3)).unwrap(),
            product(&trivial_algebroid(&point(&LieAlgebra::sl2())), &pair_zero(&pts(2)).unwrap()),
            product(&trivial_groupoid(&FiniteGroupoid::cyclic(2)), &trivial_groupoid(&FiniteGroupoid::cyclic(3))),
        ]
    }

    #[test]
    fn outputs_validate() {
        for l in all_outputs() {
            assert_eq!(validate_la(&l), Ok(()), "{}", l.base());
            assert_eq!(check_multiplicative(&l), Ok(()));
        }
    }

    #[test]
    fn vacant_outputs() {
        let l = equivariant(&point(&LieAlgebra::abelian(2)), &z2_acting(swap())).unwrap();
        assert!(vacancy_check(&l));
        for q in 0..4 {
            assert!(nerve_algebroid(&l, q).unwrap().dims().iter().all(|&d| d == 2));
        }
        let g = FiniteGroupoid::pair(&["a".into(), "b".into()]).unwrap();
        let a = constant_bundle(&["a", "b"], &LieAlgebra::sl2());
        let lifts = (0..4).map(|_| SparseMatrix::identity(3)).collect();
        let l = vacant_matched_pair(&g, &a, lifts).unwrap();
        assert!(vacancy_check(&l));
        assert_eq!(validate_la(&l), Ok(()));
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let bad = SparseMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let err = equivariant(&point(&LieAlgebra::sl2()), &z2_acting(bad)).unwrap_err();
        assert!(matches!(err, BuildError::ActionInvalid { ref location, .. } if location == "(*,1)"));
        let err = equivariant(&point(&LieAlgebra::abelian(2)), &z2_acting(SparseMatrix::identity(2).scale(&crate::exactla::rat(2))))
            .unwrap_err();
        assert!(err.to_string().contains("compose"));
    }

    #[test]
    fn trivial_group_matches_trivial_algebroid() {
        let a = point(&LieAlgebra::heisenberg());
        let e = equivariant(&a, &GroupActionOnBundle::over_point(FiniteGroupoid::cyclic(1), |_| SparseMatrix::identity(3)))
            .unwrap();
        let t = trivial_algebroid(&a);
        let (pe, pt) = (e.parts(), t.parts());
        assert_eq!(pe.src_lin, pt.src_lin);
        assert_eq!(pe.tgt_lin, pt.tgt_lin);
        assert_eq!(pe.mult_lin, pt.mult_lin);
        assert_eq!(pe.top.fibers(), pt.top.fibers());
    }

    #[test]
    fn empty_pair_is_rejected() {
        assert_eq!(pair_zero(&[]).unwrap_err(), BuildError::EmptySet);
    }

    #[test]
    fn product_with_a_point() {
        let l = trivial_algebroid(&point(&LieAlgebra::sl2()));
        let p = product(&l, &trivial_groupoid(&FiniteGroupoid::cyclic(1)));
        for q in 0..3 {
            assert_eq!(nerve_algebroid(&p, q).unwrap().dims(), nerve_algebroid(&l, q).unwrap().dims());
        }
    }
}
