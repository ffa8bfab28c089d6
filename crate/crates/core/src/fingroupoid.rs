//! Finite groupoids given by explicit tables, and their nerves.
//!
//! A composable `q`-tuple `(g_1, …, g_q)` satisfies `src(g_i) = tgt(g_{i+1})`,
//! so its vertices are `x_0 = tgt(g_1)`, `x_i = src(g_i)`. The face `σ_i`
//! deletes vertex `x_i`; the degeneracy `Δ_i` repeats it by inserting the
//! unit at `x_i`. Tuples are enumerated lexicographically in the declaration
//! order of the arrows, so matrix layouts are reproducible.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("face/degeneracy index {index} out of range for level {level}")]
    IndexOutOfRange { level: usize, index: usize },
    #[error("tuple is not composable at level {0}")]
    NotComposable(usize),
}

/// Which groupoid axiom failed, with the offending elements by label.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    #[error("product {g}·{h} must be defined exactly when src({g}) = tgt({h})")]
    Composability { g: String, h: String },
    #[error("product {g}·{h} = {gh} has the wrong source or target")]
    ProductEndpoints { g: String, h: String, gh: String },
    #[error("associativity fails on ({g}, {h}, {k})")]
    Associativity { g: String, h: String, k: String },
    #[error("unit law fails for object {object} (unit {unit}) against arrow {arrow}")]
    Unit { object: String, unit: String, arrow: String },
    #[error("inverse law fails for arrow {arrow} (claimed inverse {inverse})")]
    Inverse { arrow: String, inverse: String },
    #[error("unit of {object} is {unit}, which is not a loop at {object}")]
    UnitEndpoints { object: String, unit: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite groupoid `G ⇉ M` with an explicit multiplication table.
///
/// Construction only resolves labels; [`validate_groupoid`] checks the axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    mult: HashMap<(usize, usize), usize>,
    unit: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteGroupoid {
    /// Builds from labels. `arrows` are `(label, src, tgt)`, `mult` are `(g, h, gh)`.
    pub fn from_labels(
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        mult: &[(&str, &str, &str)],
        units: &[(&str, &str)],
        inverses: &[(&str, &str)],
    ) -> Result<Self, GroupoidError> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self::from_owned(
            own(objects),
            arrows.iter().map(|(a, s, t)| (a.to_string(), s.to_string(), t.to_string())).collect(),
            mult.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect(),
            units.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            inverses.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        )
    }

    pub fn from_owned(
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        mult: Vec<(String, String, String)>,
        units: Vec<(String, String)>,
        inverses: Vec<(String, String)>,
    ) -> Result<Self, GroupoidError> {
        let obj_index = index_labels(&objects)?;
        let arrow_labels: Vec<String> = arrows.iter().map(|a| a.0.clone()).collect();
        let arr_index = index_labels(&arrow_labels)?;
        let lookup = |m: &HashMap<String, usize>, s: &str| {
            m.get(s).copied().ok_or_else(|| GroupoidError::UnknownLabel(s.to_string()))
        };
        let arrows = arrows
            .into_iter()
            .map(|(label, s, t)| {
                Ok(Arrow { src: lookup(&obj_index, &s)?, tgt: lookup(&obj_index, &t)?, label })
            })
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        let mut table = HashMap::new();
        for (g, h, gh) in mult {
            let key = (lookup(&arr_index, &g)?, lookup(&arr_index, &h)?);
            if table.insert(key, lookup(&arr_index, &gh)?).is_some() {
                return Err(GroupoidError::DuplicateLabel(format!("{g}·{h}")));
            }
        }
        let mut unit = vec![usize::MAX; objects.len()];
        for (x, e) in units {
            unit[lookup(&obj_index, &x)?] = lookup(&arr_index, &e)?;
        }
        if let Some(x) = unit.iter().position(|&u| u == usize::MAX) {
            return Err(GroupoidError::UnknownLabel(format!("unit of {}", objects[x])));
        }
        let mut inv = vec![usize::MAX; arrows.len()];
        for (g, gi) in inverses {
            inv[lookup(&arr_index, &g)?] = lookup(&arr_index, &gi)?;
        }
        if let Some(g) = inv.iter().position(|&u| u == usize::MAX) {
            return Err(GroupoidError::UnknownLabel(format!("inverse of {}", arrows[g].label)));
        }
        Ok(FiniteGroupoid { objects, arrows, mult: table, unit, inv })
    }

    /// One-object groupoid from a group multiplication table, `table[a][b] = a·b`.
    /// The identity is detected from the table; the inverse is read off it.
    pub fn from_group_table(elements: &[String], table: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        let n = elements.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| GroupoidError::UnknownLabel("group identity".into()))?;
        let inv: Vec<usize> = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == identity).unwrap_or(a))
            .collect();
        let mut mult = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                mult.insert((a, b), table[a][b]);
            }
        }
        index_labels(elements)?;
        Ok(FiniteGroupoid {
            objects: vec!["*".to_string()],
            arrows: elements.iter().map(|l| Arrow { label: l.clone(), src: 0, tgt: 0 }).collect(),
            mult,
            unit: vec![identity],
            inv,
        })
    }

    /// The cyclic group ℤ/n with elements labelled `0..n`.
    pub fn cyclic(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_group_table(&labels, &table).expect("cyclic table")
    }

    /// The symmetric group on `n` letters, elements labelled by one-line notation.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        // (a·b)(i) = a(b(i))
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&b.iter().map(|&i| a[i]).collect::<Vec<_>>()]).collect())
            .collect();
        let labels: Vec<String> =
            perms.iter().map(|p| p.iter().map(|i| (i + 1).to_string()).collect::<String>()).collect();
        Self::from_group_table(&labels, &table).expect("symmetric table")
    }

    /// Pair groupoid `X × X ⇉ X`: arrow `(x,y)` goes from `y` to `x`.
    pub fn pair(points: &[String]) -> Result<Self, GroupoidError> {
        index_labels(points)?;
        let n = points.len();
        let id = |x: usize, y: usize| x * n + y;
        let arrows = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| Arrow { label: format!("({},{})", points[x], points[y]), src: y, tgt: x })
            .collect();
        let mut mult = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    mult.insert((id(x, y), id(y, z)), id(x, z));
                }
            }
        }
        Ok(FiniteGroupoid {
            objects: points.to_vec(),
            arrows,
            mult,
            unit: (0..n).map(|x| id(x, x)).collect(),
            inv: (0..n).flat_map(|x| (0..n).map(move |y| id(y, x))).collect(),
        })
    }

    /// Only units: `M ⇉ M`.
    pub fn identity(points: &[String]) -> Result<Self, GroupoidError> {
        index_labels(points)?;
        let n = points.len();
        Ok(FiniteGroupoid {
            objects: points.to_vec(),
            arrows: (0..n).map(|x| Arrow { label: format!("1_{}", points[x]), src: x, tgt: x }).collect(),
            mult: (0..n).map(|x| ((x, x), x)).collect(),
            unit: (0..n).collect(),
            inv: (0..n).collect(),
        })
    }

    /// Action groupoid of a right action `x ↦ x·γ` of a group on points.
    ///
    /// `right_action[x][γ]` is the index of `x·γ`; `group` must have one object.
    /// Arrow `(x, γ)` goes from `x·γ` to `x`, and `(x,γ)·(x·γ,γ') = (x, γγ')`.
    pub fn action(points: &[String], group: &FiniteGroupoid, right_action: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        index_labels(points)?;
        let n = points.len();
        let m = group.arrow_count();
        let id = |x: usize, g: usize| x * m + g;
        let arrows = (0..n)
            .flat_map(|x| (0..m).map(move |g| (x, g)))
            .map(|(x, g)| Arrow {
                label: format!("({},{})", points[x], group.arrows[g].label),
                src: right_action[x][g],
                tgt: x,
            })
            .collect();
        let mut mult = HashMap::new();
        for x in 0..n {
            for g in 0..m {
                let y = right_action[x][g];
                for h in 0..m {
                    if let Some(gh) = group.compose(g, h) {
                        mult.insert((id(x, g), id(y, h)), id(x, gh));
                    }
                }
            }
        }
        let e = group.unit[0];
        Ok(FiniteGroupoid {
            objects: points.to_vec(),
            arrows,
            mult,
            unit: (0..n).map(|x| id(x, e)).collect(),
            inv: (0..n)
                .flat_map(|x| (0..m).map(move |g| (x, g)))
                .map(|(x, g)| id(right_action[x][g], group.inv[g]))
                .collect(),
        })
    }

    /// Componentwise product `G1 × G2`.
    pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Self {
        let (na, nb) = (a.objects.len(), b.objects.len());
        let (ma, mb) = (a.arrows.len(), b.arrows.len());
        let _ = na;
        let oid = |x: usize, y: usize| x * nb + y;
        let aid = |g: usize, h: usize| g * mb + h;
        let objects = a
            .objects
            .iter()
            .flat_map(|x| b.objects.iter().map(move |y| format!("({x},{y})")))
            .collect();
        let arrows = (0..ma)
            .flat_map(|g| (0..mb).map(move |h| (g, h)))
            .map(|(g, h)| Arrow {
                label: format!("({},{})", a.arrows[g].label, b.arrows[h].label),
                src: oid(a.arrows[g].src, b.arrows[h].src),
                tgt: oid(a.arrows[g].tgt, b.arrows[h].tgt),
            })
            .collect();
        let mut mult = HashMap::new();
        for (&(g1, g2), &g12) in &a.mult {
            for (&(h1, h2), &h12) in &b.mult {
                mult.insert((aid(g1, h1), aid(g2, h2)), aid(g12, h12));
            }
        }
        FiniteGroupoid {
            objects,
            arrows,
            mult,
            unit: (0..a.objects.len())
                .flat_map(|x| (0..nb).map(move |y| (x, y)))
                .map(|(x, y)| aid(a.unit[x], b.unit[y]))
                .collect(),
            inv: (0..ma).flat_map(|g| (0..mb).map(move |h| (g, h))).map(|(g, h)| aid(a.inv[g], b.inv[h])).collect(),
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn src(&self, g: usize) -> usize {
        self.arrows[g].src
    }

    pub fn tgt(&self, g: usize) -> usize {
        self.arrows[g].tgt
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.mult.get(&(g, h)).copied()
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    /// The same groupoid with one product entry replaced (for mutation tests).
    pub fn with_product(&self, g: usize, h: usize, gh: usize) -> Self {
        let mut out = self.clone();
        out.mult.insert((g, h), gh);
        out
    }

    pub fn is_one_object(&self) -> bool {
        self.objects.len() == 1
    }
}

fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>, GroupoidError> {
    let mut m = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if m.insert(l.clone(), i).is_some() {
            return Err(GroupoidError::DuplicateLabel(l.clone()));
        }
    }
    Ok(m)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Exhaustively checks the groupoid axioms.
pub fn validate_groupoid(g: &FiniteGroupoid) -> Result<(), AxiomFailure> {
    let lbl = |a: usize| g.arrows[a].label.clone();
    let n = g.arrows.len();
    for a in 0..n {
        for b in 0..n {
            let composable = g.src(a) == g.tgt(b);
            match g.compose(a, b) {
                Some(ab) if composable => {
                    if g.src(ab) != g.src(b) || g.tgt(ab) != g.tgt(a) {
                        return Err(AxiomFailure::ProductEndpoints { g: lbl(a), h: lbl(b), gh: lbl(ab) });
                    }
                }
                None if !composable => {}
                _ => return Err(AxiomFailure::Composability { g: lbl(a), h: lbl(b) }),
            }
        }
    }
    for a in 0..n {
        for b in (0..n).filter(|&b| g.src(a) == g.tgt(b)) {
            let ab = g.compose(a, b).expect("checked");
            for c in (0..n).filter(|&c| g.src(b) == g.tgt(c)) {
                let bc = g.compose(b, c).expect("checked");
                if g.compose(ab, c) != g.compose(a, bc) {
                    return Err(AxiomFailure::Associativity { g: lbl(a), h: lbl(b), k: lbl(c) });
                }
            }
        }
    }
    for (x, &e) in g.unit.iter().enumerate() {
        if g.src(e) != x || g.tgt(e) != x {
            return Err(AxiomFailure::UnitEndpoints { object: g.objects[x].clone(), unit: lbl(e) });
        }
        for a in 0..n {
            let left_ok = g.tgt(a) != x || g.compose(e, a) == Some(a);
            let right_ok = g.src(a) != x || g.compose(a, e) == Some(a);
            if !(left_ok && right_ok) {
                return Err(AxiomFailure::Unit { object: g.objects[x].clone(), unit: lbl(e), arrow: lbl(a) });
            }
        }
    }
    for a in 0..n {
        let ai = g.inv[a];
        let ok = g.src(ai) == g.tgt(a)
            && g.tgt(ai) == g.src(a)
            && g.compose(a, ai) == Some(g.unit[g.tgt(a)])
            && g.compose(ai, a) == Some(g.unit[g.src(a)]);
        if !ok {
            return Err(AxiomFailure::Inverse { arrow: lbl(a), inverse: lbl(ai) });
        }
    }
    Ok(())
}

/// A point of the nerve at level `q`: `q` composable arrows, or an object when `q = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComposableTuple {
    components: Vec<usize>,
    object: Option<usize>,
}

impl ComposableTuple {
    pub fn object(x: usize) -> Self {
        ComposableTuple { components: Vec::new(), object: Some(x) }
    }

    /// Checks adjacency `src(g_i) = tgt(g_{i+1})`.
    pub fn arrows(g: &FiniteGroupoid, components: Vec<usize>) -> Result<Self, GroupoidError> {
        assert!(!components.is_empty(), "use ComposableTuple::object for level 0");
        if components.windows(2).any(|w| g.src(w[0]) != g.tgt(w[1])) {
            return Err(GroupoidError::NotComposable(components.len()));
        }
        Ok(ComposableTuple { components, object: None })
    }

    pub fn level(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    /// The object of a level-0 tuple.
    pub fn as_object(&self) -> Option<usize> {
        self.object
    }

    /// Vertex `x_i` for `0 ≤ i ≤ q`.
    pub fn vertex(&self, g: &FiniteGroupoid, i: usize) -> usize {
        match self.object {
            Some(x) => x,
            None if i == 0 => g.tgt(self.components[0]),
            None => g.src(self.components[i - 1]),
        }
    }

    pub fn display(&self, g: &FiniteGroupoid) -> String {
        match self.object {
            Some(x) => g.objects[x].clone(),
            None => {
                let parts: Vec<&str> = self.components.iter().map(|&a| g.arrows[a].label.as_str()).collect();
                format!("({})", parts.join(", "))
            }
        }
    }
}

/// All composable `q`-tuples in lexicographic order of arrow positions.
pub fn nerve(g: &FiniteGroupoid, q: usize) -> Vec<ComposableTuple> {
    if q == 0 {
        return (0..g.object_count()).map(ComposableTuple::object).collect();
    }
    let mut level: Vec<Vec<usize>> = (0..g.arrow_count()).map(|a| vec![a]).collect();
    for _ in 1..q {
        level = level
            .into_iter()
            .flat_map(|t| {
                let last_src = g.src(*t.last().expect("nonempty"));
                (0..g.arrow_count()).filter(move |&h| g.tgt(h) == last_src).map(move |h| {
                    let mut u = t.clone();
                    u.push(h);
                    u
                })
            })
            .collect();
    }
    level.into_iter().map(|components| ComposableTuple { components, object: None }).collect()
}

/// A nerve level with reverse lookup.
#[derive(Clone, Debug)]
pub struct NerveLevel {
    pub q: usize,
    pub tuples: Vec<ComposableTuple>,
    index: HashMap<ComposableTuple, usize>,
}

impl NerveLevel {
    pub fn new(g: &FiniteGroupoid, q: usize) -> Self {
        let tuples = nerve(g, q);
        let index = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        NerveLevel { q, tuples, index }
    }

    pub fn position(&self, t: &ComposableTuple) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Face map `σ_i^q`.
pub fn face(g: &FiniteGroupoid, q: usize, i: usize, t: &ComposableTuple) -> Result<ComposableTuple, GroupoidError> {
    if q == 0 || i > q {
        return Err(GroupoidError::IndexOutOfRange { level: q, index: i });
    }
    if t.level() != q {
        return Err(GroupoidError::IndexOutOfRange { level: t.level(), index: i });
    }
    let c = &t.components;
    if q == 1 {
        let a = c[0];
        return Ok(ComposableTuple::object(if i == 0 { g.src(a) } else { g.tgt(a) }));
    }
    let mut out = Vec::with_capacity(q - 1);
    if i == 0 {
        out.extend_from_slice(&c[1..]);
    } else if i == q {
        out.extend_from_slice(&c[..q - 1]);
    } else {
        out.extend_from_slice(&c[..i - 1]);
        out.push(g.compose(c[i - 1], c[i]).ok_or(GroupoidError::NotComposable(q))?);
        out.extend_from_slice(&c[i + 1..]);
    }
    Ok(ComposableTuple { components: out, object: None })
}

/// Degeneracy map `Δ_i^q`: inserts the unit at vertex `x_i`.
pub fn degeneracy(
    g: &FiniteGroupoid,
    q: usize,
    i: usize,
    t: &ComposableTuple,
) -> Result<ComposableTuple, GroupoidError> {
    if i > q || t.level() != q {
        return Err(GroupoidError::IndexOutOfRange { level: q, index: i });
    }
    let e = g.unit(t.vertex(g, i));
    let mut out = t.components.clone();
    out.insert(i, e);
    Ok(ComposableTuple { components: out, object: None })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("σ_{i}^{} ∘ σ_{j}^{q} ≠ σ_{}^{} ∘ σ_{i}^{q} on {tuple}", .q - 1, .j - 1, .q - 1)]
pub struct IdentityFailure {
    pub q: usize,
    pub i: usize,
    pub j: usize,
    pub tuple: String,
}

/// Checks `σ_i ∘ σ_j = σ_{j−1} ∘ σ_i` for `i < j ≤ q ≤ q_max` on every tuple.
pub fn check_simplicial_identities(g: &FiniteGroupoid, q_max: usize) -> Result<(), IdentityFailure> {
    check_simplicial_identities_with(g, q_max, face)
}

/// As [`check_simplicial_identities`], with a caller-supplied face map.
pub fn check_simplicial_identities_with<F>(g: &FiniteGroupoid, q_max: usize, face_fn: F) -> Result<(), IdentityFailure>
where
    F: Fn(&FiniteGroupoid, usize, usize, &ComposableTuple) -> Result<ComposableTuple, GroupoidError>,
{
    for q in 2..=q_max {
        for t in nerve(g, q) {
            for j in 1..=q {
                for i in 0..j {
                    let fail = || IdentityFailure { q, i, j, tuple: t.display(g) };
                    let lhs = face_fn(g, q, j, &t).and_then(|u| face_fn(g, q - 1, i, &u)).map_err(|_| fail())?;
                    let rhs = face_fn(g, q, i, &t).and_then(|u| face_fn(g, q - 1, j - 1, &u)).map_err(|_| fail())?;
                    if lhs != rhs {
                        return Err(fail());
                    }
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "groupoid with {} objects, {} arrows", self.objects.len(), self.arrows.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_groupoid(&FiniteGroupoid::cyclic(2)).is_ok());
        assert!(validate_groupoid(&FiniteGroupoid::pair(&pts(2)).unwrap()).is_ok());
        let z2 = FiniteGroupoid::cyclic(2);
        let broken = z2.with_product(1, 1, 1);
        assert!(validate_groupoid(&broken).is_err());
        for g in [FiniteGroupoid::symmetric(3), FiniteGroupoid::cyclic(5), FiniteGroupoid::identity(&pts(3)).unwrap()] {
            assert!(validate_groupoid(&g).is_ok());
        }
    }

    #[test]
    fn corrupted_square_fails_the_inverse_law() {
        let broken = FiniteGroupoid::cyclic(2).with_product(1, 1, 1);
        // the table is no longer associative either; whichever law is checked
        // first must name the arrow "1"
        let err = validate_groupoid(&broken).unwrap_err();
        assert!(err.to_string().contains('1'));
        let g = FiniteGroupoid::from_labels(
            &["*"],
            &[("e", "*", "*"), ("a", "*", "*")],
            &[("e", "e", "e"), ("e", "a", "a"), ("a", "e", "a"), ("a", "a", "a")],
            &[("*", "e")],
            &[("e", "e"), ("a", "a")],
        )
        .unwrap();
        // a·a = a is associative and unital, so only the inverse law fails
        assert_eq!(
            validate_groupoid(&g),
            Err(AxiomFailure::Inverse { arrow: "a".into(), inverse: "a".into() })
        );
    }

    #[test]
    fn nerve_counts() {
        let p2 = FiniteGroupoid::pair(&pts(2)).unwrap();
        for q in 0..5 {
            assert_eq!(nerve(&p2, q).len(), 1 << (q + 1));
        }
        let z3 = FiniteGroupoid::cyclic(3);
        for q in 0..5 {
            assert_eq!(nerve(&z3, q).len(), 3usize.pow(q as u32));
        }
        let objs: Vec<_> = nerve(&p2, 0).iter().map(|t| t.as_object().unwrap()).collect();
        assert_eq!(objs, vec![0, 1]);
    }

    #[test]
    fn face_examples() {
        let g = FiniteGroupoid::symmetric(3);
        let (a, b) = (1, 2);
        let t = ComposableTuple::arrows(&g, vec![a, b]).unwrap();
        let ab = g.compose(a, b).unwrap();
        assert_eq!(face(&g, 2, 1, &t).unwrap().components(), &[ab]);
        assert_eq!(face(&g, 2, 0, &t).unwrap().components(), &[b]);
        assert_eq!(face(&g, 2, 2, &t).unwrap().components(), &[a]);
        let p = FiniteGroupoid::pair(&pts(2)).unwrap();
        let xy = p.arrow_index("(1,2)").unwrap();
        let one = ComposableTuple::arrows(&p, vec![xy]).unwrap();
        assert_eq!(face(&p, 1, 1, &one).unwrap().as_object(), Some(p.tgt(xy)));
        assert_eq!(face(&p, 1, 0, &one).unwrap().as_object(), Some(p.src(xy)));
        assert!(matches!(face(&p, 1, 2, &one), Err(GroupoidError::IndexOutOfRange { .. })));
    }

    #[test]
    fn degeneracy_examples() {
        let p = FiniteGroupoid::pair(&pts(2)).unwrap();
        let x = ComposableTuple::object(0);
        assert_eq!(degeneracy(&p, 0, 0, &x).unwrap().components(), &[p.unit(0)]);
        let g = p.arrow_index("(1,2)").unwrap();
        let t = ComposableTuple::arrows(&p, vec![g]).unwrap();
        assert_eq!(degeneracy(&p, 1, 0, &t).unwrap().components(), &[p.unit(p.tgt(g)), g]);
        assert_eq!(degeneracy(&p, 1, 1, &t).unwrap().components(), &[g, p.unit(p.src(g))]);
        assert!(degeneracy(&p, 1, 2, &t).is_err());
    }

    #[test]
    fn simplicial_identities_hold() {
        for g in [FiniteGroupoid::symmetric(3), FiniteGroupoid::cyclic(2)] {
            assert!(check_simplicial_identities(&g, 4).is_ok());
        }
        assert!(check_simplicial_identities(&FiniteGroupoid::pair(&pts(3)).unwrap(), 3).is_ok());
    }

    #[test]
    fn wrong_face_is_detected() {
        let g = FiniteGroupoid::pair(&pts(3)).unwrap();
        let wrong = |g: &FiniteGroupoid, q: usize, i: usize, t: &ComposableTuple| {
            if i == 0 && q >= 2 {
                // multiply the first pair instead of dropping g_1
                let c = t.components();
                let mut out = vec![g.compose(c[0], c[1]).ok_or(GroupoidError::NotComposable(q))?];
                out.extend_from_slice(&c[2..]);
                return ComposableTuple::arrows(g, out);
            }
            face(g, q, i, t)
        };
        assert!(check_simplicial_identities_with(&g, 3, wrong).is_err());
    }

    #[test]
    fn action_groupoid_is_valid() {
        let z2 = FiniteGroupoid::cyclic(2);
        // ℤ/2 swapping two points
        let act = vec![vec![0, 1], vec![1, 0]];
        let g = FiniteGroupoid::action(&pts(2), &z2, &act).unwrap();
        assert!(validate_groupoid(&g).is_ok());
        assert_eq!(g.arrow_count(), 4);
        let prod = FiniteGroupoid::product(&z2, &FiniteGroupoid::pair(&pts(2)).unwrap());
        assert!(validate_groupoid(&prod).is_ok());
        assert_eq!(nerve(&prod, 2).len(), 4 * 8);
    }
}
