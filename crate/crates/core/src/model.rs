//! The `laq-v1` model format: a JSON document naming a builder with its
//! arguments, or spelling out every table explicitly.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use thiserror::Error;

use crate::builders::{
    equivariant, pair_zero, product, trivial_algebroid, trivial_groupoid, vacant_matched_pair, BuildError,
    GroupActionOnBundle,
};
use crate::exactla::{Rational, SparseMatrix};
use crate::fingroupoid::FiniteGroupoid;
use crate::laq::{LaGroupoid, LaParts};
use crate::liealg::{LieAlgebra, LieFiberBundle, StructureConstants};

pub const FORMAT_TAG: &str = "laq-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("at {path}: {message}")]
    Document { path: String, message: String },
    #[error(transparent)]
    Build(#[from] BuildError),
}

impl ModelError {
    /// Whether the document itself is malformed, as opposed to describing
    /// data the builders reject.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, ModelError::Build(_))
    }
}

fn doc_err(path: impl Into<String>, message: impl ToString) -> ModelError {
    ModelError::Document { path: path.into(), message: message.to_string() }
}

/// A rational written as an integer or an `"a/b"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatValue(pub Rational);

impl<'de> Deserialize<'de> for RatValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"numerator/denominator\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RatValue, E> {
                Ok(RatValue(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RatValue, E> {
                Ok(RatValue(Rational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<RatValue, E> {
                parse_rational(v).map(RatValue).ok_or_else(|| E::custom(format!("bad rational {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let int = |t: &str| {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then(|| t.parse().ok()).flatten()
    };
    match s.split_once('/') {
        None => int(s).map(Rational::from_integer),
        Some((n, d)) => {
            let (n, d) = (int(n)?, int(d)?);
            (d != 0.into()).then(|| Rational::new(n, d))
        }
    }
}

type Matrix = Vec<Vec<RatValue>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    /// `"sl2"`, `"heisenberg"`, `"zero"` or `"abelian<n>"`.
    Named(String),
    Table {
        dim: usize,
        #[serde(default)]
        brackets: Vec<(usize, usize, usize, RatValue)>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidTables {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub mult: Vec<(String, String, String)>,
    pub units: IndexMap<String, String>,
    pub inverses: IndexMap<String, String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTable {
    pub elements: Vec<String>,
    /// `table[a][b]` is the label of `a·b`.
    pub table: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupoidSpec {
    Cyclic(usize),
    Symmetric(usize),
    Pair(Vec<String>),
    Identity(Vec<String>),
    Group(GroupTable),
    Tables(GroupoidTables),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub fibers: IndexMap<String, AlgebraSpec>,
    pub source_maps: IndexMap<String, Matrix>,
    pub target_maps: IndexMap<String, Matrix>,
    pub mult_maps: IndexMap<String, Matrix>,
    pub unit_maps: IndexMap<String, Matrix>,
    pub inverse_maps: IndexMap<String, Matrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub mult: Vec<(String, String, String)>,
    pub units: IndexMap<String, String>,
    pub inverses: IndexMap<String, String>,
    pub algebroid: IndexMap<String, AlgebraSpec>,
    pub omega: OmegaSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderName {
    TrivialGroupoid,
    TrivialAlgebroid,
    Equivariant,
    Vacant,
    PairZero,
    Product,
}

/// A parsed document before any structure is built.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format: Option<String>,
    pub builder: Option<BuilderName>,
    pub explicit: Option<ExplicitSpec>,
    pub points: Option<Vec<String>>,
    pub algebra: Option<AlgebraSpec>,
    pub algebroid: Option<IndexMap<String, AlgebraSpec>>,
    pub group: Option<GroupoidSpec>,
    pub groupoid: Option<GroupoidSpec>,
    /// `action[x][γ]` is the label of `x·γ`; omitted points are fixed.
    pub action: Option<IndexMap<String, IndexMap<String, String>>>,
    pub lifts: Option<IndexMap<String, Matrix>>,
    pub left: Option<Box<ModelDocument>>,
    pub right: Option<Box<ModelDocument>>,
}

/// Parses a document without building it.
pub fn parse_document(bytes: &[u8]) -> Result<ModelDocument, ModelError> {
    let doc: ModelDocument = serde_json::from_slice(bytes)
        .map_err(|e| ModelError::Syntax { line: e.line(), column: e.column(), message: strip_position(&e) })?;
    match doc.format.as_deref() {
        Some(FORMAT_TAG) => Ok(doc),
        Some(other) => Err(doc_err("format", format!("expected {FORMAT_TAG:?}, found {other:?}"))),
        None => Err(doc_err("format", "missing format tag")),
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Parses and builds a model.
pub fn load(bytes: &[u8]) -> Result<LaGroupoid, ModelError> {
    build(&parse_document(bytes)?, "")
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn require<'a, T>(v: &'a Option<T>, path: &str, field: &str) -> Result<&'a T, ModelError> {
    v.as_ref().ok_or_else(|| doc_err(join(path, field), "required field is missing"))
}

pub fn build(doc: &ModelDocument, path: &str) -> Result<LaGroupoid, ModelError> {
    match (doc.builder, &doc.explicit) {
        (Some(_), Some(_)) => Err(doc_err(path_or_root(path), "give either \"builder\" or \"explicit\", not both")),
        (None, None) => Err(doc_err(path_or_root(path), "expected \"builder\" or \"explicit\"")),
        (None, Some(e)) => build_explicit(e, &join(path, "explicit")),
        (Some(name), None) => build_named(name, doc, path),
    }
}

fn path_or_root(path: &str) -> &str {
    if path.is_empty() {
        "$"
    } else {
        path
    }
}

fn build_named(name: BuilderName, doc: &ModelDocument, path: &str) -> Result<LaGroupoid, ModelError> {
    Ok(match name {
        BuilderName::TrivialGroupoid => trivial_groupoid(&groupoid(require(&doc.group, path, "group")?, &join(path, "group"))?),
        BuilderName::TrivialAlgebroid => trivial_algebroid(&bundle(doc, path)?),
        BuilderName::PairZero => pair_zero(require(&doc.points, path, "points")?)?,
        BuilderName::Product => {
            let left = build(require(&doc.left, path, "left")?, &join(path, "left"))?;
            let right = build(require(&doc.right, path, "right")?, &join(path, "right"))?;
            product(&left, &right)
        }
        BuilderName::Vacant => {
            let g = groupoid(require(&doc.groupoid, path, "groupoid")?, &join(path, "groupoid"))?;
            let a = bundle(doc, path)?;
            if a.labels() != g.objects() {
                return Err(doc_err(join(path, "points"), "bundle points must match the groupoid objects in order"));
            }
            let lifts = lift_table(doc, path, &g, &a, |h| (g.src(h), g.tgt(h)), g.arrows().iter().map(|a| a.label.clone()))?;
            vacant_matched_pair(&g, &a, lifts)?
        }
        BuilderName::Equivariant => {
            let gpath = join(path, "group");
            let group = groupoid(require(&doc.group, path, "group")?, &gpath)?;
            if !group.is_one_object() {
                return Err(doc_err(gpath, "expected a group"));
            }
            let a = bundle(doc, path)?;
            let point_action = point_action(doc, path, &a, &group)?;
            let m = group.arrow_count();
            let mut lifts = Vec::new();
            for x in 0..a.len() {
                let row = lift_table(
                    doc,
                    path,
                    &group,
                    &a,
                    |h| (point_action[x][h], x),
                    group.arrows().iter().map(|a| a.label.clone()),
                )?;
                lifts.push(row);
            }
            debug_assert!(lifts.iter().all(|r| r.len() == m));
            equivariant(&a, &GroupActionOnBundle { group, point_action, lifts })?
        }
    })
}

fn point_action(
    doc: &ModelDocument,
    path: &str,
    a: &LieFiberBundle,
    group: &FiniteGroupoid,
) -> Result<Vec<Vec<usize>>, ModelError> {
    let n = a.len();
    let mut table: Vec<Vec<usize>> = (0..n).map(|x| vec![x; group.arrow_count()]).collect();
    let Some(action) = &doc.action else { return Ok(table) };
    let apath = join(path, "action");
    let point = |label: &str, at: &str| {
        a.labels().iter().position(|l| l == label).ok_or_else(|| doc_err(at, format!("unknown point {label:?}")))
    };
    for (x, row) in action {
        let xi = point(x, &apath)?;
        for (gamma, y) in row {
            let at = format!("{apath}.{x}.{gamma}");
            let g = group.arrow_index(gamma).ok_or_else(|| doc_err(&at, format!("unknown group element {gamma:?}")))?;
            table[xi][g] = point(y, &at)?;
        }
    }
    Ok(table)
}

/// Lift matrices keyed by arrow label; a missing unit defaults to the identity.
fn lift_table(
    doc: &ModelDocument,
    path: &str,
    g: &FiniteGroupoid,
    a: &LieFiberBundle,
    ends: impl Fn(usize) -> (usize, usize),
    labels: impl Iterator<Item = String>,
) -> Result<Vec<SparseMatrix>, ModelError> {
    let lpath = join(path, "lifts");
    let lifts = require(&doc.lifts, path, "lifts")?;
    for key in lifts.keys() {
        if g.arrow_index(key).is_none() {
            return Err(doc_err(format!("{lpath}.{key}"), "no such arrow"));
        }
    }
    let units: Vec<usize> = (0..g.object_count()).map(|x| g.unit(x)).collect();
    labels
        .enumerate()
        .map(|(h, label)| {
            let (from, to) = ends(h);
            let (rows, cols) = (a.fiber(to).dim(), a.fiber(from).dim());
            match lifts.get(&label) {
                Some(m) => matrix(m, rows, cols, &format!("{lpath}.{label}")),
                None if units.contains(&h) && rows == cols => Ok(SparseMatrix::identity(rows)),
                None => Err(doc_err(format!("{lpath}.{label}"), "missing lift")),
            }
        })
        .collect()
}

fn bundle(doc: &ModelDocument, path: &str) -> Result<LieFiberBundle, ModelError> {
    match (&doc.algebra, &doc.algebroid) {
        (Some(alg), None) => {
            let points = doc.points.clone().unwrap_or_else(|| vec!["*".to_string()]);
            let a = algebra(alg, &join(path, "algebra"))?;
            Ok(LieFiberBundle::constant(points, &a))
        }
        (None, Some(map)) => {
            let apath = join(path, "algebroid");
            if let Some(points) = &doc.points {
                if !points.iter().eq(map.keys()) {
                    return Err(doc_err(apath, "keys must list the points in order"));
                }
            }
            let fibers = map.iter().map(|(k, v)| algebra(v, &format!("{apath}.{k}"))).collect::<Result<_, _>>()?;
            Ok(LieFiberBundle::new(map.keys().cloned().collect(), fibers))
        }
        (Some(_), Some(_)) => Err(doc_err(path_or_root(path), "give either \"algebra\" or \"algebroid\", not both")),
        (None, None) => Err(doc_err(join(path, "algebra"), "required field is missing")),
    }
}

/// Brackets are 1-based `[i, j, k, c]` meaning `[e_i, e_j]` has `c` along `e_k`.
/// Jacobi is not checked here.
pub fn algebra(spec: &AlgebraSpec, path: &str) -> Result<LieAlgebra, ModelError> {
    match spec {
        AlgebraSpec::Named(name) => match name.as_str() {
            "sl2" => Ok(LieAlgebra::sl2()),
            "heisenberg" => Ok(LieAlgebra::heisenberg()),
            "zero" => Ok(LieAlgebra::abelian(0)),
            other => other
                .strip_prefix("abelian")
                .and_then(|n| n.parse().ok())
                .map(LieAlgebra::abelian)
                .ok_or_else(|| doc_err(path, format!("unknown algebra {other:?}"))),
        },
        AlgebraSpec::Table { dim, brackets } => {
            let mut entries = Vec::with_capacity(brackets.len());
            for (n, (i, j, k, c)) in brackets.iter().enumerate() {
                let at = format!("{path}.brackets[{n}]");
                if [*i, *j, *k].iter().any(|&x| x == 0 || x > *dim) {
                    return Err(doc_err(at, format!("indices must lie in 1..={dim}")));
                }
                if i >= j {
                    return Err(doc_err(at, "brackets are listed with i < j"));
                }
                entries.push((i - 1, j - 1, k - 1, c.0.clone()));
            }
            let constants = StructureConstants::from_brackets(*dim, entries).map_err(|e| doc_err(path, e))?;
            Ok(LieAlgebra::from_constants_unchecked(constants))
        }
    }
}

pub fn matrix(m: &Matrix, rows: usize, cols: usize, path: &str) -> Result<SparseMatrix, ModelError> {
    if m.len() != rows {
        return Err(doc_err(path, format!("expected {rows}×{cols}, found {} rows", m.len())));
    }
    if let Some((r, row)) = m.iter().enumerate().find(|(_, row)| row.len() != cols) {
        return Err(doc_err(path, format!("expected {rows}×{cols}, row {} has {} entries", r + 1, row.len())));
    }
    Ok(SparseMatrix::from_triplets(
        rows,
        cols,
        m.iter().enumerate().flat_map(|(r, row)| row.iter().enumerate().map(move |(c, v)| (r, c, v.0.clone()))),
    ))
}

pub fn groupoid(spec: &GroupoidSpec, path: &str) -> Result<FiniteGroupoid, ModelError> {
    let gerr = |e: crate::fingroupoid::GroupoidError| doc_err(path, e);
    match spec {
        GroupoidSpec::Cyclic(0) | GroupoidSpec::Symmetric(0) => Err(doc_err(path, "order must be positive")),
        GroupoidSpec::Cyclic(n) => Ok(FiniteGroupoid::cyclic(*n)),
        GroupoidSpec::Symmetric(n) if *n > 6 => Err(doc_err(path, "symmetric groups are supported up to 6 letters")),
        GroupoidSpec::Symmetric(n) => Ok(FiniteGroupoid::symmetric(*n)),
        GroupoidSpec::Pair(points) => FiniteGroupoid::pair(points).map_err(gerr),
        GroupoidSpec::Identity(points) => FiniteGroupoid::identity(points).map_err(gerr),
        GroupoidSpec::Group(t) => {
            let index: HashMap<&str, usize> = t.elements.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            if t.table.len() != t.elements.len() {
                return Err(doc_err(format!("{path}.table"), "one row per element required"));
            }
            let mut rows = Vec::new();
            for (r, row) in t.table.iter().enumerate() {
                if row.len() != t.elements.len() {
                    return Err(doc_err(format!("{path}.table[{r}]"), "one entry per element required"));
                }
                let row = row
                    .iter()
                    .map(|s| index.get(s.as_str()).copied().ok_or_else(|| doc_err(format!("{path}.table[{r}]"), format!("unknown element {s:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            FiniteGroupoid::from_group_table(&t.elements, &rows).map_err(gerr)
        }
        GroupoidSpec::Tables(t) => tables(&t.objects, &t.arrows, &t.mult, &t.units, &t.inverses, path),
    }
}

fn tables(
    objects: &[String],
    arrows: &[ArrowSpec],
    mult: &[(String, String, String)],
    units: &IndexMap<String, String>,
    inverses: &IndexMap<String, String>,
    path: &str,
) -> Result<FiniteGroupoid, ModelError> {
    FiniteGroupoid::from_owned(
        objects.to_vec(),
        arrows.iter().map(|a| (a.id.clone(), a.src.clone(), a.tgt.clone())).collect(),
        mult.to_vec(),
        units.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        inverses.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
    )
    .map_err(|e| doc_err(path, e))
}

/// Splits a `"g,h"` key into two arrow indices; labels may contain commas.
fn split_pair(g: &FiniteGroupoid, key: &str) -> Option<(usize, usize)> {
    key.match_indices(',').find_map(|(i, _)| Some((g.arrow_index(&key[..i])?, g.arrow_index(&key[i + 1..])?)))
}

fn build_explicit(e: &ExplicitSpec, path: &str) -> Result<LaGroupoid, ModelError> {
    let base = tables(&e.objects, &e.arrows, &e.mult, &e.units, &e.inverses, path)?;
    let apath = join(path, "algebroid");
    if !e.objects.iter().eq(e.algebroid.keys()) {
        return Err(doc_err(apath, "keys must list the objects in order"));
    }
    let side_fibers = e.algebroid.iter().map(|(k, v)| algebra(v, &format!("{apath}.{k}"))).collect::<Result<Vec<_>, _>>()?;
    let side = LieFiberBundle::new(e.objects.clone(), side_fibers);
    let o = &e.omega;
    let opath = join(path, "omega");
    let labels: Vec<String> = base.arrows().iter().map(|a| a.label.clone()).collect();
    let fpath = format!("{opath}.fibers");
    if !labels.iter().eq(o.fibers.keys()) {
        return Err(doc_err(fpath, "keys must list the arrows in order"));
    }
    let top_fibers = o.fibers.iter().map(|(k, v)| algebra(v, &format!("{fpath}.{k}"))).collect::<Result<Vec<_>, _>>()?;
    let top = LieFiberBundle::new(labels.clone(), top_fibers);
    let a = |x: usize| side.fiber(x).dim();
    let w = |h: usize| top.fiber(h).dim();

    let per_key = |map: &IndexMap<String, Matrix>, field: &str, keys: &[String], shape: &dyn Fn(usize) -> (usize, usize)| {
        let at = format!("{opath}.{field}");
        if let Some(k) = map.keys().find(|k| !keys.contains(k)) {
            return Err(doc_err(format!("{at}.{k}"), "unknown key"));
        }
        keys.iter()
            .enumerate()
            .map(|(i, k)| {
                let m = map.get(k).ok_or_else(|| doc_err(format!("{at}.{k}"), "missing matrix"))?;
                let (r, c) = shape(i);
                matrix(m, r, c, &format!("{at}.{k}"))
            })
            .collect::<Result<Vec<_>, ModelError>>()
    };
    let src_lin = per_key(&o.source_maps, "source_maps", &labels, &|h| (a(base.src(h)), w(h)))?;
    let tgt_lin = per_key(&o.target_maps, "target_maps", &labels, &|h| (a(base.tgt(h)), w(h)))?;
    let inv_lin = per_key(&o.inverse_maps, "inverse_maps", &labels, &|h| (w(base.inverse(h)), w(h)))?;
    let unit_lin = per_key(&o.unit_maps, "unit_maps", &e.objects, &|x| (w(base.unit(x)), a(x)))?;

    let mpath = format!("{opath}.mult_maps");
    let mut mult_lin = HashMap::new();
    for (key, m) in &o.mult_maps {
        let at = format!("{mpath}.{key}");
        let (g, h) = split_pair(&base, key).ok_or_else(|| doc_err(&at, "expected \"g,h\" with two arrow labels"))?;
        let gh = base.compose(g, h).ok_or_else(|| doc_err(&at, "arrows are not composable"))?;
        mult_lin.insert((g, h), matrix(m, w(gh), w(g) + w(h), &at)?);
    }
    for g in 0..base.arrow_count() {
        for h in 0..base.arrow_count() {
            if base.compose(g, h).is_some() && !mult_lin.contains_key(&(g, h)) {
                return Err(doc_err(format!("{mpath}.{},{}", labels[g], labels[h]), "missing matrix"));
            }
        }
    }
    LaGroupoid::from_parts(LaParts { base, side, top, src_lin, tgt_lin, mult_lin, unit_lin, inv_lin })
        .map_err(|f| doc_err(opath, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::ratio;
    use crate::laq::validate_la;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("+4"), Some(ratio(4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1.5"), None);
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let err = load(b"{\n  \"format\": \"laq-v1\",\n  \"builder\": 3\n}").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 3, .. }), "{err:?}");
        let err = load(b"{\"builder\": \"pair_zero\", \"points\": [\"a\"]}").unwrap_err();
        assert!(matches!(err, ModelError::Document { ref path, .. } if path == "format"), "{err:?}");
        let err = load(b"{\"format\": \"laq-v1\", \"builder\": \"pair_zero\", \"points\": [\"a\"], \"extra\": 1}").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { .. }), "{err:?}");
        assert!(load(b"").unwrap_err().is_parse_error());
        assert!(load(&[0xff, 0xfe]).unwrap_err().is_parse_error());
    }

    #[test]
    fn builders_by_name() {
        let l = load(br#"{"format":"laq-v1","builder":"trivial_algebroid","algebra":{"dim":3,"brackets":[[1,2,2,2],[1,3,3,-2],[2,3,1,1]]}}"#).unwrap();
        assert_eq!(l, trivial_algebroid(&LieFiberBundle::constant(vec!["*".into()], &LieAlgebra::sl2())));
        let l = load(br#"{"format":"laq-v1","builder":"equivariant","algebra":"abelian2","group":{"cyclic":2},"lifts":{"1":[[0,1],[1,0]]}}"#).unwrap();
        validate_la(&l).unwrap();
        assert_eq!(l.base().arrow_count(), 2);
        let l = load(br#"{"format":"laq-v1","builder":"product","left":{"builder":"pair_zero","points":["a","b"]},"right":{"builder":"trivial_groupoid","group":{"cyclic":3}}}"#).unwrap();
        assert_eq!(l.base().arrow_count(), 12);
    }

    #[test]
    fn equivariant_moving_points() {
        let doc = br#"{"format":"laq-v1","builder":"equivariant","points":["a","b"],"algebra":"abelian1",
            "group":{"cyclic":2},"action":{"a":{"1":"b"},"b":{"1":"a"}},"lifts":{"1":[[-1]]}}"#;
        let l = load(doc).unwrap();
        validate_la(&l).unwrap();
        assert_eq!(l.base().object_count(), 2);
        assert_eq!(l.base().src(l.base().arrow_index("(a,1)").unwrap()), 1);
    }

    #[test]
    fn document_errors_carry_paths() {
        let err = load(br#"{"format":"laq-v1","builder":"equivariant","algebra":"abelian2","group":{"cyclic":2},"lifts":{"1":[[0,1]]}}"#).unwrap_err();
        assert_eq!(err, doc_err("lifts.1", "expected 2×2, found 1 rows"));
        let err = load(br#"{"format":"laq-v1","builder":"product","left":{"builder":"pair_zero"},"right":{"builder":"pair_zero","points":["a"]}}"#).unwrap_err();
        assert_eq!(err, doc_err("left.points", "required field is missing"));
        let err = load(br#"{"format":"laq-v1","builder":"trivial_algebroid","algebra":{"dim":2,"brackets":[[1,3,1,1]]}}"#).unwrap_err();
        assert!(matches!(err, ModelError::Document { ref path, .. } if path == "algebra.brackets[0]"));
    }

    #[test]
    fn non_automorphism_is_a_build_error() {
        let err = load(br#"{"format":"laq-v1","builder":"equivariant","algebra":"sl2","group":{"cyclic":2},"lifts":{"1":[[1,0,0],[0,0,1],[0,1,0]]}}"#).unwrap_err();
        assert!(matches!(err, ModelError::Build(BuildError::ActionInvalid { .. })), "{err:?}");
        assert!(!err.is_parse_error());
    }

    #[test]
    fn pair_keys_with_commas() {
        let g = FiniteGroupoid::pair(&["a".to_string(), "b".to_string()]).unwrap();
        assert_eq!(split_pair(&g, "(a,b),(b,a)"), Some((1, 2)));
        assert_eq!(split_pair(&g, "(a,b)"), None);
    }
}
