//! Brute-force reference computations on dense rational matrices.
//!
//! Nothing here calls the sparse engine: ranks come from plain Gaussian
//! elimination, Chevalley–Eilenberg matrices from the evaluation formula on
//! basis vectors, exterior powers from minors, and groupoid cochains from a
//! direct enumeration of composable tuples.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::exactla::Rational;

pub type Dense = Vec<Vec<Rational>>;

fn zeros(r: usize, c: usize) -> Dense {
    vec![vec![Rational::zero(); c]; r]
}

/// Row reduction in place; returns the pivot columns.
fn reduce(m: &mut Dense) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn dense_rank(m: &Dense) -> usize {
    let mut a = m.clone();
    reduce(&mut a).len()
}

/// Null-space basis, one vector per free column.
pub fn dense_nullspace(m: &Dense, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    let pivots = reduce(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

pub fn dense_mul(a: &Dense, b: &Dense, inner: usize, cols: usize) -> Dense {
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                let t = &row[k] * &b[k][j];
                out[i][j] += t;
            }
        }
    }
    out
}

fn det(mut m: Dense) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    d
}

/// Increasing `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Dense structure constants `c[i][j][k]`, antisymmetric in `i, j`.
#[derive(Clone, Debug)]
pub struct Table {
    pub dim: usize,
    pub c: Vec<Vec<Vec<Rational>>>,
}

impl Table {
    /// From 0-based `(i, j, k, value)` with `i < j`.
    pub fn new(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Self {
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, k, v) in entries {
            c[*i][*j][*k] += v;
            c[*j][*i][*k] -= v;
        }
        Table { dim, c }
    }

    pub fn from_i64(dim: usize, entries: &[(usize, usize, usize, i64)]) -> Self {
        let e: Vec<_> = entries.iter().map(|&(i, j, k, v)| (i, j, k, Rational::from_integer(v.into()))).collect();
        Self::new(dim, &e)
    }
}

/// `Σ_cyclic [[e_i, e_j], e_l]` vanishes for every triple.
pub fn jacobi_holds(t: &Table) -> bool {
    let n = t.dim;
    let nested = |i: usize, j: usize, l: usize| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for k in 0..n {
            if t.c[i][j][k].is_zero() {
                continue;
            }
            for (m, o) in out.iter_mut().enumerate() {
                *o += &t.c[i][j][k] * &t.c[k][l][m];
            }
        }
        out
    };
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let (a, b, c) = (nested(i, j, l), nested(j, l, i), nested(l, i, j));
                if (0..n).any(|m| !(&a[m] + &b[m] + &c[m]).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

/// `ξ^I(e_{k}, e_{J…})` for a sorted `I`: the sign of sorting `(k, J…)`, or 0.
fn eval_basis_form(form: &[usize], args: &[usize]) -> i64 {
    let mut sorted = args.to_vec();
    let mut sign = 1;
    // bubble sort, counting swaps
    for a in 0..sorted.len() {
        for b in 0..sorted.len() - 1 - a {
            if sorted[b] == sorted[b + 1] {
                return 0;
            }
            if sorted[b] > sorted[b + 1] {
                sorted.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    if sorted == form {
        sign
    } else {
        0
    }
}

/// Chevalley–Eilenberg differential `⋀^p → ⋀^{p+1}` from
/// `(dω)(x_0, …, x_p) = Σ_{i<j} (−1)^{i+j} ω([x_i, x_j], x_0, …, x̂_i, …, x̂_j, …)`.
pub fn ce_dense(t: &Table, p: usize) -> Dense {
    let n = t.dim;
    let src = subsets(n, p);
    let tgt = subsets(n, p + 1);
    let mut m = zeros(tgt.len(), src.len());
    for (r, args) in tgt.iter().enumerate() {
        for (col, form) in src.iter().enumerate() {
            let mut acc = Rational::zero();
            for i in 0..=p {
                for j in i + 1..=p {
                    let rest: Vec<usize> =
                        args.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, &x)| x).collect();
                    for k in 0..n {
                        let c = &t.c[args[i]][args[j]][k];
                        if c.is_zero() {
                            continue;
                        }
                        let mut full = vec![k];
                        full.extend_from_slice(&rest);
                        let s = eval_basis_form(form, &full) * if (i + j) % 2 == 0 { 1 } else { -1 };
                        if s != 0 {
                            acc += c * Rational::from_integer(s.into());
                        }
                    }
                }
            }
            m[r][col] = acc;
        }
    }
    m
}

/// `dim H^p` of the Lie algebra for `p ≤ top`.
pub fn ce_dims(t: &Table, top: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=top).map(|p| dense_rank(&ce_dense(t, p))).collect();
    (0..=top)
        .map(|p| subsets(t.dim, p).len() - ranks[p] - if p == 0 { 0 } else { ranks[p - 1] })
        .collect()
}

/// `⋀^p θ*` on `p`-forms: the coefficient of `ξ^J` in `θ*ξ^I` is `det θ[I, J]`.
pub fn exterior_pullback(theta: &Dense, p: usize) -> Dense {
    let n = theta.len();
    let basis = subsets(n, p);
    let mut m = zeros(basis.len(), basis.len());
    for (col, i) in basis.iter().enumerate() {
        for (row, j) in basis.iter().enumerate() {
            let minor: Dense = i.iter().map(|&a| j.iter().map(|&b| theta[a][b].clone()).collect()).collect();
            m[row][col] = det(minor);
        }
    }
    m
}

/// Basis (as columns) of the forms fixed by `⋀^p θ*`.
pub fn invariant_forms(theta: &Dense, p: usize) -> Dense {
    let mut a = exterior_pullback(theta, p);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= Rational::one();
    }
    let k = a.len();
    let null = dense_nullspace(&a, k);
    (0..k).map(|r| null.iter().map(|v| v[r].clone()).collect()).collect()
}

/// Dimension of invariant forms in each degree.
pub fn invariant_form_dims(theta: &Dense) -> Vec<usize> {
    (0..=theta.len()).map(|p| invariant_forms(theta, p).first().map_or(0, Vec::len)).collect()
}

/// Cohomology of the invariant Chevalley–Eilenberg subcomplex for an
/// automorphism `θ` of finite order.
pub fn invariant_ce_dims(t: &Table, theta: &Dense, top: usize) -> Vec<usize> {
    let n = t.dim;
    let inv_dims: Vec<usize> =
        (0..=top + 1).map(|p| if p > n { 0 } else { invariant_forms(theta, p).first().map_or(0, Vec::len) }).collect();
    let ranks: Vec<usize> = (0..=top)
        .map(|p| {
            if p >= n || inv_dims[p] == 0 {
                return 0;
            }
            let b = invariant_forms(theta, p);
            dense_rank(&dense_mul(&ce_dense(t, p), &b, b.len(), inv_dims[p]))
        })
        .collect();
    (0..=top).map(|p| inv_dims[p] - ranks[p] - if p == 0 { 0 } else { ranks[p - 1] }).collect()
}

/// A groupoid as bare tables.
#[derive(Clone, Debug)]
pub struct PlainGroupoid {
    pub objects: usize,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub mult: HashMap<(usize, usize), usize>,
}

impl PlainGroupoid {
    pub fn group(table: &[Vec<usize>]) -> Self {
        let n = table.len();
        let mut mult = HashMap::new();
        for (a, row) in table.iter().enumerate() {
            for (b, &ab) in row.iter().enumerate() {
                mult.insert((a, b), ab);
            }
        }
        PlainGroupoid { objects: 1, src: vec![0; n], tgt: vec![0; n], mult }
    }

    /// Arrow `(x, y)` at index `x·n + y`, going from `y` to `x`.
    pub fn pair(n: usize) -> Self {
        let mut mult = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    mult.insert((x * n + y, y * n + z), x * n + z);
                }
            }
        }
        PlainGroupoid {
            objects: n,
            src: (0..n * n).map(|a| a % n).collect(),
            tgt: (0..n * n).map(|a| a / n).collect(),
            mult,
        }
    }

    fn tuples(&self, q: usize) -> Vec<Vec<usize>> {
        if q == 0 {
            return (0..self.objects).map(|x| vec![x]).collect();
        }
        let mut level: Vec<Vec<usize>> = (0..self.src.len()).map(|a| vec![a]).collect();
        for _ in 1..q {
            let mut next = Vec::new();
            for t in level {
                for h in 0..self.src.len() {
                    if self.tgt[h] == self.src[*t.last().unwrap()] {
                        let mut u = t.clone();
                        u.push(h);
                        next.push(u);
                    }
                }
            }
            level = next;
        }
        level
    }

    /// Face `i` of a tuple at level `q ≥ 1`; level-0 tuples hold one object.
    fn face(&self, t: &[usize], q: usize, i: usize) -> Vec<usize> {
        if q == 1 {
            return vec![if i == 0 { self.src[t[0]] } else { self.tgt[t[0]] }];
        }
        let mut out = Vec::new();
        for (k, &a) in t.iter().enumerate() {
            if (i == 0 && k == 0) || (i == q && k == q - 1) || (0 < i && i < q && k == i) {
                continue;
            }
            if 0 < i && i < q && k == i - 1 {
                out.push(self.mult[&(t[i - 1], t[i])]);
            } else {
                out.push(a);
            }
        }
        out
    }

    /// Coboundary `C^{q−1} → C^q` on functions of tuples.
    pub fn coboundary(&self, q: usize) -> Dense {
        let rows = self.tuples(q);
        let cols = self.tuples(q - 1);
        let index: HashMap<&Vec<usize>, usize> = cols.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut m = zeros(rows.len(), cols.len());
        for (r, t) in rows.iter().enumerate() {
            for i in 0..=q {
                let c = index[&self.face(t, q, i)];
                m[r][c] += Rational::from_integer(if i % 2 == 0 { 1.into() } else { (-1).into() });
            }
        }
        m
    }

    /// `dim H^q` with trivial rational coefficients, `q ≤ top`.
    pub fn cohomology_dims(&self, top: usize) -> Vec<usize> {
        let ranks: Vec<usize> = (1..=top + 1).map(|q| dense_rank(&self.coboundary(q))).collect();
        (0..=top)
            .map(|q| self.tuples(q).len() - ranks[q] - if q == 0 { 0 } else { ranks[q - 1] })
            .collect()
    }
}

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Multiplication table of the permutations of three letters, composed right to left.
pub fn s3_table() -> Vec<Vec<usize>> {
    let perms: Vec<[usize; 3]> =
        vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    let ab = [a[b[0]], a[b[1]], a[b[2]]];
                    perms.iter().position(|p| *p == ab).unwrap()
                })
                .collect()
        })
        .collect()
}

/// Degree-wise convolution, truncated at `top`.
pub fn kunneth(a: &[usize], b: &[usize], top: usize) -> Vec<usize> {
    (0..=top)
        .map(|n| (0..=n).map(|i| a.get(i).copied().unwrap_or(0) * b.get(n - i).copied().unwrap_or(0)).sum())
        .collect()
}

pub fn dense_from_i64(rows: &[&[i64]]) -> Dense {
    rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

pub fn is_zero_dense(m: &Dense) -> bool {
    m.iter().flatten().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> Table {
        Table::from_i64(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)])
    }

    #[test]
    fn reference_values() {
        assert_eq!(ce_dims(&sl2(), 3), vec![1, 0, 0, 1]);
        assert_eq!(ce_dims(&Table::from_i64(2, &[]), 2), vec![1, 2, 1]);
        assert_eq!(ce_dims(&Table::from_i64(3, &[(0, 1, 2, 1)]), 3), vec![1, 2, 2, 1]);
        assert!(jacobi_holds(&sl2()));
        assert!(!jacobi_holds(&Table::from_i64(3, &[(0, 1, 2, 1), (1, 2, 0, 1), (0, 2, 0, 1)])));
    }

    #[test]
    fn group_cohomology_is_trivial() {
        assert_eq!(PlainGroupoid::group(&cyclic_table(2)).cohomology_dims(2), vec![1, 0, 0]);
        assert_eq!(PlainGroupoid::group(&s3_table()).cohomology_dims(2), vec![1, 0, 0]);
        assert_eq!(PlainGroupoid::pair(3).cohomology_dims(3), vec![1, 0, 0, 0]);
        assert!(is_zero_dense(&dense_mul(
            &PlainGroupoid::pair(2).coboundary(3),
            &PlainGroupoid::pair(2).coboundary(2),
            8,
            4
        )));
    }

    #[test]
    fn invariants_by_hand() {
        let swap = dense_from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(invariant_form_dims(&swap), vec![1, 1, 0]);
        assert_eq!(invariant_ce_dims(&Table::from_i64(2, &[]), &swap, 2), vec![1, 1, 0]);
        let theta = dense_from_i64(&[&[-1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        assert_eq!(invariant_form_dims(&theta), vec![1, 1, 1, 1]);
        assert_eq!(invariant_ce_dims(&sl2(), &theta, 3), vec![1, 0, 0, 1]);
        assert_eq!(kunneth(&[1, 1], &[1, 2, 1], 3), vec![1, 3, 3, 1]);
    }
}
