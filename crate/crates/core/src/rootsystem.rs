//! Positive roots by closure and a deterministic sign table for root-vector brackets.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};

/// A root written over the simple roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    pub coeffs: Vec<i64>,
    pub height: i64,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        let height = coeffs.iter().sum();
        Root { coeffs, height }
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Root::new(c)
    }

    pub fn negated(&self) -> Self {
        Root::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn is_positive(&self) -> bool {
        self.height > 0
    }

    /// `[c1,...,cn]`
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.coeffs.iter().map(|c| c.abs().to_string()).collect();
        format!("[{}]", inner.join(","))
    }
}

/// Height first, then coefficient vectors in descending lexicographic order,
/// so that the simple roots come out as `α_1, α_2, ...`.
pub fn root_order(a: &Root, b: &Root) -> Ordering {
    a.height.cmp(&b.height).then_with(|| b.coeffs.cmp(&a.coeffs))
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    datum: CartanDatum,
    positive: Vec<Root>,
    index: HashMap<Vec<i64>, usize>,
}

/// Computes all positive roots by adding simple roots along root strings.
pub fn close_roots(datum: &CartanDatum) -> RootSystem {
    let n = datum.rank();
    let a = datum.matrix();
    let mut known: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut layer: Vec<Root> = (0..n).map(|i| Root::simple(n, i)).collect();
    let mut all = Vec::new();
    for r in &layer {
        known.insert(r.coeffs.clone(), ());
    }
    while !layer.is_empty() {
        let mut next: Vec<Root> = Vec::new();
        for root in &layer {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| root.coeffs[j] * a[j][i]).sum();
                // p = length of the string below `root` in direction α_i
                let mut p = 0;
                let mut probe = root.coeffs.clone();
                loop {
                    probe[i] -= 1;
                    if known.contains_key(&probe) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pairing >= 1 {
                    let mut up = root.coeffs.clone();
                    up[i] += 1;
                    if !known.contains_key(&up) {
                        known.insert(up.clone(), ());
                        next.push(Root::new(up));
                    }
                }
            }
        }
        all.append(&mut layer);
        layer = next;
    }
    all.sort_by(root_order);
    let index = all.iter().enumerate().map(|(k, r)| (r.coeffs.clone(), k)).collect();
    RootSystem { datum: datum.clone(), positive: all, index }
}

impl RootSystem {
    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    /// Positive roots in root order.
    pub fn positive(&self) -> &[Root] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    /// Position of a positive root in root order.
    pub fn position(&self, coeffs: &[i64]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn is_root(&self, coeffs: &[i64]) -> bool {
        if coeffs.iter().all(|&c| c <= 0) {
            let neg: Vec<i64> = coeffs.iter().map(|c| -c).collect();
            self.index.contains_key(&neg)
        } else {
            self.index.contains_key(coeffs)
        }
    }

    /// `⟨α, H_i⟩ = Σ_j c_j a_{ji}` with `i` 0-based.
    pub fn pairing(&self, coeffs: &[i64], i: usize) -> i64 {
        let a = self.datum.matrix();
        coeffs.iter().enumerate().map(|(j, c)| c * a[j][i]).sum()
    }

    /// Symmetric form `(α, β)` on the root lattice.
    pub fn form(&self, x: &[i64], y: &[i64]) -> i64 {
        (0..self.rank()).map(|i| x[i] * self.pairing(y, i)).sum()
    }

    pub fn dimension(&self) -> usize {
        2 * self.num_positive() + self.rank()
    }

    /// Extraspecial pair `(α_i, γ - α_i)` of a non-simple positive root, `i` 0-based.
    pub fn extraspecial(&self, gamma: usize) -> Option<(usize, usize)> {
        let g = &self.positive[gamma];
        if g.height < 2 {
            return None;
        }
        (0..self.rank()).find_map(|i| {
            let mut rest = g.coeffs.clone();
            rest[i] -= 1;
            self.position(&rest).map(|b| (i, b))
        })
    }

    /// Simple-root indices (0-based) `[i1, i2, ..., ih]` with
    /// `E_γ = [E_{i1}, [E_{i2}, [..., E_{ih}]]]` in the normalized basis.
    pub fn bracket_word(&self, gamma: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = gamma;
        while let Some((i, rest)) = self.extraspecial(cur) {
            word.push(i);
            cur = rest;
        }
        let last = self.positive[cur].coeffs.iter().position(|&c| c == 1).unwrap();
        word.push(last);
        word
    }
}

/// Signs `N_{α,β} ∈ {±1}` for all ordered pairs of roots (positive and
/// negative) whose sum is a root.
///
/// Roots are numbered `0..P` for the positive roots in root order and
/// `P..2P` for their negatives in the same order.
#[derive(Debug, Clone)]
pub struct SignTable {
    num_positive: usize,
    signs: Vec<i8>,
    /// Root index of `α + β`, or `usize::MAX` when it is not a root.
    sums: Vec<usize>,
}

impl SignTable {
    fn slot(&self, a: usize, b: usize) -> usize {
        a * 2 * self.num_positive + b
    }

    pub fn num_roots(&self) -> usize {
        2 * self.num_positive
    }

    /// `N_{α,β}` for root indices, `None` when `α + β` is not a root.
    pub fn sign(&self, a: usize, b: usize) -> Option<i8> {
        let s = self.signs[self.slot(a, b)];
        (s != 0).then_some(s)
    }

    /// Root index of `α + β` when that is a root.
    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        let s = self.sums[self.slot(a, b)];
        (s != usize::MAX).then_some(s)
    }

    /// Iterates over stored entries `(α, β, N_{α,β})`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        let r = self.num_roots();
        (0..r).flat_map(move |a| (0..r).filter_map(move |b| self.sign(a, b).map(|s| (a, b, s))))
    }
}

/// Coefficients of the root with the given signed index.
pub fn signed_root(rs: &RootSystem, idx: usize) -> Root {
    let p = rs.num_positive();
    if idx < p {
        rs.positive[idx].clone()
    } else {
        rs.positive[idx - p].negated()
    }
}

/// Bimultiplicative cocycle with `ε(α_i, α_i) = -1`, `ε(α_i, α_j) = -1` when
/// `i > j` are joined, and `+1` otherwise.
fn cocycle(rs: &RootSystem, x: &[i64], y: &[i64]) -> i64 {
    let n = rs.rank();
    let a = rs.datum().matrix();
    let mut parity = 0i64;
    for i in 0..n {
        for j in 0..=i {
            if i == j || a[i][j] != 0 {
                parity += x[i] * y[j];
            }
        }
    }
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Assigns structure-constant signs so that every extraspecial pair carries `+1`
/// and `[E_γ, F_γ] = H_γ`.
///
/// A bimultiplicative cocycle gives one consistent set of constants; root
/// vectors are then rescaled by `±1`, in root order, until each extraspecial
/// bracket is `+1`. Signs for every other pair follow from that rescaling.
pub fn extraspecial_signs(rs: &RootSystem) -> Result<SignTable> {
    let p = rs.num_positive();
    let r = 2 * p;
    let roots: Vec<Root> = (0..r).map(|k| signed_root(rs, k)).collect();
    let index_of = |c: &[i64]| -> Option<usize> {
        if c.iter().all(|&v| v <= 0) {
            let neg: Vec<i64> = c.iter().map(|v| -v).collect();
            rs.position(&neg).map(|k| k + p)
        } else {
            rs.position(c)
        }
    };

    let mut sums = vec![usize::MAX; r * r];
    for a in 0..r {
        for b in 0..r {
            let c: Vec<i64> = roots[a].coeffs.iter().zip(&roots[b].coeffs).map(|(x, y)| x + y).collect();
            if c.iter().any(|&v| v != 0) {
                if let Some(k) = index_of(&c) {
                    sums[a * r + b] = k;
                }
            }
        }
    }

    // Rescaling: X_γ = scale[γ] · e_γ.
    let mut scale = vec![0i64; r];
    for i in 0..rs.rank() {
        scale[i] = 1;
    }
    for g in 0..p {
        if let Some((i, b)) = rs.extraspecial(g) {
            scale[g] = scale[i] * scale[b] * cocycle(rs, &roots[i].coeffs, &roots[b].coeffs);
        }
    }
    // [e_γ, e_{-γ}] = -h_γ for this cocycle, so F_γ = -scale[γ] e_{-γ}.
    for g in 0..p {
        scale[g + p] = -scale[g];
    }

    let mut signs = vec![0i8; r * r];
    for a in 0..r {
        for b in 0..r {
            let s = sums[a * r + b];
            if s != usize::MAX {
                let n = scale[a] * scale[b] * scale[s] * cocycle(rs, &roots[a].coeffs, &roots[b].coeffs);
                signs[a * r + b] = n as i8;
            }
        }
    }
    let table = SignTable { num_positive: p, signs, sums };
    check_table(rs, &table, &roots)?;
    Ok(table)
}

fn check_table(rs: &RootSystem, table: &SignTable, roots: &[Root]) -> Result<()> {
    for (a, b, s) in table.entries() {
        if table.sign(b, a) != Some(-s) {
            return Err(Error::SignInconsistency(format!(
                "antisymmetry fails for {} and {}",
                roots[a].label(),
                roots[b].label()
            )));
        }
        // simply-laced: α - β is never a root when α + β is
        let diff: Vec<i64> = roots[a].coeffs.iter().zip(&roots[b].coeffs).map(|(x, y)| x - y).collect();
        if diff.iter().any(|&v| v != 0) && rs.is_root(&diff) {
            return Err(Error::SignInconsistency(format!(
                "root string through {} has length > 2",
                roots[b].label()
            )));
        }
    }
    for g in 0..rs.num_positive() {
        if let Some((i, b)) = rs.extraspecial(g) {
            if table.sign(i, b) != Some(1) {
                return Err(Error::SignInconsistency(format!(
                    "extraspecial pair of {} has sign {:?}",
                    roots[g].label(),
                    table.sign(i, b)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{cartan_matrix, Series};

    fn roots(series: Series, n: usize) -> RootSystem {
        close_roots(&cartan_matrix(series, n).unwrap())
    }

    #[test]
    fn a2_roots() {
        let rs = roots(Series::A, 2);
        let c: Vec<Vec<i64>> = rs.positive().iter().map(|r| r.coeffs.clone()).collect();
        assert_eq!(c, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn a1_has_one_root() {
        assert_eq!(roots(Series::A, 1).num_positive(), 1);
    }

    #[test]
    fn d4_dimension_matches_so8() {
        let rs = roots(Series::D, 4);
        assert_eq!(rs.num_positive(), 12);
        assert_eq!(rs.dimension(), 8 * 7 / 2);
    }

    #[test]
    fn dimensions_match_closed_forms() {
        for n in 1..=7usize {
            assert_eq!(roots(Series::A, n).dimension(), n * (n + 2));
        }
        for n in 4..=7usize {
            assert_eq!(roots(Series::D, n).dimension(), n * (2 * n - 1));
        }
        assert_eq!(roots(Series::E, 6).dimension(), 78);
        assert_eq!(roots(Series::E, 7).dimension(), 133);
        assert_eq!(roots(Series::E, 8).dimension(), 248);
    }

    #[test]
    fn every_root_descends_to_a_simple_root() {
        for rs in [roots(Series::A, 4), roots(Series::D, 5), roots(Series::E, 6)] {
            let n = rs.rank();
            for r in rs.positive().iter().filter(|r| r.height >= 2) {
                let found = (0..n).any(|i| {
                    let mut c = r.coeffs.clone();
                    c[i] -= 1;
                    rs.position(&c).is_some_and(|k| rs.positive()[k].height == r.height - 1)
                });
                assert!(found, "{:?}", r.coeffs);
                for i in 0..n {
                    assert!((-2..=2).contains(&rs.pairing(&r.coeffs, i)));
                }
            }
        }
    }

    #[test]
    fn a2_extraspecial_sign_is_positive() {
        let rs = roots(Series::A, 2);
        let t = extraspecial_signs(&rs).unwrap();
        assert_eq!(rs.extraspecial(2), Some((0, 1)));
        assert_eq!(t.sign(0, 1), Some(1));
        assert_eq!(t.sign(1, 0), Some(-1));
    }

    #[test]
    fn tables_are_antisymmetric() {
        for rs in [roots(Series::A, 3), roots(Series::D, 4), roots(Series::E, 6)] {
            let t = extraspecial_signs(&rs).unwrap();
            for (a, b, s) in t.entries() {
                assert_eq!(t.sign(b, a), Some(-s));
            }
        }
    }

    #[test]
    fn bracket_words_reach_the_root() {
        let rs = roots(Series::D, 5);
        for (g, r) in rs.positive().iter().enumerate() {
            let w = rs.bracket_word(g);
            assert_eq!(w.len() as i64, r.height);
            let mut c = vec![0; rs.rank()];
            for i in w {
                c[i] += 1;
            }
            assert_eq!(c, r.coeffs);
        }
    }
}
