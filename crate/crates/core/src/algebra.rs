//! Chevalley-basis realization of a simply-laced Lie algebra with an integer
//! structure-constant table.
//!
//! Basis order: `H_1..H_n`, then `E_α` for the positive roots in root order,
//! then `F_α` in the same order. The basis index of a signed root `r` (see
//! [`crate::rootsystem::SignTable`]) is `n + r`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::{cartan_matrix, Series};
use crate::error::{Error, Result};
use crate::exactlin::Ring;
use crate::rootsystem::{close_roots, extraspecial_signs, signed_root, RootSystem, SignTable};

/// Coefficient vector over the basis of a [`LieAlgebra`].
pub type AlgElement<T> = Vec<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisElem {
    /// Coroot `H_i`, 0-based simple index.
    H(usize),
    /// `E_α`, position of `α` among the positive roots.
    E(usize),
    /// `F_α`, position of `α` among the positive roots.
    F(usize),
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    roots: RootSystem,
    signs: SignTable,
    basis: Vec<BasisElem>,
    /// `table[i * dim + j]` lists the nonzero coordinates of `[b_i, b_j]`.
    table: Vec<Vec<(usize, i64)>>,
}

/// Builds the Chevalley algebra from a root system and its sign table.
pub fn chevalley_algebra(roots: &RootSystem, signs: &SignTable) -> Result<LieAlgebra> {
    let n = roots.rank();
    let p = roots.num_positive();
    let dim = n + 2 * p;
    let mut basis: Vec<BasisElem> = (0..n).map(BasisElem::H).collect();
    basis.extend((0..p).map(BasisElem::E));
    basis.extend((0..p).map(BasisElem::F));

    let signed: Vec<Vec<i64>> = (0..2 * p).map(|r| signed_root(roots, r).coeffs).collect();
    let mut table = vec![Vec::new(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let entry = match (i < n, j < n) {
                (true, true) => Vec::new(),
                (true, false) => {
                    let c = roots.pairing(&signed[j - n], i);
                    if c == 0 {
                        Vec::new()
                    } else {
                        vec![(j, c)]
                    }
                }
                (false, true) => {
                    let c = roots.pairing(&signed[i - n], j);
                    if c == 0 {
                        Vec::new()
                    } else {
                        vec![(i, -c)]
                    }
                }
                (false, false) => {
                    let (r, s) = (i - n, j - n);
                    let opposite = signed[r].iter().zip(&signed[s]).all(|(a, b)| a + b == 0);
                    if opposite {
                        // [E_α, F_α] = H_α, [F_α, E_α] = -H_α
                        let sign = if r < p { 1 } else { -1 };
                        signed[r]
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| **c != 0)
                            .map(|(k, c)| (k, sign * c.abs()))
                            .collect()
                    } else {
                        match (signs.sum(r, s), signs.sign(r, s)) {
                            (Some(t), Some(e)) => vec![(n + t, e as i64)],
                            (None, None) => Vec::new(),
                            _ => {
                                return Err(Error::SignInconsistency(format!(
                                    "sign table has no entry for a root sum ({i}, {j})"
                                )))
                            }
                        }
                    }
                }
            };
            table[i * dim + j] = entry;
        }
    }
    Ok(LieAlgebra { roots: roots.clone(), signs: signs.clone(), basis, table })
}

impl LieAlgebra {
    /// Convenience constructor: Cartan datum, roots, signs, algebra.
    pub fn build(series: Series, rank: usize) -> Result<Self> {
        let datum = cartan_matrix(series, rank)?;
        let roots = close_roots(&datum);
        let signs = extraspecial_signs(&roots)?;
        chevalley_algebra(&roots, &signs)
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn signs(&self) -> &SignTable {
        &self.signs
    }

    pub fn rank(&self) -> usize {
        self.roots.rank()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn name(&self) -> String {
        self.roots.datum().name()
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    /// Basis index of `H_i` (1-based vertex).
    pub fn h(&self, i: usize) -> usize {
        i - 1
    }

    /// Basis index of the simple root vector `E_i` (1-based vertex).
    pub fn e(&self, i: usize) -> usize {
        self.rank() + i - 1
    }

    /// Basis index of `F_i` (1-based vertex).
    pub fn f(&self, i: usize) -> usize {
        self.rank() + self.roots.num_positive() + i - 1
    }

    /// Basis index of `E_α` for a positive root position.
    pub fn e_root(&self, k: usize) -> usize {
        self.rank() + k
    }

    pub fn f_root(&self, k: usize) -> usize {
        self.rank() + self.roots.num_positive() + k
    }

    /// Signed root coefficients of a root vector, `None` for Cartan elements.
    pub fn weight(&self, k: usize) -> Option<Vec<i64>> {
        match self.basis[k] {
            BasisElem::H(_) => None,
            BasisElem::E(r) => Some(self.roots.positive()[r].coeffs.clone()),
            BasisElem::F(r) => Some(self.roots.positive()[r].negated().coeffs),
        }
    }

    /// Structure constants of `[b_i, b_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.table[i * self.dim() + j]
    }

    pub fn zero<R: Ring>(&self, ring: &R) -> AlgElement<R::Elem> {
        vec![ring.zero(); self.dim()]
    }

    pub fn basis_vector<R: Ring>(&self, ring: &R, k: usize) -> AlgElement<R::Elem> {
        let mut v = self.zero(ring);
        v[k] = ring.one();
        v
    }

    /// Bilinear extension of the structure table.
    pub fn bracket<R: Ring>(&self, ring: &R, x: &[R::Elem], y: &[R::Elem]) -> AlgElement<R::Elem> {
        let mut out = self.zero(ring);
        for (i, xi) in x.iter().enumerate() {
            if ring.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if ring.is_zero(yj) {
                    continue;
                }
                let entry = self.bracket_basis(i, j);
                if entry.is_empty() {
                    continue;
                }
                let prod = ring.mul(xi, yj);
                for &(k, c) in entry {
                    out[k] = ring.add(&out[k], &ring.scale_int(&prod, c));
                }
            }
        }
        out
    }

    /// `[b_k, y]` for a basis element.
    pub fn ad_basis<R: Ring>(&self, ring: &R, k: usize, y: &[R::Elem]) -> AlgElement<R::Elem> {
        let mut out = self.zero(ring);
        for (j, yj) in y.iter().enumerate() {
            if ring.is_zero(yj) {
                continue;
            }
            for &(t, c) in self.bracket_basis(k, j) {
                out[t] = ring.add(&out[t], &ring.scale_int(yj, c));
            }
        }
        out
    }

    /// Matrix of `ad_x`; column `j` is `[x, b_j]`. Row-major.
    pub fn ad_matrix<R: Ring>(&self, ring: &R, x: &[R::Elem]) -> Vec<Vec<R::Elem>> {
        let n = self.dim();
        let mut m = vec![vec![ring.zero(); n]; n];
        for j in 0..n {
            let col = self.bracket(ring, x, &self.basis_vector(ring, j));
            for (i, v) in col.into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        m
    }

    /// Export label: `H<i>`, `E[c1,...,cn]`, `F[c1,...,cn]`.
    pub fn label(&self, k: usize) -> String {
        match self.basis[k] {
            BasisElem::H(i) => format!("H{}", i + 1),
            BasisElem::E(r) => format!("E{}", self.roots.positive()[r].label()),
            BasisElem::F(r) => format!("F{}", self.roots.positive()[r].label()),
        }
    }

    /// Short label: simple root vectors print as `E<i>` / `F<i>`.
    pub fn short_label(&self, k: usize) -> String {
        let simple = |r: usize| self.roots.positive()[r].height == 1;
        match self.basis[k] {
            BasisElem::E(r) if simple(r) => format!("E{}", r + 1),
            BasisElem::F(r) if simple(r) => format!("F{}", r + 1),
            _ => self.label(k),
        }
    }

    /// Parses `H2`, `E1`, `F3`, `E[1,1,0]`, `F[0,1]`.
    pub fn parse_label(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown basis label `{s}` for {}", self.name()));
        let (head, rest) = s.split_at(s.chars().next().ok_or_else(bad)?.len_utf8());
        if let Some(inner) = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() != self.rank() {
                return Err(bad());
            }
            let pos = self.roots.position(&coeffs).ok_or_else(bad)?;
            return match head {
                "E" => Ok(self.e_root(pos)),
                "F" => Ok(self.f_root(pos)),
                _ => Err(bad()),
            };
        }
        let i: usize = rest.parse().map_err(|_| bad())?;
        if i == 0 || i > self.rank() {
            return Err(bad());
        }
        match head {
            "H" => Ok(self.h(i)),
            "E" => Ok(self.e(i)),
            "F" => Ok(self.f(i)),
            _ => Err(bad()),
        }
    }

    /// Iterated bracket of simple generators equal to this root vector,
    /// e.g. `[E1,[E2,E3]]`; `None` for Cartan elements.
    pub fn bracket_expression(&self, k: usize) -> Option<String> {
        let (letter, r) = match self.basis[k] {
            BasisElem::H(_) => return None,
            BasisElem::E(r) => ("E", r),
            BasisElem::F(r) => ("F", r),
        };
        let word = self.roots.bracket_word(r);
        let mut s = String::new();
        for (pos, i) in word.iter().enumerate() {
            if pos + 1 < word.len() {
                let _ = write!(s, "[{letter}{},", i + 1);
            } else {
                let _ = write!(s, "{letter}{}", i + 1);
            }
        }
        s.push_str(&"]".repeat(word.len() - 1));
        Some(s)
    }

    /// One line per nonzero bracket of distinct basis elements.
    pub fn structure_constants_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let entry = self.bracket_basis(i, j);
                if entry.is_empty() {
                    continue;
                }
                let terms: Vec<String> =
                    entry.iter().map(|&(k, c)| format!("{:+} {}", c, self.label(k))).collect();
                let _ = writeln!(out, "bracket {} {} = {}", self.label(i), self.label(j), terms.join(" "));
            }
        }
        out
    }
}

/// One family of identities checked by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFamily {
    pub name: String,
    pub checked: usize,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub algebra: String,
    pub families: Vec<CheckFamily>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }
}

/// Number of triples above which Jacobi is sampled instead of exhaustive.
const JACOBI_EXHAUSTIVE_LIMIT: usize = 600_000;
const JACOBI_SAMPLES: usize = 200_000;

/// Checks antisymmetry, Jacobi, and the Chevalley–Serre relations.
pub fn validate(l: &LieAlgebra) -> ValidationReport {
    let dim = l.dim();
    let n = l.rank();
    let a = l.roots().datum().matrix().to_vec();
    let ring = crate::exactlin::Rationals;
    let mut families = Vec::new();

    let mut fam = Family::new("antisymmetry");
    for i in 0..dim {
        for j in 0..dim {
            fam.count();
            let mut lhs = l.bracket_basis(i, j).to_vec();
            lhs.sort_unstable();
            let mut rhs: Vec<(usize, i64)> = l.bracket_basis(j, i).iter().map(|&(k, c)| (k, -c)).collect();
            rhs.sort_unstable();
            if lhs != rhs {
                fam.fail(format!("[{}, {}]", l.label(i), l.label(j)));
            }
        }
    }
    families.push(fam.finish());

    let mut fam = Family::new("jacobi");
    let total = dim * dim * dim;
    let check = |i: usize, j: usize, k: usize, fam: &mut Family| {
        fam.count();
        if !jacobi_holds(l, i, j, k) {
            fam.fail(format!("({}, {}, {})", l.label(i), l.label(j), l.label(k)));
        }
    };
    if total <= JACOBI_EXHAUSTIVE_LIMIT {
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    check(i, j, k, &mut fam);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a43_4f42);
        for _ in 0..JACOBI_SAMPLES {
            let (i, j, k) = (rng.gen_range(0..dim), rng.gen_range(0..dim), rng.gen_range(0..dim));
            check(i, j, k, &mut fam);
        }
    }
    families.push(fam.finish());

    let expect = |fam: &mut Family, got: Vec<(usize, i64)>, want: Vec<(usize, i64)>, what: String| {
        fam.count();
        let mut g = got;
        g.sort_unstable();
        let mut w: Vec<(usize, i64)> = want.into_iter().filter(|&(_, c)| c != 0).collect();
        w.sort_unstable();
        if g != w {
            fam.fail(what);
        }
    };

    let mut fam = Family::new("cartan relations");
    for i in 1..=n {
        expect(&mut fam, l.bracket_basis(l.e(i), l.f(i)).to_vec(), vec![(l.h(i), 1)], format!("[E{i},F{i}]"));
        for j in 1..=n {
            let aij = a[i - 1][j - 1];
            expect(&mut fam, l.bracket_basis(l.h(i), l.h(j)).to_vec(), vec![], format!("[H{i},H{j}]"));
            expect(
                &mut fam,
                l.bracket_basis(l.e(j), l.h(i)).to_vec(),
                vec![(l.e(j), -aij)],
                format!("[E{j},H{i}]"),
            );
            expect(
                &mut fam,
                l.bracket_basis(l.f(j), l.h(i)).to_vec(),
                vec![(l.f(j), aij)],
                format!("[F{j},H{i}]"),
            );
            if i != j {
                expect(&mut fam, l.bracket_basis(l.e(i), l.f(j)).to_vec(), vec![], format!("[E{i},F{j}]"));
            }
        }
    }
    families.push(fam.finish());

    let mut fam = Family::new("serre relations");
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let power = (1 - a[i - 1][j - 1]) as usize;
            for (x, y, letter) in [(l.e(i), l.e(j), "E"), (l.f(i), l.f(j), "F")] {
                fam.count();
                let mut v = l.basis_vector(&ring, y);
                for _ in 0..power {
                    v = l.ad_basis(&ring, x, &v);
                }
                if v.iter().any(|c| !ring.is_zero(c)) {
                    fam.fail(format!("ad_{letter}{i}^{power}({letter}{j})"));
                }
            }
        }
    }
    families.push(fam.finish());

    ValidationReport { algebra: l.name(), families }
}

fn jacobi_holds(l: &LieAlgebra, i: usize, j: usize, k: usize) -> bool {
    let dim = l.dim();
    let mut acc = vec![0i64; dim];
    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
        for &(t, c) in l.bracket_basis(y, z) {
            for &(u, d) in l.bracket_basis(x, t) {
                acc[u] += c * d;
            }
        }
    }
    acc.iter().all(|&v| v == 0)
}

struct Family {
    name: &'static str,
    checked: usize,
    witness: Option<String>,
}

impl Family {
    fn new(name: &'static str) -> Self {
        Family { name, checked: 0, witness: None }
    }

    fn count(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, w: String) {
        self.witness.get_or_insert(w);
    }

    fn finish(self) -> CheckFamily {
        CheckFamily {
            name: self.name.to_string(),
            checked: self.checked,
            passed: self.witness.is_none(),
            witness: self.witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Rationals;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn a2_root_vector_bracket() {
        let l = LieAlgebra::build(Series::A, 2).unwrap();
        let e12 = l.parse_label("E[1,1]").unwrap();
        assert_eq!(l.bracket_basis(l.e(1), l.e(2)), &[(e12, 1)]);
        assert_eq!(l.bracket_expression(e12).unwrap(), "[E1,E2]");
    }

    #[test]
    fn a1_relations() {
        let l = LieAlgebra::build(Series::A, 1).unwrap();
        assert_eq!(l.bracket_basis(l.e(1), l.f(1)), &[(l.h(1), 1)]);
        let r = Rationals;
        let m = l.ad_matrix(&r, &l.basis_vector(&r, l.h(1)));
        let diag: Vec<BigRational> = (0..3).map(|i| m[i][i].clone()).collect();
        assert_eq!(diag, vec![q(0), q(2), q(-2)]);
        assert!(m.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, v)| i == j || v.is_zero())));
    }

    #[test]
    fn a2_brackets() {
        let l = LieAlgebra::build(Series::A, 2).unwrap();
        let r = Rationals;
        let e1 = l.basis_vector(&r, l.e(1));
        let h1 = l.basis_vector(&r, l.h(1));
        let h2 = l.basis_vector(&r, l.h(2));
        let f2 = l.basis_vector(&r, l.f(2));
        assert!(l.bracket(&r, &h1, &h2).iter().all(Zero::is_zero));
        let mut want = l.zero(&r);
        want[l.e(1)] = q(-2);
        assert_eq!(l.bracket(&r, &e1, &h1), want);
        assert!(l.bracket(&r, &e1, &f2).iter().all(Zero::is_zero));
        assert!(l.ad_matrix(&r, &l.zero(&r)).iter().flatten().all(Zero::is_zero));
    }

    fn matmul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(q(0), |acc, k| acc + &a[i][k] * &b[k][j])).collect())
            .collect()
    }

    #[test]
    fn ad_e1_is_nilpotent_in_a2() {
        let l = LieAlgebra::build(Series::A, 2).unwrap();
        let r = Rationals;
        let m = l.ad_matrix(&r, &l.basis_vector(&r, l.e(1)));
        let m2 = matmul(&m, &m);
        let m4 = matmul(&m2, &m2);
        assert!(m4.iter().flatten().all(Zero::is_zero));
        assert!(m2.iter().flatten().any(|v| !v.is_zero()));
    }

    #[test]
    fn validation_passes_on_small_algebras() {
        for (s, n) in [(Series::A, 1), (Series::A, 2), (Series::A, 3), (Series::D, 4), (Series::A, 5)] {
            let l = LieAlgebra::build(s, n).unwrap();
            let report = validate(&l);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn traces_vanish_and_constants_are_small() {
        for (s, n) in [(Series::A, 3), (Series::D, 4), (Series::E, 6)] {
            let l = LieAlgebra::build(s, n).unwrap();
            for k in 0..l.dim() {
                let tr: i64 = l.bracket_basis(k, k).iter().map(|&(_, c)| c).sum::<i64>()
                    + (0..l.dim())
                        .map(|j| l.bracket_basis(k, j).iter().filter(|&&(t, _)| t == j).map(|&(_, c)| c).sum::<i64>())
                        .sum::<i64>();
                assert_eq!(tr, 0, "{}", l.label(k));
                if k >= l.rank() {
                    for j in l.rank()..l.dim() {
                        for &(t, c) in l.bracket_basis(k, j) {
                            if t >= l.rank() {
                                assert!(c.abs() == 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        let l = LieAlgebra::build(Series::D, 4).unwrap();
        for k in 0..l.dim() {
            assert_eq!(l.parse_label(&l.label(k)).unwrap(), k);
            assert_eq!(l.parse_label(&l.short_label(k)).unwrap(), k);
        }
        assert!(l.parse_label("E5").is_err());
        assert!(l.parse_label("X1").is_err());
        assert!(l.parse_label("E[1,1,1,1,1]").is_err());
    }

    #[test]
    fn export_format() {
        let l = LieAlgebra::build(Series::A, 2).unwrap();
        let text = l.structure_constants_text();
        assert!(text.contains("bracket E[1,0] E[0,1] = +1 E[1,1]\n"));
        assert!(text.contains("bracket E[1,1] F[1,1] = +1 H1 +1 H2\n"));
        assert!(text.contains("bracket E[1,0] H1 = -2 E[1,0]\n"));
        assert!(text.lines().all(|line| !line.ends_with("= ")));
    }
}
