//! Matrix rank over `Q` (fraction-free) and over `F_p`, plus nullspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::modp::{add_mod, inv_mod, mul_mod, reduce_rational, sub_mod};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Exact,
    Modular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedFullRank,
    RankDeficientCandidate,
    /// Deficient, and the candidate dependence annihilated every fresh batch.
    LikelyDependent,
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        self == Verdict::CertifiedFullRank
    }
}

/// Outcome of a rank computation on an evaluation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub mode: RankMode,
    pub prime: Option<u64>,
    pub seed: u64,
    pub samples: usize,
    pub shape: (usize, usize),
    pub rank: usize,
    pub verdict: Verdict,
    /// Candidate dependence among the columns, as reduced fractions.
    pub candidate_null: Option<Vec<String>>,
    /// Fresh batches on which the candidate was re-checked and held.
    pub confirmed_batches: usize,
    /// Rank of the same samples over `Q`, when a modular run was audited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_rank: Option<usize>,
}

/// Rank over `Q` by fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integers. In each column the pivot is the
/// remaining entry of smallest absolute value; ties go to the lowest row.
pub fn rank_exact(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    bareiss_rank(&mut m)
}

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| (q * &lcm).to_integer()).collect()
}

fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()).then(a.cmp(&b)));
        let Some(pr) = pivot else { continue };
        m.swap(rank, pr);
        let (top, rest) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        let pv = &prow[col];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let v = pv * &row[j] - &factor * &prow[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pv.clone();
        rank += 1;
    }
    rank
}

/// Rank of the reduction modulo `p`. Fails with `BadPrime` when `p`
/// divides a denominator.
pub fn rank_modular(rows: &[Vec<BigRational>], p: u64) -> Result<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut ech = ModEchelon::new(cols, p);
    for r in rows {
        let reduced = r.iter().map(|q| reduce_rational(q, p)).collect::<Result<Vec<u64>>>()?;
        ech.insert(reduced);
    }
    Ok(ech.rank())
}

/// Row echelon basis over `F_p`, built one row at a time.
#[derive(Debug, Clone)]
pub struct ModEchelon {
    p: u64,
    cols: usize,
    /// Rows with a leading 1 at `pivot_cols[k]`.
    basis: Vec<Vec<u64>>,
    pivot_cols: Vec<usize>,
}

impl ModEchelon {
    pub fn new(cols: usize, p: u64) -> Self {
        ModEchelon { p, cols, basis: Vec::new(), pivot_cols: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }

    /// Reduces `row` against the basis; keeps it if independent.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let p = self.p;
        for (b, &c) in self.basis.iter().zip(&self.pivot_cols) {
            let f = row[c];
            if f != 0 {
                for j in c..self.cols {
                    if b[j] != 0 {
                        row[j] = sub_mod(row[j], mul_mod(f, b[j], p), p);
                    }
                }
            }
        }
        let Some(lead) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(row[lead], p);
        for x in row.iter_mut().skip(lead) {
            *x = mul_mod(*x, inv, p);
        }
        self.basis.push(row);
        self.pivot_cols.push(lead);
        true
    }

    /// A basis of the right nullspace `{x : B x = 0}`, first free entry 1.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        // reduced row echelon form, pivots sorted
        let mut order: Vec<usize> = (0..self.basis.len()).collect();
        order.sort_by_key(|&k| self.pivot_cols[k]);
        let mut rows: Vec<Vec<u64>> = order.iter().map(|&k| self.basis[k].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|&k| self.pivot_cols[k]).collect();
        for k in (0..rows.len()).rev() {
            let c = pivots[k];
            for i in 0..k {
                let f = rows[i][c];
                if f != 0 {
                    let (upper, lower) = rows.split_at_mut(k);
                    for j in c..self.cols {
                        upper[i][j] = sub_mod(upper[i][j], mul_mod(f, lower[0][j], p), p);
                    }
                }
            }
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u64; self.cols];
                v[fc] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v[pc] = sub_mod(0, row[fc], p);
                }
                v
            })
            .collect()
    }

    /// Dot product mod p, for checking candidate dependences.
    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| add_mod(acc, mul_mod(x, y, self.p), self.p))
    }
}

/// Reduced row echelon basis over `Q`, built one row at a time.
#[derive(Debug, Clone, Default)]
pub struct ExactEchelon {
    cols: usize,
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl ExactEchelon {
    pub fn new(cols: usize) -> Self {
        ExactEchelon { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }

    /// Whether `row` lies in the span. Only the free columns of the
    /// residual are computed.
    pub fn contains(&self, row: &[BigRational]) -> bool {
        let mut free = vec![true; self.cols];
        for &c in &self.pivots {
            free[c] = false;
        }
        (0..self.cols).filter(|&c| free[c]).all(|c| {
            let mut r = row[c].clone();
            for (b, &pc) in self.rows.iter().zip(&self.pivots) {
                if !row[pc].is_zero() && !b[c].is_zero() {
                    r -= &row[pc] * &b[c];
                }
            }
            r.is_zero()
        })
    }

    /// Reduces `row` against the basis; keeps it (fully reduced) if independent.
    pub fn insert(&mut self, mut row: Vec<BigRational>) -> bool {
        for (b, &c) in self.rows.iter().zip(&self.pivots) {
            if !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let Some(lead) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[lead].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        for b in self.rows.iter_mut() {
            if !b[lead].is_zero() {
                let f = b[lead].clone();
                for (x, y) in b.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(lead);
        true
    }

    /// Nullspace basis; each vector has a 1 in its free column.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        (0..self.cols)
            .filter(|c| !self.pivots.contains(c))
            .map(|fc| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[fc] = BigRational::one();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = -row[fc].clone();
                }
                v
            })
            .collect()
    }
}

/// Basis of the right nullspace over `Q` via reduced row echelon form.
/// Each basis vector has a 1 in its free column.
pub fn nullspace_exact(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[k][fc].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::parse_rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[&str]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect()).collect()
    }

    /// Plain rational Gaussian elimination, kept independent of the code under test.
    fn naive_rank(rows: &[Vec<BigRational>]) -> usize {
        let mut m = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) {
                m.swap(rank, p);
                for i in rank + 1..m.len() {
                    let f = &m[i][c] / &m[rank][c];
                    for j in 0..cols {
                        let d = &f * &m[rank][j];
                        m[i][j] -= d;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn small_examples() {
        assert_eq!(rank_exact(&mat(&[&["1", "2"], &["2", "4"]])), 1);
        assert_eq!(rank_exact(&mat(&[&["0", "1"], &["1", "0"]])), 2);
        let hilbert = mat(&[&["1", "1/2", "1/3"], &["1/2", "1/3", "1/4"], &["1/3", "1/4", "1/5"]]);
        assert_eq!(rank_exact(&hilbert), 3);
        assert_eq!(rank_exact(&[]), 0);
    }

    #[test]
    fn hilbert_determinant_is_nonzero() {
        // cofactor expansion: det H_3 = 1/2160
        let h = mat(&[&["1", "1/2", "1/3"], &["1/2", "1/3", "1/4"], &["1/3", "1/4", "1/5"]]);
        let det = &h[0][0] * (&h[1][1] * &h[2][2] - &h[1][2] * &h[2][1])
            - &h[0][1] * (&h[1][0] * &h[2][2] - &h[1][2] * &h[2][0])
            + &h[0][2] * (&h[1][0] * &h[2][1] - &h[1][1] * &h[2][0]);
        assert_eq!(det, parse_rational("1/2160").unwrap());
    }

    #[test]
    fn modular_examples() {
        assert_eq!(rank_modular(&mat(&[&["1", "2"], &["2", "4"]]), 1_000_000_007).unwrap(), 1);
        let two = mat(&[&["2", "0"], &["0", "2"]]);
        assert_eq!(rank_modular(&two, 2).unwrap(), 0);
        assert_eq!(rank_exact(&two), 2);
        let id: Vec<Vec<BigRational>> = (0..7)
            .map(|i| (0..7).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))).collect())
            .collect();
        assert_eq!(rank_modular(&id, 13).unwrap(), 7);
        let half = mat(&[&["1/2"]]);
        assert!(rank_modular(&half, 2).is_err());
    }

    #[test]
    fn bareiss_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let r = rng.gen_range(1..6);
            let c = rng.gen_range(1..6);
            let dependent = rng.gen_bool(0.3);
            let mut rows: Vec<Vec<BigRational>> = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| {
                            if rng.gen_bool(0.3) {
                                BigRational::zero()
                            } else {
                                BigRational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into())
                            }
                        })
                        .collect()
                })
                .collect();
            if dependent && r > 1 {
                let f = BigRational::from_integer(rng.gen_range(-3..=3).into());
                rows[r - 1] = rows[0].iter().map(|x| x * &f).collect();
            }
            assert_eq!(rank_exact(&rows), naive_rank(&rows));
        }
    }

    #[test]
    fn nullspaces() {
        let m = mat(&[&["1", "1", "0"], &["0", "0", "1"]]);
        let ns = nullspace_exact(&m, 3);
        assert_eq!(ns, mat(&[&["-1", "1", "0"]]));
        let p = 1_000_000_007;
        let mut ech = ModEchelon::new(3, p);
        ech.insert(vec![2, 2, 0]);
        ech.insert(vec![0, 0, 5]);
        assert!(!ech.insert(vec![3, 3, 1]));
        let ns = ech.nullspace();
        assert_eq!(ns, vec![vec![p - 1, 1, 0]]);
        assert_eq!(ech.dot(&ns[0], &[7, 7, 9]), 0);
    }

    #[test]
    fn exact_echelon_agrees_with_batch_nullspace() {
        let m = mat(&[&["1", "2", "3", "4"], &["2", "4", "6", "8"], &["0", "1", "1/2", "0"]]);
        let mut ech = ExactEchelon::new(4);
        for r in &m {
            ech.insert(r.clone());
        }
        assert_eq!(ech.rank(), 2);
        assert_eq!(ech.nullspace(), nullspace_exact(&m, 4));
        for v in ech.nullspace() {
            for r in &m {
                let dot = r.iter().zip(&v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
                assert!(dot.is_zero());
            }
        }
    }
}
