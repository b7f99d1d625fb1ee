//! Simply-laced Cartan matrices and Dynkin diagram paths.
//!
//! Vertices are numbered from 1. The numbering of every diagram is fixed:
//!
//! | series | edges |
//! |--------|-------|
//! | `A_n`  | chain `1 - 2 - ... - n` |
//! | `D_n`  | `2` is the trivalent hub joined to `1`, `3`, `4`; then the chain `4 - 5 - ... - n` |
//! | `E_n`  | chain `1 - 3 - 4 - 5 - ... - n`, with `2` hanging off `4` |
//!
//! `E_n` follows the Bourbaki labelling.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    D,
    E,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Series::A => "A",
            Series::D => "D",
            Series::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            "D" | "d" => Ok(Series::D),
            "E" | "e" => Ok(Series::E),
            other => Err(Error::Parse(format!("unknown series `{other}` (expected A, D or E)"))),
        }
    }
}

/// A Cartan matrix of type A, D or E together with its Dynkin graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    series: Series,
    rank: usize,
    matrix: Vec<Vec<i64>>,
    /// Unordered edges `{i, j}` stored as `(i, j)` with `i < j`, 1-based.
    adjacency: BTreeSet<(usize, usize)>,
}

/// Builds the standard Cartan matrix for the given series and rank.
pub fn cartan_matrix(series: Series, rank: usize) -> Result<CartanDatum> {
    let valid = match series {
        Series::A => rank >= 1,
        Series::D => rank >= 4,
        Series::E => (6..=8).contains(&rank),
    };
    if !valid {
        return Err(Error::InvalidDiagram { series: series.to_string(), rank });
    }
    let edges: Vec<(usize, usize)> = match series {
        Series::A => (1..rank).map(|i| (i, i + 1)).collect(),
        Series::D => {
            let mut e = vec![(1, 2), (2, 3), (2, 4)];
            e.extend((4..rank).map(|i| (i, i + 1)));
            e
        }
        Series::E => {
            let mut e = vec![(1, 3), (2, 4)];
            e.extend((3..rank).map(|i| (i, i + 1)));
            e
        }
    };
    CartanDatum::from_edges(series, rank, &edges)
}

impl CartanDatum {
    fn from_edges(series: Series, rank: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut matrix = vec![vec![0i64; rank]; rank];
        let mut adjacency = BTreeSet::new();
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(i, j) in edges {
            matrix[i - 1][j - 1] = -1;
            matrix[j - 1][i - 1] = -1;
            adjacency.insert((i.min(j), i.max(j)));
        }
        let datum = CartanDatum { series, rank, matrix, adjacency };
        datum.check_invariants()?;
        Ok(datum)
    }

    fn check_invariants(&self) -> Result<()> {
        let n = self.rank;
        for i in 0..n {
            if self.matrix[i][i] != 2 {
                return Err(Error::Invalid(format!("diagonal entry {} is not 2", i + 1)));
            }
            for j in 0..n {
                if i != j && !matches!(self.matrix[i][j], 0 | -1) {
                    return Err(Error::Invalid("off-diagonal entry outside {0,-1}".into()));
                }
                if self.matrix[i][j] != self.matrix[j][i] {
                    return Err(Error::Invalid("Cartan matrix is not symmetric".into()));
                }
            }
        }
        if self.distances_from(1).iter().any(Option::is_none) {
            return Err(Error::Invalid("Dynkin diagram is disconnected".into()));
        }
        Ok(())
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Row-major Cartan matrix, 0-based indices.
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Entry `a_{ij}` with 1-based vertices.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i - 1][j - 1]
    }

    pub fn adjacency(&self) -> &BTreeSet<(usize, usize)> {
        &self.adjacency
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (1..=self.rank).filter(|&w| w != v && self.entry(v, w) != 0).collect()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.rank {
            Err(Error::UnknownVertex(v))
        } else {
            Ok(())
        }
    }

    /// BFS distances (in edges) from `base`; index 0 is unused.
    fn distances_from(&self, base: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.rank + 1];
        dist[0] = Some(0);
        dist[base] = Some(0);
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for w in self.neighbours(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices joined to `base` by a path of at most `m` edges. Includes `base`.
    pub fn gamma(&self, base: usize, m: usize) -> Result<BTreeSet<usize>> {
        self.check_vertex(base)?;
        let dist = self.distances_from(base);
        Ok((1..=self.rank).filter(|&v| dist[v].is_some_and(|d| d <= m)).collect())
    }

    /// Shortest path from `i` to `j`; ties go to the smallest next vertex.
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        let to_target = self.distances_from(j);
        let mut path = vec![i];
        let mut cur = i;
        while cur != j {
            let d = to_target[cur].expect("diagram is connected");
            cur = self
                .neighbours(cur)
                .into_iter()
                .find(|&w| to_target[w] == Some(d - 1))
                .expect("a neighbour closer to the target exists");
            path.push(cur);
        }
        Ok(path)
    }

    /// Distance in edges between two vertices.
    pub fn distance(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.path(i, j)?.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(m: &[Vec<i64>]) -> i64 {
        // cofactor expansion; fine for the small matrices used here
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum()
    }

    #[test]
    fn small_matrices() {
        assert_eq!(cartan_matrix(Series::A, 1).unwrap().matrix(), &[vec![2]]);
        assert_eq!(cartan_matrix(Series::A, 2).unwrap().matrix(), &[vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn d4_is_a_star_around_two() {
        let d4 = cartan_matrix(Series::D, 4).unwrap();
        assert_eq!(d4.neighbours(2), vec![1, 3, 4]);
        assert_eq!(d4.neighbours(1), vec![2]);
        assert_eq!(det(d4.matrix()), 4);
    }

    #[test]
    fn determinants_match_index_of_root_lattice() {
        for n in 1..=6 {
            assert_eq!(det(cartan_matrix(Series::A, n).unwrap().matrix()), n as i64 + 1);
        }
        for n in 4..=7 {
            assert_eq!(det(cartan_matrix(Series::D, n).unwrap().matrix()), 4);
        }
        for (n, d) in [(6, 3), (7, 2), (8, 1)] {
            assert_eq!(det(cartan_matrix(Series::E, n).unwrap().matrix()), d);
        }
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(cartan_matrix(Series::D, 3).is_err());
        assert!(cartan_matrix(Series::E, 9).is_err());
        assert!(cartan_matrix(Series::E, 5).is_err());
        assert!(cartan_matrix(Series::A, 0).is_err());
    }

    #[test]
    fn gamma_examples() {
        let a3 = cartan_matrix(Series::A, 3).unwrap();
        assert_eq!(a3.gamma(1, 1).unwrap(), BTreeSet::from([1, 2]));
        assert_eq!(a3.gamma(1, 0).unwrap(), BTreeSet::from([1]));
        let d4 = cartan_matrix(Series::D, 4).unwrap();
        assert_eq!(d4.gamma(1, 2).unwrap(), BTreeSet::from([1, 2, 3, 4]));
        assert!(a3.gamma(4, 1).is_err());
    }

    #[test]
    fn path_examples() {
        let a3 = cartan_matrix(Series::A, 3).unwrap();
        assert_eq!(a3.path(1, 3).unwrap(), vec![1, 2, 3]);
        let a2 = cartan_matrix(Series::A, 2).unwrap();
        assert_eq!(a2.path(1, 1).unwrap(), vec![1]);
        let d4 = cartan_matrix(Series::D, 4).unwrap();
        assert_eq!(d4.path(3, 4).unwrap(), vec![3, 2, 4]);
    }

    #[test]
    fn paths_and_gamma_agree_on_all_diagrams() {
        let mut data = Vec::new();
        for n in 1..=8 {
            data.push(cartan_matrix(Series::A, n).unwrap());
        }
        for n in 4..=8 {
            data.push(cartan_matrix(Series::D, n).unwrap());
        }
        for n in 6..=8 {
            data.push(cartan_matrix(Series::E, n).unwrap());
        }
        for d in &data {
            let n = d.rank();
            assert_eq!(d.gamma(1, n - 1).unwrap().len(), n);
            for j in 1..=n {
                let p = d.path(1, j).unwrap();
                let len = p.len() - 1;
                assert!(len < n);
                assert!(d.gamma(1, len).unwrap().contains(&j));
                let distinct: BTreeSet<_> = p.iter().collect();
                assert_eq!(distinct.len(), p.len());
                for w in p.windows(2) {
                    assert_eq!(d.entry(w[0], w[1]), -1);
                }
            }
            for m in 0..n {
                assert!(d.gamma(1, m).unwrap().is_subset(&d.gamma(1, m + 1).unwrap()));
            }
        }
    }
}
