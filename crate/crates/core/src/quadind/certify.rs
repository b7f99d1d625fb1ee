//! Rank certificates for evaluation matrices of a function family and of
//! its pairwise products.
//!
//! Row `r` of a run is the family evaluated at the point drawn from the
//! ChaCha stream `r` of the run seed, so rows are reproducible one by one
//! and can be computed in any order. Rows are inserted in index order and
//! insertion stops at full rank.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::FunctionFamily;
use crate::error::{Error, Result};
use crate::exactlin::modp::{mul_mod, random_prime, rational_reconstruction};
use crate::exactlin::{
    format_rational, nullspace_exact, rank_exact, ExactEchelon, ModEchelon, ModP, RankCertificate, RankMode, Verdict,
};

/// Matrices with at most this many columns are also ranked exactly in
/// modular mode.
pub const EXACT_AUDIT_COLUMNS: usize = 16;

const CHUNK: usize = 64;
const CONFIRM_STREAM_BASE: u64 = 1 << 62;
const PRIME_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// First batch has `multiplier * columns` rows.
    pub multiplier: usize,
    /// Each later batch doubles the previous one.
    pub max_batches: usize,
    pub mode: RankMode,
    pub prime_retries: usize,
    /// Fresh batches used to re-check a candidate dependence.
    pub confirm_batches: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 1,
            multiplier: 2,
            max_batches: 4,
            mode: RankMode::Modular,
            prime_retries: 5,
            confirm_batches: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    Linear,
    Quadratic,
}

impl Degree {
    pub fn columns(self, m: usize) -> usize {
        match self {
            Degree::Linear => m,
            Degree::Quadratic => m * (m + 1) / 2,
        }
    }
}

/// Column of the product `x_i x_j` (`i ≤ j`), colexicographic.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

/// Inverse of [`pair_index`].
pub fn pair_of(idx: usize) -> (usize, usize) {
    let mut j = ((((8 * idx + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while j * (j + 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * (j + 2) / 2 <= idx {
        j += 1;
    }
    (idx - j * (j + 1) / 2, j)
}

fn quadratic_row<T, F: Fn(&T, &T) -> T>(v: &[T], mul: F) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len() * (v.len() + 1) / 2);
    for j in 0..v.len() {
        for i in 0..=j {
            out.push(mul(&v[i], &v[j]));
        }
    }
    out
}

fn row_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn confirm_stream(batch: usize, row: usize) -> u64 {
    CONFIRM_STREAM_BASE + ((batch as u64) << 32) + row as u64
}

struct Job<'a> {
    family: &'a dyn FunctionFamily,
    degree: Degree,
    config: &'a SamplerConfig,
    cols: usize,
}

impl Job<'_> {
    fn exact_row(&self, stream: u64) -> Result<Vec<BigRational>> {
        let v = self.family.evaluate(&mut row_rng(self.config.seed, stream))?;
        Ok(match self.degree {
            Degree::Linear => v,
            Degree::Quadratic => quadratic_row(&v, |a, b| a * b),
        })
    }

    fn mod_row(&self, stream: u64, field: &ModP) -> Result<Vec<u64>> {
        let v = self.family.evaluate_mod(&mut row_rng(self.config.seed, stream), field)?;
        Ok(match self.degree {
            Degree::Linear => v,
            Degree::Quadratic => quadratic_row(&v, |a, b| mul_mod(*a, *b, field.p)),
        })
    }

    fn exact_rows(&self, streams: std::ops::Range<usize>) -> Result<Vec<Vec<BigRational>>> {
        streams.into_par_iter().map(|r| self.exact_row(r as u64)).collect()
    }

    fn batch_size(&self, b: usize) -> usize {
        (self.config.multiplier.max(1) * self.cols).max(1) << b
    }

    /// Inserts rows in order until full rank or the batches run out.
    /// Returns the echelon basis and the number of rows consumed.
    fn modular_pass(&self, field: &ModP) -> Result<(ModEchelon, usize)> {
        let mut ech = ModEchelon::new(self.cols, field.p);
        let mut next = 0usize;
        for b in 0..self.config.max_batches.max(1) {
            let end = next + self.batch_size(b);
            let mut start = next;
            while start < end {
                let stop = (start + CHUNK).min(end);
                let rows: Vec<Result<Vec<u64>>> =
                    (start..stop).into_par_iter().map(|r| self.mod_row(r as u64, field)).collect();
                for (offset, row) in rows.into_iter().enumerate() {
                    ech.insert(row?);
                    if ech.is_full() {
                        return Ok((ech, start + offset + 1));
                    }
                }
                start = stop;
            }
            next = end;
        }
        Ok((ech, next))
    }

    /// Exact counterpart of `modular_pass`: rows in order until full rank.
    fn exact_pass(&self) -> Result<(ExactEchelon, usize)> {
        let mut ech = ExactEchelon::new(self.cols);
        let mut next = 0usize;
        for b in 0..self.config.max_batches.max(1) {
            let end = next + self.batch_size(b);
            let mut start = next;
            while start < end {
                let stop = (start + CHUNK).min(end);
                let rows = self.exact_rows(start..stop)?;
                // Most rows are already in the span once the rank saturates.
                let spanned: Vec<bool> = rows.par_iter().map(|r| ech.contains(r)).collect();
                for (offset, (row, known)) in rows.into_iter().zip(spanned).enumerate() {
                    if !known {
                        ech.insert(row);
                    }
                    if ech.is_full() {
                        return Ok((ech, start + offset + 1));
                    }
                }
                start = stop;
            }
            next = end;
        }
        Ok((ech, next))
    }

    /// Number of fresh batches whose rows the candidate annihilates,
    /// stopping at the first failure.
    fn confirm(&self, candidate: &[BigRational]) -> Result<usize> {
        let size = self.batch_size(0);
        let mut held = 0;
        for c in 0..self.config.confirm_batches {
            let rows: Vec<Vec<BigRational>> = (0..size)
                .into_par_iter()
                .map(|k| self.exact_row(confirm_stream(c, k)))
                .collect::<Result<_>>()?;
            let ok = rows.iter().all(|r| dot(r, candidate).is_zero());
            if !ok {
                break;
            }
            held += 1;
        }
        Ok(held)
    }

    fn verdict(&self, rank: usize, confirmed: usize) -> Verdict {
        if rank == self.cols {
            Verdict::CertifiedFullRank
        } else if confirmed == self.config.confirm_batches {
            Verdict::LikelyDependent
        } else {
            Verdict::RankDeficientCandidate
        }
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| if y.is_zero() { acc } else { acc + x * y })
}

/// Scales so the first nonzero entry is 1.
fn normalize(v: Vec<BigRational>) -> Vec<BigRational> {
    match v.iter().find(|x| !x.is_zero()).cloned() {
        Some(lead) if !lead.is_one() => v.into_iter().map(|x| x / &lead).collect(),
        _ => v,
    }
}

fn reconstruct(v: &[u64], p: u64) -> Option<Vec<BigRational>> {
    v.iter().map(|&a| rational_reconstruction(a, p)).collect()
}

fn render(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Certificate for `family` (linear) or its pairwise products (quadratic).
pub fn certify(family: &dyn FunctionFamily, degree: Degree, config: &SamplerConfig) -> Result<RankCertificate> {
    let m = family.dimension();
    if m == 0 {
        return Err(Error::Invalid("family has no functions".into()));
    }
    let job = Job { family, degree, config, cols: degree.columns(m) };
    match config.mode {
        RankMode::Exact => certify_exact(&job),
        RankMode::Modular => {
            let mut prime_rng = row_rng(config.seed, PRIME_STREAM);
            for _ in 0..config.prime_retries.max(1) {
                let p = random_prime(&mut prime_rng);
                match certify_modular(&job, p) {
                    Err(Error::BadPrime(_)) => continue,
                    other => return other,
                }
            }
            Err(Error::PrimeRetriesExceeded(config.prime_retries.max(1)))
        }
    }
}

fn certify_exact(job: &Job) -> Result<RankCertificate> {
    let (ech, samples) = job.exact_pass()?;
    let rank = ech.rank();
    let (candidate, confirmed) = if rank < job.cols {
        let c = normalize(ech.nullspace().remove(0));
        let held = job.confirm(&c)?;
        (Some(render(&c)), held)
    } else {
        (None, 0)
    };
    Ok(RankCertificate {
        mode: RankMode::Exact,
        prime: None,
        seed: job.config.seed,
        samples,
        shape: (samples, job.cols),
        rank,
        verdict: job.verdict(rank, confirmed),
        candidate_null: candidate,
        confirmed_batches: confirmed,
        exact_rank: None,
    })
}

fn certify_modular(job: &Job, p: u64) -> Result<RankCertificate> {
    let field = ModP::new(p);
    let (ech, samples) = job.modular_pass(&field)?;
    let mut rank = ech.rank();
    let mut exact_rows = None;
    let mut exact_rank = None;
    if job.cols <= EXACT_AUDIT_COLUMNS {
        let rows = job.exact_rows(0..samples)?;
        let r = rank_exact(&rows);
        // rank mod p never exceeds the rational rank
        debug_assert!(r >= rank);
        rank = rank.max(r);
        exact_rank = Some(r);
        exact_rows = Some(rows);
    }
    let (candidate, confirmed) = if rank < job.cols {
        let c = match ech.nullspace().first().and_then(|v| reconstruct(v, p)) {
            Some(c) if ech.rank() == rank => c,
            _ => {
                let rows = match exact_rows {
                    Some(r) => r,
                    None => job.exact_rows(0..samples)?,
                };
                nullspace_exact(&rows, job.cols).remove(0)
            }
        };
        let c = normalize(c);
        let held = job.confirm(&c)?;
        (Some(render(&c)), held)
    } else {
        (None, 0)
    };
    Ok(RankCertificate {
        mode: RankMode::Modular,
        prime: Some(p),
        seed: job.config.seed,
        samples,
        shape: (samples, job.cols),
        rank,
        verdict: job.verdict(rank, confirmed),
        candidate_null: candidate,
        confirmed_batches: confirmed,
        exact_rank,
    })
}

/// Linear span of the family: full rank means the functions are independent.
pub fn linear_dimension(family: &dyn FunctionFamily, config: &SamplerConfig) -> Result<RankCertificate> {
    certify(family, Degree::Linear, config)
}

/// Span of the pairwise products `f_i f_j`, `i ≤ j`.
pub fn quadratic_dimension(family: &dyn FunctionFamily, config: &SamplerConfig) -> Result<RankCertificate> {
    certify(family, Degree::Quadratic, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use crate::cartan::Series;
    use crate::quadind::family::{adjoint_family, CustomFamily};
    use std::sync::Arc;

    #[test]
    fn pair_indexing_round_trips() {
        let mut idx = 0;
        for j in 0..40 {
            for i in 0..=j {
                assert_eq!(pair_index(i, j), idx);
                assert_eq!(pair_index(j, i), idx);
                assert_eq!(pair_of(idx), (i, j));
                idx += 1;
            }
        }
    }

    #[test]
    fn small_adjoint_certificates() {
        let cfg = SamplerConfig::default();
        let a1 = adjoint_family(Arc::new(LieAlgebra::build(Series::A, 1).unwrap()));
        let lin = linear_dimension(&a1, &cfg).unwrap();
        assert_eq!((lin.rank, lin.verdict), (3, Verdict::CertifiedFullRank));
        assert_eq!(lin.exact_rank, Some(3));
        let quad = quadratic_dimension(&a1, &cfg).unwrap();
        assert_eq!((quad.rank, quad.verdict), (6, Verdict::CertifiedFullRank));

        let a2 = adjoint_family(Arc::new(LieAlgebra::build(Series::A, 2).unwrap()));
        assert_eq!(linear_dimension(&a2, &cfg).unwrap().rank, 8);
        let quad = quadratic_dimension(&a2, &cfg).unwrap();
        assert_eq!((quad.rank, quad.verdict), (36, Verdict::CertifiedFullRank));
        assert!(quad.samples >= 36 && quad.samples <= 72);
        assert!(quad.prime.unwrap() >= 1 << 60);
    }

    #[test]
    fn duplicate_coordinate_is_dependent() {
        let cfg = SamplerConfig::default();
        let cert = linear_dimension(&CustomFamily::duplicate(), &cfg).unwrap();
        assert_eq!(cert.rank, 1);
        assert_eq!(cert.candidate_null, Some(vec!["1".to_string(), "-1".to_string()]));
        assert_eq!(cert.verdict, Verdict::LikelyDependent);
    }

    #[test]
    fn circle_has_one_quadratic_relation() {
        for mode in [RankMode::Modular, RankMode::Exact] {
            let cfg = SamplerConfig { mode, ..SamplerConfig::default() };
            let cert = quadratic_dimension(&CustomFamily::circle(), &cfg).unwrap();
            assert_eq!(cert.rank, 5);
            let expected: Vec<String> = ["1", "0", "-1", "0", "0", "-1"].iter().map(|s| s.to_string()).collect();
            assert_eq!(cert.candidate_null, Some(expected));
            assert_eq!(cert.confirmed_batches, 3);
            assert_eq!(cert.verdict, Verdict::LikelyDependent);
        }
    }

    #[test]
    fn exact_and_modular_agree_on_a2() {
        let a2 = adjoint_family(Arc::new(LieAlgebra::build(Series::A, 2).unwrap()));
        let exact = SamplerConfig { mode: RankMode::Exact, ..SamplerConfig::default() };
        let e = quadratic_dimension(&a2, &exact).unwrap();
        let m = quadratic_dimension(&a2, &SamplerConfig::default()).unwrap();
        assert_eq!((e.rank, e.verdict), (m.rank, m.verdict));
    }
}
