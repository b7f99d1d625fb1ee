//! Noncommutative polynomials in matrix coefficients `Q_ij` and the formal
//! derivation that the coefficients commute.
//!
//! From the relations
//!
//! ```text
//! r1(i,j,k)   = Q_ij Q_kj - Q_kj Q_ij
//! r2(i,j,k,l) = Q_ik Q_jl + Q_il Q_jk - Q_jk Q_il - Q_jl Q_ik
//! ```
//!
//! and the antipode `κ(Q_ij) = Q_ji` (an antihomomorphism), the relation
//! `r6(i,j,k,l) = κ(r2(k,l,i,j))` satisfies `r2 - r6 = 2[Q_ik, Q_jl]`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::format_rational;

/// Generator `Q_ij`, 1-based.
pub type Gen = (u8, u8);

/// A formal sum of words in the `Q_ij`; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NCPoly {
    terms: BTreeMap<Vec<Gen>, BigRational>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        NCPoly::word(Vec::new(), BigRational::one())
    }

    pub fn word(w: Vec<Gen>, c: BigRational) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn q(i: u8, j: u8) -> Self {
        NCPoly::word(vec![(i, j)], BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Gen>, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &[Gen]) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, w: Vec<Gen>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(a: &NCPoly, b: &NCPoly) -> NCPoly {
        &(a * b) - &(b * a)
    }

    /// Scaled so the first term (in word order) has coefficient 1.
    pub fn monic(&self) -> NCPoly {
        match self.terms.values().next() {
            Some(lead) if !lead.is_one() => self.scale(&lead.recip()),
            _ => self.clone(),
        }
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self + &(-rhs)
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y);
            }
        }
        out
    }
}

fn gen_name(g: Gen) -> String {
    if g.0 < 10 && g.1 < 10 {
        format!("Q_{}{}", g.0, g.1)
    } else {
        format!("Q_{{{},{}}}", g.0, g.1)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let word: Vec<String> = w.iter().map(|&g| gen_name(g)).collect();
            if w.is_empty() {
                f.write_str(&format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                f.write_str(&word.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Antipode: linear, reverses words, transposes every generator.
pub fn antipode(p: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for (w, c) in &p.terms {
        out.add_term(w.iter().rev().map(|&(i, j)| (j, i)).collect(), c.clone());
    }
    out
}

fn q(i: usize, j: usize) -> NCPoly {
    NCPoly::q(i as u8, j as u8)
}

pub fn r1(i: usize, j: usize, k: usize) -> NCPoly {
    NCPoly::commutator(&q(i, j), &q(k, j))
}

pub fn r2(i: usize, j: usize, k: usize, l: usize) -> NCPoly {
    let plus = &(&q(i, k) * &q(j, l)) + &(&q(i, l) * &q(j, k));
    let minus = &(&q(j, k) * &q(i, l)) + &(&q(j, l) * &q(i, k));
    &plus - &minus
}

/// `κ(r2(k,l,i,j)) = Q_jl Q_ik + Q_il Q_jk - Q_jk Q_il - Q_ik Q_jl`.
pub fn r6(i: usize, j: usize, k: usize, l: usize) -> NCPoly {
    antipode(&r2(k, l, i, j))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    /// `r1(i,j,k)` or `r2(i,j,k,l)`.
    pub name: String,
    pub poly: NCPoly,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid(format!("matrix size must be at least 2, got {n}")));
    }
    if n > u8::MAX as usize {
        return Err(Error::Invalid(format!("matrix size {n} is too large")));
    }
    Ok(())
}

/// Nonzero relations, kept at first appearance and deduplicated up to a
/// nonzero scalar. All `r1` come before all `r2`, each in lexicographic
/// index order.
pub fn relation_set(n: usize) -> Result<Vec<Relation>> {
    check_n(n)?;
    let mut all = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                all.push(Relation { name: format!("r1({i},{j},{k})"), poly: r1(i, j, k) });
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    all.push(Relation { name: format!("r2({i},{j},{k},{l})"), poly: r2(i, j, k, l) });
                }
            }
        }
    }
    Ok(dedup_relations(all))
}

/// Drops zero relations and scalar multiples of earlier ones.
pub fn dedup_relations(rels: Vec<Relation>) -> Vec<Relation> {
    let mut seen = BTreeSet::new();
    rels.into_iter().filter(|r| !r.poly.is_zero() && seen.insert(r.poly.monic())).collect()
}

/// One tuple of the derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub tuple: (usize, usize, usize, usize),
    /// `r2 - r6 = 2*[Q_ik,Q_jl]` holds as an identity of noncommutative
    /// polynomials.
    pub holds: bool,
    /// The commutator is `[Q_ik, Q_ik]`, so the identity is `0 = 0`.
    pub trivial: bool,
    pub conclusion: String,
}

impl ProofStep {
    /// `rel(1,2,1,2): r2 - r6 = 2*[Q_11,Q_22]`.
    pub fn trace_line(&self) -> String {
        let (i, j, k, l) = self.tuple;
        format!(
            "rel({i},{j},{k},{l}): r2 - r6 = 2*[{},{}]",
            gen_name((i as u8, k as u8)),
            gen_name((j as u8, l as u8))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutativityProof {
    pub n: usize,
    /// Analytic facts taken as given.
    pub preamble: Vec<String>,
    pub steps: Vec<ProofStep>,
    /// Tuples `(i,j,k)` where `κ(r1(i,j,k)) = Q_jk Q_ji - Q_ji Q_jk` was checked.
    pub antipode_checks: usize,
    pub antipode_consistent: bool,
}

impl CommutativityProof {
    pub fn verified(&self) -> bool {
        self.antipode_consistent && self.steps.iter().all(|s| s.holds)
    }

    pub fn failures(&self) -> Vec<&ProofStep> {
        self.steps.iter().filter(|s| !s.holds).collect()
    }

    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        for s in &self.steps {
            out.push_str(&s.trace_line());
            out.push('\n');
        }
        out
    }
}

const PREAMBLE: [&str; 5] = [
    "assume: Q = (Q_ij) is the matrix of coefficients of a faithful finite-dimensional unitary representation",
    "assume: the coefficients are self-adjoint, Q_ij* = Q_ij, so Q is orthogonal and its inverse is its transpose",
    "assume: Q_ij Q_kj = Q_kj Q_ij for all i, j, k (relation r1)",
    "assume: Q_ik Q_jl + Q_il Q_jk = Q_jk Q_il + Q_jl Q_ik for all i, j, k, l (relation r2)",
    "assume: the antipode is an antihomomorphism with kappa(Q_ij) = Q_ji",
];

/// Checks `r2(i,j,k,l) - r6(i,j,k,l) = 2[Q_ik, Q_jl]` for all `n^4` tuples.
pub fn derive_commutativity(n: usize) -> Result<CommutativityProof> {
    check_n(n)?;
    let two = BigRational::from_integer(BigInt::from(2));
    let tuples: Vec<(usize, usize, usize, usize)> = (1..=n)
        .flat_map(|i| (1..=n).flat_map(move |j| (1..=n).flat_map(move |k| (1..=n).map(move |l| (i, j, k, l)))))
        .collect();
    let steps: Vec<ProofStep> = tuples
        .par_iter()
        .map(|&(i, j, k, l)| {
            let lhs = &r2(i, j, k, l) - &r6(i, j, k, l);
            let rhs = NCPoly::commutator(&q(i, k), &q(j, l)).scale(&two);
            ProofStep {
                tuple: (i, j, k, l),
                holds: lhs == rhs,
                trivial: (i, k) == (j, l),
                conclusion: format!("[{},{}] = 0", gen_name((i as u8, k as u8)), gen_name((j as u8, l as u8))),
            }
        })
        .collect();

    let mut antipode_checks = 0;
    let mut antipode_consistent = true;
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let expected = NCPoly::commutator(&q(j, k), &q(j, i));
                antipode_consistent &= antipode(&r1(i, j, k)) == expected;
                antipode_checks += 1;
            }
        }
    }
    Ok(CommutativityProof {
        n,
        preamble: PREAMBLE.iter().map(|s| s.to_string()).collect(),
        steps,
        antipode_checks,
        antipode_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_for_two_by_two() {
        let p = r2(1, 2, 1, 2);
        assert_eq!(p.to_string(), "Q_11 Q_22 + Q_12 Q_21 - Q_21 Q_12 - Q_22 Q_11");
        for i in 1..=3 {
            for j in 1..=3 {
                assert!(r1(i, j, i).is_zero());
            }
        }
    }

    #[test]
    fn antipode_examples() {
        let p = &NCPoly::q(1, 2) * &NCPoly::q(3, 4);
        assert_eq!(antipode(&p), &NCPoly::q(4, 3) * &NCPoly::q(2, 1));
        assert_eq!(antipode(&NCPoly::one()), NCPoly::one());
    }

    #[test]
    fn r6_matches_interchanged_relation() {
        // Q_jl Q_ik + Q_il Q_jk - Q_jk Q_il - Q_ik Q_jl
        let (i, j, k, l) = (1, 2, 3, 1);
        let expected = &(&(&(&q(j, l) * &q(i, k)) + &(&q(i, l) * &q(j, k))) - &(&q(j, k) * &q(i, l)))
            - &(&q(i, k) * &q(j, l));
        assert_eq!(r6(i, j, k, l), expected);
    }

    #[test]
    fn nontrivial_instance() {
        let two = BigRational::from_integer(BigInt::from(2));
        let diff = &r2(1, 2, 1, 2) - &r6(1, 2, 1, 2);
        assert_eq!(diff, NCPoly::commutator(&NCPoly::q(1, 1), &NCPoly::q(2, 2)).scale(&two));
        let proof = derive_commutativity(2).unwrap();
        let step = proof.steps.iter().find(|s| s.tuple == (1, 2, 1, 2)).unwrap();
        assert_eq!(step.trace_line(), "rel(1,2,1,2): r2 - r6 = 2*[Q_11,Q_22]");
        assert_eq!(step.conclusion, "[Q_11,Q_22] = 0");
    }

    #[test]
    fn all_tuples_up_to_four() {
        for n in 2..=4 {
            let proof = derive_commutativity(n).unwrap();
            assert_eq!(proof.steps.len(), n.pow(4));
            assert!(proof.verified());
        }
        assert!(derive_commutativity(1).is_err());
        assert!(relation_set(1).is_err());
    }

    #[test]
    fn trivial_tuples_reduce_to_zero() {
        let proof = derive_commutativity(3).unwrap();
        for s in proof.steps.iter().filter(|s| s.trivial) {
            let (i, j, k, l) = s.tuple;
            assert!((&r2(i, j, k, l) - &r6(i, j, k, l)).is_zero());
        }
    }

    #[test]
    fn relation_set_is_idempotent() {
        let rels = relation_set(3).unwrap();
        assert_eq!(dedup_relations(rels.clone()), rels);
        assert!(rels.iter().all(|r| !r.poly.is_zero()));
    }
}
