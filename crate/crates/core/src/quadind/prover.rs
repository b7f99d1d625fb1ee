//! Replays the coefficient-comparison proof of quadratic independence.
//!
//! For a quadratic form `Q = Σ_{X,Y} c_(X,Y) X̂ Ŷ` with symmetric `c`, every
//! word of the schedule is expanded symbolically at `H_1` and the coefficient
//! of each monomial of `Q(g·H_1)` gives one linear constraint on the
//! `N(N+1)/2` unknowns. The proof closes when the constraints have a zero
//! nullspace.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certify::{pair_index, pair_of};
use crate::algebra::{BasisElem, LieAlgebra};
use crate::error::{Error, Result};
use crate::exactlin::{format_rational, Monomial, Rationals};
use crate::flows::{expand_word, weyl_conjugator, FlowWord, Param};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverOptions {
    /// Largest rank accepted.
    pub max_rank: usize,
    /// Seed for the extension words drawn when the schedule leaves a
    /// nonzero nullspace.
    pub seed: u64,
    pub extension_rounds: usize,
    pub words_per_round: usize,
}

impl Default for ProverOptions {
    fn default() -> Self {
        ProverOptions { max_rank: 4, seed: 1, extension_rounds: 8, words_per_round: 8 }
    }
}

/// One distinct constraint and where it first appeared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Schedule tag, e.g. `h i=2`.
    pub source: String,
    pub word: String,
    pub monomial: String,
    /// `c(H2,H2) = 2*c(E2,F2)`.
    pub identity: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverReport {
    pub algebra: String,
    pub unknowns: usize,
    pub scheduled_words: usize,
    pub extension_words: usize,
    pub constraints: usize,
    pub rank: usize,
    pub nullspace_dim: usize,
    /// Unknowns left free when the nullspace is nonzero.
    pub free_unknowns: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

impl ProverReport {
    pub fn closes(&self) -> bool {
        self.nullspace_dim == 0
    }

    pub fn has_identity(&self, identity: &str) -> bool {
        self.trace.iter().any(|t| t.identity == identity)
    }

    /// `source | word | monomial | identity`, one line per constraint.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for t in &self.trace {
            let _ = writeln!(out, "{} | {} | {} | {}", t.source, t.word, t.monomial, t.identity);
        }
        out
    }
}

struct Scheduled {
    source: String,
    word: FlowWord,
}

fn sym(s: &str) -> Param {
    Param::Symbol(s.to_string())
}

/// The proof's words, in the order the argument uses them.
fn schedule(l: &LieAlgebra) -> Result<Vec<Scheduled>> {
    let n = l.rank();
    let d = l.roots().datum();
    let p = l.roots().num_positive();
    let mut base: Vec<Scheduled> = Vec::new();
    let push = |out: &mut Vec<Scheduled>, source: String, word: FlowWord| out.push(Scheduled { source, word });

    for r in 0..p {
        for g in [l.e_root(r), l.f_root(r)] {
            push(&mut base, format!("single {}", l.short_label(g)), FlowWord::new().with(l, g, sym("t")));
        }
    }
    for i in 1..=n {
        let w = FlowWord::new().with(l, l.e(i), sym("s")).with(l, l.f(i), sym("t"));
        push(&mut base, format!("h i={i}"), w);
    }
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            for (tag, x, y) in [("e_if_j", l.e(i), l.f(j)), ("e_ie_j", l.e(i), l.e(j)), ("f_if_j", l.f(i), l.f(j))] {
                push(&mut base, format!("{tag} i={i},j={j}"), FlowWord::new().with(l, x, sym("s")).with(l, y, sym("t")));
            }
        }
    }

    // iterated-bracket pairs: the letters of X then the letters of Y
    let letters = |g: usize, var: &str| -> FlowWord {
        let mut w = FlowWord::new();
        let word = match l.basis()[g] {
            BasisElem::E(r) | BasisElem::F(r) => l.roots().bracket_word(r),
            BasisElem::H(_) => Vec::new(),
        };
        let is_e = matches!(l.basis()[g], BasisElem::E(_));
        for (k, &i) in word.iter().enumerate() {
            let gen = if is_e { l.e(i + 1) } else { l.f(i + 1) };
            w.push(l, gen, sym(&format!("{var}{}", k + 1)));
        }
        w
    };
    let vectors: Vec<usize> = (n..l.dim()).collect();
    for (a, &x) in vectors.iter().enumerate() {
        for &y in &vectors[a..] {
            let tall = |g: usize| l.weight(g).is_some_and(|w| w.iter().map(|c| c.abs()).sum::<i64>() > 1);
            if !tall(x) && !tall(y) {
                continue;
            }
            let w = letters(x, "s").then(&letters(y, "t"));
            push(&mut base, format!("pair {},{}", l.short_label(x), l.short_label(y)), w);
        }
    }

    // the same words acting on H_i = Ad_{g_i}(H_1)
    let mut words: Vec<Scheduled> = Vec::new();
    let mut conjugated = Vec::new();
    for i in 2..=n {
        let g = weyl_conjugator(l, i)?;
        for s in &base {
            conjugated.push(Scheduled { source: format!("{} at H{i}", s.source), word: s.word.then(&g) });
        }
    }
    words.extend(base);
    words.extend(conjugated);

    for i in 1..=n {
        for j in d.neighbours(i) {
            let w = FlowWord::new().with(l, l.e(i), sym("w")).with(l, l.e(j), sym("s")).with(l, l.f(j), sym("t"));
            push(&mut words, format!("e_ie_jf_j i={i},j={j}"), w);
            let w = FlowWord::new().with(l, l.f(i), sym("w")).with(l, l.f(j), sym("s")).with(l, l.e(j), sym("t"));
            push(&mut words, format!("f_if_je_j i={i},j={j}"), w);
        }
    }

    // ladders along the path 1 = j_1, ..., j_k = j
    let ladder = |path: &[usize], prime: &str| -> FlowWord {
        let mut w = FlowWord::new();
        for &v in path[1..path.len() - 1].iter().rev() {
            w.push(l, l.e(v), sym(&format!("s{prime}{v}")));
            w.push(l, l.f(v), sym(&format!("t{prime}{v}")));
        }
        w
    };
    let paths: Vec<Vec<usize>> = (1..=n).map(|j| d.path(1, j)).collect::<Result<_>>()?;
    for j in 2..=n {
        let rungs = ladder(&paths[j - 1], "");
        let heads = [
            ("ladder E", FlowWord::new().with(l, l.e(j), sym("w"))),
            ("ladder F", FlowWord::new().with(l, l.f(j), sym("w"))),
            ("ladder EF", FlowWord::new().with(l, l.e(j), sym("w")).with(l, l.f(j), sym("w'"))),
            ("ladder FE", FlowWord::new().with(l, l.f(j), sym("w")).with(l, l.e(j), sym("w'"))),
        ];
        for (tag, head) in heads {
            push(&mut words, format!("{tag} j={j}"), head.then(&rungs));
        }
    }
    // crossed ladders: a short ladder ending in F_i on top of a longer one ending in E_j
    for j in 2..=n {
        let dj = paths[j - 1].len();
        let inner = FlowWord::new().with(l, l.e(j), sym("w")).then(&ladder(&paths[j - 1], ""));
        let inner_f = FlowWord::new().with(l, l.f(j), sym("w")).then(&ladder(&paths[j - 1], ""));
        for i in 1..=n {
            if paths[i - 1].len() >= dj {
                continue;
            }
            let outer = if i == 1 { FlowWord::new() } else { ladder(&paths[i - 1], "'") };
            let top = FlowWord::new().with(l, l.f(i), sym("w'")).then(&outer);
            push(&mut words, format!("aje i={i},j={j}"), top.then(&inner));
            let top = FlowWord::new().with(l, l.e(i), sym("w'")).then(&outer);
            push(&mut words, format!("aje' i={i},j={j}"), top.then(&inner_f));
        }
    }
    Ok(words)
}

/// Sparse reduced row echelon form over `Q`.
#[derive(Default)]
struct SparseEchelon {
    rows: Vec<BTreeMap<usize, BigRational>>,
    pivot_of: BTreeMap<usize, usize>,
}

impl SparseEchelon {
    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, row: &BTreeMap<usize, BigRational>) -> bool {
        let mut r = row.clone();
        let hits: Vec<(usize, BigRational)> =
            r.iter().filter(|(c, _)| self.pivot_of.contains_key(c)).map(|(c, v)| (*c, v.clone())).collect();
        for (c, f) in hits {
            for (k, v) in &self.rows[self.pivot_of[&c]] {
                let e = r.entry(*k).or_insert_with(BigRational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    r.remove(k);
                }
            }
        }
        let Some((&lead, lv)) = r.iter().next() else {
            return false;
        };
        let inv = lv.recip();
        for v in r.values_mut() {
            *v *= &inv;
        }
        for b in self.rows.iter_mut() {
            if let Some(f) = b.get(&lead).cloned() {
                for (k, v) in &r {
                    let e = b.entry(*k).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        b.remove(k);
                    }
                }
            }
        }
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(r);
        true
    }
}

type Constraint = BTreeMap<usize, BigRational>;

/// Monomial coefficients of `Σ_{i≤j} c_ij m_ij v_i v_j`, `m_ij = 2` off the
/// diagonal, each scaled so its lowest unknown has coefficient 1.
fn constraints_of(l: &LieAlgebra, word: &FlowWord) -> Result<Vec<(String, Constraint)>> {
    let (ring, v) = expand_word(l, word, &l.basis_vector(&Rationals, l.h(1)))?;
    let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut by_monomial: BTreeMap<Monomial, Constraint> = BTreeMap::new();
    for (a, &i) in nz.iter().enumerate() {
        for &j in &nz[a..] {
            let prod = &v[i] * &v[j];
            let idx = pair_index(i, j);
            for (m, c) in prod.terms() {
                let c = if i == j { c.clone() } else { c * &two };
                let e = by_monomial.entry(m.clone()).or_default().entry(idx).or_insert_with(BigRational::zero);
                *e += c;
            }
        }
    }
    let mut out = Vec::new();
    for (m, mut row) in by_monomial {
        row.retain(|_, c| !c.is_zero());
        let Some(lead) = row.values().next().cloned() else { continue };
        for c in row.values_mut() {
            *c /= &lead;
        }
        out.push((ring.format_monomial(&m), row));
    }
    Ok(out)
}

fn unknown_label(l: &LieAlgebra, idx: usize) -> String {
    let (i, j) = pair_of(idx);
    format!("c({},{})", l.short_label(i), l.short_label(j))
}

/// `c(A,B) = 2*c(C,D) - c(E,F)`; the lowest unknown stands alone on the left.
fn render_identity(l: &LieAlgebra, row: &Constraint) -> String {
    let mut it = row.iter();
    let (&first, _) = it.next().expect("constraint rows are nonzero");
    let mut rhs = String::new();
    for (k, (&idx, c)) in it.enumerate() {
        let c = -c;
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                rhs.push('-');
            }
        } else {
            rhs.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            let _ = write!(rhs, "{}*", format_rational(&abs));
        }
        rhs.push_str(&unknown_label(l, idx));
    }
    if rhs.is_empty() {
        rhs.push('0');
    }
    format!("{} = {}", unknown_label(l, first), rhs)
}

fn random_symbolic_word(l: &LieAlgebra, rng: &mut ChaCha8Rng, round: usize, k: usize) -> FlowWord {
    let p = l.roots().num_positive();
    let mut w = FlowWord::new();
    for step in 0..4 {
        let r = rng.gen_range(0..p);
        let g = if rng.gen_bool(0.5) { l.e_root(r) } else { l.f_root(r) };
        w.push(l, g, sym(&format!("x{round}_{k}_{step}")));
    }
    w
}

/// Expands the proof's schedule on `l` and solves for the `c_(X,Y)`.
pub fn coefficient_prover(l: &LieAlgebra, options: &ProverOptions) -> Result<ProverReport> {
    if l.rank() > options.max_rank {
        return Err(Error::Invalid(format!(
            "coefficient prover is limited to rank {} ({} has rank {})",
            options.max_rank,
            l.name(),
            l.rank()
        )));
    }
    let dim = l.dim();
    let unknowns = dim * (dim + 1) / 2;
    let words = schedule(l)?;
    let scheduled_words = words.len();

    let mut ech = SparseEchelon::default();
    let mut seen: HashSet<Vec<(usize, BigRational)>> = HashSet::new();
    let mut trace = Vec::new();
    let mut absorb = |batch: &[Scheduled], ech: &mut SparseEchelon, trace: &mut Vec<TraceEntry>| -> Result<()> {
        let expanded: Vec<Result<Vec<(String, Constraint)>>> =
            batch.par_iter().map(|s| constraints_of(l, &s.word)).collect();
        for (s, rows) in batch.iter().zip(expanded) {
            for (monomial, row) in rows? {
                let key: Vec<(usize, BigRational)> = row.iter().map(|(k, v)| (*k, v.clone())).collect();
                if !seen.insert(key) {
                    continue;
                }
                trace.push(TraceEntry {
                    source: s.source.clone(),
                    word: s.word.display(l),
                    monomial,
                    identity: render_identity(l, &row),
                });
                if ech.rank() < unknowns {
                    ech.insert(&row);
                }
            }
        }
        Ok(())
    };
    absorb(&words, &mut ech, &mut trace)?;

    let mut extension_words = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for round in 0..options.extension_rounds {
        if ech.rank() == unknowns {
            break;
        }
        let batch: Vec<Scheduled> = (0..options.words_per_round)
            .map(|k| Scheduled {
                source: format!("extension {round}.{k}"),
                word: random_symbolic_word(l, &mut rng, round, k),
            })
            .collect();
        extension_words += batch.len();
        absorb(&batch, &mut ech, &mut trace)?;
    }

    let free_unknowns =
        (0..unknowns).filter(|c| !ech.pivot_of.contains_key(c)).map(|c| unknown_label(l, c)).collect();
    Ok(ProverReport {
        algebra: l.name(),
        unknowns,
        scheduled_words,
        extension_words,
        constraints: seen.len(),
        rank: ech.rank(),
        nullspace_dim: unknowns - ech.rank(),
        free_unknowns,
        trace,
    })
}
