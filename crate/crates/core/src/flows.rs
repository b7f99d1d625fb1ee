//! One-parameter adjoint flows and words of flows.
//!
//! A nilpotent step `X:t` acts by `exp(t ad_X)`; a toral step `H_i:u` acts
//! diagonally by `u^{⟨α, H_i⟩}` on each root vector `E_α`. Words are
//! evaluated right to left: the last step acts first.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::algebra::{AlgElement, BasisElem, LieAlgebra};
use crate::error::{Error, Result};
use crate::exactlin::{format_rational, parse_rational, ModP, MultiPoly, PolyRing, Rationals, Ring};

/// Most distinct symbols a single symbolic expansion may use.
pub const SYMBOLIC_VARIABLE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Nilpotent,
    Toral,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Param {
    Rational(BigRational),
    Symbol(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Rational(q) => f.write_str(&format_rational(q)),
            Param::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowStep {
    pub generator: usize,
    pub kind: StepKind,
    pub param: Param,
}

/// Product of flows `β_{t_1}(X_1) ... β_{t_k}(X_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FlowWord {
    pub steps: Vec<FlowStep>,
}

impl FlowWord {
    pub fn new() -> Self {
        FlowWord::default()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Appends a step; the kind follows from the generator.
    pub fn push(&mut self, l: &LieAlgebra, generator: usize, param: Param) -> &mut Self {
        let kind = match l.basis()[generator] {
            BasisElem::H(_) => StepKind::Toral,
            _ => StepKind::Nilpotent,
        };
        self.steps.push(FlowStep { generator, kind, param });
        self
    }

    pub fn with(mut self, l: &LieAlgebra, generator: usize, param: Param) -> Self {
        self.push(l, generator, param);
        self
    }

    /// `self` followed by `other`; `other` acts first.
    pub fn then(&self, other: &FlowWord) -> FlowWord {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        FlowWord { steps }
    }

    /// Distinct symbols in order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.steps {
            if let Param::Symbol(name) = &s.param {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
        out
    }

    /// Inverse word for rational parameters: reversed, `t → -t`, `u → 1/u`.
    pub fn inverse(&self) -> Result<FlowWord> {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| {
                let Param::Rational(q) = &s.param else {
                    return Err(Error::Invalid("only rational words can be inverted".into()));
                };
                let param = match s.kind {
                    StepKind::Nilpotent => Param::Rational(-q),
                    StepKind::Toral => {
                        if q.is_zero() {
                            return Err(Error::ZeroToralParameter);
                        }
                        Param::Rational(q.recip())
                    }
                };
                Ok(FlowStep { generator: s.generator, kind: s.kind, param })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FlowWord { steps })
    }

    /// Parses `E1:s,F2:t,H1:u,E[1,1]:1/2`.
    pub fn parse(l: &LieAlgebra, text: &str) -> Result<FlowWord> {
        let mut word = FlowWord::new();
        if text.trim().is_empty() {
            return Ok(word);
        }
        for part in split_steps(text) {
            let (gen, param) = part
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("step `{part}` is not of the form GEN:PARAM")))?;
            let g = l.parse_label(gen)?;
            let param = param.trim();
            let param = if param.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
                Param::Symbol(param.to_string())
            } else {
                Param::Rational(parse_rational(param)?)
            };
            word.push(l, g, param);
        }
        Ok(word)
    }

    pub fn display(&self, l: &LieAlgebra) -> String {
        let parts: Vec<String> =
            self.steps.iter().map(|s| format!("{}:{}", l.short_label(s.generator), s.param)).collect();
        parts.join(",")
    }
}

/// Splits on commas outside brackets.
fn split_steps(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

/// A single flow with its parameter already mapped into a ring.
#[derive(Debug, Clone)]
pub struct FlowMap<'a, R: Ring> {
    algebra: &'a LieAlgebra,
    ring: &'a R,
    generator: usize,
    kind: StepKind,
    param: R::Elem,
}

/// `exp(t ad_x)` for a root vector `x`.
pub fn nilpotent_flow<'a, R: Ring>(l: &'a LieAlgebra, ring: &'a R, x: usize, t: R::Elem) -> Result<FlowMap<'a, R>> {
    if let BasisElem::H(i) = l.basis()[x] {
        return Err(Error::NotNilpotent(format!("H{}", i + 1)));
    }
    Ok(FlowMap { algebra: l, ring, generator: x, kind: StepKind::Nilpotent, param: t })
}

/// Torus element acting by `u^{⟨α, H_i⟩}` on `E_α`.
pub fn toral_flow<'a, R: Ring>(l: &'a LieAlgebra, ring: &'a R, h: usize, u: R::Elem) -> Result<FlowMap<'a, R>> {
    if !matches!(l.basis()[h], BasisElem::H(_)) {
        return Err(Error::NotToral(l.label(h)));
    }
    if ring.is_zero(&u) {
        return Err(Error::ZeroToralParameter);
    }
    Ok(FlowMap { algebra: l, ring, generator: h, kind: StepKind::Toral, param: u })
}

impl<R: Ring> FlowMap<'_, R> {
    pub fn apply(&self, v: &[R::Elem]) -> Result<AlgElement<R::Elem>> {
        match self.kind {
            StepKind::Nilpotent => Ok(self.apply_nilpotent(v)),
            StepKind::Toral => self.apply_toral(v),
        }
    }

    fn apply_nilpotent(&self, v: &[R::Elem]) -> AlgElement<R::Elem> {
        let (l, ring) = (self.algebra, self.ring);
        let mut acc = v.to_vec();
        let mut term = v.to_vec();
        for k in 1..=l.dim() {
            term = l.ad_basis(ring, self.generator, &term);
            if term.iter().all(|c| ring.is_zero(c)) {
                break;
            }
            term = term.iter().map(|c| ring.div_int(&ring.mul(c, &self.param), k as i64)).collect();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a = ring.add(a, t);
            }
        }
        acc
    }

    fn apply_toral(&self, v: &[R::Elem]) -> Result<AlgElement<R::Elem>> {
        let (l, ring) = (self.algebra, self.ring);
        let BasisElem::H(i) = l.basis()[self.generator] else { unreachable!() };
        let mut powers = Vec::with_capacity(5);
        for e in -2..=2 {
            powers.push(ring.pow_int(&self.param, e)?);
        }
        Ok(v.iter()
            .enumerate()
            .map(|(k, c)| match l.weight(k) {
                None => c.clone(),
                Some(w) => {
                    let e = l.roots().pairing(&w, i);
                    if e == 0 {
                        c.clone()
                    } else {
                        ring.mul(c, &powers[(e + 2) as usize])
                    }
                }
            })
            .collect())
    }

    /// Dense matrix of the map; column `j` is the image of `b_j`.
    pub fn matrix(&self) -> Result<Vec<Vec<R::Elem>>> {
        let n = self.algebra.dim();
        let mut m = vec![vec![self.ring.zero(); n]; n];
        for j in 0..n {
            let col = self.apply(&self.algebra.basis_vector(self.ring, j))?;
            for (i, c) in col.into_iter().enumerate() {
                m[i][j] = c;
            }
        }
        Ok(m)
    }
}

/// Applies steps right to left with parameters already in `ring`.
pub fn apply_steps<R: Ring>(
    l: &LieAlgebra,
    ring: &R,
    steps: &[(usize, StepKind, R::Elem)],
    target: &[R::Elem],
) -> Result<AlgElement<R::Elem>> {
    let mut v = target.to_vec();
    for (g, kind, param) in steps.iter().rev() {
        let map = match kind {
            StepKind::Nilpotent => nilpotent_flow(l, ring, *g, param.clone())?,
            StepKind::Toral => toral_flow(l, ring, *g, param.clone())?,
        };
        v = map.apply(&v)?;
    }
    Ok(v)
}

fn rational_steps(w: &FlowWord) -> Result<Vec<(usize, StepKind, BigRational)>> {
    w.steps
        .iter()
        .map(|s| match &s.param {
            Param::Rational(q) => Ok((s.generator, s.kind, q.clone())),
            Param::Symbol(name) => Err(Error::Invalid(format!("symbol `{name}` in a rational evaluation"))),
        })
        .collect()
}

/// Applies a word with rational parameters.
pub fn apply_word(l: &LieAlgebra, w: &FlowWord, target: &[BigRational]) -> Result<AlgElement<BigRational>> {
    apply_steps(l, &Rationals, &rational_steps(w)?, target)
}

/// Applies a rational word after reducing every parameter modulo `p`.
pub fn apply_word_mod(l: &LieAlgebra, w: &FlowWord, field: &ModP, target: &[u64]) -> Result<AlgElement<u64>> {
    let steps = rational_steps(w)?
        .into_iter()
        .map(|(g, k, q)| Ok((g, k, field.reduce(&q)?)))
        .collect::<Result<Vec<_>>>()?;
    apply_steps(l, field, &steps, target)
}

/// Symbolic expansion of a word applied to a rational target. Toral symbols
/// become Laurent variables.
pub fn expand_word(l: &LieAlgebra, w: &FlowWord, target: &[BigRational]) -> Result<(PolyRing, Vec<MultiPoly>)> {
    let symbols = w.symbols();
    if symbols.len() > SYMBOLIC_VARIABLE_CAP {
        return Err(Error::SymbolicCapExceeded { found: symbols.len(), cap: SYMBOLIC_VARIABLE_CAP });
    }
    let mut ring = PolyRing::new::<&str>(&[]);
    for name in &symbols {
        let toral = w.steps.iter().any(|s| s.kind == StepKind::Toral && s.param == Param::Symbol(name.clone()));
        ring.add_var(name, toral);
    }
    let steps = w
        .steps
        .iter()
        .map(|s| {
            let p = match &s.param {
                Param::Rational(q) => MultiPoly::constant(q.clone()),
                Param::Symbol(name) => ring.var(name)?,
            };
            Ok((s.generator, s.kind, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let target: Vec<MultiPoly> = target.iter().map(|q| MultiPoly::constant(q.clone())).collect();
    let out = apply_steps(l, &ring, &steps, &target)?;
    Ok((ring, out))
}

/// Word of reflection representatives `exp(E_j) exp(-F_j) exp(E_j)` with
/// `Ad_g(H_1) = H_i`. Vertex `i` is 1-based.
pub fn weyl_conjugator(l: &LieAlgebra, i: usize) -> Result<FlowWord> {
    weyl_conjugator_from(l, 1, i)
}

/// Word sending `H_from` to `H_to`.
pub fn weyl_conjugator_from(l: &LieAlgebra, from: usize, to: usize) -> Result<FlowWord> {
    let n = l.rank();
    if from == 0 || from > n {
        return Err(Error::UnknownVertex(from));
    }
    if to == 0 || to > n {
        return Err(Error::UnknownVertex(to));
    }
    let a = l.roots().datum().matrix();
    let unit = |k: usize| {
        let mut v = vec![0i64; n];
        v[k - 1] = 1;
        v
    };
    let goal = unit(to);
    // reflections listed outermost first
    let mut queue: VecDeque<(Vec<i64>, Vec<usize>)> = VecDeque::from([(unit(from), Vec::new())]);
    let mut seen: HashSet<Vec<i64>> = HashSet::from([unit(from)]);
    let max_len = l.roots().num_positive() + 1;
    let mut found = None;
    while let Some((h, word)) = queue.pop_front() {
        if h == goal {
            found = Some(word);
            break;
        }
        if word.len() >= max_len {
            continue;
        }
        for j in 0..n {
            // s_j(h) = h - ⟨α_j, h⟩ H_j
            let pairing: i64 = (0..n).map(|k| h[k] * a[j][k]).sum();
            let mut next = h.clone();
            next[j] -= pairing;
            if seen.insert(next.clone()) {
                let mut w = vec![j + 1];
                w.extend(&word);
                queue.push_back((next, w));
            }
        }
    }
    let reflections = found.ok_or(Error::SearchExhausted(max_len))?;
    let one = || Param::Rational(BigRational::one());
    let minus_one = || Param::Rational(-BigRational::one());
    let mut word = FlowWord::new();
    for j in reflections {
        word.push(l, l.e(j), one()).push(l, l.f(j), minus_one()).push(l, l.e(j), one());
    }
    let r = Rationals;
    let image = apply_word(l, &word, &l.basis_vector(&r, l.h(from)))?;
    if image != l.basis_vector(&r, l.h(to)) {
        return Err(Error::Invalid(format!("reflection word fails to send H{from} to H{to}")));
    }
    Ok(word)
}

/// Rational parameter with numerator in `[-9, 9] \ {0}` and denominator in `[1, 4]`.
pub fn random_parameter<G: Rng + ?Sized>(rng: &mut G) -> BigRational {
    let mut num = rng.gen_range(-9i64..=8);
    if num >= 0 {
        num += 1;
    }
    let den = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random word: each step is `E_α`, `F_α` (uniform root) or toral `H_i`,
/// the three kinds equally likely.
pub fn random_word<G: Rng + ?Sized>(l: &LieAlgebra, rng: &mut G, len: usize) -> FlowWord {
    let p = l.roots().num_positive();
    let n = l.rank();
    let mut w = FlowWord::new();
    for _ in 0..len {
        let g = match rng.gen_range(0..3) {
            0 => l.e_root(rng.gen_range(0..p)),
            1 => l.f_root(rng.gen_range(0..p)),
            _ => l.h(rng.gen_range(1..=n)),
        };
        let param = random_parameter(rng);
        w.push(l, g, Param::Rational(param));
    }
    w
}
