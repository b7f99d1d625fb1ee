//! Sparse multivariate polynomials with rational coefficients.
//!
//! Monomials are sparse `(variable, exponent)` lists; variables are indices
//! into a [`PolyRing`]'s name list. Negative exponents are allowed only for
//! variables the ring marks as Laurent (torus) variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{format_rational, Ring};
use crate::error::{Error, Result};

/// Exponent vector, sparse and sorted by variable; no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u16, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u16) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary `(variable, exponent)` pairs.
    pub fn from_pairs(pairs: &[(u16, i32)]) -> Self {
        let mut acc: BTreeMap<u16, i32> = BTreeMap::new();
        for &(v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn pairs(&self) -> &[(u16, i32)] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn exponent(&self, v: u16) -> i32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, e: i32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, x)| (v, x * e)).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree, then the exponent of the
    /// lowest-numbered variable where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            let (mut i, mut j) = (0, 0);
            loop {
                let x = a.get(i);
                let y = b.get(j);
                match (x, y) {
                    (None, None) => return Ordering::Equal,
                    (Some(&(_, e)), None) => return e.cmp(&0),
                    (None, Some(&(_, e))) => return 0.cmp(&e),
                    (Some(&(v, e)), Some(&(w, f))) => match v.cmp(&w) {
                        Ordering::Less => return e.cmp(&0),
                        Ordering::Greater => return 0.cmp(&f),
                        Ordering::Equal => {
                            if e != f {
                                return e.cmp(&f);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial: monomial → nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        MultiPoly::term(Monomial::one(), c)
    }

    pub fn from_int(c: i64) -> Self {
        MultiPoly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn var(v: u16) -> Self {
        MultiPoly::term(Monomial::var(v), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Constant term when the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// The single monomial of a one-term polynomial, with its coefficient.
    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// Variables with a nonzero exponent somewhere.
    pub fn variables(&self) -> Vec<u16> {
        let mut vs: Vec<u16> = self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Substitutes rational values for every variable.
    pub fn evaluate(&self, values: &[BigRational]) -> Result<BigRational> {
        let r = super::Rationals;
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = values.get(v as usize).ok_or_else(|| Error::UnknownVariable(format!("#{v}")))?;
                t *= r.pow_int(x, e as i64)?;
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

/// Named variables, some of which may carry negative exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyRing {
    names: Vec<String>,
    laurent: Vec<bool>,
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        PolyRing { names: names.iter().map(|s| s.as_ref().to_string()).collect(), laurent: vec![false; names.len()] }
    }

    /// Adds a variable (or returns the existing one) and its generator.
    pub fn add_var(&mut self, name: &str, laurent: bool) -> MultiPoly {
        let v = match self.index(name) {
            Some(v) => {
                self.laurent[v as usize] |= laurent;
                v
            }
            None => {
                self.names.push(name.to_string());
                self.laurent.push(laurent);
                (self.names.len() - 1) as u16
            }
        };
        MultiPoly::var(v)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn is_laurent(&self, v: u16) -> bool {
        self.laurent.get(v as usize).copied().unwrap_or(false)
    }

    pub fn var(&self, name: &str) -> Result<MultiPoly> {
        self.index(name).map(MultiPoly::var).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Monomial from named exponents, e.g. `[("s", 1), ("t", 2)]`.
    pub fn monomial(&self, exps: &[(&str, i32)]) -> Result<Monomial> {
        let pairs = exps
            .iter()
            .map(|&(n, e)| self.index(n).map(|v| (v, e)).ok_or_else(|| Error::UnknownVariable(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Monomial::from_pairs(&pairs))
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = m
            .pairs()
            .iter()
            .map(|&(v, e)| {
                let name = self.names.get(v as usize).cloned().unwrap_or_else(|| format!("x{v}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }

    /// Human-readable form, highest terms first.
    pub fn format(&self, p: &MultiPoly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in p.terms().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&format_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&self.format_monomial(m));
            } else {
                let _ = write!(out, "{}*{}", format_rational(&abs), self.format_monomial(m));
            }
        }
        out
    }
}

/// Coefficient of the named monomial in `p`, zero if absent.
pub fn poly_coefficient(ring: &PolyRing, p: &MultiPoly, monomial: &[(&str, i32)]) -> Result<BigRational> {
    Ok(p.coefficient(&ring.monomial(monomial)?))
}

impl Ring for PolyRing {
    type Elem = MultiPoly;

    fn zero(&self) -> MultiPoly {
        MultiPoly::zero()
    }

    fn from_int(&self, v: i64) -> MultiPoly {
        MultiPoly::from_int(v)
    }

    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a + b
    }

    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a - b
    }

    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        a * b
    }

    fn neg(&self, a: &MultiPoly) -> MultiPoly {
        -a
    }

    fn is_zero(&self, a: &MultiPoly) -> bool {
        a.is_zero()
    }

    fn div_int(&self, a: &MultiPoly, k: i64) -> MultiPoly {
        a.scale(&BigRational::new(BigInt::one(), BigInt::from(k)))
    }

    fn scale_int(&self, a: &MultiPoly, k: i64) -> MultiPoly {
        a.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    fn pow_int(&self, a: &MultiPoly, e: i64) -> Result<MultiPoly> {
        if e >= 0 {
            let mut acc = MultiPoly::from_int(1);
            for _ in 0..e {
                acc = &acc * a;
            }
            return Ok(acc);
        }
        let (m, c) = a.as_monomial().ok_or(Error::NotLaurent)?;
        if m.pairs().iter().any(|&(v, _)| !self.is_laurent(v)) {
            return Err(Error::NotLaurent);
        }
        let r = super::Rationals;
        Ok(MultiPoly::term(m.pow(e as i32), r.pow_int(c, e)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn coefficient_lookup() {
        let ring = PolyRing::new(&["s", "t"]);
        let s = ring.var("s").unwrap();
        let t = ring.var("t").unwrap();
        let p = &MultiPoly::from_int(1) + &(&(&s * &t) * &t).scale(&q("3"));
        assert_eq!(poly_coefficient(&ring, &p, &[("s", 1), ("t", 2)]).unwrap(), q("3"));
        assert_eq!(poly_coefficient(&ring, &MultiPoly::zero(), &[("s", 4)]).unwrap(), q("0"));
        assert_eq!(
            poly_coefficient(&ring, &p, &[("w", 1)]),
            Err(Error::UnknownVariable("w".into()))
        );
    }

    #[test]
    fn expansion_coefficient() {
        let ring = PolyRing::new(&["s", "t"]);
        let one = MultiPoly::from_int(1);
        let a = &one + &ring.var("s").unwrap();
        let b = &one + &ring.var("t").unwrap();
        let p = &(&a * &b) * &b;
        assert_eq!(poly_coefficient(&ring, &p, &[("s", 1), ("t", 1)]).unwrap(), q("2"));
        assert_eq!(p.num_terms(), 6);
    }

    #[test]
    fn graded_lex_order() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        assert!(x > y);
        assert!(y.mul(&y) > x);
        assert!(x.mul(&y) > y.mul(&y));
        assert!(Monomial::one() < y);
    }

    #[test]
    fn laurent_powers() {
        let mut ring = PolyRing::new(&["s"]);
        let u = ring.add_var("u", true);
        let inv = ring.pow_int(&u, -2).unwrap();
        assert!(ring.mul(&inv, &ring.mul(&u, &u)) == MultiPoly::from_int(1));
        let s = ring.var("s").unwrap();
        assert_eq!(ring.pow_int(&s, -1), Err(Error::NotLaurent));
        let sum = &u + &s;
        assert_eq!(ring.pow_int(&sum, -1), Err(Error::NotLaurent));
    }

    #[test]
    fn formatting() {
        let ring = PolyRing::new(&["s", "t"]);
        let s = ring.var("s").unwrap();
        let t = ring.var("t").unwrap();
        let p = &(&MultiPoly::from_int(1) - &(&s * &t).scale(&q("2"))) + &t;
        assert_eq!(ring.format(&p), "-2*s*t + t + 1");
        assert_eq!(ring.format(&MultiPoly::zero()), "0");
    }

    #[test]
    fn evaluation() {
        let ring = PolyRing::new(&["s", "t"]);
        let s = ring.var("s").unwrap();
        let t = ring.var("t").unwrap();
        let p = &(&s * &s) - &t;
        assert_eq!(p.evaluate(&[q("3"), q("1/2")]).unwrap(), q("17/2"));
    }
}
