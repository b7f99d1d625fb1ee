//! Exact arithmetic kernel: rationals, word-sized prime fields, sparse
//! multivariate (Laurent) polynomials, and rank computations.

pub mod modp;
pub mod poly;
pub mod rank;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use modp::ModP;
pub use poly::{poly_coefficient, Monomial, MultiPoly, PolyRing};
pub use rank::{nullspace_exact, ExactEchelon, rank_exact, rank_modular, ModEchelon, RankCertificate, RankMode, Verdict};

/// A commutative ring that also allows division by small nonzero integers.
///
/// The ring value carries whatever context its elements need (a modulus, a
/// variable list), so elements themselves stay plain data.
pub trait Ring: Sync + Send {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn from_int(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `a / k` for a nonzero integer `k`.
    fn div_int(&self, a: &Self::Elem, k: i64) -> Self::Elem;
    /// Integer power; negative exponents need `a` to be a unit.
    fn pow_int(&self, a: &Self::Elem, e: i64) -> Result<Self::Elem>;

    fn one(&self) -> Self::Elem {
        self.from_int(1)
    }

    fn scale_int(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        self.mul(a, &self.from_int(k))
    }
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn from_int(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn div_int(&self, a: &BigRational, k: i64) -> BigRational {
        a / BigInt::from(k)
    }

    fn pow_int(&self, a: &BigRational, e: i64) -> Result<BigRational> {
        if e < 0 && a.is_zero() {
            return Err(Error::Invalid("zero has no inverse".into()));
        }
        let base = if e < 0 { a.recip() } else { a.clone() };
        let mut acc = BigRational::one();
        for _ in 0..e.unsigned_abs() {
            acc *= &base;
        }
        Ok(acc)
    }

    fn scale_int(&self, a: &BigRational, k: i64) -> BigRational {
        a * BigInt::from(k)
    }
}

/// Parses `n`, `-n`, or `n/d`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `n` or `n/d`, as used in reports.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return ints;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
    ints.into_iter().map(|x| x / &gcd * &sign).collect()
}
