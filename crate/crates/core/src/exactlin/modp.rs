//! Arithmetic modulo a word-sized prime.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Ring;
use crate::error::{Error, Result};

/// Lower end of the prime range used for certificates.
pub const PRIME_LOW: u64 = 1 << 60;
/// Upper end (exclusive) of the prime range used for certificates.
pub const PRIME_HIGH: u64 = 1 << 62;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Draws a uniformly random prime in `[2^60, 2^62)`.
pub fn random_prime<R: rand::Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range(PRIME_LOW..PRIME_HIGH) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

pub fn reduce_int(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Image of a rational in `F_p`; fails when `p` divides the denominator.
pub fn reduce_rational(q: &BigRational, p: u64) -> Result<u64> {
    let d = reduce_int(q.denom(), p);
    if d == 0 {
        return Err(Error::BadPrime(p));
    }
    Ok(mul_mod(reduce_int(q.numer(), p), inv_mod(d, p), p))
}

/// Smallest-height rational `r/s` congruent to `a` mod `p`, with
/// `|r|, s < sqrt(p/2)`.
pub fn rational_reconstruction(a: u64, p: u64) -> Option<BigRational> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    let q = BigRational::new(BigInt::from(num), BigInt::from(den));
    (reduce_rational(&q, p).ok() == Some(a)).then_some(q)
}

/// Symmetric representative in `(-p/2, p/2]` as a signed integer.
pub fn symmetric(a: u64, p: u64) -> BigInt {
    if a > p / 2 {
        -BigInt::from(p - a)
    } else {
        BigInt::from(a)
    }
}

/// The prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModP {
    pub p: u64,
}

impl ModP {
    pub fn new(p: u64) -> Self {
        ModP { p }
    }

    pub fn reduce(&self, q: &BigRational) -> Result<u64> {
        reduce_rational(q, self.p)
    }
}

impl Ring for ModP {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn from_int(&self, v: i64) -> u64 {
        let m = (v as i128).rem_euclid(self.p as i128);
        m as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.p)
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.p)
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn neg(&self, a: &u64) -> u64 {
        sub_mod(0, *a, self.p)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn div_int(&self, a: &u64, k: i64) -> u64 {
        mul_mod(*a, inv_mod(self.from_int(k), self.p), self.p)
    }

    fn pow_int(&self, a: &u64, e: i64) -> Result<u64> {
        if e < 0 {
            if *a == 0 {
                return Err(Error::Invalid("zero has no inverse".into()));
            }
            Ok(pow_mod(inv_mod(*a, self.p), e.unsigned_abs(), self.p))
        } else {
            Ok(pow_mod(*a, e as u64, self.p))
        }
    }
}

/// Converts a residue back to a `BigInt` in `[0, p)`.
pub fn to_bigint(a: u64) -> BigInt {
    BigInt::from_biguint(Sign::Plus, a.into())
}

/// True when `q` is an integer of absolute value below `2^bits`.
pub fn fits_height(q: &BigRational, bits: u64) -> bool {
    let limit = BigInt::from(1u8) << bits;
    q.numer().abs() < limit && q.denom() < &limit && !q.denom().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007u64 * 998_244_353));
        // strong pseudoprime to several small bases
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn random_primes_are_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let p = random_prime(&mut rng);
            assert!((PRIME_LOW..PRIME_HIGH).contains(&p));
            assert!(is_prime(p));
        }
    }

    #[test]
    fn reduction_and_reconstruction() {
        let p = 1_000_000_007;
        let q = BigRational::new(BigInt::from(-7), BigInt::from(12));
        let a = reduce_rational(&q, p).unwrap();
        assert_eq!(mul_mod(a, 12, p), p - 7);
        assert_eq!(rational_reconstruction(a, p), Some(q));
        let bad = BigRational::new(BigInt::from(1), BigInt::from(p));
        assert_eq!(reduce_rational(&bad, p), Err(Error::BadPrime(p)));
    }

    #[test]
    fn field_ops() {
        let f = ModP::new(13);
        assert_eq!(f.div_int(&1, 2), 7);
        assert_eq!(f.pow_int(&2, -1).unwrap(), 7);
        assert_eq!(f.from_int(-1), 12);
        assert_eq!(symmetric(12, 13), BigInt::from(-1));
    }
}
