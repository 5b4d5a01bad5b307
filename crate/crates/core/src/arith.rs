//! Exact scalar arithmetic.
//!
//! Two fields implement [`Field`]: [`PrimeField`], a word-sized prime field
//! whose modulus is chosen at runtime, and [`Rationals`], arbitrary-precision
//! fractions. All linear algebra in this crate is generic over `Field`.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// The modulus used when none is given.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Largest modulus accepted by [`PrimeField::new`] (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is out of range (need 2 < p < 2^62)")]
    ModulusOutOfRange(u64),
    #[error("modulus {0} is not prime")]
    Composite(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// A field context: constants, arithmetic, parsing and sampling for one
/// concrete field. Elements carry no reference to their context, so every
/// operation goes through `&self`.
// `from_*` constructors take `&self`: the modulus lives in the context
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, ArithError>;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Parses a decimal integer or a fraction `num/den`.
    fn parse(&self, s: &str) -> Result<Self::Elem, ArithError>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `acc += a * b`
    fn mul_add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        *acc = self.add(acc, &self.mul(a, b));
    }

    /// `row[i] -= factor * pivot[i]` over the whole slice.
    fn sub_scaled(&self, row: &mut [Self::Elem], factor: &Self::Elem, pivot: &[Self::Elem]) {
        for (r, p) in row.iter_mut().zip(pivot) {
            *r = self.sub(r, &self.mul(factor, p));
        }
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            self.mul_add_assign(&mut acc, x, y);
        }
        acc
    }
}

/// An element of GF(p), always reduced into `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// Serialized as a decimal string, like every scalar in this crate's
/// JSON output.
impl serde::Serialize for Fp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(p) for a prime `2 < p < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p <= 2 || p >= MAX_MODULUS {
            return Err(ArithError::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(ArithError::Composite(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Wraps an integer, reducing it mod p.
    pub fn elem(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self { p: DEFAULT_PRIME }
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        Fp(0)
    }

    fn one(&self) -> Fp {
        Fp(1)
    }

    #[inline]
    fn is_zero(&self, a: &Fp) -> bool {
        a.0 == 0
    }

    #[inline]
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        Fp(self.mulmod(a.0, b.0))
    }

    fn neg(&self, a: &Fp) -> Fp {
        Fp(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    /// Extended Euclid on signed 128-bit integers.
    fn inv(&self, a: &Fp) -> Result<Fp, ArithError> {
        if a.0 == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fp(t0.rem_euclid(self.p as i128) as u64))
    }

    fn from_i64(&self, v: i64) -> Fp {
        Fp((v as i128).rem_euclid(self.p as i128) as u64)
    }

    fn from_bigint(&self, v: &BigInt) -> Fp {
        let r = v.mod_floor(&BigInt::from(self.p));
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }

    /// Integers, or fractions `a/b` with `b` invertible mod p.
    fn parse(&self, s: &str) -> Result<Fp, ArithError> {
        let int = |t: &str| -> Result<Fp, ArithError> {
            let v: BigInt = t.trim().parse().map_err(|_| ArithError::Parse(s.to_string()))?;
            Ok(self.from_bigint(&v))
        };
        match s.trim().split_once('/') {
            Some((num, den)) => self.div(&int(num)?, &int(den)?),
            None => int(s),
        }
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp {
        Fp(rng.gen_range(0..self.p))
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    #[inline]
    fn mul_add_assign(&self, acc: &mut Fp, a: &Fp, b: &Fp) {
        *acc = Fp(((acc.0 as u128 + a.0 as u128 * b.0 as u128) % self.p as u128) as u64);
    }

    fn sub_scaled(&self, row: &mut [Fp], factor: &Fp, pivot: &[Fp]) {
        let neg = self.neg(factor).0 as u128;
        let p = self.p as u128;
        for (r, x) in row.iter_mut().zip(pivot) {
            if x.0 != 0 {
                r.0 = ((r.0 as u128 + neg * x.0 as u128) % p) as u64;
            }
        }
    }
}

/// Arbitrary-precision rationals, always in lowest terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

/// Range of the integers drawn by [`Rationals::random`].
const RATIONAL_SAMPLE_BOUND: i64 = 1000;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
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

    fn inv(&self, a: &BigRational) -> Result<BigRational, ArithError> {
        if a.is_zero() {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }

    fn parse(&self, s: &str) -> Result<BigRational, ArithError> {
        let err = || ArithError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let num: BigInt = num.trim().parse().map_err(|_| err())?;
                let den: BigInt = den.trim().parse().map_err(|_| err())?;
                if den.is_zero() {
                    return Err(ArithError::DivisionByZero);
                }
                Ok(BigRational::new(num, den))
            }
            None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
        }
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

/// Reduces a rational mod p, or `None` when the denominator vanishes mod p.
pub fn reduce_rational(field: &PrimeField, q: &BigRational) -> Option<Fp> {
    let den = field.from_bigint(q.denom());
    let inv = field.inv(&den).ok()?;
    Some(field.mul(&field.from_bigint(q.numer()), &inv))
}

/// Sign-aware conversion used by callers that want the symmetric residue.
pub fn symmetric_residue(field: &PrimeField, a: Fp) -> BigInt {
    let p = field.modulus();
    if a.0 > p / 2 {
        BigInt::from_biguint(Sign::Minus, (p - a.0).into())
    } else {
        BigInt::from(a.0)
    }
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are
/// exact for every n < 3.3 * 10^24, which covers all of u64.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
