//! Exact univariate polynomial arithmetic over Z and F_p, succinct multivariate
//! polynomials, and residue arithmetic modulo a monic polynomial.

pub(crate) mod fp;
mod gf2;
mod residue;
mod sparse;

pub use residue::{build_test_modulus, ResidueCtx};
pub use sparse::{Monomial, SparsePoly};

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut i = 5u64;
    while i.saturating_mul(i) <= n {
        if n % i == 0 || n % (i + 2) == 0 {
            return false;
        }
        i += 6;
    }
    true
}

/// The primes 2, 3, 5, ... in increasing order.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

/// The prime field F_p. Elements are canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl PrimeField {
    /// Field moduli must fit in 32 bits so that products of residues fit in a
    /// machine word.
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonical representative of an arbitrary integer.
    pub fn reduce(&self, a: &BigInt) -> u64 {
        let r = a.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        Some(self.pow(a, self.p - 2))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Coefficient ring of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Integer,
    Fp(PrimeField),
}

impl Ring {
    pub fn fp(p: u64) -> Result<Self> {
        Ok(Ring::Fp(PrimeField::new(p)?))
    }

    /// Canonical form of a coefficient in this ring.
    pub fn normalize(&self, c: &BigInt) -> BigInt {
        match self {
            Ring::Integer => c.clone(),
            Ring::Fp(f) => BigInt::from(f.reduce(c)),
        }
    }

    pub fn field(&self) -> Option<PrimeField> {
        match self {
            Ring::Integer => None,
            Ring::Fp(f) => Some(*f),
        }
    }

    pub(crate) fn check_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.to_string(), other.to_string()))
        }
    }
}

/// `z` or `fp:<p>`, the same syntax the command line accepts.
impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integer => write!(f, "z"),
            Ring::Fp(field) => write!(f, "fp:{}", field.p),
        }
    }
}

impl std::str::FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("z") {
            return Ok(Ring::Integer);
        }
        let p = s
            .strip_prefix("fp:")
            .or_else(|| s.strip_prefix("FP:"))
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| Error::InvalidParam(format!("unknown ring `{s}` (expected z or fp:<p>)")))?;
        Ring::fp(p)
    }
}

/// Dense univariate polynomial; `coeffs[i]` is the coefficient of `x^i`.
///
/// Canonical: no trailing zero coefficients, and over F_p every coefficient
/// is in `[0, p)`. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensePoly {
    ring: Ring,
    coeffs: Vec<BigInt>,
}

impl DensePoly {
    pub fn new(ring: Ring, coeffs: Vec<BigInt>) -> Self {
        let mut coeffs: Vec<BigInt> = match ring {
            Ring::Integer => coeffs,
            Ring::Fp(_) => coeffs.iter().map(|c| ring.normalize(c)).collect(),
        };
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DensePoly { ring, coeffs }
    }

    pub fn from_i64(ring: Ring, coeffs: &[i64]) -> Self {
        Self::new(ring, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(ring: Ring) -> Self {
        DensePoly {
            ring,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ring: Ring) -> Self {
        Self::new(ring, vec![BigInt::one()])
    }

    pub fn x(ring: Ring) -> Self {
        Self::monomial(ring, BigInt::one(), 1)
    }

    pub fn monomial(ring: Ring, c: BigInt, deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg];
        coeffs.push(c);
        Self::new(ring, coeffs)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly> {
        self.ring.check_same(&other.ring)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(Self::new(self.ring, coeffs))
    }

    pub fn neg(&self) -> DensePoly {
        Self::new(self.ring, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly> {
        self.add(&other.neg())
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly> {
        self.ring.check_same(&other.ring)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ring));
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::new(self.ring, out))
    }

    pub fn scale(&self, c: &BigInt) -> DensePoly {
        Self::new(self.ring, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Division with remainder: `self = quot * divisor + rem`, `deg rem < deg divisor`.
    ///
    /// Over Z the divisor must be monic. Over F_p any nonzero divisor works.
    pub fn divrem(&self, divisor: &DensePoly) -> Result<(DensePoly, DensePoly)> {
        self.ring.check_same(&divisor.ring)?;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = match self.ring {
            Ring::Integer => {
                if !divisor.is_monic() {
                    return Err(Error::NonMonicDivisor);
                }
                BigInt::one()
            }
            Ring::Fp(f) => {
                let lc = f.reduce(&divisor.coeffs[dd]);
                BigInt::from(f.inv(lc).ok_or(Error::DivisionByZero)?)
            }
        };
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(self.ring), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = self.ring.normalize(&(&rem[i] * &lead_inv));
            if c.is_zero() {
                continue;
            }
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                let v = &rem[i - dd + j] - &c * dj;
                rem[i - dd + j] = self.ring.normalize(&v);
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(self.ring, quot), Self::new(self.ring, rem)))
    }

    /// Evaluate at an integer point (over F_p the result is reduced).
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = self.ring.normalize(&(acc * x + c));
        }
        acc
    }

    /// Reinterpret integer coefficients modulo `p`.
    pub fn reduce_mod(&self, field: PrimeField) -> DensePoly {
        Self::new(Ring::Fp(field), self.coeffs.clone())
    }

    pub(crate) fn to_words(&self) -> Vec<u32> {
        let f = self.ring.field().expect("word form needs a prime field");
        let mut v: Vec<u32> = self.coeffs.iter().map(|c| f.reduce(c) as u32).collect();
        fp::trim(&mut v);
        v
    }

    pub(crate) fn from_words(field: PrimeField, words: &[u32]) -> DensePoly {
        DensePoly {
            ring: Ring::Fp(field),
            coeffs: {
                let mut v: Vec<BigInt> = words.iter().map(|&w| BigInt::from(w)).collect();
                while v.last().is_some_and(Zero::is_zero) {
                    v.pop();
                }
                v
            },
        }
    }

    /// Convert to the sparse representation (univariate).
    pub fn to_sparse(&self) -> SparsePoly {
        SparsePoly::new(
            1,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Monomial::new(c.clone(), vec![BigUint::from(i)]))
                .collect(),
        )
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sparse())
    }
}

pub(crate) fn abs_biguint(c: &BigInt) -> BigUint {
    c.abs().to_biguint().unwrap_or_default()
}
