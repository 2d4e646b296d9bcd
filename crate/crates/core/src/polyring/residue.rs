use num_bigint::BigUint;

use super::fp::{self, FastModulus};
use super::{DensePoly, PrimeField, Ring};
use crate::error::{Error, Result};

/// Arithmetic in F_p[x] / (T) for a monic `T` of degree `D >= 1`.
///
/// Residues are [`DensePoly`] values of degree `< D`. Internally the modulus
/// is kept in word form with a precomputed Barrett inverse.
#[derive(Clone, Debug)]
pub struct ResidueCtx {
    field: PrimeField,
    modulus: DensePoly,
    fast: FastModulus,
}

impl ResidueCtx {
    pub fn new(modulus: DensePoly) -> Result<Self> {
        let field = modulus
            .ring()
            .field()
            .ok_or_else(|| Error::InvalidModulus("residue rings need a prime field".into()))?;
        match modulus.degree() {
            None | Some(0) => {
                return Err(Error::InvalidModulus("modulus must have degree >= 1".into()))
            }
            _ => {}
        }
        if !modulus.is_monic() {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        let fast = FastModulus::new(modulus.to_words(), field.modulus());
        Ok(ResidueCtx {
            field,
            modulus,
            fast,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ring(&self) -> Ring {
        Ring::Fp(self.field)
    }

    pub fn modulus(&self) -> &DensePoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.fast.degree()
    }

    fn words(&self, a: &DensePoly) -> Result<Vec<u32>> {
        self.ring().check_same(&a.ring())?;
        Ok(a.to_words())
    }

    pub(crate) fn lift(&self, words: &[u32]) -> DensePoly {
        DensePoly::from_words(self.field, words)
    }

    pub(crate) fn fast(&self) -> &FastModulus {
        &self.fast
    }

    /// `a mod T` for a polynomial of any degree.
    pub fn reduce(&self, a: &DensePoly) -> Result<DensePoly> {
        let w = self.words(a)?;
        Ok(self.lift(&self.fast.reduce(w)))
    }

    pub fn add(&self, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
        let (a, b) = (self.words(a)?, self.words(b)?);
        let s = fp::add(&a, &b, self.field.modulus());
        Ok(self.lift(&self.fast.reduce(s)))
    }

    pub fn mul(&self, a: &DensePoly, b: &DensePoly) -> Result<DensePoly> {
        let a = self.fast.reduce(self.words(a)?);
        let b = self.fast.reduce(self.words(b)?);
        Ok(self.lift(&self.fast.mulmod(&a, &b)))
    }

    /// `base^n mod T` with `O(bitlen n)` residue multiplications.
    pub fn modpow(&self, base: &DensePoly, n: &BigUint) -> Result<DensePoly> {
        let b = self.words(base)?;
        Ok(self.lift(&self.fast.pow(&b, n)))
    }

    /// `x^n mod T`; same value as `modpow(x, n)` with the multiplications by
    /// `x` done as shifts.
    pub fn x_pow(&self, n: &BigUint) -> DensePoly {
        self.lift(&self.fast.x_pow(n))
    }
}

/// The random test modulus `T = Q_r(A)` with `Q_r(y) = 1 + y + ... + y^{r-1}`
/// and `A(x) = x^t + sum_i b_i x^i`.
///
/// `Q_r(A)` is evaluated by Horner's rule (`res <- res * A + 1`, `r - 1` times),
/// so the result is monic of degree exactly `t * (r - 1)`.
pub fn build_test_modulus(r: u64, b: &[bool], t: usize, field: PrimeField) -> Result<ResidueCtx> {
    let ell = b.len();
    if ell == 0 {
        return Err(Error::InvalidTrialParams("b must have length >= 1".into()));
    }
    if t < ell {
        return Err(Error::InvalidTrialParams(format!("t = {t} is smaller than ell = {ell}")));
    }
    if r < 2 || !super::is_prime(r) {
        return Err(Error::InvalidTrialParams(format!("r = {r} is not a prime")));
    }
    if r == field.modulus() {
        return Err(Error::InvalidTrialParams(format!("r = {r} equals the field characteristic")));
    }
    let p = field.modulus();
    // A is sparse: at most ell + 1 nonzero terms.
    let a_terms: Vec<usize> = b
        .iter()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .map(|(i, _)| i)
        .chain(std::iter::once(t))
        .collect();
    if p == 2 {
        let mut res: Vec<u64> = vec![1];
        for _ in 1..r {
            let mut next = vec![0u64; (res.len() * 64 + t) / 64 + 1];
            for &shift in &a_terms {
                super::gf2::xor_shifted(&mut next, &res, shift);
            }
            next[0] ^= 1;
            res = next;
        }
        return ResidueCtx::new(DensePoly::from_words(field, &super::gf2::unpack(&res)));
    }
    let mut res: Vec<u32> = vec![1];
    for _ in 1..r {
        let mut next = vec![0u32; res.len() + t];
        for &shift in &a_terms {
            for (i, &c) in res.iter().enumerate() {
                let v = next[i + shift] as u64 + c as u64;
                next[i + shift] = (if v >= p { v - p } else { v }) as u32;
            }
        }
        next[0] = ((next[0] as u64 + 1) % p) as u32;
        fp::trim(&mut next);
        res = next;
    }
    ResidueCtx::new(DensePoly::from_words(field, &res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::One;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn poly(p: u64, c: &[i64]) -> DensePoly {
        DensePoly::from_i64(Ring::Fp(f(p)), c)
    }

    #[test]
    fn modpow_examples() {
        let ctx = ResidueCtx::new(poly(3, &[1, 0, 1])).unwrap();
        let x = DensePoly::x(ctx.ring());
        // x^2 = -1, x^4 = 1, so x^5 = x
        assert_eq!(ctx.modpow(&x, &BigUint::from(5u32)).unwrap(), x);
        assert_eq!(ctx.modpow(&x, &BigUint::from(0u32)).unwrap(), DensePoly::one(ctx.ring()));
    }

    #[test]
    fn repeated_squaring_matches_big_exponent() {
        let ctx = build_test_modulus(5, &[true, false, true], 3, f(7)).unwrap();
        let x = DensePoly::x(ctx.ring());
        let two = BigUint::from(2u32);
        let mut iterated = x.clone();
        for _ in 0..64 {
            iterated = ctx.modpow(&iterated, &two).unwrap();
        }
        let direct = ctx.modpow(&x, &(BigUint::one() << 64)).unwrap();
        assert_eq!(direct, iterated);
        assert_eq!(ctx.x_pow(&(BigUint::one() << 64)), iterated);
    }

    #[test]
    fn test_modulus_small_case() {
        // r=3, b=(0), t=1: A = x, T = x^2 + x + 1
        let ctx = build_test_modulus(3, &[false], 1, f(2)).unwrap();
        assert_eq!(ctx.modulus(), &poly(2, &[1, 1, 1]));
        assert_eq!(ctx.degree(), 2);
    }

    #[test]
    fn test_modulus_r2_is_a_plus_one() {
        let ctx = build_test_modulus(2, &[true, true], 4, f(3)).unwrap();
        // A = x^4 + x + 1, T = A + 1
        assert_eq!(ctx.modulus(), &poly(3, &[2, 1, 0, 0, 1]));
    }

    #[test]
    fn test_modulus_rejects_bad_parameters() {
        assert!(build_test_modulus(2, &[true], 1, f(2)).is_err());
        assert!(build_test_modulus(4, &[true], 1, f(3)).is_err());
        assert!(build_test_modulus(5, &[true, true], 1, f(3)).is_err());
        assert!(build_test_modulus(5, &[], 1, f(3)).is_err());
    }

    #[test]
    fn modulus_degree_is_t_times_r_minus_one() {
        for &(r, t, p) in &[(3u64, 1usize, 2u64), (7, 5, 3), (11, 9, 2), (67, 65, 2)] {
            let b: Vec<bool> = (0..t.min(5)).map(|i| i % 2 == 0).collect();
            let ctx = build_test_modulus(r, &b, t, f(p)).unwrap();
            assert_eq!(ctx.degree(), t * (r as usize - 1));
            assert!(ctx.modulus().is_monic());
        }
    }

    #[test]
    fn horner_matches_dense_arithmetic() {
        // Q_r(A) = 1 + A + ... + A^{r-1} by plain polynomial arithmetic
        for (p, r, t, bits) in [(2u64, 7u64, 5usize, 0b1011u32), (2, 131, 70, 0x2d), (3, 5, 4, 0b101), (7, 11, 3, 0b11)] {
            let ell = t.min(6);
            let b: Vec<bool> = (0..ell).map(|i| bits >> i & 1 == 1).collect();
            let ring = Ring::Fp(f(p));
            let mut a = DensePoly::monomial(ring, BigInt::one(), t);
            for (i, &bit) in b.iter().enumerate() {
                if bit {
                    a = a.add(&DensePoly::monomial(ring, BigInt::one(), i)).unwrap();
                }
            }
            let mut power = DensePoly::one(ring);
            let mut q = DensePoly::zero(ring);
            for _ in 0..r {
                q = q.add(&power).unwrap();
                power = power.mul(&a).unwrap();
            }
            let ctx = build_test_modulus(r, &b, t, f(p)).unwrap();
            assert_eq!(ctx.modulus(), &q, "p={p} r={r}");
        }
    }

    #[test]
    fn rejects_non_monic_or_constant_moduli() {
        assert!(ResidueCtx::new(poly(5, &[1, 2])).is_err());
        assert!(ResidueCtx::new(poly(5, &[1])).is_err());
        assert!(ResidueCtx::new(DensePoly::from_i64(Ring::Integer, &[1, 1])).is_err());
    }

    #[test]
    fn modpow_matches_explicit_expansion() {
        // deg T <= 8, N <= 512: compare against x^N expanded densely then divided.
        let ctx = build_test_modulus(3, &[true, false, true, true], 4, f(5)).unwrap();
        let x = DensePoly::x(ctx.ring());
        for n in [0usize, 1, 7, 8, 9, 100, 511, 512] {
            let expanded = DensePoly::monomial(ctx.ring(), BigInt::one(), n);
            let (_, rem) = expanded.divrem(ctx.modulus()).unwrap();
            assert_eq!(ctx.modpow(&x, &BigUint::from(n)).unwrap(), rem, "n={n}");
        }
    }
}
