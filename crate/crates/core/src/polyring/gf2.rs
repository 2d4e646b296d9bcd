//! Bit-packed arithmetic in F_2[x]: bit `i` of the word vector is the
//! coefficient of `x^i`.

pub(crate) fn pack(a: &[u32]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().div_ceil(64)];
    for (i, &c) in a.iter().enumerate() {
        if c & 1 == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

pub(crate) fn unpack(a: &[u64]) -> Vec<u32> {
    let mut out: Vec<u32> = (0..a.len() * 64)
        .map(|i| ((a[i / 64] >> (i % 64)) & 1) as u32)
        .collect();
    super::fp::trim(&mut out);
    out
}

/// `dst ^= src * x^shift`; `dst` must be long enough.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (words, bits) = (shift / 64, shift % 64);
    let dst = &mut dst[words..];
    if bits == 0 {
        xor_into(dst, src);
        return;
    }
    for (i, &w) in src.iter().enumerate() {
        dst[i] ^= w << bits;
        let hi = w >> (64 - bits);
        if hi != 0 {
            dst[i + 1] ^= hi;
        }
    }
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn bit_len(a: &[u64]) -> usize {
    match a.iter().rposition(|&w| w != 0) {
        None => 0,
        Some(i) => i * 64 + 64 - a[i].leading_zeros() as usize,
    }
}

/// Carry-less product, four bits of `a` at a time against a table of
/// multiples of `b`, XORed into `out`.
fn mul_table(a: &[u64], b: &[u64], out: &mut [u64]) {
    let nb = b.len() + 1;
    let mut table = vec![0u64; 16 * nb];
    for k in 1..16usize {
        let (lo, hi) = table.split_at_mut(k * nb);
        let row = &mut hi[..nb];
        if k % 2 == 0 {
            // k * b = (k/2 * b) << 1
            let half = &lo[(k / 2) * nb..(k / 2 + 1) * nb];
            let mut carry = 0;
            for (r, &h) in row.iter_mut().zip(half) {
                *r = (h << 1) | carry;
                carry = h >> 63;
            }
        } else {
            let prev = &lo[(k - 1) * nb..k * nb];
            row.copy_from_slice(prev);
            for (r, &w) in row.iter_mut().zip(b) {
                *r ^= w;
            }
        }
    }
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for nib in 0..16 {
            let k = ((ai >> (4 * nib)) & 15) as usize;
            if k == 0 {
                continue;
            }
            let row = &table[k * nb..(k + 1) * nb];
            let sh = 4 * nib;
            // a product fits in `a.len() + b.len()` words, so only zero
            // spill can fall off the end
            let dst = &mut out[i..];
            if sh == 0 {
                for (o, &v) in dst.iter_mut().zip(row) {
                    *o ^= v;
                }
            } else {
                for (j, &v) in row.iter().enumerate() {
                    dst[j] ^= v << sh;
                    let hi = v >> (64 - sh);
                    if hi != 0 {
                        dst[j + 1] ^= hi;
                    }
                }
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod clmul {
    use std::arch::x86_64::*;

    /// Schoolbook product with `pclmulqdq`, XORed into `out`.
    ///
    /// # Safety
    /// The CPU must support `pclmulqdq`.
    #[target_feature(enable = "pclmulqdq")]
    pub(super) unsafe fn mul(a: &[u64], b: &[u64], out: &mut [u64]) {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let xv = _mm_set_epi64x(0, x as i64);
            let dst = &mut out[i..];
            for (j, &y) in b.iter().enumerate() {
                let p = _mm_clmulepi64_si128(xv, _mm_set_epi64x(0, y as i64), 0);
                dst[j] ^= _mm_cvtsi128_si64(p) as u64;
                dst[j + 1] ^= _mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)) as u64;
            }
        }
    }
}

type BaseMul = fn(&[u64], &[u64], &mut [u64]);

fn base_mul() -> BaseMul {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the feature was detected at run time.
            return |a, b, out| unsafe { clmul::mul(a, b, out) };
        }
    }
    mul_table
}

/// Operands below this many words use the base product.
const KARATSUBA_WORDS: usize = 16;

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// `out ^= a * b`; `out` has at least `a.len() + b.len()` words.
fn karatsuba(a: &[u64], b: &[u64], out: &mut [u64], base: BaseMul) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return;
    }
    if b.len() < KARATSUBA_WORDS {
        base(a, b, out);
        return;
    }
    let h = a.len().div_ceil(2);
    if b.len() <= h {
        // unbalanced: slice `a` into pieces the size of `b`
        for (k, chunk) in a.chunks(b.len()).enumerate() {
            karatsuba(chunk, b, &mut out[k * b.len()..], base);
        }
        return;
    }
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let mut z0 = vec![0u64; 2 * h];
    karatsuba(a0, b0, &mut z0, base);
    let mut z2 = vec![0u64; a1.len() + b1.len()];
    karatsuba(a1, b1, &mut z2, base);
    let mut sa = a0.to_vec();
    xor_into(&mut sa, a1);
    let mut sb = b0.to_vec();
    xor_into(&mut sb, b1);
    let mut z1 = vec![0u64; 2 * h];
    karatsuba(&sa, &sb, &mut z1, base);
    xor_into(&mut z1, &z0);
    xor_into(&mut z1, &z2);
    xor_into(out, &z0);
    xor_into(&mut out[2 * h..], &z2);
    xor_into(&mut out[h..], &z1);
}

/// Carry-less product.
pub(crate) fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() + 1];
    karatsuba(a, b, &mut out, base_mul());
    trim(&mut out);
    out
}

/// `a` divided by `x^n`, rounded down.
fn shift_right(a: &[u64], n: usize) -> Vec<u64> {
    let (words, bits) = (n / 64, n % 64);
    if words >= a.len() {
        return Vec::new();
    }
    let src = &a[words..];
    let mut out: Vec<u64> = if bits == 0 {
        src.to_vec()
    } else {
        (0..src.len())
            .map(|i| (src[i] >> bits) | src.get(i + 1).map_or(0, |&w| w << (64 - bits)))
            .collect()
    };
    trim(&mut out);
    out
}

/// `a mod x^n`.
fn truncate_bits(mut a: Vec<u64>, n: usize) -> Vec<u64> {
    a.truncate(n.div_ceil(64));
    if n % 64 != 0 {
        if let Some(last) = a.get_mut(n / 64) {
            *last &= (1u64 << (n % 64)) - 1;
        }
    }
    trim(&mut a);
    a
}

/// Squaring spreads bits apart: `(sum c_i x^i)^2 = sum c_i x^{2i}`.
pub(crate) fn square(a: &[u64]) -> Vec<u64> {
    fn spread(mut v: u64) -> u64 {
        v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
        v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
        v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
        v = (v | (v << 2)) & 0x3333_3333_3333_3333;
        v = (v | (v << 1)) & 0x5555_5555_5555_5555;
        v
    }
    let mut out = Vec::with_capacity(2 * a.len());
    for &w in a {
        out.push(spread(w & 0xFFFF_FFFF));
        out.push(spread(w >> 32));
    }
    trim(&mut out);
    out
}

/// Moduli of at least this degree reduce by Barrett's method.
const BARRETT_BITS: usize = 512;

/// A modulus `T` of degree `D >= 1` with its 64 bit-shifted copies, so that
/// cancelling a leading bit is a word-aligned XOR. Large moduli also keep
/// `V = x^{2D} div T` for Barrett reduction.
#[derive(Clone, Debug)]
pub(crate) struct Gf2Modulus {
    d: usize,
    t: Vec<u64>,
    shifted: Vec<Vec<u64>>,
    barrett: Option<Vec<u64>>,
}

impl Gf2Modulus {
    pub(crate) fn new(t: &[u32]) -> Self {
        let d = t.len() - 1;
        let base = pack(t);
        let shifted = (0..64)
            .map(|s| {
                let mut v = vec![0u64; base.len() + 1];
                for (i, &w) in base.iter().enumerate() {
                    v[i] |= w << s;
                    if s > 0 {
                        v[i + 1] |= w >> (64 - s);
                    }
                }
                trim(&mut v);
                v
            })
            .collect();
        let mut m = Gf2Modulus { d, t: base, shifted, barrett: None };
        if d >= BARRETT_BITS {
            let mut top = vec![0u64; (2 * d) / 64 + 1];
            top[(2 * d) / 64] = 1 << ((2 * d) % 64);
            m.barrett = Some(m.long_division(top).0);
        }
        m
    }

    /// Quotient and remainder by bitwise long division.
    fn long_division(&self, mut a: Vec<u64>) -> (Vec<u64>, Vec<u64>) {
        let top = bit_len(&a);
        let mut q = vec![0u64; top.saturating_sub(self.d) / 64 + 1];
        for i in (self.d..top).rev() {
            if (a[i / 64] >> (i % 64)) & 1 == 0 {
                continue;
            }
            let k = i - self.d;
            q[k / 64] |= 1 << (k % 64);
            let row = &self.shifted[k % 64];
            for (dst, &v) in a[k / 64..].iter_mut().zip(row) {
                *dst ^= v;
            }
        }
        trim(&mut q);
        (q, truncate_bits(a, self.d))
    }

    pub(crate) fn reduce(&self, a: Vec<u64>) -> Vec<u64> {
        let top = bit_len(&a);
        if top <= self.d {
            return truncate_bits(a, self.d);
        }
        match &self.barrett {
            Some(v) if top <= 2 * self.d => {
                // exact for polynomials: q = ((a div x^D) * V) div x^D
                let q = shift_right(&mul(&shift_right(&a, self.d), v), self.d);
                let mut r = truncate_bits(a, self.d);
                let qt = truncate_bits(mul(&q, &self.t), self.d);
                r.resize(r.len().max(qt.len()), 0);
                xor_into(&mut r, &qt);
                trim(&mut r);
                r
            }
            _ => self.long_division(a).1,
        }
    }

    pub(crate) fn mulmod(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.reduce(mul(a, b))
    }

    pub(crate) fn sqrmod(&self, a: &[u64]) -> Vec<u64> {
        self.reduce(square(a))
    }

    pub(crate) fn mul_by_x(&self, a: &[u64]) -> Vec<u64> {
        let mut out = Vec::with_capacity(a.len() + 1);
        let mut carry = 0;
        for &w in a {
            out.push((w << 1) | carry);
            carry = w >> 63;
        }
        out.push(carry);
        self.reduce(out)
    }
}
