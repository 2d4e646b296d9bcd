//! Word-level polynomial arithmetic over F_p on `u32` coefficient slices.
//!
//! This is the hot path behind [`super::ResidueCtx`]. Coefficient vectors are
//! little-endian (index `i` holds the coefficient of `x^i`), every stored value
//! is a canonical residue in `[0, p)`, and results are trimmed so that the last
//! entry is nonzero (the empty vector is the zero polynomial).
//!
//! Multiplication is schoolbook below [`KARATSUBA_THRESHOLD`] and Karatsuba
//! above it. Both produce identical coefficients; the schoolbook routine is
//! kept public to the crate so tests can compare the two.

use num_bigint::BigUint;

use super::gf2::{self, Gf2Modulus};

pub(crate) const KARATSUBA_THRESHOLD: usize = 40;

/// Leaf size of the exact (unreduced) Karatsuba; its leaves vectorize well.
const EXACT_THRESHOLD: usize = 128;

/// Moduli of degree below this are reduced by plain long division.
const BARRETT_THRESHOLD: usize = 48;

#[inline]
fn add_mod(a: u32, b: u32, p: u64) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p { s - p } else { s }) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u64) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p - b as u64) as u32
    }
}

pub(crate) fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn add(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = add_mod(*o, s, p);
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(a: &[u32], c: u32, p: u64) -> Vec<u32> {
    if c == 0 {
        return Vec::new();
    }
    let mut out: Vec<u32> = a
        .iter()
        .map(|&x| ((x as u64 * c as u64) % p) as u32)
        .collect();
    trim(&mut out);
    out
}

/// How many products `(p-1)^2` can be added onto a value below `p` without
/// leaving `u64`.
#[inline]
fn lazy_rows(p: u64) -> usize {
    let sq = (p - 1) * (p - 1);
    if sq == 0 {
        usize::MAX
    } else {
        (((u64::MAX - p) / sq) as usize).max(1)
    }
}

/// `out += a * b` by the quadratic algorithm with delayed reduction.
fn schoolbook_acc(a: &[u32], b: &[u32], p: u64, out: &mut [u32]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    let len = a.len() + b.len() - 1;
    let mut acc = vec![0u64; len];
    let rows = lazy_rows(p);
    for (chunk_idx, chunk) in a.chunks(rows).enumerate() {
        let base = chunk_idx * rows;
        for (i, &ai) in chunk.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let ai = ai as u64;
            let dst = &mut acc[base + i..base + i + b.len()];
            for (d, &bj) in dst.iter_mut().zip(b) {
                *d += ai * bj as u64;
            }
        }
        if base + chunk.len() < a.len() {
            for v in acc.iter_mut() {
                *v %= p;
            }
        }
    }
    for (o, v) in out.iter_mut().zip(acc) {
        *o = ((*o as u64 + v % p) % p) as u32;
    }
}

/// Quadratic multiplication; the reference the Karatsuba path must match.
#[cfg(test)]
pub(crate) fn mul_schoolbook(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    schoolbook_acc(a, b, p, &mut out);
    trim(&mut out);
    out
}

fn add_into(dst: &mut [u32], src: &[u32], p: u64) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = add_mod(*d, s, p);
    }
}

fn sub_into(dst: &mut [u32], src: &[u32], p: u64) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = sub_mod(*d, s, p);
    }
}

/// `out += a * b`, `out.len() >= a.len() + b.len() - 1`.
fn mul_acc(a: &[u32], b: &[u32], p: u64, out: &mut [u32]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return;
    }
    let (n, m) = (a.len(), b.len());
    if m <= KARATSUBA_THRESHOLD {
        schoolbook_acc(a, b, p, out);
        return;
    }
    if n > m {
        for (k, chunk) in a.chunks(m).enumerate() {
            mul_acc(chunk, b, p, &mut out[k * m..]);
        }
        return;
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let hi = n - h;

    let mut z0 = vec![0u32; 2 * h - 1];
    mul_acc(a0, b0, p, &mut z0);
    let mut z2 = vec![0u32; 2 * hi - 1];
    mul_acc(a1, b1, p, &mut z2);

    let mut sa = a1.to_vec();
    add_into(&mut sa, a0, p);
    let mut sb = b1.to_vec();
    add_into(&mut sb, b0, p);
    let mut z1 = vec![0u32; 2 * hi - 1];
    mul_acc(&sa, &sb, p, &mut z1);
    sub_into(&mut z1, &z0, p);
    sub_into(&mut z1, &z2, p);

    add_into(out, &z0, p);
    add_into(&mut out[h..], &z1, p);
    add_into(&mut out[2 * h..], &z2, p);
}

/// Recursion depth of [`mul_exact_acc`] for balanced operands of length `n`.
fn karatsuba_depth(mut n: usize) -> u32 {
    let mut depth = 0;
    while n > EXACT_THRESHOLD {
        n = n.div_ceil(2);
        depth += 1;
    }
    depth
}

/// Largest value that can appear in [`mul_exact_acc`] for operands of
/// length `<= n` with entries `< p`, or `None` if leaf operands would not
/// fit in `u32`. At depth `k` the operands have entries below `2^k p` and
/// length about `n / 2^k`, so products stay below `n 2^k p^2`.
fn exact_bound(n: usize, p: u64) -> Option<u128> {
    let depth = karatsuba_depth(n);
    let leaf = ((p - 1) as u128) << depth;
    (leaf < (1u128 << 32)).then(|| ((n as u128 + 1) << depth) * ((p - 1) as u128).pow(2))
}

/// Accumulator word for exact Karatsuba.
trait Word: Copy + Default + std::ops::AddAssign + std::ops::SubAssign + 'static {
    fn from_u32(x: u32) -> Self;
    fn to_u64(self) -> u64;
    /// `out += a * b` by the quadratic algorithm.
    fn leaf(a: &[Self], b: &[Self], out: &mut [Self]);
}

macro_rules! leaf_body {
    ($a:expr, $b:expr, $out:expr, $mul:expr) => {{
        let m = $b.len();
        for (i, &ai) in $a.iter().enumerate() {
            for (o, &bj) in $out[i..i + m].iter_mut().zip($b) {
                *o = o.wrapping_add($mul(ai, bj));
            }
        }
    }};
}

#[inline(always)]
fn mul32(a: u32, b: u32) -> u32 {
    a.wrapping_mul(b)
}

#[inline(always)]
fn mul64(a: u64, b: u64) -> u64 {
    // Operands are below 2^32, which lets the compiler use 32x32->64 lanes.
    (a as u32 as u64) * (b as u32 as u64)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn leaf32_avx2(a: &[u32], b: &[u32], out: &mut [u32]) {
    leaf_body!(a, b, out, mul32)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn leaf32_avx512(a: &[u32], b: &[u32], out: &mut [u32]) {
    leaf_body!(a, b, out, mul32)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn leaf64_avx2(a: &[u64], b: &[u64], out: &mut [u64]) {
    leaf_body!(a, b, out, mul64)
}

#[cfg(target_arch = "x86_64")]
fn has_avx2() -> bool {
    std::arch::is_x86_feature_detected!("avx2")
}

#[cfg(target_arch = "x86_64")]
fn has_avx512() -> bool {
    std::arch::is_x86_feature_detected!("avx512f")
}

impl Word for u32 {
    fn from_u32(x: u32) -> Self {
        x
    }
    fn to_u64(self) -> u64 {
        self as u64
    }
    fn leaf(a: &[u32], b: &[u32], out: &mut [u32]) {
        #[cfg(target_arch = "x86_64")]
        if has_avx512() {
            // SAFETY: the CPU supports AVX-512F.
            return unsafe { leaf32_avx512(a, b, out) };
        }
        #[cfg(target_arch = "x86_64")]
        if has_avx2() {
            // SAFETY: the CPU supports AVX2.
            return unsafe { leaf32_avx2(a, b, out) };
        }
        leaf_body!(a, b, out, mul32)
    }
}

impl Word for u64 {
    fn from_u32(x: u32) -> Self {
        x as u64
    }
    fn to_u64(self) -> u64 {
        self
    }
    fn leaf(a: &[u64], b: &[u64], out: &mut [u64]) {
        #[cfg(target_arch = "x86_64")]
        if has_avx2() {
            // SAFETY: the CPU supports AVX2.
            return unsafe { leaf64_avx2(a, b, out) };
        }
        leaf_body!(a, b, out, mul64)
    }
}

/// `out += a * b` over the integers; the caller checks [`exact_bound`]
/// against the range of `W`. The middle Karatsuba term is exact, so no
/// intermediate reduction is needed.
fn mul_exact_acc<W: Word>(a: &[W], b: &[W], out: &mut [W]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return;
    }
    let (n, m) = (a.len(), b.len());
    if m <= EXACT_THRESHOLD {
        W::leaf(a, b, out);
        return;
    }
    if n > m {
        for (k, chunk) in a.chunks(m).enumerate() {
            mul_exact_acc(chunk, b, &mut out[k * m..]);
        }
        return;
    }
    let h = n / 2;
    let hi = n - h;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let mut z0 = vec![W::default(); 2 * h - 1];
    mul_exact_acc(a0, b0, &mut z0);
    let mut z2 = vec![W::default(); 2 * hi - 1];
    mul_exact_acc(a1, b1, &mut z2);
    let mut sa = a1.to_vec();
    for (s, &x) in sa.iter_mut().zip(a0) {
        *s += x;
    }
    let mut z1 = vec![W::default(); 2 * hi - 1];
    if std::ptr::eq(a, b) {
        mul_exact_acc(&sa, &sa, &mut z1);
    } else {
        let mut sb = b1.to_vec();
        for (s, &x) in sb.iter_mut().zip(b0) {
            *s += x;
        }
        mul_exact_acc(&sa, &sb, &mut z1);
    }
    for (z, &x) in z1.iter_mut().zip(&z0) {
        *z -= x;
    }
    for (z, &x) in z1.iter_mut().zip(&z2) {
        *z -= x;
    }
    for (o, &x) in out.iter_mut().zip(&z0) {
        *o += x;
    }
    for (o, &x) in out[h..].iter_mut().zip(&z1) {
        *o += x;
    }
    for (o, &x) in out[2 * h..].iter_mut().zip(&z2) {
        *o += x;
    }
}

fn mul_exact<W: Word>(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let aw: Vec<W> = a.iter().map(|&x| W::from_u32(x)).collect();
    let mut acc = vec![W::default(); a.len() + b.len() - 1];
    if std::ptr::eq(a, b) {
        mul_exact_acc(&aw, &aw, &mut acc);
    } else {
        let bw: Vec<W> = b.iter().map(|&x| W::from_u32(x)).collect();
        mul_exact_acc(&aw, &bw, &mut acc);
    }
    acc.into_iter().map(|v| (v.to_u64() % p) as u32).collect()
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = match exact_bound(a.len().max(b.len()), p) {
        Some(bound) if bound < (1u128 << 32) => mul_exact::<u32>(a, b, p),
        Some(bound) if bound < (1u128 << 64) => mul_exact::<u64>(a, b, p),
        _ => {
            let mut out = vec![0u32; a.len() + b.len() - 1];
            mul_acc(a, b, p, &mut out);
            out
        }
    };
    trim(&mut out);
    out
}

/// Low `n` coefficients of `a * b`.
fn mul_low(a: &[u32], b: &[u32], n: usize, p: u64) -> Vec<u32> {
    let a = &a[..a.len().min(n)];
    let b = &b[..b.len().min(n)];
    let mut out = mul(a, b, p);
    out.truncate(n);
    trim(&mut out);
    out
}

pub(crate) fn square(a: &[u32], p: u64) -> Vec<u32> {
    if p == 2 {
        // Frobenius: (sum c_i x^i)^2 = sum c_i x^{2i} in characteristic 2.
        if a.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; 2 * a.len() - 1];
        for (i, &c) in a.iter().enumerate() {
            out[2 * i] = c;
        }
        return out;
    }
    mul(a, a, p)
}

/// Inverse of `f` modulo `x^n` by Newton iteration; requires `f[0] == 1`.
fn inverse_series(f: &[u32], n: usize, p: u64) -> Vec<u32> {
    debug_assert_eq!(f.first(), Some(&1));
    let mut g = vec![1u32];
    let mut prec = 1;
    while prec < n {
        let next = (2 * prec).min(n);
        let e = mul_low(&f[..f.len().min(next)], &g, next, p);
        // e = 1 + x^prec * h
        let h: Vec<u32> = (prec..next).map(|i| e.get(i).copied().unwrap_or(0)).collect();
        let gh = mul_low(&g, &h, next - prec, p);
        g.resize(next, 0);
        for (i, &c) in gh.iter().enumerate() {
            g[prec + i] = sub_mod(0, c, p);
        }
        prec = next;
    }
    g
}

/// A monic modulus `T` of degree `D >= 1` with the data needed for fast
/// reduction.
#[derive(Clone, Debug)]
pub(crate) struct FastModulus {
    p: u64,
    /// Coefficients of `T`, length `D + 1`, last entry 1.
    t: Vec<u32>,
    /// `rev(T)^{-1} mod x^{D-1}`; empty when long division is used.
    inv_rev: Vec<u32>,
    /// Bit-packed twin used for every operation when `p = 2`.
    gf2: Option<Gf2Modulus>,
}

impl FastModulus {
    pub(crate) fn new(t: Vec<u32>, p: u64) -> Self {
        if p == 2 {
            let gf2 = Some(Gf2Modulus::new(&t));
            return FastModulus {
                p,
                t,
                inv_rev: Vec::new(),
                gf2,
            };
        }
        Self::new_generic(t, p)
    }

    /// Word-level modulus without the packed F_2 shortcut.
    pub(crate) fn new_generic(t: Vec<u32>, p: u64) -> Self {
        debug_assert!(t.len() >= 2 && *t.last().unwrap() == 1);
        let d = t.len() - 1;
        let inv_rev = if d >= BARRETT_THRESHOLD {
            let rev: Vec<u32> = t.iter().rev().copied().collect();
            inverse_series(&rev, d - 1, p)
        } else {
            Vec::new()
        };
        FastModulus {
            p,
            t,
            inv_rev,
            gf2: None,
        }
    }

    pub(crate) fn degree(&self) -> usize {
        self.t.len() - 1
    }

    pub(crate) fn p(&self) -> u64 {
        self.p
    }

    pub(crate) fn reduce(&self, mut a: Vec<u32>) -> Vec<u32> {
        trim(&mut a);
        let d = self.degree();
        if a.len() <= d {
            return a;
        }
        if let Some(g) = &self.gf2 {
            return gf2::unpack(&g.reduce(gf2::pack(&a)));
        }
        if self.inv_rev.is_empty() || a.len() > 2 * d - 1 {
            return self.reduce_long(a);
        }
        let n = a.len();
        let qlen = n - d;
        let top: Vec<u32> = (0..qlen).map(|i| a[n - 1 - i]).collect();
        let qrev = mul_low(&top, &self.inv_rev, qlen, self.p);
        let mut q = vec![0u32; qlen];
        for (i, &c) in qrev.iter().enumerate() {
            q[qlen - 1 - i] = c;
        }
        let prod = mul_low(&q, &self.t[..d], d, self.p);
        a.truncate(d);
        sub_into(&mut a, &prod, self.p);
        trim(&mut a);
        a
    }

    /// Schoolbook long division by the monic modulus.
    fn reduce_long(&self, a: Vec<u32>) -> Vec<u32> {
        let d = self.degree();
        let p = self.p;
        let mut acc: Vec<u64> = a.into_iter().map(u64::from).collect();
        // Each entry receives at most `d` products before it is read.
        let lazy = lazy_rows(p) >= d;
        for i in (d..acc.len()).rev() {
            let c = acc[i] % p;
            acc[i] = 0;
            if c == 0 {
                continue;
            }
            let neg = p - c;
            let base = i - d;
            for (j, &tj) in self.t[..d].iter().enumerate() {
                let v = &mut acc[base + j];
                *v += neg * tj as u64;
                if !lazy {
                    *v %= p;
                }
            }
        }
        acc.truncate(d);
        let mut out: Vec<u32> = acc.into_iter().map(|v| (v % p) as u32).collect();
        trim(&mut out);
        out
    }

    pub(crate) fn mulmod(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        if let Some(g) = &self.gf2 {
            return gf2::unpack(&g.mulmod(&gf2::pack(a), &gf2::pack(b)));
        }
        self.reduce(mul(a, b, self.p))
    }

    pub(crate) fn sqrmod(&self, a: &[u32]) -> Vec<u32> {
        if let Some(g) = &self.gf2 {
            return gf2::unpack(&g.sqrmod(&gf2::pack(a)));
        }
        self.reduce(square(a, self.p))
    }

    /// `x * a mod T` for a reduced `a`.
    pub(crate) fn mul_by_x(&self, a: &[u32]) -> Vec<u32> {
        if a.is_empty() {
            return Vec::new();
        }
        let d = self.degree();
        let mut out = Vec::with_capacity(a.len() + 1);
        out.push(0);
        out.extend_from_slice(a);
        if out.len() == d + 1 {
            let c = out.pop().unwrap();
            for (o, &tj) in out.iter_mut().zip(&self.t[..d]) {
                let prod = ((c as u64 * tj as u64) % self.p) as u32;
                *o = sub_mod(*o, prod, self.p);
            }
            trim(&mut out);
        }
        out
    }

    pub(crate) fn one(&self) -> Vec<u32> {
        if self.degree() == 0 {
            Vec::new()
        } else {
            vec![1]
        }
    }

    /// The residue of `x`.
    #[cfg(test)]
    pub(crate) fn x(&self) -> Vec<u32> {
        self.mul_by_x(&self.one())
    }

    /// `base^n mod T` by left-to-right square-and-multiply.
    pub(crate) fn pow(&self, base: &[u32], n: &BigUint) -> Vec<u32> {
        let base = self.reduce(base.to_vec());
        if let Some(g) = &self.gf2 {
            let base = gf2::pack(&base);
            let mut acc = gf2::pack(&self.one());
            for i in (0..n.bits()).rev() {
                acc = g.sqrmod(&acc);
                if n.bit(i) {
                    acc = g.mulmod(&acc, &base);
                }
            }
            return gf2::unpack(&acc);
        }
        let bits = n.bits();
        let mut acc = self.one();
        for i in (0..bits).rev() {
            acc = self.sqrmod(&acc);
            if n.bit(i) {
                acc = self.mulmod(&acc, &base);
            }
        }
        acc
    }

    /// `x^n mod T`; multiplications by `x` are shifts.
    pub(crate) fn x_pow(&self, n: &BigUint) -> Vec<u32> {
        let bits = n.bits();
        if let Some(g) = &self.gf2 {
            let mut acc = gf2::pack(&self.one());
            for i in (0..bits).rev() {
                acc = g.sqrmod(&acc);
                if n.bit(i) {
                    acc = g.mul_by_x(&acc);
                }
            }
            return gf2::unpack(&acc);
        }
        let mut acc = self.one();
        for i in (0..bits).rev() {
            acc = self.sqrmod(&acc);
            if n.bit(i) {
                acc = self.mul_by_x(&acc);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut ChaCha8Rng, len: usize, p: u64) -> Vec<u32> {
        let mut v: Vec<u32> = (0..len).map(|_| rng.gen_range(0..p) as u32).collect();
        trim(&mut v);
        v
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[2u64, 3, 65_537, 4_294_967_291] {
            for &(n, m) in &[(1, 1), (41, 41), (100, 100), (257, 90), (300, 999), (513, 512)] {
                let a = random_poly(&mut rng, n, p);
                let b = random_poly(&mut rng, m, p);
                assert_eq!(mul(&a, &b, p), mul_schoolbook(&a, &b, p), "p={p} n={n} m={m}");
            }
        }
    }

    #[test]
    fn characteristic_two_square_is_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_poly(&mut rng, 200, 2);
        assert_eq!(square(&a, 2), mul_schoolbook(&a, &a, 2));
    }

    #[test]
    fn barrett_matches_long_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u64, 5, 1_000_003] {
            for &d in &[1usize, 2, 47, 48, 100, 333] {
                let mut t = random_poly(&mut rng, d, p);
                t.resize(d, 0);
                t.push(1);
                let m = FastModulus::new_generic(t, p);
                for len in [0, d, d + 1, 2 * d - 1, 2 * d + 5] {
                    let a = random_poly(&mut rng, len, p);
                    assert_eq!(m.reduce(a.clone()), m.reduce_long(a), "p={p} d={d} len={len}");
                }
            }
        }
    }

    #[test]
    fn x_pow_agrees_with_generic_pow() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = random_poly(&mut rng, 60, 3);
        t.resize(60, 0);
        t.push(1);
        let m = FastModulus::new(t, 3);
        let x = m.x();
        for n in [0u64, 1, 2, 59, 60, 61, 1000, 123_456_789] {
            let n = BigUint::from(n);
            assert_eq!(m.x_pow(&n), m.pow(&x, &n));
        }
    }
}

