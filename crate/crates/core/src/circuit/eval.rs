use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use super::{MaxPlus, Op, PowerfulSkewCircuit, ResidueRing, Semiring, SkewCircuit, Tropical};
use crate::error::{Error, Result};
use crate::polyring::fp::{self, FastModulus};
use crate::polyring::{DensePoly, ResidueCtx, SparsePoly};

/// Value of a circuit with integer leaves over a tropical semiring.
pub fn tropical_eval<S: Semiring<Elem = Tropical>>(
    c: &SkewCircuit<BigInt>,
    sr: &S,
) -> Result<Tropical> {
    c.evaluate(sr, |n| Tropical::Finite(n.clone()))
}

/// Upper bound on the degree of the output in variable `var` (0-based):
/// leaves become their degree (`-inf` for the zero polynomial), `+` becomes
/// max and `*` becomes addition. Exact unless terms cancel.
pub fn degree_bound(c: &PowerfulSkewCircuit, var: usize) -> Result<BigUint> {
    let v = c.graph().evaluate(&MaxPlus, |p| match p.degree_in(var) {
        None => Tropical::NegInf,
        Some(d) => Tropical::Finite(d.into()),
    })?;
    Ok(match v {
        Tropical::Finite(n) => n.to_biguint().expect("degrees are nonnegative"),
        _ => BigUint::zero(),
    })
}

/// Replace `x_i` by `y^{d^{i-1}}` with `d = 1 + max_i degree_bound(c, i)`,
/// returning `d` and the univariate circuit. `x_1` is the least significant
/// digit of the new exponents.
pub fn kronecker_substitute(c: &PowerfulSkewCircuit) -> Result<(BigUint, PowerfulSkewCircuit)> {
    let mut max = BigUint::zero();
    for var in 0..c.nvars() {
        max = max.max(degree_bound(c, var)?);
    }
    let d = max + 1u32;
    let u = c.map_inputs(1, |p| p.kronecker(&d));
    Ok((d, u))
}

/// `x^N mod T` for every exponent `N` of a univariate circuit, computed once
/// per modulus.
pub(crate) struct XPowCache {
    powers: HashMap<BigUint, Vec<u32>>,
}

impl XPowCache {
    pub(crate) fn new<'a>(m: &FastModulus, exps: impl IntoIterator<Item = &'a BigUint>) -> Self {
        let mut sorted: Vec<&BigUint> = exps.into_iter().collect();
        sorted.sort();
        sorted.dedup();
        let d = m.degree() as u64;
        let mut powers: HashMap<BigUint, Vec<u32>> = HashMap::with_capacity(sorted.len());
        let mut prev: Option<(&BigUint, Vec<u32>)> = None;
        for n in sorted {
            let value = match &prev {
                Some((pn, pv)) if n - *pn < BigUint::from(d) => {
                    // a short gap is a shift and one reduction
                    let shift = u64::try_from(n - *pn).expect("gap below degree") as usize;
                    let mut v = vec![0u32; shift];
                    v.extend_from_slice(pv);
                    m.reduce(v)
                }
                _ => {
                    // otherwise continue from the longest computed binary
                    // prefix of n, or step by the gap, or start over
                    let prefix = (1..n.bits()).find_map(|k| powers.get(&(n >> k)).map(|v: &Vec<u32>| (k, v)));
                    let gap = prev.as_ref().map(|(pn, pv)| (n - *pn, pv));
                    let full = n.bits();
                    let via_prefix = prefix.as_ref().map_or(u64::MAX, |(k, _)| *k);
                    let via_gap = gap.as_ref().map_or(u64::MAX, |(g, _)| g.bits() + 2);
                    if via_prefix <= via_gap.min(full) {
                        let (k, v) = prefix.unwrap();
                        let mut v = v.clone();
                        for j in (0..k).rev() {
                            v = m.sqrmod(&v);
                            if n.bit(j) {
                                v = m.mul_by_x(&v);
                            }
                        }
                        v
                    } else if via_gap < full {
                        let (g, pv) = gap.unwrap();
                        m.mulmod(pv, &m.x_pow(&g))
                    } else {
                        m.x_pow(n)
                    }
                }
            };
            powers.insert(n.clone(), value.clone());
            prev = Some((n, value));
        }
        XPowCache { powers }
    }

    pub(crate) fn get(&self, n: &BigUint) -> &[u32] {
        &self.powers[n]
    }
}

/// `val(c) mod T` in word form for a univariate circuit; coefficients are
/// reduced mod p on the fly.
pub(crate) fn eval_mod_words(c: &PowerfulSkewCircuit, m: &FastModulus) -> Result<Vec<u32>> {
    if c.nvars() != 1 {
        return Err(Error::InvalidCircuit(format!(
            "modular evaluation needs a univariate circuit, got {} variables",
            c.nvars()
        )));
    }
    let order = c.graph().topo_order()?;
    let exps = order.iter().flat_map(|&g| match &c.gates()[g].op {
        Op::Input(p) => p.terms().iter().map(|t| &t.exps[0]).collect::<Vec<_>>(),
        _ => Vec::new(),
    });
    let cache = XPowCache::new(m, exps);
    let p = m.p();
    let pb = BigInt::from(p);
    let ring = ResidueRing { modulus: m };
    c.graph().evaluate(&ring, |poly: &SparsePoly| {
        let mut acc = Vec::new();
        for t in poly.terms() {
            let a = u64::try_from(t.coeff.mod_floor(&pb)).expect("residue fits in u64") as u32;
            if a == 0 {
                continue;
            }
            acc = fp::add(&acc, &fp::scale(cache.get(&t.exps[0]), a, p), p);
        }
        acc
    })
}

/// `val(c) mod T` for a univariate circuit over the field of `ctx`. Input
/// monomials `a*x^N` become `a * (x^N mod T)`; every product is reduced.
pub fn eval_mod(c: &PowerfulSkewCircuit, ctx: &ResidueCtx) -> Result<DensePoly> {
    Ok(ctx.lift(&eval_mod_words(c, ctx.fast())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::MinPlus;
    use num_traits::One;
    use crate::polyring::{build_test_modulus, PrimeField, Ring};

    fn poly(s: &str) -> SparsePoly {
        SparsePoly::parse(s).unwrap()
    }

    #[test]
    fn tropical_examples() {
        let mut c: SkewCircuit<BigInt> = SkewCircuit::new();
        let a = c.input(3.into());
        let b = c.input(1.into());
        let d = c.input(2.into());
        let m = c.mul(b, d);
        let s = c.add(a, m);
        c.set_output(s);
        assert_eq!(tropical_eval(&c, &MaxPlus).unwrap(), Tropical::finite(3));
        assert_eq!(tropical_eval(&c, &MinPlus).unwrap(), Tropical::finite(3));

        let mut chain: SkewCircuit<BigInt> = SkewCircuit::new();
        let one = chain.input(1.into());
        let mut acc = chain.input(0.into());
        for _ in 0..10 {
            acc = chain.mul(acc, one);
        }
        chain.set_output(acc);
        assert_eq!(tropical_eval(&chain, &MaxPlus).unwrap(), Tropical::finite(10));
    }

    #[test]
    fn degree_bounds() {
        let mut c = PowerfulSkewCircuit::new(1);
        let a = c.input(poly("x^1099511627776"));
        assert_eq!(degree_bound(&c, 0).unwrap(), BigUint::one() << 40);
        let b = c.input(poly("x^5"));
        let m = c.mul(a, b);
        c.set_output(m);
        assert_eq!(degree_bound(&c, 0).unwrap(), (BigUint::one() << 40) + 5u32);
        let mut z = PowerfulSkewCircuit::new(1);
        z.input(SparsePoly::zero(1));
        assert_eq!(degree_bound(&z, 0).unwrap(), BigUint::zero());
    }

    #[test]
    fn kronecker_of_a_product_of_variables() {
        for k in 1..6usize {
            let mut c = PowerfulSkewCircuit::new(k);
            let mut acc = c.input(SparsePoly::monomial(k, 1.into(), 0, BigUint::one()));
            for i in 1..k {
                let xi = c.input(SparsePoly::monomial(k, 1.into(), i, BigUint::one()));
                acc = c.mul(xi, acc);
            }
            c.set_output(acc);
            let (d, u) = kronecker_substitute(&c).unwrap();
            assert_eq!(d, BigUint::from(2u32));
            assert_eq!(degree_bound(&u, 0).unwrap(), BigUint::from((1u64 << k) - 1));
        }
    }

    #[test]
    fn power_cache_matches_direct_powers() {
        use crate::polyring::fp::FastModulus;
        for p in [2u64, 3, 65_537] {
            let f = PrimeField::new(p).unwrap();
            let ctx = build_test_modulus(11, &[true, true, false, true, false], 90, f).unwrap();
            let m: &FastModulus = ctx.fast();
            let mut exps: Vec<BigUint> = (0..70u32).map(|i| BigUint::one() << i).collect();
            exps.extend([5u64, 11, 22, 45, 91, 1000, 1001, 2002, 123_456_789].map(BigUint::from));
            exps.push((BigUint::one() << 64u32) + 3u32);
            let cache = XPowCache::new(m, &exps);
            for n in &exps {
                assert_eq!(cache.get(n), m.x_pow(n).as_slice(), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn cancellation_and_modulus_itself_vanish() {
        let f = PrimeField::new(5).unwrap();
        let ctx = build_test_modulus(7, &[true, false, true], 4, f).unwrap();
        let mut c = PowerfulSkewCircuit::new(1);
        let a = c.input(poly("x^123456789123456789"));
        let b = c.input(poly("-1*x^123456789123456789"));
        let s = c.add(a, b);
        c.set_output(s);
        assert!(eval_mod(&c, &ctx).unwrap().is_zero());

        let mut t = PowerfulSkewCircuit::new(1);
        t.input(ctx.modulus().to_sparse());
        assert!(eval_mod(&t, &ctx).unwrap().is_zero());
    }

    #[test]
    fn power_cache_matches_direct_powering() {
        for p in [2u64, 3] {
            let f = PrimeField::new(p).unwrap();
            let ctx = build_test_modulus(11, &[true, true, false, true], 6, f).unwrap();
            let exps: Vec<BigUint> = [0u64, 1, 3, 59, 60, 61, 200, 1 << 20, (1 << 20) + 7, u64::MAX]
                .iter()
                .map(|&n| BigUint::from(n))
                .collect();
            let cache = XPowCache::new(ctx.fast(), &exps);
            for n in &exps {
                assert_eq!(cache.get(n), ctx.fast().x_pow(n).as_slice(), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn eval_mod_matches_dense_division() {
        let f = PrimeField::new(3).unwrap();
        let ctx = build_test_modulus(5, &[true, false, true], 3, f).unwrap();
        let mut c = PowerfulSkewCircuit::new(1);
        let a = c.input(poly("x^40 + 2*x^7 + -1"));
        let b = c.input(poly("x^3 + 1"));
        let m = c.mul(b, a);
        let s = c.add(m, b);
        c.set_output(s);
        // (x^3+1)(x^40+2x^7-1) + x^3 + 1 = x^43 + x^40 + 2x^10 + 2x^7
        let dense = DensePoly::from_i64(Ring::Fp(f), &{
            let mut v = vec![0i64; 44];
            v[43] = 1;
            v[40] = 1;
            v[10] = 2;
            v[7] = 2;
            v
        });
        let (_, expected) = dense.divrem(ctx.modulus()).unwrap();
        assert_eq!(eval_mod(&c, &ctx).unwrap(), expected);
    }
}
