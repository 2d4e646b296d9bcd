mod common;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;

use common::{alphabet, build_pic, mutate_pic, random_pic, rng, Pic};
use skewpit::oracle::{expand_circuit, ExplicitPoly};
use skewpit::pit::{Epsilon, PitParams};
use skewpit::polyring::{Monomial, SparsePoly};
use skewpit::slp::{encode_binary, slp_equal, to_poly_circuit, NdSlp, Picture, SlpBuilder};

fn params(seed: u64) -> PitParams {
    PitParams::new(Epsilon::default(), 20, seed).unwrap()
}

/// The same program with its two symbols renamed to `0` and `1`.
fn as_binary(s: NdSlp) -> NdSlp {
    let alphabet = vec!["0".to_string(), "1".to_string()];
    NdSlp::new(s.dim(), alphabet, s.names().to_vec(), s.rules().to_vec(), s.start()).unwrap()
}

/// `sum of prod x_i^(e_i)` over the cells holding symbol 1, read straight
/// from the explicit picture.
fn f_of(p: &Picture) -> ExplicitPoly {
    let n = p.shape.len();
    let mut terms = Vec::new();
    let mut coords = vec![0usize; n];
    for &cell in &p.cells {
        if cell == 1 {
            terms.push(Monomial::new(BigInt::one(), coords.iter().map(|&c| BigUint::from(c)).collect()));
        }
        for i in (0..n).rev() {
            coords[i] += 1;
            if coords[i] < p.shape[i] {
                break;
            }
            coords[i] = 0;
        }
    }
    ExplicitPoly::from_sparse(&SparsePoly::new(n, terms))
}

fn x_pow(n: usize, axis: usize, e: usize) -> ExplicitPoly {
    ExplicitPoly::from_sparse(&SparsePoly::monomial(n, BigInt::one(), axis, BigUint::from(e)))
}

fn random_shape(g: &mut rand_chacha::ChaCha8Rng, dim: usize, max: u64) -> Vec<u64> {
    use rand::Rng;
    (0..dim).map(|_| g.gen_range(1..=max)).collect()
}

fn pic(g: &mut rand_chacha::ChaCha8Rng, shape: &[u64], symbols: usize) -> Pic {
    let mut budget = 12;
    random_pic(g, shape, symbols, &mut budget)
}

#[test]
fn one_dimensional_expansion() {
    let s: NdSlp = "DIM 1\nALPHABET a\nA -> 'a'\nS -> A .1 A\nSTART S".parse().unwrap();
    assert_eq!(s.shape(), &[BigUint::from(2u32)]);
    assert_eq!(s.expand(10).unwrap().render(s.alphabet()), "aa\n");
    assert!(s.expand(0).is_err());
}

#[test]
fn two_by_two_picture() {
    let text = "DIM 2\nALPHABET a b\nA -> 'a'\nB -> 'b'\nR -> A .2 B\nQ -> B .2 B\nS -> R .1 Q\nSTART S";
    let s: NdSlp = text.parse().unwrap();
    let p = s.expand(4).unwrap();
    assert_eq!(p.shape, vec![2, 2]);
    assert_eq!([p.get(&[0, 0]), p.get(&[0, 1]), p.get(&[1, 0]), p.get(&[1, 1])], [0, 1, 1, 1]);
    assert_eq!(p.render(s.alphabet()), "ab\nbb\n");
}

#[test]
fn mismatched_concatenation_is_rejected() {
    let text = "DIM 2\nALPHABET a\nA -> 'a'\nR -> A .2 A\nS -> R .1 A\nSTART S";
    let err = text.parse::<NdSlp>().unwrap_err().to_string();
    assert!(err.contains('S'), "{err}");
}

#[test]
fn doubling_chain_has_exponential_length() {
    let mut b = SlpBuilder::new(1, vec!["a".into()]);
    let mut v = b.terminal(0);
    for _ in 0..200 {
        v = b.concat(v, 0, v);
    }
    let s = b.build(v).unwrap();
    assert_eq!(s.shape()[0], BigUint::one() << 200);
    assert_eq!(s.len(), 201);
}

#[test]
fn power_and_its_predecessor_differ() {
    for m in [1u32, 10, 100] {
        let n = BigUint::one() << m;
        let mut b = SlpBuilder::new(1, vec!["a".into()]);
        let a = b.terminal(0);
        let full = b.power(a, 0, &n).unwrap();
        let s1 = b.clone().build(full).unwrap();
        let mut b2 = SlpBuilder::new(1, vec!["a".into()]);
        let a2 = b2.terminal(0);
        let short = b2.power(a2, 0, &(n - 1u32)).unwrap();
        let s2 = b2.build(short).unwrap();
        let v = slp_equal(&s1, &s2, &params(0)).unwrap();
        assert!(!v.equal && v.shapes_differ);
        assert!(slp_equal(&s1, &s1, &params(0)).unwrap().equal);
    }
}

#[test]
fn huge_equal_words_built_differently() {
    // (ab)^(2^80) against a (ba)^(2^80 - 1) b
    let n = BigUint::one() << 80;
    let mut b = SlpBuilder::new(1, alphabet(2));
    let (a, bb) = (b.terminal(0), b.terminal(1));
    let ab = b.concat(a, 0, bb);
    let s = b.power(ab, 0, &n).unwrap();
    let s1 = b.build(s).unwrap();
    let mut b = SlpBuilder::new(1, alphabet(2));
    let (a, bb) = (b.terminal(0), b.terminal(1));
    let ba = b.concat(bb, 0, a);
    let mid = b.power(ba, 0, &(n - 1u32)).unwrap();
    let left = b.concat(a, 0, mid);
    let s = b.concat(left, 0, bb);
    let s2 = b.build(s).unwrap();
    assert!(slp_equal(&s1, &s2, &params(1)).unwrap().equal);
    // swapping the last two letters breaks it
    let mut b = SlpBuilder::new(1, alphabet(2));
    let (a, bb) = (b.terminal(0), b.terminal(1));
    let ba = b.concat(bb, 0, a);
    let mid = b.power(ba, 0, &(BigUint::one() << 80u32)).unwrap();
    let s3 = b.build(mid).unwrap();
    assert!(!slp_equal(&s1, &s3, &params(1)).unwrap().equal);
}

#[test]
fn text_round_trip() {
    let mut g = rng(9);
    let p = pic(&mut g, &[3, 4], 3);
    let s = build_pic(&mut g, &p, 2, 3, false);
    let again: NdSlp = s.to_string().parse().unwrap();
    assert_eq!(again.expand(100).unwrap(), s.expand(100).unwrap());
    assert_eq!(again.alphabet(), s.alphabet());
}

#[test]
fn dimension_and_alphabet_mismatch() {
    let a: NdSlp = "DIM 1\nALPHABET a\nA -> 'a'\nSTART A".parse().unwrap();
    let b: NdSlp = "DIM 2\nALPHABET a\nA -> 'a'\nSTART A".parse().unwrap();
    let c: NdSlp = "DIM 1\nALPHABET a b\nA -> 'a'\nSTART A".parse().unwrap();
    assert!(slp_equal(&a, &b, &params(0)).is_err());
    assert!(slp_equal(&a, &c, &params(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lengths_match_expansion(seed: u64, dim in 1usize..4) {
        let mut g = rng(seed);
        let shape = random_shape(&mut g, dim, 12);
        let p = pic(&mut g, &shape, 3);
        let s = build_pic(&mut g, &p, dim, 3, seed % 2 == 0);
        let e = s.expand(100_000).unwrap();
        for i in 0..dim {
            prop_assert_eq!(BigUint::from(e.shape[i]), s.shape()[i].clone());
            prop_assert_eq!(e.shape[i] as u64, shape[i]);
        }
    }

    #[test]
    fn concatenation_is_shift_and_add(seed: u64, dim in 1usize..4) {
        use rand::Rng;
        let mut g = rng(seed);
        let axis = g.gen_range(0..dim);
        let mut ls = random_shape(&mut g, dim, 8);
        let mut rs = ls.clone();
        rs[axis] = g.gen_range(1..=8);
        ls[axis] = g.gen_range(1..=8);
        let (pl, pr) = (pic(&mut g, &ls, 2), pic(&mut g, &rs, 2));
        let joined = Pic::Cat(axis, Box::new(pl.clone()), Box::new(pr.clone()));
        let s = as_binary(build_pic(&mut g, &joined, dim, 2, true));
        let l = as_binary(build_pic(&mut g, &pl, dim, 2, true));
        let r = as_binary(build_pic(&mut g, &pr, dim, 2, true));
        let fl = f_of(&l.expand(100_000).unwrap());
        let fr = f_of(&r.expand(100_000).unwrap());
        let expected = fl.add(&x_pow(dim, axis, ls[axis] as usize).mul(&fr));
        prop_assert_eq!(f_of(&s.expand(100_000).unwrap()), expected);
    }

    #[test]
    fn circuit_is_sum_of_picture_polynomials(seed: u64, dim in 1usize..4) {
        let mut g = rng(seed);
        let shape = random_shape(&mut g, dim, 8);
        let p = pic(&mut g, &shape, 2);
        let q = if seed % 2 == 0 { p.clone() } else { mutate_pic(&mut g, &p, 2) };
        let s1 = as_binary(build_pic(&mut g, &p, dim, 2, false));
        let s2 = as_binary(build_pic(&mut g, &q, dim, 2, true));
        let c = to_poly_circuit(&s1, &s2).unwrap();
        let value = expand_circuit(&c, 100_000).unwrap().reduce_mod(2);
        let expected = f_of(&s1.expand(100_000).unwrap())
            .add(&f_of(&s2.expand(100_000).unwrap()))
            .reduce_mod(2);
        prop_assert_eq!(value, expected);
    }

    #[test]
    fn encoding_preserves_equality(seed: u64, dim in 1usize..4, symbols in 1usize..6) {
        let mut g = rng(seed);
        let shape = random_shape(&mut g, dim, 6);
        let p = pic(&mut g, &shape, symbols);
        let q = if seed % 2 == 0 { p.clone() } else { mutate_pic(&mut g, &p, symbols) };
        let s1 = build_pic(&mut g, &p, dim, symbols.max(2), false);
        let s2 = build_pic(&mut g, &q, dim, symbols.max(2), true);
        let (e1, e2) = (encode_binary(&s1).unwrap(), encode_binary(&s2).unwrap());
        let k = s1.alphabet().len() as u64;
        prop_assert_eq!(e1.shape()[0].clone(), BigUint::from(shape[0] * k));
        let same = s1.expand(100_000).unwrap() == s2.expand(100_000).unwrap();
        prop_assert_eq!(e1.expand(1_000_000).unwrap() == e2.expand(1_000_000).unwrap(), same);
    }

    #[test]
    fn verdict_matches_expansion(seed: u64, dim in 1usize..4) {
        let mut g = rng(seed);
        let shape = random_shape(&mut g, dim, 10);
        let p = pic(&mut g, &shape, 3);
        let q = match seed % 3 {
            0 => p.clone(),
            1 => mutate_pic(&mut g, &p, 3),
            _ => pic(&mut g, &shape, 3),
        };
        let s1 = build_pic(&mut g, &p, dim, 3, false);
        let s2 = build_pic(&mut g, &q, dim, 3, true);
        let same = s1.expand(100_000).unwrap() == s2.expand(100_000).unwrap();
        let v = slp_equal(&s1, &s2, &params(seed)).unwrap();
        prop_assert_eq!(v.equal, same);
        prop_assert!(!v.shapes_differ);
    }
}
