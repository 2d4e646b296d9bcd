//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use skewpit::circuit::{GateId, Op, PowerfulSkewCircuit, SkewCircuit};
use skewpit::polyring::{Monomial, SparsePoly};
use skewpit::slp::{NdSlp, SlpBuilder, VarId};
use skewpit::wreath::{GroupSpec, WordSlp};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(s: &str) -> SparsePoly {
    SparsePoly::parse(s).unwrap()
}

/// Exponent below `2^bits`, biased towards small values and powers of two.
pub fn random_exp(rng: &mut ChaCha8Rng, bits: u64) -> BigUint {
    match rng.gen_range(0..4) {
        0 => BigUint::from(rng.gen_range(0u32..4)),
        1 => BigUint::one() << rng.gen_range(0..bits),
        _ => {
            let b = rng.gen_range(1..=bits);
            let mut n = BigUint::zero();
            for i in 0..b {
                if rng.gen() {
                    n.set_bit(i, true);
                }
            }
            n
        }
    }
}

pub fn random_poly(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    max_terms: usize,
    exp_bits: u64,
    coeff: i64,
) -> SparsePoly {
    let n = rng.gen_range(1..=max_terms);
    let terms = (0..n)
        .map(|_| {
            let c = loop {
                let c = rng.gen_range(-coeff..=coeff);
                if c != 0 {
                    break c;
                }
            };
            let exps = (0..nvars).map(|_| random_exp(rng, exp_bits)).collect();
            Monomial::new(BigInt::from(c), exps)
        })
        .collect();
    SparsePoly::new(nvars, terms)
}

#[derive(Clone, Copy, Debug)]
pub struct CircuitShape {
    pub nvars: usize,
    pub gates: usize,
    pub max_terms: usize,
    pub exp_bits: u64,
    pub coeff: i64,
}

/// A random valid skew circuit: every product has an input operand.
pub fn random_circuit(rng: &mut ChaCha8Rng, shape: CircuitShape) -> PowerfulSkewCircuit {
    let CircuitShape { nvars, gates, max_terms, exp_bits, coeff } = shape;
    let mut c = PowerfulSkewCircuit::new(nvars);
    let mut all: Vec<GateId> = vec![c.input(random_poly(rng, nvars, max_terms, exp_bits, coeff))];
    for _ in 1..gates {
        let g = match rng.gen_range(0..3) {
            0 => c.input(random_poly(rng, nvars, max_terms, exp_bits, coeff)),
            1 => {
                let a = *all.choose(rng).unwrap();
                let b = *all.choose(rng).unwrap();
                c.add(a, b)
            }
            _ => {
                let i = c.input(random_poly(rng, nvars, max_terms, exp_bits, coeff));
                let other = *all.choose(rng).unwrap();
                if rng.gen() {
                    c.mul(i, other)
                } else {
                    c.mul(other, i)
                }
            }
        };
        all.push(g);
    }
    let last = *all.last().unwrap();
    c.set_output(last);
    c
}

/// Copy the part of `src` reachable from its output into `dst`, returning
/// the copy of the output gate.
pub fn append(dst: &mut PowerfulSkewCircuit, src: &PowerfulSkewCircuit) -> GateId {
    let mut map = vec![usize::MAX; src.gates().len()];
    for g in src.graph().topo_order().unwrap() {
        map[g] = match &src.gates()[g].op {
            Op::Input(p) => dst.input(p.clone()),
            Op::Add(a, b) => dst.add(map[*a], map[*b]),
            Op::Mul(a, b) => dst.mul(map[*a], map[*b]),
        };
    }
    map[src.output()]
}

/// `a - b` as one circuit.
pub fn difference(a: &PowerfulSkewCircuit, b: &PowerfulSkewCircuit) -> PowerfulSkewCircuit {
    let n = a.nvars().max(b.nvars());
    let mut c = PowerfulSkewCircuit::new(n);
    let x = append(&mut c, a);
    let y = append(&mut c, b);
    let minus = c.input(SparsePoly::constant(n, BigInt::from(-1)));
    let neg = c.mul(minus, y);
    let out = c.add(x, neg);
    c.set_output(out);
    c
}

fn split_poly(rng: &mut ChaCha8Rng, p: &SparsePoly) -> (SparsePoly, SparsePoly) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in p.terms() {
        if rng.gen() {
            left.push(t.clone());
        } else {
            right.push(t.clone());
        }
    }
    (SparsePoly::new(p.nvars(), left), SparsePoly::new(p.nvars(), right))
}

/// A structurally different circuit with the same value: operands are
/// swapped, inputs split into sums, and products distributed over split
/// inputs.
pub fn rewrite(rng: &mut ChaCha8Rng, src: &PowerfulSkewCircuit) -> PowerfulSkewCircuit {
    let mut c = PowerfulSkewCircuit::new(src.nvars());
    let mut map = vec![usize::MAX; src.gates().len()];
    let gates = src.gates();
    for g in src.graph().topo_order().unwrap() {
        map[g] = match &gates[g].op {
            Op::Input(p) => {
                if p.terms().len() > 1 && rng.gen() {
                    let (l, r) = split_poly(rng, p);
                    let a = c.input(l);
                    let b = c.input(r);
                    c.add(b, a)
                } else {
                    c.input(p.clone())
                }
            }
            Op::Add(a, b) => {
                if rng.gen() {
                    c.add(map[*b], map[*a])
                } else {
                    c.add(map[*a], map[*b])
                }
            }
            Op::Mul(a, b) => {
                let (p, other) = match &gates[*a].op {
                    Op::Input(p) => (p, *b),
                    _ => match &gates[*b].op {
                        Op::Input(p) => (p, *a),
                        _ => unreachable!(),
                    },
                };
                if p.terms().len() > 1 && rng.gen() {
                    let (l, r) = split_poly(rng, p);
                    let il = c.input(l);
                    let ir = c.input(r);
                    let x = c.mul(map[other], il);
                    let y = c.mul(ir, map[other]);
                    c.add(x, y)
                } else {
                    let i = c.input(p.clone());
                    if rng.gen() {
                        c.mul(i, map[other])
                    } else {
                        c.mul(map[other], i)
                    }
                }
            }
        };
    }
    c.set_output(map[src.output()]);
    c
}

/// Change one coefficient of one reachable input polynomial.
pub fn perturb(rng: &mut ChaCha8Rng, src: &PowerfulSkewCircuit) -> PowerfulSkewCircuit {
    let order = src.graph().topo_order().unwrap();
    let inputs: Vec<GateId> = order
        .iter()
        .copied()
        .filter(|&g| matches!(src.gates()[g].op, Op::Input(_)))
        .collect();
    let target = *inputs.choose(rng).unwrap();
    let delta = rng.gen_range(1..=3);
    let nvars = src.nvars();
    let exps: Vec<BigUint> = (0..nvars).map(|_| random_exp(rng, 8)).collect();
    let mut gates = src.gates().to_vec();
    if let Op::Input(p) = &gates[target].op {
        let mut terms = p.terms().to_vec();
        terms.push(Monomial::new(BigInt::from(delta), exps));
        gates[target].op = Op::Input(SparsePoly::new(nvars, terms));
    }
    let graph = SkewCircuit::from_gates(gates, src.output()).unwrap();
    PowerfulSkewCircuit::from_graph(nvars, graph)
}

/// A picture expression: cells, concatenation, or repetition along an axis.
#[derive(Clone, Debug)]
pub enum Pic {
    Cell(usize),
    Cat(usize, Box<Pic>, Box<Pic>),
    Rep(usize, Box<Pic>, u64),
}

/// Random expression for a picture of exactly this shape.
pub fn random_pic(rng: &mut ChaCha8Rng, shape: &[u64], symbols: usize, budget: &mut u32) -> Pic {
    let axes: Vec<usize> = (0..shape.len()).filter(|&i| shape[i] > 1).collect();
    if axes.is_empty() {
        return Pic::Cell(rng.gen_range(0..symbols));
    }
    let axis = *axes.choose(rng).unwrap();
    let n = shape[axis];
    let divisors: Vec<u64> = (2..=n.min(64)).filter(|d| n % d == 0).collect();
    if *budget == 0 || (!divisors.is_empty() && rng.gen_range(0..3) > 0) {
        if let Some(&d) = divisors.choose(rng) {
            let mut sub = shape.to_vec();
            sub[axis] = n / d;
            return Pic::Rep(axis, Box::new(random_pic(rng, &sub, symbols, budget)), d);
        }
        if *budget == 0 {
            // n is prime and large: one row of cells repeated
            let mut sub = shape.to_vec();
            sub[axis] = 1;
            return Pic::Rep(axis, Box::new(random_pic(rng, &sub, symbols, budget)), n);
        }
    }
    *budget -= 1;
    let cut = rng.gen_range(1..n);
    let (mut l, mut r) = (shape.to_vec(), shape.to_vec());
    l[axis] = cut;
    r[axis] = n - cut;
    Pic::Cat(
        axis,
        Box::new(random_pic(rng, &l, symbols, budget)),
        Box::new(random_pic(rng, &r, symbols, budget)),
    )
}

/// Change one cell symbol in the expression.
pub fn mutate_pic(rng: &mut ChaCha8Rng, p: &Pic, symbols: usize) -> Pic {
    match p {
        Pic::Cell(s) => Pic::Cell((s + rng.gen_range(1..symbols.max(2))) % symbols.max(2)),
        Pic::Cat(a, l, r) => {
            if rng.gen() {
                Pic::Cat(*a, Box::new(mutate_pic(rng, l, symbols)), r.clone())
            } else {
                Pic::Cat(*a, l.clone(), Box::new(mutate_pic(rng, r, symbols)))
            }
        }
        Pic::Rep(a, inner, n) => Pic::Rep(*a, Box::new(mutate_pic(rng, inner, symbols)), *n),
    }
}

/// Compile with repetitions by doubling (`by_doubling`) or by splitting
/// the count at random points.
pub fn compile_pic(
    rng: &mut ChaCha8Rng,
    p: &Pic,
    b: &mut SlpBuilder,
    by_doubling: bool,
) -> VarId {
    match p {
        Pic::Cell(s) => b.terminal(*s),
        Pic::Cat(a, l, r) => {
            let x = compile_pic(rng, l, b, by_doubling);
            let y = compile_pic(rng, r, b, by_doubling);
            b.concat(x, *a, y)
        }
        Pic::Rep(a, inner, n) => {
            let v = compile_pic(rng, inner, b, by_doubling);
            if by_doubling {
                b.power(v, *a, &BigUint::from(*n)).unwrap()
            } else {
                split_power(rng, b, v, *a, *n)
            }
        }
    }
}

fn split_power(rng: &mut ChaCha8Rng, b: &mut SlpBuilder, v: VarId, axis: usize, n: u64) -> VarId {
    if n == 1 {
        return v;
    }
    if n % 2 == 0 && rng.gen() {
        let h = split_power(rng, b, v, axis, n / 2);
        return b.concat(h, axis, h);
    }
    let k = rng.gen_range(1..n);
    let l = split_power(rng, b, v, axis, k);
    let r = split_power(rng, b, v, axis, n - k);
    b.concat(l, axis, r)
}

pub fn alphabet(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

pub fn build_pic(rng: &mut ChaCha8Rng, p: &Pic, dim: usize, symbols: usize, by_doubling: bool) -> NdSlp {
    let mut b = SlpBuilder::new(dim, alphabet(symbols));
    let v = compile_pic(rng, p, &mut b, by_doubling);
    b.build(v).unwrap()
}

/// A word over `spec`'s generators as a sequence of blocks; each block is
/// compiled to an SLP, and runs of equal blocks become powers.
#[derive(Clone, Debug)]
pub enum Block {
    /// One generator symbol, repeated.
    Sym(String, u64),
    /// `a^v sym^e a^{-v}` for a cursor offset `v`.
    Deposit(Vec<i64>, String, i64),
}

fn cursor_symbol(axis: usize, negative: bool) -> String {
    format!("{}{}", if negative { 'A' } else { 'a' }, axis + 1)
}

pub fn compile_word(spec: &GroupSpec, blocks: &[Block]) -> WordSlp {
    let mut b = SlpBuilder::new(1, spec.alphabet());
    let mut acc: Option<VarId> = None;
    let pow = |b: &mut SlpBuilder, sym: &str, n: u64| -> Option<VarId> {
        let t = b.symbol(sym);
        b.power(t, 0, &BigUint::from(n))
    };
    for block in blocks {
        let word = match block {
            Block::Sym(s, n) => pow(&mut b, s, *n),
            Block::Deposit(v, s, e) => {
                let mut w: Option<VarId> = None;
                for (axis, &x) in v.iter().enumerate() {
                    let p = pow(&mut b, &cursor_symbol(axis, x < 0), x.unsigned_abs());
                    w = b.join(w, p);
                }
                let sym = if *e < 0 { s.to_uppercase() } else { s.clone() };
                let p = pow(&mut b, &sym, e.unsigned_abs());
                w = b.join(w, p);
                for (axis, &x) in v.iter().enumerate() {
                    let p = pow(&mut b, &cursor_symbol(axis, x > 0), x.unsigned_abs());
                    w = b.join(w, p);
                }
                w
            }
        };
        acc = b.join(acc, word);
    }
    match acc {
        None => WordSlp::empty(),
        Some(v) => WordSlp::new(b.build(v).unwrap()).unwrap(),
    }
}

/// Blocks whose product is the identity: deposits at random positions,
/// every position's total cancelled (mod p for finite factors), shuffled.
pub fn identity_blocks(rng: &mut ChaCha8Rng, spec: &GroupSpec, deposits: usize, reach: i64) -> Vec<Block> {
    let mut out = Vec::new();
    for _ in 0..deposits {
        let v: Vec<i64> = (0..spec.rank()).map(|_| rng.gen_range(-reach..=reach)).collect();
        let j = rng.gen_range(0..spec.factors().len());
        let sym = format!("g{}", j + 1);
        let e = rng.gen_range(1..=5i64);
        out.push(Block::Deposit(v.clone(), sym.clone(), e));
        match spec.factors()[j].modulus() {
            Some(p) if rng.gen() => {
                // cancel by completing to a multiple of p
                let rest = (p as i64 - e % p as i64) % p as i64;
                if rest > 0 {
                    out.push(Block::Deposit(v, sym, rest));
                }
            }
            _ => out.push(Block::Deposit(v, sym, -e)),
        }
    }
    out.shuffle(rng);
    out
}

/// Random blocks, mostly not the identity.
pub fn random_blocks(rng: &mut ChaCha8Rng, spec: &GroupSpec, n: usize, max_rep: u64) -> Vec<Block> {
    let alphabet = spec.alphabet();
    (0..n)
        .map(|_| Block::Sym(alphabet.choose(rng).unwrap().clone(), rng.gen_range(1..=max_rep)))
        .collect()
}

pub fn word_len(blocks: &[Block]) -> u64 {
    blocks
        .iter()
        .map(|b| match b {
            Block::Sym(_, n) => *n,
            Block::Deposit(v, _, e) => 2 * v.iter().map(|x| x.unsigned_abs()).sum::<u64>() + e.unsigned_abs(),
        })
        .sum()
}
