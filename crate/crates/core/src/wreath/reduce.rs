//! Compressed words over `a, A, t, T` to circuits.
//!
//! A word is positive if every `t`/`T` is read at a nonnegative cursor
//! position. For a positive word `w`, `p_w` has coefficient `f(e)` at
//! `x^e`, where `(f, g)` is the element of `Z wr Z` represented by `w`.
//! Conjugating every `t^δ` by `a^k`, with `k = |w|`, makes every variable's
//! word positive without changing whether `w` is the identity, and `w = 1`
//! iff `Δ(w) = 0` and `p` of the conjugated word is zero.
//!
//! For each variable `A` the circuit computes `q_A` with `p_A = x^{m_A} q_A`,
//! where `m_A` is the least position of a `t`/`T` in `val(A)` (0 if there is
//! none) as given by the recurrence in [`wreath_stats`].

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::{Generator, GroupSpec, WordSlp};
use crate::circuit::{GateId, PowerfulSkewCircuit};
use crate::error::{Error, Result};
use crate::polyring::SparsePoly;
use crate::slp::{Rhs, SlpBuilder};

/// Per-variable data of the conjugated program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarStats {
    /// `d_A = Δ(val(A))`.
    pub d: BigInt,
    /// `m_A`.
    pub m: BigUint,
    /// Whether `val(A)` contains `t` or `T`.
    pub has_t: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathStats {
    /// The conjugation exponent `|val(w)|`.
    pub k: BigUint,
    /// Indexed by variable; `None` for variables not reachable from the
    /// start, which are ignored.
    pub vars: Vec<Option<VarStats>>,
}

fn lamplighter_gens(w: &WordSlp) -> Result<Vec<Generator>> {
    w.check_for(&GroupSpec::lamplighter_z())
}

/// `d_A`, `m_A` and the `t`-flag for every reachable variable, where a
/// variable deriving `t^δ` stands for `a^k t^δ a^{-k}`:
///
/// - `a^{±1}`: `m = 0`;
/// - `t^{±1}`: `m = k`;
/// - `BC` with a `t` in both: `m = min(m_B, d_B + m_C)`;
/// - `BC` with a `t` in `C` only: `m = d_B + m_C`;
/// - `BC` otherwise: `m = m_B`.
///
/// The `t`-free `B` is skipped in the third case because its `m_B = 0` is
/// only a placeholder; taking the minimum with it can go negative, e.g. for
/// `B = A` and `C = aa t`.
pub fn wreath_stats(w: &WordSlp) -> Result<WreathStats> {
    let gens = lamplighter_gens(w)?;
    let k = w.length();
    let Some(s) = w.slp() else {
        return Ok(WreathStats { k, vars: Vec::new() });
    };
    let mut vars: Vec<Option<VarStats>> = vec![None; s.len()];
    for v in s.reachable() {
        let st = match s.rules()[v] {
            Rhs::Terminal(sym) => match gens[sym] {
                Generator::Cursor { inverse, .. } => VarStats {
                    d: BigInt::from(if inverse { -1 } else { 1 }),
                    m: BigUint::zero(),
                    has_t: false,
                },
                Generator::Coefficient { .. } => VarStats {
                    d: BigInt::zero(),
                    m: k.clone(),
                    has_t: true,
                },
            },
            Rhs::Concat { left, right, .. } => {
                let b = vars[left].as_ref().expect("dependencies come first");
                let c = vars[right].as_ref().expect("dependencies come first");
                let m = if c.has_t {
                    let via_c = &b.d + BigInt::from(c.m.clone());
                    let m = if b.has_t { BigInt::from(b.m.clone()).min(via_c) } else { via_c };
                    m.to_biguint().ok_or_else(|| {
                        Error::InvalidSlp(format!("negative t-position in `{}`", s.names()[v]))
                    })?
                } else {
                    b.m.clone()
                };
                VarStats {
                    d: &b.d + &c.d,
                    m,
                    has_t: b.has_t || c.has_t,
                }
            }
        };
        vars[v] = Some(st);
    }
    Ok(WreathStats { k, vars })
}

/// The conjugated program as an explicit SLP over `a A t T`: every `t^δ`
/// is replaced by `a^k t^δ A^k` with `a^k` and `A^k` built by doubling.
pub fn conjugate(w: &WordSlp) -> Result<WordSlp> {
    let gens = lamplighter_gens(w)?;
    let Some(s) = w.slp() else {
        return Ok(WordSlp::empty());
    };
    let k = w.length();
    let mut b = SlpBuilder::new(1, ["a", "A", "t", "T"].map(String::from).to_vec());
    let (ta, tai) = (b.terminal(0), b.terminal(1));
    let ak = b.power(ta, 0, &k).expect("k >= 1");
    let aki = b.power(tai, 0, &k).expect("k >= 1");
    let mut var = vec![usize::MAX; s.len()];
    for v in s.reachable() {
        var[v] = match s.rules()[v] {
            Rhs::Terminal(sym) => match gens[sym] {
                Generator::Cursor { inverse, .. } => b.terminal(inverse as usize),
                Generator::Coefficient { inverse, .. } => {
                    let t = b.terminal(2 + inverse as usize);
                    let left = b.concat(ak, 0, t);
                    b.concat(left, 0, aki)
                }
            },
            Rhs::Concat { left, right, .. } => b.concat(var[left], 0, var[right]),
        };
    }
    WordSlp::new(b.build(var[s.start()])?)
}

fn x_pow(n: BigUint) -> SparsePoly {
    SparsePoly::univariate(BigInt::one(), n)
}

/// Circuit over `Z[x]` whose value is `p` of `a^k val(w) a^{-k}` with
/// `k = |val(w)|`. Together with `Δ(w) = 0` its vanishing decides whether
/// `w` is the identity of `Z wr Z` (and, reading coefficients mod p, of
/// `Z_p wr Z`).
pub fn slp_to_circuit(w: &WordSlp) -> Result<PowerfulSkewCircuit> {
    let stats = wreath_stats(w)?;
    let gens = lamplighter_gens(w)?;
    let mut c = PowerfulSkewCircuit::new(1);
    let zero = c.input(SparsePoly::zero(1));
    let Some(s) = w.slp() else {
        return Ok(c);
    };
    let mut gate: Vec<GateId> = vec![usize::MAX; s.len()];
    for v in s.reachable() {
        gate[v] = match s.rules()[v] {
            Rhs::Terminal(sym) => match gens[sym] {
                Generator::Cursor { .. } => zero,
                Generator::Coefficient { inverse, .. } => {
                    c.input(SparsePoly::constant(1, BigInt::from(if inverse { -1 } else { 1 })))
                }
            },
            Rhs::Concat { left, right, .. } => {
                let sb = stats.vars[left].as_ref().unwrap();
                let sc = stats.vars[right].as_ref().unwrap();
                if !sc.has_t {
                    gate[left]
                } else if !sb.has_t {
                    gate[right]
                } else {
                    // M_B = x^{max(0, m_B - d_B - m_C)}, M_C = x^{max(0, d_B + m_C - m_B)}
                    let diff = BigInt::from(sb.m.clone()) - &sb.d - BigInt::from(sc.m.clone());
                    let (eb, ec) = if diff.is_positive() {
                        (diff.magnitude().clone(), BigUint::zero())
                    } else {
                        (BigUint::zero(), diff.magnitude().clone())
                    };
                    let mb = c.input(x_pow(eb));
                    let mc = c.input(x_pow(ec));
                    let l = c.mul(mb, gate[left]);
                    let r = c.mul(mc, gate[right]);
                    c.add(l, r)
                }
            }
        };
    }
    let top = stats.vars[s.start()].as_ref().unwrap();
    let shift = c.input(x_pow(top.m.clone()));
    let out = c.mul(shift, gate[s.start()]);
    c.set_output(out);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{expand_circuit, p_w, ExplicitPoly};

    fn word(body: &str) -> WordSlp {
        // one variable per letter, then a left comb
        let letters: Vec<char> = body.chars().collect();
        let mut b = SlpBuilder::new(1, ["a", "A", "t", "T"].map(String::from).to_vec());
        let mut acc = None;
        for ch in letters {
            let t = b.symbol(&ch.to_string());
            acc = b.join(acc, Some(t));
        }
        match acc {
            None => WordSlp::empty(),
            Some(v) => WordSlp::new(b.build(v).unwrap()).unwrap(),
        }
    }

    fn value(w: &WordSlp) -> ExplicitPoly {
        expand_circuit(&slp_to_circuit(w).unwrap(), 10_000).unwrap()
    }

    #[test]
    fn hand_examples() {
        assert!(value(&word("tT")).is_zero());
        // a t A T is positive with p = x - 1; conjugation by a^4 multiplies by x^4
        assert_eq!(value(&word("atAT")), ExplicitPoly::parse("x^5 + -1*x^4").unwrap());
        assert_eq!(value(&word("atAAtTa")), ExplicitPoly::parse("x^8").unwrap());
        let w = word("atAaTA");
        assert!(value(&w).is_zero());
        assert_eq!(super::super::delta(&w).unwrap(), BigInt::zero());
        assert!(value(&WordSlp::empty()).is_zero());
    }

    #[test]
    fn circuit_matches_conjugated_word() {
        for body in ["t", "Tat", "AAtaatTT", "tatatAAAT", "aaa", "AtaTaT"] {
            let w = word(body);
            let conj = conjugate(&w).unwrap();
            let gens = conj.generators(&GroupSpec::lamplighter_z(), 10_000).unwrap();
            assert_eq!(value(&w), p_w(&gens).unwrap(), "{body}");
            assert_eq!(
                super::super::delta(&conj).unwrap(),
                super::super::delta(&w).unwrap()
            );
        }
    }

    #[test]
    fn least_positions() {
        let w = word("aatAt");
        let st = wreath_stats(&w).unwrap();
        let s = w.slp().unwrap();
        let top = st.vars[s.start()].as_ref().unwrap();
        assert_eq!(top.d, BigInt::from(1));
        assert!(top.has_t);
        // k = 5; the t's are read at cursors 2 and 1
        assert_eq!(top.m, BigUint::from(6u32));
        let w = word("AaatAT");
        let top = wreath_stats(&w).unwrap().vars[w.slp().unwrap().start()].clone().unwrap();
        assert_eq!(top.m, BigUint::from(6u32));
        assert_eq!(value(&w), ExplicitPoly::parse("x^7 + -1*x^6").unwrap());
    }
}
