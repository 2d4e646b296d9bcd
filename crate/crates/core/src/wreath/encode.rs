//! Univariate circuits over Z to compressed words over `a, A, t, T`.
//!
//! Every gate `A` gets two variables whose words are well-formed (positive
//! with `Δ = 0`) and have `p = val(A)` and `p = -val(A)`:
//!
//! - input `b x^n`: `a^n t^b A^n`, and `a^n T^b A^n` for the negation;
//! - `B + C`: concatenation;
//! - `B * (b x^n)`: `a^n B^b A^n`, where `B^b` for negative `b` is
//!   `(B')^{|b|}` with `B'` the negated variable.
//!
//! Input polynomials with several monomials are sums of such words, and
//! the zero polynomial is `aA`. All powers are built by doubling.

use std::collections::HashMap;

use num_bigint::{BigUint, Sign};
use num_traits::Zero;

use super::WordSlp;
use crate::circuit::{Op, PowerfulSkewCircuit};
use crate::error::{Error, Result};
use crate::polyring::SparsePoly;
use crate::slp::{SlpBuilder, VarId};

const A: usize = 0;
const A_INV: usize = 1;
const T: usize = 2;
const T_INV: usize = 3;

struct Encoder {
    b: SlpBuilder,
    /// `(symbol, n)` to the variable deriving `symbol^n`.
    powers: HashMap<(usize, BigUint), VarId>,
}

impl Encoder {
    fn sym_power(&mut self, sym: usize, n: &BigUint) -> Option<VarId> {
        if n.is_zero() {
            return None;
        }
        if let Some(&v) = self.powers.get(&(sym, n.clone())) {
            return Some(v);
        }
        let t = self.b.terminal(sym);
        let v = self.b.power(t, 0, n)?;
        self.powers.insert((sym, n.clone()), v);
        Some(v)
    }

    /// `a^n inner A^n`.
    fn shifted(&mut self, n: &BigUint, inner: VarId) -> VarId {
        let left = self.sym_power(A, n);
        let right = self.sym_power(A_INV, n);
        let x = self.b.join(left, Some(inner));
        self.b.join(x, right).expect("nonempty")
    }

    fn zero_word(&mut self) -> VarId {
        let a = self.b.terminal(A);
        let ai = self.b.terminal(A_INV);
        self.b.concat(a, 0, ai)
    }

    /// Sum over the monomials `b x^n` of `a^n body(b) A^n`.
    fn sum_over(
        &mut self,
        p: &SparsePoly,
        negate: bool,
        mut body: impl FnMut(&mut Self, bool, &BigUint) -> VarId,
    ) -> VarId {
        let mut acc: Option<VarId> = None;
        for term in p.terms() {
            let positive = (term.coeff.sign() == Sign::Plus) != negate;
            let inner = body(self, positive, term.coeff.magnitude());
            let word = self.shifted(&term.exps[0], inner);
            acc = self.b.join(acc, Some(word));
        }
        match acc {
            Some(v) => v,
            None => self.zero_word(),
        }
    }
}

/// A compressed word `w` over `a A t T`, well-formed, with `p_w = val(c)`.
pub fn circuit_to_wordslp(c: &PowerfulSkewCircuit) -> Result<WordSlp> {
    c.check()?;
    if c.nvars() != 1 {
        return Err(Error::InvalidCircuit(
            "only univariate circuits can be encoded as words".into(),
        ));
    }
    let mut enc = Encoder {
        b: SlpBuilder::new(1, ["a", "A", "t", "T"].map(String::from).to_vec()),
        powers: HashMap::new(),
    };
    let gates = c.gates();
    let order = c.graph().topo_order()?;
    // (positive, negated) per gate
    let mut vars: Vec<Option<(VarId, VarId)>> = vec![None; gates.len()];
    for g in order {
        vars[g] = Some(match &gates[g].op {
            Op::Input(p) => {
                let mut make = |negate| {
                    enc.sum_over(p, negate, |e, positive, b| {
                        e.sym_power(if positive { T } else { T_INV }, b).expect("b != 0")
                    })
                };
                let pos = make(false);
                let neg = make(true);
                (pos, neg)
            }
            Op::Add(x, y) => {
                let (xp, xn) = vars[*x].unwrap();
                let (yp, yn) = vars[*y].unwrap();
                (enc.b.concat(xp, 0, yp), enc.b.concat(xn, 0, yn))
            }
            Op::Mul(x, y) => {
                let (input, other) = match &gates[*y].op {
                    Op::Input(p) => (p, *x),
                    _ => match &gates[*x].op {
                        Op::Input(p) => (p, *y),
                        _ => unreachable!("checked circuits are skew"),
                    },
                };
                let (bp, bn) = vars[other].unwrap();
                let mut make = |negate| {
                    enc.sum_over(input, negate, |e, positive, b| {
                        let base = if positive { bp } else { bn };
                        e.b.power(base, 0, b).expect("b != 0")
                    })
                };
                let pos = make(false);
                let neg = make(true);
                (pos, neg)
            }
        });
    }
    let (start, _) = vars[c.output()].unwrap();
    WordSlp::new(enc.b.build(start)?)
}
