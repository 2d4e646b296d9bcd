//! Picture equality through identity testing over F_2.
//!
//! A picture `p` over `{0, 1}` is encoded as the polynomial
//! `f_p = sum of prod x_i^(e_i)` over the cells `(e_1, ..., e_n)` (0-based)
//! holding `1`. Concatenation along axis `i` becomes
//! `f_{p . q} = f_p + x_i^{|p|_i} f_q`, so an SLP turns into a powerful skew
//! circuit, and two pictures of the same shape are equal iff
//! `f_p + f_q = 0` over F_2.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::{NdSlp, Rhs};
use crate::circuit::PowerfulSkewCircuit;
use crate::error::{Error, Result};
use crate::pit::{pit_fp, PitParams, PitReport, Verdict};
use crate::polyring::{PrimeField, SparsePoly};

fn binary_alphabet() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

/// Replace the `i`-th symbol (1-based) of a `k`-letter alphabet by the word
/// `0^i 1^(k-i)` along the first axis. Distinct pictures stay distinct
/// because the code has fixed width.
pub fn encode_binary(s: &NdSlp) -> Result<NdSlp> {
    let k = s.alphabet().len();
    let mut names: Vec<String> = s.names().to_vec();
    let mut rules: Vec<Rhs> = s.rules().to_vec();
    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut counter = 0usize;
    let mut push = |names: &mut Vec<String>, rules: &mut Vec<Rhs>, rhs: Rhs| {
        let name = loop {
            let n = format!("bin{counter}");
            counter += 1;
            if taken.insert(n.clone()) {
                break n;
            }
        };
        names.push(name);
        rules.push(rhs);
        rules.len() - 1
    };
    // zeros[j] derives 0^(j+1), ones[j] derives 1^(j+1)
    let mut zeros = vec![push(&mut names, &mut rules, Rhs::Terminal(0))];
    for _ in 1..k {
        let prev = *zeros.last().unwrap();
        zeros.push(push(&mut names, &mut rules, Rhs::Concat { left: prev, axis: 0, right: zeros[0] }));
    }
    let mut ones = vec![push(&mut names, &mut rules, Rhs::Terminal(1))];
    for _ in 2..k {
        let prev = *ones.last().unwrap();
        ones.push(push(&mut names, &mut rules, Rhs::Concat { left: prev, axis: 0, right: ones[0] }));
    }
    for rule in rules.iter_mut().take(s.len()) {
        if let Rhs::Terminal(sym) = *rule {
            let i = sym + 1;
            *rule = if i < k {
                Rhs::Concat { left: zeros[i - 1], axis: 0, right: ones[k - i - 1] }
            } else if k == 1 {
                Rhs::Terminal(0)
            } else {
                Rhs::Concat { left: zeros[k - 2], axis: 0, right: zeros[0] }
            };
        }
    }
    NdSlp::new(s.dim(), binary_alphabet(), names, rules, s.start())
}

/// Circuit over F_2 in `n` variables computing `f_{val(s1)} + f_{val(s2)}`.
/// Both programs must be over the alphabet `0 1` and derive pictures of the
/// same shape.
pub fn to_poly_circuit(s1: &NdSlp, s2: &NdSlp) -> Result<PowerfulSkewCircuit> {
    if s1.dim() != s2.dim() {
        return Err(Error::InvalidSlp(format!(
            "dimensions differ: {} vs {}",
            s1.dim(),
            s2.dim()
        )));
    }
    for s in [s1, s2] {
        if s.alphabet() != binary_alphabet().as_slice() {
            return Err(Error::InvalidSlp("expected the alphabet `0 1`".into()));
        }
    }
    if s1.shape() != s2.shape() {
        return Err(Error::InvalidSlp("pictures have different shapes".into()));
    }
    let n = s1.dim();
    let mut c = PowerfulSkewCircuit::new(n);
    let zero = c.input(SparsePoly::zero(n));
    let mut one = None;
    let mut outputs = Vec::new();
    for s in [s1, s2] {
        let mut gate = vec![usize::MAX; s.len()];
        for v in s.reachable() {
            gate[v] = match s.rules()[v] {
                Rhs::Terminal(0) => zero,
                Rhs::Terminal(_) => *one.get_or_insert_with(|| c.input(SparsePoly::one(n))),
                Rhs::Concat { left, axis, right } => {
                    let shift = SparsePoly::monomial(
                        n,
                        BigInt::from(1),
                        axis,
                        s.lengths()[left][axis].clone(),
                    );
                    let m = c.input(shift);
                    let shifted = c.mul(m, gate[right]);
                    c.add(gate[left], shifted)
                }
            };
        }
        outputs.push(gate[s.start()]);
    }
    let out = c.add(outputs[0], outputs[1]);
    c.set_output(out);
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlpVerdict {
    pub equal: bool,
    /// Set when the shapes already differ and no test was run.
    pub shapes_differ: bool,
    pub report: Option<PitReport>,
}

/// Randomized picture equality. `equal = false` is always correct; a wrong
/// `equal = true` has probability at most `(1 - epsilon)^trials`.
pub fn slp_equal(s1: &NdSlp, s2: &NdSlp, params: &PitParams) -> Result<SlpVerdict> {
    if s1.dim() != s2.dim() {
        return Err(Error::InvalidSlp(format!(
            "dimensions differ: {} vs {}",
            s1.dim(),
            s2.dim()
        )));
    }
    let same_symbols = s1.alphabet().len() == s2.alphabet().len()
        && s1.alphabet().iter().all(|a| s2.alphabet().contains(a));
    if !same_symbols {
        return Err(Error::InvalidSlp("alphabets differ".into()));
    }
    if s1.shape() != s2.shape() {
        return Ok(SlpVerdict {
            equal: false,
            shapes_differ: true,
            report: None,
        });
    }
    let s2 = s2.with_alphabet(s1.alphabet())?;
    let c = to_poly_circuit(&encode_binary(s1)?, &encode_binary(&s2)?)?;
    let report = pit_fp(&c, PrimeField::new(2)?, params)?;
    Ok(SlpVerdict {
        equal: report.verdict == Verdict::Zero,
        shapes_differ: false,
        report: Some(report),
    })
}
