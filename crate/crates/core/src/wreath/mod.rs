//! Compressed word problems for `G wr Z^k`, with `G` a direct product of
//! copies of `Z` and `Z_p`.
//!
//! A word over the generators is reduced per base factor to a word over
//! `a A t T` in `Z wr Z` (or `Z_p wr Z`): the `Z^k` cursor is flattened by
//! `a_i -> a^{d^{i-1}}` with `d = 2(|w| + 1)`, which keeps distinct
//! positions reachable by `w` distinct, and the coefficient generators of
//! the other factors are erased. Each reduced word is then turned into a
//! circuit and tested for zero.

mod encode;
mod group;
mod reduce;
mod word;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::pit::{pit_fp, pit_z, Epsilon, PitParams, PitReport, Verdict};
use crate::polyring::PrimeField;
use crate::slp::{Rhs, SlpBuilder, VarId};

pub use encode::circuit_to_wordslp;
pub use group::{Factor, Generator, GroupSpec};
pub use reduce::{conjugate, slp_to_circuit, wreath_stats, VarStats, WreathStats};
pub use word::{delta, WordSlp};

/// The word of `w` in `Z wr Z` seen by base factor `factor`: cursor
/// generator `a_i` becomes `a^{d^{i-1}}` and only this factor's coefficient
/// generator survives, as `t`.
pub fn to_lamplighter(w: &WordSlp, spec: &GroupSpec, factor: usize, d: &BigUint) -> Result<WordSlp> {
    let gens = w.check_for(spec)?;
    let Some(s) = w.slp() else {
        return Ok(WordSlp::empty());
    };
    let mut b = SlpBuilder::new(1, ["a", "A", "t", "T"].map(String::from).to_vec());
    let mut steps: Vec<Option<VarId>> = vec![None; 2 * spec.rank()];
    let mut var: Vec<Option<VarId>> = vec![None; s.len()];
    let mut scale = BigUint::one();
    for (axis, pair) in steps.chunks_mut(2).enumerate() {
        if axis > 0 {
            scale *= d;
        }
        for (inverse, slot) in pair.iter_mut().enumerate() {
            let t = b.terminal(inverse);
            *slot = b.power(t, 0, &scale);
        }
    }
    for v in s.reachable() {
        var[v] = match s.rules()[v] {
            Rhs::Terminal(sym) => match gens[sym] {
                Generator::Cursor { axis, inverse } => steps[2 * axis + inverse as usize],
                Generator::Coefficient { factor: f, inverse } if f == factor => {
                    Some(b.terminal(2 + inverse as usize))
                }
                Generator::Coefficient { .. } => None,
            },
            Rhs::Concat { left, right, .. } => b.join(var[left], var[right]),
        };
    }
    match var[s.start()] {
        None => Ok(WordSlp::empty()),
        Some(v) => WordSlp::new(b.build(v)?),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CwpVerdict {
    Identity,
    NotIdentity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub factor: String,
    pub verdict: Verdict,
    pub seed: u64,
    pub report: PitReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CwpReport {
    pub verdict: CwpVerdict,
    pub group: String,
    pub epsilon: Epsilon,
    pub trials: u32,
    pub seed: u64,
    /// Net cursor displacement per axis, in decimal.
    pub cursor: Vec<String>,
    /// One entry per base factor tested; testing stops at the first factor
    /// with a nonzero polynomial and is skipped if the cursor moved.
    pub factors: Vec<FactorReport>,
}

/// Seed used for base factor `j`.
pub fn factor_seed(seed: u64, j: usize) -> u64 {
    seed.wrapping_add((j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Decide whether `w` is the identity of `spec`. `NotIdentity` is always
/// correct; a wrong `Identity` has probability at most
/// `(1 - epsilon)^trials` per base factor.
pub fn cwp(w: &WordSlp, spec: &GroupSpec, params: &PitParams) -> Result<CwpReport> {
    w.check_for(spec)?;
    let cursor = w.cursor_delta(spec)?;
    let mut report = CwpReport {
        verdict: CwpVerdict::Identity,
        group: spec.to_string(),
        epsilon: params.epsilon,
        trials: params.trials,
        seed: params.seed,
        cursor: cursor.iter().map(|c| c.to_string()).collect(),
        factors: Vec::new(),
    };
    if cursor.iter().any(|c| !c.is_zero()) {
        report.verdict = CwpVerdict::NotIdentity;
        return Ok(report);
    }
    if w.is_empty_word() {
        return Ok(report);
    }
    let d = (w.length() + 1u32) * 2u32;
    for (j, factor) in spec.factors().iter().enumerate() {
        let word = to_lamplighter(w, spec, j, &d)?;
        let c = slp_to_circuit(&word)?;
        let seed = factor_seed(params.seed, j);
        let fp = PitParams { seed, ..*params };
        let r = match factor {
            Factor::Z => pit_z(&c, &fp)?,
            Factor::Zp(p) => pit_fp(&c, PrimeField::new(*p)?, &fp)?,
        };
        let verdict = r.verdict;
        report.factors.push(FactorReport {
            factor: factor.to_string(),
            verdict,
            seed,
            report: r,
        });
        if verdict == Verdict::Nonzero {
            report.verdict = CwpVerdict::NotIdentity;
            break;
        }
    }
    Ok(report)
}
