use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::{Generator, GroupSpec};
use crate::error::{Error, Result};
use crate::slp::{NdSlp, Rhs};

/// A compressed group word: a 1-dimensional SLP over generator symbols, or
/// the empty word.
///
/// The text form is the SLP format with `DIM 1`; a file without rules and
/// without a `START` line denotes the empty word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSlp {
    slp: Option<NdSlp>,
}

impl WordSlp {
    pub fn empty() -> Self {
        WordSlp { slp: None }
    }

    pub fn new(slp: NdSlp) -> Result<Self> {
        if slp.dim() != 1 {
            return Err(Error::InvalidSlp(format!(
                "a word needs dimension 1, got {}",
                slp.dim()
            )));
        }
        Ok(WordSlp { slp: Some(slp) })
    }

    pub fn slp(&self) -> Option<&NdSlp> {
        self.slp.as_ref()
    }

    pub fn is_empty_word(&self) -> bool {
        self.slp.is_none()
    }

    /// `|val(w)|`.
    pub fn length(&self) -> BigUint {
        self.slp.as_ref().map_or_else(BigUint::zero, |s| s.shape()[0].clone())
    }

    /// Check that every alphabet symbol is a generator of `spec`.
    pub fn check_for(&self, spec: &GroupSpec) -> Result<Vec<Generator>> {
        match &self.slp {
            None => Ok(Vec::new()),
            Some(s) => s.alphabet().iter().map(|a| spec.generator(a)).collect(),
        }
    }

    /// The decompressed word as symbols.
    pub fn symbols(&self, budget: u64) -> Result<Vec<String>> {
        match &self.slp {
            None => Ok(Vec::new()),
            Some(s) => {
                let p = s.expand(budget)?;
                Ok(p.cells.iter().map(|&c| s.alphabet()[c].clone()).collect())
            }
        }
    }

    /// The decompressed word as generators of `spec`.
    pub fn generators(&self, spec: &GroupSpec, budget: u64) -> Result<Vec<Generator>> {
        let gens = self.check_for(spec)?;
        match &self.slp {
            None => Ok(Vec::new()),
            Some(s) => Ok(s.expand(budget)?.cells.iter().map(|&c| gens[c]).collect()),
        }
    }

    /// Net cursor displacement along every axis, by additive evaluation.
    pub fn cursor_delta(&self, spec: &GroupSpec) -> Result<Vec<BigInt>> {
        let gens = self.check_for(spec)?;
        let Some(s) = &self.slp else {
            return Ok(vec![BigInt::zero(); spec.rank()]);
        };
        let mut d: Vec<Vec<BigInt>> = vec![Vec::new(); s.len()];
        for &v in s.order() {
            d[v] = match s.rules()[v] {
                Rhs::Terminal(sym) => {
                    let mut x = vec![BigInt::zero(); spec.rank()];
                    if let Generator::Cursor { axis, inverse } = gens[sym] {
                        x[axis] = BigInt::from(if inverse { -1 } else { 1 });
                    }
                    x
                }
                Rhs::Concat { left, right, .. } => {
                    d[left].iter().zip(&d[right]).map(|(a, b)| a + b).collect()
                }
            };
        }
        Ok(d[s.start()].clone())
    }
}

/// `Δ(w)`: occurrences of `a` minus occurrences of `A` in a word over
/// `a, A, t, T`.
pub fn delta(w: &WordSlp) -> Result<BigInt> {
    Ok(w.cursor_delta(&GroupSpec::lamplighter_z())?.remove(0))
}

impl FromStr for WordSlp {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let has_body = text.lines().any(|l| {
            let l = l.split('#').next().unwrap_or("").trim();
            l.contains("->") || l.starts_with("START")
        });
        if !has_body {
            for l in text.lines() {
                let l = l.split('#').next().unwrap_or("").trim();
                if let Some(n) = l.strip_prefix("DIM") {
                    if n.trim() != "1" {
                        return Err(Error::InvalidSlp("a word needs dimension 1".into()));
                    }
                }
            }
            return Ok(WordSlp::empty());
        }
        WordSlp::new(text.parse()?)
    }
}

impl fmt::Display for WordSlp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.slp {
            Some(s) => write!(f, "{s}"),
            None => writeln!(f, "DIM 1\nALPHABET a A t T\n# the empty word"),
        }
    }
}
