//! Brute-force reference semantics: explicit polynomial expansion of
//! circuits and direct simulation of wreath product elements. Meant for
//! small instances; every operation takes an explicit budget.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::circuit::{Op, PowerfulSkewCircuit};
use crate::error::{Error, Result};
use crate::polyring::{Monomial, SparsePoly};
use crate::wreath::{Generator, GroupSpec};

/// Default monomial budget for [`expand_circuit`].
pub const DEFAULT_MONOMIAL_BUDGET: u64 = 10_000;
/// Default symbol budget for word expansion and simulation.
pub const DEFAULT_WORD_BUDGET: u64 = 100_000;

/// A polynomial as a map from exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExplicitPoly {
    terms: BTreeMap<Vec<BigUint>, BigInt>,
}

impl ExplicitPoly {
    pub fn zero() -> Self {
        ExplicitPoly::default()
    }

    pub fn from_sparse(p: &SparsePoly) -> Self {
        let mut out = ExplicitPoly::zero();
        for t in p.terms() {
            out.add_term(trim(&t.exps), &t.coeff);
        }
        out
    }

    pub fn parse(s: &str) -> Result<Self> {
        SparsePoly::parse(s)
            .map(|p| ExplicitPoly::from_sparse(&p))
            .map_err(Error::InvalidParam)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial with these exponents (trailing zeros may
    /// be omitted).
    pub fn coeff(&self, exps: &[BigUint]) -> BigInt {
        self.terms.get(&trim(exps)).cloned().unwrap_or_default()
    }

    /// Monomials with exponent vectors stripped of trailing zeros.
    pub fn terms(&self) -> &BTreeMap<Vec<BigUint>, BigInt> {
        &self.terms
    }

    pub fn add_term(&mut self, exps: Vec<BigUint>, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &ExplicitPoly) -> ExplicitPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &ExplicitPoly) -> ExplicitPoly {
        let mut out = ExplicitPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<BigUint> = (0..n)
                    .map(|i| {
                        let z = BigUint::zero();
                        e1.get(i).unwrap_or(&z) + e2.get(i).unwrap_or(&z)
                    })
                    .collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    /// Coefficients reduced into `[0, p)`, dropping those that vanish.
    pub fn reduce_mod(&self, p: u64) -> ExplicitPoly {
        let pb = BigInt::from(p);
        let mut out = ExplicitPoly::zero();
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &c.mod_floor(&pb));
        }
        out
    }

    pub fn to_sparse(&self, nvars: usize) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut exps = e.clone();
                exps.resize(nvars.max(e.len()), BigUint::zero());
                Monomial::new(c.clone(), exps)
            })
            .collect();
        SparsePoly::new(nvars.max(self.nvars()), terms)
    }

    /// Number of variables actually used (at least one).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0).max(1)
    }
}

impl fmt::Display for ExplicitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sparse(self.nvars()))
    }
}

fn trim(exps: &[BigUint]) -> Vec<BigUint> {
    let mut v = exps.to_vec();
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Exact expansion over Z, evaluating gates in topological order. Fails
/// once any intermediate polynomial has more than `budget` monomials.
pub fn expand_circuit(c: &PowerfulSkewCircuit, budget: u64) -> Result<ExplicitPoly> {
    c.check()?;
    let order = c.graph().topo_order()?;
    let mut value: Vec<Option<ExplicitPoly>> = vec![None; c.gates().len()];
    let over = |p: &ExplicitPoly| p.len() as u64 > budget;
    for g in order {
        let v = match &c.gates()[g].op {
            Op::Input(p) => ExplicitPoly::from_sparse(p),
            Op::Add(a, b) => value[*a].as_ref().unwrap().add(value[*b].as_ref().unwrap()),
            Op::Mul(a, b) => {
                let (x, y) = (value[*a].as_ref().unwrap(), value[*b].as_ref().unwrap());
                if (x.len() as u64).saturating_mul(y.len() as u64) > budget.saturating_mul(64) {
                    return Err(Error::BudgetExceeded(format!(
                        "gate {} multiplies {} by {} monomials",
                        c.gates()[g].name,
                        x.len(),
                        y.len()
                    )));
                }
                x.mul(y)
            }
        };
        if over(&v) {
            return Err(Error::BudgetExceeded(format!(
                "gate {} has {} monomials, budget is {budget}",
                c.gates()[g].name,
                v.len()
            )));
        }
        value[g] = Some(v);
    }
    Ok(value[c.output()].take().unwrap())
}

/// An element `(f, g)` of `G wr Z^k`: `f` maps finitely many positions to
/// nonidentity base elements, `g` is the cursor. Base elements are integer
/// tuples, one entry per factor, reduced into `[0, p)` for `Z_p` factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathElem {
    pub f: BTreeMap<Vec<i64>, Vec<i64>>,
    pub cursor: Vec<i64>,
}

impl WreathElem {
    pub fn identity(spec: &GroupSpec) -> Self {
        WreathElem {
            f: BTreeMap::new(),
            cursor: vec![0; spec.rank()],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.f.is_empty() && self.cursor.iter().all(|&c| c == 0)
    }

    /// The element represented by a single generator.
    pub fn generator(g: Generator, spec: &GroupSpec) -> Self {
        let mut e = WreathElem::identity(spec);
        e.apply(g, spec);
        e
    }

    /// Right multiplication by a generator, in place.
    pub fn apply(&mut self, g: Generator, spec: &GroupSpec) {
        match g {
            Generator::Cursor { axis, inverse } => {
                self.cursor[axis] += if inverse { -1 } else { 1 };
            }
            Generator::Coefficient { factor, inverse } => {
                let m = spec.factors().len();
                let mut delta = vec![0i64; m];
                delta[factor] = if inverse { -1 } else { 1 };
                add_at(&mut self.f, self.cursor.clone(), &delta, spec);
            }
        }
    }

    /// The coefficient polynomial of one base factor for `k = 1`: the
    /// coefficient of `x^e` is the factor's entry of `f(e)`. Fails if the
    /// support reaches a negative position.
    pub fn coefficient_poly(&self, factor: usize) -> Result<ExplicitPoly> {
        if self.cursor.len() != 1 {
            return Err(Error::InvalidParam("coefficient polynomials need k = 1".into()));
        }
        let mut p = ExplicitPoly::zero();
        for (pos, val) in &self.f {
            if pos[0] < 0 {
                return Err(Error::InvalidParam(format!(
                    "support reaches the negative position {}",
                    pos[0]
                )));
            }
            p.add_term(trim(&[BigUint::from(pos[0] as u64)]), &BigInt::from(val[factor]));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> WreathElemJson {
        WreathElemJson {
            identity: self.is_identity(),
            cursor: self.cursor.clone(),
            support: self
                .f
                .iter()
                .map(|(p, v)| SupportEntry {
                    position: p.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportEntry {
    pub position: Vec<i64>,
    pub value: Vec<i64>,
}

/// Serializable view of a [`WreathElem`], support sorted by position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WreathElemJson {
    pub identity: bool,
    pub cursor: Vec<i64>,
    pub support: Vec<SupportEntry>,
}

fn add_at(f: &mut BTreeMap<Vec<i64>, Vec<i64>>, pos: Vec<i64>, delta: &[i64], spec: &GroupSpec) {
    let m = spec.factors().len();
    let entry = f.entry(pos.clone()).or_insert_with(|| vec![0; m]);
    for (i, fac) in spec.factors().iter().enumerate() {
        entry[i] += delta[i];
        if let Some(p) = fac.modulus() {
            entry[i] = entry[i].rem_euclid(p as i64);
        }
    }
    if entry.iter().all(|&x| x == 0) {
        f.remove(&pos);
    }
}

/// `(f1, g1)(f2, g2) = (f, g1 + g2)` with `f(x) = f1(x) + f2(x - g1)`.
pub fn wreath_mul(u: &WreathElem, v: &WreathElem, spec: &GroupSpec) -> WreathElem {
    let mut f = u.f.clone();
    for (pos, val) in &v.f {
        let shifted: Vec<i64> = pos.iter().zip(&u.cursor).map(|(x, g)| x + g).collect();
        add_at(&mut f, shifted, val, spec);
    }
    let cursor = u.cursor.iter().zip(&v.cursor).map(|(a, b)| a + b).collect();
    WreathElem { f, cursor }
}

/// Product of the generators from left to right.
pub fn simulate_word(word: &[Generator], spec: &GroupSpec, budget: u64) -> Result<WreathElem> {
    if word.len() as u64 > budget {
        return Err(Error::BudgetExceeded(format!(
            "word has {} symbols, budget is {budget}",
            word.len()
        )));
    }
    let mut e = WreathElem::identity(spec);
    for &g in word {
        e.apply(g, spec);
    }
    Ok(e)
}

/// `p_w` for a word over `a, A, t, T` computed letter by letter: reading
/// `t` or `T` at cursor position `d` adds `+x^d` or `-x^d`. Fails if a `t`
/// is read at a negative position.
pub fn p_w(word: &[Generator]) -> Result<ExplicitPoly> {
    let mut d: i64 = 0;
    let mut p = ExplicitPoly::zero();
    for &g in word {
        match g {
            Generator::Cursor { inverse, .. } => d += if inverse { -1 } else { 1 },
            Generator::Coefficient { inverse, .. } => {
                if d < 0 {
                    return Err(Error::InvalidParam("word is not positive".into()));
                }
                let c = BigInt::from(if inverse { -1 } else { 1 });
                p.add_term(trim(&[BigUint::from(d as u64)]), &c);
            }
        }
    }
    Ok(p)
}

/// Largest absolute coefficient, 0 for the zero polynomial.
pub fn max_abs_coeff(p: &ExplicitPoly) -> BigInt {
    p.terms.values().map(|c| c.abs()).max().unwrap_or_default()
}
