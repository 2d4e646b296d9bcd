use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{abs_biguint, PrimeField, Ring};

/// `coeff * x_1^{e_1} * ... * x_k^{e_k}` with arbitrary-precision exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigInt,
    pub exps: Vec<BigUint>,
}

impl Monomial {
    pub fn new(coeff: BigInt, exps: Vec<BigUint>) -> Self {
        Monomial { coeff, exps }
    }
}

/// Polynomial in succinct form: exponents are stored in binary, so `x^(2^64)`
/// costs a handful of words.
///
/// Canonical: no zero coefficients, exponent vectors pairwise distinct and
/// sorted in ascending lexicographic order, every vector of length `nvars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: Vec<Monomial>,
}

impl SparsePoly {
    /// Builds the canonical form: like terms are merged and zeros dropped.
    /// Exponent vectors shorter than `nvars` are padded with zeros.
    pub fn new(nvars: usize, terms: Vec<Monomial>) -> Self {
        let mut map: BTreeMap<Vec<BigUint>, BigInt> = BTreeMap::new();
        for Monomial { coeff, mut exps } in terms {
            assert!(exps.len() <= nvars, "monomial has more variables than the polynomial");
            exps.resize(nvars, BigUint::zero());
            *map.entry(exps).or_default() += coeff;
        }
        SparsePoly {
            nvars,
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(exps, coeff)| Monomial { coeff, exps })
                .collect(),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::new(nvars, vec![Monomial::new(c, vec![])])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    /// `c * x_var^n` (`var` is 0-based).
    pub fn monomial(nvars: usize, c: BigInt, var: usize, n: BigUint) -> Self {
        let mut exps = vec![BigUint::zero(); nvars];
        exps[var] = n;
        Self::new(nvars, vec![Monomial::new(c, exps)])
    }

    /// Univariate `c * x^n`.
    pub fn univariate(c: BigInt, n: BigUint) -> Self {
        Self::monomial(1, c, 0, n)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Size in bits: coefficient and exponent bit lengths summed over all
    /// monomials (every number costs at least one bit).
    pub fn size(&self) -> u64 {
        self.terms
            .iter()
            .map(|m| {
                abs_biguint(&m.coeff).bits().max(1)
                    + m.exps.iter().map(|e| e.bits().max(1)).sum::<u64>()
            })
            .sum()
    }

    /// Degree in variable `var`, `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<BigUint> {
        self.terms.iter().map(|m| m.exps[var].clone()).max()
    }

    pub fn max_abs_coeff(&self) -> BigUint {
        self.terms
            .iter()
            .map(|m| abs_biguint(&m.coeff))
            .max()
            .unwrap_or_default()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigUint {
        self.terms.iter().map(|m| abs_biguint(&m.coeff)).sum()
    }

    /// Canonical form over `ring`; monomials vanishing mod p are dropped.
    pub fn normalize(&self, ring: Ring) -> SparsePoly {
        match ring {
            Ring::Integer => self.clone(),
            Ring::Fp(f) => self.reduce_mod(f),
        }
    }

    pub fn reduce_mod(&self, field: PrimeField) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter_map(|m| {
                    let c = BigInt::from(field.reduce(&m.coeff));
                    (!c.is_zero()).then(|| Monomial::new(c, m.exps.clone()))
                })
                .collect(),
        }
    }

    /// Same polynomial viewed in `nvars >= self.nvars` variables.
    pub fn with_nvars(&self, nvars: usize) -> SparsePoly {
        assert!(nvars >= self.nvars);
        SparsePoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|m| {
                    let mut exps = m.exps.clone();
                    exps.resize(nvars, BigUint::zero());
                    Monomial::new(m.coeff.clone(), exps)
                })
                .collect(),
        }
    }

    /// Kronecker map `x_i -> y^{d^{i-1}}`, giving a univariate polynomial.
    pub fn kronecker(&self, d: &BigUint) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut n = BigUint::zero();
                for e in m.exps.iter().rev() {
                    n = n * d + e;
                }
                Monomial::new(m.coeff.clone(), vec![n])
            })
            .collect();
        SparsePoly::new(1, terms)
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|m| Monomial::new(-&m.coeff, m.exps.clone()))
                .collect(),
        }
    }

    /// Parse the text syntax: a sum of terms such as `3*x1^17 + -1*x2^100`.
    ///
    /// Variables are `x` (same as `x1`) or `x<i>` with `i >= 1`; a term is a
    /// `*`-separated product of integers and powers. Binary `-` is accepted.
    /// The result has as many variables as the largest index used (at least 1).
    pub fn parse(text: &str) -> Result<SparsePoly, String> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut pos = 0;
        let mut raw: Vec<(BigInt, Vec<(usize, BigUint)>)> = Vec::new();
        let mut max_var = 1;
        loop {
            let mut sign = BigInt::one();
            while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
                if chars[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let mut coeff = sign;
            let mut powers = Vec::new();
            loop {
                match chars.get(pos) {
                    Some(c) if c.is_ascii_digit() => {
                        coeff *= read_number(&chars, &mut pos).map(BigInt::from)?;
                    }
                    Some('x') => {
                        pos += 1;
                        let var = if chars.get(pos).is_some_and(char::is_ascii_digit) {
                            let idx = read_number(&chars, &mut pos)?;
                            let idx: usize = idx
                                .try_into()
                                .map_err(|_| "variable index too large".to_string())?;
                            if idx == 0 {
                                return Err("variables are numbered from x1".into());
                            }
                            idx
                        } else {
                            1
                        };
                        max_var = max_var.max(var);
                        let exp = if chars.get(pos) == Some(&'^') {
                            pos += 1;
                            if !chars.get(pos).is_some_and(char::is_ascii_digit) {
                                return Err("expected a decimal exponent after `^`".into());
                            }
                            read_number(&chars, &mut pos)?
                        } else {
                            BigUint::one()
                        };
                        powers.push((var - 1, exp));
                    }
                    Some(c) => return Err(format!("unexpected character `{c}`")),
                    None => return Err("unexpected end of polynomial".into()),
                }
                if chars.get(pos) == Some(&'*') {
                    pos += 1;
                } else {
                    break;
                }
            }
            raw.push((coeff, powers));
            match chars.get(pos) {
                None => break,
                Some('+') | Some('-') => {}
                Some(c) => return Err(format!("unexpected character `{c}`")),
            }
        }
        let terms = raw
            .into_iter()
            .map(|(c, powers)| {
                let mut exps = vec![BigUint::zero(); max_var];
                for (v, e) in powers {
                    exps[v] += e;
                }
                Monomial::new(c, exps)
            })
            .collect();
        Ok(SparsePoly::new(max_var, terms))
    }
}

fn read_number(chars: &[char], pos: &mut usize) -> Result<BigUint, String> {
    let start = *pos;
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let digits: String = chars[start..*pos].iter().collect();
    BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| "expected a number".to_string())
}

/// Canonical printing: terms in descending lexicographic exponent order,
/// `c*x^N` (univariate) or `c*x1^N1*x2^N2` (multivariate), zero exponents
/// omitted, `0` for the zero polynomial.
impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coeff)?;
            for (i, e) in m.exps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if self.nvars == 1 {
                    write!(f, "*x^{e}")?;
                } else {
                    write!(f, "*x{}^{e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}
