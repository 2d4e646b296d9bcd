use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::polyring::is_prime;

/// One direct factor of the base group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Z,
    /// Cyclic of prime order.
    Zp(u64),
}

impl Factor {
    /// The modulus for this factor's coefficients, if finite.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            Factor::Z => None,
            Factor::Zp(p) => Some(*p),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Z => f.write_str("Z"),
            Factor::Zp(p) => write!(f, "Z_{p}"),
        }
    }
}

/// `G wr Z^k` with `G` a direct product of copies of `Z` and `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<Factor>,
    rank: usize,
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>, rank: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("the base group needs at least one factor".into()));
        }
        if rank == 0 {
            return Err(Error::InvalidGroup("the acting group Z^k needs k >= 1".into()));
        }
        for f in &factors {
            if let Factor::Zp(p) = f {
                if !is_prime(*p) {
                    return Err(Error::InvalidGroup(format!(
                        "Z_{p}: only prime moduli are supported"
                    )));
                }
                if *p >= 1 << 32 {
                    return Err(Error::InvalidGroup(format!("Z_{p}: modulus must be below 2^32")));
                }
            }
        }
        Ok(GroupSpec { factors, rank })
    }

    /// `Z wr Z`.
    pub fn lamplighter_z() -> Self {
        GroupSpec {
            factors: vec![Factor::Z],
            rank: 1,
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// `k` in `Z^k`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Generator symbols: `a1 A1 ... ak Ak g1 G1 ... gm Gm`.
    pub fn alphabet(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 1..=self.rank {
            out.push(format!("a{i}"));
            out.push(format!("A{i}"));
        }
        for j in 1..=self.factors.len() {
            out.push(format!("g{j}"));
            out.push(format!("G{j}"));
        }
        out
    }

    /// Decode a generator symbol. Lower case is the generator, upper case
    /// its inverse; `a`/`A` stand for `a1`/`A1` and `t`/`T` for `g1`/`G1`.
    pub fn generator(&self, sym: &str) -> Result<Generator> {
        let bad = || Error::InvalidGroup(format!("`{sym}` is not a generator of {self}"));
        let mut chars = sym.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let index = if rest.is_empty() {
            1
        } else {
            if rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            rest.parse::<usize>().map_err(|_| bad())?
        };
        let inverse = head.is_ascii_uppercase();
        let g = match head.to_ascii_lowercase() {
            'a' => Generator::Cursor { axis: index - 1, inverse },
            'g' if !rest.is_empty() => Generator::Coefficient { factor: index - 1, inverse },
            't' if rest.is_empty() => Generator::Coefficient { factor: 0, inverse },
            _ => return Err(bad()),
        };
        match g {
            Generator::Cursor { axis, .. } if axis >= self.rank => Err(bad()),
            Generator::Coefficient { factor, .. } if factor >= self.factors.len() => Err(bad()),
            g => Ok(g),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Grammar: `(Z|Z_<p>)(x(Z|Z_<p>))* wr Z^<k>`; `Z^1` may be written `Z`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidGroup(format!("{m} in `{s}`"));
        let (base, acting) = s.split_once("wr").ok_or_else(|| bad("missing `wr`"))?;
        let acting: String = acting.chars().filter(|c| !c.is_whitespace()).collect();
        let rank = match acting.as_str() {
            "Z" => 1,
            a => a
                .strip_prefix("Z^")
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| bad("expected `Z^<k>` after `wr`"))?,
        };
        let mut factors = Vec::new();
        for part in base.split(['x', '×']) {
            let part: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            let f = match part.as_str() {
                "Z" => Factor::Z,
                p => Factor::Zp(
                    p.strip_prefix("Z_")
                        .and_then(|n| n.parse::<u64>().ok())
                        .ok_or_else(|| bad(&format!("bad factor `{p}`")))?,
                ),
            };
            factors.push(f);
        }
        GroupSpec::new(factors, rank)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{} wr Z^{}", base.join(" x "), self.rank)
    }
}

/// A generator of `G wr Z^k` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Moves the cursor by one along `axis`.
    Cursor { axis: usize, inverse: bool },
    /// Adds the generator of base factor `factor` at the cursor.
    Coefficient { factor: usize, inverse: bool },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_groups() {
        let g: GroupSpec = "Z wr Z^2".parse().unwrap();
        assert_eq!(g.factors(), &[Factor::Z]);
        assert_eq!(g.rank(), 2);
        let g: GroupSpec = "Z x Z_2 wr Z".parse().unwrap();
        assert_eq!(g.factors(), &[Factor::Z, Factor::Zp(2)]);
        assert_eq!(g.to_string(), "Z x Z_2 wr Z^1");
        assert_eq!(g.to_string().parse::<GroupSpec>().unwrap(), g);
        for bad in ["Z_4 wr Z", "Z wr Z^0", "Z", "Q wr Z", "Z_1 wr Z"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn generator_symbols() {
        let g: GroupSpec = "Z x Z_3 wr Z^2".parse().unwrap();
        assert_eq!(g.generator("a").unwrap(), Generator::Cursor { axis: 0, inverse: false });
        assert_eq!(g.generator("A2").unwrap(), Generator::Cursor { axis: 1, inverse: true });
        assert_eq!(g.generator("T").unwrap(), Generator::Coefficient { factor: 0, inverse: true });
        assert_eq!(g.generator("g2").unwrap(), Generator::Coefficient { factor: 1, inverse: false });
        for bad in ["a3", "g3", "g", "t1", "a01", "x", ""] {
            assert!(g.generator(bad).is_err(), "{bad}");
        }
        for s in g.alphabet() {
            assert!(g.generator(&s).is_ok());
        }
    }
}
