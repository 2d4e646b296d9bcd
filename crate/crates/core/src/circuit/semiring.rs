use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use crate::polyring::fp::{self, FastModulus};

pub trait Semiring {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// An integer extended by `-inf` and `+inf`, ordered `-inf < n < +inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tropical {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl Tropical {
    pub fn finite(n: impl Into<BigInt>) -> Self {
        Tropical::Finite(n.into())
    }

    pub fn as_finite(&self) -> Option<&BigInt> {
        match self {
            Tropical::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// Tropical product (ordinary sum). An infinite operand absorbs; the
    /// mixed case `-inf + +inf` never arises inside one semiring.
    pub fn plus(&self, other: &Tropical) -> Tropical {
        match (self, other) {
            (Tropical::Finite(a), Tropical::Finite(b)) => Tropical::Finite(a + b),
            (Tropical::NegInf, _) | (_, Tropical::NegInf) => Tropical::NegInf,
            _ => Tropical::PosInf,
        }
    }
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tropical::NegInf => write!(f, "-inf"),
            Tropical::Finite(n) => write!(f, "{n}"),
            Tropical::PosInf => write!(f, "+inf"),
        }
    }
}

/// `(Z ∪ {+inf}, min, +)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MinPlus;

/// `(Z ∪ {-inf}, max, +)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxPlus;

impl Semiring for MinPlus {
    type Elem = Tropical;
    fn zero(&self) -> Tropical {
        Tropical::PosInf
    }
    fn one(&self) -> Tropical {
        Tropical::finite(0)
    }
    fn add(&self, a: &Tropical, b: &Tropical) -> Tropical {
        match a.cmp(b) {
            Ordering::Greater => b.clone(),
            _ => a.clone(),
        }
    }
    fn mul(&self, a: &Tropical, b: &Tropical) -> Tropical {
        a.plus(b)
    }
}

impl Semiring for MaxPlus {
    type Elem = Tropical;
    fn zero(&self) -> Tropical {
        Tropical::NegInf
    }
    fn one(&self) -> Tropical {
        Tropical::finite(0)
    }
    fn add(&self, a: &Tropical, b: &Tropical) -> Tropical {
        match a.cmp(b) {
            Ordering::Less => b.clone(),
            _ => a.clone(),
        }
    }
    fn mul(&self, a: &Tropical, b: &Tropical) -> Tropical {
        a.plus(b)
    }
}

/// F_p[x] / (T) on word vectors; every product is reduced immediately.
#[derive(Clone, Copy, Debug)]
pub struct ResidueRing<'a> {
    pub(crate) modulus: &'a FastModulus,
}

impl Semiring for ResidueRing<'_> {
    type Elem = Vec<u32>;
    fn zero(&self) -> Vec<u32> {
        Vec::new()
    }
    fn one(&self) -> Vec<u32> {
        self.modulus.one()
    }
    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        fp::add(a, b, self.modulus.p())
    }
    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        self.modulus.mulmod(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_behave() {
        let t = Tropical::finite;
        assert_eq!(MaxPlus.add(&t(3), &MaxPlus.mul(&t(1), &t(2))), t(3));
        assert_eq!(MaxPlus.add(&MaxPlus.zero(), &t(-5)), t(-5));
        assert_eq!(MaxPlus.mul(&MaxPlus.zero(), &t(7)), Tropical::NegInf);
        assert_eq!(MinPlus.add(&MinPlus.zero(), &t(4)), t(4));
        assert_eq!(MinPlus.mul(&t(4), &MinPlus.zero()), Tropical::PosInf);
        assert_eq!(MinPlus.add(&t(4), &t(-1)), t(-1));
    }
}
