//! Randomized identity testing for powerful skew circuits.
//!
//! Over F_p a trial picks a random test modulus `T = Q_r(A)` and accepts iff
//! the circuit's value vanishes modulo `T`; a zero polynomial is accepted by
//! every trial and a nonzero one is rejected with probability at least
//! epsilon. Over Z the circuit is tested modulo enough small primes that a
//! nonzero coefficient cannot vanish modulo all of them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{self, degree_bound, kronecker_substitute, PowerfulSkewCircuit, Semiring};
use crate::error::{Error, Result};
use crate::polyring::{build_test_modulus, primes, PrimeField, Ring};

/// Default for the constant `C` in the search cap `C * ell^2 * log2(p)` of
/// [`find_r`].
pub const R_SEARCH_FACTOR: u64 = 64;

/// The per-trial rejection probability, a fraction strictly between 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::InvalidParam(format!(
                "epsilon must lie strictly between 0 and 1, got {num}/{den}"
            )));
        }
        Ok(Epsilon { num, den })
    }

    /// `ceil(1 / epsilon)`.
    pub fn inverse_ceil(&self) -> u64 {
        self.den.div_ceil(self.num)
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon { num: 1, den: 2 }
    }
}

impl FromStr for Epsilon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("epsilon must look like `num/den`, got `{s}`"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let num = n.trim().parse().map_err(|_| bad())?;
        let den = d.trim().parse().map_err(|_| bad())?;
        Epsilon::new(num, den)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PitParams {
    pub epsilon: Epsilon,
    /// Independent trials per prime; testing stops at the first rejection.
    pub trials: u32,
    pub seed: u64,
}

impl Default for PitParams {
    fn default() -> Self {
        PitParams {
            epsilon: Epsilon::default(),
            trials: 40,
            seed: 0,
        }
    }
}

impl PitParams {
    pub fn new(epsilon: Epsilon, trials: u32, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParam("at least one trial is needed".into()));
        }
        Ok(PitParams {
            epsilon,
            trials,
            seed,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Nonzero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "zero",
            Verdict::Nonzero => "nonzero",
        })
    }
}

/// Everything needed to replay one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialTranscript {
    pub prime: u64,
    pub trial: u32,
    pub ell: usize,
    pub t: usize,
    pub r: u64,
    /// `b_0 b_1 ... b_{ell-1}` as a string of `0` and `1`.
    pub b: String,
    pub modulus_degree: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PitReport {
    pub verdict: Verdict,
    pub ring: String,
    pub epsilon: Epsilon,
    pub trials: u32,
    pub seed: u64,
    pub transcripts: Vec<TrialTranscript>,
}

/// `max(1, bit length of the degree bound)` for a univariate circuit, so
/// that `ell >= log2(degree)`.
pub fn choose_ell(c: &PowerfulSkewCircuit) -> Result<usize> {
    if c.nvars() != 1 {
        return Err(Error::InvalidCircuit("choose_ell needs a univariate circuit".into()));
    }
    let d = degree_bound(c, 0)?;
    Ok((d.bits() as usize).max(1))
}

/// The search cap `factor * ell^2 * max(1, ceil(log2 p))`.
pub fn r_search_cap(p: u64, ell: usize, factor: u64) -> u64 {
    let log_p = (64 - (p - 1).leading_zeros() as u64).max(1);
    factor
        .saturating_mul(ell as u64)
        .saturating_mul(ell as u64)
        .saturating_mul(log_p)
}

/// The smallest prime `r != p` that divides none of `p^i - 1` for
/// `1 <= i < ell`, searching up to the cap with the given factor.
pub fn find_r_capped(p: u64, ell: usize, factor: u64) -> Result<u64> {
    let cap = r_search_cap(p, ell, factor);
    for r in primes() {
        if r > cap {
            break;
        }
        if r == p {
            continue;
        }
        let base = p % r;
        let mut pw = 1u64;
        let mut ok = true;
        for _ in 1..ell {
            pw = pw * base % r;
            if pw == 1 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
    }
    Err(Error::PrimeSearchExhausted { p, ell, cap })
}

/// [`find_r_capped`] with the default factor [`R_SEARCH_FACTOR`].
pub fn find_r(p: u64, ell: usize) -> Result<u64> {
    find_r_capped(p, ell, R_SEARCH_FACTOR)
}

/// Parameters fixed once per (circuit, prime).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialSetup {
    pub field: PrimeField,
    pub ell: usize,
    pub t: usize,
    pub r: u64,
}

impl TrialSetup {
    pub fn new(c: &PowerfulSkewCircuit, field: PrimeField, epsilon: Epsilon) -> Result<Self> {
        let ell = choose_ell(c)?;
        let t = ell.max(epsilon.inverse_ceil() as usize);
        let r = find_r(field.modulus(), ell)?;
        Ok(TrialSetup { field, ell, t, r })
    }
}

/// One trial on a univariate circuit whose coefficients are read mod p.
pub fn run_trial(
    c: &PowerfulSkewCircuit,
    setup: &TrialSetup,
    trial: u32,
    rng: &mut impl Rng,
) -> Result<TrialTranscript> {
    let b: Vec<bool> = (0..setup.ell).map(|_| rng.gen()).collect();
    run_trial_with(c, setup, trial, &b)
}

/// One trial with a caller-chosen `b`.
pub fn run_trial_with(
    c: &PowerfulSkewCircuit,
    setup: &TrialSetup,
    trial: u32,
    b: &[bool],
) -> Result<TrialTranscript> {
    let ctx = build_test_modulus(setup.r, b, setup.t, setup.field)?;
    let rem = circuit::eval_mod_words(c, ctx.fast())?;
    Ok(TrialTranscript {
        prime: setup.field.modulus(),
        trial,
        ell: setup.ell,
        t: setup.t,
        r: setup.r,
        b: b.iter().map(|&x| if x { '1' } else { '0' }).collect(),
        modulus_degree: ctx.degree(),
        accepted: rem.is_empty(),
    })
}

/// The random stream for trial `trial` under the prime with index
/// `prime_index`: ChaCha8 seeded with `seed`, one stream per pair.
pub fn trial_rng(seed: u64, prime_index: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((prime_index as u64) << 32) | trial as u64);
    rng
}

fn reduce_circuit(c: &PowerfulSkewCircuit, field: PrimeField) -> PowerfulSkewCircuit {
    c.map_inputs(c.nvars(), |p| p.reduce_mod(field))
}

fn univariate(c: &PowerfulSkewCircuit) -> Result<PowerfulSkewCircuit> {
    if c.nvars() == 1 {
        Ok(c.clone())
    } else {
        Ok(kronecker_substitute(c)?.1)
    }
}

/// Test a univariate circuit modulo one prime; stops at the first rejecting
/// trial.
fn test_mod_prime(
    c: &PowerfulSkewCircuit,
    field: PrimeField,
    params: &PitParams,
    prime_index: u32,
    transcripts: &mut Vec<TrialTranscript>,
) -> Result<Verdict> {
    let reduced = reduce_circuit(c, field);
    let setup = TrialSetup::new(&reduced, field, params.epsilon)?;
    for trial in 0..params.trials {
        let mut rng = trial_rng(params.seed, prime_index, trial);
        let tr = run_trial(&reduced, &setup, trial, &mut rng)?;
        let accepted = tr.accepted;
        transcripts.push(tr);
        if !accepted {
            return Ok(Verdict::Nonzero);
        }
    }
    Ok(Verdict::Zero)
}

/// Identity test over F_p. Multivariate circuits are made univariate by
/// Kronecker substitution first. `Zero` is wrong with probability at most
/// `(1 - epsilon)^trials`; `Nonzero` is always right.
pub fn pit_fp(c: &PowerfulSkewCircuit, field: PrimeField, params: &PitParams) -> Result<PitReport> {
    c.check()?;
    let u = univariate(&reduce_circuit(c, field))?;
    let mut transcripts = Vec::new();
    let verdict = test_mod_prime(&u, field, params, 0, &mut transcripts)?;
    Ok(report(verdict, Ring::Fp(field), params, transcripts))
}

/// `(N, +, *)`, used for the coefficient-size bound.
struct Naturals;

impl Semiring for Naturals {
    type Elem = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
}

/// Upper bound on the sum of absolute coefficient values of `val(c)` over Z:
/// inputs contribute their norm, and the norm is subadditive and
/// submultiplicative. Every coefficient is bounded by it in absolute value.
pub fn coefficient_norm_bound(c: &PowerfulSkewCircuit) -> Result<BigUint> {
    c.graph().evaluate(&Naturals, |p| p.l1_norm())
}

/// The first primes whose product exceeds `2^(bits + 1)`.
pub fn primes_for_bits(bits: u64) -> Vec<u64> {
    let target = BigUint::one() << (bits + 1);
    let mut product = BigUint::one();
    let mut out = Vec::new();
    for p in primes() {
        if product > target {
            break;
        }
        product *= p;
        out.push(p);
    }
    out
}

/// Identity test over Z: with `B` the bit length of the coefficient norm
/// bound, a nonzero coefficient is nonzero modulo one of the first primes
/// whose product exceeds `2^(B+1)`, so the circuit is zero iff it is zero
/// modulo each of them.
pub fn pit_z(c: &PowerfulSkewCircuit, params: &PitParams) -> Result<PitReport> {
    c.check()?;
    let bits = coefficient_norm_bound(c)?.bits();
    let u = univariate(c)?;
    let mut transcripts = Vec::new();
    let mut verdict = Verdict::Zero;
    for (i, p) in primes_for_bits(bits).into_iter().enumerate() {
        let field = PrimeField::new(p)?;
        if test_mod_prime(&u, field, params, i as u32, &mut transcripts)? == Verdict::Nonzero {
            verdict = Verdict::Nonzero;
            break;
        }
    }
    Ok(report(verdict, Ring::Integer, params, transcripts))
}

/// Dispatch on the coefficient ring.
pub fn pit(c: &PowerfulSkewCircuit, ring: Ring, params: &PitParams) -> Result<PitReport> {
    match ring {
        Ring::Integer => pit_z(c, params),
        Ring::Fp(f) => pit_fp(c, f, params),
    }
}

fn report(
    verdict: Verdict,
    ring: Ring,
    params: &PitParams,
    transcripts: Vec<TrialTranscript>,
) -> PitReport {
    PitReport {
        verdict,
        ring: ring.to_string(),
        epsilon: params.epsilon,
        trials: params.trials,
        seed: params.seed,
        transcripts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::SparsePoly;

    fn circuit_of(polys: &[&str]) -> PowerfulSkewCircuit {
        // sum of the given inputs
        let parsed: Vec<SparsePoly> = polys.iter().map(|s| SparsePoly::parse(s).unwrap()).collect();
        let nv = parsed.iter().map(|p| p.nvars()).max().unwrap();
        let mut c = PowerfulSkewCircuit::new(nv);
        let mut acc = c.input(parsed[0].clone());
        for p in &parsed[1..] {
            let g = c.input(p.clone());
            acc = c.add(acc, g);
        }
        c.set_output(acc);
        c
    }

    #[test]
    fn epsilon_parsing() {
        let e: Epsilon = "1/3".parse().unwrap();
        assert_eq!(e.inverse_ceil(), 3);
        assert_eq!("2/3".parse::<Epsilon>().unwrap().inverse_ceil(), 2);
        for bad in ["0/1", "1/1", "3/2", "1", "a/b", "1/0"] {
            assert!(bad.parse::<Epsilon>().is_err(), "{bad}");
        }
    }

    #[test]
    fn ell_is_the_bit_length_of_the_degree_bound() {
        assert_eq!(choose_ell(&circuit_of(&["x"])).unwrap(), 1);
        assert_eq!(choose_ell(&circuit_of(&["7"])).unwrap(), 1);
        assert_eq!(choose_ell(&circuit_of(&["x^1099511627776"])).unwrap(), 41);
        assert_eq!(choose_ell(&circuit_of(&["x^1000"])).unwrap(), 10);
    }

    #[test]
    fn small_r_values() {
        assert_eq!(find_r(2, 1).unwrap(), 3);
        assert_eq!(find_r(3, 1).unwrap(), 2);
        // p = 2, ell = 3: r must not divide 1 or 3, and r != 2
        assert_eq!(find_r(2, 3).unwrap(), 5);
        assert!(matches!(find_r_capped(2, 40, 0), Err(Error::PrimeSearchExhausted { .. })));
    }

    #[test]
    fn x_plus_one_over_f2_is_rejected() {
        let c = circuit_of(&["x", "1"]);
        let f = PrimeField::new(2).unwrap();
        let setup = TrialSetup::new(&c, f, Epsilon::default()).unwrap();
        assert_eq!((setup.ell, setup.t, setup.r), (1, 2, 3));
        // A = x^2 + 1, T = A^2 + A + 1 = x^4 + x^2 + 1 has degree 4 > 1.
        let tr = run_trial_with(&c, &setup, 0, &[true]).unwrap();
        assert_eq!(tr.modulus_degree, 4);
        assert!(!tr.accepted);
    }

    #[test]
    fn zero_circuits_are_always_accepted() {
        let params = PitParams::default();
        for s in [
            &["x^18446744073709551616", "-1*x^18446744073709551616"][..],
            &["x1*x2", "-1*x2*x1"],
            &["0"],
        ] {
            let c = circuit_of(s);
            let r = pit_fp(&c, PrimeField::new(2).unwrap(), &params).unwrap();
            assert_eq!(r.verdict, Verdict::Zero);
            assert_eq!(r.transcripts.len(), 40);
            assert!(r.transcripts.iter().all(|t| t.accepted));
        }
    }

    #[test]
    fn six_x_needs_the_third_prime() {
        let c = circuit_of(&["6*x"]);
        assert_eq!(coefficient_norm_bound(&c).unwrap(), BigUint::from(6u32));
        assert_eq!(primes_for_bits(3), vec![2, 3, 5]);
        let r = pit_z(&c, &PitParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Nonzero);
        let last = r.transcripts.last().unwrap();
        assert_eq!(last.prime, 5);
        assert!(!last.accepted);
        assert!(r.transcripts.iter().filter(|t| t.prime < 5).all(|t| t.accepted));
    }

    #[test]
    fn reports_are_deterministic() {
        let c = circuit_of(&["x^1000000000", "2"]);
        let params = PitParams::new(Epsilon::default(), 5, 99).unwrap();
        let a = pit_z(&c, &params).unwrap();
        let b = pit_z(&c, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
