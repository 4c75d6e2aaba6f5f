use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::primes::{self, factorize, is_prime};
use super::Rat;
use crate::error::{Error, Result};

/// A p-adic valuation: an integer, or `+inf` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Valuation::Finite(v) if v < 0)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinity) => Ordering::Less,
            (Infinity, Finite(_)) => Ordering::Greater,
            (Infinity, Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Infimum of `v_p` over the nonzero elements of a monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InfValuation {
    NegInfinity,
    Finite(i64),
}

impl InfValuation {
    pub fn is_neg_infinite(self) -> bool {
        matches!(self, InfValuation::NegInfinity)
    }

    pub fn shifted(self, by: i64) -> Self {
        match self {
            InfValuation::NegInfinity => InfValuation::NegInfinity,
            InfValuation::Finite(v) => InfValuation::Finite(v + by),
        }
    }
}

impl fmt::Display for InfValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfValuation::NegInfinity => write!(f, "-inf"),
            InfValuation::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn padic_valuation(q: &Rat, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    Ok(valuation_unchecked(q, p))
}

/// `v_p(q)` without validating `p`; callers guarantee primality.
pub(crate) fn valuation_unchecked(q: &Rat, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinity;
    }
    let up = int_valuation(q.numer(), p) as i64;
    let down = int_valuation(q.denom(), p) as i64;
    Valuation::Finite(up - down)
}

/// `v_p(q)` for nonzero `q`.
pub(crate) fn vp(q: &Rat, p: u64) -> i64 {
    valuation_unchecked(q, p)
        .finite()
        .expect("valuation of a nonzero rational")
}

const SMALL_PRIME_SWEEP: u64 = 10_000;

/// Distinct prime factors of a nonzero integer, ascending.
pub fn prime_factors(n: &BigInt) -> Result<Vec<u64>> {
    let mut n = n.abs();
    if n.is_zero() {
        return Err(Error::arg("zero has no factorization"));
    }
    if let Some(small) = n.to_u64() {
        return Ok(factorize(small)?.into_iter().map(|(p, _)| p).collect());
    }
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= SMALL_PRIME_SWEEP {
        let bd = BigInt::from(d);
        if (&n % &bd).is_zero() {
            out.push(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n.is_one() {
        return Ok(out);
    }
    let rest = n
        .to_u64()
        .ok_or_else(|| Error::FactorizationLimit(n.to_string()))?;
    out.extend(factorize(rest)?.into_iter().map(|(p, _)| p));
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Primes dividing the denominator of a positive rational.
pub fn prime_support(q: &Rat) -> Result<SupportSet> {
    if !q.is_positive() {
        return Err(Error::arg(format!("prime support needs q > 0, got {q}")));
    }
    Ok(SupportSet::finite(prime_factors(q.denom())?.into_iter().collect()))
}

/// Symbolic description of a (possibly infinite) set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportSet {
    Finite { primes: BTreeSet<u64> },
    /// A finite set together with an infinite subset of the pool `P_pool`.
    CofinalIn { finite: BTreeSet<u64>, pool: u32 },
    AllPrimes,
}

impl SupportSet {
    pub fn finite(primes: BTreeSet<u64>) -> Self {
        SupportSet::Finite { primes }
    }

    pub fn as_finite(&self) -> Option<&BTreeSet<u64>> {
        match self {
            SupportSet::Finite { primes } => Some(primes),
            _ => None,
        }
    }

    /// `Some(answer)` when the descriptor alone decides membership of `p`.
    pub fn contains(&self, p: u64) -> Option<bool> {
        match self {
            SupportSet::Finite { primes } => Some(primes.contains(&p)),
            SupportSet::CofinalIn { finite, pool } => {
                if finite.contains(&p) {
                    Some(true)
                } else if primes::pool_of_prime(p) != Some(*pool) {
                    Some(false)
                } else {
                    None
                }
            }
            SupportSet::AllPrimes => Some(is_prime(p)),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SupportSet::Finite { .. })
    }

    /// Exact symmetric difference of two finite descriptors.
    pub fn symmetric_difference(&self, other: &SupportSet) -> Option<BTreeSet<u64>> {
        let (a, b) = (self.as_finite()?, other.as_finite()?);
        Some(a.symmetric_difference(b).copied().collect())
    }

    /// `Some(true)` if the symmetric difference is provably finite,
    /// `Some(false)` if provably infinite, `None` if the descriptors cannot
    /// tell (e.g. two infinite subsets of the same pool).
    pub fn symmetric_difference_is_finite(&self, other: &SupportSet) -> Option<bool> {
        use SupportSet::*;
        match (self, other) {
            (Finite { .. }, Finite { .. }) | (AllPrimes, AllPrimes) => Some(true),
            (Finite { .. }, _) | (_, Finite { .. }) => Some(false),
            (CofinalIn { pool: a, .. }, CofinalIn { pool: b, .. }) => {
                if a != b {
                    Some(false)
                } else {
                    None
                }
            }
            // Every other pool is missing from a single cofinal descriptor.
            (CofinalIn { .. }, AllPrimes) | (AllPrimes, CofinalIn { .. }) => Some(false),
        }
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<u64>| {
            s.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            SupportSet::Finite { primes } => write!(f, "{{{}}}", list(primes)),
            SupportSet::CofinalIn { finite, pool } => {
                write!(f, "{{{}}} + infinite subset of P_{pool}", list(finite))
            }
            SupportSet::AllPrimes => write!(f, "all primes"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> SupportSet {
        SupportSet::finite(v.iter().copied().collect())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&Rat::frac(7, 12), 2).unwrap(), Valuation::Finite(-2));
        assert_eq!(padic_valuation(&Rat::zero(), 5).unwrap(), Valuation::Infinity);
        assert_eq!(padic_valuation(&Rat::frac(5, 27), 3).unwrap(), Valuation::Finite(-3));
        assert_eq!(padic_valuation(&Rat::frac(-18, 5), 3).unwrap(), Valuation::Finite(2));
        assert!(padic_valuation(&Rat::frac(1, 2), 4).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(prime_support(&Rat::frac(7, 12)).unwrap(), set(&[2, 3]));
        assert_eq!(prime_support(&Rat::int(5)).unwrap(), set(&[]));
        assert_eq!(prime_support(&Rat::frac(1, 30)).unwrap(), set(&[2, 3, 5]));
        assert!(prime_support(&Rat::zero()).is_err());
        assert!(prime_support(&Rat::frac(-1, 3)).is_err());
    }

    #[test]
    fn big_denominator_support() {
        let d = BigInt::from(2u64).pow(80) * BigInt::from(1_000_003u64);
        let q = Rat::new(1, d).unwrap();
        assert_eq!(prime_support(&q).unwrap(), set(&[2, 1_000_003]));
    }

    #[test]
    fn descriptor_symmetric_difference() {
        let a = set(&[2, 3]);
        let b = set(&[2, 5]);
        assert_eq!(a.symmetric_difference(&b).unwrap(), [3, 5].into_iter().collect());
        let c1 = SupportSet::CofinalIn { finite: [2].into(), pool: 1 };
        let c2 = SupportSet::CofinalIn { finite: [2].into(), pool: 2 };
        assert_eq!(c1.symmetric_difference_is_finite(&c2), Some(false));
        assert_eq!(c1.symmetric_difference_is_finite(&c1), None);
        assert_eq!(a.symmetric_difference_is_finite(&c1), Some(false));
        assert_eq!(c1.contains(3), None);
        assert_eq!(c1.contains(5), Some(false));
        assert_eq!(c1.contains(2), Some(true));
    }

    fn nonzero_rat() -> impl Strategy<Value = Rat> {
        (-5000i64..5000, 1i64..5000)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| Rat::frac(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn ultrametric(x in nonzero_rat(), y in nonzero_rat(), pi in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let (vx, vy) = (valuation_unchecked(&x, p), valuation_unchecked(&y, p));
            let vs = valuation_unchecked(&(&x + &y), p);
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicative(x in nonzero_rat(), y in nonzero_rat(), pi in 0usize..5) {
            let p = [2u64, 3, 5, 7, 11][pi];
            prop_assert_eq!(vp(&(&x * &y), p), vp(&x, p) + vp(&y, p));
        }

        #[test]
        fn support_of_product(x in nonzero_rat(), y in nonzero_rat()) {
            let (x, y) = (x.abs(), y.abs());
            let sx = prime_support(&x).unwrap();
            let sy = prime_support(&y).unwrap();
            let sxy = prime_support(&(&x * &y)).unwrap();
            for p in sxy.as_finite().unwrap() {
                prop_assert!(sx.as_finite().unwrap().contains(p) || sy.as_finite().unwrap().contains(p));
            }
        }

        #[test]
        fn canonicalization_idempotent(n in -10_000i64..10_000, d in 1i64..10_000) {
            let q = Rat::frac(n, d);
            let again: Rat = q.to_string().parse().unwrap();
            prop_assert_eq!(&again, &q);
            prop_assert_eq!(q.scale(d), Rat::int(n));
        }
    }
}
