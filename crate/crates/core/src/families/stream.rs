//! Atom streams. Each atom carries a private prime: the only defining
//! generator with that prime in its denominator.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratcore::dyadic::enumerate_dyadics_gt1;
use crate::ratcore::primes::{
    ell2, nth_odd_prime, odd_prime_count, odd_prime_index, partition_primes, pool_of_prime, pow_mod,
};
use crate::ratcore::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TaggedAtom {
    pub index: usize,
    pub value: Rat,
    pub prime: u64,
}

impl TaggedAtom {
    /// `prime * value`, which lies in the base monoid.
    pub fn base_multiple(&self) -> Rat {
        self.value.scale(self.prime)
    }
}

/// Largest number of atoms a memoized stream will generate while looking
/// for the owner of a prime.
pub const STREAM_CAP: usize = 2_000_000;

/// Largest prime whose owning atom is looked up; beyond it the prime sieve
/// would not fit in memory.
pub const PRIME_LOOKUP_CAP: u64 = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PoolRule {
    /// Smallest unused pool prime above the numerator of the n-th dyadic.
    AboveNumerator,
    /// Smallest unused pool prime not dividing `2^n - 1` (unless the guard
    /// is switched off).
    CoprimeToMersenne { guard: bool },
}

#[derive(Default)]
struct PoolState {
    primes: Vec<u64>,
    owner: HashMap<u64, usize>,
    // next-unused links over pool positions (1-based); absent means unused
    skip: HashMap<usize, usize>,
}

impl PoolState {
    fn find_unused(&mut self, from: usize) -> usize {
        let mut m = from;
        let mut path = Vec::new();
        while let Some(&next) = self.skip.get(&m) {
            path.push(m);
            m = next;
        }
        for x in path {
            self.skip.insert(x, m);
        }
        m
    }

    fn mark_used(&mut self, m: usize) {
        self.skip.insert(m, m + 1);
    }
}

pub(crate) struct PoolStream {
    pool: u32,
    rule: PoolRule,
    state: Mutex<PoolState>,
}

impl PoolStream {
    pub(crate) fn new(pool: u32, rule: PoolRule) -> Self {
        PoolStream {
            pool,
            rule,
            state: Mutex::new(PoolState::default()),
        }
    }

    fn first_position_above(&self, bound: u64) -> usize {
        let c = odd_prime_count(bound);
        let s = 1usize << (self.pool - 1);
        (c / s + 3) / 2
    }

    fn extend(&self, state: &mut PoolState, upto: usize) -> Result<()> {
        if upto > STREAM_CAP {
            return Err(Error::NotApplicable(format!(
                "atom index {upto} is beyond the stream cap {STREAM_CAP}"
            )));
        }
        while state.primes.len() < upto {
            let n = state.primes.len() + 1;
            let mut m = match self.rule {
                PoolRule::AboveNumerator => {
                    let b = enumerate_dyadics_gt1(n as u64)?.numer;
                    state.find_unused(self.first_position_above(b))
                }
                PoolRule::CoprimeToMersenne { .. } => state.find_unused(1),
            };
            let prime = loop {
                let p = partition_primes(self.pool, m)?;
                let blocked = match self.rule {
                    PoolRule::CoprimeToMersenne { guard: true } => pow_mod(2, n as u64, p) == 1,
                    _ => false,
                };
                if !blocked {
                    break p;
                }
                m = state.find_unused(m + 1);
            };
            state.mark_used(m);
            state.owner.insert(prime, n);
            state.primes.push(prime);
        }
        Ok(())
    }

    pub(crate) fn prime(&self, n: usize) -> Result<u64> {
        let mut state = self.state.lock().expect("stream lock poisoned");
        self.extend(&mut state, n)?;
        Ok(state.primes[n - 1])
    }

    fn value(&self, n: usize, prime: u64) -> Result<Rat> {
        let p = BigInt::from(prime);
        match self.rule {
            PoolRule::AboveNumerator => {
                let d = enumerate_dyadics_gt1(n as u64)?;
                Rat::new(d.numer, (BigInt::from(1u8) << d.exp) * p)
            }
            PoolRule::CoprimeToMersenne { .. } => {
                let two_n = BigInt::from(1u8) << n;
                Rat::new(&two_n - 1, two_n * p)
            }
        }
    }

    /// Index of the atom owning `p`, generating atoms until `p` is taken.
    /// Every pool prime is eventually taken because the frontier of smallest
    /// unused primes keeps moving.
    pub(crate) fn owner_of(&self, p: u64) -> Result<Option<usize>> {
        if pool_of_prime(p) != Some(self.pool) {
            return Ok(None);
        }
        let mut state = self.state.lock().expect("stream lock poisoned");
        loop {
            if let Some(&n) = state.owner.get(&p) {
                return Ok(Some(n));
            }
            let next = (state.primes.len() * 2).max(64);
            self.extend(&mut state, next.min(STREAM_CAP + 1))?;
        }
    }
}

pub(crate) enum AtomStream {
    Single(TaggedAtom),
    Pool(PoolStream),
    /// 1/3, then o_n / (l2(o_n) p_n) with o_n = 2n + 1 and p_n the n-th
    /// prime above 3.
    OddOverPowerPrime,
    /// 1 / (2^n p_n), p_n the n-th odd prime.
    Grams,
    /// 1 / p over the odd primes.
    OddReciprocals,
}

impl AtomStream {
    pub(crate) fn len(&self) -> Option<usize> {
        match self {
            AtomStream::Single(_) => Some(1),
            _ => None,
        }
    }

    /// The `n`-th atom (1-based), `None` past the end of a finite stream.
    pub(crate) fn atom(&self, n: usize) -> Result<Option<TaggedAtom>> {
        if n == 0 {
            return Err(Error::arg("atom indices start at 1"));
        }
        let atom = match self {
            AtomStream::Single(a) => return Ok((n == 1).then(|| a.clone())),
            AtomStream::Pool(s) => {
                let prime = s.prime(n)?;
                TaggedAtom {
                    index: n,
                    value: s.value(n, prime)?,
                    prime,
                }
            }
            AtomStream::OddOverPowerPrime => {
                if n == 1 {
                    TaggedAtom {
                        index: 1,
                        value: Rat::frac(1, 3),
                        prime: 3,
                    }
                } else {
                    let k = (n - 1) as u64;
                    let o = 2 * k + 1;
                    let prime = nth_odd_prime(n);
                    TaggedAtom {
                        index: n,
                        value: Rat::new(o, BigInt::from(ell2(o)?) * prime)?,
                        prime,
                    }
                }
            }
            AtomStream::Grams => {
                let prime = nth_odd_prime(n);
                TaggedAtom {
                    index: n,
                    value: Rat::new(1, (BigInt::from(1u8) << n) * prime)?,
                    prime,
                }
            }
            AtomStream::OddReciprocals => {
                let prime = nth_odd_prime(n);
                TaggedAtom {
                    index: n,
                    value: Rat::new(1, prime)?,
                    prime,
                }
            }
        };
        Ok(Some(atom))
    }

    /// The atom whose private prime is `p`, if any.
    pub(crate) fn by_prime(&self, p: u64) -> Result<Option<TaggedAtom>> {
        if p > PRIME_LOOKUP_CAP && !matches!(self, AtomStream::Single(_)) && crate::ratcore::is_prime(p) {
            return Err(Error::NotApplicable(format!(
                "prime {p} is above the lookup cap {PRIME_LOOKUP_CAP}"
            )));
        }
        let index = match self {
            AtomStream::Single(a) => return Ok((a.prime == p).then(|| a.clone())),
            AtomStream::Pool(s) => s.owner_of(p)?,
            AtomStream::OddOverPowerPrime | AtomStream::Grams | AtomStream::OddReciprocals => {
                odd_prime_index(p)
            }
        };
        match index {
            Some(n) => self.atom(n),
            None => Ok(None),
        }
    }

    pub(crate) fn take(&self, count: usize) -> Result<Vec<TaggedAtom>> {
        let mut out = Vec::new();
        for n in 1..=count {
            match self.atom(n)? {
                Some(a) => out.push(a),
                None => break,
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(stream: &AtomStream, n: usize) -> Vec<String> {
        stream
            .take(n)
            .unwrap()
            .iter()
            .map(|a| a.value.to_string())
            .collect()
    }

    #[test]
    fn mersenne_guarded_pool() {
        let s = AtomStream::Pool(PoolStream::new(1, PoolRule::CoprimeToMersenne { guard: true }));
        assert_eq!(values(&s, 3), ["1/6", "3/28", "7/104"]);
    }

    #[test]
    fn dyadic_numerator_pool() {
        let s = AtomStream::Pool(PoolStream::new(1, PoolRule::AboveNumerator));
        assert_eq!(values(&s, 2), ["2/3", "3/7"]);
        for a in s.take(300).unwrap() {
            let b = enumerate_dyadics_gt1(a.index as u64).unwrap().numer;
            assert!(a.prime > b);
        }
        assert_eq!(s.by_prime(7).unwrap().unwrap().index, 2);
        assert_eq!(s.by_prime(5).unwrap(), None);
    }

    #[test]
    fn owner_lookup_extends_stream() {
        let s = PoolStream::new(2, PoolRule::AboveNumerator);
        let p = partition_primes(2, 500).unwrap();
        let n = s.owner_of(p).unwrap().unwrap();
        assert_eq!(s.prime(n).unwrap(), p);
    }

    #[test]
    fn closed_form_streams() {
        assert_eq!(values(&AtomStream::OddOverPowerPrime, 4), ["1/3", "3/10", "5/28", "7/44"]);
        assert_eq!(values(&AtomStream::Grams, 3), ["1/6", "1/20", "1/56"]);
        assert_eq!(values(&AtomStream::OddReciprocals, 3), ["1/3", "1/5", "1/7"]);
        assert_eq!(AtomStream::OddOverPowerPrime.by_prime(11).unwrap().unwrap().value, Rat::frac(7, 44));
    }
}
