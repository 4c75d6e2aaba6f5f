//! Primality, the odd-prime stream, and the prime pools used by the
//! family constructions.

use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
// Deterministic for every n < 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn trial_division(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

fn miller_rabin(n: u64) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    if n < TRIAL_DIVISION_LIMIT {
        trial_division(n)
    } else if n % 2 == 0 {
        false
    } else {
        miller_rabin(n)
    }
}

pub fn require_prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::arg(format!("{p} is not prime")))
    }
}

struct OddPrimeTable {
    primes: Vec<u64>,
    // every odd prime <= limit is in `primes`
    limit: u64,
}

impl OddPrimeTable {
    /// Sieve of Eratosthenes over odd numbers up to `new_limit`, replacing
    /// the table. Limits double so the total work stays linear.
    fn extend_to(&mut self, target: u64) {
        if target <= self.limit {
            return;
        }
        let new_limit = target.max(self.limit.saturating_mul(2)).max(1 << 16);
        let half = (new_limit / 2 + 1) as usize;
        // composite[i] describes 2i + 1
        let mut composite = vec![false; half];
        composite[0] = true;
        let mut i = 1usize;
        while (2 * i + 1) * (2 * i + 1) <= new_limit as usize {
            if !composite[i] {
                let p = 2 * i + 1;
                let mut j = (p * p) / 2;
                while j < half {
                    composite[j] = true;
                    j += p;
                }
            }
            i += 1;
        }
        self.primes = composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && (2 * i as u64 + 1) <= new_limit)
            .map(|(i, _)| 2 * i as u64 + 1)
            .collect();
        self.limit = new_limit;
    }
}

fn odd_prime_table() -> &'static Mutex<OddPrimeTable> {
    static CACHE: OnceLock<Mutex<OddPrimeTable>> = OnceLock::new();
    CACHE.get_or_init(|| {
        Mutex::new(OddPrimeTable {
            primes: Vec::new(),
            limit: 0,
        })
    })
}

/// The `i`-th odd prime, 1-based: `nth_odd_prime(1) = 3`.
pub fn nth_odd_prime(i: usize) -> u64 {
    assert!(i >= 1, "odd primes are indexed from 1");
    let mut table = odd_prime_table().lock().expect("prime cache poisoned");
    while table.primes.len() < i {
        let next = (table.limit * 2).max(1 << 16);
        table.extend_to(next);
    }
    table.primes[i - 1]
}

/// 1-based position of an odd prime in the odd-prime sequence.
pub fn odd_prime_index(p: u64) -> Option<usize> {
    if p < 3 || !is_prime(p) {
        return None;
    }
    let mut table = odd_prime_table().lock().expect("prime cache poisoned");
    table.extend_to(p);
    table.primes.binary_search(&p).ok().map(|pos| pos + 1)
}

/// Number of odd primes `<= x`.
pub fn odd_prime_count(x: u64) -> usize {
    let mut table = odd_prime_table().lock().expect("prime cache poisoned");
    table.extend_to(x);
    table.primes.partition_point(|&q| q <= x)
}

/// `n`-th prime (1-based) strictly greater than `bound`.
pub fn nth_prime_above(bound: u64, n: usize) -> u64 {
    assert!(n >= 1);
    let mut count = 0;
    let mut c = bound + 1;
    loop {
        if is_prime(c) {
            count += 1;
            if count == n {
                return c;
            }
        }
        c += 1;
    }
}

/// Pool index of the odd prime at 1-based position `i`: the unique `l` with
/// `i = 2^(l-1) * odd`.
pub fn pool_of_index(i: usize) -> u32 {
    i.trailing_zeros() + 1
}

/// `n`-th element (1-based) of the prime pool `P_l`.
///
/// The `i`-th odd prime lies in `P_l` exactly when `i = 2^(l-1) (2m - 1)`.
/// The pools are pairwise disjoint and each is infinite.
pub fn partition_primes(pool: u32, n: usize) -> Result<u64> {
    if pool == 0 || n == 0 {
        return Err(Error::arg("pool and position are 1-based"));
    }
    let index = (1usize << (pool - 1))
        .checked_mul(2 * n - 1)
        .ok_or_else(|| Error::arg("pool index overflow"))?;
    Ok(nth_odd_prime(index))
}

/// Pool containing the odd prime `p`, if `p` is an odd prime.
pub fn pool_of_prime(p: u64) -> Option<u32> {
    odd_prime_index(p).map(pool_of_index)
}

/// Largest power of two strictly less than `x`.
pub fn ell2(x: u64) -> Result<u64> {
    if x < 2 {
        return Err(Error::arg(format!("no power of 2 is below {x} in range")));
    }
    Ok(1u64 << (63 - (x - 1).leading_zeros()))
}

/// Prime factorization of a `u64` by trial division, short-circuiting once the
/// cofactor is prime. Fails when a composite cofactor has no factor below the
/// trial-division limit.
pub fn factorize(mut n: u64) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while n > 1 && !is_prime(n) {
        if d > TRIAL_DIVISION_LIMIT || d * d > n {
            return Err(Error::FactorizationLimit(n.to_string()));
        }
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        match out.last_mut() {
            Some((p, e)) if *p == n => *e += 1,
            _ => out.push((n, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001)); // 101 * 9901
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn pool_examples() {
        let p1: Vec<u64> = (1..=4).map(|n| partition_primes(1, n).unwrap()).collect();
        assert_eq!(p1, vec![3, 7, 13, 19]);
        let p2: Vec<u64> = (1..=3).map(|n| partition_primes(2, n).unwrap()).collect();
        assert_eq!(p2, vec![5, 17, 31]);
        assert_eq!(pool_of_prime(31), Some(2));
        assert_eq!(pool_of_prime(2), None);
    }

    #[test]
    fn pools_disjoint_prime_and_odd() {
        let mut seen = std::collections::HashSet::new();
        for l in 1..=4 {
            for n in 1..=1000usize.min(4000 >> l) {
                let p = partition_primes(l, n).unwrap();
                assert!(is_prime(p) && p % 2 == 1);
                assert!(seen.insert(p), "{p} in two pools");
                assert_eq!(pool_of_prime(p), Some(l));
            }
        }
    }

    #[test]
    fn ell2_examples() {
        assert_eq!(ell2(3).unwrap(), 2);
        assert_eq!(ell2(9).unwrap(), 8);
        assert_eq!(ell2(8).unwrap(), 4);
        assert_eq!(ell2(2).unwrap(), 1);
        assert!(ell2(1).is_err());
        assert!(ell2(0).is_err());
    }

    #[test]
    fn factorize_roundtrip() {
        for n in 2..2000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
        assert_eq!(factorize(1_000_003 * 97).unwrap(), vec![(97, 1), (1_000_003, 1)]);
        assert_eq!(factorize(49).unwrap(), vec![(7, 2)]);
        assert_eq!(factorize(1).unwrap(), vec![]);
    }
}
