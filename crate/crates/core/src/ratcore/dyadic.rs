//! A fixed bijection between the positive integers and the dyadic rationals
//! greater than one.
//!
//! Block `m >= 1` holds the dyadics in `(1, m + 1]` with denominator at most
//! `2^(m-1)` that no earlier block holds. Inside a block, entries are ordered
//! by denominator exponent, then by value. Blocks `1..=m` together hold
//! exactly `m * 2^(m-1)` values, so numerators grow roughly linearly in the
//! index and every dyadic in `(1, m + 1]` with denominator at most `2^(m-1)`
//! appears by index `m * 2^(m-1)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::valuation::int_valuation;
use super::Rat;
use crate::error::{Error, Result};

/// A dyadic `numer / 2^exp` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic {
    pub numer: u64,
    pub exp: u32,
}

impl Dyadic {
    pub fn to_rat(self) -> Rat {
        Rat::new(self.numer, BigInt::from(1u64) << self.exp).expect("nonzero")
    }

    pub fn from_rat(q: &Rat) -> Option<Dyadic> {
        let den = q.denom();
        let exp = int_valuation(den, 2);
        if exp > 62 || den != &(BigInt::from(1u64) << exp) {
            return None;
        }
        Some(Dyadic {
            numer: q.numer().to_u64()?,
            exp: exp as u32,
        })
    }
}

fn block_total(m: u32) -> u64 {
    // m * 2^(m-1) values in blocks 1..=m
    (m as u64) << (m - 1)
}

/// Number of block-`m` entries with exact denominator `2^k`.
fn block_class_size(m: u32, k: u32) -> u64 {
    if m == 1 {
        return 1;
    }
    if k + 1 == m {
        (m as u64) << (m - 2)
    } else if k == 0 {
        1
    } else {
        1u64 << (k - 1)
    }
}

const MAX_BLOCK: u32 = 40;

/// The `n`-th dyadic rational greater than one (1-based).
pub fn enumerate_dyadics_gt1(n: u64) -> Result<Dyadic> {
    if n == 0 {
        return Err(Error::arg("dyadic enumeration is 1-based"));
    }
    let mut m = 1;
    while block_total(m) < n {
        m += 1;
        if m > MAX_BLOCK {
            return Err(Error::arg(format!("index {n} beyond enumeration range")));
        }
    }
    let mut offset = n - if m == 1 { 0 } else { block_total(m - 1) } - 1;
    for k in 0..m {
        let size = block_class_size(m, k);
        if offset < size {
            return Ok(nth_in_class(m, k, offset));
        }
        offset -= size;
    }
    unreachable!("block sizes sum to the block length")
}

fn nth_in_class(m: u32, k: u32, offset: u64) -> Dyadic {
    let m64 = m as u64;
    if m == 1 {
        return Dyadic { numer: 2, exp: 0 };
    }
    if k + 1 == m {
        // odd numerators in (2^k, (m + 1) 2^k]
        let first = (1u64 << k) + 1;
        Dyadic {
            numer: first + 2 * offset,
            exp: k,
        }
    } else if k == 0 {
        Dyadic {
            numer: m64 + 1,
            exp: 0,
        }
    } else {
        // odd numerators in (m 2^k, (m + 1) 2^k]
        let first = (m64 << k) + 1;
        Dyadic {
            numer: first + 2 * offset,
            exp: k,
        }
    }
}

/// Block holding the dyadic `x > 1`.
fn block_of(x: Dyadic) -> u32 {
    let ceil = x.numer.div_ceil(1u64 << x.exp);
    let by_value = (ceil - 1) as u32;
    by_value.max(x.exp + 1)
}

/// Inverse of [`enumerate_dyadics_gt1`].
pub fn dyadic_index(x: Dyadic) -> Result<u64> {
    let value_gt_one = x.numer > (1u64 << x.exp);
    let lowest = x.exp == 0 || x.numer % 2 == 1;
    if !value_gt_one || !lowest {
        return Err(Error::arg(format!(
            "{}/2^{} is not a lowest-terms dyadic above 1",
            x.numer, x.exp
        )));
    }
    let m = block_of(x);
    if m > MAX_BLOCK {
        return Err(Error::arg("dyadic beyond enumeration range"));
    }
    let mut index = if m == 1 { 0 } else { block_total(m - 1) };
    for k in 0..x.exp {
        index += block_class_size(m, x.exp.min(k));
    }
    let k = x.exp;
    let offset = if m == 1 {
        0
    } else if k + 1 == m {
        (x.numer - ((1u64 << k) + 1)) / 2
    } else if k == 0 {
        0
    } else {
        (x.numer - (((m as u64) << k) + 1)) / 2
    };
    Ok(index + offset + 1)
}

pub fn dyadic_index_of(q: &Rat) -> Result<u64> {
    let d = Dyadic::from_rat(q).ok_or_else(|| Error::arg(format!("{q} is not dyadic")))?;
    dyadic_index(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    fn value(n: u64) -> Rat {
        enumerate_dyadics_gt1(n).unwrap().to_rat()
    }

    /// Independent listing: every lowest-terms dyadic in (1, m+1] with
    /// denominator at most 2^(m-1), grouped by the first such m.
    fn brute_force_prefix(max_block: u32) -> Vec<Rat> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in 1..=max_block {
            let mut block: Vec<(u32, Rat)> = Vec::new();
            let den = 1i64 << (m - 1);
            for num in den + 1..=(m as i64 + 1) * den {
                let q = Rat::frac(num, den);
                if seen.insert(q.clone()) {
                    let k = int_valuation(q.denom(), 2) as u32;
                    block.push((k, q));
                }
            }
            block.sort();
            out.extend(block.into_iter().map(|(_, q)| q));
        }
        out
    }

    #[test]
    fn first_values() {
        let head: Vec<String> = (1..=7).map(|n| value(n).to_string()).collect();
        assert_eq!(head, ["2", "3", "3/2", "5/2", "4", "7/2", "5/4"]);
    }

    #[test]
    fn matches_brute_force_listing() {
        let listing = brute_force_prefix(8);
        assert_eq!(listing.len(), 8 << 7);
        for (i, q) in listing.iter().enumerate() {
            assert_eq!(&value(i as u64 + 1), q, "index {}", i + 1);
        }
    }

    #[test]
    fn injective_and_inverse_on_prefix() {
        let mut seen = HashSet::new();
        for n in 1..=10_000u64 {
            let d = enumerate_dyadics_gt1(n).unwrap();
            assert!(d.to_rat() > Rat::one());
            assert!(seen.insert(d), "repeat at {n}");
            assert_eq!(dyadic_index(d).unwrap(), n);
        }
    }

    #[test]
    fn covers_small_dyadics_early() {
        let hit: HashSet<Rat> = (1..=500).map(value).collect();
        for num in 65..=256 {
            let q = Rat::frac(num, 64);
            assert!(hit.contains(&q), "{q} missing from first 500");
        }
    }

    #[test]
    fn inverse_rejects_non_dyadics() {
        assert!(dyadic_index_of(&Rat::frac(1, 2)).is_err());
        assert!(dyadic_index_of(&Rat::one()).is_err());
        assert!(dyadic_index_of(&Rat::frac(4, 3)).is_err());
        assert_eq!(dyadic_index_of(&Rat::frac(5, 2)).unwrap(), 4);
    }
}
