//! Exact membership in a finitely generated Puiseux monoid.
//!
//! The query is first reduced with valuation arguments (a prime carried by a
//! single generator forces that generator's coefficient modulo a prime power),
//! then scaled to an integer knapsack problem and settled either by a bitset
//! dynamic program over all targets or by shortest paths over residues modulo
//! the smallest weight.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::certificate::{Certificate, MembershipResult, Obstruction};
use crate::error::Result;
use crate::ratcore::valuation::{prime_factors, vp};
use crate::ratcore::Rat;

pub const DEFAULT_THRESHOLD: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest integer search space (scaled target for the dynamic program,
    /// smallest scaled weight for the residue route) explored before giving
    /// up with `Unknown`.
    pub threshold: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Clone)]
struct Derived {
    value: Rat,
    // coefficients over the original generators
    combo: Vec<(usize, BigUint)>,
}

fn to_biguint(n: &BigInt) -> BigUint {
    n.to_biguint().expect("nonnegative")
}

struct Reducer<'a> {
    gens: &'a [Rat],
    derived: Vec<Derived>,
    offset: Vec<BigUint>,
    target: Rat,
    query: Rat,
}

enum Step {
    Changed,
    Stable,
    Done(MembershipResult),
}

impl<'a> Reducer<'a> {
    fn new(gens: &'a [Rat], target: Rat) -> Self {
        let derived = gens
            .iter()
            .enumerate()
            .map(|(i, g)| Derived {
                value: g.clone(),
                combo: vec![(i, BigUint::one())],
            })
            .collect();
        Reducer {
            gens,
            derived,
            offset: vec![BigUint::zero(); gens.len()],
            query: target.clone(),
            target,
        }
    }

    fn certificate(&self, coefficients: &[BigUint]) -> Result<Certificate> {
        let mut total = self.offset.clone();
        for (d, c) in self.derived.iter().zip(coefficients) {
            if c.is_zero() {
                continue;
            }
            for (i, k) in &d.combo {
                total[*i] += c * k;
            }
        }
        Certificate::new(self.query.clone(), self.gens.iter().cloned().zip(total))
    }

    fn finish_zero(&self) -> Result<MembershipResult> {
        Ok(MembershipResult::member(
            self.certificate(&vec![BigUint::zero(); self.derived.len()])?,
        ))
    }

    /// Drops generators that are integer multiples of another one.
    fn drop_multiples(&mut self) -> bool {
        self.derived.sort_by(|a, b| a.value.cmp(&b.value));
        let mut keep: Vec<Derived> = Vec::with_capacity(self.derived.len());
        let mut changed = false;
        for d in self.derived.drain(..) {
            if keep
                .iter()
                .any(|k| d.value.integer_ratio(&k.value).is_some())
            {
                changed = true;
            } else {
                keep.push(d);
            }
        }
        self.derived = keep;
        changed
    }

    fn step(&mut self) -> Result<Step> {
        if self.target.is_zero() {
            return Ok(Step::Done(self.finish_zero()?));
        }
        if self.derived.is_empty() {
            return Ok(Step::Done(MembershipResult::non_member(
                Obstruction::EmptyPresentation,
            )));
        }
        let mut changed = self.drop_multiples();
        // Drop generators larger than the target; they can never be used.
        let before = self.derived.len();
        let target = self.target.clone();
        self.derived.retain(|d| d.value <= target);
        changed |= self.derived.len() != before;
        if self.derived.is_empty() {
            return Ok(Step::Done(MembershipResult::non_member(Obstruction::Exhausted {
                scaled_target: self.target.to_string(),
            })));
        }

        let mut primes: BTreeSet<u64> = prime_factors(self.target.denom())?.into_iter().collect();
        for d in &self.derived {
            primes.extend(prime_factors(d.value.denom())?);
        }
        for p in primes {
            let vals: Vec<i64> = self.derived.iter().map(|d| vp(&d.value, p)).collect();
            let floor = *vals.iter().min().expect("nonempty");
            let vt = vp(&self.target, p);
            if vt < floor.min(0) {
                let obstruction = if floor >= 0 {
                    Obstruction::Support { prime: p }
                } else {
                    Obstruction::Valuation {
                        prime: p,
                        element: vt,
                        floor,
                    }
                };
                return Ok(Step::Done(MembershipResult::non_member(obstruction)));
            }
            let negatives: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0).collect();
            if negatives.len() != 1 {
                continue;
            }
            // Only one generator carries p in its denominator: its coefficient
            // is forced modulo p^s.
            let i = negatives[0];
            let s = (-vals[i]) as u32;
            let modulus = num_traits::pow(BigInt::from(p), s as usize);
            let ratio = &self.target / &self.derived[i].value;
            let inv = ratio
                .denom()
                .extended_gcd(&modulus)
                .x
                .mod_floor(&modulus);
            let e = (ratio.numer() * inv).mod_floor(&modulus);
            if !e.is_zero() {
                let taken = self.derived[i].value.times_int(&e);
                if taken > self.target {
                    return Ok(Step::Done(MembershipResult::non_member(Obstruction::Residue {
                        prime: p,
                        residue: e.to_string(),
                    })));
                }
                self.target -= &taken;
                let e_u = to_biguint(&e);
                for (j, k) in &self.derived[i].combo {
                    self.offset[*j] += &e_u * k;
                }
            }
            let m_u = to_biguint(&modulus);
            let d = &mut self.derived[i];
            d.value = d.value.times_int(&modulus);
            for (_, k) in d.combo.iter_mut() {
                *k *= &m_u;
            }
            return Ok(Step::Changed);
        }
        Ok(if changed { Step::Changed } else { Step::Stable })
    }
}

/// Decides `q` in the monoid generated by `gens` (positive, any order).
pub fn member_in(gens: &[Rat], q: &Rat, limits: SearchLimits) -> Result<MembershipResult> {
    if q.is_negative() {
        return Ok(MembershipResult::non_member(Obstruction::Negative));
    }
    if q.is_zero() {
        return Ok(MembershipResult::member(Certificate::zero()));
    }
    if gens.is_empty() {
        return Ok(MembershipResult::non_member(Obstruction::EmptyPresentation));
    }
    let mut red = Reducer::new(gens, q.clone());
    loop {
        match red.step()? {
            Step::Changed => continue,
            Step::Done(r) => return Ok(r),
            Step::Stable => break,
        }
    }
    solve_scaled(&red, limits)
}

fn solve_scaled(red: &Reducer<'_>, limits: SearchLimits) -> Result<MembershipResult> {
    let values: Vec<&Rat> = red.derived.iter().map(|d| &d.value).collect();
    let lcm = Rat::lcm_denoms(values.iter().copied().chain([&red.target]));
    let mut weights: Vec<BigInt> = values
        .iter()
        .map(|v| v.times_int(&lcm).to_integer().expect("scaled by lcm"))
        .collect();
    let mut target = red.target.times_int(&lcm).to_integer().expect("scaled by lcm");
    let g = weights.iter().fold(BigInt::zero(), |acc, w| acc.gcd(w));
    if !(&target % &g).is_zero() {
        return Ok(MembershipResult::non_member(Obstruction::Lattice {
            gcd: g.to_string(),
        }));
    }
    for w in weights.iter_mut() {
        *w /= &g;
    }
    target /= &g;

    let min_w = weights.iter().min().expect("nonempty").clone();
    let dp_size = target.to_u64().filter(|&t| t <= limits.threshold);
    let apery_size = min_w.to_u64().filter(|&m| m <= limits.threshold);
    let small_weights: Option<Vec<u64>> = weights.iter().map(|w| w.to_u64()).collect();

    let coefficients = match (dp_size, apery_size, small_weights) {
        (Some(t), apery, Some(ws)) if apery.is_none_or(|m| t <= m.saturating_mul(64)) => {
            knapsack_lexmin(&ws, t)
        }
        (_, Some(_), Some(ws)) => apery_route(&ws, &target),
        _ => {
            return Ok(MembershipResult::Unknown {
                bound: limits.threshold,
                reason: format!(
                    "scaled target {target} and smallest scaled weight {min_w} both exceed the search threshold"
                ),
            })
        }
    };
    match coefficients {
        Some(cs) => Ok(MembershipResult::member(red.certificate(&cs)?)),
        None => Ok(MembershipResult::non_member(Obstruction::Exhausted {
            scaled_target: target.to_string(),
        })),
    }
}

struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len / 64 + 1],
        }
    }
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }
}

/// Unbounded knapsack with the lexicographically smallest coefficient vector
/// in the given generator order.
fn knapsack_lexmin(weights: &[u64], target: u64) -> Option<Vec<BigUint>> {
    let t = target as usize;
    let k = weights.len();
    // suffix[i]: targets reachable with generators i.. only
    let mut suffix: Vec<Bits> = Vec::with_capacity(k + 1);
    let mut base = Bits::new(t);
    base.set(0);
    suffix.push(base);
    for i in (0..k).rev() {
        let w = weights[i] as usize;
        let mut cur = Bits {
            words: suffix.last().unwrap().words.clone(),
        };
        for x in w..=t {
            if !cur.get(x) && cur.get(x - w) {
                cur.set(x);
            }
        }
        suffix.push(cur);
    }
    suffix.reverse();
    if !suffix[0].get(t) {
        return None;
    }
    let mut rest = t;
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let w = weights[i] as usize;
        let mut c = 0usize;
        while !suffix[i + 1].get(rest - c * w) {
            c += 1;
        }
        rest -= c * w;
        out.push(BigUint::from(c));
    }
    debug_assert_eq!(rest, 0);
    Some(out)
}

/// Shortest paths over residues modulo the smallest weight. The smallest
/// representable value in each residue class decides every target in it.
fn apery_route(weights: &[u64], target: &BigInt) -> Option<Vec<BigUint>> {
    let (i0, &m) = weights
        .iter()
        .enumerate()
        .min_by_key(|&(i, w)| (*w, i))
        .expect("nonempty");
    let m_us = m as usize;
    let mut dist: Vec<Option<u128>> = vec![None; m_us];
    let mut pred: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); m_us];
    dist[0] = Some(0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u128, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if dist[r] != Some(d) {
            continue;
        }
        for (j, &w) in weights.iter().enumerate() {
            if j == i0 {
                continue;
            }
            let nd = d + w as u128;
            let nr = (r + (w % m) as usize) % m_us;
            if dist[nr].is_none_or(|old| nd < old) {
                dist[nr] = Some(nd);
                pred[nr] = (r, j);
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    let residue = target.mod_floor(&BigInt::from(m)).to_usize().expect("below m");
    let floor = BigInt::from(dist[residue]?);
    if &floor > target {
        return None;
    }
    let mut counts = vec![0u64; weights.len()];
    let mut r = residue;
    while r != 0 {
        let (prev, j) = pred[r];
        counts[j] += 1;
        r = prev;
    }
    let mut out: Vec<BigUint> = counts.into_iter().map(BigUint::from).collect();
    let extra = ((target - floor) / BigInt::from(m)).to_biguint().expect("nonnegative");
    out[i0] += extra;
    Some(out)
}
