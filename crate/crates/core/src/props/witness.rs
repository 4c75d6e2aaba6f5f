use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{AtomicShift, DivisorWitness, Factorization, FurstenbergRefutation, QuasiAtomicWitness, ShiftRefutation};
use crate::error::{Error, Result};
use crate::families::{residue_mod, Family, FamilySpec, Monoid};
use crate::ratcore::dyadic::dyadic_index_of;
use crate::ratcore::primes::ell2;
use crate::ratcore::valuation::{int_valuation, prime_factors, vp, InfValuation, SupportSet};
use crate::ratcore::Rat;

pub(crate) fn require_member(f: &Family, q: &Rat) -> Result<()> {
    if f.contains(q)? {
        Ok(())
    } else {
        Err(Error::NotAMember {
            element: q.to_string(),
            monoid: f.spec().to_string(),
        })
    }
}

fn require_nonzero_member(f: &Family, q: &Rat) -> Result<()> {
    if q.is_zero() {
        return Err(Error::arg("element must be nonzero"));
    }
    require_member(f, q)
}

pub(crate) fn is_dyadic(q: &Rat) -> bool {
    *q.denom() == BigInt::one() << int_valuation(q.denom(), 2)
}

pub(crate) fn two_exponent(q: &Rat) -> u32 {
    int_valuation(q.denom(), 2) as u32
}

/// `c = (n(a) d(b) - 1) b`, so that `b + c = n(b) d(a) a`.
pub fn quasi_atomic_witness(f: &Family, b: &Rat, a: &Rat) -> Result<QuasiAtomicWitness> {
    require_member(f, b)?;
    if f.certify_atom(a)?.is_none() {
        return Err(Error::arg(format!("{a} is not a claimed atom of {}", f.spec())));
    }
    if b.is_zero() {
        return Ok(QuasiAtomicWitness {
            b: b.clone(),
            c: Rat::zero(),
            a: a.clone(),
            k: BigInt::from(0),
        });
    }
    let c = b.times_int(&(a.numer() * b.denom() - 1));
    let k = b.numer() * a.denom();
    if b + &c != a.times_int(&k) {
        return Err(Error::Internal(format!("quasi-atomic identity failed for b = {b}, a = {a}")));
    }
    Ok(QuasiAtomicWitness {
        b: b.clone(),
        c,
        a: a.clone(),
        k,
    })
}

/// Starts from the quasi-atomic `c` for the first atom and removes copies
/// of the atom while it still divides `c`. Each step keeps `a | b + c`.
///
/// The `j` with `c - j a` a member form an initial segment of the
/// naturals, so the last one is found by galloping and bisection rather
/// than one step at a time; the result is the same.
pub fn quasi_furstenberg_witness(f: &Family, b: &Rat) -> Result<DivisorWitness> {
    require_nonzero_member(f, b)?;
    let a = f
        .atom(1)?
        .ok_or_else(|| Error::arg(format!("{} has no atoms", f.spec())))?
        .value;
    let start = quasi_atomic_witness(f, b, &a)?;
    let c0 = start.c;
    let fits = |j: &BigInt| -> Result<bool> { f.contains(&(&c0 - &a.times_int(j))) };
    // b + c = k a with b nonzero, so at most k - 1 copies come off
    let bound = start.k - 1;
    let (mut lo, mut hi) = (BigInt::from(0), BigInt::from(1));
    while hi <= bound && fits(&hi)? {
        lo = hi.clone();
        hi *= 2;
    }
    // lo fits; hi does not or exceeds the bound
    if hi > bound {
        hi = &bound + 1;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if fits(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = &c0 - &a.times_int(&lo);
    if f.divides_bool(&a, &c)? {
        return Err(Error::Internal(format!("reduction for {b} overran its bound")));
    }
    Ok(DivisorWitness { b: b.clone(), c, a })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FurstenbergVerdict {
    Proven { atom: Rat },
    Refuted { refutation: FurstenbergRefutation },
    UnknownAtDepth { depth: usize },
}

/// First atom in index order dividing `b`, among the atoms of `d(b)`, the
/// closed-form pick for the base part, and the first `depth` atoms.
pub fn furstenberg_witness(f: &Family, b: &Rat, depth: usize) -> Result<FurstenbergVerdict> {
    require_nonzero_member(f, b)?;
    for a in f.divisor_candidates(b, depth)? {
        if f.divides_bool(&a.value, b)? {
            return Ok(FurstenbergVerdict::Proven { atom: a.value });
        }
    }
    if let Some(n) = f.atom_count().filter(|&n| n <= depth.max(1)) {
        return Ok(FurstenbergVerdict::Refuted {
            refutation: FurstenbergRefutation {
                element: b.clone(),
                checked_atoms: n,
                floor: None,
                floor_attained: false,
            },
        });
    }
    if let Some((floor, attained)) = f.base_multiple_floor() {
        let in_base = f
            .normal_form(b)?
            .is_some_and(|nf| nf.coefficients.is_empty());
        if in_base && (b < &floor || (!attained && b == &floor)) {
            return Ok(FurstenbergVerdict::Refuted {
                refutation: FurstenbergRefutation {
                    element: b.clone(),
                    checked_atoms: depth,
                    floor: Some(floor),
                    floor_attained: attained,
                },
            });
        }
    }
    Ok(FurstenbergVerdict::UnknownAtDepth { depth })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AlmostFurstenbergOutcome {
    Witness { witness: DivisorWitness },
    /// The family has the single atom `atom`, which does not divide
    /// `element`; every atomic element is then a multiple of `atom`.
    Refuted { atom: Rat, element: Rat },
    UnknownAtDepth { depth: usize },
}

fn check_divisor_witness(f: &Family, w: &DivisorWitness) -> Result<bool> {
    Ok(f.divides_bool(&w.a, &(&w.b + &w.c))? && !f.divides_bool(&w.a, &w.c)?)
}

/// `c = 1 - 2^-n` and `a = a_{n+1}` for `b = x / 2^n`, `x` odd.
pub fn af_not_nf_almost_witness(f: &Family, b: &Rat) -> Result<DivisorWitness> {
    if !matches!(f.spec(), FamilySpec::AfNotNf { .. }) {
        return Err(Error::NotApplicable(format!("construction is for af-not-nf, not {}", f.spec())));
    }
    require_nonzero_member(f, b)?;
    if !is_dyadic(b) || b.is_integer() {
        return Err(Error::arg(format!("{b} is not of the form x/2^n with n >= 1")));
    }
    let n = two_exponent(b);
    let c = Rat::one() - Rat::inv_pow(2, n);
    let a = f
        .atom(n as usize + 1)?
        .ok_or_else(|| Error::Internal("af-not-nf stream ended".into()))?
        .value;
    let w = DivisorWitness { b: b.clone(), c, a };
    if !check_divisor_witness(f, &w)? || !f.is_atomic_element(&w.c)? {
        return Err(Error::Internal(format!("construction failed for {b}")));
    }
    Ok(w)
}

pub fn almost_furstenberg_witness(f: &Family, b: &Rat, depth: usize) -> Result<AlmostFurstenbergOutcome> {
    match furstenberg_witness(f, b, depth)? {
        FurstenbergVerdict::Proven { atom } => {
            return Ok(AlmostFurstenbergOutcome::Witness {
                witness: DivisorWitness {
                    b: b.clone(),
                    c: Rat::zero(),
                    a: atom,
                },
            })
        }
        FurstenbergVerdict::Refuted { .. } if f.atom_count() == Some(1) => {
            let atom = f.atom(1)?.expect("single atom").value;
            return Ok(AlmostFurstenbergOutcome::Refuted { atom, element: b.clone() });
        }
        _ => {}
    }
    let w = match f.spec() {
        FamilySpec::AfNotF { .. } if is_dyadic(b) => {
            // c = 2 = r_1 and the atom with r_j = b + 2
            let c = Rat::int(2);
            let j = dyadic_index_of(&(b + &c))?;
            let a = f
                .atom(j as usize)?
                .ok_or_else(|| Error::Internal("af-not-f stream ended".into()))?
                .value;
            DivisorWitness { b: b.clone(), c, a }
        }
        FamilySpec::AfNotNf { .. } if is_dyadic(b) => return Ok(AlmostFurstenbergOutcome::Witness {
            witness: af_not_nf_almost_witness(f, b)?,
        }),
        FamilySpec::NaNotF if is_dyadic(b) && b < &Rat::one() => {
            // c = 1 and the atom with r_n = 1 + b
            let c = Rat::one();
            let a = f
                .atom_below_base_part(&(b + &c))?
                .ok_or_else(|| Error::Internal(format!("no atom for 1 + {b}")))?
                .value;
            DivisorWitness { b: b.clone(), c, a }
        }
        _ => return Ok(AlmostFurstenbergOutcome::UnknownAtDepth { depth }),
    };
    if !check_divisor_witness(f, &w)? || !f.is_atomic_element(&w.c)? {
        return Err(Error::Internal(format!("almost-Furstenberg construction failed for {b}")));
    }
    Ok(AlmostFurstenbergOutcome::Witness { witness: w })
}

/// Outcome of testing one shift `c` against a sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearlyFurstenbergCheck {
    pub c: Rat,
    pub witnesses: Vec<DivisorWitness>,
    /// First sampled `b` for which no atom divides `b + c` without dividing `c`.
    pub counterexample: Option<Rat>,
}

impl NearlyFurstenbergCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub(crate) fn shift_divisor(f: &Family, b: &Rat, c: &Rat, depth: usize) -> Result<Option<DivisorWitness>> {
    let target = b + c;
    for a in f.divisor_candidates(&target, depth)? {
        if f.divides_bool(&a.value, &target)? && !f.divides_bool(&a.value, c)? {
            return Ok(Some(DivisorWitness {
                b: b.clone(),
                c: c.clone(),
                a: a.value,
            }));
        }
    }
    Ok(None)
}

/// Checks that every nonzero sampled `b` has an atom dividing `b + c` but
/// not `c`. Stops at the first failure.
pub fn nearly_furstenberg_verify(f: &Family, c: &Rat, sample: &[Rat], depth: usize) -> Result<NearlyFurstenbergCheck> {
    if !f.contains(c)? {
        return Err(Error::arg(format!("shift {c} is not in {}", f.spec())));
    }
    let mut witnesses = Vec::new();
    for b in sample {
        require_member(f, b)?;
        if b.is_zero() {
            continue;
        }
        match shift_divisor(f, b, c, depth)? {
            Some(w) => witnesses.push(w),
            None => {
                return Ok(NearlyFurstenbergCheck {
                    c: c.clone(),
                    witnesses,
                    counterexample: Some(b.clone()),
                })
            }
        }
    }
    Ok(NearlyFurstenbergCheck {
        c: c.clone(),
        witnesses,
        counterexample: None,
    })
}

/// For af-not-nf: `b = 2^-i` where no `1 - 2^-n` lies in
/// `(d_c, d_c + 2^-i]`. For pow-denom: a power of 1/3 keeping `b + c`
/// below 1 in the base, or any `b` when 1/2 already divides `c`.
///
/// Atoms up to `depth`, and at least every atom in the normal form of `c`,
/// are checked by the oracle; the returned `b` is rejected if any of them
/// divides `b + c` without dividing `c`. Past those the threshold argument
/// covers the tail.
pub fn nearly_furstenberg_refute(f: &Family, c: &Rat, depth: usize) -> Result<ShiftRefutation> {
    require_member(f, c)?;
    let nf = f
        .normal_form(c)?
        .ok_or_else(|| Error::Internal(format!("member {c} has no normal form")))?;
    let used = nf.coefficients.iter().map(|(a, _)| a.index).max().unwrap_or(0);
    let b = match f.spec() {
        FamilySpec::AfNotNf { .. } => {
            let d = nf.base_part;
            let i = if d >= Rat::one() {
                1
            } else {
                let mut m = 1u32;
                while Rat::one() - Rat::inv_pow(2, m) <= d {
                    m += 1;
                }
                let r_m = Rat::one() - Rat::inv_pow(2, m);
                let mut i = 1u32;
                while &d + &Rat::inv_pow(2, i) >= r_m {
                    i += 1;
                }
                i
            };
            Rat::inv_pow(2, i)
        }
        FamilySpec::PowDenom { p } => {
            let half = Rat::frac(1, 2);
            if f.divides_bool(&half, c)? {
                half
            } else {
                Rat::inv_pow(p, int_valuation(c.denom(), p) as u32 + 1)
            }
        }
        other => {
            return Err(Error::NotApplicable(format!(
                "no closed-form nearly-Furstenberg refutation for {other}"
            )))
        }
    };
    let checked = f.atom_count().map_or(depth.max(used), |n| n.min(depth));
    for a in f.tagged_atoms(checked)? {
        if f.divides_bool(&a.value, &(&b + c))? && !f.divides_bool(&a.value, c)? {
            return Err(Error::Internal(format!(
                "refuter's b = {b} for c = {c} is beaten by atom {}",
                a.value
            )));
        }
    }
    Ok(ShiftRefutation {
        c: c.clone(),
        b,
        checked_atoms: checked,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AlmostAtomicDecision {
    Proven { shift: AtomicShift },
    Refuted { element: Rat, prime: u64, valuation: i64 },
}

/// f-not-aa: atomic elements are `<1/r : r odd prime>`, whose members
/// have `v_2 >= 0` and `v_r >= -1`. Such a `b` becomes an integer after
/// adding `(r - e_r)/r` for each residue `e_r`; any other `b` keeps its
/// bad valuation after adding an atomic element.
pub fn almost_atomic_decide(f: &Family, b: &Rat) -> Result<AlmostAtomicDecision> {
    if f.spec() != FamilySpec::FNotAa {
        return Err(Error::NotApplicable(format!("decision is for f-not-aa, not {}", f.spec())));
    }
    require_member(f, b)?;
    let mut c = Rat::zero();
    for r in prime_factors(b.denom())? {
        let v = vp(b, r);
        if r == 2 || v < -1 {
            return Ok(AlmostAtomicDecision::Refuted {
                element: b.clone(),
                prime: r,
                valuation: v,
            });
        }
        let e = residue_mod(&b.scale(r), r);
        c = c + Rat::new(r - e, r)?;
    }
    let shift = AtomicShift { b: b.clone(), c };
    let sum = &shift.b + &shift.c;
    if !sum.is_integer() || !f.is_atomic_element(&shift.c)? || !f.is_atomic_element(&sum)? {
        return Err(Error::Internal(format!("almost-atomic construction failed for {b}")));
    }
    Ok(AlmostAtomicDecision::Proven { shift })
}

/// An atomic `c` with `b + c` atomic, by family rule: `c = 2` for
/// af-not-f, `c = 1` for na-not-f, a search over `<r_k, r_{k+1}>` for
/// af-not-nf, and the clearing construction for f-not-aa. `None` if the
/// rule finds nothing.
pub fn almost_atomic_shift(f: &Family, b: &Rat) -> Result<Option<AtomicShift>> {
    require_member(f, b)?;
    if f.is_atomic_element(b)? {
        return Ok(Some(AtomicShift { b: b.clone(), c: Rat::zero() }));
    }
    let fixed = |c: Rat| -> Result<Option<AtomicShift>> {
        let ok = f.is_atomic_element(&c)? && f.is_atomic_element(&(b + &c))?;
        Ok(ok.then(|| AtomicShift { b: b.clone(), c }))
    };
    match f.spec() {
        FamilySpec::AfNotF { .. } => fixed(Rat::int(2)),
        FamilySpec::NaNotF => fixed(Rat::one()),
        FamilySpec::FNotAa => Ok(match almost_atomic_decide(f, b)? {
            AlmostAtomicDecision::Proven { shift } => Some(shift),
            AlmostAtomicDecision::Refuted { .. } => None,
        }),
        FamilySpec::AfNotNf { .. } => {
            let d = f
                .normal_form(b)?
                .ok_or_else(|| Error::Internal(format!("member {b} has no normal form")))?
                .base_part;
            let k_max = two_exponent(&d) + 3;
            for k in 1..=k_max {
                let r = Rat::one() - Rat::inv_pow(2, k);
                let s = Rat::one() - Rat::inv_pow(2, k + 1);
                for u in 0..=8u32 {
                    for v in 0..=8u32 {
                        if u + v == 0 {
                            continue;
                        }
                        if let Some(w) = fixed(r.scale(u) + s.scale(v))? {
                            return Ok(Some(w));
                        }
                    }
                }
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

/// For each dyadic `b`, writes `1 + b` as an integer multiple of one atom.
pub fn nearly_atomic_verify(f: &Family, sample: &[Rat]) -> Result<Vec<Factorization>> {
    if f.spec() != FamilySpec::NaNotF {
        return Err(Error::NotApplicable(format!("construction is for na-not-f, not {}", f.spec())));
    }
    let mut out = Vec::new();
    for b in sample {
        if b.is_negative() || !is_dyadic(b) {
            return Err(Error::arg(format!("{b} is not a nonnegative dyadic")));
        }
        let element = Rat::one() + b;
        let fact = if let Some(m) = element.to_integer() {
            Factorization {
                element,
                multiplier: m * 3,
                atom: Rat::frac(1, 3),
            }
        } else {
            let a = element
                .numer()
                .to_u64()
                .ok_or_else(|| Error::arg(format!("{b} is too large")))?;
            let k = two_exponent(&element);
            let n = (a as usize - 1) / 2 + 1;
            let atom = f
                .atom(n)?
                .ok_or_else(|| Error::Internal("na-not-f stream ended".into()))?;
            let scale = BigInt::from(ell2(a)?) * atom.prime;
            let multiplier = scale >> k;
            Factorization {
                element,
                multiplier,
                atom: atom.value,
            }
        };
        if fact.atom.times_int(&fact.multiplier) != fact.element || f.certify_atom(&fact.atom)?.is_none() {
            return Err(Error::Internal(format!("factorization of 1 + {b} failed")));
        }
        out.push(fact);
    }
    Ok(out)
}

/// A member `b` with `b + c` not atomic, for atomic `c`. af-not-nf uses
/// `b = 2^-k` with `k` past the dyadic depth of `d_c`; pow-denom uses a
/// power of 1/3 that leaves the base part fractional.
pub fn nearly_atomic_refute(f: &Family, c: &Rat) -> Result<AtomicShift> {
    require_member(f, c)?;
    if !f.is_atomic_element(c)? {
        return Err(Error::arg(format!("{c} is not atomic")));
    }
    let candidates: Vec<Rat> = match f.spec() {
        FamilySpec::AfNotNf { .. } => {
            let d = f
                .normal_form(c)?
                .ok_or_else(|| Error::Internal(format!("member {c} has no normal form")))?
                .base_part;
            let m = d.scale(2u8).ceil().to_u32().unwrap_or(u32::MAX / 2);
            let start = two_exponent(&d) + m + 3;
            (start..start + 20).map(|k| Rat::inv_pow(2, k)).collect()
        }
        FamilySpec::PowDenom { p } => vec![Rat::inv_pow(p, int_valuation(c.denom(), p) as u32 + 1)],
        other => {
            return Err(Error::NotApplicable(format!(
                "no closed-form nearly-atomic refutation for {other}"
            )))
        }
    };
    for b in candidates {
        if !f.is_atomic_element(&(&b + c))? {
            return Ok(AtomicShift { b, c: c.clone() });
        }
    }
    Err(Error::Internal(format!("no non-atomic shift found for {c}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mismatch", rename_all = "snake_case")]
pub enum InvariantMismatch {
    InfValuation { prime: u64, left: InfValuation, right: InfValuation },
    Support { left: SupportSet, right: SupportSet },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NonIsomorphism {
    Proven { reason: InvariantMismatch },
    Inconclusive,
}

/// Isomorphic Puiseux monoids are rescalings of each other, which keeps
/// `inf v_p = -inf` and changes the prime support by finitely many primes.
pub fn nonisomorphism_witness(m1: &Monoid, m2: &Monoid) -> Result<NonIsomorphism> {
    let (f1, f2) = match (m1, m2) {
        (Monoid::Puiseux(a), Monoid::Puiseux(b)) => (a, b),
        _ => return Err(Error::arg("nonisomorphism needs two Puiseux monoids")),
    };
    let mut primes: BTreeSet<u64> = (2..=97).filter(|&p| crate::ratcore::is_prime(p)).collect();
    for spec in [f1.spec(), f2.spec()] {
        if let FamilySpec::PowDenom { p } | FamilySpec::NfNotAf { p } = spec {
            primes.insert(p);
        }
    }
    for p in primes {
        let (l, r) = (f1.inf_valuation(p)?, f2.inf_valuation(p)?);
        if l.is_neg_infinite() != r.is_neg_infinite() {
            return Ok(NonIsomorphism::Proven {
                reason: InvariantMismatch::InfValuation { prime: p, left: l, right: r },
            });
        }
    }
    let (l, r) = (f1.support_descriptor(), f2.support_descriptor());
    if l.symmetric_difference_is_finite(&r) == Some(false) {
        return Ok(NonIsomorphism::Proven {
            reason: InvariantMismatch::Support { left: l, right: r },
        });
    }
    Ok(NonIsomorphism::Inconclusive)
}
