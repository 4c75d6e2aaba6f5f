//! Closed-form pieces shared by the family oracles, plus the two bespoke
//! oracles for families whose primes are not private to single atoms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fgmonoid::{Certificate, MembershipResult, Obstruction};
use crate::ratcore::primes::{pow_mod, require_prime};
use crate::ratcore::valuation::{int_valuation, prime_factors, vp};
use crate::ratcore::Rat;

fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue below modulus")
}

/// `q mod p` for a rational with `v_p(q) >= 0`.
pub(crate) fn residue_mod(q: &Rat, p: u64) -> u64 {
    let n = mod_u64(q.numer(), p);
    let d = mod_u64(q.denom(), p);
    debug_assert!(d != 0, "residue_mod needs v_p >= 0");
    crate::ratcore::primes::mul_mod(n, pow_mod(d, p - 2, p), p)
}

/// The unique `e` in `[0, p)` with `v_p(q - e a) >= 0`, given `v_p(a) = -1`
/// and `v_p(q) >= -1`.
pub(crate) fn forced_residue(q: &Rat, a: &Rat, p: u64) -> u64 {
    let qp = residue_mod(&q.scale(p), p);
    let ap = residue_mod(&a.scale(p), p);
    crate::ratcore::primes::mul_mod(qp, pow_mod(ap, p - 2, p), p)
}

/// `k` with `n = p^k`, if `n` is a power of `p`.
pub(crate) fn power_exponent(n: &BigInt, p: u64) -> Option<u32> {
    let k = int_valuation(n, p);
    let k32 = u32::try_from(k).ok()?;
    (num_traits::pow(BigInt::from(p), k32 as usize) == *n).then_some(k32)
}

pub(crate) fn to_biguint(n: &BigInt) -> Result<BigUint> {
    n.to_biguint()
        .ok_or_else(|| Error::Internal(format!("negative coefficient {n}")))
}

/// Expansion of a nonnegative element of `N_0[1/p]` onto the generator
/// `1/p^max(k, first_exp)`.
pub(crate) fn cone_terms(q: &Rat, p: u64, first_exp: u32) -> Result<Vec<(Rat, BigUint)>> {
    if q.is_zero() {
        return Ok(Vec::new());
    }
    let k = power_exponent(q.denom(), p)
        .ok_or_else(|| Error::Internal(format!("{q} is not in N_0[1/{p}]")))?;
    let e = k.max(first_exp);
    let g = Rat::inv_pow(p, e);
    let coeff = q
        .integer_ratio(&g)
        .ok_or_else(|| Error::Internal(format!("{q} is not a multiple of {g}")))?;
    Ok(vec![(g, to_biguint(&coeff)?)])
}

fn is_dyadic(q: &Rat) -> bool {
    power_exponent(q.denom(), 2).is_some()
}

/// Membership in `<{1/p} ∪ N_0[1/2]• ∪ (1/2 - 1/p + N_0[1/2]•)>`.
///
/// Every element is `u/p + t/2 + F` where `t` counts coset generators,
/// `u + t` counts copies of `1/p`, and `F` is a dyadic that must be positive
/// once `t >= 1`. Raising `t` by `p` keeps the residue of `u` and lowers `F`,
/// so `t < p` suffices.
pub fn bespoke_member_nf_not_af(p: u64, q: &Rat) -> Result<MembershipResult> {
    nf_not_af_member(p, q, true)
}

pub(crate) fn nf_not_af_member(p: u64, q: &Rat, require_positive: bool) -> Result<MembershipResult> {
    require_prime(p)?;
    if p < 7 {
        return Err(Error::arg(format!("nf-not-af needs p >= 7, got {p}")));
    }
    if q.is_negative() {
        return Ok(MembershipResult::non_member(Obstruction::Negative));
    }
    if q.is_zero() {
        return Ok(MembershipResult::member(Certificate::zero()));
    }
    for r in prime_factors(q.denom())? {
        if r != 2 && r != p {
            return Ok(MembershipResult::non_member(Obstruction::Support { prime: r }));
        }
    }
    let v = vp(q, p);
    if v < -1 {
        return Ok(MembershipResult::non_member(Obstruction::Valuation {
            prime: p,
            element: v,
            floor: -1,
        }));
    }
    let u0 = residue_mod(&q.scale(p), p);
    let half_gap = Rat::frac(1, 2) - Rat::new(1, p)?;
    let t_max = (q / &half_gap).floor().to_u64().unwrap_or(u64::MAX).min(p - 1);
    for t in 0..=t_max {
        let u = (u0 + t) % p;
        // u is the residue class representative shifted by -t
        let u_signed = BigInt::from(u) - BigInt::from(t);
        let f = q - &Rat::new(u_signed.clone(), p)? - &Rat::frac(t as i64, 2);
        if f.is_negative() || (t >= 1 && f.is_zero() && require_positive) {
            continue;
        }
        debug_assert!(is_dyadic(&f));
        let mut terms = Vec::new();
        let copies = u_signed + BigInt::from(t);
        terms.push((Rat::new(1, p)?, to_biguint(&copies)?));
        let mut rest = f.clone();
        if t >= 1 {
            let tt = Rat::int(t);
            let mut step = Rat::one();
            if f.is_zero() {
                step = Rat::zero();
            } else {
                while &tt * &step > f {
                    step = step * Rat::frac(1, 2);
                }
            }
            terms.push((&half_gap + &step, BigUint::from(t)));
            rest = f - tt * step;
        }
        terms.extend(cone_terms(&rest, 2, 0)?);
        return Ok(MembershipResult::member(Certificate::new(q.clone(), terms)?));
    }
    Ok(MembershipResult::non_member(Obstruction::NoSplit { tried: t_max + 1 }))
}

/// Forced odd-prime residues and the integer left over, for elements of
/// `<1/r : r odd prime>`.
pub(crate) struct AtomicPart {
    pub residues: Vec<(u64, u64)>,
    pub integer: BigInt,
}

pub(crate) fn atomic_part(q: &Rat) -> Result<std::result::Result<AtomicPart, Obstruction>> {
    if q.is_negative() {
        return Ok(Err(Obstruction::Negative));
    }
    let mut residues = Vec::new();
    let mut rest = q.clone();
    for r in prime_factors(q.denom())? {
        let v = vp(q, r);
        if r == 2 {
            return Ok(Err(Obstruction::Valuation {
                prime: 2,
                element: v,
                floor: 0,
            }));
        }
        if v < -1 {
            return Ok(Err(Obstruction::Valuation {
                prime: r,
                element: v,
                floor: -1,
            }));
        }
        let e = residue_mod(&q.scale(r), r);
        residues.push((r, e));
        rest = rest - Rat::new(e, r)?;
    }
    match rest.to_integer() {
        Some(k) if !k.is_negative() => Ok(Ok(AtomicPart {
            residues,
            integer: k,
        })),
        _ => Ok(Err(Obstruction::NotInBase { remainder: rest })),
    }
}

fn atomic_part_certificate(q: &Rat, part: &AtomicPart) -> Result<Certificate> {
    let mut terms: Vec<(Rat, BigUint)> = part
        .residues
        .iter()
        .map(|&(r, e)| Ok((Rat::new(1, r)?, BigUint::from(e))))
        .collect::<Result<_>>()?;
    if !part.integer.is_zero() {
        terms.push((Rat::frac(1, 3), to_biguint(&(&part.integer * 3))?));
    }
    Certificate::new(q.clone(), terms)
}

/// Membership in `<1/r : r odd prime>`: `v_2(q) >= 0` and `q` minus its
/// forced residues is a nonnegative integer.
pub fn atomic_part_member(q: &Rat) -> Result<MembershipResult> {
    if q.is_zero() {
        return Ok(MembershipResult::member(Certificate::zero()));
    }
    Ok(match atomic_part(q)? {
        Ok(part) => MembershipResult::member(atomic_part_certificate(q, &part)?),
        Err(ob) => MembershipResult::non_member(ob),
    })
}

/// Membership in `<1/r : r odd prime> ∪ Q_{>=1}`. Below 1 no element of the
/// ray can take part, so the atomic part decides.
pub fn bespoke_member_f_not_aa(q: &Rat) -> Result<MembershipResult> {
    if q.is_negative() {
        return Ok(MembershipResult::non_member(Obstruction::Negative));
    }
    if q >= &Rat::one() {
        return Ok(MembershipResult::member(Certificate::new(
            q.clone(),
            [(q.clone(), BigUint::one())],
        )?));
    }
    atomic_part_member(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn residues() {
        assert_eq!(residue_mod(&r("3/4"), 5), 2);
        assert_eq!(forced_residue(&r("1/3"), &r("2/3"), 3), 2);
        assert_eq!(forced_residue(&r("1/2"), &r("2/3"), 3), 0);
        assert_eq!(power_exponent(&BigInt::from(81), 3), Some(4));
        assert_eq!(power_exponent(&BigInt::from(1), 3), Some(0));
        assert_eq!(power_exponent(&BigInt::from(12), 2), None);
    }

    #[test]
    fn nf_not_af_examples() {
        assert!(bespoke_member_nf_not_af(7, &r("5/14")).unwrap().is_non_member());
        let m = bespoke_member_nf_not_af(7, &r("9/14")).unwrap();
        assert!(m.certificate().unwrap().verify());
        assert!(bespoke_member_nf_not_af(7, &Rat::zero()).unwrap().is_member());
        assert!(bespoke_member_nf_not_af(7, &r("1/2")).unwrap().is_member());
        assert!(bespoke_member_nf_not_af(7, &r("1/5")).unwrap().is_non_member());
        assert!(bespoke_member_nf_not_af(7, &r("1/49")).unwrap().is_non_member());
        // one coset generator plus a dyadic
        let m = bespoke_member_nf_not_af(7, &r("17/28")).unwrap();
        let cert = m.certificate().unwrap();
        assert_eq!(cert.coefficient(&r("17/28")), BigUint::one());
        assert_eq!(cert.terms().len(), 1);
        assert!(nf_not_af_member(7, &r("5/14"), false).unwrap().is_member());
    }

    #[test]
    fn f_not_aa_examples() {
        assert!(bespoke_member_f_not_aa(&r("3/2")).unwrap().is_member());
        assert!(atomic_part_member(&r("3/2")).unwrap().is_non_member());
        let m = bespoke_member_f_not_aa(&r("8/15")).unwrap();
        let cert = m.certificate().unwrap();
        assert_eq!(cert.coefficient(&r("1/3")), BigUint::one());
        assert_eq!(cert.coefficient(&r("1/5")), BigUint::one());
        assert!(bespoke_member_f_not_aa(&r("1/2")).unwrap().is_non_member());
        assert!(bespoke_member_f_not_aa(&r("7/10")).unwrap().is_non_member());
        assert!(bespoke_member_f_not_aa(&r("1/9")).unwrap().is_non_member());
        let two = atomic_part_member(&r("7/3")).unwrap();
        assert_eq!(two.certificate().unwrap().coefficient(&r("1/3")), BigUint::from(7u8));
    }
}
