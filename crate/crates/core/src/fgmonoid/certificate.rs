use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratcore::Rat;

/// Explicit representation `element = sum coefficient * generator`.
///
/// Construction re-sums the terms and refuses a mismatch, so a value of this
/// type is always a valid proof of membership for the generators it names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    element: Rat,
    terms: BTreeMap<Rat, BigUint>,
}

impl Certificate {
    pub fn new(element: Rat, terms: impl IntoIterator<Item = (Rat, BigUint)>) -> Result<Self> {
        let mut merged: BTreeMap<Rat, BigUint> = BTreeMap::new();
        for (g, c) in terms {
            if c.is_zero() {
                continue;
            }
            if !g.is_positive() {
                return Err(Error::Internal(format!("certificate generator {g} is not positive")));
            }
            *merged.entry(g).or_default() += c;
        }
        let cert = Certificate {
            element,
            terms: merged,
        };
        if cert.sum() != cert.element {
            return Err(Error::Internal(format!(
                "certificate sums to {} instead of {}",
                cert.sum(),
                cert.element
            )));
        }
        Ok(cert)
    }

    /// Builds a certificate without re-summing. Only used to simulate a
    /// corrupted oracle; `verify` reports the mismatch.
    pub(crate) fn unverified(element: Rat, terms: impl IntoIterator<Item = (Rat, BigUint)>) -> Self {
        let mut merged: BTreeMap<Rat, BigUint> = BTreeMap::new();
        for (g, c) in terms {
            if !c.is_zero() {
                *merged.entry(g).or_default() += c;
            }
        }
        Certificate {
            element,
            terms: merged,
        }
    }

    pub fn zero() -> Self {
        Certificate {
            element: Rat::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn element(&self) -> &Rat {
        &self.element
    }

    pub fn terms(&self) -> &BTreeMap<Rat, BigUint> {
        &self.terms
    }

    pub fn coefficient(&self, g: &Rat) -> BigUint {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn sum(&self) -> Rat {
        self.terms
            .iter()
            .map(|(g, c)| g.scale(BigInt::from(c.clone())))
            .sum()
    }

    /// Re-sums the terms; true for every value built through [`Certificate::new`].
    pub fn verify(&self) -> bool {
        self.sum() == self.element
    }

    pub fn uses_only(&self, allowed: impl Fn(&Rat) -> bool) -> bool {
        self.terms.keys().all(allowed)
    }

    /// Certificate for `self.element + other.element`.
    pub fn combine(&self, other: &Certificate) -> Certificate {
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(g, c)| (g.clone(), c.clone()));
        Certificate::new(&self.element + &other.element, terms).expect("sums add")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{} = (empty sum)", self.element);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("{c}*({g})"))
            .collect();
        write!(f, "{} = {}", self.element, parts.join(" + "))
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    generator: &'a Rat,
    coefficient: String,
}

struct TermList<'a>(&'a BTreeMap<Rat, BigUint>);

impl Serialize for TermList<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (g, c) in self.0 {
            seq.serialize_element(&TermRecord {
                generator: g,
                coefficient: c.to_string(),
            })?;
        }
        seq.end()
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            element: &'a Rat,
            terms: TermList<'a>,
        }
        Repr {
            element: &self.element,
            terms: TermList(&self.terms),
        }
        .serialize(s)
    }
}

/// Why an element is not in a monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// The element is negative.
    Negative,
    /// Nonzero element, no generators.
    EmptyPresentation,
    /// A prime divides the denominator but no generator's denominator.
    Support { prime: u64 },
    /// `v_p` of the element is below every generator's `v_p`.
    Valuation { prime: u64, element: i64, floor: i64 },
    /// The residue forced modulo `prime` already overshoots the element.
    Residue { prime: u64, residue: String },
    /// The scaled target is not a multiple of the scaled generators' gcd.
    Lattice { gcd: String },
    /// Exhaustive search over the scaled integer problem found nothing.
    Exhausted { scaled_target: String },
    /// The remainder after removing forced atom multiples is outside the base.
    NotInBase { remainder: Rat },
    /// No admissible split into the atom, the coset and a dyadic part.
    NoSplit { tried: u64 },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Negative => write!(f, "negative"),
            Obstruction::EmptyPresentation => write!(f, "no generators"),
            Obstruction::Support { prime } => {
                write!(f, "prime {prime} divides the denominator but no generator's")
            }
            Obstruction::Valuation {
                prime,
                element,
                floor,
            } => write!(f, "v_{prime} is {element}, below the generator floor {floor}"),
            Obstruction::Residue { prime, residue } => {
                write!(f, "forced residue {residue} mod {prime} overshoots")
            }
            Obstruction::Lattice { gcd } => write!(f, "scaled target not a multiple of {gcd}"),
            Obstruction::Exhausted { scaled_target } => {
                write!(f, "no representation of scaled target {scaled_target}")
            }
            Obstruction::NotInBase { remainder } => {
                write!(f, "remainder {remainder} is not in the base monoid")
            }
            Obstruction::NoSplit { tried } => write!(f, "no admissible split among {tried} candidates"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MembershipResult {
    Member { certificate: Certificate },
    NonMember { obstruction: Obstruction },
    Unknown { bound: u64, reason: String },
}

impl MembershipResult {
    pub fn member(certificate: Certificate) -> Self {
        MembershipResult::Member { certificate }
    }

    pub fn non_member(obstruction: Obstruction) -> Self {
        MembershipResult::NonMember { obstruction }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, MembershipResult::Member { .. })
    }

    pub fn is_non_member(&self) -> bool {
        matches!(self, MembershipResult::NonMember { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, MembershipResult::Unknown { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            MembershipResult::Member { certificate } => Some(certificate),
            _ => None,
        }
    }

    /// `Some(true)` for Member, `Some(false)` for NonMember.
    pub fn decided(&self) -> Option<bool> {
        match self {
            MembershipResult::Member { .. } => Some(true),
            MembershipResult::NonMember { .. } => Some(false),
            MembershipResult::Unknown { .. } => None,
        }
    }
}

impl fmt::Display for MembershipResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipResult::Member { certificate } => write!(f, "Member: {certificate}"),
            MembershipResult::NonMember { obstruction } => write!(f, "NonMember: {obstruction}"),
            MembershipResult::Unknown { bound, reason } => {
                write!(f, "Unknown (bound {bound}): {reason}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_sum() {
        let bad = Certificate::new(Rat::frac(5, 6), [(Rat::frac(1, 2), BigUint::from(2u8))]);
        assert!(bad.is_err());
        let good = Certificate::new(
            Rat::frac(5, 6),
            [
                (Rat::frac(1, 2), BigUint::from(1u8)),
                (Rat::frac(1, 3), BigUint::from(1u8)),
            ],
        )
        .unwrap();
        assert!(good.verify());
        assert_eq!(good.to_string(), "5/6 = 1*(1/3) + 1*(1/2)");
    }

    #[test]
    fn zero_coefficients_dropped() {
        let c = Certificate::new(Rat::frac(1, 2), [
            (Rat::frac(1, 2), BigUint::from(1u8)),
            (Rat::frac(1, 3), BigUint::zero()),
        ])
        .unwrap();
        assert_eq!(c.terms().len(), 1);
    }
}
