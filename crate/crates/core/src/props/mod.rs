//! Witnesses and refutations for the Furstenberg and atomicity hierarchy.
//!
//! [`classify`] computes one [`PropertyStatus`] per property; [`verify`]
//! re-checks the attached evidence through the family oracles without
//! reusing the code that produced it.

mod classify;
mod lex;
mod verify;
mod witness;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilySpec, Point};
use crate::ratcore::Rat;

pub use classify::{classify, classify_monoid, random_members, sample_members};
pub use lex::lexcone_statuses;
pub use verify::{verify, verify_status};
pub use witness::{
    af_not_nf_almost_witness, almost_atomic_decide, almost_atomic_shift, almost_furstenberg_witness,
    furstenberg_witness, nearly_atomic_refute, nearly_atomic_verify, nearly_furstenberg_refute,
    nearly_furstenberg_verify, nonisomorphism_witness, quasi_atomic_witness,
    quasi_furstenberg_witness, AlmostAtomicDecision, AlmostFurstenbergOutcome, FurstenbergVerdict,
    InvariantMismatch, NearlyFurstenbergCheck, NonIsomorphism,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Antimatter,
    Atomic,
    Furstenberg,
    NearlyFurstenberg,
    AlmostFurstenberg,
    QuasiFurstenberg,
    QuasiAtomic,
    AlmostAtomic,
    NearlyAtomic,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Antimatter,
        Property::Atomic,
        Property::Furstenberg,
        Property::NearlyFurstenberg,
        Property::AlmostFurstenberg,
        Property::QuasiFurstenberg,
        Property::QuasiAtomic,
        Property::AlmostAtomic,
        Property::NearlyAtomic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Antimatter => "antimatter",
            Property::Atomic => "atomic",
            Property::Furstenberg => "furstenberg",
            Property::NearlyFurstenberg => "nearly-furstenberg",
            Property::AlmostFurstenberg => "almost-furstenberg",
            Property::QuasiFurstenberg => "quasi-furstenberg",
            Property::QuasiAtomic => "quasi-atomic",
            Property::AlmostAtomic => "almost-atomic",
            Property::NearlyAtomic => "nearly-atomic",
        }
    }

    /// Direct implications between the properties.
    pub const IMPLICATIONS: [(Property, Property); 8] = [
        (Property::Atomic, Property::Furstenberg),
        (Property::Furstenberg, Property::NearlyFurstenberg),
        (Property::Furstenberg, Property::AlmostFurstenberg),
        (Property::NearlyFurstenberg, Property::QuasiFurstenberg),
        (Property::AlmostFurstenberg, Property::QuasiFurstenberg),
        (Property::Atomic, Property::NearlyAtomic),
        (Property::NearlyAtomic, Property::AlmostAtomic),
        (Property::AlmostAtomic, Property::QuasiAtomic),
    ];

    /// Whether `self` implies `other` through a chain of direct implications.
    pub fn implies(self, other: Property) -> bool {
        let mut queue = VecDeque::from([self]);
        let mut seen = vec![self];
        while let Some(p) = queue.pop_front() {
            if p == other {
                return true;
            }
            for &(from, to) in &Self::IMPLICATIONS {
                if from == p && !seen.contains(&to) {
                    seen.push(to);
                    queue.push_back(to);
                }
            }
        }
        false
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let short = match t.as_str() {
            "f" | "fm" => "furstenberg",
            "nf" | "nearly-f" => "nearly-furstenberg",
            "af" | "almost-f" => "almost-furstenberg",
            "qf" | "quasi-f" => "quasi-furstenberg",
            other => other,
        };
        Property::ALL
            .into_iter()
            .find(|p| p.name() == short)
            .ok_or_else(|| Error::arg(format!("unknown property {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Holds for every element, by a closed-form argument checked on a sample.
    Proven,
    /// Holds on every sampled element; no closed form covers the rest.
    ProvenOnSample,
    Refuted,
    UnknownAtDepth,
}

impl Verdict {
    pub fn holds(&self) -> Option<bool> {
        match self {
            Verdict::Proven | Verdict::ProvenOnSample => Some(true),
            Verdict::Refuted => Some(false),
            Verdict::UnknownAtDepth => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proven => "proven",
            Verdict::ProvenOnSample => "proven-on-sample",
            Verdict::Refuted => "refuted",
            Verdict::UnknownAtDepth => "unknown-at-depth",
        })
    }
}

fn decimal<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// `a | b + c` and `a ∤ c`, with `a` an atom. `c = 0` makes this a plain
/// atom divisor of `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorWitness {
    pub b: Rat,
    pub c: Rat,
    pub a: Rat,
}

/// `b + c = k a` with `c` a member and `a` an atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiAtomicWitness {
    pub b: Rat,
    pub c: Rat,
    pub a: Rat,
    #[serde(serialize_with = "decimal")]
    pub k: BigInt,
}

/// A member no atom divides. Atoms up to `checked_atoms` were tested by
/// the oracle; when the family has more, `floor` is `inf r_n` and the
/// element lies in the base below it (or at it, if not attained).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FurstenbergRefutation {
    pub element: Rat,
    pub checked_atoms: usize,
    pub floor: Option<Rat>,
    pub floor_attained: bool,
}

/// A nonzero `b` such that no atom divides `b + c` without dividing `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftRefutation {
    pub c: Rat,
    pub b: Rat,
    pub checked_atoms: usize,
}

/// A pair `(b, c)`: in an atomic shift `c` and `b + c` are atomic; in a
/// refutation `c` is atomic and `b + c` is not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomicShift {
    pub b: Rat,
    pub c: Rat,
}

/// `element = multiplier * atom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub element: Rat,
    #[serde(serialize_with = "decimal")]
    pub multiplier: BigInt,
    pub atom: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// An atom with its private prime.
    Atom { atom: Rat, prime: u64 },
    NonAtomicElement { element: Rat },
    /// Every defining generator is a multiple of an atom.
    AtomicGenerators { factorizations: Vec<Factorization> },
    Divisors { witnesses: Vec<DivisorWitness> },
    NonFurstenberg { refutation: FurstenbergRefutation },
    /// The only atom, and a member it does not divide.
    SingleAtom { atom: Rat, element: Rat },
    UniformShift { c: Rat, witnesses: Vec<DivisorWitness> },
    NoUniformShift { refutations: Vec<ShiftRefutation> },
    QuasiAtomic { witnesses: Vec<QuasiAtomicWitness> },
    AtomicShifts { shifts: Vec<AtomicShift> },
    UniformAtomicShift { c: Rat, shifts: Vec<AtomicShift> },
    /// Atomic elements have `v_2 >= 0` and `v_r >= -1`; `element` breaks
    /// that, and adding an atomic element cannot repair it.
    ValuationObstruction { element: Rat, prime: u64, valuation: i64 },
    NoUniformAtomicShift { refutations: Vec<AtomicShift> },
    LexAtom { atom: Point },
    LexNonAtomic { element: Point },
    LexDivisors { atom: Point, radius: i64, checked: usize },
    LexNoAtomicShift { element: Point, radius: i64, checked: usize },
    Implied { from: Property },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyStatus {
    pub monoid: String,
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Evidence>,
    /// Number of sampled elements the verdict was checked on.
    pub sample: Option<usize>,
    pub depth: usize,
}

/// Expected truth values, in [`Property::ALL`] order.
pub fn expected_table(spec: FamilySpec) -> [bool; 9] {
    const T: bool = true;
    const F: bool = false;
    match spec {
        FamilySpec::PowDenom { .. } => [F, F, F, F, F, T, T, F, F],
        FamilySpec::AfNotF { .. } => [F, F, F, T, T, T, T, T, T],
        FamilySpec::NfNotAf { .. } => [F, F, F, T, F, T, T, F, F],
        FamilySpec::AfNotNf { .. } => [F, F, F, F, T, T, T, T, F],
        FamilySpec::FNotAa => [F, F, T, T, T, T, T, F, F],
        FamilySpec::NaNotF => [F, F, F, T, T, T, T, T, T],
        FamilySpec::Grams => [F, T, T, T, T, T, T, T, T],
        FamilySpec::LexCone => [F, F, T, T, T, T, F, F, F],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImplicationViolation {
    pub upstream: Property,
    pub downstream: Property,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub monoid: String,
    pub depth: usize,
    pub statuses: Vec<PropertyStatus>,
    pub implication_violations: Vec<ImplicationViolation>,
    pub table_mismatches: Vec<Property>,
    pub verification_failures: Vec<(Property, String)>,
}

impl AuditReport {
    pub fn is_consistent(&self) -> bool {
        self.implication_violations.is_empty()
            && self.table_mismatches.is_empty()
            && self.verification_failures.is_empty()
    }

    pub fn status(&self, p: Property) -> Option<&PropertyStatus> {
        self.statuses.iter().find(|s| s.property == p)
    }
}

/// Classifies the monoid, re-verifies every verdict, and checks the
/// implications and the expected table.
pub fn diagram_audit(m: &crate::families::Monoid, depth: usize) -> Result<AuditReport> {
    let statuses = classify_monoid(m, depth)?;
    let mut implication_violations = Vec::new();
    for up in &statuses {
        for down in &statuses {
            if up.property != down.property
                && up.property.implies(down.property)
                && up.verdict.holds() == Some(true)
                && down.verdict.holds() == Some(false)
            {
                implication_violations.push(ImplicationViolation {
                    upstream: up.property,
                    downstream: down.property,
                });
            }
        }
    }
    let expected = expected_table(m.spec());
    let table_mismatches = statuses
        .iter()
        .zip(expected)
        .filter(|(s, e)| s.verdict.holds() != Some(*e))
        .map(|(s, _)| s.property)
        .collect();
    let mut verification_failures = Vec::new();
    for s in &statuses {
        if let Err(why) = verify_status(m, s, &statuses)? {
            verification_failures.push((s.property, why));
        }
    }
    Ok(AuditReport {
        monoid: m.spec().to_string(),
        depth,
        statuses,
        implication_violations,
        table_mismatches,
        verification_failures,
    })
}

#[cfg(test)]
mod tests;
