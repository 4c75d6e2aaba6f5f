//! Finitely generated Puiseux monoids.

mod certificate;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use certificate::{Certificate, MembershipResult, Obstruction};
pub use search::{member_in, SearchLimits, DEFAULT_THRESHOLD};

use crate::error::{Error, Result};
use crate::ratcore::valuation::{prime_factors, vp, InfValuation};
use crate::ratcore::Rat;

/// Sorted, duplicate-free list of positive generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FgPresentation {
    gens: Vec<Rat>,
}

impl FgPresentation {
    pub fn new(gens: impl IntoIterator<Item = Rat>) -> Result<Self> {
        let set: BTreeSet<Rat> = gens.into_iter().collect();
        if let Some(bad) = set.iter().find(|g| !g.is_positive()) {
            return Err(Error::arg(format!("generator {bad} is not positive")));
        }
        Ok(FgPresentation {
            gens: set.into_iter().collect(),
        })
    }

    pub fn generators(&self) -> &[Rat] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains_generator(&self, g: &Rat) -> bool {
        self.gens.binary_search(g).is_ok()
    }

    pub fn without(&self, g: &Rat) -> FgPresentation {
        FgPresentation {
            gens: self.gens.iter().filter(|x| *x != g).cloned().collect(),
        }
    }

    /// Parses `fg:1/2,1/3`. Error positions count bytes from the start of
    /// `text`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_at(text, 0)
    }

    pub fn parse_at(text: &str, offset: usize) -> Result<Self> {
        let body = text
            .strip_prefix("fg:")
            .ok_or_else(|| Error::parse(offset, "expected prefix \"fg:\""))?;
        let mut pos = offset + 3;
        let mut gens = Vec::new();
        if !body.trim().is_empty() {
            for piece in body.split(',') {
                let q = Rat::parse_at(piece, pos)?;
                if !q.is_positive() {
                    return Err(Error::parse(pos, format!("generator {q} is not positive")));
                }
                gens.push(q);
                pos += piece.len() + 1;
            }
        }
        FgPresentation::new(gens)
    }

    /// `q * M` for `q > 0`.
    pub fn scale(&self, q: &Rat) -> Result<FgPresentation> {
        if !q.is_positive() {
            return Err(Error::arg("scale factor must be positive"));
        }
        FgPresentation::new(self.gens.iter().map(|g| g * q))
    }

    /// Primes dividing the denominator of some element.
    pub fn prime_support(&self) -> Result<BTreeSet<u64>> {
        let mut out = BTreeSet::new();
        for g in &self.gens {
            out.extend(prime_factors(g.denom())?);
        }
        Ok(out)
    }

    /// `inf v_p` over the nonzero elements; attained at a generator since
    /// `v_p` of a sum is at least the minimum. `None` for the trivial monoid.
    pub fn inf_valuation(&self, p: u64) -> Result<Option<InfValuation>> {
        crate::ratcore::primes::require_prime(p)?;
        Ok(self
            .gens
            .iter()
            .map(|g| vp(g, p))
            .min()
            .map(InfValuation::Finite))
    }
}

impl fmt::Display for FgPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(Rat::to_string).collect();
        write!(f, "fg:{}", parts.join(","))
    }
}

impl FromStr for FgPresentation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FgPresentation::parse(s)
    }
}

pub fn member_fg(p: &FgPresentation, q: &Rat) -> Result<MembershipResult> {
    member_in(&p.gens, q, SearchLimits::default())
}

pub fn member_fg_with(p: &FgPresentation, q: &Rat, limits: SearchLimits) -> Result<MembershipResult> {
    member_in(&p.gens, q, limits)
}

fn decided(r: &MembershipResult, what: &str) -> Result<bool> {
    r.decided()
        .ok_or_else(|| Error::NotApplicable(format!("search bound exceeded while deciding {what}")))
}

/// Minimal generating set: generators not in the monoid of the others.
pub fn atoms_fg(p: &FgPresentation) -> Result<Vec<Rat>> {
    let mut atoms = Vec::new();
    for g in &p.gens {
        let rest = p.without(g);
        if !decided(&member_fg(&rest, g)?, &format!("generator {g}"))? {
            atoms.push(g.clone());
        }
    }
    Ok(atoms)
}

/// Whether `b - a` lies in the monoid; `a` and `b` must be members.
pub fn divides_fg(p: &FgPresentation, a: &Rat, b: &Rat) -> Result<MembershipResult> {
    for x in [a, b] {
        if !decided(&member_fg(p, x)?, &x.to_string())? {
            return Err(Error::NotAMember {
                element: x.to_string(),
                monoid: p.to_string(),
            });
        }
    }
    member_fg(p, &(b - a))
}

/// `Some(a)` when every generator is an integer multiple of the smallest one
/// `a`, so the monoid is `N_0 a`.
pub fn is_cyclic_check(p: &FgPresentation) -> Result<Option<Rat>> {
    let first = p
        .gens
        .first()
        .ok_or_else(|| Error::arg("cyclicity check needs a generator"))?;
    Ok(p.gens
        .iter()
        .all(|g| g.integer_ratio(first).is_some())
        .then(|| first.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn fg(text: &str) -> FgPresentation {
        text.parse().unwrap()
    }

    fn q(text: &str) -> Rat {
        text.parse().unwrap()
    }

    /// Enumerates all combinations with coefficients bounded by q / g.
    fn naive_member(gens: &[Rat], target: &Rat) -> bool {
        fn go(gens: &[Rat], target: &Rat) -> bool {
            if target.is_zero() {
                return true;
            }
            let Some((g, rest)) = gens.split_first() else {
                return false;
            };
            let mut left = target.clone();
            loop {
                if go(rest, &left) {
                    return true;
                }
                left -= g;
                if left.is_negative() {
                    return false;
                }
            }
        }
        !target.is_negative() && go(gens, target)
    }

    #[test]
    fn membership_examples() {
        let m = fg("fg:1/2,1/3");
        let r = member_fg(&m, &q("5/6")).unwrap();
        let cert = r.certificate().unwrap();
        assert_eq!(cert.coefficient(&q("1/2")), BigUint::from(1u8));
        assert_eq!(cert.coefficient(&q("1/3")), BigUint::from(1u8));
        assert!(member_fg(&fg("fg:1/2"), &q("1/3")).unwrap().is_non_member());
        assert!(member_fg(&m, &q("7/12")).unwrap().is_non_member());
        assert!(matches!(
            member_fg(&m, &q("-1/2")).unwrap(),
            MembershipResult::NonMember { obstruction: Obstruction::Negative }
        ));
        assert!(member_fg(&fg("fg:"), &q("1")).unwrap().is_non_member());
        assert!(member_fg(&fg("fg:"), &q("0")).unwrap().is_member());
    }

    #[test]
    fn atoms_examples() {
        assert_eq!(atoms_fg(&fg("fg:1/2,1/3,5/6")).unwrap(), vec![q("1/3"), q("1/2")]);
        assert_eq!(atoms_fg(&fg("fg:1/2,1/3,1/9")).unwrap(), vec![q("1/9"), q("1/2")]);
        assert_eq!(atoms_fg(&fg("fg:2,3")).unwrap(), vec![q("2"), q("3")]);
    }

    #[test]
    fn divides_examples() {
        assert!(divides_fg(&fg("fg:1/2,1/3"), &q("1/2"), &q("5/6")).unwrap().is_member());
        assert!(divides_fg(&fg("fg:2,3"), &q("2"), &q("3")).unwrap().is_non_member());
        assert!(divides_fg(&fg("fg:1/2"), &q("1/2"), &q("3/2")).unwrap().is_member());
        assert!(matches!(
            divides_fg(&fg("fg:1/2"), &q("1/3"), &q("1")),
            Err(Error::NotAMember { .. })
        ));
    }

    #[test]
    fn cyclic_examples() {
        assert_eq!(is_cyclic_check(&fg("fg:1/2,3/2,5")).unwrap(), Some(q("1/2")));
        assert_eq!(is_cyclic_check(&fg("fg:2,3")).unwrap(), None);
        assert_eq!(is_cyclic_check(&fg("fg:1/3")).unwrap(), Some(q("1/3")));
    }

    #[test]
    fn parse_print_roundtrip() {
        let m = fg("fg:1/3, 2/4,1/3");
        assert_eq!(m.to_string(), "fg:1/3,1/2");
        assert_eq!(fg(&m.to_string()), m);
        match FgPresentation::parse("fg:1/2,x") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 7),
            other => panic!("{other:?}"),
        }
        assert!(FgPresentation::parse("fg:1/2,0").is_err());
        assert!(FgPresentation::parse("1/2").is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (1i64..12, prop::sample::select(vec![1i64, 2, 3, 4, 5, 6, 8, 9, 10, 12]))
            .prop_map(|(a, b)| Rat::frac(a, b))
    }

    fn presentation() -> impl Strategy<Value = FgPresentation> {
        prop::collection::vec(small_rat(), 1..5).prop_map(|v| FgPresentation::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn agrees_with_naive_enumeration(p in presentation(), t in 0i64..40, d in prop::sample::select(vec![1i64, 2, 3, 4, 6, 12, 5, 7])) {
            let target = Rat::frac(t, d);
            let r = member_fg(&p, &target).unwrap();
            prop_assert_eq!(r.decided(), Some(naive_member(p.generators(), &target)));
            if let Some(c) = r.certificate() {
                prop_assert!(c.verify());
                prop_assert_eq!(c.element(), &target);
                prop_assert!(c.uses_only(|g| p.contains_generator(g)));
            }
        }

        #[test]
        fn closed_under_addition(p in presentation(), xs in prop::collection::vec(0u32..4, 1..5), ys in prop::collection::vec(0u32..4, 1..5)) {
            let pick = |cs: &[u32]| -> Rat {
                p.generators().iter().zip(cs).map(|(g, &c)| g.scale(c)).sum()
            };
            let (x, y) = (pick(&xs), pick(&ys));
            prop_assert!(member_fg(&p, &x).unwrap().is_member());
            prop_assert!(member_fg(&p, &y).unwrap().is_member());
            prop_assert!(member_fg(&p, &(&x + &y)).unwrap().is_member());
        }

        #[test]
        fn atoms_are_minimal_and_generate(p in presentation()) {
            let atoms = atoms_fg(&p).unwrap();
            for a in &atoms {
                prop_assert!(member_fg(&p.without(a), a).unwrap().is_non_member());
            }
            let atom_monoid = FgPresentation::new(atoms.clone()).unwrap();
            for g in p.generators() {
                let r = member_fg(&atom_monoid, g).unwrap();
                prop_assert!(r.is_member(), "{} not generated by atoms", g);
                if !atoms.contains(g) {
                    prop_assert!(member_fg(&p.without(g), g).unwrap().is_member());
                }
            }
        }

        #[test]
        fn divides_matches_difference(p in presentation(), xs in prop::collection::vec(0u32..3, 1..5), ys in prop::collection::vec(0u32..3, 1..5)) {
            let pick = |cs: &[u32]| -> Rat {
                p.generators().iter().zip(cs).map(|(g, &c)| g.scale(c)).sum()
            };
            let (a, b) = (pick(&xs), pick(&ys));
            let d = divides_fg(&p, &a, &b).unwrap().is_member();
            let direct = b >= a && member_fg(&p, &(&b - &a)).unwrap().is_member();
            prop_assert_eq!(d, direct);
        }
    }
}
