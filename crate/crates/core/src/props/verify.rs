//! Re-checks evidence from scratch through the family oracles. Nothing here
//! calls the witness constructors.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;

use super::lex::grid;
use super::{Evidence, Property, PropertyStatus, Verdict};
use crate::error::Result;
use crate::families::{AtomCheck, Family, FamilySpec, LexCone, Monoid};
use crate::ratcore::valuation::{int_valuation, vp};
use crate::ratcore::Rat;

/// `Err(reason)` when the evidence does not support the verdict.
pub type Outcome = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Ok(Err(format!($($msg)*)));
        }
    };
}

/// Verifies every status of a report.
pub fn verify(m: &Monoid, statuses: &[PropertyStatus]) -> Result<Vec<(Property, Outcome)>> {
    statuses
        .iter()
        .map(|s| Ok((s.property, verify_status(m, s, statuses)?)))
        .collect()
}

/// Checks one status. `report` supplies the statuses that `Implied`
/// evidence points to.
pub fn verify_status(m: &Monoid, s: &PropertyStatus, report: &[PropertyStatus]) -> Result<Outcome> {
    if s.verdict == Verdict::UnknownAtDepth {
        return Ok(Ok(()));
    }
    let Some(ev) = &s.witness else {
        return Ok(Err("verdict carries no evidence".into()));
    };
    if let Evidence::Implied { from } = ev {
        return Ok(check_implied(s, *from, report));
    }
    match m {
        Monoid::Puiseux(f) => Checker::new(f).check(s, ev),
        Monoid::LexCone(_) => Ok(check_lex(s, ev)),
    }
}

fn check_implied(s: &PropertyStatus, from: Property, report: &[PropertyStatus]) -> Outcome {
    let Some(src) = report.iter().find(|r| r.property == from) else {
        return Err(format!("no status for {from}"));
    };
    if matches!(src.witness, Some(Evidence::Implied { .. })) && src.property.implies(s.property) && s.property.implies(src.property) {
        return Err("circular implication".into());
    }
    match s.verdict.holds() {
        Some(true) if src.verdict.holds() == Some(true) && from.implies(s.property) => {
            // an implied verdict is no stronger than its source
            if s.verdict == Verdict::Proven && src.verdict != Verdict::Proven {
                return Err(format!("{from} is only {}", src.verdict));
            }
            Ok(())
        }
        Some(false) if src.verdict.holds() == Some(false) && s.property.implies(from) => Ok(()),
        _ => Err(format!("{} does not follow from {from} = {}", s.property, src.verdict)),
    }
}

fn check_lex(s: &PropertyStatus, ev: &Evidence) -> Outcome {
    let m = LexCone;
    let want = |p: Property, v: Verdict| {
        if s.property == p && s.verdict == v {
            Ok(())
        } else {
            Err(format!("{ev:?} does not support {} = {}", s.property, s.verdict))
        }
    };
    match ev {
        Evidence::LexAtom { atom } => {
            want(Property::Antimatter, Verdict::Refuted)?;
            // (x, y) = u + v with both nonzero members forces y_u = y_v = 0
            // and then x_u, x_v >= 1
            if !(m.contains(*atom) && atom.y == 0 && atom.x == 1) {
                return Err(format!("{atom} is not the atom (1, 0)"));
            }
            Ok(())
        }
        Evidence::LexNonAtomic { element } => {
            want(Property::Atomic, Verdict::Refuted)?;
            if m.contains(*element) && element.y >= 1 {
                Ok(())
            } else {
                Err(format!("{element} is a multiple of (1, 0) or not a member"))
            }
        }
        Evidence::LexDivisors { atom, radius, checked } => {
            want(Property::Furstenberg, Verdict::Proven)?;
            let mut count = 0;
            for p in grid(*radius).filter(|p| m.contains(*p) && !p.is_zero()) {
                count += 1;
                let diff = p.checked_sub(atom).ok_or("overflow")?;
                if !m.contains(diff) {
                    return Err(format!("{atom} does not divide {p}"));
                }
            }
            if count != *checked {
                return Err(format!("grid has {count} nonzero members, evidence says {checked}"));
            }
            Ok(())
        }
        Evidence::LexNoAtomicShift { element, radius, checked } => {
            want(Property::QuasiAtomic, Verdict::Refuted)?;
            let mut count = 0;
            for c in grid(*radius).filter(|p| m.contains(*p)) {
                count += 1;
                let sum = element.checked_add(&c).ok_or("overflow")?;
                if sum.y == 0 {
                    return Err(format!("{element} + {c} lies on the atom ray"));
                }
            }
            if count != *checked || element.y < 1 {
                return Err("grid count or probe mismatch".into());
            }
            Ok(())
        }
        other => Err(format!("{other:?} is not lexcone evidence")),
    }
}

struct Checker<'a> {
    f: &'a Family,
    atoms: RefCell<HashMap<Rat, bool>>,
}

impl<'a> Checker<'a> {
    fn new(f: &'a Family) -> Self {
        Checker {
            f,
            atoms: RefCell::new(HashMap::new()),
        }
    }

    /// Member, defining generator, privately owned prime, and no split in
    /// a shallow truncation.
    fn atom_ok(&self, a: &Rat) -> Result<bool> {
        if let Some(&ok) = self.atoms.borrow().get(a) {
            return Ok(ok);
        }
        let f = self.f;
        let ok = f.contains(a)?
            && f.is_defining_generator(a)?
            && f.certify_atom(a)?.is_some_and(|p| vp(a, p) < 0)
            && match f.decompose_in_truncation(a, 6) {
                Ok(AtomCheck::NotAtom { .. }) => false,
                _ => true,
            };
        self.atoms.borrow_mut().insert(a.clone(), ok);
        Ok(ok)
    }

    fn member_nonzero(&self, b: &Rat) -> Result<bool> {
        Ok(!b.is_zero() && self.f.contains(b)?)
    }

    fn divides(&self, a: &Rat, b: &Rat) -> Result<bool> {
        Ok(self.f.contains(b)? && self.f.contains(&(b - a))?)
    }

    fn atomic(&self, x: &Rat) -> Result<bool> {
        Ok(self.f.contains(x)? && self.f.is_atomic_element(x)?)
    }

    fn check(&self, s: &PropertyStatus, ev: &Evidence) -> Result<Outcome> {
        let f = self.f;
        let is = |p: Property, v: &[Verdict]| s.property == p && v.contains(&s.verdict);
        let holds = [Verdict::Proven, Verdict::ProvenOnSample];
        let spec = f.spec();
        match ev {
            Evidence::Atom { atom, prime } => {
                ensure!(is(Property::Antimatter, &[Verdict::Refuted]), "atom evidence refutes antimatter only");
                ensure!(vp(atom, *prime) < 0, "{prime} is not in the denominator of {atom}");
                ensure!(self.atom_ok(atom)?, "{atom} is not an atom");
            }
            Evidence::NonAtomicElement { element } => {
                ensure!(is(Property::Atomic, &[Verdict::Refuted]), "wrong property");
                ensure!(self.member_nonzero(element)?, "{element} is not a nonzero member");
                ensure!(!f.is_atomic_element(element)?, "{element} is atomic");
            }
            Evidence::AtomicGenerators { factorizations } => {
                ensure!(is(Property::Atomic, &[Verdict::Proven]), "wrong property");
                ensure!(spec == FamilySpec::Grams, "closed form applies to grams only");
                let gens = f.base().generators(factorizations.len());
                for (g, fac) in gens.iter().zip(factorizations) {
                    ensure!(*g == fac.element, "factorization list skips {g}");
                    ensure!(fac.multiplier.is_positive(), "nonpositive multiplier");
                    ensure!(fac.atom.times_int(&fac.multiplier) == fac.element, "{} != {} * {}", fac.element, fac.multiplier, fac.atom);
                    ensure!(self.atom_ok(&fac.atom)?, "{} is not an atom", fac.atom);
                }
            }
            Evidence::Divisors { witnesses } => {
                ensure!(
                    is(Property::Furstenberg, &holds)
                        || is(Property::QuasiFurstenberg, &holds)
                        || is(Property::AlmostFurstenberg, &holds),
                    "divisor evidence supports F, AF or QF only"
                );
                for w in witnesses {
                    ensure!(self.member_nonzero(&w.b)?, "{} is not a nonzero member", w.b);
                    ensure!(f.contains(&w.c)?, "{} is not a member", w.c);
                    match s.property {
                        Property::Furstenberg => ensure!(w.c.is_zero(), "F witness has c = {}", w.c),
                        Property::AlmostFurstenberg => ensure!(self.atomic(&w.c)?, "{} is not atomic", w.c),
                        _ => {}
                    }
                    ensure!(self.atom_ok(&w.a)?, "{} is not an atom", w.a);
                    ensure!(self.divides(&w.a, &(&w.b + &w.c))?, "{} does not divide {} + {}", w.a, w.b, w.c);
                    ensure!(!self.divides(&w.a, &w.c)?, "{} divides {}", w.a, w.c);
                }
            }
            Evidence::NonFurstenberg { refutation: r } => {
                ensure!(is(Property::Furstenberg, &[Verdict::Refuted]), "wrong property");
                ensure!(self.member_nonzero(&r.element)?, "{} is not a nonzero member", r.element);
                for a in f.tagged_atoms(r.checked_atoms)? {
                    ensure!(!self.divides(&a.value, &r.element)?, "atom {} divides {}", a.value, r.element);
                }
                let complete = f.atom_count().is_some_and(|n| n <= r.checked_atoms);
                if !complete {
                    let Some(floor) = &r.floor else {
                        return Ok(Err("infinitely many atoms and no floor".into()));
                    };
                    ensure!(f.base_multiple_floor() == Some((floor.clone(), r.floor_attained)), "floor mismatch");
                    ensure!(f.base().contains(&r.element), "{} is not in the base", r.element);
                    ensure!(
                        &r.element < floor || (!r.floor_attained && &r.element == floor),
                        "{} is not below the floor {floor}",
                        r.element
                    );
                }
            }
            Evidence::SingleAtom { atom, element } => {
                ensure!(
                    is(Property::AlmostFurstenberg, &[Verdict::Refuted]) || is(Property::AlmostAtomic, &[Verdict::Refuted]),
                    "single-atom evidence refutes AF or almost-atomic only"
                );
                ensure!(f.atom_count() == Some(1), "family has more than one atom");
                ensure!(f.atom(1)?.is_some_and(|a| a.value == *atom), "{atom} is not the atom");
                ensure!(self.atom_ok(atom)?, "{atom} is not an atom");
                ensure!(self.member_nonzero(element)?, "{element} is not a nonzero member");
                ensure!(!self.divides(atom, element)?, "{atom} divides {element}");
            }
            Evidence::UniformShift { c, witnesses } => {
                ensure!(is(Property::NearlyFurstenberg, &holds), "wrong property");
                ensure!(f.contains(c)?, "{c} is not a member");
                for w in witnesses {
                    ensure!(w.c == *c, "witness uses c = {}", w.c);
                    ensure!(self.member_nonzero(&w.b)?, "{} is not a nonzero member", w.b);
                    ensure!(self.atom_ok(&w.a)?, "{} is not an atom", w.a);
                    ensure!(self.divides(&w.a, &(&w.b + c))?, "{} does not divide {} + {c}", w.a, w.b);
                    ensure!(!self.divides(&w.a, c)?, "{} divides {c}", w.a);
                }
            }
            Evidence::NoUniformShift { refutations } => {
                ensure!(is(Property::NearlyFurstenberg, &[Verdict::Refuted]), "wrong property");
                ensure!(!refutations.is_empty(), "no refutations");
                for r in refutations {
                    ensure!(f.contains(&r.c)?, "{} is not a member", r.c);
                    ensure!(self.member_nonzero(&r.b)?, "{} is not a nonzero member", r.b);
                    let sum = &r.b + &r.c;
                    for a in f.tagged_atoms(r.checked_atoms)? {
                        ensure!(
                            !(self.divides(&a.value, &sum)? && !self.divides(&a.value, &r.c)?),
                            "atom {} divides {} + {} but not {}",
                            a.value,
                            r.b,
                            r.c,
                            r.c
                        );
                    }
                    if let Err(why) = self.shift_tail(&r.b, &r.c, r.checked_atoms)? {
                        return Ok(Err(why));
                    }
                }
            }
            Evidence::QuasiAtomic { witnesses } => {
                ensure!(is(Property::QuasiAtomic, &[Verdict::Proven]), "wrong property");
                for w in witnesses {
                    ensure!(f.contains(&w.b)? && f.contains(&w.c)?, "non-member in witness for {}", w.b);
                    ensure!(!w.k.is_negative(), "negative multiplier");
                    ensure!(self.atom_ok(&w.a)?, "{} is not an atom", w.a);
                    ensure!(&w.b + &w.c == w.a.times_int(&w.k), "{} + {} != {} * {}", w.b, w.c, w.k, w.a);
                }
            }
            Evidence::AtomicShifts { shifts } => {
                ensure!(is(Property::AlmostAtomic, &holds), "wrong property");
                for sh in shifts {
                    ensure!(f.contains(&sh.b)?, "{} is not a member", sh.b);
                    ensure!(self.atomic(&sh.c)?, "{} is not atomic", sh.c);
                    ensure!(self.atomic(&(&sh.b + &sh.c))?, "{} + {} is not atomic", sh.b, sh.c);
                }
            }
            Evidence::UniformAtomicShift { c, shifts } => {
                ensure!(is(Property::NearlyAtomic, &holds), "wrong property");
                ensure!(self.atomic(c)?, "{c} is not atomic");
                for sh in shifts {
                    ensure!(sh.c == *c, "shift uses c = {}", sh.c);
                    ensure!(f.contains(&sh.b)?, "{} is not a member", sh.b);
                    ensure!(self.atomic(&(&sh.b + c))?, "{} + {c} is not atomic", sh.b);
                }
            }
            Evidence::ValuationObstruction { element, prime, valuation } => {
                ensure!(is(Property::AlmostAtomic, &[Verdict::Refuted]), "wrong property");
                ensure!(spec == FamilySpec::FNotAa, "obstruction applies to f-not-aa only");
                ensure!(f.contains(element)?, "{element} is not a member");
                ensure!(vp(element, *prime) == *valuation, "v_{prime}({element}) != {valuation}");
                ensure!(
                    (*prime == 2 && *valuation < 0) || *valuation < -1,
                    "v_{prime} = {valuation} is allowed for atomic elements"
                );
            }
            Evidence::NoUniformAtomicShift { refutations } => {
                ensure!(is(Property::NearlyAtomic, &[Verdict::Refuted]), "wrong property");
                ensure!(
                    matches!(spec, FamilySpec::AfNotNf { .. } | FamilySpec::PowDenom { .. }),
                    "no closed form for {spec}"
                );
                ensure!(!refutations.is_empty(), "no refutations");
                for r in refutations {
                    ensure!(self.atomic(&r.c)?, "{} is not atomic", r.c);
                    ensure!(self.member_nonzero(&r.b)?, "{} is not a nonzero member", r.b);
                    ensure!(!f.is_atomic_element(&(&r.b + &r.c))?, "{} + {} is atomic", r.b, r.c);
                }
            }
            Evidence::Implied { .. } => unreachable!("handled by verify_status"),
            other => return Ok(Err(format!("{other:?} is not Puiseux evidence"))),
        }
        Ok(Ok(()))
    }

    /// No atom past `checked` can divide `b + c` without dividing `c`.
    fn shift_tail(&self, b: &Rat, c: &Rat, checked: usize) -> Result<Outcome> {
        let f = self.f;
        if f.atom_count().is_some_and(|n| n <= checked) {
            return Ok(Ok(()));
        }
        ensure!(matches!(f.spec(), FamilySpec::AfNotNf { .. }), "no tail argument for {}", f.spec());
        // b is dyadic, so past `checked` coefficients come from c alone
        ensure!(*b.denom() == BigInt::from(1u8) << int_valuation(b.denom(), 2), "{b} is not dyadic");
        let nf = f.normal_form(c)?.ok_or_else(|| crate::Error::Internal(format!("{c} has no normal form")))?;
        for (a, _) in &nf.coefficients {
            ensure!(a.index <= checked, "{c} uses atom {} past the checked range", a.index);
        }
        // past `checked` an atom divides b + c iff r_n <= d_c + b, and
        // divides c iff r_n <= d_c; the r_n = 1 - 2^-n increase to 1
        let d = nf.base_part;
        if d >= Rat::one() {
            return Ok(Ok(()));
        }
        let mut m = 1u32;
        while Rat::one() - Rat::inv_pow(2, m) <= d {
            m += 1;
        }
        let r_m = Rat::one() - Rat::inv_pow(2, m);
        ensure!(f.atom_base_multiple(m as usize)?.as_ref() == Some(&r_m), "r_{m} is not 1 - 2^-{m}");
        ensure!(r_m > &d + b, "r_{m} = {r_m} lies in ({d}, {d} + {b}]");
        Ok(Ok(()))
    }
}
