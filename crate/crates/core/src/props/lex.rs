use super::{Evidence, Property, PropertyStatus, Verdict};
use crate::families::{LexCone, Point};

pub(crate) fn grid(radius: i64) -> impl Iterator<Item = Point> {
    (0..=radius).flat_map(move |y| (-radius..=radius).map(move |x| Point::new(x, y)))
}

/// Closed-form statuses for the lexicographic cone, each checked on the
/// grid `|x| <= radius`, `0 <= y <= radius`.
///
/// `(1, 0)` is the only atom and divides every nonzero member, so the cone
/// is Furstenberg. Adding anything to `(0, 1)` keeps `y >= 1`, so no
/// shift of it is a multiple of the atom and the cone is not quasi-atomic.
pub fn lexcone_statuses(radius: i64, depth: usize) -> Vec<PropertyStatus> {
    let m = LexCone;
    let members: Vec<Point> = grid(radius).filter(|p| m.contains(*p)).collect();
    let nonzero = members.iter().filter(|p| !p.is_zero()).count();
    let status = |property, verdict, witness| PropertyStatus {
        monoid: "family:lexcone".into(),
        property,
        verdict,
        witness: Some(witness),
        sample: None,
        depth,
    };
    let divides_all = members
        .iter()
        .filter(|p| !p.is_zero())
        .all(|p| m.divides(LexCone::ATOM, *p).unwrap_or(false));
    let probe = Point::new(0, 1);
    let no_shift = members
        .iter()
        .all(|c| probe.checked_add(c).is_some_and(|s| m.atom_multiple(s).is_none()));
    let grid_verdict = |ok: bool, yes: Verdict| if ok { yes } else { Verdict::UnknownAtDepth };
    let f_verdict = grid_verdict(divides_all, Verdict::Proven);
    let qa_verdict = grid_verdict(no_shift, Verdict::Refuted);
    let implied = |from| Evidence::Implied { from };
    vec![
        status(
            Property::Antimatter,
            Verdict::Refuted,
            Evidence::LexAtom { atom: LexCone::ATOM },
        ),
        status(
            Property::Atomic,
            Verdict::Refuted,
            Evidence::LexNonAtomic { element: probe },
        ),
        status(
            Property::Furstenberg,
            f_verdict,
            Evidence::LexDivisors {
                atom: LexCone::ATOM,
                radius,
                checked: nonzero,
            },
        ),
        status(Property::NearlyFurstenberg, f_verdict, implied(Property::Furstenberg)),
        status(Property::AlmostFurstenberg, f_verdict, implied(Property::Furstenberg)),
        status(Property::QuasiFurstenberg, f_verdict, implied(Property::Furstenberg)),
        status(
            Property::QuasiAtomic,
            qa_verdict,
            Evidence::LexNoAtomicShift {
                element: probe,
                radius,
                checked: members.len(),
            },
        ),
        status(Property::AlmostAtomic, qa_verdict, implied(Property::QuasiAtomic)),
        status(Property::NearlyAtomic, qa_verdict, implied(Property::QuasiAtomic)),
    ]
}
