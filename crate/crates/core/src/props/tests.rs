use super::witness::{AlmostAtomicDecision, AlmostFurstenbergOutcome, FurstenbergVerdict, NonIsomorphism};
use super::*;
use crate::families::{build_family, Family, Monoid};

fn r(s: &str) -> Rat {
    s.parse().unwrap()
}

fn fam(s: &str) -> Family {
    Family::build(s.parse().unwrap()).unwrap()
}

#[test]
fn quasi_atomic_examples() {
    let pd = fam("family:pow-denom{p=3}");
    let w = quasi_atomic_witness(&pd, &r("1/3"), &r("1/2")).unwrap();
    assert_eq!((w.c, w.k), (r("2/3"), BigInt::from(2)));
    let w = quasi_atomic_witness(&pd, &r("1/9"), &r("1/2")).unwrap();
    assert_eq!((w.c, w.k), (r("8/9"), BigInt::from(2)));
    let af = fam("family:af-not-f{l=1}");
    let w = quasi_atomic_witness(&af, &r("1/2"), &r("2/3")).unwrap();
    assert_eq!((w.c, w.k), (r("3/2"), BigInt::from(3)));
    assert_eq!(quasi_atomic_witness(&pd, &Rat::zero(), &r("1/2")).unwrap().c, Rat::zero());
    assert!(quasi_atomic_witness(&pd, &r("1/3"), &r("1/3")).is_err());
}

#[test]
fn quasi_furstenberg_examples() {
    let pd = fam("family:pow-denom{p=3}");
    let w = quasi_furstenberg_witness(&pd, &r("1/2")).unwrap();
    assert_eq!((w.c, w.a), (Rat::zero(), r("1/2")));
    // 2/3 - 1/2 = 1/6 is not a member, so the loop stops at once
    let w = quasi_furstenberg_witness(&pd, &r("1/3")).unwrap();
    assert_eq!(w.c, r("2/3"));
    let af = fam("family:af-not-f{l=1}");
    let w = quasi_furstenberg_witness(&af, &Rat::one()).unwrap();
    assert!(af.divides_bool(&w.a, &(&w.b + &w.c)).unwrap());
    assert!(!af.divides_bool(&w.a, &w.c).unwrap());
}

#[test]
fn furstenberg_examples() {
    let nn = fam("family:af-not-nf{l=1}");
    assert!(matches!(furstenberg_witness(&nn, &r("1/4"), 20).unwrap(), FurstenbergVerdict::Refuted { .. }));
    assert!(matches!(furstenberg_witness(&nn, &r("1/2"), 20).unwrap(), FurstenbergVerdict::Proven { .. }));
    let na = fam("family:na-not-f");
    assert!(matches!(furstenberg_witness(&na, &r("1/2"), 20).unwrap(), FurstenbergVerdict::Refuted { .. }));
    assert_eq!(
        furstenberg_witness(&na, &Rat::one(), 20).unwrap(),
        FurstenbergVerdict::Proven { atom: r("1/3") }
    );
    let fa = fam("family:f-not-aa");
    // 7/10 has 2 in its denominator, so it is not a member at all
    assert!(furstenberg_witness(&fa, &r("7/10"), 20).is_err());
    assert_eq!(
        furstenberg_witness(&fa, &r("8/15"), 20).unwrap(),
        FurstenbergVerdict::Proven { atom: r("1/3") }
    );
    let af = fam("family:af-not-f{l=1}");
    assert!(matches!(furstenberg_witness(&af, &Rat::one(), 20).unwrap(), FurstenbergVerdict::Refuted { .. }));
    assert!(matches!(furstenberg_witness(&af, &r("9/8"), 20).unwrap(), FurstenbergVerdict::Proven { .. }));
}

#[test]
fn almost_furstenberg_examples() {
    let nn = fam("family:af-not-nf{l=1}");
    let w = af_not_nf_almost_witness(&nn, &r("1/2")).unwrap();
    assert_eq!((w.c, w.a), (r("1/2"), r("3/28")));
    let af = fam("family:af-not-f{l=1}");
    match almost_furstenberg_witness(&af, &r("1/2"), 20).unwrap() {
        AlmostFurstenbergOutcome::Witness { witness } => {
            assert_eq!(witness.c, Rat::int(2));
            assert_eq!(
                af.atom_by_prime(crate::ratcore::valuation::prime_factors(witness.a.denom())
                    .unwrap()
                    .into_iter()
                    .find(|&p| p > 2)
                    .unwrap())
                .unwrap()
                .unwrap()
                .base_multiple(),
                r("5/2")
            );
        }
        other => panic!("{other:?}"),
    }
    let pd = fam("family:pow-denom{p=3}");
    assert!(matches!(
        almost_furstenberg_witness(&pd, &r("1/3"), 20).unwrap(),
        AlmostFurstenbergOutcome::Refuted { .. }
    ));
}

#[test]
fn nearly_furstenberg_examples() {
    let nf = fam("family:nf-not-af{p=7}");
    let gens = nf.truncate(20).unwrap().generators().to_vec();
    let check = nearly_furstenberg_verify(&nf, &r("1/2"), &gens, 20).unwrap();
    assert!(check.passed());
    assert!(check.witnesses.iter().all(|w| w.a == r("1/7")));
    let af = fam("family:af-not-f{l=1}");
    let sample = sample_members(&af, 10).unwrap();
    assert!(nearly_furstenberg_verify(&af, &Rat::one(), &sample, 20).unwrap().passed());
    let pd = fam("family:pow-denom{p=3}");
    let probe: Vec<Rat> = (1..6).map(|k| Rat::inv_pow(3, k)).collect();
    for c in sample_members(&pd, 4).unwrap() {
        assert!(!nearly_furstenberg_verify(&pd, &c, &probe, 4).unwrap().passed(), "{c}");
    }
    assert!(nearly_furstenberg_verify(&pd, &r("1/5"), &probe, 4).is_err());
}

#[test]
fn na_not_f_shift_one_fails_but_five_thirds_works() {
    let na = fam("family:na-not-f");
    let check = nearly_furstenberg_verify(&na, &Rat::one(), &[r("1/3")], 30).unwrap();
    assert_eq!(check.counterexample, Some(r("1/3")));
    let sample = sample_members(&na, 12).unwrap();
    assert!(nearly_furstenberg_verify(&na, &r("5/3"), &sample, 30).unwrap().passed());
}

#[test]
fn nearly_furstenberg_refute_examples() {
    let nn = fam("family:af-not-nf{l=1}");
    assert_eq!(nearly_furstenberg_refute(&nn, &r("1/2"), 30).unwrap().b, r("1/8"));
    assert_eq!(nearly_furstenberg_refute(&nn, &r("1/6"), 30).unwrap().b, r("1/4"));
    assert!(nearly_furstenberg_refute(&fam("family:grams"), &r("1/6"), 5).is_err());
}

#[test]
fn almost_atomic_examples() {
    let fa = fam("family:f-not-aa");
    assert!(matches!(
        almost_atomic_decide(&fa, &r("3/2")).unwrap(),
        AlmostAtomicDecision::Refuted { prime: 2, .. }
    ));
    match almost_atomic_decide(&fa, &r("1/3")).unwrap() {
        AlmostAtomicDecision::Proven { shift } => assert_eq!(shift.c, r("2/3")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(almost_atomic_decide(&fa, &Rat::zero()).unwrap(), AlmostAtomicDecision::Proven { .. }));
    // odd squarefree denominators above 1 are handled by clearing residues
    assert!(matches!(almost_atomic_decide(&fa, &r("16/15")).unwrap(), AlmostAtomicDecision::Proven { .. }));
    // 10/9 is in the ray but v_3 = -2 survives every atomic shift
    assert!(matches!(
        almost_atomic_decide(&fa, &r("10/9")).unwrap(),
        AlmostAtomicDecision::Refuted { prime: 3, valuation: -2, .. }
    ));
    assert!(almost_atomic_decide(&fa, &r("1/2")).is_err());
}

#[test]
fn nearly_atomic_examples() {
    let na = fam("family:na-not-f");
    let facts = nearly_atomic_verify(&na, &[r("3/4"), Rat::one(), r("1/2")]).unwrap();
    assert_eq!((facts[0].atom.clone(), facts[0].multiplier.clone()), (r("7/44"), BigInt::from(11)));
    assert_eq!((facts[1].atom.clone(), facts[1].multiplier.clone()), (r("1/3"), BigInt::from(6)));
    assert_eq!((facts[2].atom.clone(), facts[2].multiplier.clone()), (r("3/10"), BigInt::from(5)));
    assert!(nearly_atomic_verify(&na, &[r("1/3")]).is_err());
}

#[test]
fn nonisomorphism_examples() {
    let m = |s: &str| build_family(s.parse().unwrap()).unwrap();
    assert!(matches!(
        nonisomorphism_witness(&m("family:pow-denom{p=3}"), &m("family:pow-denom{p=5}")).unwrap(),
        NonIsomorphism::Proven { .. }
    ));
    assert!(matches!(
        nonisomorphism_witness(&m("family:af-not-f{l=1}"), &m("family:af-not-f{l=2}")).unwrap(),
        NonIsomorphism::Proven { .. }
    ));
    assert_eq!(
        nonisomorphism_witness(&m("family:af-not-f{l=1}"), &m("family:af-not-f{l=1}")).unwrap(),
        NonIsomorphism::Inconclusive
    );
    assert!(nonisomorphism_witness(&m("family:lexcone"), &m("family:grams")).is_err());
}

#[test]
fn implications_are_transitive() {
    assert!(Property::Furstenberg.implies(Property::QuasiFurstenberg));
    assert!(Property::Atomic.implies(Property::QuasiAtomic));
    assert!(!Property::QuasiFurstenberg.implies(Property::Furstenberg));
    assert_eq!("nf".parse::<Property>().unwrap(), Property::NearlyFurstenberg);
}

#[test]
fn audit_every_family_at_small_depth() {
    for spec in FamilySpec::standard() {
        let m = build_family(spec).unwrap();
        let report = diagram_audit(&m, 8).unwrap();
        assert!(report.is_consistent(), "{spec}: {:#?}", (
            &report.implication_violations,
            &report.table_mismatches,
            &report.verification_failures,
            report.statuses.iter().map(|s| (s.property, s.verdict)).collect::<Vec<_>>()
        ));
    }
}

#[test]
fn verifier_rejects_tampered_evidence() {
    let m = build_family("family:af-not-nf{l=1}".parse().unwrap()).unwrap();
    let mut statuses = classify_monoid(&m, 6).unwrap();
    let i = statuses.iter().position(|s| s.property == Property::Furstenberg).unwrap();
    // 1/2 is divisible by a_1 = 1/6, so it is no refutation
    if let Some(Evidence::NonFurstenberg { refutation }) = &mut statuses[i].witness {
        refutation.element = r("1/2");
    } else {
        panic!("expected a refutation");
    }
    assert!(verify_status(&m, &statuses[i], &statuses).unwrap().is_err());
    let j = statuses.iter().position(|s| s.property == Property::QuasiAtomic).unwrap();
    if let Some(Evidence::QuasiAtomic { witnesses }) = &mut statuses[j].witness {
        witnesses[0].k += 1;
    }
    assert!(verify_status(&m, &statuses[j], &statuses).unwrap().is_err());
    let lex = build_family(FamilySpec::LexCone).unwrap();
    let mut ls = classify_monoid(&lex, 5).unwrap();
    ls[1].witness = Some(Evidence::LexNonAtomic { element: Point::new(3, 0) });
    assert!(verify_status(&lex, &ls[1], &ls).unwrap().is_err());
    assert!(matches!(lex, Monoid::LexCone(_)));
}
