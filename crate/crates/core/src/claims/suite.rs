use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{atom_claims, claim, crosscheck, ClaimRecord, SuiteConfig, Tally};
use crate::error::{Error, Result};
use crate::families::{Family, FamilySpec, LexCone, Monoid, Point};
use crate::fgmonoid::{is_cyclic_check, member_fg, FgPresentation};
use crate::props::{
    af_not_nf_almost_witness, almost_atomic_decide, almost_furstenberg_witness, diagram_audit,
    furstenberg_witness, lexcone_statuses, nearly_atomic_verify, nearly_furstenberg_refute,
    nearly_furstenberg_verify, nonisomorphism_witness, quasi_atomic_witness, random_members,
    sample_members, verify, verify_status, AlmostAtomicDecision, AlmostFurstenbergOutcome,
    DivisorWitness, Evidence, FurstenbergVerdict, NonIsomorphism, Property, PropertyStatus, Verdict,
};
use crate::ratcore::valuation::{prime_factors, vp, InfValuation};
use crate::ratcore::Rat;

pub const CROSSCHECK_DEPTHS: [usize; 3] = [4, 8, 12];
pub const ATOM_DEPTH: usize = 10;
pub const ATOM_COUNT: usize = 20;

/// Truncation depth the random samples draw generators from.
const SAMPLE_DEPTH: usize = 12;

fn to_json<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Internal(format!("evidence does not serialize: {e}")))
}

fn family(cfg: &SuiteConfig, spec: FamilySpec) -> Result<Family> {
    Family::build_with(spec, cfg.build_config())
}

fn puiseux_specs() -> impl Iterator<Item = FamilySpec> {
    FamilySpec::standard().into_iter().filter(FamilySpec::is_puiseux)
}

/// Every check in order: crosscheck, atom sets, family facts, audit.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let mut out = crosscheck_records(cfg)?;
    out.extend(atom_records(cfg)?);
    out.extend(family_fact_records(cfg)?);
    out.extend(audit_records(cfg)?);
    Ok(out)
}

pub fn crosscheck_records(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    puiseux_specs()
        .map(|spec| {
            let m = cfg.build(spec)?;
            Ok(claim(
                "1",
                &format!("crosscheck/{spec}"),
                "truncation members are oracle members; oracle certificates re-sum over defining generators",
                |t| {
                    let r = crosscheck(&m, &cfg.grid, &cfg.crosscheck_depths)?;
                    t.checked = r.checked;
                    for d in &r.disagreements {
                        t.fail(format!("{}: {}", d.q, d.reason));
                    }
                    to_json(&r)
                },
            ))
        })
        .collect()
}

pub fn atom_records(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    puiseux_specs()
        .map(|spec| {
            let f = family(cfg, spec)?;
            Ok(claim(
                "2",
                &format!("atoms/{spec}"),
                "claimed atoms survive the truncated search; every other generator splits",
                |t| {
                    let r = atom_claims(&f, cfg.atom_count, cfg.atom_depth)?;
                    t.checked = r.atoms.len() + r.atom_failures.len() + r.splits.len() + r.unrefuted.len();
                    for why in &r.atom_failures {
                        t.fail(why.clone());
                    }
                    for g in &r.unrefuted {
                        t.fail(format!("generator {g} has no verified split"));
                    }
                    if r.atoms.is_empty() {
                        t.fail("no claimed atom survived");
                    }
                    to_json(&r)
                },
            ))
        })
        .collect()
}

pub fn audit_records(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    FamilySpec::standard()
        .into_iter()
        .map(|spec| {
            let m = cfg.build(spec)?;
            Ok(claim(
                "4",
                &format!("audit/{spec}"),
                "verdicts re-verify, respect every implication and match the expected table",
                |t| {
                    let r = diagram_audit(&m, cfg.depth)?;
                    t.checked = r.statuses.len();
                    for v in &r.implication_violations {
                        t.fail(format!("{v:?}"));
                    }
                    for p in &r.table_mismatches {
                        t.fail(format!("{p} differs from the expected table"));
                    }
                    for (p, why) in &r.verification_failures {
                        t.fail(format!("{p}: {why}"));
                    }
                    let verdicts: Vec<(String, String)> =
                        r.statuses.iter().map(|s| (s.property.to_string(), s.verdict.to_string())).collect();
                    Ok(json!({ "monoid": r.monoid, "depth": r.depth, "verdicts": verdicts }))
                },
            ))
        })
        .collect()
}

/// The per-family facts, one or more records for each of 3a to 3h.
pub fn family_fact_records(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let mut out = pow_denom(cfg)?;
    out.extend(af_not_f(cfg)?);
    out.extend(nf_not_af(cfg)?);
    out.extend(af_not_nf(cfg)?);
    out.extend(f_not_aa(cfg)?);
    out.extend(na_not_f(cfg)?);
    out.push(lexcone(cfg));
    out.extend(invariants(cfg)?);
    Ok(out)
}

/// Everything a divisor witness promises, through the oracle. `None` when
/// it holds.
fn witness_problem(f: &Family, w: &DivisorWitness, atomic_c: bool) -> Result<Option<String>> {
    let sum = &w.b + &w.c;
    let problem = if f.certify_atom(&w.a)?.is_none() {
        format!("{} is not a certified atom", w.a)
    } else if !f.contains(&w.c)? {
        format!("{} is not a member", w.c)
    } else if atomic_c && !f.is_atomic_element(&w.c)? {
        format!("{} is not atomic", w.c)
    } else if !f.divides_bool(&w.a, &sum)? {
        format!("{} does not divide {} + {}", w.a, w.b, w.c)
    } else if f.divides_bool(&w.a, &w.c)? {
        format!("{} divides {}", w.a, w.c)
    } else {
        return Ok(None);
    };
    Ok(Some(problem))
}

fn witness_case(t: &mut Tally, f: &Family, w: &DivisorWitness, atomic_c: bool) -> Result<()> {
    let problem = witness_problem(f, w, atomic_c)?;
    t.case(problem.is_none(), || format!("b = {}: {}", w.b, problem.unwrap_or_default()));
    Ok(())
}

/// No atom of a single-atom family divides `b + c` without dividing `c`.
fn single_atom_shift_fails(f: &Family, atom: &Rat, b: &Rat, c: &Rat) -> Result<bool> {
    Ok(f.contains(b)? && b.is_positive() && !(f.divides_bool(atom, &(b + c))? && !f.divides_bool(atom, c)?))
}

fn pow_denom(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let f = family(cfg, FamilySpec::PowDenom { p: 3 })?;
    let half = Rat::frac(1, 2);
    let third = Rat::frac(1, 3);
    Ok(vec![
        claim("3a", "pow-denom/third-outside-half", "1/3 is a member but not a multiple of 1/2", |t| {
            let cyclic = FgPresentation::new([half.clone()])?;
            t.case(member_fg(&cyclic, &third)?.is_non_member(), || "1/3 lies in <1/2>".into());
            t.case(f.contains(&third)?, || "1/3 is not a member".into());
            Ok(json!({ "generators": [&half], "element": &third }))
        }),
        claim("3a", "pow-denom/atoms", "1/2 is the only atom; 1/3^n is three copies of 1/3^(n+1)", |t| {
            let atoms = f.claimed_atoms(cfg.atom_count)?;
            t.case(atoms == [half.clone()], || format!("claimed atoms {atoms:?}"));
            t.case(f.atom_count() == Some(1), || "more than one tagged atom".into());
            t.case(f.is_atom_truncated(1, cfg.atom_depth)?.is_atom(), || "1/2 splits".into());
            let mut splits = Vec::new();
            for n in 1..=cfg.atom_depth as u32 {
                let (g, part) = (Rat::inv_pow(3, n), Rat::inv_pow(3, n + 1));
                let ok = part.scale(3) == g && f.is_defining_generator(&g)? && f.contains(&part)?;
                t.case(ok, || format!("1/3^{n} is not 3 * 1/3^{}", n + 1));
                splits.push(json!({ "generator": g, "part": part, "copies": 3 }));
            }
            Ok(json!({ "atoms": atoms, "splits": splits }))
        }),
        claim("3a", "pow-denom/quasi-atomic-identity", "b + c = n(b) d(a) a with a = 1/2 for 1000 random members", |t| {
            let sample = random_members(&f, 1000, cfg.seed, SAMPLE_DEPTH)?;
            for b in &sample {
                let w = quasi_atomic_witness(&f, b, &half)?;
                let k = b.numer() * half.denom();
                let ok = w.k == k
                    && &w.b + &w.c == half.times_int(&k)
                    && f.contains(&w.c)?
                    && f.divides_bool(&half, &(&w.b + &w.c))?;
                t.case(ok, || format!("b = {b}: c = {}, k = {}", w.c, w.k));
            }
            Ok(json!({ "atom": &half, "seed": cfg.seed, "sample": sample.len() }))
        }),
        claim(
            "3a",
            "pow-denom/neither-almost-nor-nearly",
            "no atomic shift rescues 1/3^k; no shift c in the probe grid works for every b",
            |t| {
                let mut refuted = Vec::new();
                for k in 1..=20 {
                    let b = Rat::inv_pow(3, k);
                    let ok = matches!(
                        almost_furstenberg_witness(&f, &b, cfg.depth)?,
                        AlmostFurstenbergOutcome::Refuted { .. }
                    ) && !f.divides_bool(&half, &b)?;
                    t.case(ok, || format!("almost Furstenberg not refuted at {b}"));
                }
                for c in sample_members(&f, 8)? {
                    let r = nearly_furstenberg_refute(&f, &c, cfg.depth)?;
                    t.case(single_atom_shift_fails(&f, &half, &r.b, &c)?, || {
                        format!("shift {c}: {} is not a refutation", r.b)
                    });
                    refuted.push(r);
                }
                Ok(json!({ "almost_probe": "1/3^k, k <= 20", "nearly_refutations": refuted }))
            },
        ),
    ])
}

fn af_not_f(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let f = family(cfg, FamilySpec::AfNotF { l: 1 })?;
    let one = Rat::one();
    Ok(vec![
        claim("3b", "af-not-f/no-atom-divides-one", "no atom divides 1: closed form plus the first 200 atoms", |t| {
            let verdict = furstenberg_witness(&f, &one, 200)?;
            t.case(matches!(verdict, FurstenbergVerdict::Refuted { .. }), || format!("1: {verdict:?}"));
            for a in f.tagged_atoms(200)? {
                t.case(!f.divides_bool(&a.value, &one)?, || format!("atom {} divides 1", a.value));
            }
            to_json(&verdict)
        }),
        claim(
            "3b",
            "af-not-f/almost-witness",
            "50 sampled non-Furstenberg dyadics each have an atomic c and atom a with a | b + c, a not dividing c",
            |t| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let mut sample = BTreeSet::new();
                while sample.len() < 50 {
                    let k = rng.gen_range(1..=10u32);
                    let a = 2 * rng.gen_range(0..1i64 << (k - 1)) + 1;
                    sample.insert(Rat::int(a) * Rat::inv_pow(2, k));
                }
                let mut witnesses = Vec::new();
                for b in &sample {
                    let non_f = matches!(furstenberg_witness(&f, b, cfg.depth)?, FurstenbergVerdict::Refuted { .. });
                    t.case(non_f, || format!("{b} is Furstenberg"));
                    match almost_furstenberg_witness(&f, b, cfg.depth)? {
                        AlmostFurstenbergOutcome::Witness { witness } => {
                            witness_case(t, &f, &witness, true)?;
                            witnesses.push(witness);
                        }
                        other => t.case(false, || format!("{b}: {other:?}")),
                    }
                }
                Ok(json!({ "seed": cfg.seed, "witnesses": witnesses }))
            },
        ),
        claim("3b", "af-not-f/nearly-shift-one", "with c = 1 every b in a 200-element sample has a witness", |t| {
            let sample = random_members(&f, 200, cfg.seed, SAMPLE_DEPTH)?;
            let check = nearly_furstenberg_verify(&f, &one, &sample, cfg.depth)?;
            t.case(check.passed(), || format!("counterexample {:?}", check.counterexample));
            t.case(check.witnesses.len() == sample.len(), || "missing witnesses".into());
            for w in &check.witnesses {
                t.case(w.c == one, || format!("witness for {} shifts by {}", w.b, w.c));
                witness_case(t, &f, w, false)?;
            }
            Ok(json!({ "c": one, "seed": cfg.seed, "sample": sample.len() }))
        }),
    ])
}

fn nf_not_af(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let f = family(cfg, FamilySpec::NfNotAf { p: 7 })?;
    let (half, atom) = (Rat::frac(1, 2), Rat::frac(1, 7));
    Ok(vec![
        claim("3c", "nf-not-af/atom-does-not-divide-half", "1/7 does not divide 1/2", |t| {
            t.case(f.contains(&half)?, || "1/2 is not a member".into());
            t.case(!f.divides_bool(&atom, &half)?, || "1/7 divides 1/2".into());
            to_json(&f.divides(&atom, &half)?)
        }),
        claim("3c", "nf-not-af/shift-half", "1/7 divides 1/2 + g for every generator g to depth 20", |t| {
            let gens = f.truncate(20)?.generators().to_vec();
            for g in &gens {
                t.case(f.divides_bool(&atom, &(&half + g))?, || format!("1/7 does not divide 1/2 + {g}"));
            }
            Ok(json!({ "c": half, "generators": gens.len() }))
        }),
        claim("3c", "nf-not-af/not-almost", "a single atom and not cyclic, so not almost Furstenberg", |t| {
            t.case(f.atom_count() == Some(1), || "more than one atom".into());
            let t20 = f.truncate(20)?;
            t.case(is_cyclic_check(&t20)?.is_none(), || "truncation is cyclic".into());
            let outcome = almost_furstenberg_witness(&f, &half, cfg.depth)?;
            t.case(matches!(outcome, AlmostFurstenbergOutcome::Refuted { .. }), || format!("{outcome:?}"));
            to_json(&outcome)
        }),
    ])
}

fn af_not_nf(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let m = cfg.build(FamilySpec::AfNotNf { l: 1 })?;
    let f = m.as_family()?;
    let half = Rat::frac(1, 2);
    Ok(vec![
        claim("3d", "af-not-nf/almost-witness", "b = 2^-n has c = 1 - 2^-n and a = a_(n+1) for n <= 20", |t| {
            let mut witnesses = Vec::new();
            for n in 1..=20u32 {
                let w = af_not_nf_almost_witness(f, &Rat::inv_pow(2, n))?;
                let a = f.atom(n as usize + 1)?.map(|a| a.value);
                t.case(w.c == Rat::one() - Rat::inv_pow(2, n) && Some(&w.a) == a.as_ref(), || {
                    format!("n = {n}: c = {}, a = {}", w.c, w.a)
                });
                witness_case(t, f, &w, true)?;
                witnesses.push(w);
            }
            Ok(json!({ "witnesses": witnesses }))
        }),
        claim("3d", "af-not-nf/nearly-refuter", "for 50 random shifts c the refuter's b passes the verifier", |t| {
            let shifts = random_members(f, 50, cfg.seed, SAMPLE_DEPTH)?;
            let mut refutations = Vec::new();
            for c in &shifts {
                let r = nearly_furstenberg_refute(f, c, cfg.depth)?;
                let status = PropertyStatus {
                    monoid: f.spec().to_string(),
                    property: Property::NearlyFurstenberg,
                    verdict: Verdict::Refuted,
                    witness: Some(Evidence::NoUniformShift {
                        refutations: vec![r.clone()],
                    }),
                    sample: None,
                    depth: cfg.depth,
                };
                let outcome = verify_status(&m, &status, std::slice::from_ref(&status))?;
                t.case(outcome.is_ok(), || format!("c = {c}: {}", outcome.clone().unwrap_err()));
                refutations.push(r);
            }
            Ok(json!({ "seed": cfg.seed, "refutations": refutations }))
        }),
        claim(
            "3d",
            "af-not-nf/non-furstenberg-set",
            "the non-Furstenberg dyadics a/2^k (a <= 64, k <= 7) are exactly those below 1/2",
            |t| {
                let mut points = BTreeSet::new();
                for k in 0..=7 {
                    for a in 1..=64i64 {
                        points.insert(Rat::int(a) * Rat::inv_pow(2, k));
                    }
                }
                let mut below = Vec::new();
                for q in &points {
                    let expect_non_f = *q < half;
                    match furstenberg_witness(f, q, cfg.depth)? {
                        FurstenbergVerdict::Proven { atom } => {
                            t.case(!expect_non_f && f.divides_bool(&atom, q)?, || format!("{q}: atom {atom}"))
                        }
                        FurstenbergVerdict::Refuted { .. } => {
                            t.case(expect_non_f, || format!("{q} refuted"));
                            below.push(q.clone());
                        }
                        other => t.case(false, || format!("{q}: {other:?}")),
                    }
                }
                Ok(json!({ "points": points.len(), "non_furstenberg": below }))
            },
        ),
    ])
}

/// The first `count` members `a / b` with `b` odd and `a <= 40`, in order
/// of `b` then `a`.
fn odd_denominator_grid(f: &Family, count: usize) -> Result<Vec<Rat>> {
    let mut out = Vec::new();
    let mut b = 1i64;
    while out.len() < count {
        for a in 1..=40i64 {
            let q = Rat::frac(a, b);
            if q.denom() == &b.into() && f.contains(&q)? {
                out.push(q);
                if out.len() == count {
                    break;
                }
            }
        }
        b += 2;
    }
    Ok(out)
}

fn f_not_aa(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let f = family(cfg, FamilySpec::FNotAa)?;
    Ok(vec![
        claim("3e", "f-not-aa/not-almost-atomic", "3/2 has no atomic c with 3/2 + c atomic", |t| {
            let d = almost_atomic_decide(&f, &Rat::frac(3, 2))?;
            t.case(matches!(d, AlmostAtomicDecision::Refuted { prime: 2, .. }), || format!("{d:?}"));
            to_json(&d)
        }),
        claim("3e", "f-not-aa/furstenberg-grid", "every member of a 500-element grid has an atom divisor", |t| {
            let grid = odd_denominator_grid(&f, 500)?;
            let verdicts = grid
                .par_iter()
                .map(|q| furstenberg_witness(&f, q, cfg.depth))
                .collect::<Result<Vec<_>>>()?;
            for (q, v) in grid.iter().zip(&verdicts) {
                let ok = match v {
                    FurstenbergVerdict::Proven { atom } => {
                        f.certify_atom(atom)?.is_some() && f.divides_bool(atom, q)?
                    }
                    _ => false,
                };
                t.case(ok, || format!("{q}: {v:?}"));
            }
            Ok(json!({ "grid": grid.len(), "largest": grid.last() }))
        }),
    ])
}

fn na_not_f(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let f = family(cfg, FamilySpec::NaNotF)?;
    let half = Rat::frac(1, 2);
    let third = Rat::frac(1, 3);
    Ok(vec![
        claim("3f", "na-not-f/half-not-furstenberg", "no atom divides 1/2", |t| {
            t.case(f.contains(&half)?, || "1/2 is not a member".into());
            let verdict = furstenberg_witness(&f, &half, cfg.depth)?;
            t.case(matches!(verdict, FurstenbergVerdict::Refuted { .. }), || format!("{verdict:?}"));
            for a in f.tagged_atoms(cfg.depth)? {
                t.case(!f.divides_bool(&a.value, &half)?, || format!("{} divides 1/2", a.value));
            }
            to_json(&verdict)
        }),
        claim("3f", "na-not-f/nearly-atomic", "1 + x/2^y is a multiple of one atom for x <= 100, y <= 10", |t| {
            let mut sample = BTreeSet::new();
            for y in 0..=10 {
                for x in 1..=100i64 {
                    sample.insert(Rat::int(x) * Rat::inv_pow(2, y));
                }
            }
            let sample: Vec<Rat> = sample.into_iter().collect();
            let facts = nearly_atomic_verify(&f, &sample)?;
            t.case(facts.len() == sample.len(), || "missing factorizations".into());
            for (b, fact) in sample.iter().zip(&facts) {
                let ok = fact.element == Rat::one() + b
                    && fact.atom.times_int(&fact.multiplier) == fact.element
                    && f.certify_atom(&fact.atom)?.is_some();
                t.case(ok, || format!("1 + {b}: {fact:?}"));
            }
            Ok(json!({ "sample": sample.len(), "first": facts.first(), "last": facts.last() }))
        }),
        claim("3f", "na-not-f/one-is-three-thirds", "1 = 3 * 1/3 with 1/3 an atom", |t| {
            t.case(third.scale(3) == Rat::one(), || "3 * 1/3 is not 1".into());
            t.case(f.certify_atom(&third)?.is_some(), || "1/3 is not a certified atom".into());
            t.case(f.claimed_atoms(1)? == [third.clone()], || "1/3 is not the first atom".into());
            Ok(json!({ "element": 1, "multiplier": 3, "atom": third }))
        }),
    ])
}

const LEX_RADIUS: i64 = 100;

fn lexcone(cfg: &SuiteConfig) -> ClaimRecord {
    claim(
        "3g",
        "lexcone/grid",
        "(1,0) divides every nonzero member and no (0,1) + b is a multiple of (1,0), on |x|, y <= 100",
        |t| {
            let cone = LexCone;
            let probe = Point::new(0, 1);
            for y in 0..=LEX_RADIUS {
                for x in -LEX_RADIUS..=LEX_RADIUS {
                    let p = Point::new(x, y);
                    if !cone.contains(p) {
                        continue;
                    }
                    if !p.is_zero() {
                        t.case(cone.divides(LexCone::ATOM, p)?, || format!("(1,0) does not divide {p:?}"));
                    }
                    let shifted = probe.checked_add(&p).map(|s| cone.atom_multiple(s));
                    t.case(shifted == Some(None), || format!("(0,1) + {p:?} is a multiple of (1,0)"));
                }
            }
            let m = Monoid::LexCone(cone);
            let statuses = lexcone_statuses(LEX_RADIUS, cfg.depth);
            for (p, outcome) in verify(&m, &statuses)? {
                t.case(outcome.is_ok(), || format!("{p}: {}", outcome.clone().unwrap_err()));
            }
            let verdict = |p| statuses.iter().find(|s| s.property == p).map(|s| s.verdict);
            t.case(verdict(Property::Furstenberg) == Some(Verdict::Proven), || "not Furstenberg".into());
            t.case(verdict(Property::QuasiAtomic) == Some(Verdict::Refuted), || "quasi-atomic not refuted".into());
            Ok(json!({ "radius": LEX_RADIUS, "atom": LexCone::ATOM, "probe": probe }))
        },
    )
}

fn random_presentation(rng: &mut ChaCha8Rng) -> Result<FgPresentation> {
    let n = rng.gen_range(1..=4);
    FgPresentation::new((0..n).map(|_| Rat::frac(rng.gen_range(1..=12), rng.gen_range(1..=60))))
}

fn invariants(cfg: &SuiteConfig) -> Result<Vec<ClaimRecord>> {
    let build = |s: FamilySpec| cfg.build(s);
    let pairs = [
        (FamilySpec::PowDenom { p: 3 }, FamilySpec::PowDenom { p: 5 }),
        (FamilySpec::AfNotF { l: 1 }, FamilySpec::AfNotF { l: 2 }),
    ];
    Ok(vec![
        claim(
            "3h",
            "invariants/scaling",
            "for 20 random q * M the support changes only at primes of q and inf v_p shifts by v_p(q)",
            |t| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let mut cases = Vec::new();
                for _ in 0..20 {
                    let p = random_presentation(&mut rng)?;
                    let q = Rat::frac(rng.gen_range(1..=40), rng.gen_range(1..=40));
                    let scaled = p.scale(&q)?;
                    let (s1, s2) = (p.prime_support()?, scaled.prime_support()?);
                    let mut q_primes: BTreeSet<u64> = prime_factors(q.numer())?.into_iter().collect();
                    q_primes.extend(prime_factors(q.denom())?);
                    let moved: BTreeSet<u64> = s1.symmetric_difference(&s2).copied().collect();
                    t.case(moved.is_subset(&q_primes), || format!("{p} scaled by {q}: support moved at {moved:?}"));
                    for r in s1.union(&s2).chain(&q_primes) {
                        let shifted = p.inf_valuation(*r)?.map(|v| match v {
                            InfValuation::Finite(v) => InfValuation::Finite(v + vp(&q, *r)),
                            other => other,
                        });
                        t.case(shifted == scaled.inf_valuation(*r)?, || format!("{p} scaled by {q}: inf v_{r}"));
                    }
                    cases.push(json!({ "presentation": p.to_string(), "q": q, "moved": moved }));
                }
                Ok(json!({ "seed": cfg.seed, "cases": cases }))
            },
        ),
        claim("3h", "invariants/nonisomorphic-pairs", "the invariants separate both pairs", |t| {
            let mut evidence = Vec::new();
            for (a, b) in pairs {
                let w = nonisomorphism_witness(&build(a)?, &build(b)?)?;
                t.case(matches!(w, NonIsomorphism::Proven { .. }), || format!("{a} vs {b}: {w:?}"));
                evidence.push(json!({ "left": a.to_string(), "right": b.to_string(), "result": to_json(&w)? }));
            }
            Ok(Value::Array(evidence))
        }),
    ])
}
