use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::lex::lexcone_statuses;
use super::witness::{
    almost_atomic_decide, almost_atomic_shift, almost_furstenberg_witness, furstenberg_witness,
    nearly_atomic_refute, nearly_furstenberg_refute, nearly_furstenberg_verify, quasi_atomic_witness,
    quasi_furstenberg_witness, AlmostAtomicDecision, AlmostFurstenbergOutcome, FurstenbergVerdict,
};
use super::{DivisorWitness, Evidence, Factorization, Property, PropertyStatus, Verdict};
use crate::error::{Error, Result};
use crate::families::{Family, FamilySpec, Monoid};
use crate::ratcore::Rat;

/// Deterministic sample of nonzero members: the generators of a shallow
/// truncation, pairwise sums of the smallest ones, and small dyadics that
/// happen to be members.
pub fn sample_members(f: &Family, depth: usize) -> Result<Vec<Rat>> {
    let t = f.truncate(depth.clamp(1, 12))?;
    let gens = t.generators();
    let mut out: BTreeSet<Rat> = gens.iter().cloned().collect();
    let head = &gens[..gens.len().min(10)];
    for (i, x) in head.iter().enumerate() {
        for y in &head[i..] {
            out.insert(x + y);
        }
    }
    for k in 0..=4u32 {
        for a in 1..=16i64 {
            let q = Rat::int(a) * Rat::inv_pow(2, k);
            if f.contains(&q)? {
                out.insert(q);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `count` seeded random members, each a sum of one to three generators
/// of the depth-`depth` truncation with coefficients 1 to 3.
pub fn random_members(f: &Family, count: usize, seed: u64, depth: usize) -> Result<Vec<Rat>> {
    let t = f.truncate(depth.max(1))?;
    let gens = t.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let terms = rng.gen_range(1..=3);
            (0..terms).fold(Rat::zero(), |acc, _| {
                let g = &gens[rng.gen_range(0..gens.len())];
                acc + g.scale(rng.gen_range(1..=3u32))
            })
        })
        .collect())
}

fn par_map<T: Send>(items: &[Rat], op: impl Fn(&Rat) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    items.par_iter().map(op).collect()
}

struct Ctx<'a> {
    f: &'a Family,
    depth: usize,
    sample: Vec<Rat>,
    statuses: Vec<PropertyStatus>,
}

impl Ctx<'_> {
    fn push(&mut self, property: Property, verdict: Verdict, witness: Option<Evidence>, sampled: bool) {
        self.statuses.push(PropertyStatus {
            monoid: self.f.spec().to_string(),
            property,
            verdict,
            witness,
            sample: sampled.then_some(self.sample.len()),
            depth: self.depth,
        });
    }

    fn verdict(&self, p: Property) -> Verdict {
        self.statuses
            .iter()
            .find(|s| s.property == p)
            .map_or(Verdict::UnknownAtDepth, |s| s.verdict)
    }

    fn push_implied(&mut self, property: Property, from: Property) {
        let verdict = self.verdict(from);
        self.push(property, verdict, Some(Evidence::Implied { from }), false);
    }

    /// Elements used as the shift `c` in refutations.
    fn shifts(&self) -> Vec<Rat> {
        self.sample.iter().take(24).cloned().collect()
    }

    fn antimatter(&mut self) -> Result<()> {
        let first = self.f.atom(1)?;
        match first {
            Some(a) => match self.f.certify_atom(&a.value)? {
                Some(prime) => {
                    let ev = Evidence::Atom { atom: a.value, prime };
                    self.push(Property::Antimatter, Verdict::Refuted, Some(ev), false);
                }
                None => self.push(Property::Antimatter, Verdict::UnknownAtDepth, None, false),
            },
            None => self.push(Property::Antimatter, Verdict::UnknownAtDepth, None, false),
        }
        Ok(())
    }

    fn atomic(&mut self) -> Result<()> {
        let f = self.f;
        let flags = par_map(&self.sample, |b| f.is_atomic_element(b))?;
        if let Some(i) = flags.iter().position(|ok| !ok) {
            let ev = Evidence::NonAtomicElement {
                element: self.sample[i].clone(),
            };
            self.push(Property::Atomic, Verdict::Refuted, Some(ev), true);
            return Ok(());
        }
        if f.spec() == FamilySpec::Grams {
            // the atoms generate every base generator, hence the monoid
            let mut factorizations = Vec::new();
            for g in f.base().generators(self.depth) {
                let atom = f
                    .atom_below_base_part(&g)?
                    .ok_or_else(|| Error::Internal(format!("no atom below {g}")))?
                    .value;
                let multiplier = g
                    .integer_ratio(&atom)
                    .ok_or_else(|| Error::Internal(format!("{g} is not a multiple of {atom}")))?;
                factorizations.push(Factorization {
                    element: g,
                    multiplier,
                    atom,
                });
            }
            let ev = Evidence::AtomicGenerators { factorizations };
            self.push(Property::Atomic, Verdict::Proven, Some(ev), false);
        } else {
            self.push(Property::Atomic, Verdict::UnknownAtDepth, None, true);
        }
        Ok(())
    }

    fn furstenberg(&mut self) -> Result<()> {
        let (f, depth) = (self.f, self.depth);
        let results = par_map(&self.sample, |b| furstenberg_witness(f, b, depth))?;
        let mut witnesses = Vec::new();
        let mut unknown = false;
        for (b, r) in self.sample.iter().zip(results) {
            match r {
                FurstenbergVerdict::Proven { atom } => witnesses.push(DivisorWitness {
                    b: b.clone(),
                    c: Rat::zero(),
                    a: atom,
                }),
                FurstenbergVerdict::Refuted { refutation } => {
                    let ev = Evidence::NonFurstenberg { refutation };
                    self.push(Property::Furstenberg, Verdict::Refuted, Some(ev), true);
                    return Ok(());
                }
                FurstenbergVerdict::UnknownAtDepth { .. } => unknown = true,
            }
        }
        if unknown {
            self.push(Property::Furstenberg, Verdict::UnknownAtDepth, None, true);
            return Ok(());
        }
        // grams: inf r_n = 0; f-not-aa: residues below 1, 1/p above
        let verdict = match f.spec() {
            FamilySpec::Grams | FamilySpec::FNotAa => Verdict::Proven,
            _ => Verdict::ProvenOnSample,
        };
        self.push(Property::Furstenberg, verdict, Some(Evidence::Divisors { witnesses }), true);
        Ok(())
    }

    fn nearly_furstenberg(&mut self) -> Result<()> {
        if self.verdict(Property::Furstenberg).holds() == Some(true) {
            self.push_implied(Property::NearlyFurstenberg, Property::Furstenberg);
            return Ok(());
        }
        let (f, depth) = (self.f, self.depth);
        let c = match f.spec() {
            FamilySpec::AfNotNf { .. } | FamilySpec::PowDenom { .. } => {
                let refutations = par_map(&self.shifts(), |c| nearly_furstenberg_refute(f, c, depth))?;
                let ev = Evidence::NoUniformShift { refutations };
                self.push(Property::NearlyFurstenberg, Verdict::Refuted, Some(ev), true);
                return Ok(());
            }
            FamilySpec::AfNotF { .. } => Rat::one(),
            // c = 1 fails at b = 1/3, since 1/3 is the only atom dividing 4/3
            FamilySpec::NaNotF => Rat::frac(5, 3),
            FamilySpec::NfNotAf { .. } => Rat::frac(1, 2),
            _ => {
                self.push(Property::NearlyFurstenberg, Verdict::UnknownAtDepth, None, true);
                return Ok(());
            }
        };
        let check = nearly_furstenberg_verify(f, &c, &self.sample, depth)?;
        if check.passed() {
            let ev = Evidence::UniformShift {
                c,
                witnesses: check.witnesses,
            };
            self.push(Property::NearlyFurstenberg, Verdict::ProvenOnSample, Some(ev), true);
        } else {
            self.push(Property::NearlyFurstenberg, Verdict::UnknownAtDepth, None, true);
        }
        Ok(())
    }

    fn almost_furstenberg(&mut self) -> Result<()> {
        if self.verdict(Property::Furstenberg).holds() == Some(true) {
            self.push_implied(Property::AlmostFurstenberg, Property::Furstenberg);
            return Ok(());
        }
        let (f, depth) = (self.f, self.depth);
        let outcomes = par_map(&self.sample, |b| almost_furstenberg_witness(f, b, depth))?;
        let mut witnesses = Vec::new();
        let mut unknown = false;
        for o in outcomes {
            match o {
                AlmostFurstenbergOutcome::Witness { witness } => witnesses.push(witness),
                AlmostFurstenbergOutcome::Refuted { atom, element } => {
                    let ev = Evidence::SingleAtom { atom, element };
                    self.push(Property::AlmostFurstenberg, Verdict::Refuted, Some(ev), true);
                    return Ok(());
                }
                AlmostFurstenbergOutcome::UnknownAtDepth { .. } => unknown = true,
            }
        }
        if unknown {
            self.push(Property::AlmostFurstenberg, Verdict::UnknownAtDepth, None, true);
        } else {
            let ev = Evidence::Divisors { witnesses };
            self.push(Property::AlmostFurstenberg, Verdict::ProvenOnSample, Some(ev), true);
        }
        Ok(())
    }

    fn quasi_furstenberg(&mut self) -> Result<()> {
        let f = self.f;
        let witnesses = par_map(&self.sample, |b| quasi_furstenberg_witness(f, b))?;
        let ev = Evidence::Divisors { witnesses };
        self.push(Property::QuasiFurstenberg, Verdict::Proven, Some(ev), true);
        Ok(())
    }

    fn quasi_atomic(&mut self) -> Result<()> {
        let f = self.f;
        let Some(a) = f.atom(1)? else {
            self.push(Property::QuasiAtomic, Verdict::UnknownAtDepth, None, true);
            return Ok(());
        };
        let witnesses = par_map(&self.sample, |b| quasi_atomic_witness(f, b, &a.value))?;
        let ev = Evidence::QuasiAtomic { witnesses };
        self.push(Property::QuasiAtomic, Verdict::Proven, Some(ev), true);
        Ok(())
    }

    fn almost_atomic(&mut self) -> Result<()> {
        if self.verdict(Property::Atomic).holds() == Some(true) {
            self.push_implied(Property::AlmostAtomic, Property::Atomic);
            return Ok(());
        }
        let f = self.f;
        if f.atom_count() == Some(1) {
            let atom = f.atom(1)?.expect("single atom").value;
            let mut element = None;
            for b in &self.sample {
                if !f.divides_bool(&atom, b)? {
                    element = Some(b.clone());
                    break;
                }
            }
            match element {
                Some(element) => {
                    let ev = Evidence::SingleAtom { atom, element };
                    self.push(Property::AlmostAtomic, Verdict::Refuted, Some(ev), true);
                }
                None => self.push(Property::AlmostAtomic, Verdict::UnknownAtDepth, None, true),
            }
            return Ok(());
        }
        if f.spec() == FamilySpec::FNotAa {
            for d in par_map(&self.sample, |b| almost_atomic_decide(f, b))? {
                if let AlmostAtomicDecision::Refuted {
                    element,
                    prime,
                    valuation,
                } = d
                {
                    let ev = Evidence::ValuationObstruction {
                        element,
                        prime,
                        valuation,
                    };
                    self.push(Property::AlmostAtomic, Verdict::Refuted, Some(ev), true);
                    return Ok(());
                }
            }
        }
        let shifts = par_map(&self.sample, |b| almost_atomic_shift(f, b))?;
        if shifts.iter().all(Option::is_some) {
            let ev = Evidence::AtomicShifts {
                shifts: shifts.into_iter().flatten().collect(),
            };
            self.push(Property::AlmostAtomic, Verdict::ProvenOnSample, Some(ev), true);
        } else {
            self.push(Property::AlmostAtomic, Verdict::UnknownAtDepth, None, true);
        }
        Ok(())
    }

    fn nearly_atomic(&mut self) -> Result<()> {
        if self.verdict(Property::Atomic).holds() == Some(true) {
            self.push_implied(Property::NearlyAtomic, Property::Atomic);
            return Ok(());
        }
        if self.verdict(Property::AlmostAtomic).holds() == Some(false) {
            let ev = Evidence::Implied {
                from: Property::AlmostAtomic,
            };
            self.push(Property::NearlyAtomic, Verdict::Refuted, Some(ev), false);
            return Ok(());
        }
        let f = self.f;
        let c = match f.spec() {
            FamilySpec::AfNotNf { .. } | FamilySpec::PowDenom { .. } => {
                let mut atomic = Vec::new();
                for c in self.shifts() {
                    if f.is_atomic_element(&c)? {
                        atomic.push(c);
                    }
                }
                let refutations = par_map(&atomic, |c| nearly_atomic_refute(f, c))?;
                let ev = Evidence::NoUniformAtomicShift { refutations };
                self.push(Property::NearlyAtomic, Verdict::Refuted, Some(ev), true);
                return Ok(());
            }
            FamilySpec::AfNotF { .. } => Rat::int(2),
            FamilySpec::NaNotF => Rat::one(),
            _ => {
                self.push(Property::NearlyAtomic, Verdict::UnknownAtDepth, None, true);
                return Ok(());
            }
        };
        let ok = par_map(&self.sample, |b| f.is_atomic_element(&(b + &c)))?;
        if ok.iter().all(|x| *x) && f.is_atomic_element(&c)? {
            let shifts = self
                .sample
                .iter()
                .map(|b| super::AtomicShift { b: b.clone(), c: c.clone() })
                .collect();
            let ev = Evidence::UniformAtomicShift { c, shifts };
            self.push(Property::NearlyAtomic, Verdict::ProvenOnSample, Some(ev), true);
        } else {
            self.push(Property::NearlyAtomic, Verdict::UnknownAtDepth, None, true);
        }
        Ok(())
    }
}

/// One status per property, in [`Property::ALL`] order.
pub fn classify(f: &Family, depth: usize) -> Result<Vec<PropertyStatus>> {
    if depth == 0 {
        return Err(Error::arg("depth starts at 1"));
    }
    let mut ctx = Ctx {
        f,
        depth,
        sample: sample_members(f, depth)?,
        statuses: Vec::new(),
    };
    ctx.antimatter()?;
    ctx.atomic()?;
    ctx.furstenberg()?;
    ctx.nearly_furstenberg()?;
    ctx.almost_furstenberg()?;
    ctx.quasi_furstenberg()?;
    ctx.quasi_atomic()?;
    ctx.almost_atomic()?;
    ctx.nearly_atomic()?;
    Ok(ctx.statuses)
}

pub fn classify_monoid(m: &Monoid, depth: usize) -> Result<Vec<PropertyStatus>> {
    match m {
        Monoid::Puiseux(f) => classify(f, depth),
        Monoid::LexCone(_) => {
            let radius = i64::try_from(depth).map_err(|_| Error::arg("depth too large"))?;
            Ok(lexcone_statuses(radius.max(1), depth))
        }
    }
}
