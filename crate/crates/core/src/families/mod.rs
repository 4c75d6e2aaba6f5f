//! The infinite monoids of the constructions. Most are a base monoid plus a
//! stream of atoms, each atom owning a private prime; two families share
//! primes across generators and get their own oracles.

mod lexcone;
mod oracle;
mod spec;
mod stream;

use std::collections::{BTreeSet, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use lexcone::{lexcone_member, LexCone, Point};
pub use oracle::{atomic_part_member, bespoke_member_f_not_aa, bespoke_member_nf_not_af};
pub use spec::FamilySpec;
pub use stream::{TaggedAtom, PRIME_LOOKUP_CAP, STREAM_CAP};

use crate::error::{Error, Result};
use crate::fgmonoid::{member_fg, Certificate, FgPresentation, MembershipResult, Obstruction};
use crate::ratcore::dyadic::enumerate_dyadics_gt1;
use crate::ratcore::primes::{pow_mod, require_prime};
use crate::ratcore::valuation::{prime_factors, vp, InfValuation, SupportSet};
use crate::ratcore::Rat;
pub(crate) use oracle::residue_mod;
use oracle::{cone_terms, forced_residue, nf_not_af_member, power_exponent};
use stream::{AtomStream, PoolRule, PoolStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseMonoid {
    /// `N_0[1/p]`; its generator stream is `1/p^first_exp, 1/p^(first_exp+1), ...`.
    DyadicCone { p: u64, first_exp: u32 },
    /// `{0} ∪ Q_{>=1}`, truncated as `1, 3/2, 2, 5/2, ...`.
    RationalRayWithZero,
    Trivial,
}

impl BaseMonoid {
    pub fn contains(&self, q: &Rat) -> bool {
        match *self {
            BaseMonoid::DyadicCone { p, .. } => {
                q.is_zero() || (q.is_positive() && power_exponent(q.denom(), p).is_some())
            }
            BaseMonoid::RationalRayWithZero => q.is_zero() || q >= &Rat::one(),
            BaseMonoid::Trivial => q.is_zero(),
        }
    }

    /// The `n`-th (1-based) generator of the canonical stream.
    pub fn generator(&self, n: usize) -> Option<Rat> {
        if n == 0 {
            return None;
        }
        match *self {
            BaseMonoid::DyadicCone { p, first_exp } => {
                Some(Rat::inv_pow(p, first_exp + n as u32 - 1))
            }
            BaseMonoid::RationalRayWithZero => Some(Rat::frac(n as i64 + 1, 2)),
            BaseMonoid::Trivial => None,
        }
    }

    pub fn generators(&self, count: usize) -> Vec<Rat> {
        (1..=count).map_while(|n| self.generator(n)).collect()
    }

    /// Whether `g` is one of the defining generators (for the ray, every
    /// element at least 1).
    pub fn is_generator(&self, g: &Rat) -> bool {
        match *self {
            BaseMonoid::DyadicCone { p, first_exp } => {
                g.numer().is_one()
                    && power_exponent(g.denom(), p).is_some_and(|k| k >= first_exp)
            }
            BaseMonoid::RationalRayWithZero => g >= &Rat::one(),
            BaseMonoid::Trivial => false,
        }
    }

    /// Certificate terms for an element of the base.
    pub fn certificate_terms(&self, q: &Rat) -> Result<Vec<(Rat, BigUint)>> {
        if !self.contains(q) {
            return Err(Error::Internal(format!("{q} is not in the base monoid")));
        }
        match *self {
            BaseMonoid::DyadicCone { p, first_exp } => cone_terms(q, p, first_exp),
            BaseMonoid::RationalRayWithZero if !q.is_zero() => Ok(vec![(q.clone(), BigUint::one())]),
            _ => Ok(Vec::new()),
        }
    }

    /// Primes occurring in denominators; `None` when every prime does.
    pub fn primes(&self) -> Option<BTreeSet<u64>> {
        match *self {
            BaseMonoid::DyadicCone { p, .. } => Some(BTreeSet::from([p])),
            BaseMonoid::RationalRayWithZero => None,
            BaseMonoid::Trivial => Some(BTreeSet::new()),
        }
    }
}

/// Deliberate oracle corruptions used to check that the test suite notices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// nf-not-af accepts a split with `t >= 1` coset generators and `F = 0`.
    NfNotAfAllowEmptyDyadic,
    /// The generic oracle forgets to check that the remainder is nonnegative.
    GenericSkipRemainderSign,
    /// f-not-aa treats everything from 1/2 on as part of the ray.
    FNotAaRayFromHalf,
    /// af-not-nf picks primes without the `p_n ∤ 2^n - 1` guard.
    AfNotNfNoGuard,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::NfNotAfAllowEmptyDyadic,
        Mutation::GenericSkipRemainderSign,
        Mutation::FNotAaRayFromHalf,
        Mutation::AfNotNfNoGuard,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::NfNotAfAllowEmptyDyadic => "nf-not-af-allow-empty-dyadic",
            Mutation::GenericSkipRemainderSign => "generic-skip-remainder-sign",
            Mutation::FNotAaRayFromHalf => "f-not-aa-ray-from-half",
            Mutation::AfNotNfNoGuard => "af-not-nf-no-guard",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    /// Number of atoms whose structural invariants are checked on build.
    pub spot_check_depth: usize,
    pub mutation: Mutation,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            spot_check_depth: 100,
            mutation: Mutation::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OracleKind {
    Generic,
    NfNotAf { p: u64 },
    FNotAa,
}

/// Base part and forced atom coefficients of a member: `q = base_part +
/// sum coefficient * atom` with every coefficient below its atom's prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub base_part: Rat,
    pub coefficients: Vec<(TaggedAtom, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AtomCheck {
    /// `a = x + y` with both parts nonzero members of the truncation.
    NotAtom { x: Rat, y: Rat },
    AtomUpToDepth { depth: usize },
}

impl AtomCheck {
    pub fn is_atom(&self) -> bool {
        matches!(self, AtomCheck::AtomUpToDepth { .. })
    }
}

/// A family that is a Puiseux monoid.
pub struct Family {
    spec: FamilySpec,
    base: BaseMonoid,
    atoms: AtomStream,
    oracle: OracleKind,
    config: BuildConfig,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family")
            .field("spec", &self.spec)
            .field("base", &self.base)
            .field("config", &self.config)
            .finish()
    }
}

pub enum Monoid {
    Puiseux(Family),
    LexCone(LexCone),
}

pub fn build_family(spec: FamilySpec) -> Result<Monoid> {
    build_family_with(spec, BuildConfig::default())
}

pub fn build_family_with(spec: FamilySpec, config: BuildConfig) -> Result<Monoid> {
    match spec {
        FamilySpec::LexCone => Ok(Monoid::LexCone(LexCone)),
        _ => Family::build_with(spec, config).map(Monoid::Puiseux),
    }
}

fn not_puiseux() -> Error {
    Error::NotApplicable("lexcone is a submonoid of Z^2, not a Puiseux monoid".into())
}

impl Family {
    pub fn build(spec: FamilySpec) -> Result<Family> {
        Self::build_with(spec, BuildConfig::default())
    }

    pub fn build_with(spec: FamilySpec, config: BuildConfig) -> Result<Family> {
        spec.validate()?;
        let dyadic = BaseMonoid::DyadicCone { p: 2, first_exp: 0 };
        let (base, atoms, oracle) = match spec {
            FamilySpec::PowDenom { p } => (
                BaseMonoid::DyadicCone { p, first_exp: 1 },
                AtomStream::Single(TaggedAtom {
                    index: 1,
                    value: Rat::frac(1, 2),
                    prime: 2,
                }),
                OracleKind::Generic,
            ),
            FamilySpec::AfNotF { l } => (
                dyadic,
                AtomStream::Pool(PoolStream::new(l, PoolRule::AboveNumerator)),
                OracleKind::Generic,
            ),
            FamilySpec::NfNotAf { p } => (
                dyadic,
                AtomStream::Single(TaggedAtom {
                    index: 1,
                    value: Rat::new(1, p)?,
                    prime: p,
                }),
                OracleKind::NfNotAf { p },
            ),
            FamilySpec::AfNotNf { l } => {
                let guard = config.mutation != Mutation::AfNotNfNoGuard;
                (
                    dyadic,
                    AtomStream::Pool(PoolStream::new(l, PoolRule::CoprimeToMersenne { guard })),
                    OracleKind::Generic,
                )
            }
            FamilySpec::FNotAa => (
                BaseMonoid::RationalRayWithZero,
                AtomStream::OddReciprocals,
                OracleKind::FNotAa,
            ),
            FamilySpec::NaNotF => (dyadic, AtomStream::OddOverPowerPrime, OracleKind::Generic),
            FamilySpec::Grams => (dyadic, AtomStream::Grams, OracleKind::Generic),
            FamilySpec::LexCone => return Err(not_puiseux()),
        };
        let family = Family {
            spec,
            base,
            atoms,
            oracle,
            config,
        };
        family.spot_check(config.spot_check_depth)?;
        Ok(family)
    }

    /// Structural invariants of the first `depth` atoms plus the
    /// construction guards.
    pub fn spot_check(&self, depth: usize) -> Result<()> {
        let base_primes = self.base.primes();
        let mut seen = HashSet::new();
        for atom in self.atoms.take(depth)? {
            let (n, p, a) = (atom.index, atom.prime, &atom.value);
            let fail = |what: &str| Err(Error::Internal(format!("{}: atom {n} = {a}: {what}", self.spec)));
            if vp(a, p) != -1 {
                return fail(&format!("v_{p} is not -1"));
            }
            if let Some(bp) = &base_primes {
                if bp.contains(&p) {
                    return fail("private prime lies in the base support");
                }
                for r in prime_factors(a.denom())? {
                    if r != p && !bp.contains(&r) {
                        return fail(&format!("prime {r} outside base support and private prime"));
                    }
                }
            }
            if !self.base.contains(&atom.base_multiple()) {
                return fail("p_n * a_n is not in the base monoid");
            }
            if !seen.insert(p) {
                return fail("private prime repeated");
            }
            match self.spec {
                FamilySpec::NaNotF if n >= 2 => {
                    let o = 2 * n as u64 - 1;
                    if o >= p {
                        return Err(Error::arg(format!(
                            "na-not-f needs o_i < p_i for every i; index {} has o = {o}, p = {p}",
                            n - 1
                        )));
                    }
                }
                FamilySpec::AfNotNf { .. } if pow_mod(2, n as u64, p) == 1 => {
                    return Err(Error::arg(format!(
                        "af-not-nf needs p_n ∤ 2^n - 1; index {n} has p = {p}"
                    )));
                }
                FamilySpec::AfNotF { .. } => {
                    let b = enumerate_dyadics_gt1(n as u64)?.numer;
                    if p <= b {
                        return Err(Error::arg(format!(
                            "af-not-f needs p_n > b_n; index {n} has p = {p}, b = {b}"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> FamilySpec {
        self.spec
    }

    pub fn base(&self) -> BaseMonoid {
        self.base
    }

    pub fn config(&self) -> BuildConfig {
        self.config
    }

    pub fn has_bespoke_oracle(&self) -> bool {
        self.oracle != OracleKind::Generic
    }

    /// Number of claimed atoms, `None` if infinite.
    pub fn atom_count(&self) -> Option<usize> {
        self.atoms.len()
    }

    pub fn atom(&self, n: usize) -> Result<Option<TaggedAtom>> {
        self.atoms.atom(n)
    }

    pub fn atom_by_prime(&self, p: u64) -> Result<Option<TaggedAtom>> {
        self.atoms.by_prime(p)
    }

    pub fn tagged_atoms(&self, n: usize) -> Result<Vec<TaggedAtom>> {
        self.atoms.take(n)
    }

    /// The first `n` elements of the claimed atom set, in stream order.
    pub fn claimed_atoms(&self, n: usize) -> Result<Vec<Rat>> {
        Ok(self.atoms.take(n)?.into_iter().map(|a| a.value).collect())
    }

    /// Value of `r_n = p_n a_n`, the base element an atom's prime multiple
    /// lands on.
    pub fn atom_base_multiple(&self, n: usize) -> Result<Option<Rat>> {
        Ok(self.atoms.atom(n)?.map(|a| a.base_multiple()))
    }

    pub fn member(&self, q: &Rat) -> Result<MembershipResult> {
        match self.oracle {
            OracleKind::Generic => self.generic_member(q),
            OracleKind::NfNotAf { p } => {
                nf_not_af_member(p, q, self.config.mutation != Mutation::NfNotAfAllowEmptyDyadic)
            }
            OracleKind::FNotAa => {
                if self.config.mutation == Mutation::FNotAaRayFromHalf
                    && q >= &Rat::frac(1, 2)
                    && q < &Rat::one()
                {
                    return Ok(MembershipResult::member(Certificate::new(
                        q.clone(),
                        [(q.clone(), BigUint::one())],
                    )?));
                }
                bespoke_member_f_not_aa(q)
            }
        }
    }

    pub fn contains(&self, q: &Rat) -> Result<bool> {
        Ok(self.member(q)?.is_member())
    }

    fn require_member(&self, q: &Rat) -> Result<()> {
        if self.contains(q)? {
            Ok(())
        } else {
            Err(Error::NotAMember {
                element: q.to_string(),
                monoid: self.spec.to_string(),
            })
        }
    }

    /// Whether `a` divides `b`, i.e. `b - a` is a member. Both must be members.
    pub fn divides(&self, a: &Rat, b: &Rat) -> Result<MembershipResult> {
        self.require_member(a)?;
        self.require_member(b)?;
        self.member(&(b - a))
    }

    pub fn divides_bool(&self, a: &Rat, b: &Rat) -> Result<bool> {
        Ok(self.divides(a, b)?.is_member())
    }

    /// Private primes of `d(q)` with their forced coefficients, and what is
    /// left once those atom multiples are removed.
    fn reduce(&self, q: &Rat) -> Result<std::result::Result<(Vec<(TaggedAtom, u64)>, Rat), Obstruction>> {
        let base_primes = self.base.primes().unwrap_or_default();
        let mut coefficients = Vec::new();
        let mut rest = q.clone();
        for p in prime_factors(q.denom())? {
            if base_primes.contains(&p) {
                continue;
            }
            let Some(atom) = self.atoms.by_prime(p)? else {
                return Ok(Err(Obstruction::Support { prime: p }));
            };
            let v = vp(q, p);
            if v < -1 {
                return Ok(Err(Obstruction::Valuation {
                    prime: p,
                    element: v,
                    floor: -1,
                }));
            }
            let e = forced_residue(q, &atom.value, p);
            rest = rest - atom.value.scale(e);
            coefficients.push((atom, e));
        }
        Ok(Ok((coefficients, rest)))
    }

    fn generic_member(&self, q: &Rat) -> Result<MembershipResult> {
        if q.is_negative() {
            return Ok(MembershipResult::non_member(Obstruction::Negative));
        }
        if q.is_zero() {
            return Ok(MembershipResult::member(Certificate::zero()));
        }
        let (coefficients, rest) = match self.reduce(q)? {
            Ok(x) => x,
            Err(ob) => return Ok(MembershipResult::non_member(ob)),
        };
        let atom_terms = coefficients
            .iter()
            .map(|(a, e)| (a.value.clone(), BigUint::from(*e)));
        if rest.is_negative() && self.config.mutation == Mutation::GenericSkipRemainderSign {
            return Ok(MembershipResult::member(Certificate::unverified(q.clone(), atom_terms)));
        }
        if !self.base.contains(&rest) {
            return Ok(MembershipResult::non_member(Obstruction::NotInBase { remainder: rest }));
        }
        let mut terms: Vec<(Rat, BigUint)> = atom_terms.collect();
        terms.extend(self.base.certificate_terms(&rest)?);
        Ok(MembershipResult::member(Certificate::new(q.clone(), terms)?))
    }

    /// Normal form of a member; `None` for non-members.
    pub fn normal_form(&self, q: &Rat) -> Result<Option<NormalForm>> {
        if self.oracle != OracleKind::Generic {
            return Err(Error::NotApplicable(format!(
                "{} has no private-prime normal form",
                self.spec
            )));
        }
        if !self.generic_member(q)?.is_member() {
            return Ok(None);
        }
        let (coefficients, base_part) = self
            .reduce(q)?
            .map_err(|ob| Error::Internal(format!("member {q} failed to reduce: {ob}")))?;
        Ok(Some(NormalForm {
            base_part,
            coefficients: coefficients.into_iter().filter(|(_, e)| *e > 0).collect(),
        }))
    }

    /// `F` restricted to its first `depth` base generators and atoms.
    pub fn truncate(&self, depth: usize) -> Result<FgPresentation> {
        if depth == 0 {
            return Err(Error::arg("truncation depth starts at 1"));
        }
        let mut gens = Vec::new();
        match self.oracle {
            OracleKind::NfNotAf { p } => {
                let gap = half_gap(p)?;
                gens.push(Rat::new(1, p)?);
                for j in 0..depth as u32 {
                    let d = Rat::inv_pow(2, j);
                    gens.push(&gap + &d);
                    gens.push(d);
                }
            }
            _ => {
                gens.extend(self.base.generators(depth));
                gens.extend(self.claimed_atoms(depth)?);
            }
        }
        FgPresentation::new(gens)
    }

    /// Whether `g` is one of the generators in the defining presentation.
    pub fn is_defining_generator(&self, g: &Rat) -> Result<bool> {
        if !g.is_positive() {
            return Ok(false);
        }
        match self.oracle {
            OracleKind::NfNotAf { p } => {
                let unit_dyadic = |x: &Rat| {
                    x.is_positive() && x.numer().is_one() && power_exponent(x.denom(), 2).is_some()
                };
                Ok(*g == Rat::new(1, p)? || unit_dyadic(g) || unit_dyadic(&(g - &half_gap(p)?)))
            }
            OracleKind::FNotAa => {
                let odd_prime_unit = g.numer().is_one()
                    && g.denom_u64().is_some_and(|d| d > 2 && crate::ratcore::is_prime(d));
                Ok(self.base.is_generator(g) || odd_prime_unit)
            }
            OracleKind::Generic => {
                if self.base.is_generator(g) {
                    return Ok(true);
                }
                let base_primes = self.base.primes().unwrap_or_default();
                for p in prime_factors(g.denom())? {
                    if !base_primes.contains(&p) {
                        return Ok(self.atoms.by_prime(p)?.is_some_and(|a| a.value == *g));
                    }
                }
                Ok(false)
            }
        }
    }

    /// A certificate is valid for the family when it re-sums and names only
    /// defining generators.
    pub fn check_certificate(&self, cert: &Certificate) -> Result<bool> {
        if !cert.verify() {
            return Ok(false);
        }
        for g in cert.terms().keys() {
            if !self.is_defining_generator(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Decomposition search for the `n`-th claimed atom inside the
    /// depth-`depth` truncation.
    pub fn is_atom_truncated(&self, n: usize, depth: usize) -> Result<AtomCheck> {
        if depth < n {
            return Err(Error::arg(format!("depth {depth} is below the atom index {n}")));
        }
        let atom = self
            .atom(n)?
            .ok_or_else(|| Error::arg(format!("{} has no atom {n}", self.spec)))?;
        self.decompose_in_truncation(&atom.value, depth)
    }

    /// Looks for `a = x + y` with `x, y` nonzero in the depth-`depth`
    /// truncation. Some summand contains a generator `g < a`, so it is enough
    /// to try `x = g` over the generators, largest first.
    pub fn decompose_in_truncation(&self, a: &Rat, depth: usize) -> Result<AtomCheck> {
        let t = self.truncate(depth)?;
        let mut undecided = false;
        for g in t.generators().iter().rev().filter(|g| *g < a) {
            let y = a - g;
            match member_fg(&t, &y)?.decided() {
                Some(true) => return Ok(AtomCheck::NotAtom { x: g.clone(), y }),
                Some(false) => {}
                None => undecided = true,
            }
        }
        if undecided {
            return Err(Error::NotApplicable(format!(
                "decomposition search for {a} exceeded the search bound at depth {depth}"
            )));
        }
        Ok(AtomCheck::AtomUpToDepth { depth })
    }

    pub fn support_descriptor(&self) -> SupportSet {
        match self.spec {
            FamilySpec::PowDenom { p } | FamilySpec::NfNotAf { p } => {
                SupportSet::finite(BTreeSet::from([2, p]))
            }
            FamilySpec::AfNotF { l } | FamilySpec::AfNotNf { l } => SupportSet::CofinalIn {
                finite: BTreeSet::from([2]),
                pool: l,
            },
            FamilySpec::FNotAa | FamilySpec::NaNotF | FamilySpec::Grams => SupportSet::AllPrimes,
            FamilySpec::LexCone => unreachable!("lexcone never builds a Family"),
        }
    }

    /// `inf v_p` over the nonzero elements.
    pub fn inf_valuation(&self, p: u64) -> Result<InfValuation> {
        require_prime(p)?;
        use InfValuation::{Finite, NegInfinity};
        Ok(match self.spec {
            FamilySpec::PowDenom { p: q } => {
                if p == q {
                    NegInfinity
                } else if p == 2 {
                    Finite(-1)
                } else {
                    Finite(0)
                }
            }
            FamilySpec::NfNotAf { p: q } => {
                if p == 2 {
                    NegInfinity
                } else if p == q {
                    Finite(-1)
                } else {
                    Finite(0)
                }
            }
            // every pool prime is eventually taken by some atom
            FamilySpec::AfNotF { l } | FamilySpec::AfNotNf { l } => {
                if p == 2 {
                    NegInfinity
                } else if crate::ratcore::primes::pool_of_prime(p) == Some(l) {
                    Finite(-1)
                } else {
                    Finite(0)
                }
            }
            FamilySpec::FNotAa => NegInfinity,
            FamilySpec::NaNotF | FamilySpec::Grams => {
                if p == 2 {
                    NegInfinity
                } else {
                    Finite(-1)
                }
            }
            FamilySpec::LexCone => unreachable!("lexcone never builds a Family"),
        })
    }

    /// Whether a member is a sum of atoms. For private-prime families this
    /// holds exactly when the base part lies in the monoid generated by the
    /// values `p_n a_n`.
    pub fn is_atomic_element(&self, x: &Rat) -> Result<bool> {
        self.require_member(x)?;
        if x.is_zero() {
            return Ok(true);
        }
        match self.spec {
            FamilySpec::FNotAa => return Ok(atomic_part_member(x)?.is_member()),
            FamilySpec::NfNotAf { p } => return Ok(x.scale(p).is_integer()),
            _ => {}
        }
        let nf = self
            .normal_form(x)?
            .ok_or_else(|| Error::Internal(format!("member {x} has no normal form")))?;
        let d = nf.base_part;
        Ok(match self.spec {
            FamilySpec::PowDenom { .. } => d.is_integer(),
            FamilySpec::AfNotF { .. } => d.is_zero() || d > Rat::one(),
            FamilySpec::NaNotF => d.is_zero() || d >= Rat::one(),
            FamilySpec::Grams => true,
            FamilySpec::AfNotNf { .. } => mersenne_cone_contains(&d)?,
            _ => unreachable!("bespoke families handled above"),
        })
    }

    /// The private prime of `a` when `a` is provably an atom: `a` is the only
    /// defining generator up to `a` with that prime in its denominator, so a
    /// split of `a` would need a smaller one.
    pub fn certify_atom(&self, a: &Rat) -> Result<Option<u64>> {
        if !a.is_positive() {
            return Ok(None);
        }
        match self.oracle {
            // coset generators all exceed 1/p once p >= 7
            OracleKind::NfNotAf { p } => Ok((*a == Rat::new(1, p)?).then_some(p)),
            // the ray starts at 1
            OracleKind::FNotAa => Ok(a
                .denom_u64()
                .filter(|&d| a.numer().is_one() && d > 2 && crate::ratcore::is_prime(d))),
            OracleKind::Generic => {
                let base_primes = self.base.primes().unwrap_or_default();
                for p in prime_factors(a.denom())? {
                    if !base_primes.contains(&p) {
                        return Ok(self
                            .atoms
                            .by_prime(p)?
                            .filter(|t| t.value == *a)
                            .map(|t| t.prime));
                    }
                }
                Ok(None)
            }
        }
    }

    /// `inf r_n` over the atoms and whether some `r_n` attains it. Only for
    /// private-prime families.
    pub fn base_multiple_floor(&self) -> Option<(Rat, bool)> {
        match self.spec {
            FamilySpec::PowDenom { .. } | FamilySpec::NaNotF => Some((Rat::one(), true)),
            FamilySpec::AfNotF { .. } => Some((Rat::one(), false)),
            FamilySpec::AfNotNf { .. } => Some((Rat::frac(1, 2), true)),
            FamilySpec::Grams => Some((Rat::zero(), false)),
            _ => None,
        }
    }

    /// Some atom with `r_n <= d`, picked in closed form and as large as the
    /// rule allows. `None` when there is none or no rule.
    pub fn atom_below_base_part(&self, d: &Rat) -> Result<Option<TaggedAtom>> {
        let one = Rat::one();
        let index = match self.spec {
            FamilySpec::PowDenom { .. } => (d >= &one).then_some(1),
            FamilySpec::AfNotF { .. } => {
                if d > &one && power_exponent(d.denom(), 2).is_some() {
                    let n = crate::ratcore::dyadic::dyadic_index_of(d)?;
                    Some(usize::try_from(n).map_err(|_| Error::arg("dyadic index overflow"))?)
                } else {
                    None
                }
            }
            FamilySpec::NaNotF => {
                if d > &one && d < &Rat::int(2) && !d.is_integer() {
                    let o = d.numer().to_u64().ok_or_else(|| Error::arg("numerator overflow"))?;
                    Some((o as usize - 1) / 2 + 1)
                } else {
                    (d >= &one).then_some(1)
                }
            }
            FamilySpec::AfNotNf { .. } => {
                if d >= &one {
                    Some(1)
                } else if d >= &Rat::frac(1, 2) {
                    let mut n = 1u32;
                    while &(Rat::one() - Rat::inv_pow(2, n + 1)) <= d {
                        n += 1;
                    }
                    Some(n as usize)
                } else {
                    None
                }
            }
            FamilySpec::Grams => {
                if d.is_positive() {
                    let mut n = 1u32;
                    while &Rat::inv_pow(2, n) > d {
                        n += 1;
                    }
                    Some(n as usize)
                } else {
                    None
                }
            }
            _ => None,
        };
        match index {
            Some(n) => self.atoms.atom(n),
            None => Ok(None),
        }
    }

    /// Atoms worth testing as divisors of the member `q`, in index order:
    /// those owning a prime of `d(q)`, the closed-form pick for the base
    /// part, and the first `depth` atoms.
    pub fn divisor_candidates(&self, q: &Rat, depth: usize) -> Result<Vec<TaggedAtom>> {
        self.require_member(q)?;
        let mut out = Vec::new();
        match self.oracle {
            OracleKind::Generic => {
                let nf = self
                    .normal_form(q)?
                    .ok_or_else(|| Error::Internal(format!("member {q} has no normal form")))?;
                out.extend(nf.coefficients.into_iter().map(|(a, _)| a));
                out.extend(self.atom_below_base_part(&nf.base_part)?);
            }
            OracleKind::FNotAa => {
                for p in prime_factors(q.denom())? {
                    if p > 2 {
                        out.extend(self.atoms.by_prime(p)?);
                    }
                }
                if q > &Rat::one() {
                    // smallest odd prime p with 1/p <= q - 1
                    let start = (q - &Rat::one()).recip()?.ceil().to_u64().unwrap_or(u64::MAX).max(3);
                    if start <= stream::PRIME_LOOKUP_CAP {
                        let p = crate::ratcore::primes::nth_prime_above(start - 1, 1);
                        out.extend(self.atoms.by_prime(p)?);
                    }
                }
            }
            OracleKind::NfNotAf { .. } => {}
        }
        out.extend(self.atoms.take(depth)?);
        out.sort_by_key(|a| a.index);
        out.dedup_by_key(|a| a.index);
        Ok(out)
    }

    /// Defining generators of the depth-`depth` truncation that are not
    /// claimed atoms.
    pub fn non_claimed_generators(&self, depth: usize) -> Result<Vec<Rat>> {
        let claimed: HashSet<Rat> = self.claimed_atoms(depth)?.into_iter().collect();
        Ok(self
            .truncate(depth)?
            .generators()
            .iter()
            .filter(|g| !claimed.contains(*g))
            .cloned()
            .collect())
    }

    /// An exact split `g = x + y` of a member, with `x` a generator of the
    /// depth-`depth` truncation and `y` a nonzero member by the oracle.
    pub fn split_generator(&self, g: &Rat, depth: usize) -> Result<Option<(Rat, Rat)>> {
        for x in self.truncate(depth)?.generators().iter().rev().filter(|x| *x < g) {
            let y = g - x;
            if self.contains(&y)? {
                return Ok(Some((x.clone(), y)));
            }
        }
        Ok(None)
    }
}

fn half_gap(p: u64) -> Result<Rat> {
    Ok(Rat::frac(1, 2) - Rat::new(1, p)?)
}

/// Whether a dyadic `d >= 0` lies in `<1 - 2^-j : j >= 1>`.
///
/// A sum of `m` generators is `m - s` with `s` a sum of exactly `m` terms
/// `2^-j`. Halving terms reaches any count above the fewest terms needed
/// for `s`, which is `floor(2s)` halves plus the binary digits of the rest.
/// That bound forces `d < m < 2d + 1`.
pub(crate) fn mersenne_cone_contains(d: &Rat) -> Result<bool> {
    if d.is_zero() {
        return Ok(true);
    }
    if power_exponent(d.denom(), 2).is_none() {
        return Err(Error::Internal(format!("base part {d} is not dyadic")));
    }
    let lo = d.floor() + 1u8;
    let hi = d.scale(2u8).floor() + 1u8;
    let mut m = lo;
    while m <= hi {
        let t = (Rat::int(m.clone()) - d).scale(2u8);
        let halves = t.floor();
        let frac = &t - &Rat::int(halves.clone());
        let digits = frac.numer().magnitude().count_ones();
        if halves + BigInt::from(digits) <= m {
            return Ok(true);
        }
        m += 1u8;
    }
    Ok(false)
}

impl Monoid {
    pub fn spec(&self) -> FamilySpec {
        match self {
            Monoid::Puiseux(f) => f.spec(),
            Monoid::LexCone(_) => FamilySpec::LexCone,
        }
    }

    pub fn as_family(&self) -> Result<&Family> {
        match self {
            Monoid::Puiseux(f) => Ok(f),
            Monoid::LexCone(_) => Err(not_puiseux()),
        }
    }
}

/// The generic private-prime oracle. Refuses the two families whose primes
/// are shared between generators.
pub fn structured_member(f: &Family, q: &Rat) -> Result<MembershipResult> {
    if f.has_bespoke_oracle() {
        return Err(Error::NotApplicable(format!(
            "{} shares primes between generators; use its own oracle",
            f.spec()
        )));
    }
    f.generic_member(q)
}

#[cfg(test)]
mod tests;
