use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, Monoid};
use crate::fgmonoid::{member_fg, FgPresentation, MembershipResult};
use crate::ratcore::Rat;

/// Test points `a / b` with `1 <= a <= a_max` and `b` a product of
/// `2^i` (`i <= two_exp`), 3 and the first `tagged` private primes, each
/// odd factor used at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub a_max: u64,
    pub two_exp: u32,
    pub tagged: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            a_max: 64,
            two_exp: 6,
            tagged: 3,
        }
    }
}

/// `a_max,b_pool` where `b_pool` is the number of private primes in the
/// denominator pool.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |i: usize, what: &str| -> Result<u64> {
            parts[i]
                .parse()
                .map_err(|_| Error::arg(format!("grid {what} {:?} is not a nonnegative integer", parts[i])))
        };
        match parts.len() {
            2 => {
                let a_max = num(0, "a_max")?;
                if a_max == 0 {
                    return Err(Error::arg("grid a_max must be positive"));
                }
                Ok(Grid {
                    a_max,
                    tagged: num(1, "b_pool")? as usize,
                    ..Grid::default()
                })
            }
            _ => Err(Error::arg(format!("grid {s:?} is not of the form a_max,b_pool"))),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a_max, self.tagged)
    }
}

pub fn grid_points(f: &Family, grid: &Grid) -> Result<Vec<Rat>> {
    let mut pool: BTreeSet<u64> = [3].into();
    for atom in f.tagged_atoms(grid.tagged)? {
        if atom.prime != 2 {
            pool.insert(atom.prime);
        }
    }
    let pool: Vec<u64> = pool.into_iter().collect();
    let mut odd = vec![1u64];
    for p in &pool {
        let more: Vec<u64> = odd.iter().map(|d| d * p).collect();
        odd.extend(more);
    }
    let mut out = BTreeSet::new();
    for d in &odd {
        for i in 0..=grid.two_exp {
            let b = Rat::int(*d) * Rat::int(1i64 << i);
            for a in 1..=grid.a_max {
                out.insert(Rat::int(a) / b.clone());
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub q: Rat,
    /// Truncation depth that found `q` when the oracle rejected it.
    pub depth: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub monoid: String,
    pub grid: Grid,
    pub depths: Vec<usize>,
    pub checked: usize,
    pub members: usize,
    pub non_members: usize,
    /// Truncated searches that hit their bound; they count as failed searches.
    pub truncation_unknown: usize,
    /// Sorted by denominator, then numerator, so the first is the smallest.
    pub disagreements: Vec<Disagreement>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

enum PointOutcome {
    Member,
    NonMember { unknown: usize },
    Bad(Disagreement),
}

fn check_point(f: &Family, truncations: &[(usize, FgPresentation)], q: &Rat) -> Result<PointOutcome> {
    let bad = |depth, reason: String| {
        Ok(PointOutcome::Bad(Disagreement {
            q: q.clone(),
            depth,
            reason,
        }))
    };
    match f.member(q)? {
        MembershipResult::Member { certificate } => {
            if certificate.element() != q || !f.check_certificate(&certificate)? {
                return bad(None, format!("oracle certificate {certificate} does not re-sum to {q} over defining generators"));
            }
            Ok(PointOutcome::Member)
        }
        MembershipResult::NonMember { .. } => {
            let mut unknown = 0;
            for (depth, t) in truncations {
                match member_fg(t, q)? {
                    MembershipResult::Member { certificate } => {
                        return bad(Some(*depth), format!("oracle rejects {q}, truncation finds {certificate}"));
                    }
                    MembershipResult::Unknown { .. } => unknown += 1,
                    MembershipResult::NonMember { .. } => {}
                }
            }
            Ok(PointOutcome::NonMember { unknown })
        }
        MembershipResult::Unknown { .. } => bad(None, format!("oracle undecided on {q}")),
    }
}

/// Oracle against brute force on the truncations: every truncation member
/// must be an oracle member, and every oracle member must come with a
/// certificate over defining generators.
pub fn crosscheck(m: &Monoid, grid: &Grid, depths: &[usize]) -> Result<CrosscheckReport> {
    let f = m.as_family().map_err(|_| {
        Error::arg(format!("{} has a closed-form membership test and no truncations to compare", m.spec()))
    })?;
    if depths.is_empty() {
        return Err(Error::arg("crosscheck needs at least one truncation depth"));
    }
    let truncations = depths
        .iter()
        .map(|&d| Ok((d, f.truncate(d)?)))
        .collect::<Result<Vec<_>>>()?;
    let points = grid_points(f, grid)?;
    let outcomes = points
        .par_iter()
        .map(|q| check_point(f, &truncations, q))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CrosscheckReport {
        monoid: f.spec().to_string(),
        grid: *grid,
        depths: depths.to_vec(),
        checked: points.len(),
        members: 0,
        non_members: 0,
        truncation_unknown: 0,
        disagreements: Vec::new(),
    };
    for o in outcomes {
        match o {
            PointOutcome::Member => report.members += 1,
            PointOutcome::NonMember { unknown } => {
                report.non_members += 1;
                report.truncation_unknown += unknown;
            }
            PointOutcome::Bad(d) => report.disagreements.push(d),
        }
    }
    report
        .disagreements
        .sort_by(|x, y| (x.q.denom(), x.q.numer()).cmp(&(y.q.denom(), y.q.numer())));
    Ok(report)
}
