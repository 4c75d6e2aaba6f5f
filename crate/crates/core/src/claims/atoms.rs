use serde::Serialize;

use crate::error::Result;
use crate::families::{AtomCheck, Family};
use crate::ratcore::Rat;

/// `generator = x + y` with both parts nonzero members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSplit {
    pub generator: Rat,
    pub x: Rat,
    pub y: Rat,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomClaimsReport {
    pub monoid: String,
    pub depth: usize,
    /// Claimed atoms that survived the decomposition search.
    pub atoms: Vec<Rat>,
    pub atom_failures: Vec<String>,
    pub splits: Vec<GeneratorSplit>,
    /// Non-claimed generators with no verified split.
    pub unrefuted: Vec<Rat>,
}

impl AtomClaimsReport {
    pub fn passed(&self) -> bool {
        self.atom_failures.is_empty() && self.unrefuted.is_empty() && !self.atoms.is_empty()
    }
}

/// The first `count` claimed atoms must survive the decomposition search,
/// atom `n` in the truncation of depth `max(depth, n)` so that it is one of
/// the generators. Every other generator of the depth-`depth` truncation
/// must split, and each split is re-checked by summation and the oracle.
/// Split parts come from one level deeper, since the smallest generator
/// only splits into halves (or thirds) of itself.
pub fn atom_claims(f: &Family, count: usize, depth: usize) -> Result<AtomClaimsReport> {
    let count = f.atom_count().map_or(count, |n| n.min(count));
    let mut report = AtomClaimsReport {
        monoid: f.spec().to_string(),
        depth,
        atoms: Vec::new(),
        atom_failures: Vec::new(),
        splits: Vec::new(),
        unrefuted: Vec::new(),
    };
    for n in 1..=count {
        match f.is_atom_truncated(n, depth.max(n)) {
            Ok(AtomCheck::AtomUpToDepth { .. }) => {
                report.atoms.push(f.atom(n)?.expect("atom exists below the count").value)
            }
            Ok(AtomCheck::NotAtom { x, y }) => report.atom_failures.push(format!("atom {n} splits as {x} + {y}")),
            Err(e) => report.atom_failures.push(format!("atom {n}: {e}")),
        }
    }
    for g in f.non_claimed_generators(depth)? {
        match f.split_generator(&g, depth + 1)? {
            Some((x, y))
                if &x + &y == g
                    && x.is_positive()
                    && y.is_positive()
                    && f.contains(&x)?
                    && f.contains(&y)? =>
            {
                report.splits.push(GeneratorSplit { generator: g, x, y })
            }
            _ => report.unrefuted.push(g),
        }
    }
    Ok(report)
}
