//! Reproducible claim checks: oracle against brute force, atom sets, the
//! per-family facts and the property audit, each reduced to a pass/fail
//! record with re-checkable evidence.

mod atoms;
mod crosscheck;
mod suite;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::families::{build_family_with, BuildConfig, FamilySpec, Monoid, Mutation};

pub use atoms::{atom_claims, AtomClaimsReport, GeneratorSplit};
pub use crosscheck::{crosscheck, grid_points, CrosscheckReport, Disagreement, Grid};
pub use suite::{
    atom_records, audit_records, crosscheck_records, family_fact_records, run_suite, ATOM_COUNT, ATOM_DEPTH, CROSSCHECK_DEPTHS,
};

/// Failures kept per record; the count is always exact.
const KEEP_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimRecord {
    /// Acceptance criterion the record belongs to, e.g. `1` or `3d`.
    pub criterion: String,
    pub id: String,
    /// Short statement of what is being checked.
    pub anchor: String,
    pub status: ClaimStatus,
    /// Number of individual cases examined.
    pub checked: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    pub evidence: Value,
}

impl ClaimRecord {
    pub fn passed(&self) -> bool {
        self.status == ClaimStatus::Pass
    }
}

/// Settings for the whole suite. Everything randomized draws from `seed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Atom depth for witness searches and the property audit.
    pub depth: usize,
    pub seed: u64,
    pub grid: Grid,
    pub crosscheck_depths: Vec<usize>,
    /// Truncation depth for the atom-set checks.
    pub atom_depth: usize,
    /// Claimed atoms checked per family.
    pub atom_count: usize,
    pub mutation: Mutation,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            depth: 50,
            seed: 20_240_917,
            grid: Grid::default(),
            crosscheck_depths: CROSSCHECK_DEPTHS.to_vec(),
            atom_depth: ATOM_DEPTH,
            atom_count: ATOM_COUNT,
            mutation: Mutation::None,
        }
    }
}

impl SuiteConfig {
    pub fn build_config(&self) -> BuildConfig {
        BuildConfig {
            mutation: self.mutation,
            ..BuildConfig::default()
        }
    }

    pub fn build(&self, spec: FamilySpec) -> Result<Monoid> {
        build_family_with(spec, self.build_config())
    }
}

/// Collects failures for one record; errors from the code under test count
/// as failures rather than aborting the suite.
pub(crate) struct Tally {
    pub checked: usize,
    pub failures: Vec<String>,
    pub failure_count: usize,
}

impl Tally {
    pub fn new() -> Self {
        Tally {
            checked: 0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.failure_count += 1;
        if self.failures.len() < KEEP_FAILURES {
            self.failures.push(why.into());
        }
    }

    /// Counts one case, failing it with `why` unless `ok`.
    pub fn case(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(why());
        }
    }

    pub fn finish(self, criterion: &str, id: &str, anchor: &str, evidence: Value) -> ClaimRecord {
        let status = if self.failure_count == 0 && self.checked > 0 {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        let mut failures = self.failures;
        if self.checked == 0 {
            failures.push("no cases were checked".into());
        }
        ClaimRecord {
            criterion: criterion.into(),
            id: id.into(),
            anchor: anchor.into(),
            status,
            checked: self.checked,
            failure_count: self.failure_count,
            failures,
            evidence,
        }
    }
}

/// Runs `body`, turning an error into a failed record.
pub(crate) fn claim(
    criterion: &str,
    id: &str,
    anchor: &str,
    body: impl FnOnce(&mut Tally) -> Result<Value>,
) -> ClaimRecord {
    let mut t = Tally::new();
    match body(&mut t) {
        Ok(evidence) => t.finish(criterion, id, anchor, evidence),
        Err(e) => {
            t.fail(format!("error: {e}"));
            t.finish(criterion, id, anchor, Value::Null)
        }
    }
}
