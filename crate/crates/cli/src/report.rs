use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use puiseux::claims::{run_suite, ClaimRecord, SuiteConfig};

/// Everything needed to rerun and re-check the suite. No timestamps, so
/// the same config gives byte-identical output.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: SuiteConfig,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub records: Vec<ClaimRecord>,
}

pub fn build(cfg: &SuiteConfig) -> Result<ReportDocument> {
    let records = run_suite(cfg)?;
    let failed = records.iter().filter(|r| !r.passed()).count();
    Ok(ReportDocument {
        tool: "puiseux",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        passed: failed == 0,
        total: records.len(),
        failed,
        records,
    })
}

pub fn markdown(doc: &ReportDocument) -> String {
    let mut s = String::new();
    let c = &doc.config;
    let _ = writeln!(s, "# puiseux claim report\n");
    let _ = writeln!(
        s,
        "version {}, depth {}, seed {}, grid {}, crosscheck depths {:?}, mutation {}\n",
        doc.version,
        c.depth,
        c.seed,
        c.grid,
        c.crosscheck_depths,
        c.mutation.name()
    );
    let _ = writeln!(s, "{} of {} records pass.\n", doc.total - doc.failed, doc.total);
    let _ = writeln!(s, "| criterion | id | status | cases | claim |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for r in &doc.records {
        let status = if r.passed() { "pass" } else { "**FAIL**" };
        let _ = writeln!(s, "| {} | `{}` | {status} | {} | {} |", r.criterion, r.id, r.checked, r.anchor);
    }
    let failing: Vec<&ClaimRecord> = doc.records.iter().filter(|r| !r.passed()).collect();
    if !failing.is_empty() {
        let _ = writeln!(s, "\n## Failures\n");
        for r in failing {
            let _ = writeln!(s, "### {}\n", r.id);
            for f in &r.failures {
                let _ = writeln!(s, "- {f}");
            }
            if r.failure_count > r.failures.len() {
                let _ = writeln!(s, "- ... {} more", r.failure_count - r.failures.len());
            }
            s.push('\n');
        }
    }
    s
}

pub fn json(doc: &ReportDocument) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

/// Writes `report.json` and `report.md` into `dir`.
pub fn write(doc: &ReportDocument, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in [("report.json", json(doc)?), ("report.md", markdown(doc))] {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
