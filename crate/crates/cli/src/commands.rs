use anyhow::{bail, Result};
use serde_json::{json, Value};

use puiseux::claims::{crosscheck, Grid};
use puiseux::families::{LexCone, Monoid};
use puiseux::fgmonoid::{atoms_fg, divides_fg, member_fg, MembershipResult};
use puiseux::props::{diagram_audit, Property, Verdict};

use crate::spec::{parse_point, parse_rat, MonoidSpec, Target};

pub const AFFIRMATIVE: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const UNKNOWN: u8 = 2;

/// A finished command: exit code plus both renderings.
#[derive(Debug)]
pub struct Output {
    pub code: u8,
    pub text: String,
    pub json: Value,
}

fn result_code(r: &MembershipResult) -> u8 {
    match r {
        MembershipResult::Member { .. } => AFFIRMATIVE,
        MembershipResult::NonMember { .. } => NEGATIVE,
        MembershipResult::Unknown { .. } => UNKNOWN,
    }
}

fn describe(r: &MembershipResult) -> String {
    match r {
        MembershipResult::Member { certificate } => format!("member: {certificate}"),
        MembershipResult::NonMember { obstruction } => format!("non-member: {obstruction}"),
        MembershipResult::Unknown { reason, .. } => format!("unknown: {reason}"),
    }
}

fn boolean(monoid: &MonoidSpec, what: Value, yes: bool, text: String) -> Output {
    Output {
        code: if yes { AFFIRMATIVE } else { NEGATIVE },
        text,
        json: json!({ "monoid": monoid.to_string(), "query": what, "result": yes }),
    }
}

/// With `depth` set, a family answer is also compared with brute force on
/// the depth-`depth` truncation.
pub fn member(spec: &MonoidSpec, element: &str, depth: Option<usize>) -> Result<Output> {
    let (q, result, truncation) = match spec.build()? {
        Target::Monoid(Monoid::LexCone(cone)) => {
            let p = parse_point(element)?;
            let yes = cone.contains(p);
            let text = format!("{p} {} {spec}", if yes { "is in" } else { "is not in" });
            return Ok(boolean(spec, json!(p), yes, text));
        }
        Target::Fg(p) => {
            let q = parse_rat(element)?;
            let r = member_fg(&p, &q)?;
            (q, r, None)
        }
        Target::Monoid(Monoid::Puiseux(f)) => {
            let q = parse_rat(element)?;
            let r = f.member(&q)?;
            let t = match depth {
                Some(d) => Some((d, member_fg(&f.truncate(d)?, &q)?)),
                None => None,
            };
            (q, r, t)
        }
    };
    let mut text = format!("{q} in {spec}: {}", describe(&result));
    let mut json = json!({ "monoid": spec.to_string(), "element": q, "membership": result });
    if let Some((d, t)) = truncation {
        text.push_str(&format!("\ntruncation at depth {d}: {}", describe(&t)));
        json["truncation"] = json!({ "depth": d, "membership": t });
    }
    Ok(Output {
        code: result_code(&result),
        text,
        json,
    })
}

pub fn divides(spec: &MonoidSpec, a: &str, b: &str) -> Result<Output> {
    let (a, b, result) = match spec.build()? {
        Target::Monoid(Monoid::LexCone(cone)) => {
            let (pa, pb) = (parse_point(a)?, parse_point(b)?);
            let yes = cone.divides(pa, pb)?;
            let text = format!("{pa} {} {pb} in {spec}", if yes { "divides" } else { "does not divide" });
            return Ok(boolean(spec, json!({ "a": pa, "b": pb }), yes, text));
        }
        Target::Fg(p) => {
            let (a, b) = (parse_rat(a)?, parse_rat(b)?);
            let r = divides_fg(&p, &a, &b)?;
            (a, b, r)
        }
        Target::Monoid(Monoid::Puiseux(f)) => {
            let (a, b) = (parse_rat(a)?, parse_rat(b)?);
            let r = f.divides(&a, &b)?;
            (a, b, r)
        }
    };
    let verb = match result_code(&result) {
        AFFIRMATIVE => "divides",
        NEGATIVE => "does not divide",
        _ => "may or may not divide",
    };
    Ok(Output {
        code: result_code(&result),
        text: format!("{a} {verb} {b} in {spec}; b - a is a {}", describe(&result)),
        json: json!({ "monoid": spec.to_string(), "a": a, "b": b, "difference": result }),
    })
}

pub fn atoms(spec: &MonoidSpec, count: usize) -> Result<Output> {
    let (lines, atoms): (Vec<String>, Value) = match spec.build()? {
        Target::Fg(p) => {
            let atoms = atoms_fg(&p)?;
            (atoms.iter().map(|a| a.to_string()).collect(), json!(atoms))
        }
        Target::Monoid(Monoid::Puiseux(f)) => {
            let atoms = f.tagged_atoms(count)?;
            let lines = atoms
                .iter()
                .map(|a| format!("a_{} = {} (prime {})", a.index, a.value, a.prime))
                .collect();
            (lines, json!(atoms))
        }
        Target::Monoid(Monoid::LexCone(_)) => (vec![LexCone::ATOM.to_string()], json!([LexCone::ATOM])),
    };
    Ok(Output {
        code: AFFIRMATIVE,
        text: format!("atoms of {spec}:\n  {}", lines.join("\n  ")),
        json: json!({ "monoid": spec.to_string(), "atoms": atoms }),
    })
}

fn verdict_code(v: Verdict) -> u8 {
    match v.holds() {
        Some(true) => AFFIRMATIVE,
        Some(false) => NEGATIVE,
        None => UNKNOWN,
    }
}

/// The property audit. With `property` set, the exit code is that
/// property's verdict; otherwise it says whether the audit is consistent.
pub fn props(spec: &MonoidSpec, depth: usize, property: Option<Property>) -> Result<Output> {
    let Target::Monoid(m) = spec.build()? else {
        bail!("props needs a family, not {spec}");
    };
    let report = diagram_audit(&m, depth)?;
    let mut text = format!("{spec} at depth {depth}\n");
    for s in &report.statuses {
        if property.is_none_or(|p| p == s.property) {
            let kind = s
                .witness
                .as_ref()
                .and_then(|w| serde_json::to_value(w).ok())
                .and_then(|v| v.get("kind").and_then(Value::as_str).map(str::to_owned))
                .unwrap_or_default();
            text.push_str(&format!("  {:<20} {:<18} {kind}\n", s.property.to_string(), s.verdict.to_string()));
        }
    }
    let consistent = report.is_consistent();
    text.push_str(if consistent {
        "audit consistent"
    } else {
        "audit INCONSISTENT"
    });
    for (p, why) in &report.verification_failures {
        text.push_str(&format!("\n  {p}: {why}"));
    }
    let code = match property {
        Some(p) => report.status(p).map_or(UNKNOWN, |s| verdict_code(s.verdict)),
        None if consistent => AFFIRMATIVE,
        None => NEGATIVE,
    };
    let json = match property {
        Some(p) => json!(report.status(p)),
        None => json!({ "audit": report, "consistent": consistent }),
    };
    Ok(Output { code, text, json })
}

/// Truncation depths for `--depth n`: a third, two thirds and all of `n`.
pub fn crosscheck_depths(n: usize) -> Vec<usize> {
    let mut d: Vec<usize> = [n / 3, 2 * n / 3, n].into_iter().filter(|&k| k > 0).collect();
    d.dedup();
    d
}

pub fn run_crosscheck(spec: &MonoidSpec, grid: &Grid, depths: &[usize]) -> Result<Output> {
    let Target::Monoid(m) = spec.build()? else {
        bail!("crosscheck needs a family, not {spec}");
    };
    let r = crosscheck(&m, grid, depths)?;
    let mut text = format!(
        "{spec}: {} points ({} members, {} non-members) against truncations {:?}, {} disagreements",
        r.checked,
        r.members,
        r.non_members,
        r.depths,
        r.disagreements.len()
    );
    if let Some(d) = r.disagreements.first() {
        text.push_str(&format!("\nsmallest counterexample {}: {}", d.q, d.reason));
    }
    Ok(Output {
        code: if r.passed() { AFFIRMATIVE } else { NEGATIVE },
        text,
        json: serde_json::to_value(&r)?,
    })
}
