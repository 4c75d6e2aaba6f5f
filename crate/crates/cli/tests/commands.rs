use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puiseux")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn member_exit_codes() {
    assert_eq!(code(&["member", "family:nf-not-af{p=7}", "1/2"]), 0);
    assert_eq!(code(&["member", "family:af-not-f{ℓ=1}", "1/3"]), 1);
    // 7/12 = a/3 + b/2 forces 4a + 6b = 7
    assert_eq!(code(&["member", "fg:1/2,1/3", "7/12"]), 1);
    assert_eq!(code(&["member", "fg:1/2,1/3", "5/6"]), 0);
    assert_eq!(code(&["member", "family:lexcone", "-3,1"]), 0);
    assert_eq!(code(&["member", "family:lexcone", "(-3,0)"]), 1);
}

#[test]
fn member_certificate_resums() {
    let (c, v) = json(&["member", "family:grams", "5/8", "--depth", "6"]);
    assert_eq!(c, 0);
    assert_eq!(v["membership"]["result"], "member");
    assert_eq!(v["truncation"]["depth"], 6);
    for cert in [&v["membership"]["certificate"], &v["truncation"]["membership"]["certificate"]] {
        let mut sum = puiseux::Rat::zero();
        for t in cert["terms"].as_array().expect("terms") {
            let g: puiseux::Rat = t["generator"].as_str().unwrap().parse().unwrap();
            let k: i64 = t["coefficient"].as_str().unwrap().parse().unwrap();
            sum = sum + g.scale(k);
        }
        assert_eq!(sum, puiseux::Rat::frac(5, 8));
    }
}

#[test]
fn parse_errors_exit_two_with_position() {
    for args in [
        &["member", "family:pow-denom{q=3}", "1/2"][..],
        &["member", "fig:1", "1"],
        &["member", "fg:1/2", "1/x"],
        &["member", "family:pow-denom{p=4}", "1/2"],
        &["divides", "family:lexcone", "1", "2"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error:"), "{args:?}: {err}");
    }
    let err = String::from_utf8(run(&["member", "family:pow-denom{q=3}", "1/2"]).stderr).unwrap();
    assert!(err.contains("position 17") && err.contains("\n                   ^"), "{err}");
}

#[test]
fn divides_and_atoms() {
    assert_eq!(code(&["divides", "family:nf-not-af{p=7}", "1/7", "1/2"]), 1);
    assert_eq!(code(&["divides", "family:nf-not-af{p=7}", "1/7", "1"]), 0);
    assert_eq!(code(&["divides", "family:lexcone", "0,1", "-5,2"]), 0);
    let (c, v) = json(&["atoms", "family:af-not-nf{l=1}", "--count", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["atoms"][0]["value"], "1/6");
    assert_eq!(v["atoms"][1]["value"], "3/28");
    let (_, v) = json(&["atoms", "fg:2/3,1/3,1"]);
    assert_eq!(v["atoms"], serde_json::json!(["1/3"]));
}

#[test]
fn props_property_exit_code_follows_verdict() {
    assert_eq!(code(&["props", "family:na-not-f", "--depth", "6", "--property", "f"]), 1);
    assert_eq!(code(&["props", "family:f-not-aa", "--depth", "6", "--property", "furstenberg"]), 0);
    assert_eq!(code(&["props", "family:f-not-aa", "--depth", "6"]), 0);
    assert_eq!(code(&["props", "fg:1/2", "--depth", "6"]), 2);
    let (_, v) = json(&["props", "family:lexcone", "--depth", "6", "--property", "quasi-atomic"]);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["depth", "monoid", "property", "sample", "verdict", "witness"]);
    assert_eq!(v["verdict"], "refuted");
}

#[test]
fn crosscheck_defaults_and_errors() {
    assert_eq!(code(&["crosscheck", "family:af-not-nf{ℓ=1}"]), 0);
    assert_eq!(code(&["crosscheck", "family:grams"]), 0);
    assert_eq!(code(&["crosscheck", "family:lexcone"]), 2);
    assert_eq!(code(&["crosscheck", "fg:1/2"]), 2);
    let (c, v) = json(&["crosscheck", "family:pow-denom{p=3}", "--grid", "8,1", "--depth", "9"]);
    assert_eq!(c, 0);
    assert_eq!(v["depths"], serde_json::json!([3, 6, 9]));
    assert_eq!(v["grid"]["a_max"], 8);
    assert_eq!(code(&["crosscheck", "family:grams", "--grid", "8"]), 2);
}

fn report(dir: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["report", "--depth", "5", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    code(&args)
}

#[test]
fn report_is_deterministic_and_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(report(&a, &[]), 0);
    assert_eq!(report(&b, &[]), 0);
    let ja = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.join("report.json")).unwrap());
    let doc: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(doc["passed"], true);
    let crits: std::collections::BTreeSet<&str> =
        doc["records"].as_array().unwrap().iter().map(|r| r["criterion"].as_str().unwrap()).collect();
    for c in ["1", "2", "3a", "3b", "3c", "3d", "3e", "3f", "3g", "3h", "4"] {
        assert!(crits.contains(c), "missing criterion {c}");
    }
    let md = std::fs::read_to_string(a.join("report.md")).unwrap();
    assert!(md.contains("records pass"));
}

#[test]
fn tampered_oracle_fails_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(report(tmp.path(), &["--mutation", "nf-not-af-allow-empty-dyadic"]), 1);
    let md = std::fs::read_to_string(tmp.path().join("report.md")).unwrap();
    assert!(md.contains("## Failures"));
    assert_eq!(report(tmp.path(), &["--mutation", "no-such-thing"]), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("suite.toml");
    std::fs::write(&cfg, "depth = 7\nseed = 3\n\n[grid]\na_max = 16\n").unwrap();
    let out = run(&["report", "--config", cfg.to_str().unwrap(), "--depth", "5", "--json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["depth"], 5);
    assert_eq!(doc["config"]["seed"], 3);
    assert_eq!(doc["config"]["grid"]["a_max"], 16);
    std::fs::write(&cfg, "dpeth = 7\n").unwrap();
    assert_eq!(code(&["report", "--config", cfg.to_str().unwrap()]), 2);
}
