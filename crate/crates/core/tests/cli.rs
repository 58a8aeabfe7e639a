use std::path::Path;
use std::process::{Command, Output};

use fairshare::gen_thm43;
use fairshare::io::{from_json, parse_instance, SolveResultFile};
use fairshare::verify::VerifyReport;

fn fairshare(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairshare"))
        .args(args)
        .current_dir(dir)
        .env_remove("FAIRSHARE_ORACLE_CAP")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn gen_thm43_matches_the_construction() {
    let dir = tempfile::tempdir().unwrap();
    let out = fairshare(&["gen", "--family", "thm43", "--n", "2", "-o", "t.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(parse_instance(&read(dir.path(), "t.json")).unwrap(), gen_thm43(2).unwrap());
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = fairshare(
            &["gen", "--family", "random-bxos", "--n", "3", "--m", "8", "--seed", "7", "-o", name],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(read(dir.path(), "a.json"), read(dir.path(), "b.json"));
    let stdout =
        fairshare(&["gen", "--family", "random-bxos", "--n", "3", "--m", "8", "--seed", "7"], dir.path()).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap(), read(dir.path(), "a.json"));
}

#[test]
fn missing_n_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fairshare(&["gen", "--family", "thm43"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
}

#[test]
fn shares_report_values() {
    let dir = tempfile::tempdir().unwrap();
    fairshare(&["gen", "--family", "thm43", "--n", "2", "-o", "t.json"], dir.path());
    let out = fairshare(&["shares", "t.json", "--notion", "wmms"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let shares = fairshare::io::parse_shares(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let values: Vec<String> = shares.iter().map(|s| s.value.to_string()).collect();
    assert_eq!(values, ["1/2", "2"]);
    assert!(shares.iter().all(|s| s.witness.is_none()));

    fairshare(&["gen", "--family", "prop41", "--n", "2", "--epsilon", "1/10", "-o", "p.json"], dir.path());
    let out =
        fairshare(&["shares", "p.json", "--notion", "aps", "--agent", "1", "--witness", "-o", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let shares = fairshare::io::parse_shares(&read(dir.path(), "s.json")).unwrap();
    assert_eq!(shares.len(), 1);
    assert_eq!(shares[0].value.to_string(), "1/10");
    assert!(shares[0].witness.is_some());

    let out = fairshare(&["shares", "p.json", "--notion", "aps", "--agent", "5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_agent_aps_is_the_whole_value() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("one.json"),
        r#"{"goods": 3, "agents": [{"entitlement": "1", "valuation": {"type": "additive", "weights": {"0": "1/2", "2": "3"}}}]}"#,
    )
    .unwrap();
    let out = fairshare(&["shares", "one.json", "--notion", "aps"], dir.path());
    let shares = fairshare::io::parse_shares(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(shares[0].value.to_string(), "7/2");
}

#[test]
fn cap_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    fairshare(
        &["gen", "--family", "random-bxos", "--n", "4", "--m", "14", "--seed", "1", "-o", "big.json"],
        dir.path(),
    );
    let out = fairshare(&["shares", "big.json", "--notion", "wmms"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle cap"));
    let out = fairshare(&["solve", "big.json", "--algorithm", "wmms-rr"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_fairshare"))
        .args(["shares", "big.json", "--notion", "wmms", "--agent", "0"])
        .current_dir(dir.path())
        .env("FAIRSHARE_ORACLE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_and_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fairshare(&["gen", "--family", "random-bxos", "--n", "3", "--m", "7", "--seed", "5", "-o", "i.json"], d);
    let out = fairshare(&["solve", "i.json", "--algorithm", "aps-half", "-o", "r.json"], d);
    assert_eq!(out.status.code(), Some(0));
    let result: SolveResultFile = from_json(&read(d, "r.json")).unwrap();
    assert!(result.passes >= 1);
    let out = fairshare(&["verify", "i.json", "r.json", "--guarantee", "aps-half", "-o", "v.json", "--table"], d);
    assert_eq!(out.status.code(), Some(0));
    let report: VerifyReport = from_json(&read(d, "v.json")).unwrap();
    assert!(report.overall);
    assert!(String::from_utf8_lossy(&out.stdout).contains("overall: PASS"));

    // rerun: byte-identical artifacts
    fairshare(&["solve", "i.json", "--algorithm", "aps-half", "-o", "r2.json"], d);
    fairshare(&["verify", "i.json", "r2.json", "--guarantee", "aps-half", "-o", "v2.json"], d);
    assert_eq!(read(d, "r.json"), read(d, "r2.json"));
    assert_eq!(read(d, "v.json"), read(d, "v2.json"));
}

#[test]
fn binadd_solve_matches_hand_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("b.json"),
        r#"{"goods": 3, "agents": [
            {"entitlement": "1/3", "valuation": {"type": "binary_additive", "desired": [0, 1, 2]}},
            {"entitlement": "2/3", "valuation": {"type": "binary_additive", "desired": [0, 1, 2]}}]}"#,
    )
    .unwrap();
    let out = fairshare(&["solve", "b.json", "--algorithm", "wmms-binadd"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let result: SolveResultFile = from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(result.allocation.bundles, vec![vec![0], vec![1, 2]]);
    std::fs::write(dir.path().join("r.json"), fairshare::io::to_json(&result)).unwrap();
    let out = fairshare(&["verify", "b.json", "r.json", "--guarantee", "wmms-exact"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn round_robin_on_thm43_and_supplied_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fairshare(&["gen", "--family", "thm43", "--n", "2", "-o", "t.json"], d);
    let out = fairshare(&["solve", "t.json", "--algorithm", "wmms-rr", "-o", "r.json"], d);
    assert_eq!(out.status.code(), Some(0));
    let out = fairshare(&["verify", "t.json", "r.json", "--guarantee", "wmms-over-n"], d);
    assert_eq!(out.status.code(), Some(0));
    let result: SolveResultFile = from_json(&read(d, "r.json")).unwrap();
    assert!(result.wmms_partitions_used.is_none());

    let with_partitions = read(d, "t.json").trim_end().trim_end_matches('}').to_string()
        + r#", "wmmsPartitions": [{"bundles": [[0], [1, 2]]}, {"bundles": [[2], [0, 1]], "value": "2"}]}"#;
    std::fs::write(d.join("tp.json"), with_partitions).unwrap();
    let out = fairshare(&["solve", "tp.json", "--algorithm", "wmms-rr", "-o", "rp.json"], d);
    assert_eq!(out.status.code(), Some(0));
    let result: SolveResultFile = from_json(&read(d, "rp.json")).unwrap();
    assert_eq!(result.wmms_partitions_used.unwrap().len(), 2);
    assert_eq!(result.oracle_calls, 0);

    let wrong = read(d, "tp.json").replace(r#""value": "2""#, r#""value": "3""#);
    std::fs::write(d.join("bad.json"), wrong).unwrap();
    let out = fairshare(&["solve", "bad.json", "--algorithm", "wmms-rr"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn violations_and_class_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fairshare(&["gen", "--family", "thm43", "--n", "2", "-o", "t.json"], d);
    std::fs::write(d.join("starve.json"), r#"{"bundles": [[], [0, 1, 2]], "complete": true}"#).unwrap();
    let out = fairshare(&["verify", "t.json", "starve.json", "--guarantee", "wmms-over-n"], d);
    assert_eq!(out.status.code(), Some(1));
    let report: VerifyReport = from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(!report.per_agent[0].pass && report.per_agent[1].pass);

    std::fs::write(d.join("overlap.json"), r#"{"bundles": [[0, 1], [1]], "complete": false}"#).unwrap();
    let out = fairshare(&["verify", "t.json", "overlap.json", "--guarantee", "aps-half"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("good 1 assigned twice"));

    let out = fairshare(&["solve", "t.json", "--algorithm", "wmms-binadd"], d);
    assert_eq!(out.status.code(), Some(2));
    fairshare(&["gen", "--family", "random-xos", "--n", "2", "--m", "4", "-o", "x.json"], d);
    let out = fairshare(&["solve", "x.json", "--algorithm", "aps-half"], d);
    assert_eq!(out.status.code(), Some(2));
    let out = fairshare(&["solve", "missing.json", "--algorithm", "aps-half"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_instance_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst: serde_json::Value =
        serde_json::from_str(&fairshare::io::instance_to_json(&gen_thm43(2).unwrap())).unwrap();
    inst["agents"][1]["entitlement"] = "1/2".into();
    std::fs::write(dir.path().join("bad.json"), inst.to_string()).unwrap();
    let out = fairshare(&["shares", "bad.json", "--notion", "mms"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entitlements sum 5/6 ≠ 1"));
}
