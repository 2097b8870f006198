use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tourpart::complete::{PartitionCertificate, CERTIFICATE_VERSION};
use tourpart::oracle::bruteforce_connectivity;
use tourpart::profile::Profile;
use tourpart::Tournament;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tourpart")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tourpart-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn rotational_seven_connectivity_matches_oracle() {
    let d = scratch("rot");
    let f = d.join("r7.trn");
    assert!(run(&["gen", "--model", "rotational", "--n", "7", "-o", f.to_str().unwrap()]).status.success());
    let t = Tournament::from_trn(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let golden = bruteforce_connectivity(&t).unwrap();
    let out = run(&["conn", f.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["connectivity"], golden);
    assert_eq!(v["version"], 1);
}

#[test]
fn corrupted_certificate_names_the_failing_part() {
    let d = scratch("corrupt");
    // two 3-cycles, every arc from the first to the second
    let t = Tournament::from_fn(6, |i, j| if i / 3 == j / 3 { j == i + 1 } else { true });
    let tf = d.join("t.trn");
    std::fs::write(&tf, t.to_trn()).unwrap();
    let mut cert = PartitionCertificate {
        version: CERTIFICATE_VERSION,
        n: 6,
        k: 1,
        t: 2,
        seed: 0,
        profile: (&Profile::tiny()).into(),
        parts: vec![vec![0, 1, 2], vec![3, 4, 5]],
        stage_log: Vec::new(),
    };
    let cf = d.join("c.json");
    std::fs::write(&cf, serde_json::to_string(&cert).unwrap()).unwrap();
    assert!(run(&["verify", cf.to_str().unwrap(), tf.to_str().unwrap()]).status.success());

    cert.parts = vec![vec![0, 1], vec![2, 3, 4, 5]];
    std::fs::write(&cf, serde_json::to_string(&cert).unwrap()).unwrap();
    let out = run(&["verify", cf.to_str().unwrap(), tf.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = json(&out.stderr);
    assert_eq!(err["error"], "invalid-certificate");
    assert!(err["detail"].as_str().unwrap().contains("[0, 1]"), "{err}");
}

#[test]
fn transitive_input_fails_with_transcript() {
    let d = scratch("transitive");
    let f = d.join("t.trn");
    std::fs::write(&f, Tournament::from_fn(400, |i, j| i < j).to_trn()).unwrap();
    let out = run(&["partition", f.to_str().unwrap(), "--k", "1", "--t", "2", "--profile", "desk"]);
    assert!(!out.status.success());
    let transcript = json(&out.stdout);
    assert!(!transcript["stage_log"].as_array().unwrap().is_empty());
    assert_eq!(json(&out.stderr)["error"], "partition-failed");
}

#[test]
fn paper_profile_is_refused() {
    let d = scratch("paper");
    let f = d.join("u.trn");
    assert!(run(&["gen", "--model", "uniform", "--n", "50", "--seed", "4", "-o", f.to_str().unwrap()]).status.success());
    let out = run(&["partition", f.to_str().unwrap(), "--k", "1", "--t", "2", "--profile", "paper"]);
    assert!(!out.status.success());
    assert_eq!(json(&out.stderr)["error"], "infeasible-profile");
}

#[test]
fn malformed_inputs_give_machine_readable_errors() {
    let d = scratch("bad");
    let f = d.join("bad.trn");
    std::fs::write(&f, "not a tournament\n").unwrap();
    let out = run(&["conn", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["error"], "malformed-input");

    let out = run(&["conn", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"], "invalid-arguments");

    let out = run(&["bounds", "hoeffding", "--eta1", "1", "--eta2", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_command_reports_none_for_transitive() {
    let d = scratch("oracle");
    let f = d.join("t.trn");
    std::fs::write(&f, Tournament::from_fn(6, |i, j| i < j).to_trn()).unwrap();
    let out = run(&["oracle", f.to_str().unwrap(), "--k", "1", "--t", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out.stdout)["result"], "none-exists");
}

#[test]
fn experiment_with_zero_seeds_is_header_only() {
    let out = run(&["experiment", "--n", "8", "--k", "1", "--t", "2", "--seeds", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "seed,n,k,t,connectivity,result,elapsed_ms\n");
}
