use std::process::Command;

use diffam::cli::run;
use serde_json::Value;

const EDF19: &str = r#"{"group":{"cyclic":[19]},"sets":[[1,7,11],[4,9,6],[16,17,5]]}"#;
const Z10_CODE: &str = r#"{"group":{"cyclic":[10]},"sources":[{"set":[0]},{"set":[5]},{"set":[1,9]},{"set":[2,3]}]}"#;

fn diffam(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["diffam"];
    all.extend_from_slice(args);
    let out = run(all);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    assert_eq!(v["exit_code"], out.exit_code);
    (v, out.exit_code)
}

#[test]
fn verify_edf_passes() {
    let (v, code) = diffam(&["verify", "--type", "edf", "--family", EDF19]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["result"]["witnessed"], "(19,3,3,3)-EDF");
    let (v, code) = diffam(&["verify", "--type", "bedf", "--lambda", "2", "--family", EDF19]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["report"]["counterexample"]["observed"], 3);
}

#[test]
fn group_can_be_given_separately() {
    let (v, code) = diffam(&["verify", "--type", "ds", "--group", r#"{"cyclic":[21]}"#, "--family", "[[3,6,12,7,14]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["witnessed"], "(21,5,1)-DS");
}

#[test]
fn weak_eval_of_mixed_size_code() {
    let (v, code) = diffam(&["eval", "--mode", "weak", "--code", Z10_CODE]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["optimum"], "1/2");
    assert_eq!(v["result"]["classification"]["weak_r"], true);
    let (v, code) = diffam(&["to-family", "--type", "pedf", "--code", Z10_CODE]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["error"]["kind"], "precondition");
}

#[test]
fn full_table_lists_every_offset() {
    let (v, _) = diffam(&["eval", "--mode", "strong", "--full-table", "--code", Z10_CODE]);
    let per = v["result"]["per_source"].as_array().unwrap();
    assert_eq!(per.len(), 4);
    assert!(per.iter().all(|s| s["table"].as_array().unwrap().len() == 9));
}

#[test]
fn construct_and_relate() {
    let (v, code) = diffam(&["construct", "--recipe", "tonchev", "--params", "q=19,u=3,l=3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["witnessed"], "(19,3,3,3)-EDF");
    let (v, code) = diffam(&["construct", "--recipe", "tonchev", "--params", "q=19,u=3,l=2"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["error"]["kind"], "parity");
    let (v, code) = diffam(&["relate", "--from", "edf", "--to", "bedf", "--family", EDF19]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "pass");
    let (v, code) = diffam(&["relate", "--from", "edf", "--to", "sedf", "--family", EDF19]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["error"]["kind"], "lattice");
}

#[test]
fn search_exit_codes() {
    let none = r#"{"group":{"cyclic":[9]},"type":"sedf","m":3,"k":2,"lambda":1}"#;
    let (v, code) = diffam(&["search", "--spec", none]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["outcome"], "exhausted_no_solution");
    let found = r#"{"group":{"cyclic":[10]},"type":"sedf","m":2,"k":3,"lambda":1}"#;
    let (v, code) = diffam(&["search", "--spec", found]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["outcome"], "found");
    let (v, code) = diffam(&["search", "--spec", found, "--mode", "count", "--budget-nodes", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["outcome"], "budget_exhausted");
    assert_eq!(v["result"]["nodes"], 3);
}

#[test]
fn search_output_does_not_depend_on_jobs() {
    let spec = r#"{"group":{"cyclic":[19]},"type":"edf","m":3,"k":3,"lambda":3,"mode":"count"}"#;
    let one = run(["diffam", "search", "--spec", spec, "--jobs", "1"]);
    let four = run(["diffam", "search", "--spec", spec, "--jobs", "4"]);
    assert_eq!(one, four);
}

#[test]
fn malformed_json_is_a_usage_error_with_position() {
    let out = run(["diffam", "verify", "--type", "edf", "--family", "{\"group\":\n{\"cyclic\":[19]},"]);
    assert_eq!(out.exit_code, 2);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let msg = v["result"]["error"]["message"].as_str().unwrap();
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn unknown_flags_and_commands_are_rejected() {
    assert_eq!(run(["diffam", "verify", "--type", "edf", "--family", EDF19, "--bogus"]).exit_code, 2);
    assert_eq!(run(["diffam", "frobnicate"]).exit_code, 2);
    assert_eq!(run(["diffam", "verify", "--type", "xdf", "--family", EDF19]).exit_code, 2);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["diffam", "classify", "--code", Z10_CODE],
        vec!["diffam", "diff", "--op", "external", "--family", EDF19, "--format", "table"],
        vec!["diffam", "reproduce-paper"],
    ] {
        assert_eq!(run(args.clone()), run(args));
    }
}

#[test]
fn table_format_prints_frequency_rows() {
    let fam = r#"{"group":{"cyclic":[13]},"sets":[[0,1,4],[3,5,10],[2,6,7,9],[8],[11],[12]]}"#;
    let out = run(["diffam", "diff", "--op", "outgoing", "--index", "1", "--family", fam, "--format", "table"]);
    assert_eq!(out.exit_code, 0);
    assert!(out.stdout.contains("frequency   3  2  3  3  2  2  2  2  3  3  2  3"), "{}", out.stdout);
}

#[test]
fn family_file_input() {
    let path = std::env::temp_dir().join(format!("diffam-cli-{}.json", std::process::id()));
    std::fs::write(&path, EDF19).unwrap();
    let (v, code) = diffam(&["verify", "--type", "edf", "--family", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(v["result"]["witnessed"], "(19,3,3,3)-EDF");
}

#[test]
fn binary_exit_status_and_env_jobs() {
    let out = Command::new(env!("CARGO_BIN_EXE_diffam"))
        .args(["search", "--spec", r#"{"group":{"cyclic":[3,3]},"type":"sedf","m":3,"k":2,"lambda":1}"#])
        .env("DIFFAM_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["outcome"], "exhausted_no_solution");

    let out = Command::new(env!("CARGO_BIN_EXE_diffam")).args(["reproduce-paper", "--format", "table"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
}
