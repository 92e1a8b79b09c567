use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

fn agv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("agv-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn verify_joint_motion_objective_is_true() {
    let out = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "<<1,2>>(G F x1=1 & G F x2=1)",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: true"), "{text}");
    assert!(text.contains("states: 16"), "{text}");
}

#[test]
fn agverify_derives_the_crossed_grant_objectives() {
    let out = agv(&[
        "agverify",
        "--rule",
        "rk",
        "--k",
        "1",
        "--model",
        "tgc2",
        "--obj",
        "1:G F s=2",
        "--obj",
        "2:G F s=1",
        "--assume",
        "1:A_all",
        "--assume",
        "2:A_all",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: derived"), "{text}");
    assert!(text.contains("conclusion: <<1,2>>"), "{text}");
    assert!(text.contains("guarantee ok (k=1"), "{text}");
}

#[test]
fn agverify_reports_premise_one_failure_for_own_motion_objectives() {
    let out = agv(&[
        "agverify",
        "--rule",
        "rk",
        "--k",
        "1",
        "--model",
        "tgc2",
        "--obj",
        "1:G F x1=1",
        "--obj",
        "2:G F x2=1",
        "--assume",
        "1:A_all",
        "--assume",
        "2:A_all",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: premise-failed"), "{text}");
    assert!(text.contains("premise 1 (strategy synthesis)"), "{text}");
    assert!(text.contains("part 1 {train1}"), "{text}");
}

#[test]
fn semantics_flag_accepts_only_lowercase_ir() {
    let ok = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "F s!=0",
        "--semantics",
        "ir",
    ]);
    assert_eq!(code(&ok), 0);
    let bad = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "F s!=0",
        "--semantics",
        "iR",
    ]);
    assert_eq!(code(&bad), 3);
    assert!(stderr(&bad).contains("iR"), "{}", stderr(&bad));
}

#[test]
fn json_report_has_exactly_the_documented_fields() {
    let out = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "<<1,2>>(G F s=1 & G F s=2)",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let obj = doc.as_object().expect("object");
    let keys: BTreeSet<&str> = obj.keys().map(|k| k.as_str()).collect();
    let expected: BTreeSet<&str> = [
        "result",
        "states",
        "transitions",
        "strategies_examined",
        "time_ms",
        "witness",
        "counterexample",
    ]
    .into_iter()
    .collect();
    assert_eq!(keys, expected);
    assert_eq!(obj["result"], "true");
    assert_eq!(obj["states"], 16);
    assert!(obj["witness"].is_object());
    assert!(obj["counterexample"].is_null());
}

#[test]
fn false_verdict_exits_one_and_carries_a_counterexample() {
    let out = agv(&["verify", "--model", "tgc2", "--formula", "G F s=1", "--json"]);
    assert_eq!(code(&out), 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["result"], "false");
    assert!(doc["witness"].is_null());
    let cycle = doc["counterexample"]["cycle"].as_array().expect("cycle");
    assert!(!cycle.is_empty());
    for letter in cycle {
        assert_ne!(letter["s"], 1, "cycle must avoid the first grant");
    }
}

#[test]
fn serialized_model_file_verifies_like_the_builtin() {
    let (sys, assumptions) = agv_core::generators::gen_tgc(2);
    let text = agv_core::textfmt::serialize(&sys, &assumptions);
    let path = temp_path("tgc2.agv");
    std::fs::write(&path, text).expect("write temp model");

    let from_file = agv(&[
        "verify",
        "--model",
        path.to_str().unwrap(),
        "--formula",
        "<<1,2>>(G F s=1 & G F s=2)",
        "--json",
    ]);
    let from_builtin = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "<<1,2>>(G F s=1 & G F s=2)",
        "--json",
    ]);
    assert_eq!(code(&from_file), 0, "stderr: {}", stderr(&from_file));
    let a: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&from_builtin)).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["states"], b["states"]);
    assert_eq!(a["transitions"], b["transitions"]);
    std::fs::remove_file(&path).ok();
}

#[test]
fn model_errors_exit_three() {
    let missing = agv(&["verify", "--model", "no-such-file.agv", "--formula", "F s=1"]);
    assert_eq!(code(&missing), 3);

    let zero_trains = agv(&["verify", "--model", "tgc0", "--formula", "F s=1"]);
    assert_eq!(code(&zero_trains), 3);

    let path = temp_path("broken.agv");
    std::fs::write(&path, "domain 2\nagent a\n  statevars v\n").expect("write temp model");
    let broken = agv(&[
        "verify",
        "--model",
        path.to_str().unwrap(),
        "--formula",
        "F v=1",
    ]);
    assert_eq!(code(&broken), 3);
    assert!(stderr(&broken).contains("line"), "{}", stderr(&broken));
    std::fs::remove_file(&path).ok();

    let usage = agv(&["verify", "--model", "tgc2"]);
    assert_eq!(code(&usage), 3, "missing --formula is a usage error");

    let help = agv(&["--help"]);
    assert_eq!(code(&help), 0);
}

#[test]
fn guarantee_command_reproduces_the_known_verdicts() {
    let holds = agv(&[
        "guarantee",
        "--model",
        "tgc2",
        "--agents",
        "2,3",
        "--assumption",
        "A_012",
    ]);
    assert_eq!(code(&holds), 0, "stderr: {}", stderr(&holds));
    assert!(stdout(&holds).contains("result: true"));

    let fails = agv(&[
        "guarantee",
        "--model",
        "tgc2",
        "--agents",
        "2,3",
        "--assumption",
        "A_1",
    ]);
    assert_eq!(code(&fails), 1);
    let text = stdout(&fails);
    assert!(text.contains("result: false"), "{text}");
    assert!(text.contains("counterexample:"), "{text}");
}

#[test]
fn bench_prints_the_tally_line() {
    let out = agv(&["bench", "--model", "tgc2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("#st 16"), "{text}");
    assert!(text.contains("#tr 47"), "{text}");
    assert!(text.contains("DFS"), "{text}");
}

#[test]
fn compose_writes_a_loadable_module_file() {
    let path = temp_path("composite.agv");
    let out = agv(&[
        "compose",
        "--model",
        "tgc2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("declared states: 27 (reachable 16)"));

    let reload = agv(&[
        "verify",
        "--model",
        path.to_str().unwrap(),
        "--formula",
        "F s!=0",
    ]);
    assert_eq!(code(&reload), 0, "stderr: {}", stderr(&reload));
    assert!(stdout(&reload).contains("result: true"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn part_rule_with_trivial_assumption_matches_direct_verification() {
    let rule = agv(&[
        "agverify",
        "--rule",
        "part",
        "--k",
        "auto",
        "--model",
        "tgc2",
        "--part",
        "1,2",
        "--obj",
        "1:G F s=1",
        "--obj",
        "1:G F s=2",
        "--assume",
        "1:trivial",
    ]);
    assert_eq!(code(&rule), 0, "stderr: {}", stderr(&rule));
    assert!(stdout(&rule).contains("result: derived"));

    let direct = agv(&[
        "verify",
        "--model",
        "tgc2",
        "--formula",
        "<<1,2>>(G F s=1 & G F s=2)",
    ]);
    assert_eq!(code(&direct), 0);
}

#[test]
fn exit_codes_follow_the_verdict_not_the_command() {
    // Same command, three verdicts, three codes.
    let t = agv(&["verify", "--model", "tgc2", "--formula", "F s!=0"]);
    assert_eq!(code(&t), 0);
    let f = agv(&["verify", "--model", "tgc2", "--formula", "G s=0"]);
    assert_eq!(code(&f), 1);
    let u = agv(&["verify", "--model", "tgc2", "--formula", "F s=="]);
    assert_eq!(code(&u), 3, "parse error is a usage error");
}
