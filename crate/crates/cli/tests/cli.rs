use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn triplepass(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplepass"))
        .current_dir(dir)
        .env_remove("TRIPLEPASS_CAP")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn demo_reproduces_failure_and_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = triplepass(dir.path(), &["demo"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("v1 = (1,1)") && text.contains("v4 = (1,1)"));
    assert!(text.contains("round trip FAILED"));
    assert!(text.contains("v4 = (2,3)"));

    let out = triplepass(dir.path(), &["demo", "--format", "json"]);
    let v = json(&out);
    let s = &v["sessions"];
    assert_eq!(s[0]["v1"], serde_json::json!([1, 1]));
    assert_eq!(s[0]["v2"], serde_json::json!([0, 1]));
    assert_eq!(s[0]["v3"], serde_json::json!([0, 1]));
    assert_eq!(s[0]["v4"], serde_json::json!([1, 1]));
    assert_eq!(s[0]["success"], false);
    assert_eq!(s[0]["v1_reachable"]["contains_zero"], false);
    assert_eq!(s[1]["success"], true);
}

#[test]
fn demo_variants() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&triplepass(
        dir.path(),
        &[
            "demo",
            "--instance",
            "diagonal",
            "--p",
            "5",
            "--seed",
            "9",
            "--format",
            "json",
        ],
    ));
    assert_eq!(v["sessions"][0]["success"], true);
    assert_eq!(v["sessions"][0]["v4"], v["sessions"][0]["v"]);

    for seed in ["1", "2", "3"] {
        let out = triplepass(dir.path(), &["demo", "--rational", "--seed", seed, "--format", "json"]);
        assert_eq!(code(&out), 0);
        let s = &json(&out)["sessions"][0];
        if s["masks_commute"] == true {
            assert_eq!(s["success"], true);
        }
        assert!(s["v"][0].is_string() || s["v"][0].is_i64());
    }
}

#[test]
fn run_writes_seeded_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&triplepass(
        dir.path(),
        &[
            "run",
            "--instance",
            "diagonal",
            "--p",
            "5",
            "--sessions",
            "5",
            "--seed",
            "7",
        ],
    ));
    assert_eq!(v["schema"], "triplepass.run/1");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["successes"], 5);
    let ts = v["transcripts"].as_array().unwrap();
    assert_eq!(ts.len(), 5);
    for (i, t) in ts.iter().enumerate() {
        let keys: Vec<&str> = t.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["instance", "p", "v1", "v2", "v3", "session"]);
        assert_eq!(t["session"], i as u64);
    }

    let empty = json(&triplepass(
        dir.path(),
        &["run", "--instance", "diagonal", "--sessions", "0"],
    ));
    assert_eq!(empty["transcripts"], serde_json::json!([]));

    let csv = triplepass(
        dir.path(),
        &[
            "run",
            "--instance",
            "general-linear",
            "--p",
            "2",
            "--sessions",
            "3",
            "--format",
            "csv",
        ],
    );
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("session,success,v1,v2,v3"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = triplepass(dir.path(), &["run", "--instance", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown instance kind"));
    assert_eq!(code(&triplepass(dir.path(), &["run"])), 2);
    assert_eq!(
        code(&triplepass(
            dir.path(),
            &["check", "--instance", "diagonal", "--p", "4"]
        )),
        2
    );
    assert_eq!(
        code(&triplepass(dir.path(), &["check", "--instance", "rational-gl2"])),
        2
    );
    assert_eq!(code(&triplepass(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn analyze_instance_leakage() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&triplepass(
        dir.path(),
        &["analyze", "--instance", "diagonal", "--p", "5"],
    ));
    assert_eq!(v["schema"], "triplepass.leakage/1");
    assert_eq!(v["leakage"]["mutual_information_bits"], 2.0);
    assert_eq!(v["leakage"]["zero_leakage"], false);

    let v = json(&triplepass(
        dir.path(),
        &[
            "analyze",
            "--instance",
            "custom",
            "--p",
            "5",
            "--generator",
            "[[1,0],[0,1]]",
        ],
    ));
    assert_eq!(v["leakage"]["mutual_information_bits"], 2.0);
    assert_eq!(v["leakage"]["secret_entropy_bits"], 2.0);

    let v = json(&triplepass(dir.path(), &["analyze", "--instance", "trivial"]));
    assert_eq!(v["leakage"]["zero_leakage"], true);
    assert_eq!(v["leakage"]["mutual_information_bits"], 0.0);

    let v = json(&triplepass(
        dir.path(),
        &[
            "analyze",
            "--instance",
            "diagonal",
            "--p",
            "5",
            "--prior",
            "1:1/2,2:1/2",
        ],
    ));
    assert_eq!(v["leakage"]["mutual_information_bits"], 1.0);
}

#[test]
fn analyze_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = triplepass(
        d,
        &[
            "run",
            "--instance",
            "diagonal",
            "--p",
            "5",
            "--sessions",
            "4",
            "--lab-view",
            "--out",
            "run.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let v = json(&triplepass(d, &["analyze", "--transcript", "run.json"]));
    assert_eq!(v["schema"], "triplepass.posterior/1");
    for (post, attack) in v["posteriors"]
        .as_array()
        .unwrap()
        .iter()
        .zip(v["quotient_attack"].as_array().unwrap())
    {
        assert_eq!(post["support"].as_array().unwrap().len(), 1);
        assert_eq!(attack["matches_truth"], true);
        assert!(post["transcript"].get("truth").is_none());
    }

    std::fs::write(
        d.join("one.json"),
        r#"{"instance":"diagonal-p5","p":5,"v1":[4,3],"v2":[2,2],"v3":[1,2]}"#,
    )
    .unwrap();
    let v = json(&triplepass(d, &["analyze", "--transcript", "one.json"]));
    let post = &v["posteriors"][0]["posterior"];
    assert_eq!(post[1]["s"], 2);
    assert_eq!(post[1]["p"], "1");
    assert_eq!(post[0]["p"], "0");
    assert_eq!(v["quotient_attack"][0]["s_hat"], 2);

    std::fs::write(
        d.join("bad.json"),
        r#"{"instance":"diagonal-p5","p":5,"v1":[4,3],"v2":[0,2],"v3":[1,2]}"#,
    )
    .unwrap();
    let out = triplepass(d, &["analyze", "--transcript", "bad.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("inconsistent transcript"));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = triplepass(d, &["check", "--instance", "trivial"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["all_pass"], true);

    let out = triplepass(d, &["check", "--instance", "diagonal", "--p", "5"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["revalidated"], true);
    let te = &v["reports"][1];
    assert_eq!(te["condition"], "transcript-equivalence");
    assert_eq!(te["verdict"], "fail");
    assert!(te["counterexample"]["s_prime"].is_u64());

    let out = triplepass(
        d,
        &["check", "--instance", "general-linear", "--p", "3", "--cap", "100"],
    );
    assert_eq!(code(&out), 3);
    let out = Command::new(env!("CARGO_BIN_EXE_triplepass"))
        .current_dir(d)
        .env("TRIPLEPASS_CAP", "100")
        .args(["check", "--instance", "general-linear", "--p", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("work cap exceeded"));
}

#[test]
fn descriptor_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("inst.json"),
        r#"{"name":"shear","kind":"custom","p":3,"generators":["[[1,1],[0,1]]@F3"]}"#,
    )
    .unwrap();
    let v = json(&triplepass(d, &["check", "--instance", "inst.json"]));
    assert_eq!(v["instance"], "shear");
    assert_eq!(v["config"]["instance"]["name"], "shear");
}

#[test]
fn search_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = triplepass(dir.path(), &["search", "--p", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["search"]["subgroups"].as_array().unwrap().len(), 6);
    assert_eq!(v["search"]["complete"], true);
    assert_eq!(v["search"]["candidates"], serde_json::json!([]));

    let out = triplepass(dir.path(), &["search", "--p", "3", "--cap", "5000"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["search"]["complete"], false);
}
