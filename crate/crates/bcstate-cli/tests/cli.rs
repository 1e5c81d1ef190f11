//! End-to-end tests of the `bcstate` binary: exit codes, output formats,
//! round-trips through the library's own readers, and byte reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bcstate::{RateRegion, SimReport};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcstate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("test file written");
    path
}

/// Noiseless binary pipe to both receivers, singleton state.
const BIT_PIPE: &str = r#"{
  "x_size": 2, "s_size": 1, "y1_size": 2, "y2_size": 2,
  "p_s": [1.0],
  "p_trans": [[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,1.0]]]]
}"#;

/// Both receivers observe X ⊕ S with S uniform.
const FLIP: &str = r#"{
  "x_size": 2, "s_size": 2, "y1_size": 2, "y2_size": 2,
  "p_s": [0.5, 0.5],
  "p_trans": [
    [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,1.0]]],
    [[[0.0,0.0],[0.0,1.0]],[[1.0,0.0],[0.0,0.0]]]
  ]
}"#;

/// Uniform binary U0 carried straight onto the channel.
const U0_SCHEME: &str = r#"{
  "u0_size": 2, "u1_size": 1, "u2_size": 1,
  "p_aux": [[[[0.5]],[[0.5]]]],
  "gamma": [[[[0]]],[[[1]]]]
}"#;

/// Same carrier, with a state-indexed symbol map (here state-oblivious) as a
/// causal configuration requires.
const U0_SCHEME_CAUSAL: &str = r#"{
  "u0_size": 2, "u1_size": 1, "u2_size": 1,
  "p_aux": [[[[0.5]],[[0.5]]]],
  "gamma": [[[[0,0]]],[[[1,1]]]]
}"#;

const CAUSAL_CFG: &str = r#"{"csit":"causal","state_at_rx1":false,"state_at_rx2":false}"#;

const SMALL_BUDGET: &str = r#"{
  "n_random": 6, "n_refine": 12, "seed": 9,
  "cardinalities": [2, 1, 1],
  "weight_set": [[1.0, 0.0, 0.0, 0.0, 0.0]]
}"#;

#[test]
fn a_bad_channel_fails_validation_with_the_row_detail() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{
          "x_size": 2, "s_size": 1, "y1_size": 2, "y2_size": 2,
          "p_s": [1.1],
          "p_trans": [[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,1.0]]]]
        }"#,
    );
    let out = run(&["validate", "--channel", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("sums to 1.1"),
        "expected the row-sum detail, got: {}",
        stderr(&out)
    );
}

#[test]
fn a_missing_input_file_is_an_io_error() {
    let out = run(&["validate", "--channel", "/nonexistent/ch.json"]);
    assert_eq!(code(&out), 66, "stderr: {}", stderr(&out));
}

#[test]
fn malformed_flags_are_usage_errors() {
    let out = run(&["region", "--no-such-flag"]);
    assert_eq!(code(&out), 64);
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", BIT_PIPE);
    let sch = write(dir.path(), "sch.json", U0_SCHEME);
    let out = run(&[
        "region",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        sch.to_str().unwrap(),
        "--family",
        "not-a-family",
    ]);
    assert_eq!(code(&out), 64, "stderr: {}", stderr(&out));
}

#[test]
fn builtin_certification_reports_equal_and_exits_zero() {
    for name in ["causal-th1", "rmsi-causal-th2", "rmsi-noncausal-th2"] {
        let out = run(&["fme", "--builtin", name]);
        assert_eq!(code(&out), 0, "{name} stderr: {}", stderr(&out));
        assert!(
            stdout(&out).contains("verdict: EQUAL"),
            "{name} stdout: {}",
            stdout(&out)
        );
    }
}

#[test]
fn a_user_system_file_is_reduced_and_printed() {
    let dir = TempDir::new().unwrap();
    let sys = write(
        dir.path(),
        "sys.txt",
        "# split R1 into two sub-streams, bounded separately\n\
         R11 + R12 <= I(U1;Y~1|U0)\n\
         R1 <= R11 + R12\n\
         R11 <= I(A;B)\n\
         R12 <= I(C;D)\n",
    );
    let out = run(&["fme", "--system", sys.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("reduced rows"), "stdout: {text}");
    assert!(text.contains("R1"), "stdout: {text}");
    // The split rates must be gone from the projected system.
    assert!(!text.contains("R11"), "stdout: {text}");
}

#[test]
fn region_output_parses_back_with_five_rows() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", FLIP);
    let sch = write(dir.path(), "sch.json", U0_SCHEME_CAUSAL);
    let cfg = write(dir.path(), "cfg.json", CAUSAL_CFG);
    let out_path = dir.path().join("region.json");
    let out = run(&[
        "region",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        sch.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--family",
        "unified-rmsi",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let region = RateRegion::from_json(&text).expect("region JSON round-trips");
    assert_eq!(region.rows.len(), 5);
    // Without --out the same text goes to stdout.
    let piped = run(&[
        "region",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        sch.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--family",
        "unified-rmsi",
    ]);
    assert_eq!(stdout(&piped).trim(), text.trim());
}

#[test]
fn seeded_commands_are_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", FLIP);
    let cfg = write(dir.path(), "cfg.json", CAUSAL_CFG);
    let budget = write(dir.path(), "budget.json", SMALL_BUDGET);
    let args = |out: &Path, csv: &Path| {
        vec![
            "frontier".to_string(),
            "--channel".into(),
            ch.to_str().unwrap().into(),
            "--config".into(),
            cfg.to_str().unwrap().into(),
            "--family".into(),
            "causal-no-rmsi".into(),
            "--budget".into(),
            budget.to_str().unwrap().into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
            "--csv".into(),
            csv.to_str().unwrap().into(),
        ]
    };
    let (o1, c1) = (dir.path().join("f1.json"), dir.path().join("f1.csv"));
    let (o2, c2) = (dir.path().join("f2.json"), dir.path().join("f2.csv"));
    let r1 = bin().args(args(&o1, &c1)).output().unwrap();
    let r2 = bin().args(args(&o2, &c2)).output().unwrap();
    assert_eq!(code(&r1), 0, "stderr: {}", stderr(&r1));
    assert_eq!(code(&r2), 0);
    assert_eq!(r1.stdout, r2.stdout);
    assert_eq!(
        std::fs::read(&o1).unwrap(),
        std::fs::read(&o2).unwrap(),
        "frontier JSON must not vary across reruns"
    );
    assert_eq!(std::fs::read(&c1).unwrap(), std::fs::read(&c2).unwrap());
}

#[test]
fn capacity_demands_the_degradedness_assertion() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", FLIP);
    let budget = write(dir.path(), "budget.json", SMALL_BUDGET);
    let base = [
        "capacity",
        "--channel",
        ch.to_str().unwrap(),
        "--variant",
        "th3",
        "--budget",
        budget.to_str().unwrap(),
    ];
    let refused = run(&base);
    assert_eq!(code(&refused), 1);
    assert!(
        stderr(&refused).contains("--assert-degraded"),
        "stderr: {}",
        stderr(&refused)
    );
    let mut accepted = base.to_vec();
    accepted.push("--assert-degraded");
    let ok = run(&accepted);
    assert_eq!(code(&ok), 0, "stderr: {}", stderr(&ok));
}

#[test]
fn inclusion_verifies_and_reports_the_exact_verdict() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", FLIP);
    let budget = write(
        dir.path(),
        "budget.json",
        r#"{
          "n_random": 4, "n_refine": 6, "seed": 1,
          "cardinalities": [2, 1, 1],
          "weight_set": [[1.0, 0.0, 0.0, 0.0, 0.0]]
        }"#,
    );
    let out_path = dir.path().join("inc.json");
    let out = run(&[
        "inclusion",
        "--channel",
        ch.to_str().unwrap(),
        "--budget",
        budget.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["holds_exactly"], serde_json::Value::Bool(true));
}

#[test]
fn quiet_leaves_stdout_machine_clean_and_stderr_empty() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", BIT_PIPE);
    let sch = write(dir.path(), "sch.json", U0_SCHEME);
    let out = run(&[
        "--quiet",
        "region",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        sch.to_str().unwrap(),
        "--family",
        "causal-no-rmsi",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).is_empty(), "stderr: {}", stderr(&out));
    RateRegion::from_json(&stdout(&out)).expect("stdout is exactly the region JSON");
}

#[test]
fn simulate_sweeps_and_both_outputs_parse() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", BIT_PIPE);
    let sch = write(dir.path(), "sch.json", U0_SCHEME);
    let sim = write(
        dir.path(),
        "sim.json",
        r#"{
          "n": 8,
          "rates": {"r0": 0.5, "r1": 0.0, "r2": 0.0, "r3": 0.0, "r4": 0.0,
                    "r11": 0.0, "r12": 0.0, "r21": 0.0, "r22": 0.0,
                    "rp0": 0.0, "rp1": 0.0, "rp2": 0.0},
          "eps_prime": 0.1, "eps1": 0.2, "eps2": 0.2,
          "trials": 100, "seed": 5
        }"#,
    );
    let json_path = dir.path().join("sweep.json");
    let csv_path = dir.path().join("sweep.csv");
    let out = run(&[
        "simulate",
        "--channel",
        ch.to_str().unwrap(),
        "--scheme",
        sch.to_str().unwrap(),
        "--sim",
        sim.to_str().unwrap(),
        "--ns",
        "8,16",
        "--out",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let reports: Vec<SimReport> =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap())
            .expect("sweep JSON parses back");
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].n, 8);
    assert_eq!(reports[1].n, 16);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 3, "header plus one row per blocklength");
    assert!(csv.starts_with("n,p_e,ci_low,ci_high"));
}
