use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spi"))
        .args(args)
        .output()
        .expect("spi runs")
}

fn program(name: &str) -> String {
    let path: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "core",
        "programs",
        &format!("{name}.spi"),
    ]
    .iter()
    .collect();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_record(o: &Output) -> Value {
    let text = stdout(o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "{text}");
    serde_json::from_str(lines[0]).unwrap()
}

#[test]
fn transparent_program_exits_zero() {
    let o = spi(&["transparent", &program("buyer_seller")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Transparent\n");
}

#[test]
fn cycle_witness_names_both_edges() {
    let o = spi(&["--json", "transparent", &program("free_cycle")]);
    assert_eq!(o.status.code(), Some(1));
    let r = json_record(&o);
    assert_eq!(r["command"], "transparent");
    assert_eq!(r["verdict"], "not-transparent");
    let mut chans: Vec<&str> = r["data"]["cycle"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            assert_eq!((e["a"].as_u64(), e["b"].as_u64()), (Some(1), Some(2)));
            e["chan"].as_str().unwrap()
        })
        .collect();
    chans.sort();
    assert_eq!(chans, ["k'", "k''"]);
}

#[test]
fn end_is_inhabited_by_inaction() {
    let o = spi(&["inhabit", "end", "--chan", "k"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn service_payload_extends_the_environment() {
    let o = spi(&["--json", "inhabit", "![<?[int].end>].end", "--chan", "k"]);
    let r = json_record(&o);
    let services = r["data"]["services"].as_object().unwrap();
    assert_eq!(services.len(), 1);
    assert_eq!(services.values().next().unwrap(), "<?[int].end>");
}

#[test]
fn ill_typed_input_is_a_negative_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spi");
    std::fs::write(&path, "sessions k; k!(1).0 | k!(2).0").unwrap();
    let o = spi(&["--json", "check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = json_record(&o);
    assert_eq!(r["verdict"], "ill-typed");
    assert!(r["data"]["rule"].is_string());
}

#[test]
fn parse_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.spi");
    std::fs::write(&path, "k!(1).").unwrap();
    let o = spi(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(spi(&["check"]).status.code(), Some(2));
    assert_eq!(
        spi(&["run", "x.spi", "--seed", "1", "--all"]).status.code(),
        Some(2)
    );
    assert_eq!(
        spi(&["inhabit", "![int", "--chan", "k"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_reports_empty_environment_for_a_program() {
    let o = spi(&["--json", "check", &program("buyer_seller")]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_record(&o);
    assert_eq!(r["data"]["delta"], serde_json::json!({}));
    assert_eq!(r["data"]["program"], true);
}

#[test]
fn dot_export_is_written_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let o = spi(&[
        "graph",
        &program("intro_path"),
        "--dot",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("graph S0 {"));
    assert_eq!(dot.matches(" -- ").count(), 2);
    let again = spi(&["graph", &program("intro_path"), "--dot", "-"]);
    assert_eq!(stdout(&again), dot);
}

#[test]
fn all_subterms_reaches_under_the_service() {
    let o = spi(&[
        "--json",
        "graph",
        &program("cycle_under_service"),
        "--all-subterms",
    ]);
    let r = json_record(&o);
    assert_eq!(r["verdict"], "cyclic");
    assert!(r["data"]["graphs"].as_array().unwrap().len() >= 2);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = [
        "--json",
        "run",
        &program("buyer_seller"),
        "--steps",
        "10",
        "--seed",
        "7",
    ];
    let a = spi(&args);
    let b = spi(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json_record(&a);
    assert_eq!(r["data"]["steps"][0]["rule"], "RInit");
}

#[test]
fn exhaustive_run_lists_states() {
    let o = spi(&["--json", "run", &program("intro_path"), "--all"]);
    let r = json_record(&o);
    assert_eq!(r["verdict"], "explored");
    assert_eq!(r["data"]["irreducible"].as_array().unwrap().len(), 1);
}

#[test]
fn progress_verdicts_map_to_exit_codes() {
    let o = spi(&["progress", &program("buyer_seller"), "--depth", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("certificate"));
    let o = spi(&["--json", "progress", &program("self_delegation")]);
    assert_eq!(o.status.code(), Some(1));
    let r = json_record(&o);
    assert_eq!(r["verdict"], "counterexample");
    assert!(r["data"]["at"]["subterm"].is_string());
}

#[test]
fn selftest_passes() {
    let o = spi(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
}
