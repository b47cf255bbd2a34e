//! End-to-end smoke tests of the mapfdl binary.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_mapfdl");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}")
}

#[test]
fn solve_running_example_prints_msucc_and_writes_plan() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("out.plan");
    let output = Command::new(BIN)
        .args([
            "solve",
            &fixture("running_example.map"),
            &fixture("running_example.scen"),
            "--deadline",
            "2",
            "--plan-out",
        ])
        .arg(&plan_path)
        .arg("--verbose")
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "stdout: {stdout}");
    assert!(stdout.contains("M_succ = 1"), "stdout: {stdout}");
    assert!(stdout.contains("status = optimal"));
    assert!(stdout.contains("nodes="), "verbose stats line missing");
    let plan_text = std::fs::read_to_string(&plan_path).unwrap();
    assert!(plan_text.starts_with("deadline 2\n"));
    assert!(plan_text.contains("unsuccessful"));
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("out.plan");
    let status = Command::new(BIN)
        .args([
            "solve",
            &fixture("running_example.map"),
            &fixture("running_example.scen"),
            "--deadline",
            "2",
            "--plan-out",
        ])
        .arg(&plan_path)
        .status()
        .unwrap();
    assert!(status.success());

    let output = Command::new(BIN)
        .args([
            "verify",
            &fixture("running_example.map"),
            &fixture("running_example.scen"),
        ])
        .arg(&plan_path)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "stdout: {stdout}");
    assert!(stdout.contains("plan is valid"));
    assert!(stdout.contains("M_succ = 1"));
}

#[test]
fn malformed_map_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad_map = dir.path().join("bad.map");
    std::fs::write(&bad_map, "type octile\nheight x\nwidth 2\nmap\n..\n").unwrap();
    let output = Command::new(BIN)
        .arg("solve")
        .arg(&bad_map)
        .args([&fixture("running_example.scen"), "--deadline", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn generate_export_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("g.map");
    let scen = dir.path().join("g.scen");
    let status = Command::new(BIN)
        .args([
            "generate",
            "--width",
            "6",
            "--height",
            "6",
            "--block-probability",
            "0.1",
            "--agents",
            "2",
            "--distance-min",
            "2",
            "--distance-max",
            "4",
            "--deadline",
            "6",
            "--seed",
            "5",
            "--map-out",
        ])
        .arg(&map)
        .arg("--scen-out")
        .arg(&scen)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(map.exists() && scen.exists());

    let mps = dir.path().join("model.mps");
    let status = Command::new(BIN)
        .arg("export")
        .arg(&map)
        .arg(&scen)
        .args(["--deadline", "6", "--output"])
        .arg(&mps)
        .status()
        .unwrap();
    assert!(status.success());
    let mps_text = std::fs::read_to_string(&mps).unwrap();
    assert!(mps_text.starts_with("NAME"));
    assert!(mps_text.ends_with("ENDATA\n"));

    let config = dir.path().join("bench.cfg");
    std::fs::write(
        &config,
        "width = 5\nheight = 5\nblock_probability = 0.1\nagents = 1\ninstances = 2\n\
         distance_min = 2\ndistance_max = 3\ndeadline = 5\ntime_limit = 10\nseed = 1\n",
    )
    .unwrap();
    let output = Command::new(BIN).arg("bench").arg(&config).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "stdout: {stdout}");
    assert!(stdout.contains("success_rate"));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert!(csv.starts_with("agents,instances,solved"));
}

#[test]
fn env_var_sets_default_time_limit() {
    // A bad value must be rejected; a good one must be accepted.
    let output = Command::new(BIN)
        .args([
            "solve",
            &fixture("running_example.map"),
            &fixture("running_example.scen"),
            "--deadline",
            "2",
        ])
        .env("MAPFDL_TIME_LIMIT", "not-a-number")
        .current_dir(Path::new(env!("CARGO_TARGET_TMPDIR")))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let output = Command::new(BIN)
        .args([
            "solve",
            &fixture("running_example.map"),
            &fixture("running_example.scen"),
            "--deadline",
            "2",
            "--plan-out",
        ])
        .arg(dir.path().join("p.plan"))
        .env("MAPFDL_TIME_LIMIT", "30")
        .output()
        .unwrap();
    assert!(output.status.success());
}
