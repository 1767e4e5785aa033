//! End-to-end tests of the `mlsynth` binary: each test launches the compiled
//! executable the way a user would and checks stdout, stderr, files written,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use mlsynth_core::{read_instance, write_instance, CSV_HEADER};

fn mlsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlsynth"))
        .args(args)
        .output()
        .expect("failed to launch mlsynth")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is not UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is not UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process was killed by a signal")
}

/// `gen` writes canonical JSON: reading it back and re-writing it must
/// reproduce the file byte for byte.
#[test]
fn gen_writes_a_canonical_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let out = mlsynth(&[
        "gen", "--nodes", "8", "--variant", "sparse-cheap-thin", "--seed", "7", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("8 nodes"));

    let instance = read_instance(&path).expect("generated file must parse and validate");
    assert_eq!(instance.nodes.len(), 8);
    assert_eq!(instance.meta.seed, 7);

    let copy = dir.path().join("copy.json");
    write_instance(&instance, &copy).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&copy).unwrap(),
        "gen output must round-trip byte-identically"
    );
}

fn gen_triangle(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("triangle.json");
    let out = mlsynth(&[
        "gen", "--nodes", "3", "--variant", "triangle", "--seed", "0", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    path
}

#[test]
fn solve_reports_costs_for_each_solver() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_triangle(dir.path());
    let path = path.to_str().unwrap();

    let baseline = mlsynth(&["solve", "--in", path, "--solver", "baseline"]);
    assert_eq!(exit_code(&baseline), 0);
    assert!(stdout(&baseline).contains("= 25"), "stdout: {}", stdout(&baseline));

    let multilayer = mlsynth(&["solve", "--in", path, "--solver", "multilayer"]);
    assert_eq!(exit_code(&multilayer), 0);
    assert!(stdout(&multilayer).contains("= 20"), "stdout: {}", stdout(&multilayer));

    let exact = mlsynth(&["solve", "--in", path, "--solver", "exact"]);
    assert_eq!(exit_code(&exact), 0);
    assert!(stdout(&exact).contains("= 20"), "stdout: {}", stdout(&exact));
}

#[test]
fn solve_json_emits_a_parseable_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_triangle(dir.path());

    let out = mlsynth(&["solve", "--in", path.to_str().unwrap(), "--json"]);
    assert_eq!(exit_code(&out), 0);
    let solution: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(solution["cost"]["grand_total"], 20);
    assert_eq!(solution["lsr_nodes"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(exit_code(&mlsynth(&["gen", "--bogus"])), 1);
    assert_eq!(exit_code(&mlsynth(&["compare", "--grid", "9:5:1"])), 1);
    assert_eq!(exit_code(&mlsynth(&["compare", "--variants", "9"])), 1);
    assert_eq!(exit_code(&mlsynth(&["solve"])), 1, "missing required --in");
}

#[test]
fn help_and_version_exit_zero() {
    let help = mlsynth(&["--help"]);
    assert_eq!(exit_code(&help), 0);
    assert!(stdout(&help).contains("compare"));
    assert_eq!(exit_code(&mlsynth(&["--version"])), 0);
}

#[test]
fn missing_input_file_exits_three() {
    let out = mlsynth(&["solve", "--in", "/definitely/not/here.json"]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("IO_ERROR"));
}

#[test]
fn infeasible_requests_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let out = mlsynth(&[
        "gen", "--nodes", "8", "--variant", "no-such-preset", "--seed", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("PARAMS_INFEASIBLE"));

    // The exhaustive solver refuses instances beyond its size caps.
    let big = dir.path().join("big.json");
    let gen = mlsynth(&[
        "gen", "--nodes", "8", "--variant", "dense-cheap-thin", "--seed", "1", "--out",
        big.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&gen), 0);
    let exact = mlsynth(&["solve", "--in", big.to_str().unwrap(), "--solver", "exact"]);
    assert_eq!(exit_code(&exact), 2);
    assert!(stderr(&exact).contains("LIMITS_EXCEEDED"));
}

#[test]
fn corrupt_instance_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let good = gen_triangle(dir.path());
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();

    // Point a demand at a node that does not exist.
    doc["demands"][0]["src"] = serde_json::json!("ghost");
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = mlsynth(&["solve", "--in", broken.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("VALIDATION_ERROR"), "stderr: {}", stderr(&out));

    // Truncated JSON is a parse error, not an I/O error.
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &std::fs::read_to_string(&good).unwrap()[..40]).unwrap();
    let out = mlsynth(&["solve", "--in", truncated.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("PARSE_ERROR"), "stderr: {}", stderr(&out));
}

#[test]
fn compare_writes_csv_with_the_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = mlsynth(&[
        "compare", "--grid", "6:8:2", "--variants", "2", "--seeds", "1", "--repro", "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2, "two node counts x two variants x one seed");
    for row in &lines[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8, "row: {row}");
        let baseline: u64 = fields[3].parse().unwrap();
        let multilayer: u64 = fields[4].parse().unwrap();
        assert!(multilayer <= baseline);
        let savings: f64 = fields[5].parse().unwrap();
        assert!((0.0..=100.0).contains(&savings));
        assert_eq!(fields[6], "0", "--repro zeroes timings");
        assert_eq!(fields[7], "0", "--repro zeroes timings");
    }
}

#[test]
fn compare_repro_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |path: &Path| {
        let out = mlsynth(&[
            "compare", "--grid", "6:8:2", "--variants", "2", "--seeds", "1", "--repro", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    };
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    run(&first);
    run(&second);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn compare_json_report_parses_and_matches_the_grid() {
    let out = mlsynth(&[
        "compare", "--grid", "6", "--variants", "1", "--seeds", "2", "--repro", "--format", "json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let table: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = table["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["node_count"], 6);
    assert_eq!(rows[0]["seed"], 1);
    assert_eq!(rows[1]["seed"], 2);
    assert!(table["summary"]["mean_savings_pct"].is_number());
}

#[test]
fn empty_suites_warn_but_exit_zero() {
    let out = mlsynth(&["compare", "--grid", "6", "--variants", "1", "--seeds", "0", "--repro"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), format!("{CSV_HEADER}\n"));
    assert!(stderr(&out).contains("no successful rows"));
}
