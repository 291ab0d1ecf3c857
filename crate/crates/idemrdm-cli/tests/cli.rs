//! End-to-end runs of the compiled binary: the documented examples, the
//! report formats, and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_idemrdm"))
        .args(args)
        .output()
        .expect("binary should spawn");
    (
        output.status.code().expect("no exit code"),
        String::from_utf8(output.stdout).expect("stdout utf8"),
        String::from_utf8(output.stderr).expect("stderr utf8"),
    )
}

fn write_state(dir: &Path, name: &str, body: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(body).unwrap()).unwrap();
    path
}

fn golden_file(dir: &Path) -> PathBuf {
    let path = dir.join("golden.json");
    std::fs::write(&path, idemrdm::two_branch_statefile_json()).unwrap();
    path
}

fn shared_pair(dir: &Path) -> PathBuf {
    write_state(
        dir,
        "pair.json",
        &json!({
            "statistics": "fermion",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0, 1]}]
        }),
    )
}

#[test]
fn entropy_of_the_golden_state_prints_one_bit() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let (code, stdout, _) = run(&["entropy", golden.to_str().unwrap(), "--trace", "R"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1.000000\n");

    let (code, stdout, _) = run(&["entropy", golden.to_str().unwrap(), "--trace", "L"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1.000000\n");
}

#[test]
fn reduced_state_of_a_shared_pair_is_a_single_unit_entry() {
    let dir = tempfile::tempdir().unwrap();
    let pair = shared_pair(dir.path());
    let (code, stdout, _) = run(&[
        "rdm",
        pair.to_str().unwrap(),
        "--trace",
        "R",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let results = &report["results"];
    assert_eq!(results["basis"], json!([[0]]));
    assert_eq!(results["matrix"], json!([[[1.0, 0.0]]]));
    assert_eq!(results["trace"], json!(1.0));
}

#[test]
fn rdm_json_report_round_trips_against_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let (code, stdout, _) = run(&[
        "rdm",
        golden.to_str().unwrap(),
        "--trace",
        "R",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let matrix = report["results"]["matrix"].as_array().unwrap();

    let rho = idemrdm::reduced_density_matrix(
        &idemrdm::two_branch_state(),
        &idemrdm::two_branch_bipartition(),
        idemrdm::Side::Right,
    )
    .unwrap();
    assert_eq!(matrix.len(), rho.dimension());
    for (i, row) in matrix.iter().enumerate() {
        let row = row.as_array().unwrap();
        assert_eq!(row.len(), rho.dimension());
        for (j, cell) in row.iter().enumerate() {
            // f64 survives a JSON round trip exactly, so compare bitwise.
            let re = cell[0].as_f64().unwrap();
            let im = cell[1].as_f64().unwrap();
            assert_eq!(re, rho.entry(i, j).re);
            assert_eq!(im, rho.entry(i, j).im);
        }
    }
    let basis: Vec<Vec<usize>> = rho
        .basis()
        .iter()
        .map(|occ| occ.ids().to_vec())
        .collect();
    assert_eq!(report["results"]["basis"], json!(basis));
}

#[test]
fn gns_verification_passes_on_the_golden_state() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let (code, stdout, _) = run(&[
        "verify-gns",
        golden.to_str().unwrap(),
        "--trials",
        "100",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], json!(true));
    assert_eq!(report["results"]["trials"], json!(100));
    assert!(report["results"]["max_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn equivalence_verification_passes_with_random_instances() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let (code, stdout, _) = run(&[
        "verify-equivalence",
        golden.to_str().unwrap(),
        "--random",
        "8",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0, "stdout: {}", stdout);
    assert!(stdout.ends_with("PASS\n"));
}

#[test]
fn json_reports_are_identical_across_runs_except_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let args = [
        "verify-equivalence",
        golden.to_str().unwrap(),
        "--random",
        "6",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    let (code_a, out_a, _) = run(&args);
    let (code_b, out_b, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|line| !line.contains("wall_seconds"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&out_a), strip(&out_b));
    assert_ne!(strip(&out_a), "");
}

#[test]
fn amplitude_matches_the_overlap_of_product_states() {
    let dir = tempfile::tempdir().unwrap();
    let pair = shared_pair(dir.path());
    let (code, stdout, _) = run(&[
        "amplitude",
        pair.to_str().unwrap(),
        pair.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "+1.000000000000e0 +0.000000000000e0i\n");

    // A doubly-occupied boson mode overlaps itself with the 2! permanent.
    let doubled = write_state(
        dir.path(),
        "doubled.json",
        &json!({
            "statistics": "boson",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0, 0]}]
        }),
    );
    let (code, stdout, _) = run(&[
        "amplitude",
        doubled.to_str().unwrap(),
        doubled.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "+2.000000000000e0 +0.000000000000e0i\n");

    // Different particle numbers are orthogonal.
    let single = write_state(
        dir.path(),
        "single.json",
        &json!({
            "statistics": "fermion",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [{"amplitude": [1.0, 0.0], "orbitals": [0]}]
        }),
    );
    let (code, stdout, _) = run(&[
        "amplitude",
        pair.to_str().unwrap(),
        single.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "+0.000000000000e0 +0.000000000000e0i\n");
}

#[test]
fn ssr_flag_zeroes_coherence_between_particle_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let amp = 1.0 / 2f64.sqrt();
    // Both branches leave the traced mode empty, so the reduced state keeps
    // the one-versus-two particle coherence until the flag projects it out.
    let state = write_state(
        dir.path(),
        "mixed_grade.json",
        &json!({
            "statistics": "boson",
            "dim": 2,
            "modes": {"L": [0], "R": [1]},
            "terms": [
                {"amplitude": [amp, 0.0], "orbitals": [0]},
                {"amplitude": [amp, 0.0], "orbitals": [0, 0]}
            ]
        }),
    );
    let plain = run(&[
        "rdm",
        state.to_str().unwrap(),
        "--trace",
        "R",
        "--format",
        "json",
    ]);
    assert_eq!(plain.0, 0);
    let report: Value = serde_json::from_str(&plain.1).unwrap();
    let off = report["results"]["matrix"][0][1][0].as_f64().unwrap();
    assert!((off - 0.5).abs() < 1e-12, "coherence should survive: {}", off);

    let projected = run(&[
        "rdm",
        state.to_str().unwrap(),
        "--trace",
        "R",
        "--ssr",
        "--format",
        "json",
    ]);
    assert_eq!(projected.0, 0);
    let report: Value = serde_json::from_str(&projected.1).unwrap();
    let off = report["results"]["matrix"][0][1][0].as_f64().unwrap();
    assert_eq!(off, 0.0);
}

#[test]
fn bench_csv_lists_both_kernels_with_matching_checksums() {
    let (code, stdout, _) = run(&[
        "bench-permanent",
        "--min",
        "4",
        "--max",
        "6",
        "--reps",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("n,method,seconds,checksum"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // Orders 4 through 6 sit below the exhaustive kernel's cutoff, so each
    // order gets one row per kernel.
    assert_eq!(rows.len(), 6);
    for n in 4..=6usize {
        let per_order: Vec<&Vec<&str>> = rows
            .iter()
            .filter(|r| r[0] == n.to_string())
            .collect();
        assert_eq!(per_order.len(), 2);
        let methods: Vec<&str> = per_order.iter().map(|r| r[1]).collect();
        assert!(methods.contains(&"ryser"));
        assert!(methods.contains(&"naive"));
        assert_eq!(per_order[0][3], per_order[1][3], "checksums differ at {}", n);
        for row in per_order {
            assert_eq!(row.len(), 4);
            assert!(row[2].parse::<f64>().unwrap() >= 0.0);
        }
    }
}

#[test]
fn broken_inputs_exit_with_the_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&["entropy", "/nonexistent/state.json", "--trace", "R"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("/nonexistent/state.json"));

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{not json").unwrap();
    let (code, _, stderr) = run(&["entropy", garbled.to_str().unwrap(), "--trace", "R"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());

    // csv is only defined for the bench table and eigenvalue lists.
    let golden = golden_file(dir.path());
    let (code, _, _) = run(&[
        "entropy",
        golden.to_str().unwrap(),
        "--trace",
        "R",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 2);

    let (code, _, _) = run(&["rdm", golden.to_str().unwrap()]);
    assert_eq!(code, 2, "missing --trace should be a usage error");
}

#[test]
fn zero_tolerance_turns_roundoff_into_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let golden = golden_file(dir.path());
    let (code, stdout, _) = run(&[
        "verify-gns",
        golden.to_str().unwrap(),
        "--trials",
        "20",
        "--seed",
        "7",
        "--tolerance",
        "0.0",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.ends_with("FAIL\n"));
}
