//! End-to-end tests driving the compiled binary: the documented output
//! values, format invariants, and the exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_channelcut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("channelcut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn decompose_cnot_prints_the_known_table() {
    let value = stdout_json(&run(&["decompose", "--gate", "cnot"]));
    assert_eq!(value["gamma"].as_f64().unwrap(), 9.0);
    assert_eq!(value["term_count"].as_u64().unwrap(), 12);
    assert_eq!(value["n_qubits"].as_u64().unwrap(), 2);
    assert_eq!(value["rank_in"].as_u64().unwrap(), 4);
    assert_eq!(value["rank_out"].as_u64().unwrap(), 4);
    let terms = value["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 12);
    for term in terms {
        let c = term["coefficient"].as_f64().unwrap();
        assert_eq!(term["magnitude"].as_f64().unwrap(), c.abs());
        assert_eq!(term["labels"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn selected_toffoli_collapses_to_unit_overhead() {
    let value = stdout_json(&run(&[
        "decompose",
        "--gate",
        "toffoli",
        "--select",
        "zeros:1,1",
    ]));
    assert!((value["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(value["rank_in"].as_u64().unwrap(), 4);
    assert_eq!(value["rank_out"].as_u64().unwrap(), 4);
}

#[test]
fn selected_qft3_matches_the_reference_overhead() {
    let value = stdout_json(&run(&[
        "decompose",
        "--gate",
        "qft3",
        "--select",
        "zeros:2,1",
    ]));
    assert!((value["gamma"].as_f64().unwrap() - 16.63).abs() < 0.01);
}

#[test]
fn toffoli_grid_follows_the_symmetric_selection_rule() {
    let value = stdout_json(&run(&["table", "--gate", "toffoli"]));
    let grid = value["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 4);
    for (m_in, row) in grid.iter().enumerate() {
        let row = row.as_array().unwrap();
        assert_eq!(row.len(), 4);
        for (m_out, cell) in row.iter().enumerate() {
            let expected = if m_in.min(m_out) == 0 { 37.0 } else { 1.0 };
            assert!(
                (cell.as_f64().unwrap() - expected).abs() < 1e-6,
                "grid[{m_in}][{m_out}] = {cell}"
            );
        }
    }
}

#[test]
fn csv_and_json_outputs_carry_identical_values() {
    let json = stdout_json(&run(&["decompose", "--gate", "cnot"]));
    let csv_run = run(&["decompose", "--gate", "cnot", "--format", "csv"]);
    assert!(csv_run.status.success());
    let csv = String::from_utf8(csv_run.stdout).unwrap();

    let mut csv_terms = Vec::new();
    let mut in_terms = false;
    let mut csv_gamma = None;
    for line in csv.lines() {
        if line == "label,coefficient,magnitude" {
            in_terms = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("gamma,") {
            csv_gamma = Some(rest.parse::<f64>().unwrap());
        }
        if in_terms && !line.is_empty() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 3);
            csv_terms.push((fields[0].to_string(), fields[1].parse::<f64>().unwrap()));
        }
    }
    assert_eq!(csv_gamma.unwrap(), json["gamma"].as_f64().unwrap());
    let json_terms: Vec<(String, f64)> = json["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            (
                t["label"].as_str().unwrap().to_string(),
                t["coefficient"].as_f64().unwrap(),
            )
        })
        .collect();
    assert_eq!(csv_terms, json_terms);
}

#[test]
fn hhl_default_run_reports_the_solver_figures() {
    let value = stdout_json(&run(&["hhl"]));
    assert!((value["gamma"].as_f64().unwrap() - 1.25).abs() < 1e-6);
    assert_eq!(value["cnot_count"].as_u64().unwrap(), 34);
    assert_eq!(value["coefficients"].as_array().unwrap().len(), 3);
    let rows = value["fidelity_table"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["fidelity_without"].as_f64().unwrap() >= 0.999);
    assert!(rows[0]["fidelity_with"].as_f64().unwrap() >= 0.999);
}

#[test]
fn hhl_noise_rows_keep_the_decomposed_fidelity_high() {
    let value = stdout_json(&run(&["hhl", "--noise", "0,0", "--noise", "0.001,0.01"]));
    let rows = value["fidelity_table"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["fidelity_with"].as_f64().unwrap() >= 0.999);
    assert!(rows[0]["fidelity_without"].as_f64().unwrap() >= 0.999);
    let noisy_with = rows[1]["fidelity_with"].as_f64().unwrap();
    let noisy_without = rows[1]["fidelity_without"].as_f64().unwrap();
    assert!(noisy_with >= 0.98, "decomposed fidelity {noisy_with}");
    assert!(noisy_with > noisy_without);
}

#[test]
fn matrix_files_round_trip_through_decompose() {
    let path = temp_path("hadamard.json");
    let h = 0.5f64.sqrt();
    let file = serde_json::json!({
        "rows": 2,
        "cols": 2,
        "entries": [[h, 0.0], [h, 0.0], [h, 0.0], [-h, 0.0]],
    });
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let value = stdout_json(&run(&["decompose", "--gate", path.to_str().unwrap()]));
    assert!(value["gamma"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(value["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let path = temp_path("cnot-report.json");
    let output = run(&[
        "decompose",
        "--gate",
        "cnot",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["gamma"].as_f64().unwrap(), 9.0);
}

#[test]
fn validation_failures_exit_with_code_two() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["decompose", "--gate", "/nonexistent/gate.json"],
        vec!["decompose", "--gate", "cnot", "--select", "zeros:5,0"],
        vec!["decompose", "--gate", "cnot", "--select", "bogus"],
        vec!["hhl", "--rotation-constant", "1.0"],
        vec!["hhl", "--noise", "0.5"],
        vec!["hhl", "--noise", "2,0"],
        vec!["hhl", "--register-bits", "9"],
    ];
    for args in cases {
        let output = run(&args);
        assert_eq!(
            output.status.code(),
            Some(2),
            "args {args:?}, stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(
            stderr.starts_with("error: validation: "),
            "stderr was: {stderr}"
        );
        assert_eq!(stderr.trim_end().lines().count(), 1);
    }
}

#[test]
fn non_square_matrix_is_a_validation_failure() {
    let path = temp_path("wide.json");
    let file = serde_json::json!({
        "rows": 1,
        "cols": 2,
        "entries": [[1.0, 0.0], [0.0, 0.0]],
    });
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let output = run(&["decompose", "--gate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solver_failures_exit_with_code_three() {
    // Post-selecting the flipped-lead branch of a bare CNOT leaves a
    // coefficient sum of zero, which the normalization step rejects.
    let output = run(&["decompose", "--gate", "cnot", "--select", "hhl:0"]);
    assert_eq!(
        output.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error: solver: "), "stderr was: {stderr}");
}

#[test]
fn thread_cap_environment_variable_is_validated() {
    let output = Command::new(env!("CARGO_BIN_EXE_channelcut"))
        .args(["decompose", "--gate", "cnot"])
        .env("CHANNELCUT_THREADS", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));

    let output = Command::new(env!("CARGO_BIN_EXE_channelcut"))
        .args(["decompose", "--gate", "cnot"])
        .env("CHANNELCUT_THREADS", "1")
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["gamma"].as_f64().unwrap(), 9.0);
}

#[test]
fn projector_file_selection_matches_the_zeros_shorthand() {
    let p_in = temp_path("p_in.json");
    let p_out = temp_path("p_out.json");
    // |0⟩⟨0| ⊗ I on two qubits: ones at diagonal positions 0 and 1.
    let mut entries = vec![[0.0, 0.0]; 16];
    entries[0] = [1.0, 0.0];
    entries[5] = [1.0, 0.0];
    let file = serde_json::json!({"rows": 4, "cols": 4, "entries": entries});
    let text = serde_json::to_string(&file).unwrap();
    std::fs::write(&p_in, &text).unwrap();
    std::fs::write(&p_out, &text).unwrap();

    let via_files = stdout_json(&run(&[
        "decompose",
        "--gate",
        "cnot",
        "--select",
        &format!("file:{},{}", p_in.display(), p_out.display()),
    ]));
    let via_shorthand = stdout_json(&run(&[
        "decompose",
        "--gate",
        "cnot",
        "--select",
        "zeros:1,1",
    ]));
    assert_eq!(via_files["gamma"], via_shorthand["gamma"]);
    assert_eq!(via_files["term_count"], via_shorthand["term_count"]);
    assert_eq!(via_files["rank_in"], via_shorthand["rank_in"]);
}
