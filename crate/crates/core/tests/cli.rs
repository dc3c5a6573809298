use std::path::Path;
use std::process::Command;

use nalgebra::DMatrix;

use fundesign::basis::BasisSystem;
use fundesign::cli::{read_design_csv, write_functions_csv, RunConfig};
use fundesign::model::{Bounds, Design, ProblemSpec, ProfileFactorSpec};
use fundesign::optimizer::evaluate_design;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fundesign"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn base_config(out: &Path, size: usize, degree: usize) -> String {
    format!(
        r#"
[problem]
runs = 4

[[problem.profile]]
basis = "step"
size = {size}
beta_degree = {degree}

[optimizer]
starts = 100
seed = 42

[output]
dir = "{}"
reference_value = 8.404
"#,
        out.display()
    )
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn run_writes_outputs_and_reproduces_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &base_config(&out, 2, 1));
    let status = bin().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());

    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary[0][0], "criterion");
    let criterion: f64 = summary[1][0].parse().unwrap();
    assert!((criterion - 8.750).abs() / 8.750 <= 0.005, "{criterion}");
    let efficiency: f64 = summary[1][1].parse().unwrap();
    assert!((efficiency - 0.961).abs() < 1e-3, "{efficiency}");
    assert_eq!(summary[1][5], "42");

    let design = csv_rows(&out.join("design.csv"));
    assert_eq!(design[0], ["run", "factor", "kind", "index", "value"]);
    assert_eq!(design.len(), 1 + 4 * 2);

    let functions = csv_rows(&out.join("functions_1.csv"));
    assert_eq!(functions[0], ["t", "run_1", "run_2", "run_3", "run_4"]);
    assert_eq!(functions.len(), 1 + 501);

    // reload and re-evaluate
    let spec = RunConfig::from_path(&cfg).unwrap().problem_spec().unwrap();
    let d = read_design_csv(&out.join("design.csv"), &spec).unwrap();
    let v = evaluate_design(&spec, &d).unwrap().value().unwrap();
    assert!((v - criterion).abs() <= 1e-12 * criterion);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let cfg = write_config(dir.path(), &base_config(&out, 8, 2));
        assert!(bin().arg("run").arg(&cfg).status().unwrap().success());
        outputs.push(
            ["design.csv", "summary.csv", "functions_1.csv"].map(|f| std::fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config(&dir.path().join("ignored"), 2, 1));
    let out = dir.path().join("elsewhere");
    let status = bin()
        .args(["run"])
        .arg(&cfg)
        .args(["--seed", "9", "--starts", "7", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary[1][5], "9");
    assert_eq!(summary[1][6], "7");
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn oracle_flag_reports_vertex_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &base_config(&out, 2, 1));
    let output = bin().arg("run").arg(&cfg).arg("--oracle").output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("vertex oracle    8.75"));
    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary[1][8], "8.75");

    // too many coordinates to enumerate
    let cfg = write_config(dir.path(), &base_config(&out, 8, 1));
    let output = bin().arg("run").arg(&cfg).arg("--oracle").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("too large"));
}

#[test]
fn bad_configs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        base_config(&out, 2, 1).replace("runs = 4", "runs = 2"),
        base_config(&out, 2, 2),
        base_config(&out, 2, 1).replace("basis = \"step\"", "basis = \"fourier\""),
        "not toml at all [".to_string(),
    ];
    for body in cases {
        let cfg = write_config(dir.path(), &body);
        let output = bin().arg("run").arg(&cfg).output().unwrap();
        assert!(!output.status.success(), "accepted:\n{body}");
        assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
    }
    let output = bin().arg("run").arg(dir.path().join("missing.toml")).output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn sweep_reproduces_breakpoint_anomaly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let body = format!("{}\n[sweep]\nruns = [4]\nsizes = [2, 3]\n", base_config(&out, 2, 1));
    let cfg = write_config(dir.path(), &body);
    assert!(bin().arg("sweep").arg(&cfg).status().unwrap().success());
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows[0], ["runs", "size", "criterion", "efficiency", "winning_start_index", "sweeps"]);
    let two: f64 = rows[1][2].parse().unwrap();
    let three: f64 = rows[2][2].parse().unwrap();
    assert!((two - 8.750).abs() / 8.750 <= 0.005);
    assert!((three - 8.828).abs() / 8.828 <= 0.005);
    assert!(three > two);
    assert_eq!(rows[2][3], "1");
}

#[test]
fn quadratic_sweep_matches_known_optima() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let body = format!("{}\n[sweep]\nruns = [4]\nsizes = [3, 4]\n", base_config(&out, 3, 2));
    let cfg = write_config(dir.path(), &body);
    assert!(bin().arg("sweep").arg(&cfg).status().unwrap().success());
    let rows = csv_rows(&out.join("sweep.csv"));
    for (row, target) in rows[1..].iter().zip([386.408, 246.869]) {
        let v: f64 = row[2].parse().unwrap();
        assert!((v - target).abs() / target <= 0.01, "{v} vs {target}");
    }
}

#[test]
fn single_cell_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let body = format!("{}\n[sweep]\nruns = [4]\nsizes = [4]\n", base_config(&out, 4, 1));
    let cfg = write_config(dir.path(), &body);
    assert!(bin().arg("sweep").arg(&cfg).status().unwrap().success());
    assert!(bin().arg("run").arg(&cfg).status().unwrap().success());
    let sweep = csv_rows(&out.join("sweep.csv"));
    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(sweep[1][2], summary[1][0]);
}

#[test]
fn constant_function_samples() {
    let dir = tempfile::tempdir().unwrap();
    let f = ProfileFactorSpec::new(
        BasisSystem::uniform_step(0.0, 1.0, 2).unwrap(),
        BasisSystem::power(1, 0.0, 1.0).unwrap(),
        Bounds::new(-1.0, 1.0).unwrap(),
    )
    .unwrap();
    let spec = ProblemSpec::new(1, vec![f], vec![]);
    let design = Design {
        gammas: vec![DMatrix::from_row_slice(1, 2, &[1.0, 1.0])],
        scalars: DMatrix::zeros(1, 0),
    };
    let path = dir.path().join("functions_1.csv");
    write_functions_csv(&path, &spec, &design, 0, 3).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "t,run_1\n0,1\n0.5,1\n1,1\n");
}
