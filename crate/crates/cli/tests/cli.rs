use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgelim"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_ok(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const M: [[f64; 3]; 3] = [[0.2, -0.1, 0.3], [-0.1, 0.4, 0.05], [0.3, 0.05, -0.25]];

fn trace_cubed() -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                total += M[i][j] * M[j][k] * M[k][i];
            }
        }
    }
    total
}

fn matrix_model(dir: &TempDir) -> PathBuf {
    let flat: Vec<f64> = M.iter().flatten().copied().collect();
    let model = serde_json::json!({
        "dim": 3,
        "tensors": [
            {"order": 0, "dim": 1, "values": [1.0]},
            {"order": 1, "dim": 3, "values": [0.0, 0.0, 0.0]},
            {"order": 2, "dim": 3, "values": flat},
        ]
    });
    write(dir, "model.json", &model.to_string())
}

#[test]
fn pf_triangle_is_trace_of_cube() {
    let dir = TempDir::new().unwrap();
    let model = matrix_model(&dir);
    for engine in ["brute", "contract"] {
        let v = json_ok(&run(&["pf", p(&model), "--graph", "triangle", "--engine", engine]));
        let value = v["result"]["rows"][0]["value"].as_f64().unwrap();
        assert!((value - trace_cubed()).abs() <= 1e-12 * trace_cubed().abs().max(1.0));
    }
}

#[test]
fn decompose_basis_example() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"order":1,"dim":4,"values":[0.5,0.5,0.5,0.5]}"#);
    let v = json_ok(&run(&["decompose", p(&a), "-k", "4", "--dict", "basis"]));
    let log: Vec<f64> = serde_json::from_value(v["result"]["energy_log"].clone()).unwrap();
    assert_eq!(log, vec![1.0, 0.75, 0.5, 0.25, 0.0]);
    assert_eq!(v["result"]["energy_check"]["passed"], true);
}

#[test]
fn malformed_graph_is_a_parse_error_without_output() {
    let dir = TempDir::new().unwrap();
    let model = matrix_model(&dir);
    let graph = write(&dir, "g.json", r#"{"n_vertices":2,"edges":[[0,0]]}"#);
    let out_path = dir.path().join("report.json");
    let out = run(&["pf", p(&model), "--graph", p(&graph), "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out_path.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("g.json"));

    let truncated = write(&dir, "t.json", r#"{"n_vertices":2,"#);
    assert_eq!(run(&["pf", p(&model), "--graph", p(&truncated)]).status.code(), Some(2));
    assert_eq!(run(&["pf", p(&model), "--graph", "no_such_graph"]).status.code(), Some(2));
    assert_eq!(run(&["pf", p(&model)]).status.code(), Some(2));
}

#[test]
fn budget_and_precondition_statuses() {
    let dir = TempDir::new().unwrap();
    let n = 12;
    let h4: Vec<f64> = vec![0.0; n * n * n * n];
    let model = serde_json::json!({
        "dim": n,
        "tensors": [
            {"order": 0, "dim": 1, "values": [1.0]},
            {"order": 1, "dim": n, "values": vec![0.0; n]},
            {"order": 2, "dim": n, "values": vec![0.0; n * n]},
            {"order": 3, "dim": n, "values": vec![0.0; n * n * n]},
            {"order": 4, "dim": n, "values": h4},
        ]
    });
    let model = write(&dir, "big.json", &model.to_string());
    let out = run(&["pf", p(&model), "--graph", "K5", "--engine", "brute"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());

    let skewed = write(&dir, "w.json", r#"{"q":2,"mu":[0.25,0.75],"vals":[[0,1],[1,0]]}"#);
    assert_eq!(run(&["cutdist", p(&skewed), p(&skewed)]).status.code(), Some(4));
    // degree 3 exceeds a model with tensors up to order 2
    let small = matrix_model(&dir);
    assert_eq!(run(&["pf", p(&small), "--graph", "S3"]).status.code(), Some(4));
}

#[test]
fn graphon_commands() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "k2.json", r#"{"q":2,"mu":[0.5,0.5],"vals":[[0,1],[1,0]]}"#);
    let v = json_ok(&run(&["tau", p(&w), "--graph", "K2", "--graph", "triangle"]));
    assert_eq!(v["result"]["rows"][0]["value"], 0.5);
    assert_eq!(v["result"]["rows"][1]["value"], 0.0);
    let v = json_ok(&run(&["cutnorm", p(&w)]));
    assert_eq!(v["result"]["value"], 0.5);
    let swapped = write(&dir, "sw.json", r#"{"q":2,"mu":[0.5,0.5],"vals":[[1,0],[0,1]]}"#);
    let v = json_ok(&run(&["cutdist", p(&w), p(&w)]));
    assert_eq!(v["result"]["value"], 0.0);
    let v = json_ok(&run(&["cutdist", p(&w), p(&swapped)]));
    assert!(v["result"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn orbitdist_swap_example() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"order":1,"dim":2,"values":[1,0]}"#);
    let y = write(&dir, "y.json", r#"{"order":1,"dim":2,"values":[0,2]}"#);
    let v = json_ok(&run(&["orbitdist", p(&x), p(&y), "--group", "permutations"]));
    assert_eq!(v["result"]["value"], 1.0);
    assert_eq!(v["result"]["kind"], "exact");
    assert_eq!(v["result"]["witness"], serde_json::json!([[0.0, 1.0], [1.0, 0.0]]));

    let v = json_ok(&run(&[
        "orbitdist", p(&x), p(&y), "--group", "sampled", "--samples", "4", "--refine", "4",
    ]));
    assert_eq!(v["result"]["kind"], "upper_bound");
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn converge_is_deterministic_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<(PathBuf, PathBuf)> = (0..2)
        .map(|i| (dir.path().join(format!("r{i}.json")), dir.path().join(format!("r{i}.csv"))))
        .collect();
    for (json, csv) in &paths {
        let out = run(&[
            "converge", "--family", "perturbed", "--graph", "triangle", "--graph", "C4", "--i-max", "6", "--seed", "3",
            "--out", p(json), "--csv", p(csv),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0].0).unwrap();
    assert_eq!(a, std::fs::read(&paths[1].0).unwrap());
    assert_eq!(std::fs::read(&paths[0].1).unwrap(), std::fs::read(&paths[1].1).unwrap());

    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["result"]["rows"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(&paths[0].1).unwrap();
    assert!(csv.starts_with("i,value_triangle,value_C4,distance_to_previous,gap_triangle,gap_C4,bound_triangle,bound_C4\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn sampled_family_tail_near_half() {
    let v = json_ok(&run(&["converge", "--family", "sampled", "--graph", "K2", "--i-max", "8", "--seed", "1"]));
    let rows = v["result"]["rows"].as_array().unwrap();
    let last = rows.last().unwrap()["values"][0].as_f64().unwrap();
    assert!((last - 0.5).abs() <= 0.05);
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let model = matrix_model(&dir);
    let cfg = write(&dir, "cfg.json", r#"{"seed": 5, "engine": "brute", "tol": {"eq": 1e-6}}"#);
    let v = json_ok(&run(&["pf", p(&model), "--graph", "C4", "--config", p(&cfg)]));
    assert_eq!(v["seed"], 5);
    assert_eq!(v["tolerances"]["eq"], 1e-6);
    assert_eq!(v["result"]["engine"], "brute");
    let v = json_ok(&run(&[
        "pf", p(&model), "--graph", "C4", "--config", p(&cfg), "--seed", "7", "--engine", "contract", "--tol", "eq=1e-7",
    ]));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["tolerances"]["eq"], 1e-7);
    assert_eq!(v["result"]["engine"], "contract");

    let bad = write(&dir, "bad.json", r#"{"seeds": 5}"#);
    assert_eq!(run(&["pf", p(&model), "--graph", "C4", "--config", p(&bad)]).status.code(), Some(2));
}
