use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydberg-mis")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn budget_reports_the_bound() {
    let o = cli(&["budget"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("= 4612"));
    assert!(stdout(&o).contains("5970000"));
    let o = cli(&["budget", "--json", "--steps", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["saved"], 0);
    assert_eq!(code(&cli(&["budget", "--epsilon", "0"])), 2);
}

#[test]
fn run_writes_outputs_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, "# tiny ensemble\ngraphs = 3\nsteps = 200\nschedules = pk-simplified, hv-unoptimized\n").unwrap();
    let args = ["run", "--seed", "5", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let o = cli(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let read = |name: &str| std::fs::read_to_string(out.join(name)).unwrap();
    let (runs, summary, hist) = (read("runs.jsonl"), read("summary.csv"), read("histogram.csv"));
    assert_eq!(runs.lines().count(), 1 + 3 * 2);
    assert!(summary.contains("seed = 5"));
    assert!(summary.contains("v_nn_mhz = 107"));
    assert!(summary.lines().any(|l| l.starts_with("hv-unoptimized,3,")));
    assert_eq!(hist.lines().filter(|l| l.starts_with("pk-simplified,p_mis")).count(), 20);
    assert!(Path::new(&out.join("graphs/0002.txt")).exists());
    for line in runs.lines().skip(1) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["p_mis"].as_f64().unwrap() <= v["p_is"].as_f64().unwrap() + 1e-12);
    }
    assert_eq!(code(&cli(&args)), 0);
    assert_eq!(read("runs.jsonl"), runs);
    assert_eq!(read("summary.csv"), summary);
}

#[test]
fn optimize_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt");
    let o = cli(&[
        "optimize", "--seed", "3", "--out", out.to_str().unwrap(), "--set", "graphs=1", "--set", "steps=100",
        "--set", "max_steps=1", "--set", "optimizers=sgd",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["traces.jsonl", "opt_summary.csv", "opt_report.csv", "opt_histogram.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn dual_and_gap() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, "n 5\ne 0 1 1\ne 1 2 1\ne 0 3 1\ne 3 4 1\ne 3 1 1\ne 4 1 1\n").unwrap();
    let o = cli(&["dual", graph.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).matches("--").count(), 16);
    assert!(String::from_utf8_lossy(&o.stderr).contains("independent_sets=11 mis_size=3 mis_count=1 edges=16"));

    let out = dir.path().join("gap");
    let o = cli(&["gap", "--graph", graph.to_str().unwrap(), "--out", out.to_str().unwrap(), "--set", "gap_points=50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["delta"].as_f64().unwrap() > 0.0);
    assert_eq!(std::fs::read_to_string(out.join("gap.csv")).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 51);
}

#[test]
fn exit_codes() {
    // missing seed, unknown key, bad value
    assert_eq!(code(&cli(&["run"])), 2);
    assert_eq!(code(&cli(&["run", "--seed", "1", "--set", "colour=blue"])), 2);
    assert_eq!(code(&cli(&["run", "--seed", "1", "--set", "graphs=-4"])), 2);
    assert_eq!(code(&cli(&["gap", "--set", "graphs=2"])), 2);
    // unreadable inputs
    assert_eq!(code(&cli(&["dual", "/nonexistent/graph.txt"])), 4);
    assert_eq!(code(&cli(&["run", "--seed", "1", "--config", "/nonexistent.cfg"])), 4);
    // integrator cannot meet the tolerance
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run", "--seed", "1", "--out", dir.path().to_str().unwrap(), "--set", "graphs=1", "--set", "steps=2",
        "--set", "tolerance=1e-15",
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}
