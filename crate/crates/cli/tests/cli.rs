use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcdual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v["config"]["out"] = Value::Null;
    v
}

#[test]
fn violated_constraint_exits_one() {
    let o = run(&[
        "validate", "--g1", "1", "--g2", "0", "--g4", "0", "--kind", "B",
    ]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["verdicts"][0]["verdict"], "fail");
    assert!(r["verdicts"][0]["detail"]
        .as_str()
        .unwrap()
        .contains("ConstraintViolated"));
}

#[test]
fn presets_validate() {
    for kind in ["A", "B", "C", "D"] {
        let o = run(&[
            "validate", "--kind", kind, "--hbar", "0.7", "--xi", "0.3", "--z", "1,2.5",
        ]);
        assert_eq!(
            code(&o),
            0,
            "{kind}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn c_type_duality_passes() {
    let o = run(&[
        "duality", "--kind", "C", "--n", "2", "--z", "1,2", "--xi", "0",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let states = r["verdicts"].as_array().unwrap();
    assert!(states.len() > 1);
    for s in &states[1..] {
        assert!(s["data"]["float_max_eig"].as_f64().unwrap() < 1e-2);
    }
}

#[test]
fn b_type_identity_is_exact() {
    let o = run(&[
        "identity", "--kind", "B", "--n", "1", "--m", "1", "--mode", "rational",
    ]);
    assert_eq!(code(&o), 0);
    for v in report(&o)["verdicts"].as_array().unwrap() {
        assert_eq!(v["detail"], "exact zero");
        assert_eq!(v["data"]["mode"], "rational");
    }
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(code(&run(&["bethe", "--kind", "C", "--z", "1,-1"])), 2);
    assert_eq!(code(&run(&["bethe", "--kind", "C", "--z", "0,1"])), 2);
    assert_eq!(code(&run(&["bethe", "--kind", "Q", "--z", "1,2"])), 2);
    assert_eq!(code(&run(&["factorization", "--kind", "A", "--n", "2"])), 2);
    assert_eq!(
        code(&run(&["bethe", "--config", "/nonexistent/config.json"])),
        2
    );
}

#[test]
fn collision_is_a_runtime_error() {
    let o = run(&[
        "evolve", "--kind", "D", "--g2", "0", "--z", "1,2", "--p", "1,-1", "--steps", "2000",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("singularity"));
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("r{i}.json")))
        .collect();
    for p in &paths {
        let o = run(&[
            "bethe",
            "--kind",
            "C",
            "--z",
            "1,2,3",
            "--xi",
            "0.5",
            "--rng-seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(
        without_timing(read(&paths[0])),
        without_timing(read(&paths[1]))
    );
}

#[test]
fn config_round_trips_through_its_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let o = run(&[
        "factorization",
        "--kind",
        "C",
        "--n",
        "2",
        "--samples",
        "3",
        "--hbar",
        "0.1",
        "--xi",
        "0.30000000000000004",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r1 = read(&first);
    let cfg = dir.path().join("cfg.json");
    let mut echoed = r1["config"].clone();
    echoed["out"] = Value::Null;
    std::fs::write(&cfg, serde_json::to_string(&echoed).unwrap()).unwrap();
    let o = run(&["factorization", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r2 = report(&o);
    assert_eq!(r2["config"], echoed);
    assert_eq!(r1["config"]["xi"].as_f64().unwrap(), 0.30000000000000004);
    assert_eq!(r1["verdicts"], r2["verdicts"]);
}

#[test]
fn certificate_inputs_replay() {
    let o = run(&[
        "identity",
        "--kind",
        "C",
        "--n",
        "3",
        "--m",
        "1",
        "--samples",
        "2",
        "--rng-seed",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    let entry = &r["verdicts"][1];
    let mut cfg = r["config"].clone();
    cfg["replay"] = entry["inputs"].clone();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("replay.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = run(&["identity", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let again = report(&o);
    assert_eq!(again["verdicts"].as_array().unwrap().len(), 1);
    assert_eq!(again["verdicts"][0]["data"], entry["data"]);
}

#[test]
fn failure_replay_reproduces_the_failure() {
    let o = run(&[
        "identity",
        "--kind",
        "C",
        "--n",
        "3",
        "--m",
        "1",
        "--mode",
        "float",
        "--samples",
        "3",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    let failed = r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["verdict"] == "fail")
        .unwrap()
        .clone();
    let mut cfg = r["config"].clone();
    cfg["replay"] = failed["inputs"].clone();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("replay.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = run(&["identity", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["verdicts"][0]["verdict"], "fail");
}

#[test]
fn csv_is_written_next_to_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.json");
    let o = run(&[
        "evolve",
        "--kind",
        "C",
        "--z",
        "0.9,2.1",
        "--p",
        "0.1,-0.2",
        "--hbar",
        "0.3",
        "--xi",
        "0.4",
        "--jobs",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert!(csv.starts_with("t,q_1,q_2,p_1,p_2\n"));
    assert_eq!(csv.lines().count(), 1002);

    let out = dir.path().join("spec.json");
    let o = run(&[
        "quantum-oracle",
        "--kind",
        "B",
        "--z",
        "1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spec.csv")).unwrap();
    assert!(csv.starts_with("sector,"));
}
