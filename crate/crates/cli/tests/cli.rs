use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_modelgate"));
    c.env_remove("MODELGATE_SOLVER");
    c
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.tsm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fake_solver(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("fake-solver");
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn records(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const LOWER_BOUNDS: [&str; 6] = ["--constrain", "(< 2 nm)", "--constrain", "(< 2 nc)", "--constrain", "(< 2 bcap)"];

#[test]
fn vfs_verdicts_map_to_exit_codes() {
    let m1 = corpus("mc_model1");
    let mut args = vec!["check", m1.to_str().unwrap(), "--property", "vfs", "--format", "records"];
    args.extend(LOWER_BOUNDS);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = &records(&o)[0];
    assert_eq!(r["outcome"], "sat");
    assert_eq!(r["witness_state"]["bp"], 2);
    assert_eq!(r["constraints"].as_array().unwrap().len(), 3);

    let m2 = corpus("mc_model2");
    let o = run(&["check", m2.to_str().unwrap(), "--property", "vfs"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("verdict: unsat"));
}

#[test]
fn pfs_check_reports_a_replayed_plan() {
    let m = corpus("mc_model1");
    let o = run(&[
        "check", m.to_str().unwrap(), "--property", "pfs", "--depth", "11", "--nm", "3", "--nc", "3", "--bcap", "2", "--oracle",
        "--format", "records",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = &records(&o)[0];
    assert_eq!(r["plan"].as_array().unwrap().len(), 11);
    assert!(r["oracle"].as_str().unwrap().starts_with("agrees"));

    let o = run(&["check", m.to_str().unwrap(), "--property", "pfs", "--mode", "recursive", "--depth", "10", "--nm", "3", "--nc", "3", "--bcap", "2", "--oracle"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn plan_deepens_to_the_shortest_plan() {
    let m = corpus("mc_model1");
    let o = run(&["plan", m.to_str().unwrap(), "--nm", "3", "--nc", "3", "--bcap", "2", "--format", "records"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(records(&o)[0]["plan"].as_array().unwrap().len(), 11);

    let o = run(&["plan", m.to_str().unwrap(), "--nm", "4", "--nc", "4", "--bcap", "2", "--max-depth", "6"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("unsat within bound"), "{}", stdout(&o));

    // the replay check needs every instance value
    let o = run(&["plan", m.to_str().unwrap(), "--nm", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unknown_answers_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let fake = fake_solver(dir.path(), "echo unknown");
    let m = corpus("mc_model1");
    let o = run(&["check", m.to_str().unwrap(), "--property", "vfs", "--solver", fake.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    let slow = fake_solver(dir.path(), "sleep 5; echo sat");
    let o = run(&["check", m.to_str().unwrap(), "--property", "vfs", "--solver", slow.to_str().unwrap(), "--timeout", "0.2", "--format", "records"]);
    assert_eq!(code(&o), 2);
    let r = &records(&o)[0];
    assert_eq!(r["stats"]["timeout"], 1.0);
    let script = r["script"].as_str().expect("timed-out scripts are kept");
    assert!(Path::new(script).exists());
    let _ = std::fs::remove_dir_all(Path::new(script).parent().unwrap());
}

#[test]
fn tool_errors_exit_above_two() {
    let m = corpus("mc_model1");
    let m = m.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();

    // usage and input errors
    for args in [
        vec!["check", "/nonexistent/model.tsm", "--property", "vfs"],
        vec!["check", m, "--property", "vfs", "--depth", "3"],
        vec!["check", m, "--property", "maybe"],
        vec!["check", m, "--property", "vfs", "--fix", "bogus"],
        vec!["check", m, "--property", "vfs", "--fix", "mm=1"],
        vec!["check", m, "--property", "vfs", "--constrain", "(< 2"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 3, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }

    let bad = dir.path().join("bad.tsm");
    std::fs::write(&bad, "(model bad)\n(state (x Int))\n(valid (> x))\n").unwrap();
    let o = run(&["check", bad.to_str().unwrap(), "--property", "vfs"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bad.tsm:3:"), "{}", stderr(&o));

    // solver failures
    let o = run(&["check", m, "--property", "vfs", "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&o), 4);
    let crash = fake_solver(dir.path(), "echo 'segfault' >&2; exit 139");
    let o = run(&["check", m, "--property", "vfs", "--solver", crash.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("segfault"), "{}", stderr(&o));

    // a sat answer whose model does not hold up
    let liar = fake_solver(dir.path(), "echo sat; echo '(\n)'");
    let o = run(&["check", m, "--property", "vfs", "--solver", liar.to_str().unwrap()]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
}

#[test]
fn environment_selects_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let fake = fake_solver(dir.path(), "echo unknown");
    let m = corpus("mc_model1");
    let o = bin().env("MODELGATE_SOLVER", &fake).args(["check", m.to_str().unwrap(), "--property", "vfs"]).output().unwrap();
    assert_eq!(code(&o), 2);
    // an explicit flag wins over the environment
    let o = bin().env("MODELGATE_SOLVER", &fake).args(["check", m.to_str().unwrap(), "--property", "vfs", "--solver", "z3"]).output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn cross_solver_disagreement_is_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let liar = fake_solver(dir.path(), "echo unsat");
    let m = corpus("mc_model1");
    let o = run(&["check", m.to_str().unwrap(), "--property", "vfs", "--cross-solver", liar.to_str().unwrap()]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    let o = run(&["check", m.to_str().unwrap(), "--property", "vfs", "--cross-solver", "z3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn emit_matches_the_encoder_snapshots() {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    for model in ["mc_model1", "mc_model2", "mc_model3"] {
        let path = corpus(model);
        let cases = [
            ("vfs", vec!["--property", "vfs"]),
            ("pfs_unrolled", vec!["--property", "pfs", "--mode", "unrolled", "--depth", "4"]),
            ("pfs_recursive", vec!["--property", "pfs", "--mode", "recursive", "--depth", "4"]),
        ];
        for (tag, extra) in cases {
            let mut args = vec!["emit", path.to_str().unwrap()];
            args.extend(extra);
            let o = run(&args);
            assert_eq!(code(&o), 0);
            let expected = std::fs::read_to_string(golden.join(format!("{model}_{tag}.smt2"))).unwrap();
            assert!(stdout(&o) == expected, "{model} {tag} differs from its snapshot");
        }
    }
}

#[test]
fn bench_handles_empty_and_broken_directories() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2, "header only:\n{}", stdout(&o));

    std::fs::copy(corpus("mc_model2"), dir.path().join("a.tsm")).unwrap();
    std::fs::write(dir.path().join("b.tsm"), "(model b) (state (x Int)").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap(), "--format", "records"]);
    assert_eq!(code(&o), 3);
    let rows = records(&o);
    let summary: Vec<(String, String)> =
        rows.iter().map(|r| (r["property"].as_str().unwrap().into(), r["outcome"].as_str().unwrap().into())).collect();
    let expect = [("vfs", "unsat"), ("pfs", "unsat"), ("vfs", "error"), ("pfs", "error")];
    assert_eq!(summary, expect.map(|(a, b)| (a.to_string(), b.to_string())));
    assert!(rows[2]["error"].as_str().unwrap().contains("b.tsm"));
    assert_eq!(rows[1]["instance"]["nm"], 3);
}

#[test]
fn oracle_reports_ground_truth_and_compares() {
    let m = corpus("mc_model1");
    let m = m.to_str().unwrap();
    let o = run(&["oracle", m, "--nm", "3", "--nc", "3", "--bcap", "2", "--format", "records"]);
    assert_eq!(code(&o), 0);
    let rows = records(&o);
    assert_eq!(rows[1]["plan"].as_array().unwrap().len(), 11);

    let o = run(&["oracle", m, "--nm", "4", "--nc", "4", "--bcap", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("exhausted"));

    let o = run(&["oracle", m, "--nm", "3", "--nc", "3", "--bcap", "2", "--node-cap", "3"]);
    assert_eq!(code(&o), 6, "{}", stderr(&o));

    let o = run(&["oracle", m, "--nm", "3"]);
    assert_eq!(code(&o), 3);

    // prior records: one honest, one wrong
    let dir = tempfile::tempdir().unwrap();
    let honest = run(&["check", m, "--property", "pfs", "--depth", "11", "--nm", "3", "--nc", "3", "--bcap", "2", "--format", "records"]);
    let file = dir.path().join("prior.jsonl");
    std::fs::write(&file, stdout(&honest)).unwrap();
    let o = run(&["oracle", m, "--nm", "3", "--nc", "3", "--bcap", "2", "--compare", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("prior reports agree"));

    let wrong = run(&["check", m, "--property", "pfs", "--depth", "10", "--nm", "3", "--nc", "3", "--bcap", "2", "--format", "records"]);
    let forged = stdout(&wrong).replace("\"outcome\":\"unsat\"", "\"outcome\":\"sat\"");
    std::fs::write(&file, forged).unwrap();
    let o = run(&["oracle", m, "--nm", "3", "--nc", "3", "--bcap", "2", "--compare", file.to_str().unwrap()]);
    assert_eq!(code(&o), 5, "{}", stdout(&o));
}

#[test]
fn doctor_probes_the_solver() {
    let o = run(&["doctor"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("Z3 version"), "{}", stdout(&o));
    let o = run(&["doctor", "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&o), 4);
}
