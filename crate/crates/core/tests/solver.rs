use std::collections::BTreeMap;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::Duration;

use modelgate_core::dsl::parse_model;
use modelgate_core::encoder::{encode, Element, EncodingConfig, PfsMode};
use modelgate_core::model::Model;
use modelgate_core::oracle::{is_final, is_valid, replay_plan, Instance};
use modelgate_core::solver::{parse_witness, probe_solver, run_solver, Outcome, SolverConfig, SolverError};

fn corpus(name: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.tsm"));
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pins(nm: i64, nc: i64, bcap: i64) -> BTreeMap<String, i64> {
    BTreeMap::from([("nm".to_string(), nm), ("nc".to_string(), nc), ("bcap".to_string(), bcap)])
}

fn z3() -> SolverConfig {
    SolverConfig::locate(None).with_timeout(Duration::from_secs(120))
}

fn fake_solver(dir: &Path, body: &str) -> SolverConfig {
    let path = dir.join("fake-solver");
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    SolverConfig::new(path).with_timeout(Duration::from_secs(10))
}

#[test]
fn probe_reports_a_version() {
    let version = probe_solver(&z3()).unwrap();
    assert!(version.to_lowercase().contains("z3"), "{version}");
}

#[test]
fn vfs_witness_is_valid_and_final() {
    let m = corpus("mc_model1");
    let script = encode(&m, &EncodingConfig::vfs()).unwrap();
    let verdict = run_solver(&script, &z3()).unwrap();
    assert_eq!(verdict.outcome, Outcome::Sat);
    assert!(verdict.stats.contains_key("rlimit-count"));
    let w = parse_witness(&verdict, &script).unwrap();
    let inst = Instance::new(&m, &w.instance(&m).0).unwrap();
    let s = w.state_at(&m, 0).unwrap();
    assert!(is_valid(&m, &inst, &s).unwrap() && is_final(&m, &inst, &s).unwrap());
}

#[test]
fn pfs_witness_of_the_classic_instance() {
    let m = corpus("mc_model1");
    for mode in [PfsMode::Unrolled, PfsMode::Recursive] {
        let config = EncodingConfig::pfs(mode, 11).pin_all(&m, &pins(3, 3, 2)).unwrap();
        let script = encode(&m, &config).unwrap();
        let verdict = run_solver(&script, &z3()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Sat, "{mode}");
        let w = parse_witness(&verdict, &script).unwrap();
        // no plan shorter than eleven steps exists
        assert_eq!(w.step_count, Some(11));
        let params = w.assignments.keys().filter(|e| matches!(e, Element::Param { step, .. } if *step < 11)).count();
        assert_eq!(params, 22);
        let plan = w.plan(&m).unwrap();
        let inst = Instance::new(&m, &pins(3, 3, 2)).unwrap();
        let end = replay_plan(&m, &inst, &plan.initial, &plan).unwrap();
        assert!(is_final(&m, &inst, &end).unwrap());

        let shorter = EncodingConfig::pfs(mode, 10).pin_all(&m, &pins(3, 3, 2)).unwrap();
        let verdict = run_solver(&encode(&m, &shorter).unwrap(), &z3()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Unsat, "{mode}");
        assert!(verdict.raw_model.is_none());
    }
}

#[test]
fn timeout_gives_unknown_and_keeps_the_script() {
    let m = corpus("mc_model3");
    let config = EncodingConfig::pfs(PfsMode::Recursive, 100).pin_all(&m, &pins(3, 3, 3)).unwrap();
    let script = encode(&m, &config).unwrap();
    let verdict = run_solver(&script, &z3().with_timeout(Duration::from_millis(300))).unwrap();
    assert_eq!(verdict.outcome, Outcome::Unknown);
    assert!(verdict.timed_out());
    let kept = verdict.script_path.expect("timed-out scripts are retained");
    assert_eq!(std::fs::read_to_string(&kept).unwrap(), script.text);
    std::fs::remove_dir_all(kept.parent().unwrap()).unwrap();
}

#[test]
fn solver_protocol_failures() {
    let dir = tempfile::tempdir().unwrap();
    let m = corpus("mc_model1");
    let script = encode(&m, &EncodingConfig::vfs()).unwrap();

    let silent = fake_solver(dir.path(), "echo hello");
    assert!(matches!(run_solver(&script, &silent), Err(SolverError::Protocol { .. })));

    let crash = fake_solver(dir.path(), "echo boom >&2; exit 3");
    match run_solver(&script, &crash) {
        Err(SolverError::NonzeroExit { code: 3, diagnostics, script: Some(kept) }) => {
            assert!(diagnostics.contains("boom"));
            std::fs::remove_dir_all(kept.parent().unwrap()).unwrap();
        }
        other => panic!("{other:?}"),
    }

    let unknown = fake_solver(dir.path(), "echo unknown; echo '(:reason-unknown \"incomplete\")'");
    let verdict = run_solver(&script, &unknown).unwrap();
    assert_eq!(verdict.outcome, Outcome::Unknown);
    assert!(!verdict.timed_out());

    // a status word inside an error message does not count
    let chatty = fake_solver(dir.path(), "echo '(error \"expected sat\")'");
    assert!(matches!(run_solver(&script, &chatty), Err(SolverError::Protocol { .. })));

    let missing = SolverConfig::new(dir.path().join("no-such-solver"));
    assert!(matches!(run_solver(&script, &missing), Err(SolverError::Launch { .. })));
}

#[test]
fn scripts_are_removed_after_clean_runs_unless_kept() {
    let m = corpus("mc_model2");
    let script = encode(&m, &EncodingConfig::vfs()).unwrap();
    let verdict = run_solver(&script, &z3()).unwrap();
    assert_eq!(verdict.outcome, Outcome::Unsat);
    assert!(verdict.script_path.is_none());

    let mut keep = z3();
    keep.keep_scripts = true;
    let verdict = run_solver(&script, &keep).unwrap();
    let kept = verdict.script_path.unwrap();
    assert!(kept.exists());
    std::fs::remove_dir_all(kept.parent().unwrap()).unwrap();
}
