use std::collections::BTreeMap;
use std::path::PathBuf;

use modelgate_core::dsl::parse_model;
use modelgate_core::model::{Binding, ConcreteState, Model};
use modelgate_core::oracle::{
    bfs_reachability, default_param_domain, enumerate_vfs, initial_states, is_final, is_valid, replay_plan, FailureReason,
    Instance, OracleError, Plan, Reachability, ReplayError,
};

fn corpus(name: &str) -> Model {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.tsm"));
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn mc(model: &Model, nm: i64, nc: i64, bcap: i64) -> Instance {
    let values = BTreeMap::from([("nm".to_string(), nm), ("nc".to_string(), nc), ("bcap".to_string(), bcap)]);
    Instance::new(model, &values).unwrap()
}

fn search(model: &Model, inst: &Instance, depth: u32) -> Reachability {
    let starts = initial_states(model, inst, None).unwrap();
    let domain = default_param_domain(model, inst, &starts);
    bfs_reachability(model, inst, &domain, depth).unwrap()
}

#[test]
fn closed_form_initial_state() {
    let m = corpus("mc_model1");
    let starts = initial_states(&m, &mc(&m, 3, 3, 2), None).unwrap();
    assert_eq!(starts, vec![ConcreteState::new(vec![2, 3, 3, 1, 0, 0])]);
}

#[test]
fn classic_instance_needs_eleven_crossings() {
    let m = corpus("mc_model1");
    let inst = mc(&m, 3, 3, 2);
    let plan = search(&m, &inst, 16).plan().cloned().expect("3/3/2 is solvable");
    assert_eq!(plan.len(), 11);
    let end = replay_plan(&m, &inst, &plan.initial, &plan).unwrap();
    assert_eq!(end.values(), &[2, 0, 0, 2, 3, 3]);
    assert!(is_final(&m, &inst, &end).unwrap());

    // the explicit 0..bcap domain gives the same answer
    let r = bfs_reachability(&m, &inst, &[0..=2, 0..=2], 16).unwrap();
    assert_eq!(r.plan().map(Plan::len), Some(11));
}

#[test]
fn four_four_two_is_unsolvable() {
    let m = corpus("mc_model1");
    assert!(matches!(search(&m, &mc(&m, 4, 4, 2), 30), Reachability::Exhausted { depth: 30, .. }));
}

#[test]
fn empty_instance_cannot_move_the_boat() {
    // final states have the boat on shore 2, and nobody is there to row it
    let m = corpus("mc_model1");
    assert!(matches!(search(&m, &mc(&m, 0, 0, 3), 5), Reachability::Exhausted { explored: 1, .. }));
}

#[test]
fn final_initial_state_gives_the_empty_plan() {
    let m = parse_model(
        "(model stay) (instance (g Int)) (state (x Int)) (params (a Int))
         (valid true) (initial (= x g)) (final (= x g)) (guard false) (update (x a))",
    )
    .unwrap();
    let inst = Instance::new(&m, &BTreeMap::from([("g".to_string(), 4)])).unwrap();
    let plan = search(&m, &inst, 3).plan().cloned().unwrap();
    assert!(plan.is_empty());
    assert_eq!(plan.initial.values(), &[4]);
}

#[test]
fn restricted_transition_cannot_ferry_three_three_three() {
    let m = corpus("mc_model3");
    assert!(matches!(search(&m, &mc(&m, 3, 3, 3), 16), Reachability::Exhausted { .. }));
}

#[test]
fn strict_model_has_no_reachable_final_state() {
    let m = corpus("mc_model2");
    // the strict variant rejects the initial state of any balanced instance
    assert!(initial_states(&m, &mc(&m, 3, 3, 2), None).unwrap().is_empty());
    assert!(matches!(search(&m, &mc(&m, 3, 3, 2), 20), Reachability::Exhausted { explored: 0, .. }));
}

#[test]
fn vfs_by_enumeration() {
    let box6 = vec![0..=3; 6];
    let m1 = corpus("mc_model1");
    let s = enumerate_vfs(&m1, &mc(&m1, 3, 3, 2), &box6).unwrap().unwrap();
    assert_eq!(s.values(), &[2, 0, 0, 2, 3, 3]);

    let m2 = corpus("mc_model2");
    assert_eq!(enumerate_vfs(&m2, &mc(&m2, 3, 3, 2), &box6).unwrap(), None);

    let m3 = corpus("mc_model3");
    assert!(enumerate_vfs(&m3, &mc(&m3, 3, 3, 2), &box6).unwrap().is_some());
}

#[test]
fn replay_reports_guard_failure() {
    let m = corpus("mc_model1");
    let inst = mc(&m, 3, 3, 2);
    let start = initial_states(&m, &inst, None).unwrap().remove(0);
    let plan = Plan {
        instance: inst.bindings.clone(),
        initial: start.clone(),
        steps: vec![Binding::new().with("mm", 3).with("mc", 0)],
    };
    assert_eq!(
        replay_plan(&m, &inst, &start, &plan),
        Err(ReplayError::Failed { step: 0, reason: FailureReason::GuardFailed })
    );
    // two missionaries leave one behind with three cannibals
    let plan = Plan { steps: vec![Binding::new().with("mm", 2).with("mc", 0)], ..plan };
    assert_eq!(
        replay_plan(&m, &inst, &start, &plan),
        Err(ReplayError::Failed { step: 0, reason: FailureReason::InvalidState })
    );
}

#[test]
fn every_bfs_plan_replays_to_a_final_state() {
    for name in ["mc_model1", "mc_model3"] {
        let m = corpus(name);
        for nm in 1..=4 {
            for nc in 1..=4 {
                for bcap in 2..=4 {
                    let inst = mc(&m, nm, nc, bcap);
                    if let Reachability::Found(plan) = search(&m, &inst, 20) {
                        let end = replay_plan(&m, &inst, &plan.initial, &plan).unwrap();
                        assert!(is_valid(&m, &inst, &end).unwrap() && is_final(&m, &inst, &end).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn free_capacity_is_undetermined() {
    let m = corpus("mc_model1");
    let values = BTreeMap::from([("nm".to_string(), 3), ("nc".to_string(), 3)]);
    let inst = Instance::new(&m, &values).unwrap();
    assert_eq!(
        bfs_reachability(&m, &inst, &[0..=2, 0..=2], 5),
        Err(OracleError::InitialStateUndetermined(vec!["bcap".into()]))
    );
    let missing = BTreeMap::from([("nm".to_string(), 3)]);
    assert_eq!(Instance::new(&m, &missing), Err(OracleError::MissingBinding("nc".into())));
}
