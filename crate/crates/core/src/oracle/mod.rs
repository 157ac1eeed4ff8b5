//! Brute-force ground truth: breadth-first search over concrete states and
//! exhaustive enumeration of bounded state boxes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::model::{apply_values, state_holds, Binding, ConcreteState, EvalError, Expr, Model, Step, SymbolKind};

/// Default bound on states created by one search.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("initial state is not determined for field(s): {}", .0.join(", "))]
    InitialStateUndetermined(Vec<String>),
    #[error("state-space budget of {0} nodes exceeded")]
    BudgetExceeded(usize),
    #[error("domain of {0} candidate states exceeds the budget")]
    DomainTooLarge(u128),
    #[error("no value for instance symbol `{0}`")]
    MissingBinding(String),
    #[error("`{0}` is neither an instance symbol nor a state field")]
    UnknownSymbol(String),
    #[error("domain has {found} ranges, model has {expected} {what}")]
    DomainArity { what: &'static str, expected: usize, found: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// A concrete problem: values for every instance symbol plus optional pins
/// fixing state fields of the initial state (e.g. a boat capacity modelled
/// as a state component).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub bindings: Binding,
    pub pins: BTreeMap<String, i64>,
}

impl Instance {
    /// Splits `values` into instance bindings and state pins; every instance
    /// symbol must be covered.
    pub fn new(model: &Model, values: &BTreeMap<String, i64>) -> Result<Self, OracleError> {
        let mut inst = Instance::default();
        for (name, v) in values {
            match model.symbol_kind(name) {
                Some(SymbolKind::Instance) => inst.bindings.insert(name.clone(), *v),
                Some(SymbolKind::State) => {
                    inst.pins.insert(name.clone(), *v);
                }
                _ => return Err(OracleError::UnknownSymbol(name.clone())),
            }
        }
        if let Some(missing) = model.instance_symbols.iter().find(|s| inst.bindings.get(s).is_none()) {
            return Err(OracleError::MissingBinding(missing.clone()));
        }
        Ok(inst)
    }

    fn pins_hold(&self, model: &Model, state: &[i64]) -> bool {
        self.pins.iter().all(|(f, v)| model.state_index(f).map(|i| state[i]) == Some(*v))
    }
}

/// Parameter bindings, one per transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub instance: Binding,
    pub initial: ConcreteState,
    pub steps: Vec<Binding>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One line per step: `1. mm=2 mc=0`.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let args: Vec<String> = step.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("{}. {}\n", i + 1, args.join(" ")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    /// A plan of minimal length.
    Found(Plan),
    /// No final state within `depth` transitions; `explored` states were visited.
    Exhausted { depth: u32, explored: usize },
}

impl Reachability {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            Reachability::Found(p) => Some(p),
            Reachability::Exhausted { .. } => None,
        }
    }
}

/// Conjuncts of a (possibly nested) conjunction.
fn conjuncts<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::And(xs) => xs.iter().for_each(|x| conjuncts(x, out)),
        other => out.push(other),
    }
}

/// Initial states admitted by the model and instance: the pinned fields plus
/// whatever the initial predicate fixes through `field = expr` conjuncts.
/// Fields left open are enumerated over `fallback` when given; otherwise the
/// state is undetermined. The result may be empty when the derived state
/// violates `initial`, `valid` or the model's constraints.
pub fn initial_states(
    model: &Model,
    instance: &Instance,
    fallback: Option<&[RangeInclusive<i64>]>,
) -> Result<Vec<ConcreteState>, OracleError> {
    let mut known: BTreeMap<&str, i64> = instance.pins.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let mut eqs = Vec::new();
    conjuncts(&model.initial, &mut eqs);
    loop {
        let mut progress = false;
        for e in &eqs {
            let Expr::Eq(a, b) = e else { continue };
            for (lhs, rhs) in [(a, b), (b, a)] {
                let Expr::Sym(f) = lhs.as_ref() else { continue };
                if model.state_index(f).is_none() || known.contains_key(f.as_str()) {
                    continue;
                }
                let mut env = instance.bindings.clone();
                for (k, v) in &known {
                    env.insert(*k, *v);
                }
                if let Ok(crate::model::Value::Int(v)) = crate::model::eval_expr(rhs, &env) {
                    known.insert(f.as_str(), v);
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }

    let open: Vec<usize> = (0..model.state_fields.len()).filter(|i| !known.contains_key(model.state_fields[*i].as_str())).collect();
    let mut base: Vec<i64> = model.state_fields.iter().map(|f| known.get(f.as_str()).copied().unwrap_or(0)).collect();
    let admissible = |s: &[i64]| -> Result<bool, OracleError> {
        Ok(instance.pins_hold(model, s)
            && state_holds(model, &model.initial, s, &instance.bindings)?
            && state_holds(model, &model.valid, s, &instance.bindings)?
            && constraints_hold(model, s, &instance.bindings)?)
    };
    if open.is_empty() {
        return Ok(if admissible(&base)? { vec![ConcreteState::new(base)] } else { Vec::new() });
    }
    let Some(domain) = fallback else {
        return Err(OracleError::InitialStateUndetermined(open.iter().map(|i| model.state_fields[*i].clone()).collect()));
    };
    check_arity("state fields", model.state_fields.len(), domain.len())?;
    let ranges: Vec<RangeInclusive<i64>> = open.iter().map(|i| domain[*i].clone()).collect();
    budget(&ranges, DEFAULT_NODE_CAP)?;
    let mut found = Vec::new();
    for_each_point(&ranges, |vals| {
        for (slot, v) in open.iter().zip(vals) {
            base[*slot] = *v;
        }
        if admissible(&base)? {
            found.push(ConcreteState::new(base.clone()));
        }
        Ok(true)
    })?;
    Ok(found)
}

fn constraints_hold(model: &Model, s: &[i64], instance: &Binding) -> Result<bool, OracleError> {
    for c in &model.constraints {
        if !state_holds(model, c, s, instance)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_arity(what: &'static str, expected: usize, found: usize) -> Result<(), OracleError> {
    if expected != found {
        return Err(OracleError::DomainArity { what, expected, found });
    }
    Ok(())
}

fn budget(ranges: &[RangeInclusive<i64>], cap: usize) -> Result<(), OracleError> {
    let total = ranges.iter().try_fold(1u128, |acc, r| {
        let width = if r.is_empty() { 0 } else { (*r.end() as i128 - *r.start() as i128 + 1) as u128 };
        acc.checked_mul(width)
    });
    match total {
        Some(n) if n <= cap as u128 => Ok(()),
        Some(n) => Err(OracleError::DomainTooLarge(n)),
        None => Err(OracleError::DomainTooLarge(u128::MAX)),
    }
}

/// Visits every point of the box in lexicographic order until `f` returns false.
fn for_each_point(
    ranges: &[RangeInclusive<i64>],
    mut f: impl FnMut(&[i64]) -> Result<bool, OracleError>,
) -> Result<(), OracleError> {
    if ranges.iter().any(|r| r.is_empty()) {
        return Ok(());
    }
    let mut point: Vec<i64> = ranges.iter().map(|r| *r.start()).collect();
    loop {
        if !f(&point)? {
            return Ok(());
        }
        let mut i = point.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if point[i] < *ranges[i].end() {
                point[i] += 1;
                break;
            }
            point[i] = *ranges[i].start();
        }
    }
}

/// `0..=m` for every parameter, where `m` is the largest instance value,
/// pin or initial-state component (at least 0).
pub fn default_param_domain(model: &Model, instance: &Instance, initial: &[ConcreteState]) -> Vec<RangeInclusive<i64>> {
    let top = instance
        .bindings
        .iter()
        .map(|(_, v)| v)
        .chain(instance.pins.values().copied())
        .chain(initial.iter().flat_map(|s| s.values().iter().copied()))
        .max()
        .unwrap_or(0)
        .max(0);
    vec![0..=top; model.param_fields.len()]
}

struct Node {
    state: Vec<i64>,
    parent: Option<usize>,
    params: Vec<i64>,
}

/// Breadth-first search from the initial state(s) through valid states.
/// Returns a minimal plan reaching a final state within `max_depth`
/// transitions, or reports exhaustion.
pub fn bfs_reachability(
    model: &Model,
    instance: &Instance,
    param_domain: &[RangeInclusive<i64>],
    max_depth: u32,
) -> Result<Reachability, OracleError> {
    bfs_with_cap(model, instance, param_domain, max_depth, DEFAULT_NODE_CAP)
}

pub fn bfs_with_cap(
    model: &Model,
    instance: &Instance,
    param_domain: &[RangeInclusive<i64>],
    max_depth: u32,
    node_cap: usize,
) -> Result<Reachability, OracleError> {
    check_arity("parameters", model.param_fields.len(), param_domain.len())?;
    let inst = &instance.bindings;
    let starts = initial_states(model, instance, None)?;

    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut frontier = Vec::new();
    for s in starts {
        if seen.insert(s.values().to_vec()) {
            nodes.push(Node { state: s.values().to_vec(), parent: None, params: Vec::new() });
            let id = nodes.len() - 1;
            if state_holds(model, &model.final_pred, &nodes[id].state, inst)? {
                return Ok(Reachability::Found(rebuild(model, instance, &nodes, id)));
            }
            frontier.push(id);
        }
    }

    for _ in 0..max_depth {
        let mut next = Vec::new();
        for &id in &frontier {
            let mut hit = None;
            for_each_point(param_domain, |params| {
                let Step::Applied(succ) = apply_values(model, &nodes[id].state, params, inst)? else { return Ok(true) };
                let succ = succ.0;
                if seen.contains(&succ) || !state_holds(model, &model.valid, &succ, inst)? {
                    return Ok(true);
                }
                if nodes.len() >= node_cap {
                    return Err(OracleError::BudgetExceeded(node_cap));
                }
                seen.insert(succ.clone());
                let is_final = state_holds(model, &model.final_pred, &succ, inst)?;
                nodes.push(Node { state: succ, parent: Some(id), params: params.to_vec() });
                next.push(nodes.len() - 1);
                if is_final {
                    hit = Some(nodes.len() - 1);
                    return Ok(false);
                }
                Ok(true)
            })?;
            if let Some(goal) = hit {
                return Ok(Reachability::Found(rebuild(model, instance, &nodes, goal)));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(Reachability::Exhausted { depth: max_depth, explored: nodes.len() })
}

fn rebuild(model: &Model, instance: &Instance, nodes: &[Node], goal: usize) -> Plan {
    let mut steps = Vec::new();
    let mut cur = goal;
    while let Some(parent) = nodes[cur].parent {
        steps.push(model.param_fields.iter().cloned().zip(nodes[cur].params.iter().copied()).collect());
        cur = parent;
    }
    steps.reverse();
    Plan { instance: instance.bindings.clone(), initial: ConcreteState::new(nodes[cur].state.clone()), steps }
}

/// Lexicographically first state of the box satisfying `valid ∧ final`, the
/// model's constraints and the instance pins.
pub fn enumerate_vfs(
    model: &Model,
    instance: &Instance,
    state_domain: &[RangeInclusive<i64>],
) -> Result<Option<ConcreteState>, OracleError> {
    check_arity("state fields", model.state_fields.len(), state_domain.len())?;
    // pinned fields collapse to their value, inside the box or not
    let ranges: Vec<RangeInclusive<i64>> = model
        .state_fields
        .iter()
        .zip(state_domain)
        .map(|(f, r)| instance.pins.get(f).map_or_else(|| r.clone(), |v| *v..=*v))
        .collect();
    budget(&ranges, DEFAULT_NODE_CAP)?;
    let inst = &instance.bindings;
    let mut found = None;
    for_each_point(&ranges, |s| {
        if state_holds(model, &model.valid, s, inst)?
            && state_holds(model, &model.final_pred, s, inst)?
            && constraints_hold(model, s, inst)?
        {
            found = Some(ConcreteState::new(s.to_vec()));
            return Ok(false);
        }
        Ok(true)
    })?;
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    GuardFailed,
    InvalidState,
    MissingParameter,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::GuardFailed => "guard-failed",
            FailureReason::InvalidState => "invalid-state",
            FailureReason::MissingParameter => "missing-parameter",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step}: {reason}")]
    Failed { step: usize, reason: FailureReason },
    #[error("step {step}: {source}")]
    Eval { step: usize, source: EvalError },
}

/// Applies the plan's steps from `start`, checking validity after each.
/// Returns the end state; whether it is final is for the caller to judge.
pub fn replay_plan(model: &Model, instance: &Instance, start: &ConcreteState, plan: &Plan) -> Result<ConcreteState, ReplayError> {
    let mut state = start.clone();
    for (step, binding) in plan.steps.iter().enumerate() {
        let params = model
            .param_fields
            .iter()
            .map(|p| binding.get(p))
            .collect::<Option<Vec<_>>>()
            .ok_or(ReplayError::Failed { step, reason: FailureReason::MissingParameter })?;
        let eval = |source| ReplayError::Eval { step, source };
        match apply_values(model, state.values(), &params, &instance.bindings).map_err(eval)? {
            Step::Inapplicable => return Err(ReplayError::Failed { step, reason: FailureReason::GuardFailed }),
            Step::Applied(next) => {
                if !state_holds(model, &model.valid, next.values(), &instance.bindings).map_err(eval)? {
                    return Err(ReplayError::Failed { step, reason: FailureReason::InvalidState });
                }
                state = next;
            }
        }
    }
    Ok(state)
}

pub fn is_final(model: &Model, instance: &Instance, state: &ConcreteState) -> Result<bool, EvalError> {
    state_holds(model, &model.final_pred, state.values(), &instance.bindings)
}

pub fn is_valid(model: &Model, instance: &Instance, state: &ConcreteState) -> Result<bool, EvalError> {
    state_holds(model, &model.valid, state.values(), &instance.bindings)
}
