use std::fmt::Write;

use super::prelude::{call_state, call_step, definitions};
use super::smt::{and_all, app};
use super::vfs::{assert_first_state, footer, header, state_const};
use super::{check_inputs, logic_for, Element, EncodeError, EncodingConfig, PfsMode, Property, SmtScript, SymbolMap};
use crate::model::{Model, SymbolKind};

fn param_const(step: u32, param: &str) -> String {
    format!("p{step}_{param}")
}

fn checked_depth(config: &EncodingConfig, mode: PfsMode) -> Result<u32, EncodeError> {
    if config.property != Property::Pfs {
        return Err(EncodeError::Config("PFS encoder called with a VFS configuration".into()));
    }
    if config.pfs_mode.is_some_and(|m| m != mode) {
        return Err(EncodeError::Config(format!("configuration asks for {} mode", config.pfs_mode.unwrap())));
    }
    config.depth_bound.ok_or_else(|| EncodeError::Config("PFS needs a depth bound".into()))
}

/// Bounded unrolling: states `s0..=sd`, parameters `p0..p(d-1)` and a step
/// count `n`. Steps below `n` must be guarded, produce the updated state and
/// keep it valid; `s_n` must be final. Satisfiable iff a plan of length at
/// most `d` exists. States and parameters past `n` are unconstrained.
pub fn encode_pfs_unrolled(model: &Model, config: &EncodingConfig) -> Result<SmtScript, EncodeError> {
    let depth = checked_depth(config, PfsMode::Unrolled)?;
    check_inputs(model, config)?;

    let mut map = SymbolMap::new();
    let mut out = header(model, config);
    if config.produce_model {
        out.push_str("(set-option :produce-models true)\n");
    }
    let _ = writeln!(out, "(set-logic {})", logic_for(model, &config.extra_constraints));
    out.push_str(&definitions(model));
    for s in &model.instance_symbols {
        map.scalar(s.clone(), Element::Instance(s.clone()));
    }

    out.push_str("; number of transitions taken\n(declare-const n Int)\n");
    let _ = writeln!(out, "(assert (and (<= 0 n) (<= n {depth})))");
    map.scalar("n", Element::StepCount);

    out.push_str("; state vectors\n");
    for step in 0..=depth {
        let names: Vec<String> = model.state_fields.iter().map(|f| state_const(step, f)).collect();
        for (name, field) in names.iter().zip(&model.state_fields) {
            map.scalar(name.clone(), Element::StateField { step, field: field.clone() });
        }
        let decls: Vec<String> = names.iter().map(|n| format!("(declare-const {n} Int)")).collect();
        let _ = writeln!(out, "{}", decls.join(" "));
    }
    if depth > 0 && !model.param_fields.is_empty() {
        out.push_str("; transition parameters\n");
        for step in 0..depth {
            let decls: Vec<String> = model
                .param_fields
                .iter()
                .map(|p| {
                    let name = param_const(step, p);
                    map.scalar(name.clone(), Element::Param { step, param: p.clone() });
                    format!("(declare-const {name} Int)")
                })
                .collect();
            let _ = writeln!(out, "{}", decls.join(" "));
        }
    }

    let at = |step: u32| move |_: usize, f: &str| state_const(step, f);
    out.push_str("; initial state\n");
    let _ = writeln!(out, "(assert {})", call_state("initial", model, &at(0)));
    let _ = writeln!(out, "(assert {})", call_state("valid", model, &at(0)));
    out.push_str(&assert_first_state(model, config, &|s| match model.symbol_kind(s) {
        Some(SymbolKind::State) => state_const(0, s),
        _ => s.to_string(),
    }));

    if depth > 0 {
        out.push_str("; transitions\n");
    }
    for step in 0..depth {
        let pre = at(step);
        let post = at(step + 1);
        let params = |_: usize, p: &str| param_const(step, p);
        let mut parts = vec![call_step("guard", model, &pre, &params)];
        for (i, field) in model.state_fields.iter().enumerate() {
            let next = call_step(&format!("next_{field}"), model, &pre, &params);
            parts.push(format!("(= {} {next})", post(i, field)));
        }
        parts.push(call_state("valid", model, &post));
        let _ = writeln!(out, "(assert (=> (< {step} n)\n  {}))", and_all(parts));
    }

    out.push_str("; the state after n transitions is final\n");
    for step in 0..=depth {
        let _ = writeln!(out, "(assert (=> (= n {step}) {}))", call_state("final", model, &at(step)));
    }
    out.push_str(&footer(config));
    Ok(SmtScript { text: out, symbol_map: map, config: config.clone() })
}

/// Recursive-function encoding over array-valued states.
///
/// The state is an `(Array Int Int)` indexed by field position and the plan
/// is a flat parameter array `p` holding `|params|` cells per step. `tran`
/// applies `k` transitions, threading the parameter array, the last state
/// produced and the number of parameter cells consumed by the whole plan
/// (`size`), from which each step's offset is derived. `path_ok` requires
/// every step to be guarded and to reach a valid state.
pub fn encode_pfs_recursive(model: &Model, config: &EncodingConfig) -> Result<SmtScript, EncodeError> {
    let depth = checked_depth(config, PfsMode::Recursive)?;
    check_inputs(model, config)?;
    let width = model.param_fields.len() as i64;

    let mut map = SymbolMap::new();
    let mut out = header(model, config);
    if config.produce_model {
        out.push_str("(set-option :produce-models true)\n");
    }
    out.push_str("; recursive definitions fall outside the standard logics; none is set\n");
    out.push_str("(define-sort State () (Array Int Int))\n(define-sort Params () (Array Int Int))\n");
    out.push_str(&definitions(model));
    for s in &model.instance_symbols {
        map.scalar(s.clone(), Element::Instance(s.clone()));
    }

    let sel = |arr: &str, i: usize| format!("(select {arr} {i})");
    out.push_str("; predicates over array states\n");
    for f in ["valid", "initial", "final"] {
        let _ = writeln!(
            out,
            "(define-fun {f}_st ((s State)) Bool\n  {})",
            call_state(f, model, &|i, _| sel("s", i))
        );
    }

    let param_args: Vec<String> = model.param_fields.iter().map(|p| format!("({p} Int)")).collect();
    let sig = format!("((s State){})", param_args.iter().map(|a| format!(" {a}")).collect::<String>());
    let local_param = |_: usize, p: &str| p.to_string();
    let mut body = "s".to_string();
    for (i, field) in model.state_fields.iter().enumerate() {
        let next = call_step(&format!("next_{field}"), model, &|j, _| sel("s", j), &local_param);
        body = format!("(store {body} {i} {next})");
    }
    let _ = writeln!(out, "(define-fun transition {sig} State\n  {body})");
    let step_ok = and_all(vec![
        call_step("guard", model, &|j, _| sel("s", j), &local_param),
        format!("(valid_st {})", app("transition", std::iter::once("s".to_string()).chain(model.param_fields.clone()))),
    ]);
    let _ = writeln!(out, "(define-fun step_ok {sig} Bool\n  {step_ok})");

    // parameter cell `i` of the step taken when `k` transitions remain
    let cell = |i: i64| {
        let base = format!("(- size (* {width} k))");
        if i == 0 {
            format!("(select params {base})")
        } else {
            format!("(select params (+ {base} {i}))")
        }
    };
    let step_params: Vec<String> = (0..width).map(cell).collect();
    let with_state = |s: &str| std::iter::once(s.to_string()).chain(step_params.iter().cloned());
    let next_state = app("transition", with_state("state"));
    let _ = writeln!(
        out,
        "(define-fun-rec tran ((k Int) (state State) (params Params) (last State) (size Int)) State\n  \
         (ite (<= k 0) last\n    (tran (- k 1) {next_state} params {next_state} size)))"
    );
    let _ = writeln!(
        out,
        "(define-fun-rec path_ok ((k Int) (state State) (params Params) (size Int)) Bool\n  \
         (or (<= k 0)\n    (and {} (path_ok (- k 1) {next_state} params size))))",
        app("step_ok", with_state("state"))
    );

    out.push_str("; initial state, transition count and plan\n");
    out.push_str("(declare-const s0 State)\n(declare-const n Int)\n(declare-const p Params)\n");
    map.array(
        "s0",
        model
            .state_fields
            .iter()
            .enumerate()
            .map(|(i, f)| (i as i64, Element::StateField { step: 0, field: f.clone() }))
            .collect(),
    );
    map.scalar("n", Element::StepCount);
    let mut cells = Vec::new();
    for step in 0..depth {
        for (i, param) in model.param_fields.iter().enumerate() {
            cells.push((step as i64 * width + i as i64, Element::Param { step, param: param.clone() }));
        }
    }
    map.array("p", cells);

    let _ = writeln!(out, "(assert (and (<= 0 n) (<= n {depth})))");
    out.push_str("(assert (initial_st s0))\n(assert (valid_st s0))\n");
    out.push_str(&assert_first_state(model, config, &|s| match model.state_index(s) {
        Some(i) => sel("s0", i),
        None => s.to_string(),
    }));
    let size = format!("(* {width} n)");
    let _ = writeln!(out, "(assert (path_ok n s0 p {size}))");
    let _ = writeln!(out, "(assert (final_st (tran n s0 p s0 {size})))");
    out.push_str(&footer(config));
    Ok(SmtScript { text: out, symbol_map: map, config: config.clone() })
}
