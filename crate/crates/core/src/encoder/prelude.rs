use std::fmt::Write;

use super::logic_for;
use super::smt::{app, term};
use crate::model::Model;

/// `(set-logic ...)` followed by the definitions shared by every property.
pub fn emit_prelude(model: &Model) -> String {
    let mut out = format!("(set-logic {})\n", logic_for(model, []));
    out.push_str(&definitions(model));
    out
}

/// Instance declarations and the model's predicate/update functions.
///
/// Functions take state fields (and, for `guard`/`next_*`, parameters) as
/// arguments in declaration order; instance symbols are global constants.
pub(crate) fn definitions(model: &Model) -> String {
    let mut out = String::new();
    if !model.instance_symbols.is_empty() {
        out.push_str("; instance symbols\n");
        for s in &model.instance_symbols {
            let _ = writeln!(out, "(declare-const {s} Int)");
        }
    }
    let state_sig = signature(&model.state_fields);
    let step_sig = signature(model.state_fields.iter().chain(&model.param_fields));
    let local = |s: &str| s.to_string();

    out.push_str("; model predicates\n");
    for (name, pred) in [("valid", &model.valid), ("initial", &model.initial), ("final", &model.final_pred)] {
        let _ = writeln!(out, "(define-fun {name} {state_sig} Bool\n  {})", term(pred, &local));
    }
    let _ = writeln!(out, "(define-fun guard {step_sig} Bool\n  {})", term(&model.guard, &local));
    out.push_str("; next-state functions, evaluated against the pre-state\n");
    for field in &model.state_fields {
        let _ = writeln!(out, "(define-fun next_{field} {step_sig} Int\n  {})", term(&model.update[field], &local));
    }
    out
}

fn signature<'a>(names: impl IntoIterator<Item = &'a String>) -> String {
    let args: Vec<String> = names.into_iter().map(|n| format!("({n} Int)")).collect();
    format!("({})", args.join(" "))
}

/// Calls `f` with one argument per state field, named by `field_name`.
pub(crate) fn call_state(f: &str, model: &Model, field_name: &dyn Fn(usize, &str) -> String) -> String {
    app(f, model.state_fields.iter().enumerate().map(|(i, s)| field_name(i, s)))
}

/// Calls `f` with state-field arguments followed by parameter arguments.
pub(crate) fn call_step(
    f: &str,
    model: &Model,
    field_name: &dyn Fn(usize, &str) -> String,
    param_name: &dyn Fn(usize, &str) -> String,
) -> String {
    let args = model
        .state_fields
        .iter()
        .enumerate()
        .map(|(i, s)| field_name(i, s))
        .chain(model.param_fields.iter().enumerate().map(|(i, p)| param_name(i, p)));
    app(f, args)
}
