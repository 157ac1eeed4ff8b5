use std::fmt::Write;

use super::prelude::{call_state, definitions};
use super::smt::term;
use super::{check_inputs, logic_for, Element, EncodeError, EncodingConfig, Property, SmtScript, SymbolMap};
use crate::model::{Model, SymbolKind};

pub(crate) fn state_const(step: u32, field: &str) -> String {
    format!("s{step}_{field}")
}

/// Existence of a state that is valid and final, with the state realised as
/// free constants `s0_<field>`.
pub fn encode_vfs(model: &Model, config: &EncodingConfig) -> Result<SmtScript, EncodeError> {
    if config.property != Property::Vfs {
        return Err(EncodeError::Config("encode_vfs called with a PFS configuration".into()));
    }
    if config.pfs_mode.is_some() {
        return Err(EncodeError::Config("a PFS encoding mode is meaningless for VFS".into()));
    }
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

    out.push_str("; candidate state\n");
    for field in &model.state_fields {
        let name = state_const(0, field);
        let _ = writeln!(out, "(declare-const {name} Int)");
        map.scalar(name, Element::StateField { step: 0, field: field.clone() });
    }
    let at0 = |_: usize, f: &str| state_const(0, f);
    out.push_str(&assert_first_state(model, config, &|s| resolve_first(model, s)));
    let _ = writeln!(
        out,
        "(assert (and {} {}))",
        call_state("valid", model, &at0),
        call_state("final", model, &at0)
    );
    out.push_str(&footer(config));
    Ok(SmtScript { text: out, symbol_map: map, config: config.clone() })
}

/// Resolves instance symbols to themselves and state fields to step-0 constants.
fn resolve_first(model: &Model, s: &str) -> String {
    match model.symbol_kind(s) {
        Some(SymbolKind::State) => state_const(0, s),
        _ => s.to_string(),
    }
}

pub(crate) fn header(model: &Model, config: &EncodingConfig) -> String {
    format!("; modelgate: model {}, property {}\n", model.name, config.describe())
}

pub(crate) fn footer(config: &EncodingConfig) -> String {
    let mut out = String::from("(check-sat)\n");
    if config.produce_model {
        out.push_str("(get-model)\n");
    }
    out
}

/// Global constraints, instance pins and extra constraints, all read over the
/// first state.
pub(crate) fn assert_first_state(model: &Model, config: &EncodingConfig, resolve: &dyn Fn(&str) -> String) -> String {
    let mut out = String::new();
    if model.constraints.is_empty() && config.instance_fixing.is_empty() && config.extra_constraints.is_empty() {
        return out;
    }
    out.push_str("; instance restrictions\n");
    for c in &model.constraints {
        let _ = writeln!(out, "(assert {})", term(c, resolve));
    }
    for (sym, v) in &config.instance_fixing {
        let _ = writeln!(out, "(assert (= {sym} {}))", super::smt::int_literal(*v));
    }
    for c in &config.extra_constraints {
        let _ = writeln!(out, "(assert {})", term(c, resolve));
    }
    out
}
