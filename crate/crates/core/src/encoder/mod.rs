//! Compilation of models into SMT-LIB v2 scripts.
//!
//! Two properties are supported: existence of a valid final state ([`Property::Vfs`])
//! and existence of a path of valid transitions from an initial state to a
//! final one ([`Property::Pfs`]). Path queries come in two flavours: a
//! recursive-function encoding that threads the state through `define-fun-rec`,
//! and a solver-portable bounded unrolling.

mod check;
mod pfs;
mod prelude;
mod smt;
mod symbols;
mod vfs;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_model, Expr, Model, Sort, SymbolKind};

pub use check::{check_script, WellFormedError};
pub use pfs::{encode_pfs_recursive, encode_pfs_unrolled};
pub use prelude::emit_prelude;
pub use symbols::{Element, SymbolEntry, SymbolMap};
pub use vfs::encode_vfs;

pub const DEFAULT_DEPTH: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Vfs,
    Pfs,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Vfs => "vfs",
            Property::Pfs => "pfs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PfsMode {
    Recursive,
    Unrolled,
}

impl fmt::Display for PfsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfsMode::Recursive => "recursive",
            PfsMode::Unrolled => "unrolled",
        })
    }
}

/// Everything besides the model that determines a generated script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingConfig {
    pub property: Property,
    /// Only meaningful for [`Property::Pfs`].
    pub pfs_mode: Option<PfsMode>,
    /// Maximum number of transitions (PFS only). Zero asks whether an initial
    /// state is already final.
    pub depth_bound: Option<u32>,
    /// Pins instance symbols to concrete values.
    pub instance_fixing: BTreeMap<String, i64>,
    /// Extra boolean constraints over instance symbols and the first state.
    pub extra_constraints: Vec<Expr>,
    pub produce_model: bool,
}

impl EncodingConfig {
    pub fn vfs() -> Self {
        EncodingConfig {
            property: Property::Vfs,
            pfs_mode: None,
            depth_bound: None,
            instance_fixing: BTreeMap::new(),
            extra_constraints: Vec::new(),
            produce_model: true,
        }
    }

    pub fn pfs(mode: PfsMode, depth: u32) -> Self {
        EncodingConfig {
            property: Property::Pfs,
            pfs_mode: Some(mode),
            depth_bound: Some(depth),
            ..EncodingConfig::vfs()
        }
    }

    pub fn fix(mut self, symbol: impl Into<String>, value: i64) -> Self {
        self.instance_fixing.insert(symbol.into(), value);
        self
    }

    pub fn constrain(mut self, e: Expr) -> Self {
        self.extra_constraints.push(e);
        self
    }

    /// Pins each name to a value: instance symbols go to `instance_fixing`,
    /// state fields become equality constraints on the first state.
    pub fn pin_all(mut self, model: &Model, pins: &BTreeMap<String, i64>) -> Result<Self, EncodeError> {
        for (name, value) in pins {
            match model.symbol_kind(name) {
                Some(SymbolKind::Instance) => {
                    self.instance_fixing.insert(name.clone(), *value);
                }
                Some(SymbolKind::State) => {
                    self.extra_constraints.push(Expr::eq(Expr::sym(name.clone()), Expr::Int(*value)));
                }
                _ => {
                    return Err(EncodeError::Config(format!(
                        "`{name}` is neither an instance symbol nor a state field of `{}`",
                        model.name
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn describe(&self) -> String {
        match (self.property, self.pfs_mode, self.depth_bound) {
            (Property::Vfs, _, _) => "vfs".to_string(),
            (Property::Pfs, mode, depth) => format!(
                "pfs ({}, depth {})",
                mode.map_or("?".to_string(), |m| m.to_string()),
                depth.map_or("?".to_string(), |d| d.to_string())
            ),
        }
    }
}

/// A generated SMT-LIB document and the map used to decode its models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtScript {
    pub text: String,
    pub symbol_map: SymbolMap,
    pub config: EncodingConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("configuration error: {0}")]
    Config(String),
}

/// Dispatches on the configured property and mode.
pub fn encode(model: &Model, config: &EncodingConfig) -> Result<SmtScript, EncodeError> {
    match (config.property, config.pfs_mode) {
        (Property::Vfs, _) => encode_vfs(model, config),
        (Property::Pfs, Some(PfsMode::Recursive)) => encode_pfs_recursive(model, config),
        (Property::Pfs, Some(PfsMode::Unrolled) | None) => encode_pfs_unrolled(model, config),
    }
}

pub(crate) fn check_inputs(model: &Model, config: &EncodingConfig) -> Result<(), EncodeError> {
    let diags = validate_model(model);
    if let Some(first) = diags.first() {
        return Err(EncodeError::InvalidModel(format!("{first} ({} diagnostics)", diags.len())));
    }
    for name in config.instance_fixing.keys() {
        if model.symbol_kind(name) != Some(SymbolKind::Instance) {
            return Err(EncodeError::Config(format!("`{name}` is not an instance symbol")));
        }
    }
    for e in &config.extra_constraints {
        for name in e.symbols() {
            match model.symbol_kind(name) {
                Some(SymbolKind::Instance | SymbolKind::State) => {}
                Some(SymbolKind::Param) => {
                    return Err(EncodeError::Config(format!("constraint mentions parameter `{name}`")))
                }
                None => return Err(EncodeError::Config(format!("constraint mentions unknown symbol `{name}`"))),
            }
        }
        if crate::model::sort_of(e) != Some(Sort::Bool) {
            return Err(EncodeError::Config(format!(
                "constraint `{}` is not a boolean expression",
                crate::dsl::serialize_expr(e)
            )));
        }
    }
    Ok(())
}

/// Logic name for a script whose expressions are `exprs`.
pub(crate) fn logic_for<'a>(model: &'a Model, extra: impl IntoIterator<Item = &'a Expr>) -> &'static str {
    let mut all = [&model.valid, &model.initial, &model.final_pred, &model.guard]
        .into_iter()
        .chain(model.update.values())
        .chain(&model.constraints)
        .chain(extra);
    if all.any(Expr::is_nonlinear) {
        "QF_NIA"
    } else {
        "QF_LIA"
    }
}
