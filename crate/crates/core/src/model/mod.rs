//! Transition-system models and their concrete semantics.
//!
//! A [`Model`] describes a planning problem as a set of integer state fields,
//! per-step transition parameters and free instance symbols, together with
//! boolean predicates for validity, initiality and finality, one guarded
//! transition with a total update, and global instance constraints.

mod eval;
mod expr;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use eval::{apply_transition, eval_expr, Binding, EvalError, Lookup, Step, Value};
pub use expr::{Expr, Sort};
pub(crate) use eval::{apply_values, state_holds};
pub(crate) use validate::sort_of;
pub use validate::{is_reserved, validate_model, Diagnostic, DiagnosticKind, Location};

/// A complete transition-system description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub instance_symbols: Vec<String>,
    pub state_fields: Vec<String>,
    pub param_fields: Vec<String>,
    pub valid: Expr,
    pub initial: Expr,
    pub final_pred: Expr,
    pub guard: Expr,
    /// Next-state expression for every state field, evaluated against the pre-state.
    pub update: BTreeMap<String, Expr>,
    pub constraints: Vec<Expr>,
}

/// What kind of symbol a name refers to within a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Instance,
    State,
    Param,
}

impl Model {
    pub fn symbol_kind(&self, name: &str) -> Option<SymbolKind> {
        if self.state_fields.iter().any(|f| f == name) {
            Some(SymbolKind::State)
        } else if self.param_fields.iter().any(|f| f == name) {
            Some(SymbolKind::Param)
        } else if self.instance_symbols.iter().any(|f| f == name) {
            Some(SymbolKind::Instance)
        } else {
            None
        }
    }

    pub fn state_index(&self, field: &str) -> Option<usize> {
        self.state_fields.iter().position(|f| f == field)
    }

    pub fn param_index(&self, field: &str) -> Option<usize> {
        self.param_fields.iter().position(|f| f == field)
    }
}

/// Concrete values for every state field, in the model's field order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcreteState(pub Vec<i64>);

impl ConcreteState {
    pub fn new(values: Vec<i64>) -> Self {
        ConcreteState(values)
    }

    /// Builds a state from a name-keyed map; fails with the first missing field.
    pub fn from_map(model: &Model, map: &BTreeMap<String, i64>) -> Result<Self, String> {
        model
            .state_fields
            .iter()
            .map(|f| map.get(f).copied().ok_or_else(|| f.clone()))
            .collect::<Result<Vec<_>, _>>()
            .map(ConcreteState)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, model: &Model, field: &str) -> Option<i64> {
        model.state_index(field).and_then(|i| self.0.get(i).copied())
    }

    pub fn to_map(&self, model: &Model) -> BTreeMap<String, i64> {
        model
            .state_fields
            .iter()
            .cloned()
            .zip(self.0.iter().copied())
            .collect()
    }
}

impl fmt::Display for ConcreteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ">")
    }
}
