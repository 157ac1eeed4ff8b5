use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{ConcreteState, Expr, Model, Sort};

/// Result of evaluating an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn sort(self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("integer overflow")]
    Overflow,
}

/// Source of integer values for symbol references.
pub trait Lookup {
    fn lookup(&self, name: &str) -> Option<i64>;
}

/// Name-keyed integer assignment (state fields, parameters or instance symbols).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(pub BTreeMap<String, i64>);

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: i64) -> Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: i64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>> FromIterator<(K, i64)> for Binding {
    fn from_iter<I: IntoIterator<Item = (K, i64)>>(iter: I) -> Self {
        Binding(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, "}}")
    }
}

impl Lookup for Binding {
    fn lookup(&self, name: &str) -> Option<i64> {
        self.get(name)
    }
}

impl<L: Lookup + ?Sized> Lookup for &L {
    fn lookup(&self, name: &str) -> Option<i64> {
        (**self).lookup(name)
    }
}

/// State, parameters and instance viewed through one lookup.
pub(crate) struct Frame<'a> {
    pub model: &'a Model,
    pub state: &'a [i64],
    pub params: &'a [i64],
    pub instance: &'a dyn Lookup,
}

impl Lookup for Frame<'_> {
    fn lookup(&self, name: &str) -> Option<i64> {
        if let Some(i) = self.model.state_index(name) {
            return self.state.get(i).copied();
        }
        if let Some(i) = self.model.param_index(name) {
            return self.params.get(i).copied();
        }
        self.instance.lookup(name)
    }
}

/// Evaluates `expr` under `env` with unbounded-integer semantics (overflow is an error).
pub fn eval_expr(expr: &Expr, env: &impl Lookup) -> Result<Value, EvalError> {
    eval(expr, env)
}

fn eval(expr: &Expr, env: &dyn Lookup) -> Result<Value, EvalError> {
    use Expr::*;
    Ok(match expr {
        Int(v) => Value::Int(*v),
        Bool(b) => Value::Bool(*b),
        Sym(s) => Value::Int(env.lookup(s).ok_or_else(|| EvalError::Unbound(s.clone()))?),
        Add(a, b) => Value::Int(int(a, env)?.checked_add(int(b, env)?).ok_or(EvalError::Overflow)?),
        Sub(a, b) => Value::Int(int(a, env)?.checked_sub(int(b, env)?).ok_or(EvalError::Overflow)?),
        Mul(a, b) => Value::Int(int(a, env)?.checked_mul(int(b, env)?).ok_or(EvalError::Overflow)?),
        Neg(a) => Value::Int(int(a, env)?.checked_neg().ok_or(EvalError::Overflow)?),
        Eq(a, b) => Value::Bool(same_sort_eq(a, b, env)?),
        Neq(a, b) => Value::Bool(!same_sort_eq(a, b, env)?),
        Lt(a, b) => Value::Bool(int(a, env)? < int(b, env)?),
        Le(a, b) => Value::Bool(int(a, env)? <= int(b, env)?),
        Gt(a, b) => Value::Bool(int(a, env)? > int(b, env)?),
        Ge(a, b) => Value::Bool(int(a, env)? >= int(b, env)?),
        And(xs) => {
            let mut acc = true;
            for x in xs {
                // every conjunct is evaluated so sort errors surface regardless of order
                acc &= boolean(x, env)?;
            }
            Value::Bool(acc)
        }
        Or(xs) => {
            let mut acc = false;
            for x in xs {
                acc |= boolean(x, env)?;
            }
            Value::Bool(acc)
        }
        Not(a) => Value::Bool(!boolean(a, env)?),
        Implies(a, b) => {
            let lhs = boolean(a, env)?;
            let rhs = boolean(b, env)?;
            Value::Bool(!lhs || rhs)
        }
        Ite(c, t, e) => {
            let cond = boolean(c, env)?;
            let then = eval(t, env)?;
            let other = eval(e, env)?;
            if then.sort() != other.sort() {
                return Err(EvalError::SortMismatch { expected: then.sort(), found: other.sort() });
            }
            if cond {
                then
            } else {
                other
            }
        }
    })
}

fn int(e: &Expr, env: &dyn Lookup) -> Result<i64, EvalError> {
    match eval(e, env)? {
        Value::Int(v) => Ok(v),
        Value::Bool(_) => Err(EvalError::SortMismatch { expected: Sort::Int, found: Sort::Bool }),
    }
}

fn boolean(e: &Expr, env: &dyn Lookup) -> Result<bool, EvalError> {
    match eval(e, env)? {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(EvalError::SortMismatch { expected: Sort::Bool, found: Sort::Int }),
    }
}

fn same_sort_eq(a: &Expr, b: &Expr, env: &dyn Lookup) -> Result<bool, EvalError> {
    let (x, y) = (eval(a, env)?, eval(b, env)?);
    if x.sort() != y.sort() {
        return Err(EvalError::SortMismatch { expected: x.sort(), found: y.sort() });
    }
    Ok(x == y)
}

/// Outcome of firing the model's transition once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Applied(ConcreteState),
    Inapplicable,
}

/// Fires the transition: if the guard holds, every update expression is
/// evaluated against the pre-state. Validity of the result is not checked.
pub fn apply_transition(
    model: &Model,
    state: &ConcreteState,
    params: &Binding,
    instance: &Binding,
) -> Result<Step, EvalError> {
    let param_values = model
        .param_fields
        .iter()
        .map(|p| params.get(p).ok_or_else(|| EvalError::Unbound(p.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    apply_values(model, state.values(), &param_values, instance)
}

pub(crate) fn apply_values(
    model: &Model,
    state: &[i64],
    params: &[i64],
    instance: &dyn Lookup,
) -> Result<Step, EvalError> {
    let frame = Frame { model, state, params, instance };
    if !boolean(&model.guard, &frame)? {
        return Ok(Step::Inapplicable);
    }
    let mut next = Vec::with_capacity(model.state_fields.len());
    for field in &model.state_fields {
        let e = model.update.get(field).ok_or_else(|| EvalError::Unbound(field.clone()))?;
        next.push(int(e, &frame)?);
    }
    Ok(Step::Applied(ConcreteState(next)))
}

/// Evaluates a state predicate (`valid`, `initial`, `final`, constraints).
pub(crate) fn state_holds(
    model: &Model,
    pred: &Expr,
    state: &[i64],
    instance: &dyn Lookup,
) -> Result<bool, EvalError> {
    boolean(pred, &Frame { model, state, params: &[], instance })
}
