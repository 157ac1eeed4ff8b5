use std::collections::BTreeSet;
use std::fmt;

use super::{Expr, Model, Sort, SymbolKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticKind {
    UnknownSymbol,
    SortError,
    MissingUpdate,
    DuplicateName,
    /// Name collides with SMT-LIB syntax or a name the encoder generates.
    ReservedName,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::UnknownSymbol => "unknown-symbol",
            DiagnosticKind::SortError => "sort-error",
            DiagnosticKind::MissingUpdate => "missing-update",
            DiagnosticKind::DuplicateName => "duplicate-name",
            DiagnosticKind::ReservedName => "reserved-name",
        })
    }
}

/// The model element a diagnostic is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Name,
    Declaration(String),
    Valid,
    Initial,
    Final,
    Guard,
    Update(String),
    Constraint(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Name => f.write_str("model name"),
            Location::Declaration(n) => write!(f, "declaration of `{n}`"),
            Location::Valid => f.write_str("valid predicate"),
            Location::Initial => f.write_str("initial predicate"),
            Location::Final => f.write_str("final predicate"),
            Location::Guard => f.write_str("guard"),
            Location::Update(n) => write!(f, "update of `{n}`"),
            Location::Constraint(i) => write!(f, "constraint #{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}: {}", self.kind, self.location, self.message)
    }
}

/// SMT-LIB reserved words, core/int theory symbols, and names the encoder emits.
const RESERVED: &[&str] = &[
    "_", "!", "as", "let", "exists", "forall", "match", "par", "NUMERAL", "DECIMAL", "STRING",
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite", "div", "mod", "abs",
    "Int", "Bool", "Real", "Array", "select", "store", "const", "lambda", "assert", "check-sat",
    "declare-const", "declare-fun", "define-fun", "define-fun-rec", "define-sort", "get-model",
    "set-logic", "set-option", "n", "p", "s0", "State", "Params", "valid", "initial", "final",
    "guard", "transition", "tran", "path_ok", "step_ok", "valid_st", "initial_st", "final_st", "s",
    "state", "params", "last", "size", "k",
];

/// True when `name` cannot be used for a model symbol because generated
/// scripts would clash with it.
pub fn is_reserved(name: &str) -> bool {
    if RESERVED.contains(&name) || name.starts_with("next_") {
        return true;
    }
    // step-indexed constants: s<k>_<field>, p<k>_<param>
    let bytes = name.as_bytes();
    if matches!(bytes.first(), Some(b's' | b'p')) {
        let digits = bytes[1..].iter().take_while(|b| b.is_ascii_digit()).count();
        if digits > 0 && bytes.get(1 + digits) == Some(&b'_') {
            return true;
        }
    }
    false
}

#[derive(Clone, Copy)]
struct Scope {
    state: bool,
    params: bool,
}

const STATE_ONLY: Scope = Scope { state: true, params: false };
const STATE_AND_PARAMS: Scope = Scope { state: true, params: true };

/// Checks every structural invariant of a model. An empty result means the
/// model can be evaluated and encoded.
pub fn validate_model(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    let decls = model
        .state_fields
        .iter()
        .chain(&model.param_fields)
        .chain(&model.instance_symbols);
    for name in decls {
        if !seen.insert(name.as_str()) {
            out.push(Diagnostic {
                kind: DiagnosticKind::DuplicateName,
                location: Location::Declaration(name.clone()),
                message: format!("`{name}` is declared more than once"),
            });
        }
        if is_reserved(name) {
            out.push(Diagnostic {
                kind: DiagnosticKind::ReservedName,
                location: Location::Declaration(name.clone()),
                message: format!("`{name}` is reserved and cannot name a model symbol"),
            });
        }
    }

    let mut check = |expr: &Expr, expected: Sort, scope: Scope, location: Location| {
        check_expr(model, expr, expected, scope, &location, &mut out);
    };
    check(&model.valid, Sort::Bool, STATE_ONLY, Location::Valid);
    check(&model.initial, Sort::Bool, STATE_ONLY, Location::Initial);
    check(&model.final_pred, Sort::Bool, STATE_ONLY, Location::Final);
    check(&model.guard, Sort::Bool, STATE_AND_PARAMS, Location::Guard);
    for (i, c) in model.constraints.iter().enumerate() {
        check(c, Sort::Bool, STATE_ONLY, Location::Constraint(i));
    }
    for (field, e) in &model.update {
        check(e, Sort::Int, STATE_AND_PARAMS, Location::Update(field.clone()));
    }

    for field in &model.state_fields {
        if !model.update.contains_key(field) {
            out.push(Diagnostic {
                kind: DiagnosticKind::MissingUpdate,
                location: Location::Update(field.clone()),
                message: format!("no update given for state field `{field}`"),
            });
        }
    }
    for field in model.update.keys() {
        if model.symbol_kind(field) != Some(SymbolKind::State) {
            out.push(Diagnostic {
                kind: DiagnosticKind::UnknownSymbol,
                location: Location::Update(field.clone()),
                message: format!("update target `{field}` is not a state field"),
            });
        }
    }
    out
}

fn check_expr(
    model: &Model,
    expr: &Expr,
    expected: Sort,
    scope: Scope,
    location: &Location,
    out: &mut Vec<Diagnostic>,
) {
    for name in expr.symbols() {
        let message = match model.symbol_kind(name) {
            None => format!("undeclared symbol `{name}`"),
            Some(SymbolKind::Param) if !scope.params => {
                format!("parameter `{name}` is not in scope here")
            }
            Some(SymbolKind::State) if !scope.state => format!("state field `{name}` is not in scope here"),
            Some(_) => continue,
        };
        out.push(Diagnostic { kind: DiagnosticKind::UnknownSymbol, location: location.clone(), message });
    }
    let mut errors = Vec::new();
    if let Some(found) = infer(expr, &mut errors) {
        if found != expected {
            errors.push(format!("expected {expected} expression, found {found}"));
        }
    }
    for message in errors {
        out.push(Diagnostic { kind: DiagnosticKind::SortError, location: location.clone(), message });
    }
}

/// Infers the sort of `expr`, recording every mismatch. Returns `None` when
/// the sort cannot be determined because of an inner error.
fn infer(expr: &Expr, errors: &mut Vec<String>) -> Option<Sort> {
    use Expr::*;
    let want = |e: &Expr, s: Sort, errors: &mut Vec<String>| -> bool {
        match infer(e, errors) {
            Some(found) if found != s => {
                errors.push(format!("expected {s} operand, found {found}"));
                false
            }
            Some(_) => true,
            None => false,
        }
    };
    match expr {
        Int(_) | Sym(_) => Some(Sort::Int),
        Bool(_) => Some(Sort::Bool),
        Add(a, b) | Sub(a, b) | Mul(a, b) => {
            let ok = want(a, Sort::Int, errors) & want(b, Sort::Int, errors);
            ok.then_some(Sort::Int)
        }
        Neg(a) => want(a, Sort::Int, errors).then_some(Sort::Int),
        Lt(a, b) | Le(a, b) | Gt(a, b) | Ge(a, b) => {
            let ok = want(a, Sort::Int, errors) & want(b, Sort::Int, errors);
            ok.then_some(Sort::Bool)
        }
        Eq(a, b) | Neq(a, b) => {
            let (x, y) = (infer(a, errors), infer(b, errors));
            match (x, y) {
                (Some(x), Some(y)) if x != y => {
                    errors.push(format!("cannot compare {x} with {y}"));
                    None
                }
                (Some(_), Some(_)) => Some(Sort::Bool),
                _ => None,
            }
        }
        And(xs) | Or(xs) => {
            let mut ok = true;
            for x in xs {
                ok &= want(x, Sort::Bool, errors);
            }
            ok.then_some(Sort::Bool)
        }
        Not(a) => want(a, Sort::Bool, errors).then_some(Sort::Bool),
        Implies(a, b) => {
            let ok = want(a, Sort::Bool, errors) & want(b, Sort::Bool, errors);
            ok.then_some(Sort::Bool)
        }
        Ite(c, t, e) => {
            let cond = want(c, Sort::Bool, errors);
            let (x, y) = (infer(t, errors), infer(e, errors));
            match (x, y) {
                (Some(x), Some(y)) if x != y => {
                    errors.push(format!("ite branches differ: {x} vs {y}"));
                    None
                }
                (Some(x), Some(_)) if cond => Some(x),
                _ => None,
            }
        }
    }
}

/// Sort of a well-sorted expression.
pub(crate) fn sort_of(expr: &Expr) -> Option<Sort> {
    infer(expr, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_patterns() {
        assert!(is_reserved("s0_nm1"));
        assert!(is_reserved("p12_mm"));
        assert!(is_reserved("next_bp"));
        assert!(is_reserved("and"));
        assert!(is_reserved("n"));
        assert!(!is_reserved("s_nm1"));
        assert!(!is_reserved("sx_1"));
        assert!(!is_reserved("nm1"));
        assert!(is_reserved("p"));
    }

    #[test]
    fn sort_inference() {
        let e = Expr::ite(Expr::Bool(true), Expr::Int(1), Expr::Bool(false));
        let mut errs = vec![];
        assert_eq!(infer(&e, &mut errs), None);
        assert_eq!(errs.len(), 1);
        assert_eq!(sort_of(&Expr::eq(Expr::Int(1), Expr::sym("x"))), Some(Sort::Bool));
    }
}
