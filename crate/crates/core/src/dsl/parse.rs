use std::collections::BTreeMap;

use super::sexp::{read_all, Atom, Sexp, SexpKind};
use super::{ParseError, SourceSpan};
use crate::model::{validate_model, Expr, Location, Model};

/// Upper bound on expression tree depth after folding n-ary operators.
const MAX_EXPR_DEPTH: usize = 512;

const FORMS: &[&str] = &[
    "model", "instance", "state", "params", "valid", "initial", "final", "guard", "update", "constrain",
];

const OPERATORS: &[&str] = &[
    "+", "-", "*", "=", "distinct", "<", "<=", ">", ">=", "and", "or", "not", "=>", "ite",
];

/// Parses raw bytes, rejecting invalid UTF-8 with a positioned error.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<Model, Vec<ParseError>> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse_model(s),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(vec![ParseError::new(SourceSpan::new(line, column, 1), "invalid UTF-8")])
        }
    }
}

/// Parses a `.tsm` model. On success the model has no validation diagnostics.
pub fn parse_model(source: &str) -> Result<Model, Vec<ParseError>> {
    let forms = read_all(source)?;
    if forms.is_empty() {
        return Err(vec![ParseError::new(SourceSpan::new(1, 1, 1), "empty model source")
            .expecting(&["`(model NAME)`"])]);
    }
    let mut p = Parser::default();
    for form in &forms {
        p.form(form);
    }
    p.finish()
}

/// Parses one expression, e.g. a command-line constraint. Symbols are not
/// resolved; scope and sort checks are left to the consumer.
pub fn parse_expr(source: &str) -> Result<Expr, Vec<ParseError>> {
    let forms = read_all(source)?;
    match forms.as_slice() {
        [one] => {
            let mut p = Parser::default();
            match p.expr(one) {
                Some(e) if p.errors.is_empty() => Ok(e),
                _ => Err(p.errors),
            }
        }
        [] => Err(vec![ParseError::new(SourceSpan::new(1, 1, 1), "empty expression")]),
        [_, extra, ..] => Err(vec![ParseError::new(extra.span, "expected a single expression")]),
    }
}

#[derive(Default)]
struct Parser {
    errors: Vec<ParseError>,
    /// Span of each top-level form seen, keyed by keyword.
    seen: BTreeMap<&'static str, SourceSpan>,
    name: Option<String>,
    instance: Vec<(String, SourceSpan)>,
    state: Vec<(String, SourceSpan)>,
    params: Vec<(String, SourceSpan)>,
    valid: Option<Expr>,
    initial: Option<Expr>,
    final_pred: Option<Expr>,
    guard: Option<Expr>,
    update: BTreeMap<String, (Expr, SourceSpan)>,
    constraints: Vec<(Expr, SourceSpan)>,
    /// Unknown top-level keywords suppress "missing form" noise.
    unknown_form: bool,
}

impl Parser {
    fn error(&mut self, span: SourceSpan, msg: impl Into<String>) {
        self.errors.push(ParseError::new(span, msg));
    }

    fn form(&mut self, form: &Sexp) {
        let Some(items) = form.as_list() else {
            self.errors.push(
                ParseError::new(form.span, "expected a top-level form").expecting(&["`(`"]),
            );
            return;
        };
        let Some((head, args)) = items.split_first() else {
            self.error(form.span, "empty top-level form");
            return;
        };
        let Some(keyword) = head.as_symbol() else {
            self.errors.push(ParseError::new(head.span, "expected a form keyword").expecting(FORMS));
            return;
        };
        let Some(&keyword) = FORMS.iter().find(|k| **k == keyword) else {
            self.unknown_form = true;
            self.errors.push(
                ParseError::new(head.span, format!("unknown form `{keyword}`")).expecting(FORMS),
            );
            return;
        };
        if keyword != "constrain" {
            if let Some(prev) = self.seen.get(keyword) {
                let msg = format!("duplicate `({keyword} ...)` form; first given at {prev}");
                self.error(head.span, msg);
                return;
            }
            self.seen.insert(keyword, form.span);
        }
        match keyword {
            "model" => match args {
                [name] => {
                    if let Some(n) = self.identifier(name) {
                        self.name = Some(n);
                    }
                }
                _ => self.error(form.span, "expected `(model NAME)`"),
            },
            "instance" => self.instance = self.declarations(args),
            "state" => self.state = self.declarations(args),
            "params" => self.params = self.declarations(args),
            "valid" => self.valid = self.single_expr(keyword, form, args),
            "initial" => self.initial = self.single_expr(keyword, form, args),
            "final" => self.final_pred = self.single_expr(keyword, form, args),
            "guard" => self.guard = self.single_expr(keyword, form, args),
            "constrain" => {
                if let Some(e) = self.single_expr(keyword, form, args) {
                    self.constraints.push((e, form.span));
                }
            }
            "update" => {
                for entry in args {
                    match entry.as_list() {
                        Some([target, value]) => {
                            let (Some(field), Some(e)) = (self.identifier(target), self.expr(value)) else {
                                continue;
                            };
                            match self.update.entry(field) {
                                std::collections::btree_map::Entry::Vacant(slot) => {
                                    slot.insert((e, entry.span));
                                }
                                std::collections::btree_map::Entry::Occupied(slot) => {
                                    let msg = format!("duplicate update for `{}`", slot.key());
                                    self.error(target.span, msg);
                                }
                            }
                        }
                        _ => self.error(entry.span, "expected `(FIELD EXPR)`"),
                    }
                }
            }
            _ => unreachable!("keyword list and match arms disagree"),
        }
    }

    fn single_expr(&mut self, keyword: &str, form: &Sexp, args: &[Sexp]) -> Option<Expr> {
        match args {
            [e] => self.expr(e),
            _ => {
                self.error(form.span, format!("expected `({keyword} EXPR)`"));
                None
            }
        }
    }

    fn identifier(&mut self, s: &Sexp) -> Option<String> {
        let name = s.as_symbol()?;
        let mut chars = name.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Some(name.to_string())
        } else {
            self.error(s.span, format!("`{name}` is not a valid identifier"));
            None
        }
    }

    fn declarations(&mut self, args: &[Sexp]) -> Vec<(String, SourceSpan)> {
        let mut out = Vec::new();
        for decl in args {
            match decl.as_list() {
                Some([name, sort]) => {
                    let Some(id) = self.identifier(name) else { continue };
                    if sort.as_symbol() != Some("Int") {
                        self.errors.push(
                            ParseError::new(sort.span, "only the Int sort is supported").expecting(&["`Int`"]),
                        );
                        continue;
                    }
                    out.push((id, name.span));
                }
                _ => self.errors.push(ParseError::new(decl.span, "expected `(NAME Int)`")),
            }
        }
        out
    }

    fn expr(&mut self, s: &Sexp) -> Option<Expr> {
        match self.expr_depth(s) {
            Ok((e, _)) => Some(e),
            Err(err) => {
                self.errors.push(err);
                None
            }
        }
    }

    /// Converts an s-expression to an expression, returning its depth as well.
    fn expr_depth(&self, s: &Sexp) -> Result<(Expr, usize), ParseError> {
        let items = match &s.kind {
            SexpKind::Atom(Atom::Numeral(text)) => {
                return text.parse::<i64>().map(|v| (Expr::Int(v), 1)).map_err(|_| {
                    ParseError::new(s.span, format!("integer literal `{text}` is outside the signed 64-bit range"))
                });
            }
            SexpKind::Atom(Atom::Symbol(sym)) => {
                return Ok(match sym.as_str() {
                    "true" => (Expr::Bool(true), 1),
                    "false" => (Expr::Bool(false), 1),
                    _ => (Expr::Sym(sym.clone()), 1),
                });
            }
            SexpKind::List(items) => items,
        };
        let Some((head, args)) = items.split_first() else {
            return Err(ParseError::new(s.span, "empty expression").expecting(OPERATORS));
        };
        let Some(op) = head.as_symbol() else {
            return Err(ParseError::new(head.span, "expected an operator").expecting(OPERATORS));
        };
        let mut operands = Vec::with_capacity(args.len());
        let mut inner = 0;
        for a in args {
            let (e, d) = self.expr_depth(a)?;
            inner = inner.max(d);
            operands.push(e);
        }
        let arity = |want: &str| ParseError::new(s.span, format!("`{op}` expects {want}"));
        let n = operands.len();
        let mut it = operands.into_iter();
        let (expr, extra) = match op {
            "+" | "*" | "-" if n >= 2 => {
                let ctor = match op {
                    "+" => Expr::add,
                    "*" => Expr::mul,
                    _ => Expr::sub,
                };
                let first = it.next().unwrap();
                (it.fold(first, ctor), n - 1)
            }
            "-" if n == 1 => (Expr::neg(it.next().unwrap()), 1),
            "+" | "*" => return Err(arity("at least 2 operands")),
            "-" => return Err(arity("at least 1 operand")),
            "=" | "distinct" | "<" | "<=" | ">" | ">=" => {
                if n != 2 {
                    return Err(arity("exactly 2 operands"));
                }
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                let e = match op {
                    "=" => Expr::eq(a, b),
                    "distinct" => Expr::neq(a, b),
                    "<" => Expr::lt(a, b),
                    "<=" => Expr::le(a, b),
                    ">" => Expr::gt(a, b),
                    _ => Expr::ge(a, b),
                };
                (e, 1)
            }
            "and" | "or" => {
                if n == 0 {
                    return Err(arity("at least 1 operand"));
                }
                let xs: Vec<Expr> = it.collect();
                (if op == "and" { Expr::And(xs) } else { Expr::Or(xs) }, 1)
            }
            "not" => {
                if n != 1 {
                    return Err(arity("exactly 1 operand"));
                }
                (Expr::not(it.next().unwrap()), 1)
            }
            "=>" => {
                if n < 2 {
                    return Err(arity("at least 2 operands"));
                }
                let xs: Vec<Expr> = it.collect();
                let mut rev = xs.into_iter().rev();
                let last = rev.next().unwrap();
                (rev.fold(last, |acc, x| Expr::implies(x, acc)), n - 1)
            }
            "ite" => {
                if n != 3 {
                    return Err(arity("exactly 3 operands"));
                }
                let (c, t, e) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                (Expr::ite(c, t, e), 1)
            }
            other => {
                return Err(ParseError::new(head.span, format!("unknown operator `{other}`")).expecting(OPERATORS));
            }
        };
        let depth = inner + extra;
        if depth > MAX_EXPR_DEPTH {
            return Err(ParseError::new(s.span, format!("expression nested deeper than {MAX_EXPR_DEPTH} levels")));
        }
        Ok((expr, depth))
    }

    fn finish(mut self) -> Result<Model, Vec<ParseError>> {
        let end = SourceSpan::new(1, 1, 1);
        if self.errors.is_empty() && !self.unknown_form {
            for (keyword, present) in [
                ("model", self.name.is_some()),
                ("state", self.seen.contains_key("state")),
                ("valid", self.valid.is_some()),
                ("initial", self.initial.is_some()),
                ("final", self.final_pred.is_some()),
                ("guard", self.guard.is_some()),
                ("update", self.seen.contains_key("update")),
            ] {
                if !present {
                    self.errors.push(
                        ParseError::new(end, format!("missing `({keyword} ...)` form"))
                            .expecting(&[&format!("`({keyword} ...)`")]),
                    );
                }
            }
        }
        if !self.errors.is_empty() {
            return Err(self.errors);
        }

        let names = |v: &[(String, SourceSpan)]| v.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
        let model = Model {
            name: self.name.clone().unwrap_or_default(),
            instance_symbols: names(&self.instance),
            state_fields: names(&self.state),
            param_fields: names(&self.params),
            valid: self.valid.take().unwrap(),
            initial: self.initial.take().unwrap(),
            final_pred: self.final_pred.take().unwrap(),
            guard: self.guard.take().unwrap(),
            update: self.update.iter().map(|(k, (e, _))| (k.clone(), e.clone())).collect(),
            constraints: self.constraints.iter().map(|(e, _)| e.clone()).collect(),
        };

        let diagnostics = validate_model(&model);
        if diagnostics.is_empty() {
            return Ok(model);
        }
        let errors = diagnostics
            .into_iter()
            .map(|d| {
                let span = self.locate(&d.location);
                ParseError::new(span, d.to_string())
            })
            .collect();
        Err(errors)
    }

    fn locate(&self, loc: &Location) -> SourceSpan {
        let form = |k: &str| self.seen.get(k).copied().unwrap_or(SourceSpan::new(1, 1, 1));
        match loc {
            Location::Name => form("model"),
            Location::Declaration(name) => self
                .state
                .iter()
                .chain(&self.params)
                .chain(&self.instance)
                .filter(|(n, _)| n == name)
                .map(|(_, s)| *s)
                .next_back()
                .unwrap_or_else(|| form("state")),
            Location::Valid => form("valid"),
            Location::Initial => form("initial"),
            Location::Final => form("final"),
            Location::Guard => form("guard"),
            Location::Update(field) => self.update.get(field).map(|(_, s)| *s).unwrap_or_else(|| form("update")),
            Location::Constraint(i) => self.constraints.get(*i).map(|(_, s)| *s).unwrap_or(SourceSpan::new(1, 1, 1)),
        }
    }
}
