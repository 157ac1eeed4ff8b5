//! Decoding of solver models back into model elements.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::sexp::{read_items, Node};
use super::{Outcome, Verdict};
use crate::encoder::{Element, SmtScript, SymbolEntry};
use crate::model::{Binding, ConcreteState, Model};
use crate::oracle::Plan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("verdict carries no model")]
    NoModel,
    #[error("cannot read solver model: {0}")]
    Malformed(String),
    #[error("value of `{name}` does not fit in 64 bits: {text}")]
    Range { name: String, text: String },
    #[error("model does not determine: {}", .0.join(", "))]
    MissingSymbols(Vec<String>),
}

/// Concrete values for the elements of a sat answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witness {
    pub assignments: BTreeMap<Element, i64>,
    /// Transitions taken, for path queries.
    pub step_count: Option<i64>,
}

impl Witness {
    pub fn get(&self, e: &Element) -> Option<i64> {
        self.assignments.get(e).copied()
    }

    pub fn instance(&self, model: &Model) -> Binding {
        model
            .instance_symbols
            .iter()
            .filter_map(|s| Some((s.clone(), self.get(&Element::Instance(s.clone()))?)))
            .collect()
    }

    pub fn state_at(&self, model: &Model, step: u32) -> Option<ConcreteState> {
        let values = model
            .state_fields
            .iter()
            .map(|f| self.get(&Element::StateField { step, field: f.clone() }))
            .collect::<Option<Vec<_>>>()?;
        Some(ConcreteState::new(values))
    }

    pub fn params_at(&self, model: &Model, step: u32) -> Option<Binding> {
        model
            .param_fields
            .iter()
            .map(|p| Some((p.clone(), self.get(&Element::Param { step, param: p.clone() })?)))
            .collect()
    }

    /// Initial state and the parameters of the first `step_count` steps.
    pub fn plan(&self, model: &Model) -> Option<Plan> {
        let n = u32::try_from(self.step_count?).ok()?;
        let initial = self.state_at(model, 0)?;
        let steps = (0..n).map(|k| self.params_at(model, k)).collect::<Option<Vec<_>>>()?;
        Some(Plan { instance: self.instance(model), initial, steps })
    }
}

#[derive(Debug, Clone)]
enum Val {
    Int(i64),
    Bool(bool),
    Array(Array),
}

#[derive(Debug, Clone)]
struct Array {
    overrides: BTreeMap<i64, i64>,
    base: Base,
}

#[derive(Debug, Clone)]
enum Base {
    Const(i64),
    /// `(lambda ((x Int)) body)` or a unary function definition.
    Func { param: String, body: Node },
}

struct Fun {
    params: Vec<String>,
    body: Node,
}

const MAX_DEPTH: usize = 400;

struct Evaluator<'a> {
    defs: &'a HashMap<String, Fun>,
}

type Env = Vec<(String, Val)>;

impl Evaluator<'_> {
    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, WitnessError> {
        Err(WitnessError::Malformed(msg.into()))
    }

    fn int(&self, n: &Node, env: &mut Env, depth: usize) -> Result<i64, WitnessError> {
        match self.eval(n, env, depth)? {
            Val::Int(v) => Ok(v),
            _ => self.fail(format!("expected an integer: {n}")),
        }
    }

    fn boolean(&self, n: &Node, env: &mut Env, depth: usize) -> Result<bool, WitnessError> {
        match self.eval(n, env, depth)? {
            Val::Bool(v) => Ok(v),
            _ => self.fail(format!("expected a boolean: {n}")),
        }
    }

    fn select(&self, a: &Array, i: i64, depth: usize) -> Result<i64, WitnessError> {
        if let Some(v) = a.overrides.get(&i) {
            return Ok(*v);
        }
        match &a.base {
            Base::Const(v) => Ok(*v),
            Base::Func { param, body } => {
                let mut env = vec![(param.clone(), Val::Int(i))];
                self.int(body, &mut env, depth + 1)
            }
        }
    }

    fn array_of_fun(&self, name: &str) -> Result<Array, WitnessError> {
        match self.defs.get(name) {
            Some(Fun { params, body }) if params.len() == 1 => {
                Ok(Array { overrides: BTreeMap::new(), base: Base::Func { param: params[0].clone(), body: body.clone() } })
            }
            _ => self.fail(format!("`{name}` is not a unary function")),
        }
    }

    fn eval(&self, n: &Node, env: &mut Env, depth: usize) -> Result<Val, WitnessError> {
        if depth > MAX_DEPTH {
            return self.fail("value nested too deeply");
        }
        let d = depth + 1;
        match n {
            Node::Str(_) => self.fail("unexpected string literal"),
            Node::Atom(a) => {
                if let Some((_, v)) = env.iter().rev().find(|(k, _)| k == a) {
                    return Ok(v.clone());
                }
                match a.as_str() {
                    "true" => return Ok(Val::Bool(true)),
                    "false" => return Ok(Val::Bool(false)),
                    _ => {}
                }
                if a.bytes().all(|b| b.is_ascii_digit()) && !a.is_empty() {
                    return a.parse().map(Val::Int).map_err(|_| WitnessError::Range { name: String::new(), text: a.clone() });
                }
                match self.defs.get(a.as_str()) {
                    Some(f) if f.params.is_empty() => self.eval(&f.body, &mut Vec::new(), d),
                    _ => self.fail(format!("unknown symbol `{a}`")),
                }
            }
            Node::List(xs) => {
                let Some((head, args)) = xs.split_first() else { return self.fail("empty application") };
                // ((as const (Array Int Int)) v)
                if head.head() == Some("as") && head.list().and_then(|h| h.get(1)).and_then(Node::atom) == Some("const") {
                    let [v] = args else { return self.fail("const array takes one value") };
                    return Ok(Val::Array(Array { overrides: BTreeMap::new(), base: Base::Const(self.int(v, env, d)?) }));
                }
                let Some(op) = head.atom() else { return self.fail(format!("unsupported application {n}")) };
                match (op, args) {
                    ("_", [Node::Atom(k), Node::Atom(f)]) if k == "as-array" => Ok(Val::Array(self.array_of_fun(f)?)),
                    ("let", [Node::List(binds), body]) => {
                        let mut vals = Vec::new();
                        for b in binds {
                            match b.list() {
                                Some([Node::Atom(name), e]) => vals.push((name.clone(), self.eval(e, env, d)?)),
                                _ => return self.fail("malformed let binding"),
                            }
                        }
                        let mark = env.len();
                        env.extend(vals);
                        let r = self.eval(body, env, d);
                        env.truncate(mark);
                        r
                    }
                    ("lambda", [Node::List(params), body]) => match params.as_slice() {
                        [p] => match p.list() {
                            Some([Node::Atom(name), _]) => {
                                Ok(Val::Array(Array { overrides: BTreeMap::new(), base: Base::Func { param: name.clone(), body: body.clone() } }))
                            }
                            _ => self.fail("malformed lambda parameter"),
                        },
                        _ => self.fail("only unary lambdas are supported"),
                    },
                    ("store", [a, i, v]) => {
                        let Val::Array(mut arr) = self.eval(a, env, d)? else { return self.fail("store on a non-array") };
                        let i = self.int(i, env, d)?;
                        let v = self.int(v, env, d)?;
                        arr.overrides.insert(i, v);
                        Ok(Val::Array(arr))
                    }
                    ("select", [a, i]) => {
                        let Val::Array(arr) = self.eval(a, env, d)? else { return self.fail("select on a non-array") };
                        let i = self.int(i, env, d)?;
                        Ok(Val::Int(self.select(&arr, i, d)?))
                    }
                    ("-", [Node::Atom(lit)]) if lit.bytes().all(|b| b.is_ascii_digit()) => {
                        format!("-{lit}").parse().map(Val::Int).map_err(|_| WitnessError::Range { name: String::new(), text: format!("(- {lit})") })
                    }
                    ("-", [x]) => Ok(Val::Int(self.int(x, env, d)?.checked_neg().ok_or_else(|| overflow(n))?)),
                    ("+" | "-" | "*", [first, rest @ ..]) if !rest.is_empty() => {
                        let mut acc = self.int(first, env, d)?;
                        for r in rest {
                            let v = self.int(r, env, d)?;
                            acc = match op {
                                "+" => acc.checked_add(v),
                                "-" => acc.checked_sub(v),
                                _ => acc.checked_mul(v),
                            }
                            .ok_or_else(|| overflow(n))?;
                        }
                        Ok(Val::Int(acc))
                    }
                    ("<" | "<=" | ">" | ">=", [a, b]) => {
                        let (a, b) = (self.int(a, env, d)?, self.int(b, env, d)?);
                        Ok(Val::Bool(match op {
                            "<" => a < b,
                            "<=" => a <= b,
                            ">" => a > b,
                            _ => a >= b,
                        }))
                    }
                    ("=", [a, b]) => Ok(Val::Bool(match (self.eval(a, env, d)?, self.eval(b, env, d)?) {
                        (Val::Int(x), Val::Int(y)) => x == y,
                        (Val::Bool(x), Val::Bool(y)) => x == y,
                        _ => return self.fail(format!("unsupported equality {n}")),
                    })),
                    ("not", [a]) => Ok(Val::Bool(!self.boolean(a, env, d)?)),
                    ("and", xs) => {
                        for x in xs {
                            if !self.boolean(x, env, d)? {
                                return Ok(Val::Bool(false));
                            }
                        }
                        Ok(Val::Bool(true))
                    }
                    ("or", xs) => {
                        for x in xs {
                            if self.boolean(x, env, d)? {
                                return Ok(Val::Bool(true));
                            }
                        }
                        Ok(Val::Bool(false))
                    }
                    ("ite", [c, t, e]) => {
                        if self.boolean(c, env, d)? {
                            self.eval(t, env, d)
                        } else {
                            self.eval(e, env, d)
                        }
                    }
                    (f, args) => match self.defs.get(f) {
                        Some(fun) if fun.params.len() == args.len() => {
                            let mut vals = Vec::new();
                            for (p, a) in fun.params.iter().zip(args) {
                                vals.push((p.clone(), self.eval(a, env, d)?));
                            }
                            self.eval(&fun.body, &mut vals, d)
                        }
                        _ => self.fail(format!("unsupported application `{f}`")),
                    },
                }
            }
        }
    }
}

fn overflow(n: &Node) -> WitnessError {
    WitnessError::Range { name: String::new(), text: n.to_string() }
}

/// Elements a complete witness must determine.
fn required(e: &Element, steps: Option<i64>, path: bool) -> bool {
    match (e, path) {
        (Element::Instance(_) | Element::StepCount, _) => true,
        (Element::StateField { step, .. }, false) => *step == 0,
        (Element::StateField { step, .. }, true) => steps.is_some_and(|n| i64::from(*step) <= n),
        (Element::Param { step, .. }, _) => steps.is_some_and(|n| i64::from(*step) < n),
    }
}

/// Decodes the model of a sat verdict through the script's symbol map.
/// Elements the solver left unassigned are reported unless irrelevant to
/// the answer (states and parameters beyond the step count).
pub fn parse_witness(verdict: &Verdict, script: &SmtScript) -> Result<Witness, WitnessError> {
    if verdict.outcome != Outcome::Sat {
        return Err(WitnessError::NoModel);
    }
    let raw = verdict.raw_model.as_deref().ok_or(WitnessError::NoModel)?;
    let items = read_items(raw).map_err(|e| WitnessError::Malformed(e.message))?;
    let [item] = items.as_slice() else { return Err(WitnessError::Malformed("expected a single model form".into())) };
    let Some(forms) = item.node.list() else { return Err(WitnessError::Malformed("model is not a list".into())) };

    let mut defs = HashMap::new();
    for form in forms {
        let Some(parts) = form.list() else { continue };
        if let [Node::Atom(kw), Node::Atom(name), Node::List(params), _sort, body] = parts {
            if kw == "define-fun" || kw == "define-fun-rec" {
                let params = params
                    .iter()
                    .map(|p| match p.list() {
                        Some([Node::Atom(n), _]) => Ok(n.clone()),
                        _ => Err(WitnessError::Malformed(format!("bad parameter in `{name}`"))),
                    })
                    .collect::<Result<_, _>>()?;
                defs.insert(name.clone(), Fun { params, body: body.clone() });
            }
        }
    }
    let ev = Evaluator { defs: &defs };
    let named = |name: &str, e: WitnessError| match e {
        WitnessError::Range { text, .. } => WitnessError::Range { name: name.to_string(), text },
        other => other,
    };

    let mut witness = Witness::default();
    for (name, entry) in script.symbol_map.iter() {
        let Some(fun) = defs.get(name).filter(|f| f.params.is_empty()) else { continue };
        match entry {
            SymbolEntry::Scalar(e) => {
                let v = ev.int(&fun.body, &mut Vec::new(), 0).map_err(|err| named(name, err))?;
                witness.assignments.insert(e.clone(), v);
            }
            SymbolEntry::Array(cells) => {
                let Val::Array(arr) = ev.eval(&fun.body, &mut Vec::new(), 0).map_err(|err| named(name, err))? else {
                    return Err(WitnessError::Malformed(format!("`{name}` is not an array")));
                };
                for (i, e) in cells {
                    let v = ev.select(&arr, *i, 0).map_err(|err| named(name, err))?;
                    witness.assignments.insert(e.clone(), v);
                }
            }
        }
    }
    witness.step_count = witness.get(&Element::StepCount);

    let path = script.config.property == crate::encoder::Property::Pfs;
    let missing: Vec<String> = script
        .symbol_map
        .elements()
        .into_iter()
        .filter(|(_, _, e)| required(e, witness.step_count, path) && !witness.assignments.contains_key(e))
        .map(|(name, idx, e)| match idx {
            Some(i) => format!("{e} ({name}[{i}])"),
            None => format!("{e} ({name})"),
        })
        .collect();
    if !missing.is_empty() {
        return Err(WitnessError::MissingSymbols(missing));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;
    use crate::encoder::{encode, EncodingConfig, PfsMode};
    use std::time::Duration;

    const MODEL: &str = "(model t) (instance (lim Int)) (state (x Int) (y Int)) (params (a Int))
        (valid (>= x 0)) (initial (= x 0)) (final (= x lim))
        (guard (> a 0)) (update (x (+ x a)) (y y))";

    fn verdict(raw: &str) -> Verdict {
        Verdict {
            outcome: Outcome::Sat,
            raw_model: Some(raw.into()),
            stats: BTreeMap::new(),
            wall_time: Duration::ZERO,
            solver_identity: "test".into(),
            reason: None,
            script_path: None,
        }
    }

    #[test]
    fn recursive_arrays_with_let_and_helpers() {
        let model = parse_model(MODEL).unwrap();
        let script = encode(&model, &EncodingConfig::pfs(PfsMode::Recursive, 3)).unwrap();
        let raw = "(
  (define-fun lim () Int 5)
  (define-fun n () Int 2)
  (define-fun s0 () (Array Int Int)
    (let ((a!1 (store ((as const (Array Int Int)) 7) 0 0)))
      (store a!1 1 (- 4))))
  (define-fun k!3 ((x!0 Int)) Int (ite (= x!0 0) 2 (ite (= x!0 1) 3 9)))
  (define-fun p () (Array Int Int) (_ as-array k!3))
)";
        let w = parse_witness(&verdict(raw), &script).unwrap();
        assert_eq!(w.step_count, Some(2));
        assert_eq!(w.state_at(&model, 0).unwrap().values(), &[0, -4]);
        let plan = w.plan(&model).unwrap();
        assert_eq!(plan.steps.len(), 2);
        assert_eq!(plan.steps[0].get("a"), Some(2));
        assert_eq!(plan.steps[1].get("a"), Some(3));
        assert_eq!(plan.instance.get("lim"), Some(5));
    }

    #[test]
    fn lambda_arrays() {
        let model = parse_model(MODEL).unwrap();
        let script = encode(&model, &EncodingConfig::pfs(PfsMode::Recursive, 3)).unwrap();
        let raw = "((define-fun lim () Int 1) (define-fun n () Int 1)
            (define-fun s0 () (Array Int Int) (lambda ((i Int)) (* i 10)))
            (define-fun p () (Array Int Int) (store (lambda ((i Int)) 0) 0 1)))";
        let w = parse_witness(&verdict(raw), &script).unwrap();
        assert_eq!(w.state_at(&model, 0).unwrap().values(), &[0, 10]);
        assert_eq!(w.params_at(&model, 0).unwrap().get("a"), Some(1));
    }

    #[test]
    fn unrolled_ignores_states_past_n_but_requires_earlier_ones() {
        let model = parse_model(MODEL).unwrap();
        let script = encode(&model, &EncodingConfig::pfs(PfsMode::Unrolled, 2)).unwrap();
        let ok = "((define-fun lim () Int 0) (define-fun n () Int 0)
            (define-fun s0_x () Int 0) (define-fun s0_y () Int 3))";
        let w = parse_witness(&verdict(ok), &script).unwrap();
        assert_eq!(w.plan(&model).unwrap().steps.len(), 0);

        let short = "((define-fun lim () Int 0) (define-fun n () Int 1)
            (define-fun s0_x () Int 0) (define-fun s0_y () Int 3))";
        match parse_witness(&verdict(short), &script) {
            Err(WitnessError::MissingSymbols(m)) => {
                assert!(m.iter().any(|s| s.contains("s1_x")));
                assert!(m.iter().any(|s| s.contains("p0_a")));
                assert!(!m.iter().any(|s| s.contains("s2_x")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_values() {
        let model = parse_model(MODEL).unwrap();
        let script = encode(&model, &EncodingConfig::vfs()).unwrap();
        let raw = "((define-fun lim () Int 99999999999999999999) (define-fun s0_x () Int 0) (define-fun s0_y () Int 0))";
        match parse_witness(&verdict(raw), &script) {
            Err(WitnessError::Range { name, .. }) => assert_eq!(name, "lim"),
            other => panic!("{other:?}"),
        }
        let raw = "((define-fun lim () Int (- 9223372036854775808)) (define-fun s0_x () Int 0) (define-fun s0_y () Int 0))";
        let w = parse_witness(&verdict(raw), &script).unwrap();
        assert_eq!(w.get(&Element::Instance("lim".into())), Some(i64::MIN));
    }

    #[test]
    fn unsat_has_no_witness() {
        let model = parse_model(MODEL).unwrap();
        let script = encode(&model, &EncodingConfig::vfs()).unwrap();
        let mut v = verdict("()");
        v.outcome = Outcome::Unsat;
        assert_eq!(parse_witness(&v, &script), Err(WitnessError::NoModel));
    }
}
