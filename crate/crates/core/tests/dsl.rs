use std::path::PathBuf;

use modelgate_core::dsl::{parse_model, parse_model_bytes, render_errors, serialize_expr, serialize_model};
use modelgate_core::model::{eval_expr, Binding, Expr, Model};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn corpus_sources() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tsm"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_round_trips() {
    let sources = corpus_sources();
    assert_eq!(sources.len(), 3);
    for (name, src) in sources {
        let m = parse_model(&src).unwrap_or_else(|e| panic!("{name}: {}", render_errors(&name, &e)));
        let printed = serialize_model(&m);
        assert_eq!(parse_model(&printed).unwrap(), m, "{name}");
        // printing is a fixed point after one pass
        assert_eq!(serialize_model(&parse_model(&printed).unwrap()), printed);
    }
}

#[test]
fn errors_carry_positions() {
    let errs = parse_model("(model m)\n(state (x Int))\n(valid (> x))").unwrap_err();
    assert_eq!((errs[0].span.line, errs[0].span.column), (3, 8));
    let text = render_errors("m.tsm", &errs);
    assert!(text.starts_with("m.tsm:3:8:"), "{text}");

    let errs = parse_model_bytes(b"(model m)\n\xff").unwrap_err();
    assert_eq!(errs[0].span.line, 2);
}

// ---- random expressions ----

const INT_SYMS: [&str; 3] = ["a", "b", "c"];

fn int_expr() -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![(-100i64..=100).prop_map(Expr::Int), prop::sample::select(&INT_SYMS[..]).prop_map(Expr::sym)];
    // three levels keep products of |v| <= 100 well inside i64
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            (bool_atom(inner.clone()), inner.clone(), inner).prop_map(|(c, t, e)| Expr::ite(c, t, e)),
        ]
    })
    .boxed()
}

fn bool_atom(int: impl Strategy<Value = Expr> + Clone) -> impl Strategy<Value = Expr> {
    prop_oneof![
        any::<bool>().prop_map(Expr::Bool),
        (int.clone(), int.clone()).prop_map(|(a, b)| Expr::eq(a, b)),
        (int.clone(), int.clone()).prop_map(|(a, b)| Expr::neq(a, b)),
        (int.clone(), int.clone()).prop_map(|(a, b)| Expr::lt(a, b)),
        (int.clone(), int.clone()).prop_map(|(a, b)| Expr::le(a, b)),
        (int.clone(), int.clone()).prop_map(|(a, b)| Expr::gt(a, b)),
        (int.clone(), int).prop_map(|(a, b)| Expr::ge(a, b)),
    ]
}

fn bool_expr() -> impl Strategy<Value = Expr> {
    bool_atom(int_expr()).prop_recursive(2, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::And),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::Or),
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::implies(a, b)),
            (inner.clone(), inner.clone(), inner).prop_map(|(c, t, e)| Expr::ite(c, t, e)),
        ]
    })
}

fn binding() -> impl Strategy<Value = Binding> {
    prop::array::uniform3(-100i64..=100).prop_map(|[a, b, c]| Binding::new().with("a", a).with("b", b).with("c", c))
}

/// A model whose predicates and updates are the given expressions.
fn model_with(guard: Expr, update: Expr, valid: Expr) -> Model {
    let src = format!(
        "(model gen) (instance (c Int)) (state (a Int)) (params (b Int))
         (valid {}) (initial true) (final true) (guard {}) (update (a {}))",
        serialize_expr(&valid),
        serialize_expr(&guard),
        serialize_expr(&update)
    );
    parse_model(&src).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn expressions_round_trip(g in bool_expr(), u in int_expr()) {
        // `valid` cannot see parameters; reuse the guard with b replaced by c
        let valid = parse_model(&format!(
            "(model v) (instance (c Int)) (state (a Int)) (valid {}) (initial true) (final true) (guard true) (update (a a))",
            serialize_expr(&g).replace('b', "c")
        )).unwrap().valid;
        let m = model_with(g.clone(), u.clone(), valid);
        prop_assert_eq!(&m.guard, &g);
        prop_assert_eq!(&m.update["a"], &u);
        let again = parse_model(&serialize_model(&m)).unwrap();
        prop_assert_eq!(again, m);
    }

    #[test]
    fn evaluation_is_total_on_well_sorted_trees(e in bool_expr(), i in int_expr(), env in binding()) {
        prop_assert!(eval_expr(&e, &env).is_ok());
        prop_assert!(eval_expr(&i, &env).is_ok());
    }
}

#[test]
fn subtraction_chain_keeps_its_meaning() {
    let parsed = parse_model(
        "(model chain) (instance (c Int)) (state (a Int)) (params (b Int))
         (valid true) (initial true) (final true) (guard true) (update (a (- (+ a b) c)))",
    )
    .unwrap();
    let original = &parsed.update["a"];
    assert_eq!(serialize_expr(original), "(- (+ a b) c)");
    let reparsed = parse_model(&serialize_model(&parsed)).unwrap().update["a"].clone();

    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..100 {
        let env = binding().new_tree(&mut runner).unwrap().current();
        let expected = env.get("a").unwrap() + env.get("b").unwrap() - env.get("c").unwrap();
        assert_eq!(eval_expr(original, &env), eval_expr(&reparsed, &env));
        assert_eq!(eval_expr(original, &env), Ok(modelgate_core::model::Value::Int(expected)));
    }
    // and a right-nested variant is distinguished from it
    let right = Expr::sub(Expr::sym("a"), Expr::sub(Expr::sym("b"), Expr::sym("c")));
    assert_eq!(serialize_expr(&right), "(- a (- b c))");
}

// ---- fuzzing ----

const TOKENS: &[&str] = &[
    "(", ")", "(", ")", " ", "\n", ";", "model", "instance", "state", "params", "valid", "initial", "final", "guard",
    "update", "constrain", "Int", "Bool", "x", "y", "nm", "-", "+", "*", "=", "=>", "and", "or", "not", "ite", "0", "-7",
    "99999999999999999999", "|", "\"", "#x1F", "é", "\u{0}",
];

fn token_soup() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop::sample::select(TOKENS), 0..400).prop_map(|ts| ts.concat().into_bytes())
}

fn mutated_corpus() -> impl Strategy<Value = Vec<u8>> {
    let sources: Vec<Vec<u8>> = corpus_sources().into_iter().map(|(_, s)| s.into_bytes()).collect();
    (prop::sample::select(sources), prop::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0u8..3), 1..12))
        .prop_map(|(mut src, edits)| {
            for (at, byte, kind) in edits {
                if src.is_empty() {
                    src.push(byte);
                    continue;
                }
                let i = at.index(src.len());
                match kind {
                    0 => src[i] = byte,
                    1 => {
                        src.remove(i);
                    }
                    _ => src.insert(i, byte),
                }
            }
            src
        })
}

/// Occasional large inputs up to 1 MiB: deep nesting, long atoms, repetition.
fn large() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        (1usize..=(1 << 19)).prop_map(|n| format!("{}{}", "(".repeat(n), ")".repeat(n)).into_bytes()),
        (1usize..=(1 << 20)).prop_map(|n| vec![b'('; n]),
        (1usize..=(1 << 20)).prop_map(|n| vec![b'x'; n]),
        (1usize..=12_000).prop_map(|n| format!("(model m) (state (x Int)) (valid {}true{})", "(not ".repeat(n), ")".repeat(n)).into_bytes()),
        (1usize..=20_000).prop_map(|n| "(constrain (= x 1)) ".repeat(n).into_bytes()),
    ]
    .prop_map(|mut v: Vec<u8>| {
        v.truncate(1 << 20);
        v
    })
}

fn fuzz_input() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        45 => token_soup(),
        45 => mutated_corpus(),
        9 => prop::collection::vec(any::<u8>(), 0..2048),
        1 => large(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parser_never_panics(input in fuzz_input()) {
        prop_assert!(input.len() <= 1 << 20);
        match parse_model_bytes(&input) {
            Ok(m) => {
                let again = parse_model(&serialize_model(&m)).unwrap();
                prop_assert_eq!(again, m);
            }
            Err(errs) => {
                prop_assert!(!errs.is_empty());
                for e in &errs {
                    prop_assert!(e.span.line >= 1 && e.span.column >= 1);
                }
            }
        }
    }
}

#[test]
fn accepted_models_pass_validation() {
    for (_, src) in corpus_sources() {
        let m = parse_model(&src).unwrap();
        assert!(modelgate_core::model::validate_model(&m).is_empty());
    }
}
