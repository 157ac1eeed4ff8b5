//! SMT-LIB term rendering.

use std::fmt::Write;

use crate::model::Expr;

/// Renders `expr` as an SMT-LIB term, mapping each symbol through `resolve`.
pub(crate) fn term(expr: &Expr, resolve: &dyn Fn(&str) -> String) -> String {
    let mut out = String::new();
    write_term(&mut out, expr, resolve);
    out
}

fn write_term(out: &mut String, expr: &Expr, resolve: &dyn Fn(&str) -> String) {
    let op = match expr {
        Expr::Int(v) => {
            out.push_str(&int_literal(*v));
            return;
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
            return;
        }
        Expr::Sym(s) => {
            out.push_str(&resolve(s));
            return;
        }
        Expr::Add(..) => "+",
        Expr::Sub(..) | Expr::Neg(_) => "-",
        Expr::Mul(..) => "*",
        Expr::Eq(..) => "=",
        Expr::Neq(..) => "distinct",
        Expr::Lt(..) => "<",
        Expr::Le(..) => "<=",
        Expr::Gt(..) => ">",
        Expr::Ge(..) => ">=",
        Expr::And(xs) if xs.is_empty() => {
            out.push_str("true");
            return;
        }
        Expr::Or(xs) if xs.is_empty() => {
            out.push_str("false");
            return;
        }
        Expr::And(xs) if xs.len() == 1 => return write_term(out, &xs[0], resolve),
        Expr::Or(xs) if xs.len() == 1 => return write_term(out, &xs[0], resolve),
        Expr::And(_) => "and",
        Expr::Or(_) => "or",
        Expr::Not(_) => "not",
        Expr::Implies(..) => "=>",
        Expr::Ite(..) => "ite",
    };
    out.push('(');
    out.push_str(op);
    for c in expr.children() {
        out.push(' ');
        write_term(out, c, resolve);
    }
    out.push(')');
}

/// SMT-LIB has no negative numerals; negatives are written `(- k)`.
pub(crate) fn int_literal(v: i64) -> String {
    if v < 0 {
        format!("(- {})", v.unsigned_abs())
    } else {
        v.to_string()
    }
}

/// `(f a b c)`, or just `f` with no arguments.
pub(crate) fn app<S: AsRef<str>>(f: &str, args: impl IntoIterator<Item = S>) -> String {
    let mut out = String::from("(");
    out.push_str(f);
    let mut any = false;
    for a in args {
        any = true;
        out.push(' ');
        out.push_str(a.as_ref());
    }
    if !any {
        return f.to_string();
    }
    out.push(')');
    out
}

/// Conjunction that degrades gracefully for zero or one conjuncts.
pub(crate) fn and_all(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "true".to_string(),
        1 => parts.into_iter().next().unwrap(),
        _ => app("and", parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_literals() {
        assert_eq!(int_literal(-7), "(- 7)");
        assert_eq!(int_literal(i64::MIN), "(- 9223372036854775808)");
        let e = Expr::add(Expr::sym("x"), Expr::Int(-1));
        assert_eq!(term(&e, &|s| format!("s0_{s}")), "(+ s0_x (- 1))");
    }

    #[test]
    fn nullary_application_is_bare() {
        assert_eq!(app::<&str>("f", []), "f");
        assert_eq!(app("f", ["a", "b"]), "(f a b)");
    }
}
