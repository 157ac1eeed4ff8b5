use std::fmt::Write;

use crate::model::{Expr, Model};

/// Renders a model in `.tsm` syntax. Parsing the result yields an equal model.
pub fn serialize_model(model: &Model) -> String {
    let mut out = String::new();
    let decls = |names: &[String]| names.iter().map(|n| format!(" ({n} Int)")).collect::<String>();
    let _ = writeln!(out, "(model {})", model.name);
    if !model.instance_symbols.is_empty() {
        let _ = writeln!(out, "(instance{})", decls(&model.instance_symbols));
    }
    let _ = writeln!(out, "(state{})", decls(&model.state_fields));
    if !model.param_fields.is_empty() {
        let _ = writeln!(out, "(params{})", decls(&model.param_fields));
    }
    let _ = writeln!(out, "(valid {})", serialize_expr(&model.valid));
    let _ = writeln!(out, "(initial {})", serialize_expr(&model.initial));
    let _ = writeln!(out, "(final {})", serialize_expr(&model.final_pred));
    let _ = writeln!(out, "(guard {})", serialize_expr(&model.guard));
    out.push_str("(update");
    for (field, e) in &model.update {
        let _ = write!(out, "\n  ({field} {})", serialize_expr(e));
    }
    out.push_str(")\n");
    for c in &model.constraints {
        let _ = writeln!(out, "(constrain {})", serialize_expr(c));
    }
    out
}

/// Prefix rendering with one operator per list, so every tree shape is
/// reproduced exactly on re-parse.
pub fn serialize_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn write_expr(out: &mut String, expr: &Expr) {
    let op = match expr {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
            return;
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
            return;
        }
        Expr::Sym(s) => {
            out.push_str(s);
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
        Expr::And(_) => "and",
        Expr::Or(_) => "or",
        Expr::Not(_) => "not",
        Expr::Implies(..) => "=>",
        Expr::Ite(..) => "ite",
    };
    out.push('(');
    out.push_str(op);
    for child in expr.children() {
        out.push(' ');
        write_expr(out, child);
    }
    out.push(')');
}
