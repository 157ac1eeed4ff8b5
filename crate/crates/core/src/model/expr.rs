use std::collections::BTreeSet;
use std::fmt;

/// Sorts of the expression language. State, parameter and instance symbols
/// are always `Int`; `Bool` only appears in predicate position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Int,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
        }
    }
}

/// Integer/boolean expression tree over model symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Neq(Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    Gt(Box<Expr>, Box<Expr>),
    Ge(Box<Expr>, Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

macro_rules! binary_ctor {
    ($($name:ident => $variant:ident),* $(,)?) => {
        $(
            pub fn $name(lhs: Expr, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(lhs), Box::new(rhs))
            }
        )*
    };
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    binary_ctor! {
        add => Add, sub => Sub, mul => Mul,
        eq => Eq, neq => Neq, lt => Lt, le => Le, gt => Gt, ge => Ge,
        implies => Implies,
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    /// Direct children in left-to-right order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Sym(_) => vec![],
            Expr::Neg(a) | Expr::Not(a) => vec![a],
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Eq(a, b)
            | Expr::Neq(a, b)
            | Expr::Lt(a, b)
            | Expr::Le(a, b)
            | Expr::Gt(a, b)
            | Expr::Ge(a, b)
            | Expr::Implies(a, b) => vec![a, b],
            Expr::And(xs) | Expr::Or(xs) => xs.iter().collect(),
            Expr::Ite(c, t, e) => vec![c, t, e],
        }
    }

    /// Every symbol name referenced anywhere in the tree.
    pub fn symbols(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Expr::Sym(s) = e {
                out.insert(s.as_str());
            }
            stack.extend(e.children());
        }
        out
    }

    /// True when the tree multiplies two non-literal operands.
    pub fn is_nonlinear(&self) -> bool {
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Expr::Mul(a, b) = e {
                if !a.is_constant() && !b.is_constant() {
                    return true;
                }
            }
            stack.extend(e.children());
        }
        false
    }

    fn is_constant(&self) -> bool {
        match self {
            Expr::Sym(_) => false,
            other => other.children().iter().all(|c| c.is_constant()),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}
