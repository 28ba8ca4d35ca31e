//! A small arithmetic expression language for user-supplied scalar
//! functions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := power (('*' | '/') power)*
//! power   := unary ('^' power)?            right-associative
//! unary   := '-' unary | primary
//! primary := number | x<i> | p<j> | func '(' args ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | abs | min | max | pow
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x1^2` is `(-x1)^2`. Variables are
//! `x1..xn`; `p1..pk` are family parameters bound before evaluation. There is
//! no implicit multiplication.
//!
//! Evaluation goes through [`eval_dual`], which propagates a forward-mode
//! tangent alongside the value and yields ⟨∇f(x), d⟩ exactly up to rounding.

mod dual;
mod lexer;
mod parser;

use std::fmt;

pub use dual::{eval_dual, eval_expr, gradient, Dual};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_with_params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Pow,
}

impl Func {
    pub const ALL: [Func; 9] =
        [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs, Func::Min, Func::Max, Func::Pow];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Const(f64),
    /// 1-based variable index.
    Var(usize),
    /// 1-based family parameter index.
    Param(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Expression tree node. `pos` is the character offset of the node in the
/// source it was parsed from; equality ignores it.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: usize) -> Self {
        Self { kind, pos }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(ExprKind::Const(v), 0)
    }

    pub fn var(i: usize) -> Self {
        Self::new(ExprKind::Var(i), 0)
    }

    pub fn param(i: usize) -> Self {
        Self::new(ExprKind::Param(i), 0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Self::new(ExprKind::Unary(UnaryOp::Neg, Box::new(e)), 0)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Self::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), 0)
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Self {
        Self::new(ExprKind::Call(f, args), 0)
    }

    /// Largest variable index referenced (0 when none).
    pub fn max_var(&self) -> usize {
        self.fold(0, &|acc, e| match e.kind {
            ExprKind::Var(i) => acc.max(i),
            _ => acc,
        })
    }

    pub fn max_param(&self) -> usize {
        self.fold(0, &|acc, e| match e.kind {
            ExprKind::Param(i) => acc.max(i),
            _ => acc,
        })
    }

    pub fn node_count(&self) -> usize {
        self.fold(0, &|acc, _| acc + 1)
    }

    fn fold<T: Copy>(&self, init: T, f: &dyn Fn(T, &Expr) -> T) -> T {
        let acc = f(init, self);
        match &self.kind {
            ExprKind::Const(_) | ExprKind::Var(_) | ExprKind::Param(_) => acc,
            ExprKind::Unary(_, c) => c.fold(acc, f),
            ExprKind::Binary(_, l, r) => r.fold(l.fold(acc, f), f),
            ExprKind::Call(_, args) => args.iter().fold(acc, |a, e| e.fold(a, f)),
        }
    }

    /// Replaces every `p<j>` with the constant `params[j-1]`. Parameters past
    /// the end of `params` are left in place.
    pub fn bind_params(&self, params: &[f64]) -> Expr {
        let kind = match &self.kind {
            ExprKind::Param(j) if *j >= 1 && *j <= params.len() => ExprKind::Const(params[j - 1]),
            ExprKind::Const(_) | ExprKind::Var(_) | ExprKind::Param(_) => self.kind.clone(),
            ExprKind::Unary(op, c) => ExprKind::Unary(*op, Box::new(c.bind_params(params))),
            ExprKind::Binary(op, l, r) => {
                ExprKind::Binary(*op, Box::new(l.bind_params(params)), Box::new(r.bind_params(params)))
            }
            ExprKind::Call(f, args) => ExprKind::Call(*f, args.iter().map(|a| a.bind_params(params)).collect()),
        };
        Expr::new(kind, self.pos)
    }

    /// Value of a variable-free subtree, if it has one.
    pub(crate) fn const_value(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Const(v) => Some(*v),
            ExprKind::Unary(UnaryOp::Neg, c) => c.const_value().map(|v| -v),
            ExprKind::Binary(op, l, r) => {
                let (a, b) = (l.const_value()?, r.const_value()?);
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                };
                v.is_finite().then_some(v)
            }
            _ => None,
        }
    }
}

/// Fully parenthesized rendering that reparses to a structurally equal tree.
pub fn pretty_print(e: &Expr) -> String {
    e.to_string()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Const(v) if *v < 0.0 => write!(f, "(-{})", -v),
            ExprKind::Const(v) => write!(f, "{v}"),
            ExprKind::Var(i) => write!(f, "x{i}"),
            ExprKind::Param(j) => write!(f, "p{j}"),
            ExprKind::Unary(UnaryOp::Neg, c) => write!(f, "(-{c})"),
            ExprKind::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
