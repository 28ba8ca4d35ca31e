use std::ops::{Add, Mul, Neg, Sub};

use super::{BinOp, Expr, ExprKind, Func, UnaryOp};
use crate::error::{EvalError, EvalErrorKind};

/// Value together with one directional-derivative component.
///
/// `nondiff` is set when evaluation passed exactly through a kink of `abs`,
/// `min`, `max` or `sqrt`; the derivative then follows the first argument.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
    pub nondiff: bool,
}

impl Dual {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv, nondiff: false }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    fn with_flag(mut self, flag: bool) -> Self {
        self.nondiff |= flag;
        self
    }

    /// Applies a scalar function with known derivative `df` at `self.value`.
    fn chain(self, value: f64, df: f64) -> Self {
        Dual { value, deriv: df * self.deriv, nondiff: self.nondiff }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.value + o.value, self.deriv + o.deriv).with_flag(self.nondiff || o.nondiff)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.value - o.value, self.deriv - o.deriv).with_flag(self.nondiff || o.nondiff)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.value * o.value, self.deriv * o.value + self.value * o.deriv)
            .with_flag(self.nondiff || o.nondiff)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { value: -self.value, deriv: -self.deriv, nondiff: self.nondiff }
    }
}

struct Env<'a> {
    x: &'a [f64],
    d: Option<&'a [f64]>,
}

/// Plain real evaluation.
pub fn eval_expr(e: &Expr, x: &[f64]) -> Result<f64, EvalError> {
    check_dim(e, x)?;
    eval(e, &Env { x, d: None }).map(|v| v.value)
}

/// Evaluates `(f(x), ⟨∇f(x), d⟩)` by forward propagation of the tangent `d`.
pub fn eval_dual(e: &Expr, x: &[f64], d: &[f64]) -> Result<Dual, EvalError> {
    check_dim(e, x)?;
    if d.len() != x.len() {
        return Err(EvalError::new(EvalErrorKind::DimensionMismatch, 0));
    }
    let out = eval(e, &Env { x, d: Some(d) })?;
    if !out.deriv.is_finite() {
        return Err(EvalError::new(EvalErrorKind::NonFinite, e.pos));
    }
    Ok(out)
}

/// Full gradient from `n` tangent passes along the basis vectors.
/// Returns the value, the gradient and whether any pass hit a kink.
pub fn gradient(e: &Expr, x: &[f64]) -> Result<(f64, Vec<f64>, bool), EvalError> {
    let n = x.len();
    let mut dir = vec![0.0; n];
    let mut grad = Vec::with_capacity(n);
    let mut value = 0.0;
    let mut flagged = false;
    for i in 0..n {
        dir[i] = 1.0;
        let out = eval_dual(e, x, &dir)?;
        dir[i] = 0.0;
        value = out.value;
        flagged |= out.nondiff;
        grad.push(out.deriv);
    }
    Ok((value, grad, flagged))
}

fn check_dim(e: &Expr, x: &[f64]) -> Result<(), EvalError> {
    if e.max_var() > x.len() {
        return Err(EvalError::new(EvalErrorKind::DimensionMismatch, e.pos));
    }
    Ok(())
}

fn fail(kind: EvalErrorKind, e: &Expr) -> EvalError {
    EvalError::new(kind, e.pos)
}

fn eval(e: &Expr, env: &Env<'_>) -> Result<Dual, EvalError> {
    let out = match &e.kind {
        ExprKind::Const(v) => Dual::constant(*v),
        ExprKind::Var(i) => Dual::new(env.x[i - 1], env.d.map_or(0.0, |d| d[i - 1])),
        // Parameters must be bound before evaluation.
        ExprKind::Param(_) => return Err(fail(EvalErrorKind::NonFinite, e)),
        ExprKind::Unary(UnaryOp::Neg, c) => -eval(c, env)?,
        ExprKind::Binary(op, l, r) => {
            let a = eval(l, env)?;
            match op {
                BinOp::Add => a + eval(r, env)?,
                BinOp::Sub => a - eval(r, env)?,
                BinOp::Mul => a * eval(r, env)?,
                BinOp::Div => div(a, eval(r, env)?, e)?,
                BinOp::Pow => match integer_exponent(r) {
                    Some(n) => powi(a, n, e)?,
                    None => powf(a, eval(r, env)?, e)?,
                },
            }
        }
        ExprKind::Call(f, args) => {
            let a = eval(&args[0], env)?;
            match f {
                Func::Sin => a.chain(a.value.sin(), a.value.cos()),
                Func::Cos => a.chain(a.value.cos(), -a.value.sin()),
                Func::Exp => {
                    let v = a.value.exp();
                    a.chain(v, v)
                }
                Func::Log => {
                    if a.value <= 0.0 {
                        return Err(fail(EvalErrorKind::LogNonPositive, e));
                    }
                    a.chain(a.value.ln(), 1.0 / a.value)
                }
                Func::Sqrt => {
                    if a.value < 0.0 {
                        return Err(fail(EvalErrorKind::SqrtNegative, e));
                    }
                    if a.value == 0.0 {
                        Dual { value: 0.0, deriv: 0.0, nondiff: true }
                    } else {
                        let s = a.value.sqrt();
                        a.chain(s, 0.5 / s)
                    }
                }
                Func::Abs => {
                    if a.value > 0.0 {
                        a
                    } else if a.value < 0.0 {
                        -a
                    } else {
                        a.with_flag(true)
                    }
                }
                Func::Min | Func::Max => {
                    let b = eval(&args[1], env)?;
                    let pick_a = if *f == Func::Min { a.value <= b.value } else { a.value >= b.value };
                    let tie = a.value == b.value;
                    let chosen = if pick_a { a } else { b };
                    chosen.with_flag(tie || a.nondiff || b.nondiff)
                }
                Func::Pow => powf(a, eval(&args[1], env)?, e)?,
            }
        }
    };
    if !out.value.is_finite() {
        return Err(fail(EvalErrorKind::NonFinite, e));
    }
    Ok(out)
}

fn integer_exponent(r: &Expr) -> Option<i32> {
    let v = r.const_value()?;
    (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
}

fn div(a: Dual, b: Dual, e: &Expr) -> Result<Dual, EvalError> {
    if b.value == 0.0 {
        return Err(fail(EvalErrorKind::DivisionByZero, e));
    }
    let q = a.value / b.value;
    Ok(Dual::new(q, (a.deriv - q * b.deriv) / b.value).with_flag(a.nondiff || b.nondiff))
}

fn powi(a: Dual, n: i32, e: &Expr) -> Result<Dual, EvalError> {
    if n == 0 {
        return Ok(Dual { value: 1.0, deriv: 0.0, nondiff: a.nondiff });
    }
    if a.value == 0.0 && n < 0 {
        return Err(fail(EvalErrorKind::DivisionByZero, e));
    }
    Ok(a.chain(a.value.powi(n), n as f64 * a.value.powi(n - 1)))
}

fn powf(a: Dual, b: Dual, e: &Expr) -> Result<Dual, EvalError> {
    if a.value <= 0.0 {
        return Err(fail(EvalErrorKind::PowNonPositiveBase, e));
    }
    let v = a.value.powf(b.value);
    let ln = a.value.ln();
    let deriv = v * (b.deriv * ln + b.value * a.deriv / a.value);
    Ok(Dual::new(v, deriv).with_flag(a.nondiff || b.nondiff))
}
