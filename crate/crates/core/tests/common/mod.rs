//! Shared generators for the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use quasiconv::expr::{BinOp, Expr, Func};
use quasiconv::ParseErrorKind as K;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Non-negative constants with short and long decimal expansions; the
/// parser never produces negative literals.
pub fn constant() -> impl Strategy<Value = f64> {
    prop_oneof![(0u32..100).prop_map(f64::from), (0.0f64..1e3), (1e-12f64..1e-3), Just(0.5),]
}

/// Arbitrary parser-producible trees in `x1..x{dim}`, evaluable or not.
pub fn any_expr(dim: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![constant().prop_map(Expr::constant), (1..=dim).prop_map(Expr::var)];
    leaf.prop_recursive(5, 48, 3, |inner| {
        let binop =
            prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (binop, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (prop::sample::select(Func::ALL.to_vec()), prop::collection::vec(inner, 2)).prop_map(|(f, mut args)| {
                args.truncate(f.arity());
                Expr::call(f, args)
            }),
        ]
    })
}

/// Smooth expressions that evaluate everywhere: sums, products, sin, cos,
/// exp of a damped argument, and small integer powers.
pub fn smooth_expr(rng: &mut ChaCha8Rng, dim: usize, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.6) {
            Expr::var(rng.random_range(1..=dim))
        } else {
            Expr::constant((rng.random_range(-20..=20) as f64) / 10.0)
        };
    }
    let sub = |rng: &mut ChaCha8Rng| smooth_expr(rng, dim, depth - 1);
    match rng.random_range(0..7) {
        0 => Expr::binary(BinOp::Add, sub(rng), sub(rng)),
        1 => Expr::binary(BinOp::Sub, sub(rng), sub(rng)),
        2 => Expr::binary(BinOp::Mul, sub(rng), sub(rng)),
        3 => Expr::call(Func::Sin, vec![sub(rng)]),
        4 => Expr::call(Func::Cos, vec![sub(rng)]),
        5 => {
            let damped = Expr::binary(BinOp::Mul, Expr::constant(0.3), Expr::call(Func::Sin, vec![sub(rng)]));
            Expr::call(Func::Exp, vec![damped])
        }
        _ => {
            // Keep powers off large subtrees so values stay moderate.
            let base = if rng.random_bool(0.5) {
                Expr::var(rng.random_range(1..=dim))
            } else {
                Expr::call(Func::Sin, vec![sub(rng)])
            };
            Expr::binary(BinOp::Pow, base, Expr::constant(rng.random_range(2..=3) as f64))
        }
    }
}

// Parser corpus.

pub fn c(v: f64) -> Expr {
    Expr::constant(v)
}
pub fn x(i: usize) -> Expr {
    Expr::var(i)
}
pub fn p(i: usize) -> Expr {
    Expr::param(i)
}
pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr::binary(op, l, r)
}
pub fn add(l: Expr, r: Expr) -> Expr {
    bin(BinOp::Add, l, r)
}
pub fn sub(l: Expr, r: Expr) -> Expr {
    bin(BinOp::Sub, l, r)
}
pub fn mul(l: Expr, r: Expr) -> Expr {
    bin(BinOp::Mul, l, r)
}
pub fn div(l: Expr, r: Expr) -> Expr {
    bin(BinOp::Div, l, r)
}
pub fn pow(l: Expr, r: Expr) -> Expr {
    bin(BinOp::Pow, l, r)
}
pub fn neg(e: Expr) -> Expr {
    Expr::neg(e)
}
pub fn call(f: Func, args: Vec<Expr>) -> Expr {
    Expr::call(f, args)
}

pub enum Want {
    Tree(Expr),
    Fails(K, usize),
}
use Want::*;

/// `(source, dimension, parameter count, expectation)`
pub fn corpus() -> Vec<(&'static str, usize, usize, Want)> {
    vec![
        ("1", 1, 0, Tree(c(1.0))),
        ("2.5", 1, 0, Tree(c(2.5))),
        (".5", 1, 0, Tree(c(0.5))),
        ("3.", 1, 0, Tree(c(3.0))),
        ("1e3", 1, 0, Tree(c(1000.0))),
        ("2.5E-2", 1, 0, Tree(c(0.025))),
        ("x1", 1, 0, Tree(x(1))),
        ("x12", 12, 0, Tree(x(12))),
        ("  x2 ", 2, 0, Tree(x(2))),
        ("x1 + x2 * x3", 3, 0, Tree(add(x(1), mul(x(2), x(3))))),
        ("(x1 + x2) * x3", 3, 0, Tree(mul(add(x(1), x(2)), x(3)))),
        ("x1 - x2 - x3", 3, 0, Tree(sub(sub(x(1), x(2)), x(3)))),
        ("x1 / x2 / x3", 3, 0, Tree(div(div(x(1), x(2)), x(3)))),
        ("x1 * x2 / x3", 3, 0, Tree(div(mul(x(1), x(2)), x(3)))),
        ("x1^2^3", 1, 0, Tree(pow(x(1), pow(c(2.0), c(3.0))))),
        ("-x1^2", 1, 0, Tree(pow(neg(x(1)), c(2.0)))),
        ("--x1", 1, 0, Tree(neg(neg(x(1))))),
        ("-(x1 + 1)", 1, 0, Tree(neg(add(x(1), c(1.0))))),
        ("2 * -x1", 1, 0, Tree(mul(c(2.0), neg(x(1))))),
        ("x1 - -1", 1, 0, Tree(sub(x(1), neg(c(1.0))))),
        ("x1 ^ -2", 1, 0, Tree(pow(x(1), neg(c(2.0))))),
        ("sin(x1)", 1, 0, Tree(call(Func::Sin, vec![x(1)]))),
        ("cos(x1) * exp(x2)", 2, 0, Tree(mul(call(Func::Cos, vec![x(1)]), call(Func::Exp, vec![x(2)])))),
        ("log(sqrt(abs(x1)))", 1, 0, Tree(call(Func::Log, vec![call(Func::Sqrt, vec![call(Func::Abs, vec![x(1)])])]))),
        ("max(x1, x2)", 2, 0, Tree(call(Func::Max, vec![x(1), x(2)]))),
        ("min(x1 + 1, -x2)", 2, 0, Tree(call(Func::Min, vec![add(x(1), c(1.0)), neg(x(2))]))),
        ("pow(x1, 0.5)", 1, 0, Tree(call(Func::Pow, vec![x(1), c(0.5)]))),
        ("((x1))", 1, 0, Tree(x(1))),
        ("x1^2 + x2^2", 2, 0, Tree(add(pow(x(1), c(2.0)), pow(x(2), c(2.0))))),
        ("p1*x1 + p2", 1, 2, Tree(add(mul(p(1), x(1)), p(2)))),
        ("2e", 1, 0, Fails(K::UnexpectedToken("e".into()), 1)),
        ("", 1, 0, Fails(K::EmptyInput, 0)),
        ("   ", 1, 0, Fails(K::EmptyInput, 0)),
        ("sin(x1", 1, 0, Fails(K::UnclosedParen, 6)),
        ("(x1 + 2", 1, 0, Fails(K::UnclosedParen, 7)),
        ("x1 + 2)", 1, 0, Fails(K::UnexpectedToken(")".into()), 6)),
        ("2x1", 1, 0, Fails(K::UnexpectedToken("x1".into()), 1)),
        ("x1 x2", 2, 0, Fails(K::UnexpectedToken("x2".into()), 3)),
        ("x0", 1, 0, Fails(K::UnknownIdentifier("x0".into()), 0)),
        ("x3", 2, 0, Fails(K::VariableOutOfRange { index: 3, dimension: 2 }, 0)),
        ("1 + y", 1, 0, Fails(K::UnknownIdentifier("y".into()), 4)),
        ("p1 * x1", 1, 0, Fails(K::ParameterOutOfRange { index: 1, count: 0 }, 0)),
        ("tan(x1)", 1, 0, Fails(K::UnknownFunction("tan".into()), 0)),
        ("max(x1)", 1, 0, Fails(K::ArityMismatch { name: "max".into(), expected: 2, found: 1 }, 0)),
        ("x1 + sin(x1, x1)", 1, 0, Fails(K::ArityMismatch { name: "sin".into(), expected: 1, found: 2 }, 5)),
        ("sin()", 1, 0, Fails(K::ArityMismatch { name: "sin".into(), expected: 1, found: 0 }, 0)),
        ("x1 +", 1, 0, Fails(K::UnexpectedEnd, 4)),
        ("* x1", 1, 0, Fails(K::UnexpectedToken("*".into()), 0)),
        ("x1 $ 2", 1, 0, Fails(K::UnexpectedChar('$'), 3)),
        ("1e999", 1, 0, Fails(K::InvalidNumber("1e999".into()), 0)),
        ("x1 + .", 1, 0, Fails(K::InvalidNumber(".".into()), 5)),
        ("1.2.3", 1, 0, Fails(K::UnexpectedToken(".3".into()), 3)),
        ("max(x1, )", 1, 0, Fails(K::UnexpectedToken(")".into()), 8)),
        ("(,)", 1, 0, Fails(K::UnexpectedToken(",".into()), 1)),
        ("x1 ^", 1, 0, Fails(K::UnexpectedEnd, 4)),
        ("é + x1", 1, 0, Fails(K::UnexpectedChar('é'), 0)),
        ("x1 + é", 1, 0, Fails(K::UnexpectedChar('é'), 5)),
    ]
}

/// Checks one corpus entry; `Err` describes the mismatch.
pub fn check_case(src: &str, dim: usize, params: usize, want: &Want) -> Result<(), String> {
    let got = quasiconv::expr::parse_with_params(src, dim, params);
    let ok = match (want, &got) {
        (Tree(t), Ok(e)) => t == e,
        (Fails(kind, pos), Err(err)) => &err.kind == kind && err.position == *pos,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{src:?}: got {got:?}"))
    }
}
