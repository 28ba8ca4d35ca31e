//! Built-in fields with analytically known status on their default boxes.
//!
//! The σ values refer to the Euclidean penalty norm.

use std::f64::consts::PI;

use super::{DomainBox, KnownStatus, ScalarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// `Some(n)` for entries that only exist in dimension `n`.
    pub fixed_dim: Option<usize>,
    pub default_dim: usize,
    build: fn(usize) -> ScalarField,
}

impl CatalogEntry {
    pub fn build(&self, dim: usize) -> Result<ScalarField> {
        if dim == 0 {
            return Err(Error::usage("dimension must be >= 1"));
        }
        if let Some(n) = self.fixed_dim {
            if n != dim {
                return Err(Error::usage(format!("catalog field '{}' exists only in dimension {n}", self.name)));
            }
        }
        Ok((self.build)(dim))
    }

    /// The same function written in the expression language.
    pub fn formula(&self, dim: usize) -> String {
        let vars = |f: &dyn Fn(usize) -> String| (1..=dim).map(f).collect::<Vec<_>>().join(" + ");
        match self.name {
            "const" => "1".to_string(),
            "affine" => vars(&|i| format!("{i}*x{i}")),
            "sqnorm" => vars(&|i| format!("x{i}^2")),
            "cubic" => "x1^3".to_string(),
            "sin" => "sin(x1)".to_string(),
            "cubic_minus_x" => "x1^3 - x1".to_string(),
            "sqrt_norm" => format!("sqrt(sqrt({}))", vars(&|i| format!("x{i}^2"))),
            _ => unreachable!("formula missing for catalog entry"),
        }
    }
}

const ENTRIES: [CatalogEntry; 7] = [
    CatalogEntry {
        name: "const",
        summary: "f(x) = 1 on [-1,1]^n; quasiconvex, sigma 0",
        fixed_dim: None,
        default_dim: 2,
        build: constant,
    },
    CatalogEntry {
        name: "affine",
        summary: "f(x) = sum_i i*x_i on [-1,1]^n; quasiconvex, sigma 0 (tight for n >= 2)",
        fixed_dim: None,
        default_dim: 2,
        build: affine,
    },
    CatalogEntry {
        name: "sqnorm",
        summary: "f(x) = |x|^2 on [-1,1]^n; sigma-quasiconvex with sigma 2 on any box",
        fixed_dim: None,
        default_dim: 2,
        build: sqnorm,
    },
    CatalogEntry {
        name: "cubic",
        summary: "f(x) = x^3 on [-2,2]; monotone, quasiconvex",
        fixed_dim: Some(1),
        default_dim: 1,
        build: cubic,
    },
    CatalogEntry {
        name: "sin",
        summary: "f(x) = sin(x) on [0,2pi]; not quasiconvex",
        fixed_dim: Some(1),
        default_dim: 1,
        build: sine,
    },
    CatalogEntry {
        name: "cubic_minus_x",
        summary: "f(x) = x^3 - x on [-2,2]; not quasiconvex",
        fixed_dim: Some(1),
        default_dim: 1,
        build: cubic_minus_x,
    },
    CatalogEntry {
        name: "sqrt_norm",
        summary: "f(x) = |x|^(1/2) on [0.5,1.5]^n (away from the kink at 0); status unknown",
        fixed_dim: None,
        default_dim: 2,
        build: sqrt_norm,
    },
];

/// Every catalog entry at its default dimension.
pub fn catalog() -> Vec<ScalarField> {
    ENTRIES.iter().map(|e| (e.build)(e.default_dim)).collect()
}

pub fn catalog_entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn catalog_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str, dim: usize) -> Result<ScalarField> {
    entry(name)?.build(dim)
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::usage(format!("unknown catalog field '{name}' (known: {})", catalog_names().join(", "))))
}

fn cube(lo: f64, hi: f64, n: usize) -> DomainBox {
    DomainBox::cube(lo, hi, n).expect("catalog boxes are valid")
}

fn constant(n: usize) -> ScalarField {
    ScalarField::from_fns("const", cube(-1.0, 1.0, n), KnownStatus::Quasiconvex, |_| 1.0, |x| vec![0.0; x.len()])
        .status_holds_everywhere()
}

fn affine(n: usize) -> ScalarField {
    ScalarField::from_fns(
        "affine",
        cube(-1.0, 1.0, n),
        KnownStatus::Quasiconvex,
        |x| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum(),
        |x| (1..=x.len()).map(|i| i as f64).collect(),
    )
    .status_holds_everywhere()
}

fn sqnorm(n: usize) -> ScalarField {
    ScalarField::from_fns(
        "sqnorm",
        cube(-1.0, 1.0, n),
        KnownStatus::SigmaQuasiconvex(2.0),
        |x| x.iter().map(|v| v * v).sum(),
        |x| x.iter().map(|v| 2.0 * v).collect(),
    )
    .status_holds_everywhere()
}

fn cubic(_: usize) -> ScalarField {
    ScalarField::from_fns(
        "cubic",
        cube(-2.0, 2.0, 1),
        KnownStatus::Quasiconvex,
        |x| x[0].powi(3),
        |x| vec![3.0 * x[0] * x[0]],
    )
    .status_holds_everywhere()
}

fn sine(_: usize) -> ScalarField {
    ScalarField::from_fns(
        "sin",
        cube(0.0, 2.0 * PI, 1),
        KnownStatus::NotQuasiconvex,
        |x| x[0].sin(),
        |x| vec![x[0].cos()],
    )
}

fn cubic_minus_x(_: usize) -> ScalarField {
    ScalarField::from_fns(
        "cubic_minus_x",
        cube(-2.0, 2.0, 1),
        KnownStatus::NotQuasiconvex,
        |x| x[0].powi(3) - x[0],
        |x| vec![3.0 * x[0] * x[0] - 1.0],
    )
}

fn sqrt_norm(n: usize) -> ScalarField {
    ScalarField::from_fns(
        "sqrt_norm",
        cube(0.5, 1.5, n),
        KnownStatus::Unknown,
        |x| x.iter().map(|v| v * v).sum::<f64>().sqrt().sqrt(),
        |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = 0.5 * r.powf(-1.5);
            x.iter().map(|v| scale * v).collect()
        },
    )
}
