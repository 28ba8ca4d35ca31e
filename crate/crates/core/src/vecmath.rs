//! Finite-dimensional vector helpers.
//!
//! Points, directions and gradients are plain `[f64]` slices. The pairing
//! between a gradient and a direction is always the dot product; the norm
//! used for the σ penalty is selectable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm selector for the σ penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "1")]
    L1,
    #[default]
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "inf")]
    Inf,
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(Norm::L1),
            "2" | "l2" => Ok(Norm::L2),
            "inf" | "linf" | "max" => Ok(Norm::Inf),
            other => Err(Error::usage(format!("invalid norm selector '{other}' (expected 1, 2 or inf)"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        })
    }
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::usage(format!("dimension mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(())
}

/// Rejects empty vectors and non-finite coordinates.
pub fn check_finite(a: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::usage("vector must have dimension >= 1"));
    }
    if let Some(i) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::usage(format!("coordinate {i} is not finite")));
    }
    Ok(())
}

/// Duality pairing ⟨a, b⟩.
pub fn inner(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot(a, b))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn pnorm(a: &[f64], p: Norm) -> f64 {
    match p {
        Norm::L1 => a.iter().map(|v| v.abs()).sum(),
        Norm::L2 => a.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Norm::Inf => a.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

/// ‖x − y‖_p without allocating.
#[inline]
pub(crate) fn dist(x: &[f64], y: &[f64], p: Norm) -> f64 {
    let it = x.iter().zip(y).map(|(a, b)| a - b);
    match p {
        Norm::L1 => it.map(f64::abs).sum(),
        Norm::L2 => it.map(|d| d * d).sum::<f64>().sqrt(),
        Norm::Inf => it.fold(0.0, |m, d| m.max(d.abs())),
    }
}

/// x − y.
pub fn sub(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| a - b).collect())
}

/// λx + (1−λ)y, computed as y + λ(x − y) so that λ = 0 returns y exactly.
pub fn segment_point(x: &[f64], y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::usage(format!("lambda {lambda} outside [0, 1]")));
    }
    if lambda == 1.0 {
        return Ok(x.to_vec());
    }
    let mut out = vec![0.0; x.len()];
    segment_point_into(x, y, lambda, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn segment_point_into(x: &[f64], y: &[f64], lambda: f64, out: &mut [f64]) {
    for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
        *o = b + lambda * (a - b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(inner(&[0.0, 0.0], &[5.0, 7.0]).unwrap(), 0.0);
        assert_eq!(inner(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(inner(&[1.0], &[1.0, 2.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn pnorm_examples() {
        assert_eq!(pnorm(&[3.0, 4.0], Norm::L2), 5.0);
        assert_eq!(pnorm(&[3.0, 4.0], Norm::L1), 7.0);
        assert_eq!(pnorm(&[3.0, -4.0], Norm::Inf), 4.0);
        assert_eq!(pnorm(&[0.0, 0.0], Norm::L2), 0.0);
        assert!("7".parse::<Norm>().is_err());
        assert_eq!("inf".parse::<Norm>().unwrap(), Norm::Inf);
    }

    #[test]
    fn segment_endpoints_and_midpoint() {
        let x = [0.3, -1.7];
        let y = [2.0, 4.5];
        assert_eq!(segment_point(&x, &y, 1.0).unwrap(), x.to_vec());
        assert_eq!(segment_point(&x, &y, 0.0).unwrap(), y.to_vec());
        assert_eq!(segment_point(&[0.0, 0.0], &[2.0, 4.0], 0.5).unwrap(), vec![1.0, 2.0]);
        assert!(segment_point(&x, &y, 1.5).is_err());
        assert!(segment_point(&x, &y, -0.1).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 3)
    }

    proptest! {
        #[test]
        fn segment_swap_symmetry(x in vec3(), y in vec3(), lambda in 0.0f64..=1.0) {
            let p = segment_point(&x, &y, lambda).unwrap();
            let q = segment_point(&y, &x, 1.0 - lambda).unwrap();
            let scale = x.iter().chain(&y).fold(1.0f64, |m, v| m.max(v.abs()));
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-15 * scale * 4.0);
            }
        }

        #[test]
        fn triangle_inequality(a in vec3(), b in vec3()) {
            let s: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
            for p in [Norm::L1, Norm::L2, Norm::Inf] {
                prop_assert!(pnorm(&s, p) <= pnorm(&a, p) + pnorm(&b, p) + 1e-12);
            }
        }

        #[test]
        fn inner_symmetric_bilinear(a in vec3(), b in vec3(), c in vec3(), alpha in -5.0f64..5.0) {
            let ab = inner(&a, &b).unwrap();
            prop_assert!((ab - inner(&b, &a).unwrap()).abs() <= 1e-12 * ab.abs().max(1.0));
            let lhs_vec: Vec<f64> = a.iter().zip(&c).map(|(p, q)| alpha * p + q).collect();
            let lhs = inner(&lhs_vec, &b).unwrap();
            let rhs = alpha * ab + inner(&c, &b).unwrap();
            let scale = a.iter().chain(&b).chain(&c).fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * scale * 10.0);
        }
    }
}
