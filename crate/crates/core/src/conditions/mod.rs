//! Signed margins for the segment inequality (condition a) and the two
//! first-order conditions (b) and (c), σ* estimation, and the scalar lemma
//! check.
//!
//! With σ ≥ 0 and d = ‖x − y‖:
//!
//! ```text
//! (a)  f(λx + (1−λ)y) ≤ max{f(x), f(y)} − (σ/2)λ(1−λ)d²
//! (b)  f(x) ≤ f(y)                    ⇒  ⟨∇f(y), x − y⟩ ≤ −(σ/2)d²
//! (c)  ⟨∇f(x), y − x⟩ > −(σ/2)d²      ⇒  ⟨∇f(y), x − y⟩ ≤ −(σ/2)d²
//! ```
//!
//! Every check returns the raw signed slack of its conclusion; a verdict is
//! `violated` exactly when that margin is below `−tol`.

mod lemma;
mod sigma;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::vecmath::{dist, segment_point_into, Norm};

pub use lemma::{check_lemma, check_lemma_refined, check_lemma_with, interior_grid, LemmaReport};
pub use sigma::{sigma_star_estimate, sigma_star_segment, SegmentSigma, SigmaEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    A,
    B,
    C,
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Condition::A),
            "b" => Ok(Condition::B),
            "c" => Ok(Condition::C),
            other => Err(Error::usage(format!("unknown condition '{other}' (expected a, b or c)"))),
        }
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Condition::A => "a",
            Condition::B => "b",
            Condition::C => "c",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub sigma: f64,
    /// Margin tolerance; also the strictness slack of the (c) premise.
    pub tol: f64,
    /// Pairs closer than this (in the penalty norm) are skipped.
    pub min_sep: f64,
    /// λ values strictly inside (0, 1).
    pub lambda_grid: Vec<f64>,
    pub penalty_norm: Norm,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { sigma: 0.0, tol: 1e-9, min_sep: 1e-6, lambda_grid: dyadic_grid(63), penalty_norm: Norm::L2 }
    }
}

/// `{k/(m+1) : k = 1..m}`; m = 63 gives the 1/64 grid.
pub fn dyadic_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|k| k as f64 / (m + 1) as f64).collect()
}

impl CheckConfig {
    pub fn with_sigma(sigma: f64) -> Self {
        Self { sigma, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::usage(format!("sigma must be a finite value >= 0, got {}", self.sigma)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::usage("tol must be positive"));
        }
        if !(self.min_sep > 0.0 && self.min_sep.is_finite()) {
            return Err(Error::usage("min_sep must be positive"));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::usage("lambda grid is empty"));
        }
        if self.lambda_grid.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return Err(Error::usage("lambda grid values must lie strictly inside (0, 1)"));
        }
        if self.lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("lambda grid must be strictly increasing"));
        }
        Ok(())
    }

    /// (σ/2)·‖x − y‖².
    #[inline]
    pub(crate) fn half_sigma_sq(&self, d: f64) -> f64 {
        0.5 * self.sigma * d * d
    }

    fn separation(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::usage("dimension mismatch between x and y"));
        }
        let d = dist(x, y, self.penalty_norm);
        if d < self.min_sep {
            return Err(Error::usage(format!("pair separation {d:e} below min_sep {:e}", self.min_sep)));
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Holds,
    Violated,
    Vacuous,
    Skipped,
}

/// Points and intermediate values behind a margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    pub fx: f64,
    pub fy: f64,
    /// f(λx + (1−λ)y), for condition (a).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f_mid: Option<f64>,
    /// ⟨∇f(x), y − x⟩
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairing_x: Option<f64>,
    /// ⟨∇f(y), x − y⟩
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairing_y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Signed slack of the conclusion; absent for vacuous and skipped checks.
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn skipped() -> Self {
        Self { status: VerdictStatus::Skipped, margin: None, witness: None }
    }

    fn vacuous(witness: Witness) -> Self {
        Self { status: VerdictStatus::Vacuous, margin: None, witness: Some(witness) }
    }

    fn classify(margin: f64, tol: f64, witness: Witness) -> Self {
        let status = if margin < -tol { VerdictStatus::Violated } else { VerdictStatus::Holds };
        Self { status, margin: Some(margin), witness: Some(witness) }
    }

    pub fn is_violated(&self) -> bool {
        self.status == VerdictStatus::Violated
    }
}

/// `max{f(x), f(y)} − (σ/2)λ(1−λ)‖x−y‖² − f(λx + (1−λ)y)`; non-negative
/// exactly when the segment inequality holds at `(x, y, λ)`.
pub fn margin_a(f: &ScalarField, x: &[f64], y: &[f64], lambda: f64, cfg: &CheckConfig) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::usage(format!("lambda {lambda} outside (0, 1)")));
    }
    let d = cfg.separation(x, y)?;
    let fx = f.value(x)?;
    let fy = f.value(y)?;
    let mut mid = vec![0.0; x.len()];
    segment_point_into(x, y, lambda, &mut mid);
    let fm = f.value(&mid)?;
    Ok(margin_a_from(fx, fy, fm, lambda, d, cfg))
}

#[inline]
pub(crate) fn margin_a_from(fx: f64, fy: f64, f_mid: f64, lambda: f64, d: f64, cfg: &CheckConfig) -> f64 {
    fx.max(fy) - cfg.half_sigma_sq(d) * lambda * (1.0 - lambda) - f_mid
}

/// Condition (a) over the whole λ grid: the verdict carries the smallest
/// margin and its λ. Grid points that fail to evaluate are ignored; the
/// verdict is skipped only when all of them fail.
pub fn check_a(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig) -> Verdict {
    let Ok(d) = cfg.separation(x, y) else { return Verdict::skipped() };
    let (Ok(fx), Ok(fy)) = (f.value(x), f.value(y)) else { return Verdict::skipped() };
    let mut mid = vec![0.0; x.len()];
    let mut worst: Option<(f64, f64, f64)> = None;
    for &lambda in &cfg.lambda_grid {
        segment_point_into(x, y, lambda, &mut mid);
        let Ok(fm) = f.value(&mid) else { continue };
        let m = margin_a_from(fx, fy, fm, lambda, d, cfg);
        if worst.map_or(true, |(w, _, _)| m < w) {
            worst = Some((m, lambda, fm));
        }
    }
    match worst {
        None => Verdict::skipped(),
        Some((m, lambda, fm)) => Verdict::classify(
            m,
            cfg.tol,
            Witness {
                x: x.to_vec(),
                y: y.to_vec(),
                lambda: Some(lambda),
                fx,
                fy,
                f_mid: Some(fm),
                pairing_x: None,
                pairing_y: None,
            },
        ),
    }
}

/// Condition (b) with the premise `f(x) ≤ f(y) + tol`.
pub fn check_b(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig) -> Verdict {
    check_b_with(f, x, y, cfg, cfg.tol)
}

/// Condition (b) with an explicit premise slack: the premise is
/// `f(x) ≤ f(y) + premise_tol`.
pub fn check_b_with(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig, premise_tol: f64) -> Verdict {
    let Ok(d) = cfg.separation(x, y) else { return Verdict::skipped() };
    let (Ok(fx), Ok(fy)) = (f.value(x), f.value(y)) else { return Verdict::skipped() };
    let mut w =
        Witness { x: x.to_vec(), y: y.to_vec(), lambda: None, fx, fy, f_mid: None, pairing_x: None, pairing_y: None };
    if fx > fy + premise_tol {
        return Verdict::vacuous(w);
    }
    let Ok(gy) = f.gradient(y) else { return Verdict::skipped() };
    let py = pairing(&gy, x, y);
    w.pairing_y = Some(py);
    Verdict::classify(-cfg.half_sigma_sq(d) - py, cfg.tol, w)
}

/// Condition (c) with the strict premise realised as
/// `⟨∇f(x), y − x⟩ > −(σ/2)d² + tol`.
pub fn check_c(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig) -> Verdict {
    check_c_with(f, x, y, cfg, cfg.tol)
}

pub fn check_c_with(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig, premise_tol: f64) -> Verdict {
    let Ok(d) = cfg.separation(x, y) else { return Verdict::skipped() };
    let (Ok(fx), Ok(fy)) = (f.value(x), f.value(y)) else { return Verdict::skipped() };
    let Ok(gx) = f.gradient(x) else { return Verdict::skipped() };
    let px = pairing(&gx, y, x);
    let penalty = cfg.half_sigma_sq(d);
    let mut w = Witness {
        x: x.to_vec(),
        y: y.to_vec(),
        lambda: None,
        fx,
        fy,
        f_mid: None,
        pairing_x: Some(px),
        pairing_y: None,
    };
    if px <= -penalty + premise_tol {
        return Verdict::vacuous(w);
    }
    let Ok(gy) = f.gradient(y) else { return Verdict::skipped() };
    let py = pairing(&gy, x, y);
    w.pairing_y = Some(py);
    Verdict::classify(-penalty - py, cfg.tol, w)
}

/// ⟨g, a − b⟩ without allocating.
#[inline]
pub(crate) fn pairing(g: &[f64], a: &[f64], b: &[f64]) -> f64 {
    g.iter().zip(a.iter().zip(b)).map(|(gi, (ai, bi))| gi * (ai - bi)).sum()
}

/// Recomputes the margin recorded in `w` for `condition` from scratch.
pub fn remargin(f: &ScalarField, condition: Condition, w: &Witness, cfg: &CheckConfig) -> Result<Option<f64>> {
    Ok(match condition {
        Condition::A => {
            let lambda = w.lambda.ok_or_else(|| Error::usage("condition (a) witness needs lambda"))?;
            Some(margin_a(f, &w.x, &w.y, lambda, cfg)?)
        }
        Condition::B => check_b(f, &w.x, &w.y, cfg).margin,
        Condition::C => check_c(f, &w.x, &w.y, cfg).margin,
    })
}

/// True when a (c) violation at `(x, y)` is matched by a (b) violation at
/// `(x, y)` or `(y, x)`, with exact (zero-slack) premises.
pub fn c_violation_explained_by_b(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig) -> bool {
    check_b_with(f, x, y, cfg, 0.0).is_violated() || check_b_with(f, y, x, cfg, 0.0).is_violated()
}
