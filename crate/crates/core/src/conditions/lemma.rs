//! One-dimensional check: if at every interior point either φ′(t) ≤ 0 or
//! φ(t) ≤ φ(a), then φ(b) ≤ φ(a).
//!
//! The hypothesis is only inspected on a grid, so a `violated` verdict means
//! "candidate contradiction, refine the grid" rather than a disproof.

use serde::{Deserialize, Serialize};

use super::{Verdict, VerdictStatus, Witness};
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// `m` evenly spaced points strictly inside `(a, b)`.
pub fn interior_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    (1..=m).map(|k| a + (b - a) * k as f64 / (m + 1) as f64).collect()
}

pub fn check_lemma(phi: &ScalarField, grid: &[f64], tol: f64) -> Result<Verdict> {
    check_lemma_with(phi, grid, tol, |fa, fb| fa - fb)
}

/// [`check_lemma`] with a caller-supplied conclusion margin
/// `margin(φ(a), φ(b))`, negative when the conclusion fails. Exposed so
/// tests can plant a faulty margin and confirm the verdicts notice.
#[doc(hidden)]
pub fn check_lemma_with(
    phi: &ScalarField,
    grid: &[f64],
    tol: f64,
    margin: impl Fn(f64, f64) -> f64,
) -> Result<Verdict> {
    if phi.dim() != 1 {
        return Err(Error::usage("lemma check needs a one-dimensional field"));
    }
    if grid.is_empty() {
        return Err(Error::usage("lemma grid is empty"));
    }
    let (a, b) = (phi.domain().lower()[0], phi.domain().upper()[0]);
    if grid.iter().any(|t| !(*t > a && *t < b)) {
        return Err(Error::usage("lemma grid points must lie strictly inside (a, b)"));
    }
    let (Ok(fa), Ok(fb)) = (phi.value(&[a]), phi.value(&[b])) else { return Ok(Verdict::skipped()) };

    for &t in grid {
        let (Ok(ft), Ok(g)) = (phi.value(&[t]), phi.gradient(&[t])) else { return Ok(Verdict::skipped()) };
        let slope = g[0];
        if !(slope <= tol || ft <= fa + tol) {
            return Ok(Verdict {
                status: VerdictStatus::Vacuous,
                margin: None,
                witness: Some(Witness {
                    x: vec![t],
                    y: vec![a],
                    lambda: None,
                    fx: ft,
                    fy: fa,
                    f_mid: None,
                    pairing_x: Some(slope),
                    pairing_y: None,
                }),
            });
        }
    }
    let m = margin(fa, fb);
    let status = if m < -tol { VerdictStatus::Violated } else { VerdictStatus::Holds };
    Ok(Verdict {
        status,
        margin: Some(m),
        witness: Some(Witness {
            x: vec![b],
            y: vec![a],
            lambda: None,
            fx: fb,
            fy: fa,
            f_mid: None,
            pairing_x: None,
            pairing_y: None,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub verdict: Verdict,
    pub grid_points: usize,
    /// Set when the final verdict is `violated`: the grid never exposed a
    /// hypothesis failure, which would be needed to rule the case out.
    pub candidate_contradiction: bool,
}

/// Runs [`check_lemma`] on an interior grid of `initial` points and, while
/// the verdict is `violated`, doubles the density (nesting the previous
/// grid) until it changes or `max_points` is reached.
pub fn check_lemma_refined(phi: &ScalarField, initial: usize, max_points: usize, tol: f64) -> Result<LemmaReport> {
    if initial == 0 {
        return Err(Error::usage("lemma grid needs at least one point"));
    }
    let (a, b) = (phi.domain().lower()[0], phi.domain().upper()[0]);
    let mut m = initial;
    loop {
        let verdict = check_lemma(phi, &interior_grid(a, b, m), tol)?;
        let next = 2 * m + 1;
        if verdict.status != VerdictStatus::Violated || next > max_points {
            let candidate_contradiction = verdict.status == VerdictStatus::Violated;
            return Ok(LemmaReport { verdict, grid_points: m, candidate_contradiction });
        }
        m = next;
    }
}
