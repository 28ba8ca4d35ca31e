use serde::{Deserialize, Serialize};

use super::ScalarField;
use crate::error::{Error, EvalError, Result};
use crate::search::sampler::{stream_rng, uniform_point};
use crate::vecmath::{pnorm, Norm};

/// `1e-5 · max(1, ‖x‖∞)`.
pub fn default_step(x: &[f64]) -> f64 {
    1e-5 * pnorm(x, Norm::Inf).max(1.0)
}

/// Central differences `(f(x + h·eᵢ) − f(x − h·eᵢ)) / 2h`.
pub fn fd_grad(f: &ScalarField, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::usage(format!("finite-difference step must be positive, got {h}")));
    }
    if x.len() != f.dim() {
        return Err(Error::usage("point dimension does not match field"));
    }
    let dom = f.domain();
    for (i, v) in x.iter().enumerate() {
        if v - h < dom.lower()[i] || v + h > dom.upper()[i] {
            return Err(Error::usage(format!("probe x{} +/- h leaves the domain box", i + 1)));
        }
    }
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f.value(&probe)?;
        probe[i] = x[i] - h;
        let fm = f.value(&probe)?;
        probe[i] = x[i];
        out.push((fp - fm) / (2.0 * h));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradReport {
    pub points_checked: usize,
    pub skipped: usize,
    pub max_abs_deviation: f64,
    pub worst_point: Option<Vec<f64>>,
    /// Step used at the worst point.
    pub step_h: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the field gradient with central differences at `count` seeded
/// interior points, in the ∞-norm. `step = None` uses [`default_step`].
pub fn validate_grad(f: &ScalarField, seed: u64, count: usize, step: Option<f64>, tol: f64) -> Result<GradReport> {
    if count == 0 {
        return Err(Error::usage("gradient check needs at least one point"));
    }
    let dom = f.domain();
    let bound = dom.lower().iter().chain(dom.upper()).fold(1.0f64, |m, v| m.max(v.abs()));
    let max_h = step.unwrap_or(1e-5 * bound);
    let interior = dom.inset(max_h).map_err(|_| Error::usage("domain box too small for the finite-difference step"))?;

    let mut report = GradReport {
        points_checked: 0,
        skipped: 0,
        max_abs_deviation: 0.0,
        worst_point: None,
        step_h: max_h,
        tol,
        passed: false,
    };
    for i in 0..count {
        let x = uniform_point(&mut stream_rng(seed, i as u64), &interior);
        let h = step.unwrap_or_else(|| default_step(&x));
        let pair = f.gradient(&x).map_err(Error::from).and_then(|g| Ok((g, fd_grad(f, &x, h)?)));
        match pair {
            Ok((g, fd)) => {
                report.points_checked += 1;
                let dev = g.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if dev > report.max_abs_deviation || report.worst_point.is_none() {
                    report.max_abs_deviation = dev;
                    report.worst_point = Some(x);
                    report.step_h = h;
                }
            }
            Err(Error::Eval(EvalError { .. })) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if report.points_checked == 0 {
        return Err(Error::NoValidSamples(format!("all {count} gradient-check points failed to evaluate")));
    }
    report.passed = report.max_abs_deviation <= tol;
    Ok(report)
}
