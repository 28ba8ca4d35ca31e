use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ascent::{minimize, AscentParams};
use super::sampler::{stream_rng, uniform_point};
use crate::conditions::{
    c_violation_explained_by_b, check_b_with, check_c, margin_a, CheckConfig, Condition, Verdict, VerdictStatus,
    Witness,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Function and gradient evaluations across all restarts.
    pub max_evals: u64,
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    pub initial_step: f64,
    pub decay: f64,
    pub min_step: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        let a = AscentParams::default();
        Self {
            max_evals: 10_000,
            restarts: 8,
            max_iters: a.max_iters,
            initial_step: a.initial_step,
            decay: a.decay,
            min_step: a.min_step,
        }
    }
}

impl SearchBudget {
    pub fn with_evals(max_evals: u64) -> Self {
        Self { max_evals, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_evals == 0 || self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::usage("budget evals, restarts and iterations must be positive"));
        }
        if !(self.initial_step > 0.0 && self.min_step > 0.0 && self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::usage("step schedule needs positive steps and a decay in (0, 1)"));
        }
        Ok(())
    }

    fn params(&self) -> AscentParams {
        AscentParams {
            initial_step: self.initial_step,
            decay: self.decay,
            min_step: self.min_step,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationResult {
    pub condition: Condition,
    pub sigma: f64,
    /// Most negative margin found at a point where the condition applies.
    pub margin: Option<f64>,
    /// `violated` when `margin < −tol`; `vacuous` when no point satisfying
    /// the premise was reached.
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub evals_used: u64,
    pub restarts: usize,
    /// For (c) violations: whether (b) also fails at the pair or its swap.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub explained_by_b: Option<bool>,
}

impl FalsificationResult {
    pub fn is_violated(&self) -> bool {
        self.status == VerdictStatus::Violated
    }
}

/// Evaluations charged per objective call.
fn cost(c: Condition) -> u64 {
    match c {
        Condition::A => 3,
        Condition::B => 3,
        Condition::C => 4,
    }
}

// The search only accepts (b) pairs with f(x) <= f(y) exactly. With the usual
// premise slack it can park on the boundary f(x) = f(y) + tol near a flat
// point and turn that slack into a spurious margin below -tol.
fn pair_verdict(f: &ScalarField, target: Condition, x: &[f64], y: &[f64], cfg: &CheckConfig) -> Verdict {
    if target == Condition::B {
        check_b_with(f, x, y, cfg, 0.0)
    } else {
        check_c(f, x, y, cfg)
    }
}

/// Objective value and, where the condition applies, its margin. Outside the
/// premise the objective is the (positive) premise shortfall so that the
/// descent is pulled towards the region where the condition bites.
fn objective(f: &ScalarField, target: Condition, v: &[f64], cfg: &CheckConfig) -> Option<(f64, Option<f64>)> {
    let n = f.dim();
    let (x, y) = (&v[..n], &v[n..2 * n]);
    match target {
        Condition::A => {
            let m = margin_a(f, x, y, v[2 * n], cfg).ok()?;
            Some((m, Some(m)))
        }
        Condition::B | Condition::C => {
            let verdict = pair_verdict(f, target, x, y, cfg);
            match verdict.status {
                VerdictStatus::Holds | VerdictStatus::Violated => {
                    let m = verdict.margin?;
                    Some((m, Some(m)))
                }
                VerdictStatus::Vacuous => {
                    let w = verdict.witness?;
                    let shortfall = if target == Condition::B {
                        w.fx - w.fy
                    } else {
                        let d = crate::vecmath::dist(x, y, cfg.penalty_norm);
                        -0.5 * cfg.sigma * d * d + cfg.tol - w.pairing_x?
                    };
                    Some((shortfall.max(0.0), None))
                }
                VerdictStatus::Skipped => None,
            }
        }
    }
}

/// Most negative feasible margin seen and the point that produced it.
type Best = Option<(f64, Vec<f64>)>;

/// Multi-start projected descent on the margin of `target` over `(x, y)`,
/// plus `λ` for condition (a). Restart `r` starts from a point drawn from
/// stream `r` of `seed` and gets an equal share of the evaluation budget.
/// A non-violated result is only evidence: nothing is claimed about points
/// the search did not visit.
pub fn falsify(
    f: &ScalarField,
    target: Condition,
    cfg: &CheckConfig,
    budget: &SearchBudget,
    seed: u64,
) -> Result<FalsificationResult> {
    cfg.validate()?;
    budget.validate()?;
    let n = f.dim();
    let dom = f.domain();
    let mut lower: Vec<f64> = dom.lower().iter().chain(dom.lower()).copied().collect();
    let mut upper: Vec<f64> = dom.upper().iter().chain(dom.upper()).copied().collect();
    if target == Condition::A {
        lower.push(cfg.lambda_grid[0]);
        upper.push(*cfg.lambda_grid.last().expect("validated grid"));
    }
    let per_restart = budget.max_evals / budget.restarts as u64 / cost(target);
    let params = budget.params();

    let runs: Vec<(Best, u64)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let mut x0 = uniform_point(&mut rng, dom);
            x0.extend(uniform_point(&mut rng, dom));
            if target == Condition::A {
                x0.push(lower[2 * n] + (upper[2 * n] - lower[2 * n]) * rng.random::<f64>());
            }
            let mut best: Best = None;
            let mut calls = 0u64;
            minimize(
                |v| {
                    calls += 1;
                    let (obj, margin) = objective(f, target, v, cfg)?;
                    if let Some(m) = margin {
                        if best.as_ref().map_or(true, |(b, _)| m < *b) {
                            best = Some((m, v.to_vec()));
                        }
                    }
                    Some(obj)
                },
                &x0,
                &lower,
                &upper,
                &params,
                per_restart,
            );
            (best, calls)
        })
        .collect();

    let evals_used = runs.iter().map(|r| r.1).sum::<u64>() * cost(target);
    let mut best: Best = None;
    for (b, _) in runs.into_iter() {
        if let Some((m, v)) = b {
            if best.as_ref().map_or(true, |(bm, _)| m < *bm) {
                best = Some((m, v));
            }
        }
    }

    let mut result = FalsificationResult {
        condition: target,
        sigma: cfg.sigma,
        margin: None,
        status: VerdictStatus::Vacuous,
        witness: None,
        evals_used,
        restarts: budget.restarts,
        explained_by_b: None,
    };
    let Some((_, v)) = best else { return Ok(result) };
    let (x, y) = (&v[..n], &v[n..2 * n]);
    // Rebuild margin and witness through the public checks.
    let (margin, witness) = match target {
        Condition::A => {
            let lambda = v[2 * n];
            let m = margin_a(f, x, y, lambda, cfg)?;
            let mut mid = vec![0.0; n];
            crate::vecmath::segment_point_into(x, y, lambda, &mut mid);
            let w = Witness {
                x: x.to_vec(),
                y: y.to_vec(),
                lambda: Some(lambda),
                fx: f.value(x)?,
                fy: f.value(y)?,
                f_mid: Some(f.value(&mid)?),
                pairing_x: None,
                pairing_y: None,
            };
            (m, w)
        }
        Condition::B | Condition::C => {
            let verdict = pair_verdict(f, target, x, y, cfg);
            let m =
                verdict.margin.ok_or_else(|| Error::Sampling("witness lost its premise on re-evaluation".into()))?;
            (m, verdict.witness.expect("checked verdicts carry witnesses"))
        }
    };
    result.status = if margin < -cfg.tol { VerdictStatus::Violated } else { VerdictStatus::Holds };
    if target == Condition::C && result.status == VerdictStatus::Violated {
        result.explained_by_b = Some(c_violation_explained_by_b(f, x, y, cfg));
    }
    result.margin = Some(margin);
    result.witness = Some(witness);
    Ok(result)
}
