use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CheckConfig;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::search::ascent::{self, AscentParams};
use crate::search::sampler::{sample_pairs, Sampler};
use crate::vecmath::{dist, segment_point_into};

/// Number of best sampled pairs that get locally polished.
const REFINE_TOP: usize = 4;
/// Objective evaluations allowed per polished pair.
const REFINE_EVALS: u64 = 3000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSigma {
    /// Smallest σ ratio over the λ grid.
    pub value: f64,
    /// λ at which it occurs, relative to the pair as given.
    pub lambda: f64,
    pub skipped_lambdas: usize,
}

/// `min_λ 2·(max{f(x), f(y)} − f(λx + (1−λ)y)) / (λ(1−λ)‖x − y‖²)` over the
/// λ grid: the largest σ the segment inequality allows on this segment.
/// Negative values mean the segment already breaks quasiconvexity.
pub fn sigma_star_segment(f: &ScalarField, x: &[f64], y: &[f64], cfg: &CheckConfig) -> Result<SegmentSigma> {
    let d = dist(x, y, cfg.penalty_norm);
    if x.len() != y.len() || x.len() != f.dim() {
        return Err(Error::usage("dimension mismatch"));
    }
    if d < cfg.min_sep {
        return Err(Error::usage(format!("pair separation {d:e} below min_sep")));
    }
    // Evaluate in a canonical orientation so that swapping x and y gives the
    // bitwise-identical answer on symmetric grids.
    let swapped = y < x;
    let (u, v) = if swapped { (y, x) } else { (x, y) };
    let fu = f.value(u)?;
    let fv = f.value(v)?;
    let top = fu.max(fv);
    let mut mid = vec![0.0; x.len()];
    let mut best: Option<(f64, f64)> = None;
    let mut skipped = 0;
    for &lambda in &cfg.lambda_grid {
        let l = if swapped { 1.0 - lambda } else { lambda };
        segment_point_into(u, v, l, &mut mid);
        match f.value(&mid) {
            Ok(fm) => {
                let ratio = 2.0 * (top - fm) / (l * (1.0 - l) * d * d);
                if best.map_or(true, |(b, _)| ratio < b) {
                    best = Some((ratio, lambda));
                }
            }
            Err(_) => skipped += 1,
        }
    }
    let (value, lambda) =
        best.ok_or_else(|| Error::NoValidSamples("every lambda on the segment failed to evaluate".into()))?;
    Ok(SegmentSigma { value, lambda, skipped_lambdas: skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    /// Minimum segment ratio found; an upper bound on the true σ*.
    pub raw: f64,
    /// `max(raw, 0)`.
    pub reported: f64,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    /// Best value among the sampled pairs before local polishing.
    pub sampled_min: f64,
}

/// Estimates σ* as the minimum of [`sigma_star_segment`] over the sampled
/// pairs, then polishes the few best pairs with a projected local descent.
/// Polishing only ever lowers the estimate, so the result stays an upper
/// bound on the true σ* of the box.
pub fn sigma_star_estimate(f: &ScalarField, sampler: &Sampler, cfg: &CheckConfig) -> Result<SigmaEstimate> {
    cfg.validate()?;
    if sampler.domain.dim() != f.dim() {
        return Err(Error::usage("sampler domain and field dimension differ"));
    }
    let pairs = sample_pairs(sampler, cfg.min_sep, cfg.penalty_norm)?;
    let values: Vec<Option<SegmentSigma>> =
        pairs.par_iter().map(|(x, y)| sigma_star_segment(f, x, y, cfg).ok()).collect();

    let mut ranked: Vec<(f64, usize)> =
        values.iter().enumerate().filter_map(|(i, v)| v.as_ref().map(|s| (s.value, i))).collect();
    if ranked.is_empty() {
        return Err(Error::NoValidSamples("no sampled pair could be evaluated".into()));
    }
    let skipped = pairs.len() - ranked.len();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (sampled_min, best_idx) = ranked[0];

    let polished: Vec<(f64, Vec<f64>, Vec<f64>)> = ranked
        .iter()
        .take(REFINE_TOP)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(v, i)| polish(f, cfg, &pairs[i].0, &pairs[i].1, v))
        .collect();

    let mut best = (sampled_min, pairs[best_idx].0.clone(), pairs[best_idx].1.clone());
    for p in polished {
        if p.0 < best.0 {
            best = p;
        }
    }
    let seg = sigma_star_segment(f, &best.1, &best.2, cfg)?;
    Ok(SigmaEstimate {
        raw: seg.value,
        reported: seg.value.max(0.0),
        pairs_used: ranked.len(),
        pairs_skipped: skipped,
        x: best.1,
        y: best.2,
        lambda: seg.lambda,
        sampled_min,
    })
}

fn polish(f: &ScalarField, cfg: &CheckConfig, x: &[f64], y: &[f64], start: f64) -> (f64, Vec<f64>, Vec<f64>) {
    let n = f.dim();
    let dom = f.domain();
    let lower: Vec<f64> = dom.lower().iter().chain(dom.lower()).copied().collect();
    let upper: Vec<f64> = dom.upper().iter().chain(dom.upper()).copied().collect();
    let x0: Vec<f64> = x.iter().chain(y).copied().collect();
    let out = ascent::minimize(
        |v: &[f64]| sigma_star_segment(f, &v[..n], &v[n..], cfg).ok().map(|s| s.value),
        &x0,
        &lower,
        &upper,
        &AscentParams::default(),
        REFINE_EVALS,
    );
    match out {
        Some(o) if o.value < start => (o.value, o.point[..n].to_vec(), o.point[n..].to_vec()),
        _ => (start, x.to_vec(), y.to_vec()),
    }
}
