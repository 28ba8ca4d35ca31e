//! Projected finite-difference descent on a box.
//!
//! Works in coordinates normalised to `[0, 1]` per axis, so the step
//! schedule is relative to the box width. Each iteration estimates a
//! central-difference gradient and tries a normalised step along its
//! negative; if that fails it polls the coordinate directions, and if that
//! fails too the step decays. The objective may return `None` for points it
//! cannot evaluate; those count as `+∞`.
//!
//! The run stops as soon as the next probe would exceed the call budget, so
//! the points evaluated under a budget are a prefix of those evaluated
//! under any larger one.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentParams {
    /// First step, as a fraction of the box width.
    pub initial_step: f64,
    /// Step multiplier after a failed iteration.
    pub decay: f64,
    pub min_step: f64,
    pub max_iters: usize,
}

impl Default for AscentParams {
    fn default() -> Self {
        Self { initial_step: 0.1, decay: 0.5, min_step: 1e-10, max_iters: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Objective calls made.
    pub calls: u64,
}

/// Minimises `obj` over `[lower, upper]` from `x0` with at most `max_calls`
/// objective calls. Returns `None` only if no evaluated point was finite.
pub fn minimize<F>(
    mut obj: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    p: &AscentParams,
    max_calls: u64,
) -> Option<Minimum>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let m = x0.len();
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
    let mut calls = 0u64;
    let mut buf = vec![0.0; m];
    let mut eval = |u: &[f64], calls: &mut u64| -> f64 {
        *calls += 1;
        for i in 0..m {
            buf[i] = if width[i] > 0.0 { (lower[i] + width[i] * u[i]).min(upper[i]) } else { lower[i] };
        }
        obj(&buf).filter(|v| !v.is_nan()).unwrap_or(f64::INFINITY)
    };

    let mut u: Vec<f64> =
        (0..m).map(|i| if width[i] > 0.0 { ((x0[i] - lower[i]) / width[i]).clamp(0.0, 1.0) } else { 0.0 }).collect();
    if max_calls == 0 {
        return None;
    }
    let mut v = eval(&u, &mut calls);
    let mut step = p.initial_step;
    let mut g = vec![0.0; m];
    let mut trial = vec![0.0; m];
    let mut iters = 0;

    'search: while step >= p.min_step && iters < p.max_iters && calls < max_calls {
        iters += 1;
        let h = (step * 1e-2).max(1e-9);
        for i in 0..m {
            g[i] = 0.0;
            if width[i] == 0.0 {
                continue;
            }
            let (hi, lo) = ((u[i] + h).min(1.0), (u[i] - h).max(0.0));
            if hi <= lo {
                continue;
            }
            if calls + 2 > max_calls {
                break 'search;
            }
            trial.copy_from_slice(&u);
            trial[i] = hi;
            let fp = eval(&trial, &mut calls);
            trial[i] = lo;
            let fm = eval(&trial, &mut calls);
            let d = (fp - fm) / (hi - lo);
            if d.is_finite() {
                g[i] = d;
            }
        }
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            if calls >= max_calls {
                break;
            }
            for i in 0..m {
                trial[i] = (u[i] - step * g[i] / norm).clamp(0.0, 1.0);
            }
            if trial != u {
                let ft = eval(&trial, &mut calls);
                if ft < v {
                    u.copy_from_slice(&trial);
                    v = ft;
                    continue;
                }
            }
        }
        for i in 0..m {
            if width[i] == 0.0 {
                continue;
            }
            for sign in [-1.0, 1.0] {
                if calls >= max_calls {
                    break 'search;
                }
                trial.copy_from_slice(&u);
                trial[i] = (u[i] + sign * step).clamp(0.0, 1.0);
                if trial[i] == u[i] {
                    continue;
                }
                let ft = eval(&trial, &mut calls);
                if ft < v {
                    u.copy_from_slice(&trial);
                    v = ft;
                    continue 'search;
                }
            }
        }
        step *= p.decay;
    }
    if !v.is_finite() {
        return None;
    }
    let point =
        (0..m).map(|i| if width[i] > 0.0 { (lower[i] + width[i] * u[i]).min(upper[i]) } else { lower[i] }).collect();
    Some(Minimum { point, value: v, calls })
}
