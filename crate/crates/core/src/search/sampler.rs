//! Pair `i` of a run draws from its own ChaCha stream `(seed, i)`, so any
//! subset of pairs can be generated independently and in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::DomainBox;
use crate::vecmath::{dist, Norm};

/// Rejection attempts allowed per pair before the box is declared degenerate.
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    UniformBox,
    GaussianInterior,
    SegmentGrid,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform_box" | "uniform" => Ok(Strategy::UniformBox),
            "gaussian_interior" | "gaussian" => Ok(Strategy::GaussianInterior),
            "segment_grid" | "grid" => Ok(Strategy::SegmentGrid),
            other => Err(Error::usage(format!(
                "unknown strategy '{other}' (expected uniform_box, gaussian_interior or segment_grid)"
            ))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::UniformBox => "uniform_box",
            Strategy::GaussianInterior => "gaussian_interior",
            Strategy::SegmentGrid => "segment_grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub strategy: Strategy,
    pub seed: u64,
    pub count: usize,
    pub domain: DomainBox,
}

impl Sampler {
    pub fn new(strategy: Strategy, seed: u64, count: usize, domain: DomainBox) -> Self {
        Self { strategy, seed, count, domain }
    }
}

/// Independent generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn uniform_point<R: Rng>(rng: &mut R, domain: &DomainBox) -> Vec<f64> {
    domain.lower().iter().zip(domain.upper()).map(|(l, u)| l + (u - l) * rng.random::<f64>()).collect()
}

/// `s.count` pairs inside the box, each at least `min_sep` apart in `norm`.
pub fn sample_pairs(s: &Sampler, min_sep: f64, norm: Norm) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if s.count == 0 {
        return Err(Error::usage("sampler count must be at least 1"));
    }
    if min_sep.is_nan() || min_sep < 0.0 {
        return Err(Error::usage("min_sep must be non-negative"));
    }
    match s.strategy {
        Strategy::SegmentGrid => segment_grid(s, min_sep, norm),
        Strategy::UniformBox | Strategy::GaussianInterior => {
            (0..s.count).into_par_iter().map(|i| random_pair(s, i as u64, min_sep, norm)).collect()
        }
    }
}

fn random_pair(s: &Sampler, i: u64, min_sep: f64, norm: Norm) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = stream_rng(s.seed, i);
    for _ in 0..MAX_ATTEMPTS {
        let (x, y) = match s.strategy {
            Strategy::GaussianInterior => {
                let (Some(x), Some(y)) = (gaussian_point(&mut rng, &s.domain), gaussian_point(&mut rng, &s.domain))
                else {
                    continue;
                };
                (x, y)
            }
            _ => (uniform_point(&mut rng, &s.domain), uniform_point(&mut rng, &s.domain)),
        };
        if dist(&x, &y, norm) >= min_sep {
            return Ok((x, y));
        }
    }
    Err(Error::Sampling(format!(
        "pair {i}: no acceptable pair after {MAX_ATTEMPTS} attempts; the box may be degenerate relative to min_sep"
    )))
}

/// Box centre plus N(0, (width/6)²) per coordinate; `None` if it lands outside.
fn gaussian_point<R: Rng>(rng: &mut R, domain: &DomainBox) -> Option<Vec<f64>> {
    let p: Vec<f64> = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(l, u)| {
            let normal = Normal::new(0.5 * (l + u), (u - l) / 6.0).expect("positive width");
            normal.sample(rng)
        })
        .collect();
    domain.contains(&p).then_some(p)
}

/// Deterministic pairs on a `g`-point grid per axis (endpoints included),
/// with `g` the smallest value giving `count` index pairs `j < k`. Pair
/// `(j, k)` puts coordinate `c` of its endpoints at grid offsets `j + c`
/// and `k + c` (mod g), so in one dimension the pairs span the box at the
/// grid offsets. The seed is unused.
fn segment_grid(s: &Sampler, min_sep: f64, norm: Norm) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut g = 2usize;
    while g * (g - 1) / 2 < s.count {
        g += 1;
    }
    let lower = s.domain.lower();
    let upper = s.domain.upper();
    let at = |c: usize, t: usize| lower[c] + (upper[c] - lower[c]) * t as f64 / (g - 1) as f64;
    let mut out = Vec::with_capacity(s.count);
    'outer: for j in 0..g {
        for k in j + 1..g {
            if out.len() == s.count {
                break 'outer;
            }
            let x: Vec<f64> = (0..lower.len()).map(|c| at(c, (j + c) % g)).collect();
            let y: Vec<f64> = (0..lower.len()).map(|c| at(c, (k + c) % g)).collect();
            if dist(&x, &y, norm) < min_sep {
                return Err(Error::Sampling(format!("grid pair ({j}, {k}) is closer than min_sep")));
            }
            out.push((x, y));
        }
    }
    Ok(out)
}
