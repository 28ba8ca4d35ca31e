//! Sampling campaign looking for functions that satisfy (c) but violate (a).
//!
//! The shipped families are an arbitrary starting point, not a claim about
//! where counterexamples live: a convex quadratic control, norms with a
//! sinusoidal perturbation, a parabola minus a Gaussian bump, and cubics.
//! Anything reported is a sampling-based candidate, never a proof.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::falsify::{falsify, SearchBudget};
use super::sampler::{stream_rng, uniform_point};
use crate::conditions::{remargin, CheckConfig, Condition, Witness};
use crate::error::{Error, Result};
use crate::expr::{parse_with_params, Expr};
use crate::field::{DomainBox, ScalarField};

pub const CANDIDATE_NOTE: &str =
    "candidates are sampling-based: condition (c) was only tested on searched points, so none of them is a proof";

/// An expression in `x1..xn` and parameters `p1..pk`, with a box for each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub name: String,
    pub expr: String,
    pub domain: DomainBox,
    pub params: DomainBox,
    #[serde(skip)]
    parsed: Option<Expr>,
}

impl Family {
    /// Parses `expr` against the dimensions of `domain` and `params`.
    pub fn new(name: impl Into<String>, expr: impl Into<String>, domain: DomainBox, params: DomainBox) -> Result<Self> {
        let expr = expr.into();
        let parsed = parse_with_params(&expr, domain.dim(), params.dim())?;
        Ok(Self { name: name.into(), expr, domain, params, parsed: Some(parsed) })
    }

    /// Like [`Family::new`], but with the parameter box given as bounds; an
    /// empty list is a usage error.
    pub fn with_bounds(
        name: impl Into<String>,
        expr: impl Into<String>,
        domain: DomainBox,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::usage("family parameter box is empty"));
        }
        Self::new(name, expr, domain, DomainBox::new(lower, upper)?)
    }

    /// The member at parameter vector `theta`.
    pub fn member(&self, theta: &[f64]) -> Result<ScalarField> {
        if theta.len() != self.params.dim() {
            return Err(Error::usage("parameter vector has the wrong length"));
        }
        let e = match &self.parsed {
            Some(e) => e.bind_params(theta),
            None => parse_with_params(&self.expr, self.domain.dim(), self.params.dim())?.bind_params(theta),
        };
        ScalarField::from_expr(e, self.domain.clone())
    }
}

pub fn shipped_families() -> Vec<Family> {
    let sq = |lo: f64, hi: f64, n: usize| DomainBox::cube(lo, hi, n).expect("static box");
    let fam = |name: &str, expr: &str, domain: DomainBox, lo: Vec<f64>, hi: Vec<f64>| {
        Family::with_bounds(name, expr, domain, lo, hi).expect("shipped family parses")
    };
    vec![
        fam(
            "psd_quadratic",
            "(p1*x1 + p2*x2)^2 + (p3*x2)^2",
            sq(-1.0, 1.0, 2),
            vec![-2.0, -2.0, -2.0],
            vec![2.0, 2.0, 2.0],
        ),
        fam(
            "perturbed_norm",
            "x1^2 + x2^2 + p1*sin(p2*x1 + p3*x2)",
            sq(-1.0, 1.0, 2),
            vec![0.0, -3.0, -3.0],
            vec![0.5, 3.0, 3.0],
        ),
        fam("bump_sum", "x1^2 - p1*exp(-p2*(x1 - p3)^2)", sq(-2.0, 2.0, 1), vec![0.0, 0.5, -1.5], vec![2.0, 4.0, 1.5]),
        fam("param_cubic", "x1^3 + p1*x1^2 + p2*x1", sq(-2.0, 2.0, 1), vec![-2.0, -2.0], vec![2.0, 2.0]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    pub members_per_family: usize,
    /// Budget of each individual falsification run.
    pub budget: SearchBudget,
    /// Evaluations for the whole campaign, re-verification included.
    pub total_evals: u64,
    /// Budget multiplier for re-verifying a candidate.
    pub verify_factor: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            members_per_family: 12,
            budget: SearchBudget::with_evals(4_000),
            total_evals: 1_000_000,
            verify_factor: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub family: String,
    pub theta: Vec<f64>,
    /// Most negative (c) margin found; `None` if its premise never held.
    pub c_margin: Option<f64>,
    pub a_margin: f64,
    pub a_witness: Witness,
    /// Same quantities after the enlarged-budget rerun.
    pub verify_c_margin: Option<f64>,
    pub verify_a_margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub name: String,
    pub expr: String,
    pub members_tested: usize,
    pub c_violations: usize,
    pub a_searches: usize,
    pub candidates: usize,
    /// Candidates dropped because re-verification found a (c) violation,
    /// lost the (a) violation, or could not be afforded.
    pub rejected: usize,
    pub evals_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub note: String,
    pub sigma: f64,
    pub families: Vec<FamilyReport>,
    /// Verified candidates, most negative (a) margin first.
    pub candidates: Vec<Candidate>,
    pub evals_used: u64,
    pub budget_exhausted: bool,
}

pub fn open_question_search(
    family: &Family,
    cfg: &CheckConfig,
    campaign: &CampaignConfig,
    seed: u64,
) -> Result<CampaignReport> {
    run_campaign(std::slice::from_ref(family), cfg, campaign, seed)
}

/// Runs the campaign over `families` sequentially under one shared budget.
pub fn run_campaign(
    families: &[Family],
    cfg: &CheckConfig,
    campaign: &CampaignConfig,
    seed: u64,
) -> Result<CampaignReport> {
    cfg.validate()?;
    campaign.budget.validate()?;
    if campaign.members_per_family == 0 || campaign.verify_factor == 0 {
        return Err(Error::usage("campaign needs at least one member per family and a positive verify factor"));
    }
    let threshold = -10.0 * cfg.tol;
    let base = campaign.budget;
    let verify = SearchBudget { max_evals: base.max_evals * campaign.verify_factor, ..base };
    let mut report = CampaignReport {
        note: CANDIDATE_NOTE.to_string(),
        sigma: cfg.sigma,
        families: Vec::new(),
        candidates: Vec::new(),
        evals_used: 0,
        budget_exhausted: false,
    };

    for (fi, family) in families.iter().enumerate() {
        let mut fr = FamilyReport { name: family.name.clone(), expr: family.expr.clone(), ..Default::default() };
        for k in 0..campaign.members_per_family {
            if report.evals_used + 2 * base.max_evals > campaign.total_evals {
                report.budget_exhausted = true;
                break;
            }
            let mut rng = stream_rng(seed, ((fi as u64) << 32) | k as u64);
            let theta = uniform_point(&mut rng, &family.params);
            let run_seed = rng.random::<u64>();
            let f = family.member(&theta)?;
            fr.members_tested += 1;

            let c = falsify(&f, Condition::C, cfg, &base, run_seed)?;
            fr.evals_used += c.evals_used;
            report.evals_used += c.evals_used;
            if c.is_violated() {
                fr.c_violations += 1;
                continue;
            }
            fr.a_searches += 1;
            let a = falsify(&f, Condition::A, cfg, &base, run_seed)?;
            fr.evals_used += a.evals_used;
            report.evals_used += a.evals_used;
            let (Some(a_margin), Some(a_witness)) = (a.margin, a.witness) else { continue };
            if a_margin > threshold {
                continue;
            }

            // Re-verify with the enlarged budget before anything is reported.
            if report.evals_used + 2 * verify.max_evals > campaign.total_evals {
                fr.rejected += 1;
                report.budget_exhausted = true;
                continue;
            }
            let vc = falsify(&f, Condition::C, cfg, &verify, run_seed)?;
            let va = falsify(&f, Condition::A, cfg, &verify, run_seed)?;
            fr.evals_used += vc.evals_used + va.evals_used;
            report.evals_used += vc.evals_used + va.evals_used;
            let reproduced =
                remargin(&f, Condition::A, &a_witness, cfg)?.is_some_and(|m| (m - a_margin).abs() <= 1e-10);
            let verify_a = va.margin.unwrap_or(f64::INFINITY);
            if vc.is_violated() || verify_a > threshold || !reproduced {
                fr.rejected += 1;
                continue;
            }
            fr.candidates += 1;
            report.candidates.push(Candidate {
                family: family.name.clone(),
                theta,
                c_margin: c.margin,
                a_margin,
                a_witness,
                verify_c_margin: vc.margin,
                verify_a_margin: verify_a,
            });
        }
        report.families.push(fr);
    }
    report.candidates.sort_by(|a, b| a.a_margin.total_cmp(&b.a_margin));
    Ok(report)
}
