use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{sample_pairs, Sampler, Strategy};
use crate::conditions::{
    c_violation_explained_by_b, check_a, check_b, check_c, CheckConfig, Condition, Verdict, VerdictStatus, Witness,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionTally {
    pub holds: usize,
    pub violated: usize,
    pub vacuous: usize,
    pub skipped: usize,
    pub worst_margin: Option<f64>,
    pub worst_pair: Option<usize>,
    pub worst_witness: Option<Witness>,
}

impl ConditionTally {
    pub fn total(&self) -> usize {
        self.holds + self.violated + self.vacuous + self.skipped
    }

    fn add(&mut self, pair: usize, v: Verdict) {
        match v.status {
            VerdictStatus::Holds => self.holds += 1,
            VerdictStatus::Violated => self.violated += 1,
            VerdictStatus::Vacuous => self.vacuous += 1,
            VerdictStatus::Skipped => self.skipped += 1,
        }
        if let Some(m) = v.margin {
            // Strict comparison keeps the earliest pair on ties.
            if self.worst_margin.map_or(true, |w| m < w) {
                self.worst_margin = Some(m);
                self.worst_pair = Some(pair);
                self.worst_witness = v.witness;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub samples: usize,
    pub sigma: f64,
    pub seed: u64,
    pub strategy: Strategy,
    pub a: ConditionTally,
    pub b: ConditionTally,
    pub c: ConditionTally,
    /// Pairs violating (b) or (c) in a run where no (a) violation turned up.
    /// Diagnostic only: sampling cannot certify (a).
    pub theorem_tension: usize,
    /// (c) violations with no (b) violation on the same or swapped pair.
    pub contrapositive_exceptions: usize,
}

impl HarnessReport {
    pub fn violations(&self) -> usize {
        self.a.violated + self.b.violated + self.c.violated
    }

    pub fn skipped(&self) -> usize {
        self.a.skipped + self.b.skipped + self.c.skipped
    }
}

/// One row per pair and condition, for CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair: usize,
    pub condition: Condition,
    pub margin: Option<f64>,
    pub status: VerdictStatus,
}

pub fn implication_harness(f: &ScalarField, cfg: &CheckConfig, s: &Sampler) -> Result<HarnessReport> {
    implication_harness_detailed(f, cfg, s).map(|r| r.0)
}

/// Runs (a) over the λ grid, (b) and (c) on every sampled pair and tallies
/// the verdicts. Also returns the per-pair rows.
pub fn implication_harness_detailed(
    f: &ScalarField,
    cfg: &CheckConfig,
    s: &Sampler,
) -> Result<(HarnessReport, Vec<PairRecord>)> {
    cfg.validate()?;
    if s.domain.dim() != f.dim() {
        return Err(Error::usage("sampler domain and field dimension differ"));
    }
    let pairs = sample_pairs(s, cfg.min_sep, cfg.penalty_norm)?;
    let verdicts: Vec<(Verdict, Verdict, Verdict, bool)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let c = check_c(f, x, y, cfg);
            let unexplained = c.is_violated() && !c_violation_explained_by_b(f, x, y, cfg);
            (check_a(f, x, y, cfg), check_b(f, x, y, cfg), c, unexplained)
        })
        .collect();

    let mut report = HarnessReport {
        samples: pairs.len(),
        sigma: cfg.sigma,
        seed: s.seed,
        strategy: s.strategy,
        a: ConditionTally::default(),
        b: ConditionTally::default(),
        c: ConditionTally::default(),
        theorem_tension: 0,
        contrapositive_exceptions: 0,
    };
    let mut records = Vec::with_capacity(3 * pairs.len());
    let mut first_order_violations = 0;
    for (i, (a, b, c, unexplained)) in verdicts.into_iter().enumerate() {
        if b.is_violated() || c.is_violated() {
            first_order_violations += 1;
        }
        report.contrapositive_exceptions += unexplained as usize;
        for (cond, v) in [(Condition::A, &a), (Condition::B, &b), (Condition::C, &c)] {
            records.push(PairRecord { pair: i, condition: cond, margin: v.margin, status: v.status });
        }
        report.a.add(i, a);
        report.b.add(i, b);
        report.c.add(i, c);
    }
    if report.a.violated == 0 {
        report.theorem_tension = first_order_violations;
    }
    Ok((report, records))
}
