//! Seeded pair sampling, adversarial falsification, the implication
//! harness and the open-question campaign.

pub mod ascent;
mod falsify;
mod harness;
mod open_question;
pub mod sampler;

pub use falsify::{falsify, FalsificationResult, SearchBudget};
pub use harness::{implication_harness, implication_harness_detailed, ConditionTally, HarnessReport, PairRecord};
pub use open_question::{
    open_question_search, run_campaign, shipped_families, CampaignConfig, CampaignReport, Candidate, Family,
    FamilyReport,
};
pub use sampler::{sample_pairs, Sampler, Strategy};
