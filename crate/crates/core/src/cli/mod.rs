//! Run configuration, command dispatch and JSON reports for the binary.
//!
//! Everything here is usable without the binary: build a [`RunConfig`],
//! call [`run`], serialise the [`Report`].

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditions::{
    check_lemma_refined, dyadic_grid, sigma_star_estimate, CheckConfig, Condition, LemmaReport, SigmaEstimate,
    VerdictStatus,
};
use crate::error::{Error, Result};
use crate::expr::parse;
use crate::field::{catalog_entries, entry, validate_grad, DomainBox, GradReport, KnownStatus, ScalarField};
use crate::search::{
    falsify, implication_harness_detailed, run_campaign, shipped_families, CampaignConfig, CampaignReport,
    FalsificationResult, HarnessReport, PairRecord, Sampler, SearchBudget, Strategy,
};
use crate::vecmath::Norm;

pub const SCHEMA: u32 = 1;

/// Exit status for a completed run with no violations.
pub const EXIT_CLEAN: i32 = 0;
/// Exit status for a completed run that found violations.
pub const EXIT_VIOLATIONS: i32 = 1;
/// Exit status for usage, configuration or I/O failures.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Sigma,
    Falsify,
    Gradcheck,
    Lemma,
    Catalog,
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Command::Check => "check",
            Command::Sigma => "sigma",
            Command::Falsify => "falsify",
            Command::Gradcheck => "gradcheck",
            Command::Lemma => "lemma",
            Command::Catalog => "catalog",
        })
    }
}

/// Everything a run depends on. Mirrors the JSON accepted by `--config`;
/// missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog field name. Exactly one of `field` and `expr` must be set
    /// for commands that need a field.
    pub field: Option<String>,
    pub expr: Option<String>,
    pub dim: Option<usize>,
    /// `lo:hi[,lo:hi...]`; a single interval is broadcast.
    #[serde(rename = "box")]
    pub domain: Option<String>,
    pub sigma: f64,
    pub tol: f64,
    pub min_sep: f64,
    pub lambda_points: usize,
    pub norm: Norm,
    pub strategy: Strategy,
    pub pairs: usize,
    pub seed: u64,
    pub target: Condition,
    pub max_evals: u64,
    pub restarts: usize,
    pub open_question: bool,
    /// Families for the open-question campaign; empty means all shipped.
    pub families: Vec<String>,
    pub members_per_family: usize,
    pub campaign_evals: u64,
    pub grid: usize,
    pub grad_points: usize,
    pub grad_tol: f64,
    /// Fixed finite-difference step; `None` uses 1e-5·max(1, ‖x‖∞).
    pub grad_step: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let check = CheckConfig::default();
        let budget = SearchBudget::default();
        let campaign = CampaignConfig::default();
        Self {
            field: None,
            expr: None,
            dim: None,
            domain: None,
            sigma: 0.0,
            tol: check.tol,
            min_sep: check.min_sep,
            lambda_points: check.lambda_grid.len(),
            norm: Norm::L2,
            strategy: Strategy::UniformBox,
            pairs: 10_000,
            seed: 0,
            target: Condition::A,
            max_evals: budget.max_evals,
            restarts: budget.restarts,
            open_question: false,
            families: Vec::new(),
            members_per_family: campaign.members_per_family,
            campaign_evals: campaign.total_evals,
            grid: 63,
            grad_points: 100,
            grad_tol: 1e-6,
            grad_step: None,
            threads: None,
            out: None,
            csv: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn check_config(&self) -> Result<CheckConfig> {
        if self.lambda_points == 0 {
            return Err(Error::usage("lambda_points must be at least 1"));
        }
        let cfg = CheckConfig {
            sigma: self.sigma,
            tol: self.tol,
            min_sep: self.min_sep,
            lambda_grid: dyadic_grid(self.lambda_points),
            penalty_norm: self.norm,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget { max_evals: self.max_evals, restarts: self.restarts, ..SearchBudget::default() }
    }

    /// Builds the field named by the config, restricted to `box` if given.
    pub fn build_field(&self) -> Result<ScalarField> {
        match (&self.field, &self.expr) {
            (Some(_), Some(_)) => Err(Error::usage("give either a catalog field or an expression, not both")),
            (None, None) => Err(Error::usage("no field given (use --fn NAME or --expr TEXT)")),
            (Some(name), None) => {
                let e = entry(name)?;
                let f = e.build(self.dim.unwrap_or(e.default_dim))?;
                match &self.domain {
                    Some(text) => {
                        let d = DomainBox::parse(text, f.dim())?;
                        f.restricted_to(d)
                    }
                    None => Ok(f),
                }
            }
            (None, Some(text)) => {
                let dim = self.dim.ok_or_else(|| Error::usage("--expr needs --dim"))?;
                if dim == 0 {
                    return Err(Error::usage("dimension must be >= 1"));
                }
                let e = parse(text, dim)?;
                let d = DomainBox::parse(self.domain.as_deref().unwrap_or("-1:1"), dim)?;
                ScalarField::from_expr(e, d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub name: String,
    pub dim: usize,
    #[serde(rename = "box")]
    pub domain: String,
    pub status: KnownStatus,
}

impl FieldInfo {
    fn of(f: &ScalarField) -> Self {
        Self { name: f.name().to_string(), dim: f.dim(), domain: f.domain().to_string(), status: f.status() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogListing {
    pub name: String,
    pub summary: String,
    pub default_dim: usize,
    pub fixed_dim: Option<usize>,
    pub formula: String,
    #[serde(rename = "box")]
    pub domain: String,
    pub status: KnownStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Check(HarnessReport),
    Sigma(SigmaEstimate),
    Falsify(FalsificationResult),
    Campaign(CampaignReport),
    Gradcheck(GradReport),
    Lemma(LemmaReport),
    Catalog(Vec<CatalogListing>),
}

/// Defaults that shape the numbers, spelled out for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub tol: f64,
    pub min_sep: f64,
    pub lambda_grid: String,
    pub penalty_norm: Norm,
    pub fd_step: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub command: Command,
    pub config: RunConfig,
    pub resolved: Resolved,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<FieldInfo>,
    pub payload: Payload,
    pub skipped: usize,
    pub violations: bool,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// Executes `command`, honouring `cfg.threads`. Writes `cfg.out` and
/// `cfg.csv` when set. The exit code is in the report.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    match cfg.threads {
        Some(0) => Err(Error::usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| run_inner(command, cfg)),
        None => run_inner(command, cfg),
    }
}

fn run_inner(command: Command, cfg: &RunConfig) -> Result<Report> {
    if cfg.csv.is_some() && command != Command::Check {
        return Err(Error::usage("--csv is only supported by the check command"));
    }
    let check = cfg.check_config()?;
    let mut field = None;
    let mut skipped = 0;
    let mut records: Option<Vec<PairRecord>> = None;
    let (payload, violations) = match command {
        Command::Catalog => (Payload::Catalog(listing()?), false),
        Command::Check => {
            let f = cfg.build_field()?;
            let s = Sampler::new(cfg.strategy, cfg.seed, cfg.pairs, f.domain().clone());
            let (r, rows) = implication_harness_detailed(&f, &check, &s)?;
            skipped = r.skipped();
            records = Some(rows);
            field = Some(f);
            let v = r.violations() > 0;
            (Payload::Check(r), v)
        }
        Command::Sigma => {
            let f = cfg.build_field()?;
            let s = Sampler::new(cfg.strategy, cfg.seed, cfg.pairs, f.domain().clone());
            let est = sigma_star_estimate(&f, &s, &check)?;
            skipped = est.pairs_skipped;
            field = Some(f);
            let v = est.raw < -check.tol;
            (Payload::Sigma(est), v)
        }
        Command::Falsify if cfg.open_question => {
            let families = select_families(&cfg.families)?;
            let campaign = CampaignConfig {
                members_per_family: cfg.members_per_family,
                budget: cfg.budget(),
                total_evals: cfg.campaign_evals,
                ..CampaignConfig::default()
            };
            let r = run_campaign(&families, &check, &campaign, cfg.seed)?;
            let v = !r.candidates.is_empty();
            (Payload::Campaign(r), v)
        }
        Command::Falsify => {
            let f = cfg.build_field()?;
            let r = falsify(&f, cfg.target, &check, &cfg.budget(), cfg.seed)?;
            field = Some(f);
            let v = r.is_violated();
            (Payload::Falsify(r), v)
        }
        Command::Gradcheck => {
            let f = cfg.build_field()?;
            let r = validate_grad(&f, cfg.seed, cfg.grad_points, cfg.grad_step, cfg.grad_tol)?;
            skipped = r.skipped;
            field = Some(f);
            let v = !r.passed;
            (Payload::Gradcheck(r), v)
        }
        Command::Lemma => {
            let f = cfg.build_field()?;
            if f.dim() != 1 {
                return Err(Error::usage("lemma needs a one-dimensional field"));
            }
            let r = check_lemma_refined(&f, cfg.grid, cfg.grid.saturating_mul(64).saturating_add(63), check.tol)?;
            if r.verdict.status == VerdictStatus::Skipped {
                skipped = 1;
            }
            field = Some(f);
            let v = r.verdict.is_violated();
            (Payload::Lemma(r), v)
        }
    };

    let report = Report {
        schema: SCHEMA,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        command,
        config: cfg.clone(),
        resolved: Resolved {
            tol: check.tol,
            min_sep: check.min_sep,
            lambda_grid: format!("{} dyadic points k/{}", cfg.lambda_points, cfg.lambda_points + 1),
            penalty_norm: check.penalty_norm,
            fd_step: match cfg.grad_step {
                Some(h) => format!("{h:e}"),
                None => "1e-5*max(1,|x|_inf)".to_string(),
            },
        },
        field: field.as_ref().map(FieldInfo::of),
        payload,
        skipped,
        violations,
        exit_code: if violations { EXIT_VIOLATIONS } else { EXIT_CLEAN },
    };

    if let (Some(path), Some(rows)) = (&cfg.csv, &records) {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_csv(rows, std::io::BufWriter::new(file))?;
    }
    if let Some(path) = &cfg.out {
        write_file(path, &(report.to_json() + "\n"))?;
    }
    Ok(report)
}

fn listing() -> Result<Vec<CatalogListing>> {
    catalog_entries()
        .iter()
        .map(|e| {
            let f = e.build(e.default_dim)?;
            Ok(CatalogListing {
                name: e.name.to_string(),
                summary: e.summary.to_string(),
                default_dim: e.default_dim,
                fixed_dim: e.fixed_dim,
                formula: e.formula(e.default_dim),
                domain: f.domain().to_string(),
                status: f.status(),
            })
        })
        .collect()
}

fn select_families(names: &[String]) -> Result<Vec<crate::search::Family>> {
    let all = shipped_families();
    if names.is_empty() {
        return Ok(all);
    }
    names
        .iter()
        .map(|n| {
            all.iter().find(|f| &f.name == n).cloned().ok_or_else(|| {
                let known: Vec<&str> = all.iter().map(|f| f.name.as_str()).collect();
                Error::usage(format!("unknown family '{n}' (available: {})", known.join(", ")))
            })
        })
        .collect()
}

/// `pair,condition,margin,status`, one row per pair and condition; margins
/// are empty for vacuous and skipped rows.
pub fn write_csv<W: std::io::Write>(rows: &[PairRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Human-readable error text; parse errors get the source line and a caret.
pub fn describe_error(err: &Error, cfg: Option<&RunConfig>) -> String {
    let mut msg = format!("error: {err}");
    if let (Error::Parse(p), Some(text)) = (err, cfg.and_then(|c| c.expr.as_deref())) {
        let _ = write!(msg, "\n  {text}\n  {}^", " ".repeat(p.position));
    }
    msg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(field: &str) -> RunConfig {
        RunConfig { field: Some(field.into()), pairs: 500, seed: 7, ..RunConfig::default() }
    }

    #[test]
    fn exactly_one_field_source() {
        let mut c = cfg("sqnorm");
        c.expr = Some("x1".into());
        assert!(matches!(run(Command::Check, &c), Err(Error::Usage(_))));
        assert!(matches!(run(Command::Check, &RunConfig::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn unknown_catalog_name_is_usage_error() {
        assert!(matches!(cfg("nope").build_field(), Err(Error::Usage(_))));
    }

    #[test]
    fn check_exit_codes() {
        let mut c = cfg("sqnorm");
        c.sigma = 2.0;
        assert_eq!(run(Command::Check, &c).unwrap().exit_code, EXIT_CLEAN);
        let c = RunConfig {
            expr: Some("sin(x1)".into()),
            dim: Some(1),
            domain: Some("0:6.2832".into()),
            pairs: 500,
            ..RunConfig::default()
        };
        let r = run(Command::Check, &c).unwrap();
        assert_eq!(r.exit_code, EXIT_VIOLATIONS);
        match r.payload {
            Payload::Check(h) => assert!(h.a.worst_witness.is_some()),
            _ => panic!("wrong payload"),
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = cfg("cubic");
        c.families = vec!["bump_sum".into()];
        c.grad_step = Some(1e-4);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"box\""));
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sigmaa": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"field": "sin"}"#).unwrap();
        assert_eq!(c.pairs, RunConfig::default().pairs);
    }

    #[test]
    fn parse_errors_point_at_the_offset() {
        let c = RunConfig { expr: Some("sin(x1".into()), dim: Some(1), ..RunConfig::default() };
        let err = c.build_field().unwrap_err();
        let msg = describe_error(&err, Some(&c));
        assert!(msg.ends_with("\n  sin(x1\n        ^"), "{msg}");
    }

    #[test]
    fn csv_has_three_rows_per_pair() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut c = cfg("sin");
        c.pairs = 10;
        c.csv = Some(path.clone());
        run(Command::Check, &c).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 31);
        assert!(text.starts_with("pair,condition,margin,status\n0,a,"));
    }

    #[test]
    fn catalog_lists_every_entry() {
        let r = run(Command::Catalog, &RunConfig::default()).unwrap();
        match r.payload {
            Payload::Catalog(l) => assert_eq!(l.len(), catalog_entries().len()),
            _ => panic!("wrong payload"),
        }
        assert_eq!(r.exit_code, EXIT_CLEAN);
    }
}
