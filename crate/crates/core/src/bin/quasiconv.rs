use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quasiconv::cli::{describe_error, run, Command, RunConfig, EXIT_USAGE};
use quasiconv::search::Strategy;
use quasiconv::{Condition, Norm};

/// Numerically test quasiconvexity and strong quasiconvexity of functions
/// on boxes. Exit status: 0 no violations, 1 violations found, 2 usage or
/// configuration error.
#[derive(Parser)]
#[command(name = "quasiconv", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tally conditions (a), (b), (c) over sampled pairs.
    Check(Flags),
    /// Estimate the largest admissible sigma on the box.
    Sigma(Flags),
    /// Search for a violating witness, or run the open-question campaign.
    Falsify(Flags),
    /// Compare gradients against central differences.
    Gradcheck(Flags),
    /// Check the one-dimensional monotonicity lemma on [a, b].
    Lemma(Flags),
    /// List built-in fields.
    Catalog(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// JSON run config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog field name.
    #[arg(long = "fn", value_name = "NAME")]
    field: Option<String>,
    /// Expression in x1..xn.
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// lo:hi[,lo:hi...]; a single interval is broadcast.
    #[arg(long = "box", value_name = "SPEC", allow_hyphen_values = true)]
    domain: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    min_sep: Option<f64>,
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Penalty norm: 1, 2 or inf.
    #[arg(long)]
    norm: Option<Norm>,
    /// uniform_box, gaussian_interior or segment_grid.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Condition to falsify: a, b or c.
    #[arg(long)]
    target: Option<Condition>,
    #[arg(long)]
    max_evals: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Run the (c)-but-not-(a) campaign over the shipped families.
    #[arg(long)]
    open_question: bool,
    /// Restrict the campaign to these families (repeatable).
    #[arg(long = "family")]
    families: Vec<String>,
    #[arg(long)]
    members_per_family: Option<usize>,
    #[arg(long)]
    campaign_evals: Option<u64>,
    /// Initial lemma grid size.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    grad_points: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    grad_step: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pair margins as CSV (check only).
    #[arg(long)]
    csv: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:expr, $($name:ident),*) => {
        $( if let Some(v) = $flags.$name { $cfg.$name = v; } )*
    };
}

impl Flags {
    fn resolve(self) -> quasiconv::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        // A source given on the command line replaces the file's source.
        if self.field.is_some() || self.expr.is_some() {
            cfg.field = self.field;
            cfg.expr = self.expr;
        }
        if self.dim.is_some() {
            cfg.dim = self.dim;
        }
        if self.domain.is_some() {
            cfg.domain = self.domain;
        }
        if self.grad_step.is_some() {
            cfg.grad_step = self.grad_step;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.csv.is_some() {
            cfg.csv = self.csv;
        }
        if self.open_question {
            cfg.open_question = true;
        }
        if !self.families.is_empty() {
            cfg.families = self.families;
        }
        overlay!(
            cfg,
            self,
            sigma,
            tol,
            min_sep,
            lambda_points,
            norm,
            strategy,
            pairs,
            seed,
            target,
            max_evals,
            restarts,
            members_per_family,
            campaign_evals,
            grid,
            grad_points,
            grad_tol
        );
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (command, flags) = match cli.command {
        Cmd::Check(f) => (Command::Check, f),
        Cmd::Sigma(f) => (Command::Sigma, f),
        Cmd::Falsify(f) => (Command::Falsify, f),
        Cmd::Gradcheck(f) => (Command::Gradcheck, f),
        Cmd::Lemma(f) => (Command::Lemma, f),
        Cmd::Catalog(f) => (Command::Catalog, f),
    };
    let cfg = match flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", describe_error(&e, None));
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(command, &cfg) {
        Ok(report) => {
            if cfg.out.is_none() {
                // A closed pipe is not an error worth reporting.
                let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{}", describe_error(&e, Some(&cfg)));
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
