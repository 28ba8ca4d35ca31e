//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any fails. Runs without the libtest harness so the lines always show.
//!
//!     cargo test -p quasiconv --test acceptance

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy as _, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use quasiconv::conditions::{
    c_violation_explained_by_b, check_lemma, check_lemma_with, interior_grid, remargin, sigma_star_estimate,
    CheckConfig, Condition,
};
use quasiconv::expr::{parse, pretty_print};
use quasiconv::field::{catalog, catalog_entries, lookup, validate_grad, DomainBox, ScalarField};
use quasiconv::search::{
    falsify, implication_harness, run_campaign, shipped_families, CampaignConfig, FalsificationResult, Sampler,
    SearchBudget, Strategy,
};
use quasiconv::VerdictStatus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Direct segment ratio, written independently of the library.
fn segment_ratio(f: &dyn Fn(&[f64]) -> f64, x: &[f64], y: &[f64], l: f64) -> f64 {
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| l * a + (1.0 - l) * b).collect();
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    2.0 * (f(x).max(f(y)) - f(&mid)) / (l * (1.0 - l) * d2)
}

fn sqnorm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn c1_sigma_recovery() -> Outcome {
    // Oracle: ‖mid‖² = λ‖x‖² + (1−λ)‖y‖² − λ(1−λ)d², so the ratio is 2 plus
    // a non-negative term that vanishes when ‖x‖ = ‖y‖.
    let x = [0.6, -0.8];
    let y = [-0.8, 0.6];
    let oracle_tight = (1..64).map(|k| segment_ratio(&sqnorm, &x, &y, k as f64 / 64.0)).fold(f64::INFINITY, f64::min);
    let mut details = vec![format!("oracle {oracle_tight:.12}")];
    let mut pass = (oracle_tight - 2.0).abs() < 1e-12;
    for n in [1, 2, 5] {
        let f = lookup("sqnorm", n).unwrap();
        let s = Sampler::new(Strategy::UniformBox, 7, 10_000, DomainBox::cube(-1.0, 1.0, n).unwrap());
        let t = Instant::now();
        let est = sigma_star_estimate(&f, &s, &CheckConfig::default()).unwrap();
        let dt = t.elapsed();
        let ok = (est.raw - 2.0).abs() <= 1e-3 && dt < Duration::from_secs(10);
        pass &= ok;
        details.push(format!("n={n}: {:.6} in {:.2}s", est.raw, dt.as_secs_f64()));
    }
    outcome(pass, details.join(", "))
}

fn c2_degenerate_sigma() -> Outcome {
    let cfg = CheckConfig::default();
    let c = lookup("const", 2).unwrap();
    let est_c =
        sigma_star_estimate(&c, &Sampler::new(Strategy::UniformBox, 7, 10_000, c.domain().clone()), &cfg).unwrap();
    let a = lookup("affine", 2).unwrap();
    let est_a =
        sigma_star_estimate(&a, &Sampler::new(Strategy::UniformBox, 7, 10_000, a.domain().clone()), &cfg).unwrap();
    // Oracle: on the level set x1 + 2 x2 = 0 the affine ratio is exactly 0.
    let lin = |x: &[f64]| x[0] + 2.0 * x[1];
    let level = segment_ratio(&lin, &[0.8, -0.4], &[-0.8, 0.4], 0.5);
    let pass = est_c.raw.abs() <= 1e-12 && est_a.raw.abs() <= 1e-9 && level == 0.0;
    outcome(
        pass,
        format!(
            "const {:e}, affine {:e} (sampled {:e}), level-set oracle {level}",
            est_c.raw, est_a.raw, est_a.sampled_min
        ),
    )
}

fn c3_soundness_sweep() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for f in catalog() {
        let Some(sigma) = f.known_sigma() else { continue };
        let cfg = CheckConfig { tol: 1e-8, ..CheckConfig::with_sigma(sigma) };
        let s = Sampler::new(Strategy::UniformBox, 7, 100_000, f.domain().clone());
        let r = implication_harness(&f, &cfg, &s).unwrap();
        let ok = r.violations() == 0 && [&r.a, &r.b, &r.c].iter().all(|t| t.total() == 100_000);
        pass &= ok;
        details.push(format!("{}@{}: {}/{}/{}", f.name(), sigma, r.a.violated, r.b.violated, r.c.violated));
    }
    let dt = start.elapsed();
    pass &= dt < Duration::from_secs(60);
    outcome(pass, format!("{} in {:.1}s", details.join(", "), dt.as_secs_f64()))
}

fn c4_falsification_power() -> Outcome {
    let cfg = CheckConfig::default();
    let sin = lookup("sin", 1).unwrap();
    // Oracle: dense (x, y, λ) grid at 64³.
    let g = |i: usize| 2.0 * PI * i as f64 / 63.0;
    let mut grid_a = f64::INFINITY;
    for i in 0..64 {
        for j in 0..64 {
            if i == j {
                continue;
            }
            for k in 1..64 {
                let l = k as f64 / 64.0;
                let (x, y) = (g(i), g(j));
                let m = x.sin().max(y.sin()) - (l * x + (1.0 - l) * y).sin();
                grid_a = grid_a.min(m);
            }
        }
    }
    let ra = falsify(&sin, Condition::A, &cfg, &SearchBudget::with_evals(10_000), 1).unwrap();
    // Oracle for (b) on x³ − x: grid over pairs.
    let cube = lookup("cubic_minus_x", 1).unwrap();
    let h = |i: usize| -2.0 + 4.0 * i as f64 / 200.0;
    let mut grid_b = f64::INFINITY;
    for i in 0..=200 {
        for j in 0..=200 {
            let (x, y) = (h(i), h(j));
            if i != j && x * x * x - x <= y * y * y - y {
                grid_b = grid_b.min(-(3.0 * y * y - 1.0) * (x - y));
            }
        }
    }
    let rb = falsify(&cube, Condition::B, &cfg, &SearchBudget::with_evals(10_000), 1).unwrap();
    let (ma, mb) = (ra.margin.unwrap(), rb.margin.unwrap());
    let pass = ma <= -0.9 && mb <= -0.5 && ra.evals_used <= 10_000 && rb.evals_used <= 10_000;
    outcome(pass, format!("sin (a) {ma:.6} (grid {grid_a:.6}), x^3-x (b) {mb:.4} (grid {grid_b:.4})"))
}

fn c5_contrapositive() -> Outcome {
    let mut c_violations = 0;
    let mut exceptions = 0;
    let mut record = |f: &ScalarField, cfg: &CheckConfig, r: &FalsificationResult| {
        if r.condition == Condition::C && r.is_violated() {
            c_violations += 1;
            let w = r.witness.as_ref().unwrap();
            if !c_violation_explained_by_b(f, &w.x, &w.y, cfg) || r.explained_by_b != Some(true) {
                exceptions += 1;
            }
        }
    };
    let mut fields: Vec<ScalarField> = catalog();
    fields.extend(catalog_entries().iter().filter(|e| e.fixed_dim.is_none()).map(|e| e.build(3).unwrap()));
    for f in &fields {
        for sigma in [0.0, 0.5, 2.0, 4.0] {
            let cfg = CheckConfig::with_sigma(sigma);
            for seed in 0..3 {
                let r = falsify(f, Condition::C, &cfg, &SearchBudget::with_evals(4_000), seed).unwrap();
                record(f, &cfg, &r);
            }
        }
    }
    for fam in shipped_families() {
        let theta: Vec<f64> = fam.params.upper().to_vec();
        let f = fam.member(&theta).unwrap();
        for sigma in [0.0, 1.0] {
            let cfg = CheckConfig::with_sigma(sigma);
            let r = falsify(&f, Condition::C, &cfg, &SearchBudget::with_evals(4_000), 5).unwrap();
            record(&f, &cfg, &r);
        }
    }
    // Sampled pairs from the harness as well.
    let mut harness_exceptions = 0;
    for name in ["sin", "cubic_minus_x", "sqrt_norm"] {
        let f = lookup(name, entry_dim(name)).unwrap();
        let r = implication_harness(
            &f,
            &CheckConfig::with_sigma(0.3),
            &Sampler::new(Strategy::UniformBox, 3, 20_000, f.domain().clone()),
        )
        .unwrap();
        harness_exceptions += r.contrapositive_exceptions;
        c_violations += r.c.violated;
    }
    let pass = c_violations > 0 && exceptions == 0 && harness_exceptions == 0;
    outcome(
        pass,
        format!("{c_violations} (c) violations, {} without a matching (b) violation", exceptions + harness_exceptions),
    )
}

fn entry_dim(name: &str) -> usize {
    catalog_entries().iter().find(|e| e.name == name).unwrap().default_dim
}

fn c6_gradients() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut count = 0;
    let mut fields = catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let dim = 1 + i % 3;
        let e = common::smooth_expr(&mut rng, dim, 3);
        fields.push(ScalarField::from_expr(e, DomainBox::cube(-1.0, 1.0, dim).unwrap()).unwrap());
    }
    for (i, f) in fields.iter().enumerate() {
        let r = validate_grad(f, i as u64, 100, None, 1e-6).unwrap();
        count += 1;
        worst = worst.max(r.max_abs_deviation);
        if !r.passed || r.points_checked != 100 {
            failures.push(format!("{} ({:e}, {} pts)", f.name(), r.max_abs_deviation, r.points_checked));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{count} fields, worst deviation {worst:e}{}",
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    )
}

fn c7_lemma() -> Outcome {
    let field = |src: &str, lo: f64, hi: f64| {
        ScalarField::from_expr(parse(src, 1).unwrap(), DomainBox::cube(lo, hi, 1).unwrap()).unwrap()
    };
    let cases = [
        ("(x1 - 1)^2", 0.0, 2.0, VerdictStatus::Holds),
        ("x1", 0.0, 1.0, VerdictStatus::Vacuous),
        ("-x1", 0.0, 1.0, VerdictStatus::Holds),
    ];
    let mut pass = true;
    let mut flips = 0;
    let mut details = Vec::new();
    for (src, lo, hi, want) in cases {
        let phi = field(src, lo, hi);
        let grid = interior_grid(lo, hi, 63);
        let got = check_lemma(&phi, &grid, 1e-9).unwrap().status;
        // Mutant: conclusion margin with its sign flipped.
        let mutant = check_lemma_with(&phi, &grid, 1e-9, |fa, fb| fb - fa).unwrap().status;
        flips += (mutant != got) as usize;
        pass &= got == want;
        details.push(format!("{src}: {got:?}"));
    }
    pass &= flips >= 1;
    outcome(pass, format!("{}; mutant flips {flips} verdict(s)", details.join(", ")))
}

fn payload(threads: &str) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_quasiconv"))
        .args(["check", "--fn", "sin", "--pairs", "20000", "--seed", "42", "--threads", threads])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    serde_json::to_string(&v["payload"]).unwrap()
}

fn c8_determinism() -> Outcome {
    let runs: Vec<String> = ["1", "2", "7"].iter().map(|t| payload(t)).collect();
    let pass = runs.windows(2).all(|w| w[0] == w[1]) && runs[0].len() > 100;
    outcome(pass, format!("threads 1/2/7, payload {} bytes", runs[0].len()))
}

fn c9_parser() -> Outcome {
    let corpus = common::corpus();
    let failures: Vec<String> =
        corpus.iter().filter_map(|(s, d, p, w)| common::check_case(s, *d, *p, w).err()).collect();
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = common::any_expr(3);
    let mut round_trips = 0;
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let e = strategy.new_tree(&mut runner).unwrap().current();
        let printed = pretty_print(&e);
        match parse(&printed, 3) {
            Ok(back) if back == e => round_trips += 1,
            other => bad.push(format!("{printed} -> {other:?}")),
        }
    }
    let pass = corpus.len() >= 40 && failures.is_empty() && round_trips == 1000;
    let mut detail =
        format!("{}/{} corpus cases, {round_trips}/1000 round trips", corpus.len() - failures.len(), corpus.len());
    if let Some(f) = failures.first().or(bad.first()) {
        detail.push_str(&format!("; first failure {f}"));
    }
    outcome(pass, detail)
}

fn c10_campaign() -> Outcome {
    let families = shipped_families();
    let mut total = 0;
    let mut pass = true;
    let mut details = Vec::new();
    // Half the budget at σ = 0, half at σ = 0.5.
    for sigma in [0.0, 0.5] {
        let cfg = CheckConfig::with_sigma(sigma);
        let campaign = CampaignConfig { total_evals: 500_000, ..CampaignConfig::default() };
        let r = run_campaign(&families, &cfg, &campaign, 2024).unwrap();
        total += r.evals_used;
        for c in &r.candidates {
            let fam = families.iter().find(|f| f.name == c.family).unwrap();
            let f = fam.member(&c.theta).unwrap();
            let again = remargin(&f, Condition::A, &c.a_witness, &cfg).unwrap().unwrap();
            let verified = c.verify_a_margin <= -10.0 * cfg.tol
                && c.verify_c_margin.map_or(true, |m| m >= -cfg.tol)
                && (again - c.a_margin).abs() <= 1e-10;
            pass &= verified;
            println!(
                "    candidate: {} theta={:?} a-margin {:e} (sigma {sigma}, re-verified)",
                c.family, c.theta, c.a_margin
            );
        }
        let tested: usize = r.families.iter().map(|f| f.members_tested).sum();
        let c_viol: usize = r.families.iter().map(|f| f.c_violations).sum();
        let rejected: usize = r.families.iter().map(|f| f.rejected).sum();
        details.push(format!(
            "sigma {sigma}: {tested} members, {c_viol} with (c) violations, {} candidates, {rejected} rejected",
            r.candidates.len()
        ));
    }
    pass &= total <= 1_000_000;
    outcome(pass, format!("{}; {total} evals", details.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sigma* recovery on |x|^2", c1_sigma_recovery),
        ("degenerate sigma* (const, affine)", c2_degenerate_sigma),
        ("soundness sweep over the catalog", c3_soundness_sweep),
        ("falsification power", c4_falsification_power),
        ("(c) violations imply (b) violations", c5_contrapositive),
        ("dual gradients vs central differences", c6_gradients),
        ("lemma checker and mutation", c7_lemma),
        ("thread-count determinism", c8_determinism),
        ("parser corpus and round trip", c9_parser),
        ("open-question campaign", c10_campaign),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
