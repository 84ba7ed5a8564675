//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use acyclic_core::census::TreeCensus;
use acyclic_core::coloring::{parse_gamma, safe_set_floor, ColorConfig};
use acyclic_core::corpus;
use acyclic_core::graph::{Cycle, Graph};
use acyclic_core::radius::{certify, RadiusCertificate, RESIDUAL_TOL};
use acyclic_core::recolor::{
    check_witness, run_many, RunOptions, RunStats, WitnessForest, WitnessViolation,
};
use acyclic_core::series::{dominance_suite, series_b, solve_t};
use acyclic_core::validator::{
    admissible_triples, decay_threshold, monte_carlo, AdmissibleSequence, AdmissibleTriple,
    ValidationReport,
};
use acyclic_core::verify;
use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

const GAMMA: &str = "1.142";
const SEEDS_PER_GRAPH: u64 = 100;
const CAP: u64 = 1_000_000;
const COLOR_BUDGET: Duration = Duration::from_secs(30);
const CERTIFY_BUDGET: Duration = Duration::from_secs(60);
const CERT_ORDER: usize = 100;
const CENSUS_MAX: usize = 25;
const CATALAN_MAX: usize = 49;
const DOMINANCE_ORDER: usize = 100;
const MIN_ASSIGNMENTS: u64 = 100_000;
const VALIDATION_TRIALS: u64 = 100_000;
const VALIDATION_SEED: u64 = 2024;
const MIN_INSTRUMENTED_CALLS: u64 = 10_000;
const CHECK_LO: i64 = 6677;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, out: &Outcome) {
    let tag = if out.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} {name}: {}", out.detail);
}

fn gamma() -> Rational64 {
    parse_gamma(GAMMA).expect("default gamma")
}

/// Criteria 1 and 9 share the corpus runs.
fn corpus_runs() -> (Outcome, Vec<(String, Graph, Vec<RunStats>)>) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut runs = Vec::new();
    let mut total = 0;
    for (name, g) in corpus::all() {
        let cfg = ColorConfig::new(&g, gamma(), None, 0).expect("corpus config");
        let opts = RunOptions {
            cap: CAP,
            check_progress: false,
        };
        let results = run_many(&g, &cfg, 0..SEEDS_PER_GRAPH, opts).expect("corpus runs");
        let mut stats = Vec::new();
        for (col, st) in results {
            let v = verify(&g, &col);
            total += 1;
            if !(st.halted && v.proper && v.four_acyclic && v.acyclic) {
                failures.push(format!("{name} seed {}", st.seed));
            }
            stats.push(st);
        }
        runs.push((name.to_string(), g, stats));
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < COLOR_BUDGET;
    let detail =
        format!(
        "{}/{total} runs halted with proper, 4-acyclic, acyclic colorings in {:.2}s (budget {}s){}",
        total - failures.len(),
        elapsed.as_secs_f64(),
        COLOR_BUDGET.as_secs(),
        if failures.is_empty() { String::new() } else { format!("; failed: {failures:?}") }
    );
    (Outcome { pass, detail }, runs)
}

fn radius() -> (Outcome, Option<RadiusCertificate>) {
    let start = Instant::now();
    let cert = certify(CERT_ORDER);
    let elapsed = start.elapsed();
    match cert {
        Ok(c) => {
            let lo = (c.rho_lo * 1e4).floor() as i64;
            let hi = (c.rho_hi * 1e4).ceil() as i64;
            let pass = lo >= CHECK_LO
                && hi <= CHECK_LO + 1
                && c.max_residual() <= RESIDUAL_TOL
                && elapsed < CERTIFY_BUDGET;
            let detail = format!(
                "N={} rho in [{:.10}, {:.10}] -> [{}, {}] outward, max residual {:.1e}, {:.2}s",
                c.order,
                c.rho_lo,
                c.rho_hi,
                lo as f64 / 1e4,
                hi as f64 / 1e4,
                c.max_residual(),
                elapsed.as_secs_f64()
            );
            (Outcome { pass, detail }, Some(c))
        }
        Err(e) => (
            Outcome {
                pass: false,
                detail: e.to_string(),
            },
            None,
        ),
    }
}

fn to_integer(q: &BigRational) -> Option<BigUint> {
    q.is_integer()
        .then(|| q.to_integer().to_biguint())
        .flatten()
}

fn oracle_equivalence() -> Outcome {
    let t = solve_t(CENSUS_MAX);
    let census = TreeCensus::new(CENSUS_MAX);
    let mut bad = Vec::new();
    for n in 1..=CENSUS_MAX {
        let counted = census.count_trees(n).expect("within limit");
        if to_integer(t.coeff(n)) != Some(counted.clone()) || (n % 2 == 0 && !counted.is_zero()) {
            bad.push(n);
        }
    }
    let detail = format!(
        "[z^n]T = count_trees(n) for n in 1..={CENSUS_MAX}, even terms zero; mismatches {bad:?}"
    );
    Outcome {
        pass: bad.is_empty(),
        detail,
    }
}

fn catalan(n: usize) -> BigUint {
    // C_n = binom(2n, n) / (n + 1) by the product formula
    let mut c = BigUint::one();
    for i in 0..n {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

fn catalan_check() -> Outcome {
    let b = series_b(2 * CATALAN_MAX + 1);
    let bad: Vec<usize> = (0..=CATALAN_MAX)
        .filter(|&n| to_integer(b.coeff(2 * n + 1)) != Some(catalan(n)))
        .collect();
    Outcome {
        pass: bad.is_empty(),
        detail: format!("[z^(2n+1)]B = Catalan(n) for n <= {CATALAN_MAX}; mismatches {bad:?}"),
    }
}

fn dominance() -> Outcome {
    let rep = dominance_suite(DOMINANCE_ORDER);
    let detail = format!(
        "T <= C <= B coefficient-wise to order {DOMINANCE_ORDER}: {} failures; B - C - C^3/(1-C^2) vanishes: {}",
        rep.failures.len(),
        rep.identity_holds
    );
    Outcome {
        pass: rep.passed(),
        detail,
    }
}

fn safe_set_sizes() -> Outcome {
    let mut assignments = 0u64;
    let mut violations = Vec::new();
    let mut round = 0u64;
    while assignments < MIN_ASSIGNMENTS {
        for (name, g) in corpus::all() {
            let cfg = ColorConfig::new(&g, gamma(), None, 0).expect("corpus config");
            let floor = safe_set_floor(gamma(), g.max_degree());
            let seeds = round * 1000..(round + 1) * 1000;
            for (_, st) in run_many(&g, &cfg, seeds, RunOptions::default()).expect("runs") {
                assignments += st.assignments;
                if Rational64::from_integer(st.min_safe_set as i64) < floor {
                    violations.push(format!("{name} seed {}: {}", st.seed, st.min_safe_set));
                }
            }
        }
        round += 1;
    }
    let detail = format!(
        "{assignments} assignments, safe set always >= gamma(delta-1)+1; {} violations",
        violations.len()
    );
    Outcome {
        pass: violations.is_empty(),
        detail,
    }
}

fn validation_suite() -> (Outcome, Vec<ValidationReport>) {
    let pick = |g: &Graph, k: usize, i: usize| -> AdmissibleTriple {
        let all = admissible_triples(g, k);
        all[i % all.len()]
    };
    let q3 = corpus::hypercube(3);
    let k6 = corpus::complete(6);
    let pet = corpus::petersen();
    let cubic = corpus::by_name("cubic10-a").expect("bundled");
    let suite: Vec<(&str, &Graph, AdmissibleSequence)> = vec![
        ("Q3", &q3, AdmissibleSequence::new(vec![pick(&q3, 3, 0)])),
        ("Q3", &q3, AdmissibleSequence::new(vec![pick(&q3, 4, 0)])),
        ("K6", &k6, AdmissibleSequence::new(vec![pick(&k6, 3, 0)])),
        (
            "K6",
            &k6,
            AdmissibleSequence::new(vec![pick(&k6, 3, 0), pick(&k6, 3, 7)]),
        ),
        (
            "petersen",
            &pet,
            AdmissibleSequence::new(vec![pick(&pet, 3, 0)]),
        ),
        (
            "petersen",
            &pet,
            AdmissibleSequence::new(vec![pick(&pet, 4, 3), pick(&pet, 3, 5), pick(&pet, 3, 11)]),
        ),
        (
            "cubic10-a",
            &cubic,
            AdmissibleSequence::new(vec![pick(&cubic, 4, 1)]),
        ),
    ];
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for (name, g, seq) in suite {
        let cfg = ColorConfig::new(g, gamma(), None, 0).expect("config");
        let r = monte_carlo(g, &seq, &cfg, VALIDATION_TRIALS, VALIDATION_SEED).expect("validation");
        lines.push(format!(
            "{name} k={:?}: {:.5} vs relaxed {:.5} (+3sd {:.5}), exact {:.5}",
            r.k_list,
            r.empirical,
            r.bound_relaxed,
            r.bound_relaxed + 3.0 * r.sigma,
            r.bound_exact
        ));
        reports.push(r);
    }
    let pass = reports.len() >= 5
        && reports
            .iter()
            .all(|r| r.pass && r.s <= 3 && r.k_list.iter().all(|&k| k <= 4));
    let detail = format!(
        "{} sequences x {VALIDATION_TRIALS} trials; {}",
        reports.len(),
        lines.join("; ")
    );
    (Outcome { pass, detail }, reports)
}

fn progress() -> Outcome {
    let mut calls = 0u64;
    let mut checks = 0u64;
    let mut violations = 0u64;
    let graphs = [
        corpus::complete(4),
        corpus::hypercube(3),
        corpus::petersen(),
        corpus::complete(5),
    ];
    let mut round = 0u64;
    while calls < MIN_INSTRUMENTED_CALLS {
        for g in &graphs {
            // the least palette that can never run out of safe colors
            let palette = 2 * (g.max_degree() - 1) + 1;
            let cfg = ColorConfig {
                gamma: Rational64::one(),
                palette_size: palette,
                rng_seed: 0,
            };
            let opts = RunOptions {
                cap: 20_000,
                check_progress: true,
            };
            for (_, st) in run_many(g, &cfg, round * 200..(round + 1) * 200, opts).expect("runs") {
                calls += st.recolor_calls;
                checks += st.progress_checks;
                violations += st.progress_violations;
            }
        }
        round += 1;
    }
    let detail = format!(
        "{calls} instrumented Recolor calls, {checks} post-return checks, {violations} violations"
    );
    Outcome {
        pass: violations == 0 && calls >= MIN_INSTRUMENTED_CALLS,
        detail,
    }
}

fn witness(runs: &[(String, Graph, Vec<RunStats>)]) -> Outcome {
    let mut forests = 0;
    let mut dirty = Vec::new();
    for (name, g, stats) in runs {
        for st in stats {
            forests += 1;
            if !check_witness(&st.forest, g).is_empty() {
                dirty.push(format!("{name} seed {}", st.seed));
            }
        }
    }
    let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).expect("6-cycle");
    let c = Cycle::from_vertices(&g, &[0, 1, 2, 3, 4, 5]).expect("cycle");

    let mut roots = WitnessForest::new();
    roots.add_root(0, c.clone());
    roots.add_root(2, c.clone());
    let mut siblings = WitnessForest::new();
    let r = siblings.add_root(0, c.clone());
    siblings.add_child(r, 1, c.clone());
    siblings.add_child(r, 2, c.clone());
    let mut outside = WitnessForest::new();
    let r = outside.add_root(0, c.clone());
    outside.add_child(r, 4, c);

    let caught = [
        matches!(
            check_witness(&roots, &g)[..],
            [WitnessViolation::RootScopesOverlap { .. }]
        ),
        matches!(
            check_witness(&siblings, &g)[..],
            [WitnessViolation::ChildCyclesOverlap { .. }]
        ),
        matches!(
            check_witness(&outside, &g)[..],
            [WitnessViolation::ChildOutsideScope { .. }]
        ),
    ];
    let detail = format!(
        "{} of {forests} corpus forests clean; counterexamples caught (roots, siblings, scope) = {caught:?}",
        forests - dirty.len()
    );
    Outcome {
        pass: dirty.is_empty() && caught.iter().all(|&c| c),
        detail,
    }
}

fn threshold(cert: Option<&RadiusCertificate>) -> Outcome {
    let t = decay_threshold(1.142);
    let t_up = (t * 1e4).ceil() as i64;
    let Some(cert) = cert else {
        return Outcome {
            pass: false,
            detail: "no radius certificate".into(),
        };
    };
    let lo_down = (cert.rho_lo * 1e4).floor() as i64;
    // strict: the threshold rounded up stays below 0.6677
    let pass = t_up < CHECK_LO && CHECK_LO <= lo_down;
    let detail = format!(
        "decay_threshold(1.142) = {t:.10} (up: {}) < 0.6677 <= rho_lo = {:.10} (down: {})",
        t_up as f64 / 1e4,
        cert.rho_lo,
        lo_down as f64 / 1e4
    );
    Outcome { pass, detail }
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut record = |id: usize, name: &str, out: Outcome| {
        report(id, name, &out);
        all_pass &= out.pass;
    };

    let (c1, runs) = corpus_runs();
    record(1, "corpus colorings", c1);
    let (c2, cert) = radius();
    record(2, "radius certificate", c2);
    record(3, "tree census oracle", oracle_equivalence());
    record(4, "Catalan coefficients", catalan_check());
    record(5, "series dominance", dominance());
    record(6, "safe set size", safe_set_sizes());
    let (c7, _) = validation_suite();
    record(7, "validation bounds", c7);
    record(8, "progress after return", progress());
    record(9, "witness forest structure", witness(&runs));
    record(10, "threshold below radius", threshold(cert.as_ref()));

    if all_pass {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
