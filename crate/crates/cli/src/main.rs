//! `acyclic`: command-line front end for the coloring, validation, counting
//! and certification workflows.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use acyclic_core::census::{TreeCensus, DEFAULT_LIMIT};
use acyclic_core::coloring::{parse_gamma, verify, ColorConfig, EdgeColoring, DEFAULT_GAMMA};
use acyclic_core::corpus;
use acyclic_core::graph::{load_graph, Graph};
use acyclic_core::radius::{certify, RHO_CHECK, RHO_HAT};
use acyclic_core::recolor::{decay_histogram, edge_color, RunOptions, DEFAULT_CAP};
use acyclic_core::series::{series_b, series_c, solve_t, RationalSeries, DEFAULT_ORDER};
use acyclic_core::validator::{
    admissible_triples, monte_carlo, AdmissibleSequence, AdmissibleTriple, DEFAULT_TRIALS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

/// Environment variable holding the worker count for parallel commands.
const WORKERS_ENV: &str = "ACYCLIC_WORKERS";
/// Order at which `certify` asserts the interval [0.6677, 0.6678].
const CHECKED_ORDER: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "acyclic",
    version,
    about = "Randomized acyclic edge coloring and tree-counting toolkit"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Log progress to stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Graph file: edge list or DIMACS.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    graph: Option<PathBuf>,
    /// Name of a bundled graph (see `acyclic corpus`).
    #[arg(long)]
    corpus: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct PaletteArgs {
    #[arg(long, default_value = DEFAULT_GAMMA)]
    gamma: String,
    /// Palette size; defaults to ceil((2 + gamma)(delta - 1)) + 1.
    #[arg(long)]
    palette: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Color a graph and verify the result.
    Color {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        palette: PaletteArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Include the full witness forest in JSON output.
        #[arg(long)]
        forest: bool,
    },
    /// Check a coloring file against a graph.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Coloring JSON as written by `color --json`, or its `coloring` array.
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Monte Carlo check of validation success rates against their bounds.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        palette: PaletteArgs,
        /// Sequence of `e1:e2:k` triples separated by commas; repeatable.
        /// Defaults to one single-triple sequence for each of k = 3, 4.
        #[arg(long = "sequence")]
        sequences: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Count unordered trees with even internal outdegrees >= 4.
    Census {
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        max_n: usize,
    },
    /// Coefficients of a generating function.
    Gf {
        #[arg(long, value_enum, ignore_case = true)]
        series: SeriesName,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Bound the radius of convergence of T.
    Certify {
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Histogram of witness-forest sizes over many seeds.
    Experiment {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        palette: PaletteArgs,
        /// Number of seeds, starting at `--seed`.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// List the bundled graphs.
    Corpus,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SeriesName {
    T,
    B,
    C,
}

/// A failed run: usage problems exit 2, failed assertions exit 1.
enum Failure {
    Usage(String),
    Assertion(Value),
}

struct Report {
    json: Value,
    text: String,
    ok: bool,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn log(level: u8, verbosity: u8, msg: impl FnOnce() -> String) {
    if verbosity >= level {
        eprintln!("{}", msg());
    }
}

fn load(args: &GraphArgs) -> Result<(String, Graph), Failure> {
    match (&args.graph, &args.corpus) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let g = load_graph(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), g))
        }
        (None, Some(name)) => corpus::by_name(name)
            .map(|g| (name.clone(), g))
            .ok_or_else(|| {
                usage(format!(
                    "unknown corpus graph {name:?}; known: {}",
                    corpus::NAMES.join(", ")
                ))
            }),
        (None, None) => Err(usage("one of --graph or --corpus is required")),
    }
}

fn config(g: &Graph, args: &PaletteArgs, seed: u64) -> Result<ColorConfig, Failure> {
    let gamma: Rational64 = parse_gamma(&args.gamma).map_err(usage)?;
    ColorConfig::new(g, gamma, args.palette, seed).map_err(usage)
}

fn parse_sequence(g: &Graph, text: &str) -> Result<AdmissibleSequence, Failure> {
    let mut triples = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        let [e1, e2, k] = fields[..] else {
            return Err(usage(format!("triple {part:?} is not e1:e2:k")));
        };
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| usage(format!("bad number {s:?} in {part:?}")))
        };
        triples.push(AdmissibleTriple::new(g, num(e1)?, num(e2)?, num(k)?).map_err(usage)?);
    }
    Ok(AdmissibleSequence::new(triples))
}

fn coeff_text(q: &num_rational::BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        q.to_string()
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let v = cli.verbose;
    match &cli.command {
        Command::Color {
            graph,
            palette,
            seed,
            cap,
            forest,
        } => {
            let (name, g) = load(graph)?;
            let cfg = config(&g, palette, *seed)?;
            log(1, v, || {
                format!(
                    "coloring {name} with {} colors, seed {seed}",
                    cfg.palette_size
                )
            });
            let (col, stats) = edge_color(
                &g,
                &cfg,
                RunOptions {
                    cap: *cap,
                    check_progress: false,
                },
            )
            .map_err(usage)?;
            let report = verify(&g, &col);
            let ok = stats.halted && report.acyclic;
            let mut json = json!({
                "graph": name,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "max_degree": g.max_degree(),
                "gamma": palette.gamma,
                "palette": cfg.palette_size,
                "coloring": col.to_json(&g),
                "stats": stats.to_json(),
                "verify": report,
            });
            if *forest {
                json["forest"] = stats.forest.to_nested_json();
            }
            let mut text = format!(
                "{name}: {} edges, {} colors, seed {seed}: {} Recolor calls, halted {}, acyclic {}\n",
                g.edge_count(),
                cfg.palette_size,
                stats.recolor_calls,
                stats.halted,
                report.acyclic
            );
            for e in 0..g.edge_count() {
                let (a, b) = g.edge_labels(e);
                let c = col.get(e).map_or("-".to_string(), |c| c.to_string());
                let _ = writeln!(text, "{a} {b} {c}");
            }
            Ok(Report { json, text, ok })
        }
        Command::Verify { graph, coloring } => {
            let (name, g) = load(graph)?;
            let raw = std::fs::read_to_string(coloring)
                .map_err(|e| usage(format!("{}: {e}", coloring.display())))?;
            let value: Value = serde_json::from_str(&raw)
                .map_err(|e| usage(format!("{}: {e}", coloring.display())))?;
            let entries = value.get("coloring").unwrap_or(&value);
            let col = EdgeColoring::from_json(&g, entries).map_err(usage)?;
            let report = verify(&g, &col);
            let text = format!(
                "{name}: proper {}, 4-acyclic {}, acyclic {}{}\n",
                report.proper,
                report.four_acyclic,
                report.acyclic,
                report.witness.as_ref().map_or(String::new(), |w| format!(
                    ", witness {}",
                    serde_json::to_string(w).unwrap_or_default()
                ))
            );
            let ok = report.acyclic;
            Ok(Report {
                json: serde_json::to_value(&report).expect("plain data"),
                text,
                ok,
            })
        }
        Command::Validate {
            graph,
            palette,
            sequences,
            trials,
            seed,
        } => {
            let (name, g) = load(graph)?;
            let cfg = config(&g, palette, *seed)?;
            let seqs: Vec<AdmissibleSequence> = if sequences.is_empty() {
                (3..=4)
                    .filter_map(|k| admissible_triples(&g, k).first().copied())
                    .map(|t| AdmissibleSequence::new(vec![t]))
                    .collect()
            } else {
                sequences
                    .iter()
                    .map(|s| parse_sequence(&g, s))
                    .collect::<Result<_, _>>()?
            };
            if seqs.is_empty() {
                return Err(usage(format!(
                    "{name} has no 6- or 8-cycles to validate on"
                )));
            }
            let mut reports = Vec::new();
            let mut text = String::new();
            for seq in &seqs {
                log(1, v, || {
                    format!("validating {:?} over {trials} trials", seq.triples)
                });
                let r = monte_carlo(&g, seq, &cfg, *trials, *seed).map_err(usage)?;
                let _ = writeln!(
                    text,
                    "s={} k={:?} exact={:.6e} relaxed={:.6e} empirical={:.6e} trials={} pass={}",
                    r.s, r.k_list, r.bound_exact, r.bound_relaxed, r.empirical, r.trials, r.pass
                );
                reports.push(r);
            }
            let ok = reports.iter().all(|r| r.pass);
            let json = json!({
                "graph": name,
                "palette": cfg.palette_size,
                "seed": seed,
                "reports": reports,
            });
            Ok(Report { json, text, ok })
        }
        Command::Census { max_n } => {
            let census = TreeCensus::new(*max_n);
            let mut rows = Vec::new();
            let mut text = String::new();
            for n in 1..=*max_n {
                let count = census.count_trees(n).map_err(usage)?;
                let _ = writeln!(text, "{n}\t{count}");
                rows.push(json!({ "n": n, "count": count.to_string() }));
            }
            Ok(Report {
                json: json!({ "max_n": max_n, "counts": rows }),
                text,
                ok: true,
            })
        }
        Command::Gf { series, order } => {
            let s: RationalSeries = match series {
                SeriesName::T => solve_t(*order),
                SeriesName::B => series_b(*order),
                SeriesName::C => series_c(*order),
            };
            let coeffs: Vec<String> = (0..=*order).map(|n| coeff_text(s.coeff(n))).collect();
            let mut text = String::new();
            for (n, c) in coeffs.iter().enumerate().skip(1) {
                let _ = writeln!(text, "{n}\t{c}");
            }
            let name = format!("{series:?}");
            Ok(Report {
                json: json!({ "series": name, "order": order, "coefficients": coeffs }),
                text,
                ok: true,
            })
        }
        Command::Certify { order } => {
            log(1, v, || {
                format!("solving both characteristic systems at order {order}")
            });
            let cert = certify(*order).map_err(|e| match e {
                acyclic_core::radius::RadiusError::BadOrder(_) => usage(e),
                other => Failure::Assertion(json!({ "error": other.to_string() })),
            })?;
            let within = cert.within(RHO_CHECK, RHO_HAT);
            let ok = *order != CHECKED_ORDER || (within && cert.max_residual() <= 1e-10);
            let mut json = serde_json::to_value(&cert).expect("plain data");
            json["within"] = json!(within);
            let text = format!(
                "N={order}: rho in [{:.10}, {:.10}], outward [{:.4}, {:.4}], residuals <= {:.1e}, within [{RHO_CHECK}, {RHO_HAT}]: {within}\n",
                cert.rho_lo,
                cert.rho_hi,
                cert.lo_rounded_down(),
                cert.hi_rounded_up(),
                cert.max_residual()
            );
            Ok(Report { json, text, ok })
        }
        Command::Experiment {
            graph,
            palette,
            trials,
            seed,
            cap,
        } => {
            let (name, g) = load(graph)?;
            let cfg = config(&g, palette, *seed)?;
            log(1, v, || format!("running {trials} seeds on {name}"));
            let opts = RunOptions {
                cap: *cap,
                check_progress: false,
            };
            let rows = decay_histogram(&g, &cfg, *seed..seed + trials, opts).map_err(usage)?;
            let mut text =
                String::from("n_internal\tcount\tat_least\tfreq_at_least\tlog_freq_at_least\n");
            for r in &rows {
                let _ = writeln!(
                    text,
                    "{}\t{}\t{}\t{:.6}\t{:.6}",
                    r.n_internal, r.count, r.at_least, r.freq_at_least, r.log_freq_at_least
                );
            }
            let json = json!({
                "graph": name,
                "palette": cfg.palette_size,
                "runs": trials,
                "rows": rows,
            });
            Ok(Report {
                json,
                text,
                ok: true,
            })
        }
        Command::Corpus => {
            let mut text = String::new();
            let mut list = Vec::new();
            for (name, g) in corpus::all() {
                let _ = writeln!(
                    text,
                    "{name}\t{}\t{}\t{}",
                    g.vertex_count(),
                    g.edge_count(),
                    g.max_degree()
                );
                list.push(json!({
                    "name": name,
                    "vertices": g.vertex_count(),
                    "edges": g.edge_count(),
                    "max_degree": g.max_degree(),
                }));
            }
            Ok(Report {
                json: Value::Array(list),
                text,
                ok: true,
            })
        }
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{WORKERS_ENV}={raw:?} is not a number"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("plain data")
                );
            } else {
                print!("{}", report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Assertion(diag)) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&diag).expect("plain data")
                );
            } else {
                eprintln!("assertion failed: {diag}");
            }
            ExitCode::from(1)
        }
    }
}
