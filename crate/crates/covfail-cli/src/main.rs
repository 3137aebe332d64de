//! Command-line front end for the coverage-criterion toolkit.
//!
//! Exit codes: 0 for pass/success, 1 when the result itself is a criterion
//! failure (a failing `check`, a `monitor` stream that dies), 2 for usage,
//! parse, and internal errors.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use covfail::complex::{build_rips_2skeleton, Edge, SimplicialComplex2};
use covfail::deathsets::{brute_force_death_sets, cake_or_death, DeathSetOptions};
use covfail::monitor::{init_monitor, replay, MonitorStatus};
use covfail::persistence::{
    build_boundary_matrix, check_criterion, criterion_oracle, homology_ranks, reduce,
};
use covfail::probability::{
    prob_failure_bruteforce, prob_failure_exact, prob_failure_mc, Distribution, FailureCurve,
    FailureModel,
};

use covfail_cli::coverage::ConvexPolygon;
use covfail_cli::generator::{generate, GeneratorSpec};
use covfail_cli::graphfile::{emit_graph, parse_events, parse_graph};

const DEFAULT_BUDGET: usize = 1_000_000;
const BRUTE_INTERIOR_CAP: usize = 14;
const BRUTE_PROB_CAP: usize = 20;

#[derive(Parser)]
#[command(
    name = "covfail",
    version,
    about = "Coverage-criterion checks for fenced sensor networks, from connectivity data alone"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the coverage criterion on a graph file
    Check {
        /// Graph file (format=1)
        graph: PathBuf,
        /// Cross-check the verdict against an independent linear-system solve
        #[arg(long)]
        verify: bool,
    },
    /// Enumerate the minimal sensor sets whose loss breaks coverage
    Deathsets {
        graph: PathBuf,
        /// Stop expanding subsets beyond this size
        #[arg(long)]
        max_size: Option<usize>,
        /// Cap on classified subsets; overrides $COVFAIL_BUDGET (default 1000000)
        #[arg(long)]
        budget: Option<usize>,
        /// Classify candidate subsets in parallel
        #[arg(long)]
        parallel: bool,
        /// Diff the result against brute-force enumeration (small instances only)
        #[arg(long)]
        verify: bool,
    },
    /// Failure-probability curve from per-sensor lifetime distributions
    Prob {
        graph: PathBuf,
        /// Comma-separated evaluation times
        #[arg(long)]
        times: String,
        /// ie = inclusion-exclusion (exact), mc = Monte Carlo, brute = exhaustive
        #[arg(long, value_enum, default_value_t = Method::Ie)]
        method: Method,
        /// Monte Carlo sample count
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// RNG seed (required for --method mc)
        #[arg(long)]
        seed: Option<u64>,
        /// Enumeration budget; overrides $COVFAIL_BUDGET
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Replay a failure-event stream, one JSON verdict line per event
    Monitor {
        graph: PathBuf,
        /// Event file: one `fail <time> <vertex>` per line
        events: PathBuf,
    },
    /// Generate a synthetic instance: fenced convex domain, uniform interior sensors
    Gen {
        /// Interior sensor count
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Broadcast radius
        #[arg(long)]
        r_b: f64,
        /// Cover radius (default r_b/sqrt(3), the coverage-guarantee floor)
        #[arg(long)]
        r_c: Option<f64>,
        /// Fence spacing along the domain boundary (default r_b/2)
        #[arg(long)]
        spacing: Option<f64>,
        /// Convex domain polygon as `x,y;x,y;...` (default unit square)
        #[arg(long)]
        domain: Option<String>,
        /// RNG seed; output is byte-identical per seed
        #[arg(long)]
        seed: u64,
        /// Failure distribution for interior sensors: exp:<rate>, weibull:<shape>:<scale>, fixed:<p>
        #[arg(long)]
        fail: Option<String>,
        /// Output file (default stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Debug, ValueEnum)]
enum Method {
    Ie,
    Mc,
    Brute,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Box<dyn Error>> {
    match command {
        Command::Check { graph, verify } => cmd_check(&graph, verify),
        Command::Deathsets {
            graph,
            max_size,
            budget,
            parallel,
            verify,
        } => cmd_deathsets(&graph, max_size, budget, parallel, verify),
        Command::Prob {
            graph,
            times,
            method,
            samples,
            seed,
            budget,
        } => cmd_prob(&graph, &times, method, samples, seed, budget),
        Command::Monitor { graph, events } => cmd_monitor(&graph, &events),
        Command::Gen {
            n,
            r_b,
            r_c,
            spacing,
            domain,
            seed,
            fail,
            out,
        } => cmd_gen(
            n,
            r_b,
            r_c,
            spacing,
            domain.as_deref(),
            seed,
            fail.as_deref(),
            out.as_deref(),
        ),
    }
}

fn load_complex(path: &Path) -> Result<SimplicialComplex2, Box<dyn Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let g = parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(build_rips_2skeleton(&g)?)
}

fn resolve_budget(flag: Option<usize>) -> Result<usize, Box<dyn Error>> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("COVFAIL_BUDGET") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("COVFAIL_BUDGET must be a nonnegative integer, got {s:?}").into()),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn edge_labels(k: &SimplicialComplex2, e: Edge) -> [String; 2] {
    let (a, b) = e.endpoints();
    [k.label(a).to_string(), k.label(b).to_string()]
}

fn cmd_check(graph: &Path, verify: bool) -> Result<ExitCode, Box<dyn Error>> {
    let k = load_complex(graph)?;
    let (order, d) = build_boundary_matrix(&k);
    let s = reduce(&d);
    let witness = check_criterion(&s, &order);
    let (h1, h2) = homology_ranks(&k);
    let mut out = json!({
        "criterion": if witness.is_some() { "pass" } else { "fail" },
        "witness": witness.as_ref().map(|w| json!({
            "triangle": w.triangle.vertices().map(|v| k.label(v).to_string()),
            "fence_edge": edge_labels(&k, w.fence_edge),
            "boundary": w.boundary.iter().map(|&e| edge_labels(&k, e)).collect::<Vec<_>>(),
        })),
        "diagnostics": {
            "vertices": k.vertex_count(),
            "edges": k.edge_count(),
            "triangles": k.triangle_count(),
            "fence": k.fence().len(),
            "interior": k.interior_vertices().count(),
            "h1": h1,
            "h2": h2,
        },
    });
    if verify {
        let oracle = criterion_oracle(&k);
        if oracle.pass != witness.is_some() {
            return Err(format!(
                "verification failed: matrix reduction says {}, linear solve says {}",
                if witness.is_some() { "pass" } else { "fail" },
                if oracle.pass { "pass" } else { "fail" },
            )
            .into());
        }
        out["verify"] = json!({
            "oracle": if oracle.pass { "pass" } else { "fail" },
            "kernel_dim": oracle.kernel_dim,
        });
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if witness.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_deathsets(
    graph: &Path,
    max_size: Option<usize>,
    budget: Option<usize>,
    parallel: bool,
    verify: bool,
) -> Result<ExitCode, Box<dyn Error>> {
    let k = load_complex(graph)?;
    let opts = DeathSetOptions {
        max_size,
        budget: resolve_budget(budget)?,
        parallel,
    };
    let report = cake_or_death(&k, &opts)?;
    let interior_labels: Vec<String> = k
        .interior_vertices()
        .map(|v| k.label(v).to_string())
        .collect();
    let mut out = json!({
        "minimal_death_sets": report.set_labels(&k),
        "interior": interior_labels,
        "explored": report.explored_total,
        "explored_cake": report.explored_cake_count,
        "baseline_failed": report.baseline_failed,
        "truncated_at_size": report.truncated_at_size,
    });
    if verify {
        let n = k.interior_vertices().count();
        if report.truncated_at_size.is_some() {
            out["verify"] = json!({ "skipped": "enumeration was truncated" });
        } else if n > BRUTE_INTERIOR_CAP {
            out["verify"] = json!({
                "skipped": format!(
                    "{n} interior vertices exceed the brute-force cap of {BRUTE_INTERIOR_CAP}"
                ),
            });
        } else {
            let brute = brute_force_death_sets(&k, BRUTE_INTERIOR_CAP)?;
            if brute.minimal_death_sets != report.minimal_death_sets {
                return Err("verification failed: enumeration disagrees with brute force".into());
            }
            out["verify"] = json!({ "match": true, "subsets_compared": 1usize << n });
        }
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn parse_times(s: &str) -> Result<Vec<f64>, Box<dyn Error>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let t: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("bad time {:?} in --times", part.trim()))?;
        if !t.is_finite() || t < 0.0 {
            return Err(format!("times must be finite and nonnegative, got {t}").into());
        }
        out.push(t);
    }
    Ok(out)
}

/// Largest antichain size whose inclusion-exclusion sum (2^d terms) fits the
/// budget.
fn ie_set_cap(budget: usize) -> usize {
    (usize::BITS - 1 - budget.max(1).leading_zeros()) as usize
}

fn cmd_prob(
    graph: &Path,
    times: &str,
    method: Method,
    samples: u64,
    seed: Option<u64>,
    budget: Option<usize>,
) -> Result<ExitCode, Box<dyn Error>> {
    let k = load_complex(graph)?;
    let model = FailureModel::from_complex(&k)?;
    let times = parse_times(times)?;
    let budget = resolve_budget(budget)?;
    let curve: FailureCurve = match method {
        Method::Brute => prob_failure_bruteforce(&k, &model, &times, BRUTE_PROB_CAP)?,
        Method::Ie | Method::Mc => {
            let opts = DeathSetOptions {
                max_size: None,
                budget,
                parallel: false,
            };
            let report = cake_or_death(&k, &opts)?;
            if let Some(size) = report.truncated_at_size {
                return Err(format!(
                    "death-set enumeration truncated at size {size}; \
                     the probability needs the full antichain — raise --budget"
                )
                .into());
            }
            let sets = &report.minimal_death_sets;
            if method == Method::Ie {
                prob_failure_exact(sets, &report.interior, &model, &times, ie_set_cap(budget))?
            } else {
                let seed = seed.ok_or("--seed is required for --method mc")?;
                prob_failure_mc(sets, &report.interior, &model, &times, samples, seed)?
            }
        }
    };
    println!("{}", serde_json::to_string_pretty(&curve)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_monitor(graph: &Path, events: &Path) -> Result<ExitCode, Box<dyn Error>> {
    let k = load_complex(graph)?;
    let events_text =
        fs::read_to_string(events).map_err(|e| format!("{}: {e}", events.display()))?;
    let stream = parse_events(&events_text).map_err(|e| format!("{}: {e}", events.display()))?;
    let mut state = init_monitor(&k)?;
    for w in state.init_warnings() {
        eprintln!("warning: {w}");
    }
    if stream.is_empty() {
        let (h1, h2) = state.homology_ranks();
        println!(
            "{}",
            serde_json::to_string(&json!({
                "status": "running", "event": "init", "h1": h1, "h2": h2,
            }))?
        );
        return Ok(ExitCode::SUCCESS);
    }
    let verdict = replay(&mut state, &stream)?;
    let failed = matches!(verdict.status, MonitorStatus::CriterionFailed { .. });
    let last = verdict.records.len().saturating_sub(1);
    for (i, rec) in verdict.records.iter().enumerate() {
        let mut line = serde_json::to_value(rec)?;
        let status = if failed && i == last {
            "criterion-failed"
        } else {
            "running"
        };
        line.as_object_mut()
            .expect("records serialize to objects")
            .insert("status".into(), json!(status));
        println!("{}", serde_json::to_string(&line)?);
    }
    if !verdict.unprocessed.is_empty() {
        eprintln!(
            "warning: {} event(s) after the criterion failure were not processed",
            verdict.unprocessed.len()
        );
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn parse_domain(s: &str) -> Result<Vec<[f64; 2]>, Box<dyn Error>> {
    let mut out = Vec::new();
    for pair in s.split(';') {
        let coords: Vec<&str> = pair.split(',').map(str::trim).collect();
        let [x, y] = coords.as_slice() else {
            return Err(format!("bad domain vertex {pair:?}; expected x,y").into());
        };
        out.push([
            x.parse().map_err(|_| format!("bad coordinate {x:?}"))?,
            y.parse().map_err(|_| format!("bad coordinate {y:?}"))?,
        ]);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    n: usize,
    r_b: f64,
    r_c: Option<f64>,
    spacing: Option<f64>,
    domain: Option<&str>,
    seed: u64,
    fail: Option<&str>,
    out: Option<&Path>,
) -> Result<ExitCode, Box<dyn Error>> {
    let polygon = match domain {
        None => ConvexPolygon::unit_square(),
        Some(s) => ConvexPolygon::new(parse_domain(s)?)?,
    };
    let failure = fail.map(Distribution::from_str).transpose()?;
    let spec = GeneratorSpec {
        polygon,
        n_interior: n,
        r_b,
        r_c,
        fence_spacing: spacing,
        seed,
        failure,
    };
    let generated = generate(&spec)?;
    for w in &generated.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("r_c = {}", generated.r_c);
    let text = emit_graph(&generated.graph);
    match out {
        Some(p) => fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
