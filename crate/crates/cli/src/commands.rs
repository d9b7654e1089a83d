use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use mids_core::analysis::{audit_weights, optimize_weights, Catalog, GridSchedule};
use mids_core::instances::{gen_lower_bound, gen_random, mark_random, read_graph, write_graph};
use mids_core::lb_trace::{expected_layer_ratio, growth_constant, leaf_growth, trace};
use mids_core::oracle::{check_ids, exhaustive_mids, mis_enumeration_mids};
use mids_core::{batch, solve_with, MarkedGraph, Solution, SolverConfig};

use crate::exit;
use crate::records::{cases_text, Outcome, Record, Stats};
use crate::{AnalyzeArgs, BenchArgs, Format, GenCommand, LbtraceArgs, OracleArgs, SolveArgs};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: exit::FAILURE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, CliError>;

fn load(path: &Path) -> Result<MarkedGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    read_graph(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn one_based(vs: &[usize]) -> String {
    vs.iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn status_code(s: &Solution) -> u8 {
    if s.is_found() {
        exit::FOUND
    } else {
        exit::INFEASIBLE
    }
}

#[derive(Serialize)]
struct SolveBody {
    instance: String,
    #[serde(flatten)]
    outcome: Outcome,
    stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<bool>,
}

pub fn solve(args: &SolveArgs) -> CmdResult {
    let g = load(&args.path)?;
    let config = SolverConfig {
        assertions: args.assertions,
        weights: args.weights.unwrap_or_default(),
    };
    let start = Instant::now();
    let (solution, stats) = solve_with(&g, &config).map_err(|e| CliError::usage(e.to_string()))?;
    let wall = start.elapsed();
    let check = args
        .check
        .then(|| solution.witness().is_none_or(|w| check_ids(&g, w)));

    match args.format {
        Format::Text => {
            match &solution {
                Solution::Found(w) => {
                    println!("size {}", w.len());
                    println!("witness {}", one_based(w));
                }
                Solution::Infeasible => println!("infeasible"),
            }
            println!(
                "stats nodes={} leaves={} max_depth={} cases {}",
                stats.nodes,
                stats.leaves,
                stats.max_depth,
                cases_text(&stats)
            );
            match check {
                Some(true) => println!("check pass"),
                Some(false) => println!("check FAIL"),
                None => {}
            }
            println!("timing wall_ms={:.3}", wall.as_secs_f64() * 1e3);
        }
        Format::Records => Record::new(
            "solve",
            SolveBody {
                instance: args.path.display().to_string(),
                outcome: Outcome::from(&solution),
                stats: Stats::from(&stats),
                check,
            },
        )
        .timed(wall)
        .emit(),
    }
    if check == Some(false) {
        return Err(CliError::failure("witness failed validation"));
    }
    Ok(status_code(&solution))
}

#[derive(Serialize)]
struct OracleBody {
    instance: String,
    exhaustive: Outcome,
    mis_enumeration: Option<Outcome>,
    agree: Option<bool>,
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    let g = load(&args.path)?;
    let exhaustive = exhaustive_mids(&g).map_err(|e| CliError::usage(e.to_string()))?;
    let mis = g
        .marked()
        .is_empty()
        .then(|| mis_enumeration_mids(&g).expect("plain graph"));
    let agree = mis.as_ref().map(|m| m.size() == exhaustive.size());
    match args.format {
        Format::Text => {
            let show = |s: &Solution| match s {
                Solution::Found(w) => format!("size {} witness {}", w.len(), one_based(w)),
                Solution::Infeasible => "infeasible".to_string(),
            };
            println!("exhaustive {}", show(&exhaustive));
            match &mis {
                Some(m) => println!("mis-enumeration {}", show(m)),
                None => println!("mis-enumeration n/a (instance has marked vertices)"),
            }
            match agree {
                Some(a) => println!("agree {a}"),
                None => println!("agree n/a"),
            }
        }
        Format::Records => Record::new(
            "oracle",
            OracleBody {
                instance: args.path.display().to_string(),
                exhaustive: Outcome::from(&exhaustive),
                mis_enumeration: mis.as_ref().map(Outcome::from),
                agree,
            },
        )
        .emit(),
    }
    if agree == Some(false) {
        return Err(CliError::failure("oracles disagree"));
    }
    Ok(status_code(&exhaustive))
}

#[derive(Serialize)]
struct AnalyzeRow<'a> {
    label: &'a str,
    factor: f64,
}

#[derive(Serialize)]
struct AnalyzeSummary<'a> {
    w1: f64,
    w2: f64,
    max_factor: f64,
    worst_cases: &'a [String],
    csp_endgame_base: f64,
}

#[derive(Serialize)]
struct OptimizeBody {
    w1: f64,
    w2: f64,
    max_factor: f64,
    evaluated: usize,
}

pub fn analyze(args: &AnalyzeArgs) -> CmdResult {
    let catalog = match &args.catalog {
        Some(p) => Catalog::from_path(p).map_err(|e| CliError::usage(e.to_string()))?,
        None => Catalog::builtin(),
    };
    let w = args.weights.unwrap_or_default();
    let audit = audit_weights(&catalog, &w).map_err(|e| CliError::usage(e.to_string()))?;
    let endgame = mids_core::analysis::csp_endgame_base(&w);
    match args.format {
        Format::Text => {
            println!("weights w1={} w2={}", w.w1(), w.w2());
            for row in &audit.rows {
                println!("{:<12} {:.6}", row.label, row.factor);
            }
            println!("max {:.6}", audit.max_factor);
            println!("argmax {}", audit.worst_cases.join(" "));
            println!("csp-endgame base {endgame:.6}");
        }
        Format::Records => {
            for row in &audit.rows {
                Record::new(
                    "analyze.row",
                    AnalyzeRow {
                        label: &row.label,
                        factor: row.factor,
                    },
                )
                .emit();
            }
            Record::new(
                "analyze",
                AnalyzeSummary {
                    w1: w.w1(),
                    w2: w.w2(),
                    max_factor: audit.max_factor,
                    worst_cases: &audit.worst_cases,
                    csp_endgame_base: endgame,
                },
            )
            .emit();
        }
    }
    if args.optimize {
        let start = Instant::now();
        let best = optimize_weights(&catalog, &GridSchedule::default())
            .map_err(|e| CliError::failure(e.to_string()))?;
        let wall = start.elapsed();
        match args.format {
            Format::Text => println!(
                "optimum w1={:.4} w2={:.4} max {:.6} ({} grid points)",
                best.weights.w1(),
                best.weights.w2(),
                best.max_factor,
                best.evaluated
            ),
            Format::Records => Record::new(
                "analyze.optimize",
                OptimizeBody {
                    w1: best.weights.w1(),
                    w2: best.weights.w2(),
                    max_factor: best.max_factor,
                    evaluated: best.evaluated,
                },
            )
            .timed(wall)
            .emit(),
        }
    }
    Ok(exit::FOUND)
}

#[derive(Serialize)]
struct GrowthBody {
    l: usize,
    nodes: u64,
    leaves: u64,
    ratio: Option<f64>,
    checks_pass: bool,
    k_min: Option<usize>,
    k_max: Option<usize>,
}

#[derive(Serialize)]
struct GrowthSummary {
    expected_ratio: f64,
    growth_constant: f64,
    all_checks_pass: bool,
}

pub fn lbtrace(args: &LbtraceArgs) -> CmdResult {
    if args.l_min < 3 || args.l_min >= args.l_max {
        return Err(CliError::usage("need 3 <= --l-min < --l-max"));
    }
    if let Some(l) = args.nodes {
        let report = trace(l).map_err(|e| CliError::usage(e.to_string()))?;
        match args.format {
            Format::Text => {
                print!("{}", report.records_text());
                println!("{}", report.summary_line());
            }
            Format::Records => {
                for r in &report.records {
                    Record::new("lbtrace.node", r).emit();
                }
            }
        }
    }
    let rows = leaf_growth(args.l_min, args.l_max).map_err(|e| CliError::failure(e.to_string()))?;
    let expected = expected_layer_ratio();
    let rate = mids_core::analysis::lb_growth_rate();
    let constant = growth_constant(&rows, rate);
    let all_pass = rows.iter().all(|r| r.checks_pass);
    match args.format {
        Format::Text => {
            println!(
                "{:>3} {:>8} {:>8} {:>7} {:>6} {:>7}",
                "l", "nodes", "leaves", "ratio", "checks", "k"
            );
            for r in &rows {
                println!(
                    "{:>3} {:>8} {:>8} {:>7} {:>6} {:>7}",
                    r.l,
                    r.nodes,
                    r.leaves,
                    r.ratio.map_or("-".to_string(), |q| format!("{q:.4}")),
                    if r.checks_pass { "ok" } else { "FAIL" },
                    r.k_range
                        .map_or("-".to_string(), |(a, b)| format!("{a}..{b}")),
                );
            }
            println!("expected ratio {expected:.4}; leaves >= {rate:.4}^(2l) / {constant:.4} over this range");
        }
        Format::Records => {
            for r in &rows {
                Record::new(
                    "lbtrace.growth",
                    GrowthBody {
                        l: r.l,
                        nodes: r.nodes,
                        leaves: r.leaves,
                        ratio: r.ratio,
                        checks_pass: r.checks_pass,
                        k_min: r.k_range.map(|k| k.0),
                        k_max: r.k_range.map(|k| k.1),
                    },
                )
                .emit();
            }
            Record::new(
                "lbtrace",
                GrowthSummary {
                    expected_ratio: expected,
                    growth_constant: constant,
                    all_checks_pass: all_pass,
                },
            )
            .emit();
        }
    }
    if all_pass {
        Ok(exit::FOUND)
    } else {
        Err(CliError::failure("lower-bound structure checks failed"))
    }
}

#[derive(Serialize)]
struct BenchBody {
    id: u64,
    seed: u64,
    n: usize,
    edges: usize,
    marked: usize,
    #[serde(flatten)]
    outcome: Outcome,
    stats: Stats,
}

pub fn bench(args: &BenchArgs) -> CmdResult {
    if !(0.0..=1.0).contains(&args.p) || !(0.0..=1.0).contains(&args.mark) {
        return Err(CliError::usage("--p and --mark must lie in [0, 1]"));
    }
    let seeds: Vec<u64> = (0..args.count).map(|i| args.seed + i).collect();
    let config = SolverConfig::default();
    let runs = batch::with_jobs(args.jobs, || {
        batch::par_map(&seeds, |&seed| {
            let g = mark_random(&gen_random(args.n, args.p, seed), args.mark, seed);
            let start = Instant::now();
            let result = solve_with(&g, &config);
            (g, result, start.elapsed())
        })
    });
    let mut total = Duration::ZERO;
    if args.format == Format::Text {
        println!(
            "{:>4} {:>8} {:>4} {:>6} {:>6} {:>10} {:>4} {:>9} {:>8} | {:>10}",
            "id", "seed", "n", "edges", "marked", "status", "size", "nodes", "leaves", "wall_ms"
        );
    }
    for (i, (&seed, (g, result, wall))) in seeds.iter().zip(&runs).enumerate() {
        let (solution, stats) = result
            .as_ref()
            .map_err(|e| CliError::failure(e.to_string()))?;
        total += *wall;
        match args.format {
            Format::Text => println!(
                "{:>4} {:>8} {:>4} {:>6} {:>6} {:>10} {:>4} {:>9} {:>8} | {:>10.3}",
                i,
                seed,
                args.n,
                g.edge_count(),
                g.marked().len(),
                if solution.is_found() {
                    "found"
                } else {
                    "infeasible"
                },
                solution.size().map_or("-".to_string(), |s| s.to_string()),
                stats.nodes,
                stats.leaves,
                wall.as_secs_f64() * 1e3
            ),
            Format::Records => Record::new(
                "bench",
                BenchBody {
                    id: i as u64,
                    seed,
                    n: args.n,
                    edges: g.edge_count(),
                    marked: g.marked().len(),
                    outcome: Outcome::from(solution),
                    stats: Stats::from(stats),
                },
            )
            .timed(*wall)
            .emit(),
        }
    }
    if args.format == Format::Text {
        println!("total solve time | {:.3} ms", total.as_secs_f64() * 1e3);
    }
    Ok(exit::FOUND)
}

pub fn generate(cmd: &GenCommand) -> CmdResult {
    let g = match *cmd {
        GenCommand::LowerBound { l } => {
            gen_lower_bound(l).map_err(|e| CliError::usage(e.to_string()))?
        }
        GenCommand::Random { n, p, seed, mark } => {
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&mark) {
                return Err(CliError::usage("--p and --mark must lie in [0, 1]"));
            }
            mark_random(&gen_random(n, p, seed), mark, seed)
        }
    };
    print!(
        "{}",
        write_graph(&g).expect("generated graphs number every vertex")
    );
    Ok(exit::FOUND)
}
