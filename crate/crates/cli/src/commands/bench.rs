//! Benchmark suites: several methods over a batch of random instances, with
//! deterministic CSV reports and a JSON mirror.
//!
//! A suite is a JSON file naming a problem, an instance generator, a count, a
//! seed, and the methods to compare. Every (instance, method) pair becomes
//! exactly one report row. Rows run in a work pool, but each row's randomness
//! comes from its own seed derived from `(suite seed, instance index, method)`,
//! so the report depends only on the suite — never on scheduling. Three files
//! land in the output directory:
//!
//! - `{name}_rows.csv` — one row per (instance, method) with the objective,
//!   feasibility, and guarantee columns,
//! - `{name}_summary.csv` — one row per method with means and rates,
//! - `{name}_report.json` — both of the above plus per-row wall times and
//!   error messages.
//!
//! Wall times and error text live only in the JSON so that the CSVs are
//! byte-for-byte reproducible for a fixed suite. A row failure (for example an
//! oracle that cannot enumerate the instance) is recorded in that row's status
//! and never aborts the rest of the suite.
//!
//! Suite schema, with optional fields at their defaults:
//!
//! ```json
//! {
//!   "name": "clique_small",
//!   "problem": "maxclique",
//!   "instances": { "kind": "erdos_renyi", "nodes": 20, "edge_prob": 0.5 },
//!   "count": 50,
//!   "seed": 7,
//!   "methods": ["solver", "badloss", "sa", "ga", "naive", "oracle"],
//!   "order": "by_value",
//!   "solver": { "steps": 1000, "penalty_ramp": 0.5 },
//!   "sa": { "t_initial": 1000.0 },
//!   "ga": { "population": 256 }
//! }
//! ```
//!
//! `instances` is either `erdos_renyi {nodes, edge_prob}` or
//! `grid {rows, cols, attr_max}`; generated graphs are redrawn until they have
//! at least one edge so edge-variable problems stay well posed. A `solver`
//! block replaces the per-problem descent defaults wholesale (missing fields
//! fall back to the library defaults, not the per-problem ones). The `seed`
//! fields inside `solver`/`sa`/`ga` are ignored: every row is reseeded from the
//! suite seed.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use relaxround::baselines::{
    brute_force, genetic_search, max_clique_exact, naive_threshold_round, simulated_annealing,
    GaConfig, SaConfig,
};
use relaxround::dataset::{edge_cost_vector, WeightRule};
use relaxround::graph::{binary_to_f64, GraphInstance};
use relaxround::objectives::{
    beta_margin, clique_beta_bound, BetaBound, BetaProvenance, CliqueConflicts, CliqueObjective,
    CoverPenalty, LinearObjective, MatchingPenalty, PenalizedLoss, Warped,
};
use relaxround::relaxation::Relaxation;
use relaxround::rng::{child_seed, rng_from_seed};
use relaxround::solver::{optimize_relaxed, solve, OptimizeConfig, RoundOrder, SolveSpec};

use super::default_out_dir;

/// Bumped whenever a column is added, removed, or reordered.
const SCHEMA_VERSION: u32 = 1;

const ROWS_HEADER: &str =
    "instance,method,status,objective,feasible,l_r_initial,guarantee_applicable,guarantee_holds";
const SUMMARY_HEADER: &str = "method,mean_objective,feasibility_rate,mean_gap_to_oracle";

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Suite description file (JSON)
    #[arg(long)]
    suite: PathBuf,
    /// Run only these methods (repeatable); default is the suite's full list
    #[arg(long, value_enum)]
    method: Vec<Method>,
    /// Override the suite's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory the report files are written to
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Suite {
    /// Report file prefix; restricted to letters, digits, `-`, `_`.
    name: String,
    problem: Problem,
    instances: InstanceKind,
    count: usize,
    seed: u64,
    methods: Vec<Method>,
    /// Rounding order for the solver-based methods; default depends on the problem.
    #[serde(default)]
    order: Option<RoundOrder>,
    #[serde(default)]
    solver: Option<OptimizeConfig>,
    #[serde(default)]
    sa: Option<SaConfig>,
    #[serde(default)]
    ga: Option<GaConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Problem {
    /// Maximize clique size over node selections (objective column: clique size,
    /// 0 when the selection is not a clique).
    Maxclique,
    /// Minimize total edge weight subject to covering every node.
    EdgeCover,
    /// Minimize total edge weight subject to matching every node exactly once.
    NodeMatching,
}

impl Problem {
    fn label(self) -> &'static str {
        match self {
            Problem::Maxclique => "maxclique",
            Problem::EdgeCover => "edge_cover",
            Problem::NodeMatching => "node_matching",
        }
    }

    fn sense(self) -> &'static str {
        match self {
            Problem::Maxclique => "maximize",
            Problem::EdgeCover | Problem::NodeMatching => "minimize",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum InstanceKind {
    ErdosRenyi { nodes: usize, edge_prob: f64 },
    Grid { rows: usize, cols: usize, attr_max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Method {
    /// Relax, descend, round sequentially, verify.
    Solver,
    /// Same pipeline on a sine-warped objective: an ablation that keeps the
    /// vertex values but degrades the landscape between them.
    Badloss,
    /// Simulated annealing on the penalized binary energy.
    Sa,
    /// Genetic search on the penalized binary energy.
    Ga,
    /// Descend the relaxation, then round every coordinate at 1/2.
    Naive,
    /// Exhaustive optimum; only available while the instance is enumerable.
    Oracle,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Solver => "solver",
            Method::Badloss => "badloss",
            Method::Sa => "sa",
            Method::Ga => "ga",
            Method::Naive => "naive",
            Method::Oracle => "oracle",
        }
    }

    /// Stable per-method seed slot, independent of the suite's method order, so
    /// adding or filtering methods never changes another method's rows.
    fn seed_slot(self) -> u64 {
        match self {
            Method::Solver => 0,
            Method::Badloss => 1,
            Method::Sa => 2,
            Method::Ga => 3,
            Method::Naive => 4,
            Method::Oracle => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum RowStatus {
    Ok,
    Error,
}

impl RowStatus {
    fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Error => "error",
        }
    }
}

/// One (instance, method) outcome. Optional cells are empty in the CSV and
/// `null` in the JSON: search methods and the oracle have no relaxed loss or
/// guarantee verdict, and failed rows have nothing but the error.
#[derive(Debug, Clone, Serialize)]
struct Row {
    instance: usize,
    method: Method,
    status: RowStatus,
    objective: Option<f64>,
    feasible: Option<bool>,
    l_r_initial: Option<f64>,
    guarantee_applicable: Option<bool>,
    guarantee_holds: Option<bool>,
    /// JSON-only (never in the CSV, which must be reproducible).
    wall_time_ms: f64,
    error: Option<String>,
}

/// The value cells of a successful row.
struct RowCells {
    objective: f64,
    feasible: bool,
    l_r_initial: Option<f64>,
    guarantee_applicable: Option<bool>,
    guarantee_holds: Option<bool>,
}

impl RowCells {
    /// Cells for a method that only produces a binary point.
    fn binary(objective: f64, feasible: bool) -> Self {
        RowCells {
            objective,
            feasible,
            l_r_initial: None,
            guarantee_applicable: None,
            guarantee_holds: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct MethodSummary {
    method: Method,
    /// Mean objective over rows that produced one; absent when none did.
    mean_objective: Option<f64>,
    /// Fraction of this method's rows (failed ones included) that reached a
    /// feasible point.
    feasibility_rate: f64,
    /// Mean relative gap to the oracle's objective over instances where both
    /// rows are feasible: `(oracle - objective) / oracle` when maximizing,
    /// `(objective - oracle) / |oracle|` when minimizing. Absent when the
    /// oracle did not run or no instance qualifies.
    mean_gap_to_oracle: Option<f64>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    name: &'a str,
    problem: Problem,
    objective_sense: &'static str,
    count: usize,
    seed: u64,
    methods: &'a [Method],
    rows: &'a [Row],
    summary: &'a [MethodSummary],
}

pub fn run(args: BenchArgs) -> anyhow::Result<u8> {
    let text = fs::read_to_string(&args.suite)
        .with_context(|| format!("reading suite {}", args.suite.display()))?;
    let mut suite: Suite = serde_json::from_str(&text)
        .with_context(|| format!("parsing suite {}", args.suite.display()))?;
    if let Some(seed) = args.seed {
        suite.seed = seed;
    }
    if suite.name.is_empty()
        || !suite.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        bail!("suite name {:?} must be nonempty letters, digits, '-', '_'", suite.name);
    }

    // Duplicates collapse; the CLI filter keeps the suite's order.
    let mut methods: Vec<Method> = Vec::new();
    for &m in &suite.methods {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if !args.method.is_empty() {
        methods.retain(|m| args.method.contains(m));
    }
    if methods.is_empty() && suite.count > 0 {
        bail!("no methods selected (suite lists {:?})", suite.methods);
    }

    let instances = (0..suite.count)
        .map(|i| draw_instance(&suite, i))
        .collect::<anyhow::Result<Vec<_>>>()?;

    let jobs: Vec<(usize, Method)> = (0..suite.count)
        .flat_map(|i| methods.iter().map(move |&m| (i, m)))
        .collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(i, m)| run_row(&suite, &instances[i], i, m))
        .collect();

    let summary = summarize(suite.problem, &methods, &rows);

    let out_dir = args.out.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let rows_path = out_dir.join(format!("{}_rows.csv", suite.name));
    let summary_path = out_dir.join(format!("{}_summary.csv", suite.name));
    let report_path = out_dir.join(format!("{}_report.json", suite.name));

    fs::write(&rows_path, rows_csv(&rows))
        .with_context(|| format!("writing {}", rows_path.display()))?;
    fs::write(&summary_path, summary_csv(&summary))
        .with_context(|| format!("writing {}", summary_path.display()))?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        name: &suite.name,
        problem: suite.problem,
        objective_sense: suite.problem.sense(),
        count: suite.count,
        seed: suite.seed,
        methods: &methods,
        rows: &rows,
        summary: &summary,
    };
    let mut json = serde_json::to_string_pretty(&report).context("encoding report")?;
    json.push('\n');
    fs::write(&report_path, json)
        .with_context(|| format!("writing {}", report_path.display()))?;

    let failures = rows.iter().filter(|r| r.status == RowStatus::Error).count();
    println!(
        "bench {}: {} rows over {} instances ({} failed) -> {}",
        suite.name,
        rows.len(),
        suite.count,
        failures,
        out_dir.display()
    );
    Ok(0)
}

/// Instance for row `index`, drawn from its own child seed. Graphs are redrawn
/// (bounded attempts) until at least one edge exists.
fn draw_instance(suite: &Suite, index: usize) -> anyhow::Result<GraphInstance> {
    let mut rng = rng_from_seed(child_seed(suite.seed, index as u64));
    match suite.instances {
        InstanceKind::ErdosRenyi { nodes, edge_prob } => {
            for _ in 0..1000 {
                let g = GraphInstance::erdos_renyi(nodes, edge_prob, &mut rng)?;
                if g.edge_count() > 0 {
                    return Ok(g);
                }
            }
            bail!("no graph with edges in 1000 draws from G({nodes}, {edge_prob})");
        }
        InstanceKind::Grid { rows, cols, attr_max } => {
            let attrs = (0..rows * cols)
                .map(|_| vec![f64::from(rng.gen_range(0..=attr_max))])
                .collect();
            Ok(GraphInstance::grid(rows, cols, attrs)?)
        }
    }
}

fn run_row(suite: &Suite, g: &GraphInstance, instance: usize, method: Method) -> Row {
    let started = Instant::now();
    let row_seed = child_seed(child_seed(suite.seed, instance as u64), method.seed_slot());
    let outcome = match suite.problem {
        Problem::Maxclique => run_clique(suite, g, method, row_seed),
        Problem::EdgeCover => run_edge_weight(suite, g, method, row_seed, WeightRule::Covering),
        Problem::NodeMatching => run_edge_weight(suite, g, method, row_seed, WeightRule::Matching),
    };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(cells) => Row {
            instance,
            method,
            status: RowStatus::Ok,
            objective: Some(cells.objective),
            feasible: Some(cells.feasible),
            l_r_initial: cells.l_r_initial,
            guarantee_applicable: cells.guarantee_applicable,
            guarantee_holds: cells.guarantee_holds,
            wall_time_ms,
            error: None,
        },
        Err(e) => Row {
            instance,
            method,
            status: RowStatus::Error,
            objective: None,
            feasible: None,
            l_r_initial: None,
            guarantee_applicable: None,
            guarantee_holds: None,
            wall_time_ms,
            error: Some(format!("{e:#}")),
        },
    }
}

/// Descent settings that reach good solutions at desk scale; a suite's `solver`
/// block replaces them.
fn problem_defaults(problem: Problem) -> OptimizeConfig {
    match problem {
        // The clique penalty dominates early gradients, so ramp it in.
        Problem::Maxclique => OptimizeConfig {
            steps: 1000,
            penalty_ramp: 0.5,
            ..OptimizeConfig::default()
        },
        Problem::EdgeCover => OptimizeConfig { steps: 800, ..OptimizeConfig::default() },
        // Equality-like penalties need full pressure from the start but more
        // restarts to escape poor basins.
        Problem::NodeMatching => OptimizeConfig {
            steps: 1500,
            restarts: 16,
            ..OptimizeConfig::default()
        },
    }
}

fn opt_config(suite: &Suite, seed: u64) -> OptimizeConfig {
    let mut cfg = suite.solver.clone().unwrap_or_else(|| problem_defaults(suite.problem));
    cfg.seed = seed;
    cfg
}

fn round_order(suite: &Suite) -> RoundOrder {
    suite.order.unwrap_or(match suite.problem {
        Problem::Maxclique => RoundOrder::ByValue,
        Problem::EdgeCover | Problem::NodeMatching => RoundOrder::ByConfidence,
    })
}

fn run_search<F>(suite: &Suite, method: Method, energy: F, n: usize, seed: u64) -> anyhow::Result<Vec<u8>>
where
    F: Fn(&[u8]) -> f64,
{
    match method {
        Method::Sa => {
            let cfg = SaConfig { seed, ..suite.sa.clone().unwrap_or_default() };
            Ok(simulated_annealing(energy, n, None, &cfg)?.best_assignment)
        }
        Method::Ga => {
            let cfg = GaConfig { seed, ..suite.ga.clone().unwrap_or_default() };
            Ok(genetic_search(energy, n, &cfg)?.best_assignment)
        }
        _ => unreachable!("run_search only handles sa/ga"),
    }
}

/// Number of selected nodes when the selection is a clique in `g`, else 0.
fn clique_size(g: &GraphInstance, bits: &[u8]) -> usize {
    let chosen: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b == 1)
        .map(|(v, _)| v)
        .collect();
    let edges: std::collections::HashSet<(usize, usize)> =
        g.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    for (i, &u) in chosen.iter().enumerate() {
        for &v in &chosen[i + 1..] {
            if !edges.contains(&(u.min(v), u.max(v))) {
                return 0;
            }
        }
    }
    chosen.len()
}

fn run_clique(suite: &Suite, g: &GraphInstance, method: Method, seed: u64) -> anyhow::Result<RowCells> {
    let m = g.edge_count() as f64;
    let beta = clique_beta_bound(g.edge_count());
    let conflicts = CliqueConflicts::from_instance(g);
    let feasible_of = |bits: &[u8]| conflicts.value(&binary_to_f64(bits)) < 1.0;
    match method {
        Method::Solver | Method::Badloss => {
            let warped = method == Method::Badloss;
            // The warp wraps the already-nonnegative shifted objective, so its
            // declared shift is zero; vertex values are unchanged by the warp.
            let f: Box<dyn Relaxation> = if warped {
                Box::new(Warped::new(CliqueObjective::from_instance(g, m)))
            } else {
                Box::new(CliqueObjective::from_instance(g, 0.0))
            };
            let spec = SolveSpec {
                problem: suite.problem.label().into(),
                f,
                gs: vec![Box::new(CliqueConflicts::from_instance(g))],
                exact_cost: None,
                beta: Some(beta),
                shift: Some(if warped { 0.0 } else { m }),
                objective_is_exact: !warped,
            };
            let res = solve(spec, &opt_config(suite, seed), round_order(suite))?;
            Ok(RowCells {
                objective: clique_size(g, &res.rounded) as f64,
                feasible: res.feasible,
                l_r_initial: Some(res.l_r_initial),
                guarantee_applicable: Some(res.guarantee_applicable),
                guarantee_holds: Some(res.guarantee_holds),
            })
        }
        Method::Sa | Method::Ga => {
            let shifted = CliqueObjective::from_instance(g, m);
            let energy = |bits: &[u8]| {
                let x = binary_to_f64(bits);
                shifted.value(&x) + beta.value * conflicts.value(&x)
            };
            let best = run_search(suite, method, energy, g.node_count(), seed)?;
            Ok(RowCells::binary(clique_size(g, &best) as f64, feasible_of(&best)))
        }
        Method::Naive => {
            let loss = PenalizedLoss::assemble(
                Box::new(CliqueObjective::from_instance(g, m)),
                vec![Box::new(CliqueConflicts::from_instance(g))],
                beta.value,
            )?;
            let outcome = optimize_relaxed(&loss, &opt_config(suite, seed))?;
            let bits = naive_threshold_round(&outcome.x);
            Ok(RowCells::binary(clique_size(g, &bits) as f64, feasible_of(&bits)))
        }
        Method::Oracle => {
            let oracle = max_clique_exact(g)?;
            Ok(RowCells::binary(oracle.size as f64, true))
        }
    }
}

/// Penalty weight for a minimized edge-weight objective: the sum of the
/// positive weights bounds `w . X` over every binary point, feasible ones
/// included, so adding the usual margin dominates the feasible maximum.
fn weight_sum_beta(w: &[f64]) -> BetaBound {
    let bound: f64 = w.iter().map(|c| c.max(0.0)).sum();
    BetaBound {
        value: bound + beta_margin(bound),
        provenance: BetaProvenance::ClosedForm {
            rule: format!("sum of positive edge weights {bound} bounds any selection"),
        },
    }
}

fn run_edge_weight(
    suite: &Suite,
    g: &GraphInstance,
    method: Method,
    seed: u64,
    rule: WeightRule,
) -> anyhow::Result<RowCells> {
    let w = edge_cost_vector(g, rule)?;
    let n = w.len();
    let beta = weight_sum_beta(&w);
    let penalty = || -> Box<dyn Relaxation> {
        match rule {
            WeightRule::Covering => Box::new(CoverPenalty::from_instance(g)),
            WeightRule::Matching => Box::new(MatchingPenalty::from_instance(g)),
        }
    };
    let objective_of = |bits: &[u8]| -> f64 {
        bits.iter().zip(&w).map(|(&b, c)| f64::from(b) * c).sum()
    };
    let pen = penalty();
    let feasible_of = |bits: &[u8]| pen.value(&binary_to_f64(bits)) < 1.0;
    match method {
        Method::Solver | Method::Badloss => {
            let warped = method == Method::Badloss;
            let linear = LinearObjective::new(w.clone())?;
            let f: Box<dyn Relaxation> = if warped {
                Box::new(Warped::new(linear))
            } else {
                Box::new(linear)
            };
            let spec = SolveSpec {
                problem: suite.problem.label().into(),
                f,
                gs: vec![penalty()],
                exact_cost: None,
                beta: Some(beta),
                // Weights are nonnegative under both rules, so the raw
                // objective already is; the warp preserves vertex values.
                shift: Some(0.0),
                objective_is_exact: !warped,
            };
            let res = solve(spec, &opt_config(suite, seed), round_order(suite))?;
            Ok(RowCells {
                objective: objective_of(&res.rounded),
                feasible: res.feasible,
                l_r_initial: Some(res.l_r_initial),
                guarantee_applicable: Some(res.guarantee_applicable),
                guarantee_holds: Some(res.guarantee_holds),
            })
        }
        Method::Sa | Method::Ga => {
            let energy = |bits: &[u8]| {
                objective_of(bits) + beta.value * pen.value(&binary_to_f64(bits))
            };
            let best = run_search(suite, method, energy, n, seed)?;
            Ok(RowCells::binary(objective_of(&best), feasible_of(&best)))
        }
        Method::Naive => {
            let loss = PenalizedLoss::assemble(
                Box::new(LinearObjective::new(w.clone())?),
                vec![penalty()],
                beta.value,
            )?;
            let outcome = optimize_relaxed(&loss, &opt_config(suite, seed))?;
            let bits = naive_threshold_round(&outcome.x);
            Ok(RowCells::binary(objective_of(&bits), feasible_of(&bits)))
        }
        Method::Oracle => {
            let oracle = brute_force(objective_of, feasible_of, n)?;
            Ok(RowCells::binary(oracle.best_value, true))
        }
    }
}

fn summarize(problem: Problem, methods: &[Method], rows: &[Row]) -> Vec<MethodSummary> {
    if rows.is_empty() {
        return Vec::new();
    }
    let count = rows.iter().map(|r| r.instance).max().map_or(0, |m| m + 1);
    // Oracle objective per instance, kept only where the oracle row is feasible.
    let mut oracle_obj: Vec<Option<f64>> = vec![None; count];
    let oracle_ran = methods.contains(&Method::Oracle);
    for r in rows {
        if r.method == Method::Oracle && r.feasible == Some(true) {
            oracle_obj[r.instance] = r.objective;
        }
    }
    methods
        .iter()
        .map(|&method| {
            let mine: Vec<&Row> = rows.iter().filter(|r| r.method == method).collect();
            let objectives: Vec<f64> = mine.iter().filter_map(|r| r.objective).collect();
            let mean_objective = if objectives.is_empty() {
                None
            } else {
                Some(objectives.iter().sum::<f64>() / objectives.len() as f64)
            };
            let feasible = mine.iter().filter(|r| r.feasible == Some(true)).count();
            let feasibility_rate = feasible as f64 / mine.len() as f64;
            let mut gaps = Vec::new();
            if oracle_ran {
                for r in &mine {
                    let (Some(obj), Some(true)) = (r.objective, r.feasible) else {
                        continue;
                    };
                    let Some(oracle) = oracle_obj[r.instance] else { continue };
                    if oracle.abs() < 1e-12 {
                        continue;
                    }
                    gaps.push(match problem.sense() {
                        "maximize" => (oracle - obj) / oracle,
                        _ => (obj - oracle) / oracle.abs(),
                    });
                }
            }
            let mean_gap_to_oracle = if gaps.is_empty() {
                None
            } else {
                Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
            };
            MethodSummary { method, mean_objective, feasibility_rate, mean_gap_to_oracle }
        })
        .collect()
}

fn cell_f64(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn cell_bool(value: Option<bool>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn rows_csv(rows: &[Row]) -> String {
    let mut out = String::from(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.instance,
            r.method.name(),
            r.status.name(),
            cell_f64(r.objective),
            cell_bool(r.feasible),
            cell_f64(r.l_r_initial),
            cell_bool(r.guarantee_applicable),
            cell_bool(r.guarantee_holds),
        )
        .expect("writing to a string cannot fail");
    }
    out
}

fn summary_csv(summary: &[MethodSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summary {
        writeln!(
            out,
            "{},{},{},{}",
            s.method.name(),
            cell_f64(s.mean_objective),
            s.feasibility_rate,
            cell_f64(s.mean_gap_to_oracle),
        )
        .expect("writing to a string cannot fail");
    }
    out
}
