use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use relaxround::dataset::{edge_cost_vector, WeightRule};
use relaxround::error::Error;
use relaxround::graph::{binary_to_f64, GraphInstance};
use relaxround::objectives::{
    clique_beta_bound, BetaBound, BetaProvenance, CliqueConflicts, CliqueObjective,
    CoverPenalty, LinearObjective, MatchingPenalty, ToyObjective,
};
use relaxround::proxy::Checkpoint;
use relaxround::relaxation::Relaxation;
use relaxround::solver::{
    solve, OptimizeConfig, Parameterization, RoundOrder, SolveSpec,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ProblemArg {
    /// Two-variable benchmark objective read off the instance's attributes
    Toy,
    /// Maximum clique via conflict penalties on non-edges
    Maxclique,
    /// Cheapest edge set covering every node
    EdgeCover,
    /// Cheapest perfect matching
    NodeMatching,
    /// Objective from a trained proxy checkpoint
    Proxy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    None,
    Cover,
    Matching,
}

fn parse_order(s: &str) -> Result<RoundOrder, String> {
    RoundOrder::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance file (graph JSON)
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Trained proxy checkpoint (proxy problem only)
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Constraint paired with a proxy objective
    #[arg(long, value_enum, default_value_t = ConstraintArg::None)]
    constraint: ConstraintArg,
    /// Penalty weight override; by default a closed-form or enumerated bound
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = parse_order, default_value = "by_confidence")]
    order: RoundOrder,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, default_value_t = 0.05)]
    step_size: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    /// Fraction of the descent over which the penalty weight ramps up from 0
    #[arg(long, default_value_t = 0.0)]
    penalty_ramp: f64,
    /// Optimize x directly with clamping instead of through logits
    #[arg(long)]
    clipped: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the result JSON to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_spec(args: &SolveArgs, g: &GraphInstance) -> anyhow::Result<SolveSpec> {
    let beta_override = args.beta.map(|value| BetaBound {
        value,
        provenance: BetaProvenance::UserSupplied,
    });
    Ok(match args.problem {
        ProblemArg::Toy => {
            if g.node_count() != 2 || g.edge_count() != 1 || g.attr_dim() == 0 {
                bail!("the toy problem needs a single-edge instance with node attributes");
            }
            let c1 = g.node_attrs()[0][0];
            let c2 = g.node_attrs()[1][0];
            let truth = ToyObjective::from_config(c1, c2);
            let for_cost = truth.clone();
            SolveSpec {
                problem: "toy".into(),
                f: Box::new(truth),
                gs: vec![],
                exact_cost: Some(Box::new(move |bits| {
                    for_cost.value(&binary_to_f64(bits))
                })),
                beta: beta_override.clone(),
                shift: None,
                objective_is_exact: true,
            }
        }
        ProblemArg::Maxclique => {
            let m = g.edge_count() as f64;
            let adj = g.adjacency();
            let size = move |bits: &[u8]| -> f64 {
                let chosen: Vec<usize> = bits
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &b)| (b == 1).then_some(i))
                    .collect();
                for (i, &u) in chosen.iter().enumerate() {
                    for &v in &chosen[i + 1..] {
                        if !adj[u].contains(&v) {
                            return 0.0;
                        }
                    }
                }
                chosen.len() as f64
            };
            SolveSpec {
                problem: "maxclique".into(),
                f: Box::new(CliqueObjective::from_instance(g, 0.0)),
                gs: vec![Box::new(CliqueConflicts::from_instance(g))],
                exact_cost: Some(Box::new(size)),
                beta: beta_override.clone()
                    .or_else(|| Some(clique_beta_bound(g.edge_count()))),
                shift: Some(m),
                objective_is_exact: true,
            }
        }
        ProblemArg::EdgeCover | ProblemArg::NodeMatching => {
            let (rule, label): (WeightRule, &str) = match args.problem {
                ProblemArg::EdgeCover => (WeightRule::Covering, "edge_cover"),
                _ => (WeightRule::Matching, "node_matching"),
            };
            let w = edge_cost_vector(g, rule).context("deriving edge costs")?;
            let constraint: Box<dyn Relaxation> = match args.problem {
                ProblemArg::EdgeCover => Box::new(CoverPenalty::from_instance(g)),
                _ => Box::new(MatchingPenalty::from_instance(g)),
            };
            let cost_w = w.clone();
            SolveSpec {
                problem: label.into(),
                f: Box::new(LinearObjective::new(w).context("building objective")?),
                gs: vec![constraint],
                exact_cost: Some(Box::new(move |bits| {
                    cost_w.iter().zip(bits).map(|(&c, &b)| c * f64::from(b)).sum()
                })),
                beta: beta_override.clone(),
                shift: None,
                objective_is_exact: true,
            }
        }
        ProblemArg::Proxy => {
            let Some(path) = &args.checkpoint else {
                bail!("--checkpoint is required for the proxy problem");
            };
            let cp = Checkpoint::load(path)
                .with_context(|| format!("loading checkpoint {}", path.display()))?;
            let compiled = cp.model.compile(g).context("compiling the proxy")?;
            let gs: Vec<Box<dyn Relaxation>> = match args.constraint {
                ConstraintArg::None => vec![],
                ConstraintArg::Cover => vec![Box::new(CoverPenalty::from_instance(g))],
                ConstraintArg::Matching => {
                    vec![Box::new(MatchingPenalty::from_instance(g))]
                }
            };
            SolveSpec {
                problem: "proxy".into(),
                f: Box::new(compiled),
                gs,
                exact_cost: None,
                beta: beta_override.clone(),
                shift: None,
                objective_is_exact: false,
            }
        }
    })
}

pub fn run(args: SolveArgs) -> anyhow::Result<u8> {
    let g = GraphInstance::load(&args.instance)
        .with_context(|| format!("loading instance {}", args.instance.display()))?;
    if args.constraint != ConstraintArg::None && args.problem != ProblemArg::Proxy {
        bail!("--constraint only applies to the proxy problem");
    }
    let spec = build_spec(&args, &g)?;
    let opt = OptimizeConfig {
        restarts: args.restarts,
        steps: args.steps,
        step_size: args.step_size,
        momentum: args.momentum,
        parameterization: if args.clipped {
            Parameterization::Clipped
        } else {
            Parameterization::Logistic
        },
        penalty_ramp: args.penalty_ramp,
        seed: args.seed,
        ..OptimizeConfig::default()
    };

    match solve(spec, &opt, args.order) {
        Ok(result) => {
            let json = serde_json::to_string_pretty(&result).expect("result serializes");
            println!("{json}");
            if let Some(path) = &args.out {
                std::fs::write(path, &json)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if result.guarantee_applicable && !result.guarantee_holds {
                eprintln!(
                    "guarantee violated while applicable: this is a bug in the solver, not the instance"
                );
                Ok(3)
            } else if !result.feasible {
                eprintln!("no feasible solution produced");
                Ok(2)
            } else {
                Ok(0)
            }
        }
        // No feasible binary point exists at all: still report, distinctly.
        Err(Error::Infeasible) => {
            let json = serde_json::json!({
                "problem": args.problem.to_possible_value().map(|v| v.get_name().to_string()),
                "error": "infeasible",
                "detail": "no binary assignment satisfies every constraint",
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("serializes"));
            if let Some(path) = &args.out {
                std::fs::write(path, serde_json::to_string_pretty(&json).unwrap())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("instance is infeasible");
            Ok(2)
        }
        Err(e) => Err(e).context("solving"),
    }
}
