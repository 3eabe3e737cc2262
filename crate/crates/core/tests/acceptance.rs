//! Acceptance gate: one test per release criterion, each printing a PASS line
//! with the measured quantity (visible under `--nocapture`). Tolerances and
//! budgets are pinned in the assertions; a red test here blocks a release.

use std::time::{Duration, Instant};

use relaxround::baselines::{
    brute_force, brute_force_recursive, max_clique_exact, naive_threshold_round,
};
use relaxround::dataset::{
    edge_cost_vector, sample_dataset, DatasetConfig, Family, WeightRule,
};
use relaxround::graph::{binary_to_f64, GraphInstance, VarScope};
use relaxround::multilinear::{
    check_entrywise_affine, check_relaxation_concave, rectifier_for_table, BooleanTable,
    DEFAULT_CHECK_TOL,
};
use relaxround::objectives::{
    clique_beta_bound, CardinalityPenalty, CliqueConflicts, CliqueObjective, CoverPenalty,
    LinearObjective, MatchingPenalty, PenalizedLoss, ToyObjective, Warped,
};
use relaxround::proxy::{train_proxy, ProxyArch, ProxyModel, TrainConfig};
use relaxround::relaxation::Relaxation;
use relaxround::rng::{child_seed, rng_from_seed};
use relaxround::solver::{
    optimize_relaxed, sequential_round, solve, OptimizeConfig, RoundOrder, SolveSpec,
};

use rand::Rng;

fn assert_under(start: Instant, budget: Duration, label: &str) {
    let took = start.elapsed();
    assert!(took <= budget, "{label} took {took:?}, budget {budget:?}");
}

/// Random graph with explicit attribute values (richer than degree attributes).
fn random_attr_graph<R: Rng>(
    n: usize,
    p: f64,
    attr_dim: usize,
    rng: &mut R,
) -> GraphInstance {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let attrs = (0..n)
            .map(|_| (0..attr_dim).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        if let Ok(g) = GraphInstance::new(n, edges, attrs, None) {
            if g.edge_count() > 0 {
                return g;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Multilinear extension: exact at vertices, affine along every coordinate
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_multilinear_extension_vertices_and_affinity() {
    let start = Instant::now();
    let mut rng = rng_from_seed(0xAC01);
    for t in 0..1000u64 {
        let n = (t as usize % 10) + 1;
        let table = BooleanTable::random(n, -10.0..10.0, &mut rng).unwrap();
        for mask in 0..(1usize << n) {
            let x: Vec<f64> = (0..n).map(|j| f64::from((mask >> j) as u8 & 1)).collect();
            let got = table.eval(&x).unwrap();
            let want = table.at_mask(mask);
            assert!(
                (got - want).abs() <= 1e-12,
                "table {t} vertex {mask:b}: extension {got} vs entry {want}"
            );
        }
        let report = check_entrywise_affine(
            |x| table.eval(x).unwrap(),
            n,
            100,
            1e-10,
            child_seed(0xAC01, t),
        );
        assert!(report.passed, "table {t} affinity witness: {:?}", report.witness);
    }
    assert_under(start, Duration::from_secs(30), "criterion 1");
    println!(
        "criterion 01 PASS: 1000 tables exact at every vertex (1e-12) and entry-wise affine (1e-10), {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 2. Two-variable rectifier: exact vertices, concave along each coordinate
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_rectifier_matches_vertices_and_is_concave() {
    let start = Instant::now();
    let mut rng = rng_from_seed(0xAC02);
    for t in 0..1000u64 {
        // Dyadic entries make the construction's sums and differences exact in
        // floating point, so the vertex comparison can demand bit equality.
        let values: Vec<f64> = (0..4)
            .map(|_| f64::from(rng.gen_range(-10240i32..=10240)) / 1024.0)
            .collect();
        let table = BooleanTable::new(2, values).unwrap();
        let rect = rectifier_for_table(&table).unwrap();
        for mask in 0..4usize {
            let x = [f64::from(mask as u8 & 1), f64::from((mask >> 1) as u8 & 1)];
            assert_eq!(
                rect.eval(&x),
                table.at_mask(mask),
                "table {t} vertex {mask:b} not reproduced exactly"
            );
        }
        let report =
            check_relaxation_concave(&rect, 100, DEFAULT_CHECK_TOL, child_seed(0xAC02, t));
        assert!(report.passed, "table {t} concavity witness: {:?}", report.witness);
    }
    assert_under(start, Duration::from_secs(10), "criterion 2");
    println!(
        "criterion 02 PASS: 1000 rectifiers exact at all four vertices and concave, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 3. Sequential rounding: the loss trace never increases
// ---------------------------------------------------------------------------

/// One penalized loss from a rotating family of objective/constraint pairings.
fn mixed_instance(kind: usize, seed: u64) -> PenalizedLoss {
    let mut rng = rng_from_seed(seed);
    let beta = rng.gen_range(1.0..20.0);
    match kind {
        // Concave-head proxy with a cardinality budget.
        0 => {
            let g = random_attr_graph(3 + (seed as usize % 6), 0.5, 1, &mut rng);
            let cfg = TrainConfig { width: 4, seed, ..TrainConfig::default() };
            let model = ProxyModel::init(ProxyArch::Con, 1, VarScope::Node, &cfg).unwrap();
            let compiled = model.compile(&g).unwrap();
            let n = g.node_count();
            let t = rng.gen_range(1..n);
            PenalizedLoss::assemble(
                Box::new(compiled),
                vec![Box::new(CardinalityPenalty::new(n, t).unwrap())],
                beta,
            )
            .unwrap()
        }
        // Clique selection with conflict penalties.
        1 => {
            let g = random_attr_graph(4 + (seed as usize % 8), 0.5, 1, &mut rng);
            let m = g.edge_count() as f64;
            PenalizedLoss::assemble(
                Box::new(CliqueObjective::from_instance(&g, m)),
                vec![Box::new(CliqueConflicts::from_instance(&g))],
                beta,
            )
            .unwrap()
        }
        // Linear edge costs with the covering penalty.
        2 => {
            let g = random_attr_graph(5 + (seed as usize % 4), 0.6, 1, &mut rng);
            let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(0.0..5.0)).collect();
            PenalizedLoss::assemble(
                Box::new(LinearObjective::new(w).unwrap()),
                vec![Box::new(CoverPenalty::from_instance(&g))],
                beta,
            )
            .unwrap()
        }
        // Linear edge costs with the matching penalty.
        3 => {
            let g = random_attr_graph(4 + (seed as usize % 4), 0.7, 1, &mut rng);
            let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(0.0..5.0)).collect();
            PenalizedLoss::assemble(
                Box::new(LinearObjective::new(w).unwrap()),
                vec![Box::new(MatchingPenalty::from_instance(&g))],
                beta,
            )
            .unwrap()
        }
        // Random table objective with a cardinality budget.
        _ => {
            let n = 3 + (seed as usize % 6);
            let table = BooleanTable::random(n, -8.0..8.0, &mut rng).unwrap();
            let t = rng.gen_range(1..n);
            PenalizedLoss::assemble(
                Box::new(table),
                vec![Box::new(CardinalityPenalty::new(n, t).unwrap())],
                beta,
            )
            .unwrap()
        }
    }
}

#[test]
fn criterion_03_rounding_traces_never_increase() {
    let start = Instant::now();
    let orders = [RoundOrder::Index, RoundOrder::ByConfidence, RoundOrder::ByValue];
    for t in 0..1000u64 {
        let loss = mixed_instance(t as usize % 5, child_seed(0xAC03, t));
        let mut rng = rng_from_seed(child_seed(0xAC03 ^ 0xFF, t));
        let soft: Vec<f64> = (0..loss.arity()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let out = sequential_round(&loss, &soft, orders[t as usize % 3]).unwrap();
        for w in out.trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-9,
                "instance {t}: trace step rose from {} to {}",
                w[0],
                w[1]
            );
        }
    }
    assert_under(start, Duration::from_secs(120), "criterion 3");
    println!(
        "criterion 03 PASS: 1000 mixed instances, every rounding trace non-increasing within 1e-9, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 4. Whenever the runtime guarantee is applicable, it holds
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_guarantee_never_violated_when_applicable() {
    let start = Instant::now();
    let mut applicable = 0usize;
    let mut violations = Vec::new();
    let mut total = 0usize;

    // Small penalized problems: enumerated shift and penalty weight.
    let opt = OptimizeConfig { restarts: 4, steps: 150, ..OptimizeConfig::default() };
    let orders = [RoundOrder::Index, RoundOrder::ByConfidence, RoundOrder::ByValue];
    for t in 0..60u64 {
        let mut rng = rng_from_seed(child_seed(0xAC04, t));
        let (f, gs): (Box<dyn Relaxation>, Vec<Box<dyn Relaxation>>) = if t % 2 == 0 {
            let n = 4 + (t as usize % 6);
            let table = BooleanTable::random(n, -5.0..5.0, &mut rng).unwrap();
            let budget = rng.gen_range(1..n);
            (
                Box::new(table),
                vec![Box::new(CardinalityPenalty::new(n, budget).unwrap())],
            )
        } else {
            // Covering instance; resample until every node has an edge so a
            // feasible point exists.
            let g = loop {
                let cand = random_attr_graph(5, 0.6, 1, &mut rng);
                let isolated = cand.incidence().iter().any(|edges| edges.is_empty());
                if !isolated && cand.edge_count() <= 9 {
                    break cand;
                }
            };
            let table = BooleanTable::random(g.edge_count(), -5.0..5.0, &mut rng).unwrap();
            (Box::new(table), vec![Box::new(CoverPenalty::from_instance(&g))])
        };
        let spec = SolveSpec {
            problem: format!("mixed-{t}"),
            f,
            gs,
            exact_cost: None,
            beta: None,
            shift: None,
            objective_is_exact: true,
        };
        let res = solve(spec, &opt, orders[t as usize % 3]).unwrap();
        total += 1;
        if res.guarantee_applicable {
            applicable += 1;
            if !res.guarantee_holds {
                violations.push(format!("mixed-{t}"));
            }
        }
    }

    // Clique instances: declared shift and closed-form penalty weight.
    let clique_opt = OptimizeConfig {
        restarts: 4,
        steps: 400,
        penalty_ramp: 0.5,
        ..OptimizeConfig::default()
    };
    for t in 0..15u64 {
        let mut rng = rng_from_seed(child_seed(0xAC04 ^ 0xC11, t));
        let g = GraphInstance::erdos_renyi(20, 0.5, &mut rng).unwrap();
        let m = g.edge_count() as f64;
        let spec = SolveSpec {
            problem: format!("clique-{t}"),
            f: Box::new(CliqueObjective::from_instance(&g, 0.0)),
            gs: vec![Box::new(CliqueConflicts::from_instance(&g))],
            exact_cost: None,
            beta: Some(clique_beta_bound(g.edge_count())),
            shift: Some(m),
            objective_is_exact: true,
        };
        let res = solve(spec, &clique_opt, RoundOrder::ByValue).unwrap();
        total += 1;
        if res.guarantee_applicable {
            applicable += 1;
            if !res.guarantee_holds {
                violations.push(format!("clique-{t}"));
            }
        }
    }

    assert!(violations.is_empty(), "guarantee violated on: {violations:?}");
    assert!(applicable > 0, "no run was applicable; the check would be vacuous");
    println!(
        "criterion 04 PASS: {applicable}/{total} runs applicable, zero violations, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 5. Analytic proxy gradients match central finite differences
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_proxy_gradients_match_finite_differences() {
    let start = Instant::now();
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-5;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    let archs = [ProxyArch::Aff, ProxyArch::Con, ProxyArch::Higher];
    let mut checked_x = 0usize;
    let mut checked_p = 0usize;

    for t in 0..500u64 {
        let mut rng = rng_from_seed(child_seed(0xAC05, t));
        let arch = archs[t as usize % 3];
        let attr_dim = 1 + t as usize % 2;
        let scope = if t % 5 == 0 { VarScope::Edge } else { VarScope::Node };
        let cfg = TrainConfig {
            width: 3 + t as usize % 3,
            seed: child_seed(0xAC05 ^ 0x11, t),
            ..TrainConfig::default()
        };
        let model = ProxyModel::init(arch, attr_dim, scope, &cfg).unwrap();
        let g = random_attr_graph(3 + t as usize % 5, 0.6, attr_dim, &mut rng);
        let n = g.var_count(scope);
        let compiled = model.compile(&g).unwrap();

        // Smooth points only: every latent component keeps a margin from zero
        // across the whole finite-difference stencil, so no rectifier kink is
        // crossed between the evaluation points.
        let x = 'search: {
            for _ in 0..500 {
                let cand: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
                let mut stencil = vec![cand.clone()];
                for j in 0..n {
                    for s in [-H, H] {
                        let mut p = cand.clone();
                        p[j] += s;
                        stencil.push(p);
                    }
                }
                let base = compiled.latent(&cand);
                let smooth = stencil.iter().all(|p| {
                    compiled
                        .latent(p)
                        .iter()
                        .zip(&base)
                        .all(|(&v, &b)| v.abs() >= 1e-6 && v.signum() == b.signum())
                });
                if smooth {
                    break 'search cand;
                }
            }
            panic!("no smooth point found for trial {t}");
        };

        let (value, dx, dparams) = model.eval_gradients(&g, &x).unwrap();
        assert!((value - compiled.value(&x)).abs() <= 1e-12);

        for j in 0..n {
            let mut lo = x.clone();
            let mut hi = x.clone();
            lo[j] -= H;
            hi[j] += H;
            let fd = (compiled.value(&hi) - compiled.value(&lo)) / (2.0 * H);
            let err = rel(dx[j], fd);
            assert!(
                err <= TOL,
                "trial {t} ({arch:?}) d/dx[{j}]: analytic {} vs fd {fd}, rel err {err:.3e}",
                dx[j]
            );
            checked_x += 1;
        }

        let params = model.params().to_vec();
        for i in 0..params.len() {
            let mut m = model.clone();
            let mut p = params.clone();
            p[i] += H;
            m.set_params(p.clone()).unwrap();
            let hi = m.eval(&g, &x).unwrap();
            p[i] -= 2.0 * H;
            m.set_params(p).unwrap();
            let lo = m.eval(&g, &x).unwrap();
            let fd = (hi - lo) / (2.0 * H);
            let err = rel(dparams[i], fd);
            assert!(
                err <= TOL,
                "trial {t} ({arch:?}) d/dp[{i}]: analytic {} vs fd {fd}, rel err {err:.3e}",
                dparams[i]
            );
            checked_p += 1;
        }
    }
    assert_under(start, Duration::from_secs(30), "criterion 5");
    println!(
        "criterion 05 PASS: 500 smooth points, {checked_x} coordinate and {checked_p} parameter derivatives within 1e-5, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 6/7. Clique benchmark: mean ratio to the exact optimum; warping degrades it
// ---------------------------------------------------------------------------

fn clique_size(g: &GraphInstance, bits: &[u8]) -> usize {
    let chosen: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| (b == 1).then_some(i))
        .collect();
    let adj = g.adjacency();
    for (i, &u) in chosen.iter().enumerate() {
        for &v in &chosen[i + 1..] {
            if !adj[u].contains(&v) {
                return 0;
            }
        }
    }
    chosen.len()
}

fn clique_benchmark(warped: bool) -> (f64, usize) {
    let opt = OptimizeConfig { steps: 1000, penalty_ramp: 0.5, ..OptimizeConfig::default() };
    let mut ratios = Vec::new();
    let mut violations = 0usize;
    for i in 0..50u64 {
        let mut rng = rng_from_seed(child_seed(0xAC06, i));
        let g = GraphInstance::erdos_renyi(20, 0.5, &mut rng).unwrap();
        let m = g.edge_count() as f64;
        let oracle = max_clique_exact(&g).unwrap();
        // The warped variant wraps the already-nonnegative objective, so its
        // declared shift is zero; vertices are unchanged by the warp.
        let f: Box<dyn Relaxation> = if warped {
            Box::new(Warped::new(CliqueObjective::from_instance(&g, m)))
        } else {
            Box::new(CliqueObjective::from_instance(&g, 0.0))
        };
        let spec = SolveSpec {
            problem: "maxclique".into(),
            f,
            gs: vec![Box::new(CliqueConflicts::from_instance(&g))],
            exact_cost: None,
            beta: Some(clique_beta_bound(g.edge_count())),
            shift: Some(if warped { 0.0 } else { m }),
            objective_is_exact: !warped,
        };
        let res = solve(spec, &opt, RoundOrder::ByValue).unwrap();
        if res.guarantee_applicable && !res.guarantee_holds {
            violations += 1;
        }
        ratios.push(clique_size(&g, &res.rounded) as f64 / oracle.size as f64);
    }
    (ratios.iter().sum::<f64>() / ratios.len() as f64, violations)
}

#[test]
fn criterion_06_clique_pipeline_mean_ratio() {
    let start = Instant::now();
    let (mean, violations) = clique_benchmark(false);
    assert_eq!(violations, 0, "guarantee violations in the clique benchmark");
    assert!(mean >= 0.80, "mean clique ratio {mean:.3} < 0.80");
    assert_under(start, Duration::from_secs(300), "criterion 6");
    println!(
        "criterion 06 PASS: mean found/optimal clique ratio {mean:.3} over 50 graphs, {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_07_warped_objective_degrades_ratio() {
    let start = Instant::now();
    let (plain, _) = clique_benchmark(false);
    let (warped, _) = clique_benchmark(true);
    assert!(
        warped < plain,
        "warped ratio {warped:.3} not strictly below plain ratio {plain:.3}"
    );
    assert_under(start, Duration::from_secs(300), "criterion 7");
    println!(
        "criterion 07 PASS: warped mean ratio {warped:.3} < plain {plain:.3}, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 8. Learned affine proxies solve covering and matching grids near-optimally
// ---------------------------------------------------------------------------

struct FamilyOutcome {
    infeasible: usize,
    violations: usize,
    gaps: Vec<f64>,
}

fn proxy_family_benchmark(
    rule: WeightRule,
    rows: usize,
    cols: usize,
    train_steps: usize,
    opt: &OptimizeConfig,
) -> FamilyOutcome {
    let family = match rule {
        WeightRule::Covering => Family::Covering { rows, cols, attr_max: 100 },
        WeightRule::Matching => Family::Matching { rows, cols, attr_max: 100 },
    };
    let train = sample_dataset(&DatasetConfig {
        family: family.clone(),
        count: 400,
        seed: 0xAC08,
    })
    .unwrap();
    let tc = TrainConfig { steps: train_steps, ..TrainConfig::default() };
    let (model, _) = train_proxy(&train, ProxyArch::Aff, &tc).unwrap();

    let test = sample_dataset(&DatasetConfig { family, count: 50, seed: 0xAC08 ^ 1 }).unwrap();
    let mut out = FamilyOutcome { infeasible: 0, violations: 0, gaps: Vec::new() };
    for (g, _) in &test.pairs {
        let w = edge_cost_vector(g, rule).unwrap();
        let constraint: Box<dyn Relaxation> = match rule {
            WeightRule::Covering => Box::new(CoverPenalty::from_instance(g)),
            WeightRule::Matching => Box::new(MatchingPenalty::from_instance(g)),
        };
        let feasible = |bits: &[u8]| constraint.value(&binary_to_f64(bits)) < 1.0;
        let cost = |bits: &[u8]| -> f64 {
            w.iter().zip(bits).map(|(&c, &b)| c * f64::from(b)).sum()
        };
        let oracle = brute_force(&cost, &feasible, w.len()).unwrap();
        let spec = SolveSpec {
            problem: "proxy-bench".into(),
            f: Box::new(model.compile(g).unwrap()),
            gs: vec![match rule {
                WeightRule::Covering => Box::new(CoverPenalty::from_instance(g)),
                WeightRule::Matching => Box::new(MatchingPenalty::from_instance(g)),
            }],
            exact_cost: None,
            beta: None,
            shift: None,
            objective_is_exact: false,
        };
        let res = solve(spec, opt, RoundOrder::ByConfidence).unwrap();
        if res.guarantee_applicable && !res.guarantee_holds {
            out.violations += 1;
        }
        if !res.feasible {
            out.infeasible += 1;
            continue;
        }
        out.gaps
            .push((cost(&res.rounded) - oracle.best_value) / oracle.best_value.max(1e-12));
    }
    out
}

#[test]
fn criterion_08_trained_proxy_cover_and_matching() {
    let start = Instant::now();
    let cover_opt = OptimizeConfig { steps: 800, ..OptimizeConfig::default() };
    let matching_opt =
        OptimizeConfig { steps: 1500, restarts: 16, ..OptimizeConfig::default() };
    let cover = proxy_family_benchmark(WeightRule::Covering, 3, 3, 3000, &cover_opt);
    let matching = proxy_family_benchmark(WeightRule::Matching, 3, 4, 5000, &matching_opt);

    let infeasible = cover.infeasible + matching.infeasible;
    let violations = cover.violations + matching.violations;
    let all_gaps: Vec<f64> = cover.gaps.iter().chain(&matching.gaps).copied().collect();
    let mean_gap = all_gaps.iter().sum::<f64>() / all_gaps.len() as f64;

    assert_eq!(violations, 0, "guarantee violations in proxy benchmarks");
    assert_eq!(infeasible, 0, "rounded solutions must all be feasible");
    assert_eq!(all_gaps.len(), 100);
    assert!(mean_gap <= 0.10, "mean optimality gap {:.2}% > 10%", mean_gap * 100.0);
    assert_under(start, Duration::from_secs(600), "criterion 8");
    println!(
        "criterion 08 PASS: 100/100 feasible, mean gap {:.2}% (cover {:.2}%, matching {:.2}%), {:?}",
        mean_gap * 100.0,
        cover.gaps.iter().sum::<f64>() / cover.gaps.len() as f64 * 100.0,
        matching.gaps.iter().sum::<f64>() / matching.gaps.len() as f64 * 100.0,
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 9. Projected concave head recovers the optimum at least as often as an
//    unprojected model rounded by thresholding
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_projected_concave_head_recovers_at_least_threshold() {
    let start = Instant::now();
    let ds = sample_dataset(&DatasetConfig {
        family: Family::Toy { config_max: 60.0 },
        count: 512,
        seed: 0xAC09,
    })
    .unwrap();
    let tc = TrainConfig { steps: 4000, ..TrainConfig::default() };
    let (projected, _) = train_proxy(&ds, ProxyArch::Con, &tc).unwrap();
    let tc_free = TrainConfig { projection: false, ..tc };
    let (unprojected, _) = train_proxy(&ds, ProxyArch::Con, &tc_free).unwrap();

    let opt = OptimizeConfig::default();
    let mut recovered_projected = 0usize;
    let mut recovered_threshold = 0usize;
    let mut total = 0usize;
    for i in 0..7 {
        for j in 0..7 {
            let (c1, c2) = (10.0 * i as f64, 10.0 * j as f64);
            let g = GraphInstance::single_edge(vec![c1], vec![c2]).unwrap();
            let truth = ToyObjective::from_config(c1, c2);
            let optimum = (0..4u32)
                .map(|m| truth.value(&[f64::from(m & 1), f64::from((m >> 1) & 1)]))
                .fold(f64::INFINITY, f64::min);

            let spec = SolveSpec {
                problem: "toy".into(),
                f: Box::new(projected.compile(&g).unwrap()),
                gs: vec![],
                exact_cost: None,
                beta: None,
                shift: None,
                objective_is_exact: false,
            };
            let res = solve(spec, &opt, RoundOrder::ByConfidence).unwrap();
            let xa = binary_to_f64(&res.rounded);
            if (truth.value(&xa) - optimum).abs() < 1e-9 {
                recovered_projected += 1;
            }

            let compiled = unprojected.compile(&g).unwrap();
            let loss = PenalizedLoss::assemble(Box::new(compiled), vec![], 1.0).unwrap();
            let soft = optimize_relaxed(&loss, &opt).unwrap();
            let xb = binary_to_f64(&naive_threshold_round(&soft.x));
            if (truth.value(&xb) - optimum).abs() < 1e-9 {
                recovered_threshold += 1;
            }
            total += 1;
        }
    }
    assert!(
        recovered_projected >= recovered_threshold,
        "projected head recovered {recovered_projected}/{total}, threshold baseline {recovered_threshold}/{total}"
    );
    assert_under(start, Duration::from_secs(300), "criterion 9");
    println!(
        "criterion 09 PASS: projected {recovered_projected}/{total} >= threshold {recovered_threshold}/{total}, {:?}",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 10. Two independent exhaustive searches agree exactly
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_brute_force_implementations_agree() {
    let start = Instant::now();
    for t in 0..100u64 {
        let mut rng = rng_from_seed(child_seed(0xAC10, t));
        let beta: f64 = rng.gen_range(0.5..10.0);
        let (table, g_pen, n): (BooleanTable, Box<dyn Relaxation>, usize) = if t % 2 == 0 {
            let n = 4 + t as usize % 13;
            let budget = rng.gen_range(1..n);
            (
                BooleanTable::random(n, -6.0..6.0, &mut rng).unwrap(),
                Box::new(CardinalityPenalty::new(n, budget).unwrap()),
                n,
            )
        } else {
            let g = loop {
                let cand = random_attr_graph(6, 0.5, 1, &mut rng);
                if (4..=16).contains(&cand.edge_count()) {
                    break cand;
                }
            };
            let m = g.edge_count();
            (
                BooleanTable::random(m, -6.0..6.0, &mut rng).unwrap(),
                Box::new(CoverPenalty::from_instance(&g)),
                m,
            )
        };
        let value = |bits: &[u8]| {
            table.at_binary(bits).unwrap() + beta * g_pen.value(&binary_to_f64(bits))
        };
        let feasible = |bits: &[u8]| g_pen.value(&binary_to_f64(bits)) < 1.0;
        let a = brute_force(&value, &feasible, n);
        let b = brute_force_recursive(&value, &feasible, n);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.best_value, b.best_value, "instance {t}: optimal values differ");
                assert_eq!(a.best_assignment, b.best_assignment, "instance {t}");
                assert_eq!(a.feasible_count, b.feasible_count, "instance {t}");
            }
            (Err(_), Err(_)) => {} // both agree the instance is infeasible
            (a, b) => panic!("instance {t}: one search failed, the other did not: {a:?} / {b:?}"),
        }
    }
    println!(
        "criterion 10 PASS: 100 penalized instances, identical optima from both searches, {:?}",
        start.elapsed()
    );
}
