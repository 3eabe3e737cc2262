//! Reference optimizers and exhaustive oracles the pipeline is measured against.
//!
//! The two brute-force enumerators are deliberately written against different
//! traversal schemes (mask counting vs. depth-first recursion) and share only the
//! tie rule — lexicographically smallest assignment — so agreement between them is
//! meaningful evidence of correctness. The stochastic searches (annealing, genetic)
//! are classic textbook forms with fixed, documented hyperparameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphInstance;
use crate::objectives::MAX_ENUMERATION_ARITY;
use crate::rng::rng_from_seed;

/// Outcome of an exhaustive search: the minimizing feasible assignment under the
/// lexicographic tie rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_assignment: Vec<u8>,
    pub best_value: f64,
    pub feasible_count: usize,
    pub evaluations: usize,
}

/// Outcome of a stochastic search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_assignment: Vec<u8>,
    pub best_value: f64,
    pub evaluations: usize,
}

fn lex_smaller(a: &[u8], b: &[u8]) -> bool {
    a.iter().lt(b.iter())
}

/// Exhaustive minimization of `f` over the feasible binary points by mask
/// counting. Ties go to the lexicographically smallest assignment.
pub fn brute_force<F, G>(f: F, feasible: G, n: usize) -> Result<OracleResult>
where
    F: Fn(&[u8]) -> f64,
    G: Fn(&[u8]) -> bool,
{
    if n > MAX_ENUMERATION_ARITY {
        return Err(Error::EnumerationTooLarge(n, MAX_ENUMERATION_ARITY));
    }
    let mut bits = vec![0u8; n];
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut feasible_count = 0usize;
    let total = 1usize << n;
    for mask in 0..total {
        for (j, b) in bits.iter_mut().enumerate() {
            *b = (mask >> j & 1) as u8;
        }
        if !feasible(&bits) {
            continue;
        }
        feasible_count += 1;
        let v = f(&bits);
        let better = match &best {
            None => true,
            Some((a, bv)) => v < *bv || (v == *bv && lex_smaller(&bits, a)),
        };
        if better {
            best = Some((bits.clone(), v));
        }
    }
    let (best_assignment, best_value) = best.ok_or(Error::Infeasible)?;
    Ok(OracleResult {
        best_assignment,
        best_value,
        feasible_count,
        evaluations: total,
    })
}

/// Exhaustive minimization by depth-first recursion over coordinates; an
/// independent implementation of the same contract as [`brute_force`].
pub fn brute_force_recursive<F, G>(f: F, feasible: G, n: usize) -> Result<OracleResult>
where
    F: Fn(&[u8]) -> f64,
    G: Fn(&[u8]) -> bool,
{
    if n > MAX_ENUMERATION_ARITY {
        return Err(Error::EnumerationTooLarge(n, MAX_ENUMERATION_ARITY));
    }
    struct State<'a, F, G> {
        f: &'a F,
        feasible: &'a G,
        bits: Vec<u8>,
        best: Option<(Vec<u8>, f64)>,
        feasible_count: usize,
        evaluations: usize,
    }
    fn descend<F, G>(s: &mut State<F, G>, depth: usize)
    where
        F: Fn(&[u8]) -> f64,
        G: Fn(&[u8]) -> bool,
    {
        if depth == s.bits.len() {
            s.evaluations += 1;
            if !(s.feasible)(&s.bits) {
                return;
            }
            s.feasible_count += 1;
            let v = (s.f)(&s.bits);
            let better = match &s.best {
                None => true,
                Some((a, bv)) => v < *bv || (v == *bv && lex_smaller(&s.bits, a)),
            };
            if better {
                s.best = Some((s.bits.clone(), v));
            }
            return;
        }
        for bit in [0u8, 1u8] {
            s.bits[depth] = bit;
            descend(s, depth + 1);
        }
        s.bits[depth] = 0;
    }
    let mut state = State {
        f: &f,
        feasible: &feasible,
        bits: vec![0u8; n],
        best: None,
        feasible_count: 0,
        evaluations: 0,
    };
    descend(&mut state, 0);
    let (best_assignment, best_value) = state.best.ok_or(Error::Infeasible)?;
    Ok(OracleResult {
        best_assignment,
        best_value,
        feasible_count: state.feasible_count,
        evaluations: state.evaluations,
    })
}

// ---------------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------------

/// Geometric cooling ladder with Metropolis acceptance. At each of the
/// `jumps_per_level` jumps per temperature level, a single uniformly chosen bit
/// flip is proposed with probability `mutation_prob` (otherwise the jump is a
/// no-op), and accepted when it does not worsen the value or with probability
/// `exp(-delta / t)` otherwise. The best point ever visited is returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub t_initial: f64,
    pub t_factor: f64,
    pub t_final: f64,
    pub jumps_per_level: usize,
    pub mutation_prob: f64,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            t_initial: 1000.0,
            t_factor: 0.99,
            t_final: 699.0,
            jumps_per_level: 20,
            mutation_prob: 0.1,
            seed: 0,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<()> {
        if !(self.t_initial > 0.0 && self.t_final > 0.0) {
            return Err(Error::InvalidArgument("temperatures must be positive".into()));
        }
        if !(self.t_factor > 0.0 && self.t_factor < 1.0) {
            return Err(Error::InvalidArgument(
                "cooling factor must lie in (0, 1)".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::InvalidArgument(
                "mutation probability must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Number of temperature levels the ladder visits.
    pub fn levels(&self) -> usize {
        let mut t = self.t_initial;
        let mut count = 0;
        while t >= self.t_final {
            count += 1;
            t *= self.t_factor;
        }
        count
    }
}

/// Minimizes `f` over `{0,1}^n` by simulated annealing. `init` fixes the starting
/// point; `None` draws it uniformly from the seed.
pub fn simulated_annealing<F>(
    f: F,
    n: usize,
    init: Option<&[u8]>,
    cfg: &SaConfig,
) -> Result<SearchResult>
where
    F: Fn(&[u8]) -> f64,
{
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut x: Vec<u8> = match init {
        Some(bits) => {
            if bits.len() != n {
                return Err(Error::ArityMismatch { expected: n, got: bits.len() });
            }
            bits.to_vec()
        }
        None => (0..n).map(|_| rng.gen_range(0..=1u8)).collect(),
    };
    let mut value = f(&x);
    let mut evaluations = 1usize;
    let mut best = x.clone();
    let mut best_value = value;
    let mut t = cfg.t_initial;
    while t >= cfg.t_final {
        for _ in 0..cfg.jumps_per_level {
            if rng.gen::<f64>() >= cfg.mutation_prob {
                continue;
            }
            let j = rng.gen_range(0..n);
            x[j] ^= 1;
            let candidate = f(&x);
            evaluations += 1;
            let delta = candidate - value;
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp();
            if accept {
                value = candidate;
                if value < best_value {
                    best_value = value;
                    best.copy_from_slice(&x);
                }
            } else {
                x[j] ^= 1;
            }
        }
        t *= cfg.t_factor;
    }
    Ok(SearchResult { best_assignment: best, best_value, evaluations })
}

// ---------------------------------------------------------------------------
// Genetic search
// ---------------------------------------------------------------------------

/// Generational genetic algorithm: tournament selection, uniform crossover,
/// per-bit mutation, elitism, best-ever tracking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub tournament: usize,
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 256,
            generations: 100,
            crossover_prob: 0.6,
            mutation_prob: 0.01,
            tournament: 2,
            elitism: 1,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.population == 0 || self.tournament == 0 {
            return Err(Error::InvalidArgument(
                "population and tournament size must be at least 1".into(),
            ));
        }
        if self.elitism > self.population {
            return Err(Error::InvalidArgument(
                "elitism cannot exceed the population".into(),
            ));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} probability must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Minimizes `f` over `{0,1}^n` with a genetic search.
pub fn genetic_search<F>(f: F, n: usize, cfg: &GaConfig) -> Result<SearchResult>
where
    F: Fn(&[u8]) -> f64,
{
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut population: Vec<Vec<u8>> = (0..cfg.population)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=1u8)).collect())
        .collect();
    let mut fitness: Vec<f64> = population.iter().map(|x| f(x)).collect();
    let mut evaluations = cfg.population;
    let (mut best, mut best_value) = {
        let i = argmin(&fitness);
        (population[i].clone(), fitness[i])
    };

    for _ in 0..cfg.generations {
        // Rank by fitness to seed elites.
        let mut order: Vec<usize> = (0..cfg.population).collect();
        order.sort_by(|&a, &b| fitness[a].partial_cmp(&fitness[b]).expect("finite fitness"));
        let mut next: Vec<Vec<u8>> = order[..cfg.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < cfg.population {
            let a = tournament_pick(&fitness, cfg.tournament, &mut rng);
            let mut child: Vec<u8> = if rng.gen::<f64>() < cfg.crossover_prob {
                let b = tournament_pick(&fitness, cfg.tournament, &mut rng);
                (0..n)
                    .map(|j| {
                        if rng.gen::<bool>() {
                            population[a][j]
                        } else {
                            population[b][j]
                        }
                    })
                    .collect()
            } else {
                population[a].clone()
            };
            for bit in child.iter_mut() {
                if rng.gen::<f64>() < cfg.mutation_prob {
                    *bit ^= 1;
                }
            }
            next.push(child);
        }
        population = next;
        fitness = population.iter().map(|x| f(x)).collect();
        evaluations += cfg.population;
        let i = argmin(&fitness);
        if fitness[i] < best_value {
            best_value = fitness[i];
            best = population[i].clone();
        }
    }
    Ok(SearchResult { best_assignment: best, best_value, evaluations })
}

fn argmin(values: &[f64]) -> usize {
    let mut idx = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[idx] {
            idx = i;
        }
    }
    idx
}

fn tournament_pick<R: Rng>(fitness: &[f64], k: usize, rng: &mut R) -> usize {
    let mut winner = rng.gen_range(0..fitness.len());
    for _ in 1..k {
        let challenger = rng.gen_range(0..fitness.len());
        if fitness[challenger] < fitness[winner] {
            winner = challenger;
        }
    }
    winner
}

// ---------------------------------------------------------------------------
// Naive rounding and the clique oracle
// ---------------------------------------------------------------------------

/// Rounds each coordinate independently at 1/2 (ties upward). The comparison
/// baseline for sequential rounding.
pub fn naive_threshold_round(soft: &[f64]) -> Vec<u8> {
    soft.iter().map(|&v| u8::from(v >= 0.5)).collect()
}

/// Exact maximum clique by bitmask enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueOracle {
    /// Indicator of a maximum clique (lowest mask among ties).
    pub best_assignment: Vec<u8>,
    pub size: usize,
    pub evaluations: usize,
}

pub fn max_clique_exact(g: &GraphInstance) -> Result<CliqueOracle> {
    let n = g.node_count();
    if n > MAX_ENUMERATION_ARITY {
        return Err(Error::EnumerationTooLarge(n, MAX_ENUMERATION_ARITY));
    }
    let mut adj = vec![0u32; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let total = 1u32 << n;
    let mut best_mask = 0u32;
    let mut best_size = 0u32;
    for mask in 0..total {
        let size = mask.count_ones();
        if size <= best_size {
            continue;
        }
        let mut is_clique = true;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // Every other member must be a neighbor of v.
            if mask & adj[v] != mask & !(1 << v) {
                is_clique = false;
                break;
            }
        }
        if is_clique {
            best_mask = mask;
            best_size = size;
        }
    }
    let best_assignment = (0..n).map(|v| ((best_mask >> v) & 1) as u8).collect();
    Ok(CliqueOracle {
        best_assignment,
        size: best_size as usize,
        evaluations: total as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::BooleanTable;

    #[test]
    fn brute_forces_agree_on_random_tables() {
        let mut rng = rng_from_seed(12);
        for _ in 0..25 {
            let n = rng.gen_range(1..8);
            let table = BooleanTable::random(n, -10.0..10.0, &mut rng).unwrap();
            let f = |bits: &[u8]| table.at_binary(bits).unwrap();
            let a = brute_force(f, |_| true, n).unwrap();
            let b = brute_force_recursive(f, |_| true, n).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.evaluations, 1 << n);
            assert_eq!(a.feasible_count, 1 << n);
        }
    }

    #[test]
    fn brute_force_respects_feasibility_and_reports_infeasible() {
        // Minimize -(number of ones) subject to at most one 1.
        let f = |bits: &[u8]| -(bits.iter().map(|&b| b as f64).sum::<f64>());
        let feasible = |bits: &[u8]| bits.iter().map(|&b| b as usize).sum::<usize>() <= 1;
        let r = brute_force(f, feasible, 3).unwrap();
        assert_eq!(r.best_value, -1.0);
        assert_eq!(r.feasible_count, 4);
        // Lexicographic tie rule: (0,0,1), (0,1,0), (1,0,0) all score -1.
        assert_eq!(r.best_assignment, vec![0, 0, 1]);
        let r2 = brute_force_recursive(f, feasible, 3).unwrap();
        assert_eq!(r, r2);

        let nothing = brute_force(f, |_| false, 3);
        assert!(matches!(nothing, Err(Error::Infeasible)));
        assert!(matches!(
            brute_force(f, |_| true, 25),
            Err(Error::EnumerationTooLarge(25, _))
        ));
    }

    #[test]
    fn constant_objective_ties_to_all_zeros() {
        let f = |_: &[u8]| 1.5;
        let a = brute_force(f, |_| true, 4).unwrap();
        let b = brute_force_recursive(f, |_| true, 4).unwrap();
        assert_eq!(a.best_assignment, vec![0; 4]);
        assert_eq!(a, b);
    }

    #[test]
    fn annealing_ladder_has_the_documented_length() {
        assert_eq!(SaConfig::default().levels(), 36);
    }

    #[test]
    fn annealing_never_loses_to_its_start_and_is_deterministic() {
        let mut rng = rng_from_seed(3);
        let table = BooleanTable::random(6, -4.0..4.0, &mut rng).unwrap();
        let f = |bits: &[u8]| table.at_binary(bits).unwrap();
        let init = vec![1u8, 0, 1, 0, 1, 0];
        let cfg = SaConfig { seed: 11, ..SaConfig::default() };
        let r1 = simulated_annealing(&f, 6, Some(&init), &cfg).unwrap();
        let r2 = simulated_annealing(&f, 6, Some(&init), &cfg).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.best_value <= f(&init));
        // Budget: one initial evaluation plus at most one per jump.
        assert!(r1.evaluations <= 1 + 36 * cfg.jumps_per_level);
        assert!(r1.evaluations >= 1);
    }

    #[test]
    fn zero_jump_annealing_returns_the_start() {
        let f = |bits: &[u8]| bits[0] as f64;
        let cfg = SaConfig { jumps_per_level: 0, ..SaConfig::default() };
        let r = simulated_annealing(&f, 2, Some(&[1, 1]), &cfg).unwrap();
        assert_eq!(r.best_assignment, vec![1, 1]);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn genetic_search_finds_small_optima_and_is_deterministic() {
        let mut rng = rng_from_seed(8);
        let table = BooleanTable::random(4, -6.0..6.0, &mut rng).unwrap();
        let f = |bits: &[u8]| table.at_binary(bits).unwrap();
        let oracle = brute_force(&f, |_| true, 4).unwrap();
        let cfg = GaConfig { generations: 20, seed: 5, ..GaConfig::default() };
        let r1 = genetic_search(&f, 4, &cfg).unwrap();
        let r2 = genetic_search(&f, 4, &cfg).unwrap();
        assert_eq!(r1, r2);
        // 256 random individuals over {0,1}^4 cover the cube with overwhelming
        // probability; the search must land on the exact optimum here.
        assert_eq!(r1.best_value, oracle.best_value);
    }

    #[test]
    fn threshold_rounding_ties_upward() {
        assert_eq!(naive_threshold_round(&[0.49, 0.5, 0.51, 0.0, 1.0]), vec![0, 1, 1, 0, 1]);
    }

    #[test]
    fn clique_oracle_matches_known_graphs() {
        // Triangle with a pendant tail: maximum clique 3.
        let g = GraphInstance::new(
            4,
            vec![(0, 1), (0, 2), (1, 2), (2, 3)],
            vec![vec![0.0]; 4],
            None,
        )
        .unwrap();
        let r = max_clique_exact(&g).unwrap();
        assert_eq!(r.size, 3);
        assert_eq!(r.best_assignment, vec![1, 1, 1, 0]);

        // 5-cycle: no triangles, maximum clique is an edge.
        let c5 = GraphInstance::new(
            5,
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)],
            vec![vec![0.0]; 5],
            None,
        )
        .unwrap();
        assert_eq!(max_clique_exact(&c5).unwrap().size, 2);
    }

    #[test]
    fn clique_oracle_agrees_with_brute_force() {
        let mut rng = rng_from_seed(21);
        for trial in 0..10 {
            let g = GraphInstance::erdos_renyi(9, 0.5, &mut rng).unwrap();
            let oracle = max_clique_exact(&g).unwrap();
            // Independent check: minimize -(ones) over vertex sets that form
            // cliques.
            let edges = g.edges().to_vec();
            let is_clique = |bits: &[u8]| {
                for u in 0..9 {
                    for v in (u + 1)..9 {
                        if bits[u] == 1
                            && bits[v] == 1
                            && !edges.contains(&(u, v))
                            && !edges.contains(&(v, u))
                        {
                            return false;
                        }
                    }
                }
                true
            };
            let f = |bits: &[u8]| -(bits.iter().map(|&b| b as f64).sum::<f64>());
            let bf = brute_force(f, is_clique, 9).unwrap();
            assert_eq!(
                oracle.size,
                (-bf.best_value) as usize,
                "trial {trial}: oracle {} vs brute force {}",
                oracle.size,
                -bf.best_value
            );
        }
    }
}
