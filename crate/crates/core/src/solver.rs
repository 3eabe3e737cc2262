//! First-order optimization of the penalized relaxation over `[0,1]^n`, sequential
//! rounding to a binary point, and runtime verification of the feasibility
//! guarantee.
//!
//! The pipeline a [`solve`] call runs:
//!
//! 1. shift the objective so its binary minimum is nonnegative (declared by the
//!    caller or certified by enumeration),
//! 2. pick the penalty weight `beta` above the feasible maximum of the shifted
//!    objective (again declared or enumerated),
//! 3. minimize `l(x) = f(x) + beta * sum_j g_j(x)` over the relaxed cube with
//!    momentum gradient descent under a logistic or clipped parameterization,
//! 4. round coordinates to `{0,1}` one at a time, always taking the branch with the
//!    lower loss, and
//! 5. check the guarantee: when the relaxations are entry-wise concave, the
//!    objective is nonnegative on binary points, and the relaxed loss came out
//!    below `beta`, the rounded point must be feasible with objective value no
//!    worse than the relaxed loss. A violation of that implication is a bug, and
//!    callers treat it as one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::binary_to_f64;
use crate::multilinear::{check_relaxation_concave, DEFAULT_CHECK_TOL};
use crate::objectives::{
    beta_margin, enumerate_bounds, BetaBound, BetaProvenance, PenalizedLoss, Shifted,
    MAX_ENUMERATION_ARITY,
};
use crate::relaxation::Relaxation;
use crate::rng::{child_seed, rng_from_seed};

/// Trials used for the sampled entry-wise concavity checks inside [`solve`].
pub const DEFAULT_STRUCTURE_TRIALS: usize = 128;

/// Relative slack when testing `f(X) <= l_r(x)`: rounding that never strictly
/// improves (already-binary input, exact ties) legitimately ends at equality, and
/// the comparison must not fail on the last floating-point bit.
const GUARANTEE_REL_TOL: f64 = 1e-9;

/// Largest arity for which a caller-declared shift is re-verified by exhaustive
/// enumeration (cheap insurance against wrong declarations).
const SHIFT_VERIFY_MAX_ARITY: usize = 16;

// ---------------------------------------------------------------------------
// Relaxed optimization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// Optimize logits `z` with `x = sigmoid(z)`: iterates stay strictly inside the
    /// cube and saturate smoothly.
    Logistic,
    /// Optimize `x` directly, clamping to `[0,1]` after every step.
    Clipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeConfig {
    pub restarts: usize,
    pub steps: usize,
    pub step_size: f64,
    pub momentum: f64,
    pub parameterization: Parameterization,
    /// Each restart draws the starting point uniformly from `[init_lo, init_hi]^n`.
    pub init_lo: f64,
    pub init_hi: f64,
    /// Fraction of the descent (from the front) over which the penalty weight is
    /// ramped linearly from 0 up to the assembled value. With a large penalty
    /// weight the constraint term can dominate every gradient from the first
    /// step and drag all coordinates to zero before the objective has any say;
    /// annealing the weight lets structure form first and prunes it afterwards.
    /// `0.0` (the default) keeps the weight fixed. The final loss is always
    /// reported at the full weight.
    pub penalty_ramp: f64,
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            restarts: 8,
            steps: 500,
            step_size: 0.05,
            momentum: 0.9,
            parameterization: Parameterization::Logistic,
            init_lo: 0.2,
            init_hi: 0.8,
            penalty_ramp: 0.0,
            seed: 0,
        }
    }
}

impl OptimizeConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("need at least one restart".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument("step size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument("momentum must lie in [0, 1)".into()));
        }
        if !(self.init_lo > 0.0 && self.init_hi < 1.0 && self.init_lo <= self.init_hi) {
            return Err(Error::InvalidArgument(
                "initialization range must satisfy 0 < lo <= hi < 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.penalty_ramp) {
            return Err(Error::InvalidArgument(
                "penalty ramp must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Best soft assignment across restarts, with its loss and the restart that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub x: Vec<f64>,
    pub loss: f64,
    pub restart: usize,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Logit bound for the logistic parameterization. Unbounded logits saturate so
/// hard that a coordinate pushed toward a corner early in the descent can never
/// be pulled back (the `x (1 - x)` factor vanishes); this keeps every
/// coordinate responsive while still allowing values within ~3e-4 of binary.
const LOGIT_BOUND: f64 = 8.0;

fn descend(
    loss: &PenalizedLoss,
    x0: &[f64],
    cfg: &OptimizeConfig,
) -> Result<Vec<f64>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    // Logits when the logistic parameterization is active.
    let mut z: Vec<f64> = match cfg.parameterization {
        Parameterization::Logistic => x.iter().map(|&v| (v / (1.0 - v)).ln()).collect(),
        Parameterization::Clipped => vec![],
    };
    let ramp_steps = (cfg.penalty_ramp * cfg.steps as f64).round() as usize;
    let mut velocity = vec![0.0; n];
    let mut grad = vec![0.0; n];
    for step in 0..cfg.steps {
        let beta = if ramp_steps > 0 && step < ramp_steps {
            loss.beta() * step as f64 / ramp_steps as f64
        } else {
            loss.beta()
        };
        loss.gradient_with_beta(&x, beta, &mut grad);
        for (j, g) in grad.iter().enumerate() {
            if !g.is_finite() {
                return Err(Error::NonFinite { context: "relaxed gradient", index: j });
            }
        }
        match cfg.parameterization {
            Parameterization::Logistic => {
                for j in 0..n {
                    let gz = grad[j] * x[j] * (1.0 - x[j]);
                    velocity[j] = cfg.momentum * velocity[j] - cfg.step_size * gz;
                    z[j] = (z[j] + velocity[j]).clamp(-LOGIT_BOUND, LOGIT_BOUND);
                    x[j] = sigmoid(z[j]);
                }
            }
            Parameterization::Clipped => {
                for j in 0..n {
                    velocity[j] = cfg.momentum * velocity[j] - cfg.step_size * grad[j];
                    x[j] = (x[j] + velocity[j]).clamp(0.0, 1.0);
                }
            }
        }
    }
    Ok(x)
}

/// Minimizes a penalized relaxation over `[0,1]^n` with restarts; returns the
/// restart whose final point has the lowest full-weight loss. An unconstrained
/// relaxation can be optimized by assembling it with no penalty terms.
pub fn optimize_relaxed(
    loss: &PenalizedLoss,
    cfg: &OptimizeConfig,
) -> Result<OptimizeOutcome> {
    cfg.validate()?;
    let n = loss.arity();
    let mut best: Option<OptimizeOutcome> = None;
    for restart in 0..cfg.restarts {
        let mut rng = rng_from_seed(child_seed(cfg.seed, restart as u64));
        let x0: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(cfg.init_lo..=cfg.init_hi))
            .collect();
        let x = descend(loss, &x0, cfg)?;
        let value = loss.value(&x);
        if !value.is_finite() {
            return Err(Error::NonFinite { context: "relaxed loss", index: restart });
        }
        if best.as_ref().map_or(true, |b| value < b.loss) {
            best = Some(OptimizeOutcome { x, loss: value, restart });
        }
    }
    Ok(best.expect("at least one restart"))
}

// ---------------------------------------------------------------------------
// Sequential rounding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundOrder {
    /// Coordinates in index order.
    Index,
    /// Most confident first: decreasing `|x - 1/2|`.
    ByConfidence,
    /// Largest soft value first.
    ByValue,
}

impl RoundOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundOrder::Index => "index",
            RoundOrder::ByConfidence => "by_confidence",
            RoundOrder::ByValue => "by_value",
        }
    }
}

impl std::str::FromStr for RoundOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "index" => Ok(RoundOrder::Index),
            "by_confidence" => Ok(RoundOrder::ByConfidence),
            "by_value" => Ok(RoundOrder::ByValue),
            other => Err(Error::Parse(format!(
                "unknown rounding order {other:?}; expected index, by_confidence, or by_value"
            ))),
        }
    }
}

/// Rounded assignment plus the loss trace: the loss at the soft input, then the
/// loss after each coordinate is fixed. For entry-wise concave losses the trace is
/// non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    pub assignment: Vec<u8>,
    pub trace: Vec<f64>,
}

/// Fixes fractional coordinates one at a time, each to the branch with the lower
/// loss. Exact ties go to the branch with the lower constraint penalty, and if
/// that ties too, to 0. Coordinates already exactly binary are left untouched.
pub fn sequential_round(
    loss: &PenalizedLoss,
    soft: &[f64],
    order: RoundOrder,
) -> Result<RoundingOutcome> {
    if soft.len() != loss.arity() {
        return Err(Error::ArityMismatch { expected: loss.arity(), got: soft.len() });
    }
    for (j, &v) in soft.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "soft assignment coordinate {j} is {v}, outside [0, 1]"
            )));
        }
    }
    let mut x = soft.to_vec();
    let mut trace = vec![loss.value(&x)];
    let mut pending: Vec<usize> = (0..x.len())
        .filter(|&j| x[j] != 0.0 && x[j] != 1.0)
        .collect();
    match order {
        RoundOrder::Index => {}
        RoundOrder::ByConfidence => {
            // Stable sort keeps index order among exact ties.
            pending.sort_by(|&a, &b| {
                let ca = (x[a] - 0.5).abs();
                let cb = (x[b] - 0.5).abs();
                cb.partial_cmp(&ca).expect("finite confidences")
            });
        }
        RoundOrder::ByValue => {
            pending.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).expect("finite values"));
        }
    }
    for j in pending {
        x[j] = 0.0;
        let l0 = loss.value(&x);
        x[j] = 1.0;
        let l1 = loss.value(&x);
        let pick_one = if l1 < l0 {
            true
        } else if l0 < l1 {
            false
        } else {
            x[j] = 0.0;
            let g0 = loss.g_total(&x);
            x[j] = 1.0;
            let g1 = loss.g_total(&x);
            g1 < g0
        };
        x[j] = if pick_one { 1.0 } else { 0.0 };
        trace.push(if pick_one { l1 } else { l0 });
    }
    let assignment = x.iter().map(|&v| u8::from(v == 1.0)).collect();
    Ok(RoundingOutcome { assignment, trace })
}

// ---------------------------------------------------------------------------
// Guarantee verification
// ---------------------------------------------------------------------------

/// Everything the guarantee check measured. `guarantee_applicable` records whether
/// the preconditions held; `guarantee_holds` whether the conclusion did. By the
/// rounding theorem, applicable and not holding cannot happen together in a correct
/// build; callers surface that combination as a defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub l_r_initial: f64,
    /// Objective part of the loss at the rounded point (shift included).
    pub f_final: f64,
    /// Total constraint penalty at the rounded point.
    pub g_final: f64,
    pub per_constraint: Vec<f64>,
    /// Every individual constraint penalty is below 1.
    pub feasible: bool,
    pub lr_below_beta: bool,
    pub structure_ok: bool,
    pub concavity_sampled: bool,
    pub min_f_certified: bool,
    pub guarantee_applicable: bool,
    pub guarantee_holds: bool,
}

/// Evaluates the guarantee at a rounded point. The three precondition flags are
/// established by the caller: declared structure classes, sampled concavity checks,
/// and nonnegativity of the objective over binary points.
pub fn verify_guarantee(
    loss: &PenalizedLoss,
    l_r_initial: f64,
    rounded: &[u8],
    structure_ok: bool,
    concavity_sampled: bool,
    min_f_certified: bool,
) -> GuaranteeReport {
    let x = binary_to_f64(rounded);
    let f_final = loss.f_value(&x);
    let per_constraint: Vec<f64> = loss.constraints().iter().map(|g| g.value(&x)).collect();
    let g_final: f64 = per_constraint.iter().sum();
    let feasible = per_constraint.iter().all(|&v| v < 1.0);
    let lr_below_beta = l_r_initial < loss.beta();
    let guarantee_applicable =
        structure_ok && concavity_sampled && min_f_certified && lr_below_beta;
    let tol = GUARANTEE_REL_TOL * l_r_initial.abs().max(1.0);
    let guarantee_holds = g_final < 1.0 && f_final <= l_r_initial + tol;
    GuaranteeReport {
        l_r_initial,
        f_final,
        g_final,
        per_constraint,
        feasible,
        lr_below_beta,
        structure_ok,
        concavity_sampled,
        min_f_certified,
        guarantee_applicable,
        guarantee_holds,
    }
}

// ---------------------------------------------------------------------------
// End-to-end solve
// ---------------------------------------------------------------------------

/// Ground-truth cost of a binary assignment, when the caller knows one.
pub type ExactCost = Box<dyn Fn(&[u8]) -> f64 + Send + Sync>;

/// A problem handed to [`solve`]: the objective relaxation (unshifted), normalized
/// constraint penalties, and optional declarations that skip enumeration.
pub struct SolveSpec {
    /// Label copied into the result.
    pub problem: String,
    pub f: Box<dyn Relaxation>,
    pub gs: Vec<Box<dyn Relaxation>>,
    /// Evaluates the true objective at a binary point, when known. The reported
    /// `exact_objective` comes from this.
    pub exact_cost: Option<ExactCost>,
    /// Penalty weight. `None` enumerates binary points (arity <= 24) and adds a
    /// margin above the feasible maximum of the shifted objective.
    pub beta: Option<BetaBound>,
    /// Offset making `f + shift` nonnegative on binary points. `None` derives it
    /// by enumeration when the arity permits; otherwise the shift is 0 and the
    /// guarantee is reported as not applicable.
    pub shift: Option<f64>,
    /// Whether `f` restricted to binary points equals the true objective (up to
    /// the shift). False for learned surrogates.
    pub objective_is_exact: bool,
}

/// Full record of one solve: configuration echoes, the soft and rounded solutions,
/// the loss trace, and the guarantee verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub problem: String,
    pub order: RoundOrder,
    pub arity: usize,
    pub beta: f64,
    pub beta_provenance: BetaProvenance,
    pub shift: f64,
    pub restart: usize,
    pub soft: Vec<f64>,
    pub rounded: Vec<u8>,
    pub loss_trace: Vec<f64>,
    pub l_r_initial: f64,
    pub f_final: f64,
    pub g_final: f64,
    /// True objective at the rounded point when the problem provides an evaluator.
    pub exact_objective: Option<f64>,
    pub objective_is_exact: bool,
    pub structure_ok: bool,
    pub concavity_sampled: bool,
    pub lr_below_beta: bool,
    pub min_f_certified: bool,
    pub guarantee_applicable: bool,
    pub guarantee_holds: bool,
    pub feasible: bool,
}

/// Runs the relax-optimize-round-verify pipeline on one problem.
pub fn solve(spec: SolveSpec, opt: &OptimizeConfig, order: RoundOrder) -> Result<SolveResult> {
    let n = spec.f.arity();
    for g in &spec.gs {
        if g.arity() != n {
            return Err(Error::ArityMismatch { expected: n, got: g.arity() });
        }
    }

    // Exhaustive binary bounds, when anything below needs them.
    let needs_enum = spec.beta.is_none()
        || spec.shift.is_none()
        || (spec.shift.is_some() && n <= SHIFT_VERIFY_MAX_ARITY);
    let bounds = if needs_enum && n <= MAX_ENUMERATION_ARITY {
        let raw = |bits: &[u8]| spec.f.value(&binary_to_f64(bits));
        let feasible = |bits: &[u8]| {
            let x = binary_to_f64(bits);
            spec.gs.iter().all(|g| g.value(&x) < 1.0)
        };
        Some(enumerate_bounds(raw, feasible, n)?)
    } else {
        if spec.beta.is_none() || spec.shift.is_none() {
            // Without declarations there is no honest way to pick beta/shift.
            return Err(Error::EnumerationTooLarge(n, MAX_ENUMERATION_ARITY));
        }
        None
    };

    let (shift, min_f_certified) = match (spec.shift, &bounds) {
        (Some(s), Some(b)) => {
            if b.min_all + s < -1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "declared shift {s} leaves a binary objective value of {}",
                    b.min_all + s
                )));
            }
            (s, true)
        }
        // Declared and too large to double-check: trust the declaration.
        (Some(s), None) => (s, true),
        (None, Some(b)) => ((-b.min_all).max(0.0), true),
        (None, None) => unreachable!("enumeration required when shift is underived"),
    };

    let beta = match spec.beta {
        Some(b) => b,
        None => {
            let raw = bounds.as_ref().expect("enumeration ran when beta is underived");
            let max_feasible = raw.max_feasible.ok_or(Error::Infeasible)? + shift;
            BetaBound {
                value: max_feasible + beta_margin(max_feasible),
                provenance: BetaProvenance::Enumerated { max_feasible },
            }
        }
    };

    let shifted: Box<dyn Relaxation> = Box::new(Shifted::new(spec.f, shift));
    let loss = PenalizedLoss::assemble(shifted, spec.gs, beta.value)?;

    let structure_ok = loss.structure().supports_guarantee();
    let check_seed = child_seed(opt.seed, 0xC0FFEE);
    let mut concavity_sampled =
        check_relaxation_concave(loss.objective(), DEFAULT_STRUCTURE_TRIALS, DEFAULT_CHECK_TOL, check_seed)
            .passed;
    for (j, g) in loss.constraints().iter().enumerate() {
        concavity_sampled &= check_relaxation_concave(
            g.as_ref(),
            DEFAULT_STRUCTURE_TRIALS,
            DEFAULT_CHECK_TOL,
            child_seed(check_seed, j as u64 + 1),
        )
        .passed;
    }

    let outcome = optimize_relaxed(&loss, opt)?;
    let rounding = sequential_round(&loss, &outcome.x, order)?;
    let report = verify_guarantee(
        &loss,
        outcome.loss,
        &rounding.assignment,
        structure_ok,
        concavity_sampled,
        min_f_certified,
    );
    let exact_objective = spec.exact_cost.as_ref().map(|c| c(&rounding.assignment));

    Ok(SolveResult {
        problem: spec.problem,
        order,
        arity: n,
        beta: beta.value,
        beta_provenance: beta.provenance,
        shift,
        restart: outcome.restart,
        soft: outcome.x,
        rounded: rounding.assignment,
        loss_trace: rounding.trace,
        l_r_initial: report.l_r_initial,
        f_final: report.f_final,
        g_final: report.g_final,
        exact_objective,
        objective_is_exact: spec.objective_is_exact,
        structure_ok,
        concavity_sampled,
        lr_below_beta: report.lr_below_beta,
        min_f_certified,
        guarantee_applicable: report.guarantee_applicable,
        guarantee_holds: report.guarantee_holds,
        feasible: report.feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphInstance;
    use crate::multilinear::BooleanTable;
    use crate::objectives::{
        clique_beta_bound, maxclique_loss, toy_ground_truth_cost, CliqueConflicts,
        CliqueObjective, CoverPenalty, LinearObjective, ToyObjective,
    };
    use crate::rng::rng_from_seed;

    fn assemble(
        f: Box<dyn Relaxation>,
        gs: Vec<Box<dyn Relaxation>>,
        beta: f64,
    ) -> PenalizedLoss {
        PenalizedLoss::assemble(f, gs, beta).unwrap()
    }

    #[test]
    fn logistic_descent_solves_separable_linear() {
        // Minimizing 2 x0 - 3 x1 drives x toward (0, 1).
        let loss = assemble(
            Box::new(LinearObjective::new(vec![2.0, -3.0]).unwrap()),
            vec![],
            1.0,
        );
        let cfg = OptimizeConfig { restarts: 2, ..OptimizeConfig::default() };
        let out = optimize_relaxed(&loss, &cfg).unwrap();
        assert!(out.x[0] < 0.01, "x0 = {}", out.x[0]);
        assert!(out.x[1] > 0.99, "x1 = {}", out.x[1]);
        assert!(out.loss < -2.9);
    }

    #[test]
    fn clipped_descent_hits_the_corners_exactly() {
        let loss = assemble(
            Box::new(LinearObjective::new(vec![2.0, -3.0]).unwrap()),
            vec![],
            1.0,
        );
        let cfg = OptimizeConfig {
            restarts: 1,
            parameterization: Parameterization::Clipped,
            ..OptimizeConfig::default()
        };
        let out = optimize_relaxed(&loss, &cfg).unwrap();
        assert_eq!(out.x, vec![0.0, 1.0]);
    }

    #[test]
    fn optimizer_is_deterministic_in_the_seed() {
        let loss = assemble(
            Box::new(LinearObjective::new(vec![0.5, -0.25, 0.1]).unwrap()),
            vec![],
            1.0,
        );
        let cfg = OptimizeConfig { steps: 50, ..OptimizeConfig::default() };
        let a = optimize_relaxed(&loss, &cfg).unwrap();
        let b = optimize_relaxed(&loss, &cfg).unwrap();
        assert_eq!(a, b);
        let c = optimize_relaxed(&loss, &OptimizeConfig { seed: 1, steps: 50, ..cfg }).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn rounding_triangle_recovers_the_clique() {
        // Complete graph on 3 nodes: no conflict pairs, f = -(selected edges).
        let g = GraphInstance::complete(vec![vec![0.0]; 3]).unwrap();
        let f = CliqueObjective::from_instance(&g, 0.0);
        let loss = assemble(Box::new(f), vec![], 4.0);
        let out = sequential_round(&loss, &[0.9, 0.9, 0.9], RoundOrder::Index).unwrap();
        assert_eq!(out.assignment, vec![1, 1, 1]);
        let expect = [-2.43, -2.61, -2.8, -3.0];
        assert_eq!(out.trace.len(), expect.len());
        for (t, e) in out.trace.iter().zip(expect) {
            assert!((t - e).abs() < 1e-12, "trace {t} vs {e}");
        }
        // Monotone, as the structure promises.
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn rounding_trace_is_monotone_on_random_tables() {
        let mut rng = rng_from_seed(77);
        for _ in 0..50 {
            let arity = rng.gen_range(2..7);
            let table = BooleanTable::random(arity, -5.0..5.0, &mut rng).unwrap();
            let loss = assemble(Box::new(table), vec![], 100.0);
            let x: Vec<f64> = (0..arity).map(|_| rng.gen()).collect();
            let out = sequential_round(&loss, &x, RoundOrder::Index).unwrap();
            assert_eq!(out.trace.len(), arity + 1);
            for w in out.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "trace rose: {:?}", out.trace);
            }
        }
    }

    #[test]
    fn pure_ties_break_to_zero() {
        let table = BooleanTable::new(2, vec![3.0; 4]).unwrap();
        let loss = assemble(Box::new(table), vec![], 1.0);
        let out = sequential_round(&loss, &[0.5, 0.5], RoundOrder::Index).unwrap();
        assert_eq!(out.assignment, vec![0, 0]);
    }

    #[test]
    fn loss_ties_break_on_the_constraint_penalty() {
        // f = x, g = 1 - x, beta = 1: the loss is constant 1, but branch 1 has the
        // lower penalty, so the tie goes to 1.
        let f = LinearObjective::new(vec![1.0]).unwrap();
        let g = Shifted::new(LinearObjective::new(vec![-1.0]).unwrap(), 1.0);
        let loss = assemble(Box::new(f), vec![Box::new(g)], 1.0);
        let out = sequential_round(&loss, &[0.5], RoundOrder::Index).unwrap();
        assert_eq!(out.assignment, vec![1]);

        // Mirrored: f = 1 - x, g = x; branch 0 wins the penalty comparison.
        let f = Shifted::new(LinearObjective::new(vec![-1.0]).unwrap(), 1.0);
        let g = LinearObjective::new(vec![1.0]).unwrap();
        let loss = assemble(Box::new(f), vec![Box::new(g)], 1.0);
        let out = sequential_round(&loss, &[0.5], RoundOrder::Index).unwrap();
        assert_eq!(out.assignment, vec![0]);
    }

    #[test]
    fn binary_coordinates_are_left_untouched() {
        let table = BooleanTable::new(2, vec![0.0, 10.0, -1.0, 5.0]).unwrap();
        let loss = assemble(Box::new(table), vec![], 1.0);
        let out = sequential_round(&loss, &[1.0, 0.3], RoundOrder::Index).unwrap();
        assert_eq!(out.assignment[0], 1);
        assert_eq!(out.trace.len(), 2);

        let already = sequential_round(&loss, &[0.0, 1.0], RoundOrder::Index).unwrap();
        assert_eq!(already.assignment, vec![0, 1]);
        assert_eq!(already.trace.len(), 1);
    }

    #[test]
    fn orders_fix_coordinates_as_documented() {
        // Single-edge clique objective: the first fixed coordinate shows in the
        // second trace entry.
        let g = GraphInstance::single_edge(vec![0.0], vec![0.0]).unwrap();
        let f = CliqueObjective::from_instance(&g, 0.0);
        let loss = assemble(Box::new(f), vec![], 1.0);
        let x = [0.2, 0.9];
        // ByValue fixes x1 first: l(x1 <- 1) = -0.2.
        let by_value = sequential_round(&loss, &x, RoundOrder::ByValue).unwrap();
        assert!((by_value.trace[1] - (-0.2)).abs() < 1e-12);
        // Index fixes x0 first: branches 0 / -0.9, takes -0.9.
        let by_index = sequential_round(&loss, &x, RoundOrder::Index).unwrap();
        assert!((by_index.trace[1] - (-0.9)).abs() < 1e-12);
        // Confidence: |0.9 - 0.5| > |0.2 - 0.5|, so x1 is fixed first here too.
        let by_conf = sequential_round(&loss, &[0.2, 0.9], RoundOrder::ByConfidence).unwrap();
        assert!((by_conf.trace[1] - (-0.2)).abs() < 1e-12);
        assert_eq!(by_value.assignment, vec![1, 1]);
        assert_eq!(by_index.assignment, vec![1, 1]);
    }

    #[test]
    fn rounding_rejects_out_of_range_input() {
        let table = BooleanTable::new(1, vec![0.0, 1.0]).unwrap();
        let loss = assemble(Box::new(table), vec![], 1.0);
        assert!(sequential_round(&loss, &[1.2], RoundOrder::Index).is_err());
        assert!(sequential_round(&loss, &[0.5, 0.5], RoundOrder::Index).is_err());
    }

    fn toy_spec(c1: f64, c2: f64) -> SolveSpec {
        SolveSpec {
            problem: "toy".into(),
            f: Box::new(ToyObjective::from_config(c1, c2)),
            gs: vec![],
            exact_cost: Some(Box::new(move |bits: &[u8]| {
                toy_ground_truth_cost(c1, c2, bits[0], bits[1])
            })),
            beta: None,
            shift: None,
            objective_is_exact: true,
        }
    }

    #[test]
    fn toy_solve_recovers_the_optimum_with_guarantee() {
        let res = solve(toy_spec(33.0, 33.0), &OptimizeConfig::default(), RoundOrder::Index)
            .unwrap();
        assert_eq!(res.rounded, vec![0, 0]);
        assert_eq!(res.exact_objective, Some(50.0));
        assert!((res.f_final - 50.0).abs() < 1e-9);
        // Enumerated beta: feasible max 63.5515... plus unit margin.
        assert!((res.beta - 64.551_515_151_515_15).abs() < 1e-9);
        assert_eq!(res.shift, 0.0);
        assert!(res.structure_ok);
        assert!(res.concavity_sampled);
        assert!(res.min_f_certified);
        assert!(res.guarantee_applicable);
        assert!(res.guarantee_holds);
        assert!(res.feasible);
        assert!(res.f_final <= res.l_r_initial + 1e-9);
    }

    #[test]
    fn clique_solve_on_a_path_finds_an_edge() {
        // Path on 3 nodes: maximum clique is any single edge (size 2).
        let g = GraphInstance::path(vec![vec![0.0]; 3]).unwrap();
        let edges = g.edges().to_vec();
        let f = CliqueObjective::from_instance(&g, 0.0);
        let conflicts = CliqueConflicts::from_instance(&g);
        let spec = SolveSpec {
            problem: "maxclique".into(),
            f: Box::new(f),
            gs: vec![Box::new(conflicts)],
            exact_cost: Some(Box::new(move |bits: &[u8]| {
                -(edges
                    .iter()
                    .filter(|&&(u, v)| bits[u] == 1 && bits[v] == 1)
                    .count() as f64)
            })),
            beta: Some(clique_beta_bound(2)),
            shift: Some(2.0),
            objective_is_exact: true,
        };
        let res = solve(spec, &OptimizeConfig::default(), RoundOrder::ByValue).unwrap();
        let ones: usize = res.rounded.iter().map(|&b| b as usize).sum();
        assert_eq!(ones, 2, "rounded {:?}", res.rounded);
        assert_ne!(res.rounded, vec![1, 0, 1], "0-2 is not an edge");
        assert_eq!(res.exact_objective, Some(-1.0));
        assert!(res.guarantee_applicable);
        assert!(res.guarantee_holds);
        assert!(res.feasible);
    }

    #[test]
    fn cover_solve_picks_a_minimum_cover() {
        // 2x2 grid, unit edge costs: minimum edge cover uses the two horizontal
        // (or two vertical) edges, cost 2.
        let g = GraphInstance::grid(2, 2, vec![vec![0.0]; 4]).unwrap();
        let f = LinearObjective::new(vec![1.0; 4]).unwrap();
        let cover = CoverPenalty::from_instance(&g);
        let spec = SolveSpec {
            problem: "edge_cover".into(),
            f: Box::new(f),
            gs: vec![Box::new(cover)],
            exact_cost: Some(Box::new(|bits: &[u8]| {
                bits.iter().map(|&b| b as f64).sum::<f64>()
            })),
            beta: None,
            shift: None,
            objective_is_exact: true,
        };
        let res = solve(spec, &OptimizeConfig::default(), RoundOrder::Index).unwrap();
        assert!(res.feasible, "cover must be feasible: {:?}", res.rounded);
        assert_eq!(res.exact_objective, Some(2.0), "rounded {:?}", res.rounded);
        assert!(res.guarantee_applicable && res.guarantee_holds);
        // Enumerated beta: every edge selected is feasible with cost 4.
        assert!((res.beta - 5.0).abs() < 1e-12);
    }

    #[test]
    fn warped_objective_forfeits_the_guarantee_but_still_rounds() {
        use crate::objectives::Warped;
        let g = GraphInstance::complete(vec![vec![0.0]; 4]).unwrap();
        let f = CliqueObjective::from_instance(&g, g.edge_count() as f64);
        let spec = SolveSpec {
            problem: "badloss".into(),
            f: Box::new(Warped::new(f)),
            gs: vec![],
            exact_cost: None,
            beta: Some(clique_beta_bound(6)),
            // The warp fixes every binary point, so the pre-shifted objective is
            // already nonnegative there.
            shift: Some(0.0),
            objective_is_exact: true,
        };
        let res = solve(spec, &OptimizeConfig::default(), RoundOrder::Index).unwrap();
        assert!(!res.structure_ok);
        assert!(!res.concavity_sampled);
        assert!(!res.guarantee_applicable);
        assert_eq!(res.rounded.len(), 4);
    }

    #[test]
    fn infeasible_instances_surface_as_errors() {
        // Three nodes in a path cannot be perfectly matched (odd node count).
        use crate::objectives::MatchingPenalty;
        let g = GraphInstance::path(vec![vec![0.0]; 3]).unwrap();
        let f = LinearObjective::new(vec![1.0; 2]).unwrap();
        let m = MatchingPenalty::from_instance(&g);
        let spec = SolveSpec {
            problem: "node_matching".into(),
            f: Box::new(f),
            gs: vec![Box::new(m)],
            exact_cost: None,
            beta: None,
            shift: None,
            objective_is_exact: true,
        };
        let err = solve(spec, &OptimizeConfig::default(), RoundOrder::Index).unwrap_err();
        assert!(matches!(err, Error::Infeasible));
    }

    #[test]
    fn declared_shift_is_verified_on_small_instances() {
        let spec = SolveSpec {
            problem: "toy".into(),
            f: Box::new(ToyObjective::from_config(33.0, 33.0)),
            gs: vec![],
            exact_cost: None,
            beta: Some(BetaBound {
                value: 100.0,
                provenance: BetaProvenance::UserSupplied,
            }),
            // Minimum is 50, so a -60 shift drives it negative; must be rejected.
            shift: Some(-60.0),
            objective_is_exact: true,
        };
        let err = solve(spec, &OptimizeConfig::default(), RoundOrder::Index).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn closed_form_loss_matches_the_assembled_one() {
        let mut rng = rng_from_seed(5);
        let g = GraphInstance::erdos_renyi(8, 0.4, &mut rng).unwrap();
        let beta = 20.0;
        let f = CliqueObjective::from_instance(&g, 0.0);
        let conflicts = CliqueConflicts::from_instance(&g);
        let loss = assemble(Box::new(f), vec![Box::new(conflicts)], beta);
        for _ in 0..20 {
            let x: Vec<f64> = (0..8).map(|_| rng.gen()).collect();
            let direct = maxclique_loss(&g, &x, beta).unwrap();
            assert!((loss.value(&x) - direct).abs() < 1e-9);
        }
    }
}
