//! Explicit objectives and constraint penalties with known structure: linear costs,
//! the two-variable table objective, max-clique, edge covering, node matching, and
//! cardinality, plus constraint normalization, penalty assembly, the sine warp used
//! as a structure-breaking ablation, and enumeration helpers for penalty-weight
//! bounds.
//!
//! Every constraint here is expressed as a penalty `g` that is nonnegative on binary
//! points and normalized so that `g(X) < 1` exactly characterizes feasibility. The
//! penalized loss is `l(x) = f(x) + beta * sum_j g_j(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphInstance;
use crate::relaxation::{Relaxation, StructureClass};

// ---------------------------------------------------------------------------
// Linear and table-like objectives
// ---------------------------------------------------------------------------

/// `f(x) = sum_i c_i x_i`. The workhorse objective for covering and matching, where
/// the cost of a binary selection is a weighted count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearObjective {
    coeffs: Vec<f64>,
}

impl LinearObjective {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {i} is not finite"
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Relaxation for LinearObjective {
    fn arity(&self) -> usize {
        self.coeffs.len()
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn gradient(&self, _x: &[f64], grad: &mut [f64]) {
        grad.copy_from_slice(&self.coeffs);
    }
}

/// Two-variable benchmark objective `g1 x1 + g2 x2 + g3 x1 x2 + g4` whose
/// coefficients are fixed functions of a configuration pair `(c1, c2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyObjective {
    /// `[g1, g2, g3, g4]`.
    coeffs: [f64; 4],
}

impl ToyObjective {
    pub fn from_config(c1: f64, c2: f64) -> Self {
        let g1 = (580.0 - 10.0 * c1 - 3.0 * c2) / 33.0;
        let g2 = (580.0 - 10.0 * c2 - 3.0 * c1) / 33.0;
        let g3 = (3.0 * c1 + 3.0 * c2) / 45.0;
        let g4 = -(5.0 * c1 + 5.0 * c2) / 33.0 + 60.0;
        Self {
            coeffs: [g1, g2, g3, g4],
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coeffs
    }
}

impl Relaxation for ToyObjective {
    fn arity(&self) -> usize {
        2
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        let [g1, g2, g3, g4] = self.coeffs;
        g1 * x[0] + g2 * x[1] + g3 * x[0] * x[1] + g4
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let [g1, g2, g3, _] = self.coeffs;
        grad[0] = g1 + g3 * x[1];
        grad[1] = g2 + g3 * x[0];
    }
}

/// Ground-truth cost of the two-variable benchmark at a binary assignment.
pub fn toy_ground_truth_cost(c1: f64, c2: f64, x1: u8, x2: u8) -> f64 {
    ToyObjective::from_config(c1, c2).value(&[f64::from(x1), f64::from(x2)])
}

// ---------------------------------------------------------------------------
// Max clique
// ---------------------------------------------------------------------------

/// Clique objective `f(x) = shift - sum_{(i,j) in E} x_i x_j` over node variables.
/// A clique indicator of size k evaluates to `shift - k(k-1)/2`; minimizing finds
/// large cliques. With `shift = |E|` the objective is nonnegative at every binary
/// point, since a selection can include at most all edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueObjective {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    shift: f64,
}

impl CliqueObjective {
    pub fn from_instance(g: &GraphInstance, shift: f64) -> Self {
        Self {
            node_count: g.node_count(),
            edges: g.edges().to_vec(),
            shift,
        }
    }

    /// The nonnegative variant, shifted by the edge count.
    pub fn shifted_nonneg(g: &GraphInstance) -> Self {
        Self::from_instance(g, g.edge_count() as f64)
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }
}

impl Relaxation for CliqueObjective {
    fn arity(&self) -> usize {
        self.node_count
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for &(u, v) in &self.edges {
            s += x[u] * x[v];
        }
        self.shift - s
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        for &(u, v) in &self.edges {
            grad[u] -= x[v];
            grad[v] -= x[u];
        }
    }
}

/// Clique feasibility penalty: `g(x) = sum_{non-edge pairs {i,j}} x_i x_j`. On binary
/// points it counts selected pairs that are not connected, so `g < 1` holds exactly
/// for clique indicators; no further normalization is needed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueConflicts {
    node_count: usize,
    non_edges: Vec<(usize, usize)>,
}

impl CliqueConflicts {
    pub fn from_instance(g: &GraphInstance) -> Self {
        Self {
            node_count: g.node_count(),
            non_edges: g.non_edges(),
        }
    }
}

impl Relaxation for CliqueConflicts {
    fn arity(&self) -> usize {
        self.node_count
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.non_edges.iter().map(|&(u, v)| x[u] * x[v]).sum()
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        for &(u, v) in &self.non_edges {
            grad[u] += x[v];
            grad[v] += x[u];
        }
    }
}

/// Combined clique loss in closed form:
/// `-(beta+1) * sum_{(i,j) in E} x_i x_j + (beta/2) * sum_{i != j} x_i x_j`,
/// the second sum over ordered pairs. Expanding the ordered-pair sum as
/// `(sum x)^2 - sum x^2` avoids the quadratic pass over non-edges. Equals
/// `-sum_E x_i x_j + beta * sum_{non-edge pairs} x_i x_j` identically, i.e. the
/// unshifted [`CliqueObjective`] penalized by [`CliqueConflicts`].
pub fn maxclique_loss(g: &GraphInstance, x: &[f64], beta: f64) -> Result<f64> {
    if x.len() != g.node_count() {
        return Err(Error::ScopeMismatch(format!(
            "clique loss needs one value per node: {} nodes, {} values",
            g.node_count(),
            x.len()
        )));
    }
    if beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let edge_term: f64 = g.edges().iter().map(|&(u, v)| x[u] * x[v]).sum();
    let s1: f64 = x.iter().sum();
    let s2: f64 = x.iter().map(|v| v * v).sum();
    Ok(-(beta + 1.0) * edge_term + beta / 2.0 * (s1 * s1 - s2))
}

// ---------------------------------------------------------------------------
// Edge covering and node matching penalties (edge-scope variables)
// ---------------------------------------------------------------------------

/// Covering penalty over edge variables: `g(x) = sum_v prod_{e: v in e} (1 - x_e)`.
/// Each product is the soft indicator that node v is uncovered; on binary points g
/// counts uncovered nodes, so `g < 1` holds exactly for edge covers. A node with no
/// incident edges contributes the empty product 1, making such instances infeasible
/// by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverPenalty {
    /// Incident edge ids per node.
    incidence: Vec<Vec<usize>>,
    edge_count: usize,
}

impl CoverPenalty {
    pub fn from_instance(g: &GraphInstance) -> Self {
        Self {
            incidence: g.incidence(),
            edge_count: g.edge_count(),
        }
    }

    /// Alternate evaluation path computing each product as
    /// `exp(sum_e ln(max(1 - x_e, 1e-12)))`. Agrees with the direct path except
    /// where some `x_e` is within 1e-12 of 1, where the floor biases the factor up.
    pub fn value_log(&self, x: &[f64]) -> f64 {
        const FLOOR: f64 = 1e-12;
        let mut total = 0.0;
        for inc in &self.incidence {
            let log_sum: f64 = inc.iter().map(|&e| (1.0 - x[e]).max(FLOOR).ln()).sum();
            total += log_sum.exp();
        }
        total
    }
}

/// Adds `prod * d(prod)/d(x_e)` contributions of one uncovered-node product to the
/// gradient via leave-one-out prefix/suffix products (no division, so factors that
/// are exactly zero are handled).
fn add_product_gradient(inc: &[usize], x: &[f64], scale: f64, grad: &mut [f64]) {
    let d = inc.len();
    if d == 0 {
        return;
    }
    // prefix[i] = prod_{k < i} (1 - x_k), suffix = running product from the right.
    let mut prefix = vec![1.0; d];
    for i in 1..d {
        prefix[i] = prefix[i - 1] * (1.0 - x[inc[i - 1]]);
    }
    let mut suffix = 1.0;
    for i in (0..d).rev() {
        // d/dx_e of (1 - x_e) is -1.
        grad[inc[i]] -= scale * prefix[i] * suffix;
        suffix *= 1.0 - x[inc[i]];
    }
}

impl Relaxation for CoverPenalty {
    fn arity(&self) -> usize {
        self.edge_count
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.incidence
            .iter()
            .map(|inc| inc.iter().map(|&e| 1.0 - x[e]).product::<f64>())
            .sum()
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        for inc in &self.incidence {
            add_product_gradient(inc, x, 1.0, grad);
        }
    }
}

/// Matching penalty over edge variables:
/// `g(x) = sum_v [ prod_{e: v in e}(1 - x_e) + sum_{unordered e1 != e2: v in both} x_{e1} x_{e2} ]`.
/// The first term penalizes unmatched nodes, the second penalizes conflicts (two
/// selected edges sharing a node); nodes of degree < 2 have no conflict pairs. On
/// binary points `g < 1` holds exactly for perfect matchings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingPenalty {
    incidence: Vec<Vec<usize>>,
    edge_count: usize,
}

impl MatchingPenalty {
    pub fn from_instance(g: &GraphInstance) -> Self {
        Self {
            incidence: g.incidence(),
            edge_count: g.edge_count(),
        }
    }
}

impl Relaxation for MatchingPenalty {
    fn arity(&self) -> usize {
        self.edge_count
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for inc in &self.incidence {
            let uncovered: f64 = inc.iter().map(|&e| 1.0 - x[e]).product();
            let s: f64 = inc.iter().map(|&e| x[e]).sum();
            let q: f64 = inc.iter().map(|&e| x[e] * x[e]).sum();
            total += uncovered + (s * s - q) / 2.0;
        }
        total
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.fill(0.0);
        for inc in &self.incidence {
            add_product_gradient(inc, x, 1.0, grad);
            let s: f64 = inc.iter().map(|&e| x[e]).sum();
            for &e in inc {
                grad[e] += s - x[e];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cardinality
// ---------------------------------------------------------------------------

/// Lower-bound cardinality penalty `g(x) = (n - sum x) / (n - t)`, already
/// normalized: `g < 1` iff `sum x > t`, i.e. at least `t + 1` variables selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalityPenalty {
    n: usize,
    t: usize,
}

impl CardinalityPenalty {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if t >= n {
            return Err(Error::InvalidArgument(format!(
                "cardinality threshold t={t} must be below the variable count n={n}"
            )));
        }
        Ok(Self { n, t })
    }
}

impl Relaxation for CardinalityPenalty {
    fn arity(&self) -> usize {
        self.n
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().sum();
        (self.n as f64 - s) / (self.n - self.t) as f64
    }

    fn gradient(&self, _x: &[f64], grad: &mut [f64]) {
        grad.fill(-1.0 / (self.n - self.t) as f64);
    }
}

// ---------------------------------------------------------------------------
// Wrappers: normalization, shift, warp
// ---------------------------------------------------------------------------

/// Affine rescaling data for a constraint: `g_min` is the minimum of g over binary
/// points and `g_min_plus` the smallest strictly larger attained value, so that the
/// rescaled constraint is 0 at feasible optima and exactly 1 at the first violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub g_min: f64,
    pub g_min_plus: f64,
}

impl NormalizationSpec {
    pub fn new(g_min: f64, g_min_plus: f64) -> Result<Self> {
        if !(g_min_plus > g_min) || !g_min.is_finite() || !g_min_plus.is_finite() {
            return Err(Error::DegenerateNormalization);
        }
        Ok(Self { g_min, g_min_plus })
    }

    #[inline]
    pub fn apply(&self, g: f64) -> f64 {
        (g - self.g_min) / (self.g_min_plus - self.g_min)
    }
}

/// `(g(x) - g_min) / (g_min_plus - g_min)`; a positive-slope affine map, so the
/// structure class of the inner function is preserved.
#[derive(Debug, Clone)]
pub struct Normalized<R> {
    inner: R,
    spec: NormalizationSpec,
}

impl<R: Relaxation> Normalized<R> {
    pub fn new(inner: R, spec: NormalizationSpec) -> Self {
        Self { inner, spec }
    }
}

impl<R: Relaxation> Relaxation for Normalized<R> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn structure(&self) -> StructureClass {
        self.inner.structure()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.spec.apply(self.inner.value(x))
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.inner.gradient(x, grad);
        let scale = 1.0 / (self.spec.g_min_plus - self.spec.g_min);
        for g in grad.iter_mut() {
            *g *= scale;
        }
    }
}

/// `f(x) + offset`; preserves the structure class.
#[derive(Debug, Clone)]
pub struct Shifted<R> {
    inner: R,
    offset: f64,
}

impl<R: Relaxation> Shifted<R> {
    pub fn new(inner: R, offset: f64) -> Self {
        Self { inner, offset }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

impl<R: Relaxation> Relaxation for Shifted<R> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn structure(&self) -> StructureClass {
        self.inner.structure()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x) + self.offset
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.inner.gradient(x, grad);
    }
}

/// Angular frequency of the structure-breaking warp: nine quarter-periods across
/// [0, 1], so the warp fixes 0 and 1 but oscillates in between.
pub const WARP_FREQUENCY: f64 = 4.5 * std::f64::consts::PI;

/// Ablation wrapper `f(sin(4.5 pi x))` applied entry-wise. Values at binary inputs
/// are unchanged (`sin 0 = 0`, `sin(4.5 pi) = 1`) but the oscillation destroys
/// entry-wise concavity, which downgrades the structure class and voids the
/// rounding guarantee.
#[derive(Debug, Clone)]
pub struct Warped<R> {
    inner: R,
}

impl<R: Relaxation> Warped<R> {
    pub fn new(inner: R) -> Self {
        Self { inner }
    }

    fn warp_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| (WARP_FREQUENCY * v).sin()).collect()
    }
}

impl<R: Relaxation> Relaxation for Warped<R> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn structure(&self) -> StructureClass {
        StructureClass::Unconstrained
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&self.warp_point(x))
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let warped = self.warp_point(x);
        self.inner.gradient(&warped, grad);
        for (g, &v) in grad.iter_mut().zip(x) {
            *g *= WARP_FREQUENCY * (WARP_FREQUENCY * v).cos();
        }
    }
}

// ---------------------------------------------------------------------------
// Penalty assembly
// ---------------------------------------------------------------------------

/// The penalized loss `l(x) = f(x) + beta * sum_j g_j(x)` with every `g_j`
/// normalized so that `g_j(X) < 1` characterizes feasibility of constraint j at
/// binary X (jointly: `sum_j g_j(X) < 1` implies every constraint holds, since each
/// term is nonnegative there).
pub struct PenalizedLoss {
    f: Box<dyn Relaxation>,
    gs: Vec<Box<dyn Relaxation>>,
    beta: f64,
}

impl PenalizedLoss {
    pub fn assemble(
        f: Box<dyn Relaxation>,
        gs: Vec<Box<dyn Relaxation>>,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be positive, got {beta}"
            )));
        }
        for (j, g) in gs.iter().enumerate() {
            if g.arity() != f.arity() {
                return Err(Error::ArityMismatch {
                    expected: f.arity(),
                    got: gs[j].arity(),
                });
            }
        }
        Ok(Self { f, gs, beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn objective(&self) -> &dyn Relaxation {
        self.f.as_ref()
    }

    pub fn constraints(&self) -> &[Box<dyn Relaxation>] {
        &self.gs
    }

    /// The objective part alone.
    pub fn f_value(&self, x: &[f64]) -> f64 {
        self.f.value(x)
    }

    /// Sum of the constraint penalties (without the beta factor).
    pub fn g_total(&self, x: &[f64]) -> f64 {
        self.gs.iter().map(|g| g.value(x)).sum()
    }

    /// Loss value with an explicit penalty weight in place of the assembled one
    /// (used by optimizers that anneal the penalty toward its final value).
    pub fn value_with_beta(&self, x: &[f64], beta: f64) -> f64 {
        self.f.value(x) + beta * self.g_total(x)
    }

    /// Gradient counterpart of [`PenalizedLoss::value_with_beta`].
    pub fn gradient_with_beta(&self, x: &[f64], beta: f64, grad: &mut [f64]) {
        self.f.gradient(x, grad);
        let mut part = vec![0.0; grad.len()];
        for g in &self.gs {
            g.gradient(x, &mut part);
            for (acc, p) in grad.iter_mut().zip(&part) {
                *acc += beta * p;
            }
        }
    }
}

impl Relaxation for PenalizedLoss {
    fn arity(&self) -> usize {
        self.f.arity()
    }

    fn structure(&self) -> StructureClass {
        self.gs
            .iter()
            .fold(self.f.structure(), |acc, g| acc.join(g.structure()))
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_with_beta(x, self.beta)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.gradient_with_beta(x, self.beta, grad);
    }
}

// ---------------------------------------------------------------------------
// Enumeration over binary points and penalty-weight bounds
// ---------------------------------------------------------------------------

/// Hard cap on exhaustive enumeration of `{0,1}^n`.
pub const MAX_ENUMERATION_ARITY: usize = 24;

/// Exact extrema of an objective over binary points, split by feasibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedBounds {
    /// Minimum over all binary points, feasible or not.
    pub min_all: f64,
    /// Maximum over feasible points, if any are feasible.
    pub max_feasible: Option<f64>,
    /// Minimum over feasible points, if any are feasible.
    pub min_feasible: Option<f64>,
    pub feasible_count: usize,
    pub evaluations: usize,
}

/// Exhaustively evaluates `f` on `{0,1}^n`, classifying points with `feasible`.
pub fn enumerate_bounds<F, G>(f: F, feasible: G, n: usize) -> Result<EnumeratedBounds>
where
    F: Fn(&[u8]) -> f64,
    G: Fn(&[u8]) -> bool,
{
    if n > MAX_ENUMERATION_ARITY {
        return Err(Error::EnumerationTooLarge(n, MAX_ENUMERATION_ARITY));
    }
    let mut bits = vec![0u8; n];
    let mut min_all = f64::INFINITY;
    let mut max_feasible: Option<f64> = None;
    let mut min_feasible: Option<f64> = None;
    let mut feasible_count = 0usize;
    let total = 1usize << n;
    for mask in 0..total {
        for (j, b) in bits.iter_mut().enumerate() {
            *b = (mask >> j & 1) as u8;
        }
        let v = f(&bits);
        if v < min_all {
            min_all = v;
        }
        if feasible(&bits) {
            feasible_count += 1;
            max_feasible = Some(max_feasible.map_or(v, |m: f64| m.max(v)));
            min_feasible = Some(min_feasible.map_or(v, |m: f64| m.min(v)));
        }
    }
    Ok(EnumeratedBounds {
        min_all,
        max_feasible,
        min_feasible,
        feasible_count,
        evaluations: total,
    })
}

/// Where a penalty weight came from; carried through reports so a run is auditable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaProvenance {
    /// Exhaustive feasible maximum plus margin.
    Enumerated { max_feasible: f64 },
    /// A problem-specific bound with a stated rule.
    ClosedForm { rule: String },
    /// Supplied by the caller, passed through unchanged.
    UserSupplied,
}

/// A penalty weight exceeding the feasible maximum of the objective, with its
/// provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaBound {
    pub value: f64,
    pub provenance: BetaProvenance,
}

/// Safety margin added on top of a feasible maximum: 1, or 1% of the magnitude,
/// whichever is larger.
pub fn beta_margin(max_feasible: f64) -> f64 {
    f64::max(1.0, 0.01 * max_feasible.abs())
}

/// Penalty weight from exhaustive bounds. Errors when no binary point is feasible:
/// a bound over an empty set would be vacuous and the instance cannot be solved.
pub fn beta_bound_from_enumeration(bounds: &EnumeratedBounds) -> Result<BetaBound> {
    let max_feasible = bounds.max_feasible.ok_or(Error::Infeasible)?;
    Ok(BetaBound {
        value: max_feasible + beta_margin(max_feasible),
        provenance: BetaProvenance::Enumerated { max_feasible },
    })
}

/// Closed-form penalty weight for the shifted clique objective: the objective
/// `|E| - selected edges` lies in [0, |E|] at every binary point and attains |E|
/// at the empty (feasible) selection, so `|E|` is the exact feasible maximum.
pub fn clique_beta_bound(edge_count: usize) -> BetaBound {
    let max_feasible = edge_count as f64;
    BetaBound {
        value: max_feasible + beta_margin(max_feasible),
        provenance: BetaProvenance::ClosedForm {
            rule: format!("edge count {edge_count} bounds the shifted clique objective"),
        },
    }
}
