//! Learnable structured surrogates ("proxies") for costs that are only known
//! through labeled samples.
//!
//! A proxy maps a soft assignment to a scalar through a latent vector
//! `phi in R^F` built from instance attributes:
//!
//! * second order: `phi = W + sum_v U_v x_v + sum_{(u,v) in E} Q_{u,v} x_u x_v`
//! * higher order: `phi = sum_v (U_v x_v + U'_v) * prod_{u in N(v)} (Q_{v,u} x_u + Q'_{v,u})`
//!
//! Both latents are linear in every single coordinate of `x`. The affine head
//! `<w, phi>` keeps that structure; the concave head `<w, -relu(phi)> + b` with
//! `w >= 0` is concave along every coordinate, which is what the rounding
//! guarantee needs. The per-node/per-edge coefficient vectors `W, U, Q, ...` come
//! from small trainable maps applied to (standardized) instance attributes, so one
//! trained model transfers across instances of a family.
//!
//! Gradients with respect to both the input point and all parameters are analytic;
//! training is plain minibatch gradient descent, with the concave head's weights
//! projected onto the nonnegative orthant after every step.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{binary_to_f64, GraphInstance, VarScope};
use crate::relaxation::{Relaxation, StructureClass};
use crate::rng::{fnv1a, rng_from_seed};

// ---------------------------------------------------------------------------
// Architectures and configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyArch {
    /// Second-order latent, affine head: entry-wise affine in the input.
    Aff,
    /// Second-order latent, rectified concave head: entry-wise concave while the
    /// head weights stay nonnegative.
    Con,
    /// Higher-order latent (neighborhood products), affine head: entry-wise
    /// affine with moments up to degree + 1.
    Higher,
}

impl ProxyArch {
    pub fn as_str(self) -> &'static str {
        match self {
            ProxyArch::Aff => "aff",
            ProxyArch::Con => "con",
            ProxyArch::Higher => "higher",
        }
    }
}

impl std::str::FromStr for ProxyArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aff" => Ok(ProxyArch::Aff),
            "con" => Ok(ProxyArch::Con),
            "higher" => Ok(ProxyArch::Higher),
            other => Err(Error::Parse(format!(
                "unknown architecture {other:?}; expected aff, con, or higher"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "loss", rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    Huber { delta: f64 },
}

/// Training hyperparameters. The defaults are tuned for the desk-scale dataset
/// families in this crate; everything is overridable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(flatten)]
    pub loss: LossKind,
    pub step_size: f64,
    pub steps: usize,
    pub batch: usize,
    pub seed: u64,
    /// Clamp the concave head's weights to `>= 0` after every step. Disabling
    /// this surrenders the structure (and with it the rounding guarantee); it
    /// exists as an ablation.
    pub projection: bool,
    /// Latent width F.
    pub width: usize,
    /// Use one-hidden-layer rectified feature maps instead of linear ones.
    pub rectified: bool,
    /// Hidden width of rectified feature maps.
    pub hidden: usize,
    /// Standardize attributes and labels from the training set.
    pub standardize: bool,
    /// For edge-scope datasets: append per-dimension products of the endpoint
    /// attributes when lifting edges to variables.
    pub lift_products: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss: LossKind::Squared,
            step_size: 1e-2,
            steps: 4000,
            batch: 64,
            seed: 0,
            projection: true,
            width: 8,
            rectified: false,
            hidden: 16,
            standardize: true,
            lift_products: true,
        }
    }
}

// ---------------------------------------------------------------------------
// Feature maps over flat parameter storage
// ---------------------------------------------------------------------------

/// Shape of one feature map; `hidden == 0` means a plain affine map, otherwise a
/// one-hidden-layer rectified map. Parameters live in a flat slice with layout
/// `[w (out x in, row-major), b (out)]`, or for the rectified form
/// `[w1 (hidden x in), b1 (hidden), w2 (out x hidden), b2 (out)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct MapDims {
    in_dim: usize,
    hidden: usize,
    out: usize,
}

impl MapDims {
    fn param_len(&self) -> usize {
        if self.hidden == 0 {
            self.out * (self.in_dim + 1)
        } else {
            self.hidden * (self.in_dim + 1) + self.out * (self.hidden + 1)
        }
    }

    fn forward(&self, p: &[f64], inp: &[f64], out: &mut [f64]) {
        debug_assert_eq!(p.len(), self.param_len());
        debug_assert_eq!(inp.len(), self.in_dim);
        debug_assert_eq!(out.len(), self.out);
        if self.hidden == 0 {
            let (w, b) = p.split_at(self.out * self.in_dim);
            for k in 0..self.out {
                let row = &w[k * self.in_dim..(k + 1) * self.in_dim];
                out[k] = b[k] + row.iter().zip(inp).map(|(a, x)| a * x).sum::<f64>();
            }
        } else {
            let h = self.hidden;
            let (w1, rest) = p.split_at(h * self.in_dim);
            let (b1, rest) = rest.split_at(h);
            let (w2, b2) = rest.split_at(self.out * h);
            let mut act = vec![0.0; h];
            for i in 0..h {
                let row = &w1[i * self.in_dim..(i + 1) * self.in_dim];
                let z = b1[i] + row.iter().zip(inp).map(|(a, x)| a * x).sum::<f64>();
                act[i] = z.max(0.0);
            }
            for k in 0..self.out {
                let row = &w2[k * h..(k + 1) * h];
                out[k] = b2[k] + row.iter().zip(&act).map(|(a, x)| a * x).sum::<f64>();
            }
        }
    }

    /// Accumulates `d(loss)/d(params)` into `dp` given `dout = d(loss)/d(output)`.
    /// Recomputes the hidden activations; map inputs are instance constants, so no
    /// input gradient exists.
    fn backward(&self, p: &[f64], inp: &[f64], dout: &[f64], dp: &mut [f64]) {
        if self.hidden == 0 {
            let wlen = self.out * self.in_dim;
            for k in 0..self.out {
                let dk = dout[k];
                if dk == 0.0 {
                    continue;
                }
                for (j, &x) in inp.iter().enumerate() {
                    dp[k * self.in_dim + j] += dk * x;
                }
                dp[wlen + k] += dk;
            }
        } else {
            let h = self.hidden;
            let w1_len = h * self.in_dim;
            let (w1, rest) = p.split_at(w1_len);
            let (b1, rest) = rest.split_at(h);
            let (w2, _b2) = rest.split_at(self.out * h);
            let mut z = vec![0.0; h];
            let mut act = vec![0.0; h];
            for i in 0..h {
                let row = &w1[i * self.in_dim..(i + 1) * self.in_dim];
                z[i] = b1[i] + row.iter().zip(inp).map(|(a, x)| a * x).sum::<f64>();
                act[i] = z[i].max(0.0);
            }
            let w2_off = w1_len + h;
            let b2_off = w2_off + self.out * h;
            let mut dact = vec![0.0; h];
            for k in 0..self.out {
                let dk = dout[k];
                if dk == 0.0 {
                    continue;
                }
                for i in 0..h {
                    dp[w2_off + k * h + i] += dk * act[i];
                    dact[i] += dk * w2[k * h + i];
                }
                dp[b2_off + k] += dk;
            }
            for i in 0..h {
                // Rectifier subgradient at 0 is taken as 0.
                if z[i] > 0.0 && dact[i] != 0.0 {
                    let dz = dact[i];
                    for (j, &x) in inp.iter().enumerate() {
                        dp[i * self.in_dim + j] += dz * x;
                    }
                    dp[w1_len + i] += dz;
                }
            }
        }
    }
}

/// Offsets of every parameter block inside the flat parameter vector.
#[derive(Debug, Clone)]
struct Layout {
    /// `(dims, offset)` per feature map, in arch order: second order `[W, U, Q]`,
    /// higher order `[U, U', Q, Q']`.
    maps: Vec<(MapDims, usize)>,
    head_w: usize,
    head_b: Option<usize>,
    total: usize,
}

fn layout(arch: ProxyArch, var_attr_dim: usize, width: usize, hidden: usize) -> Layout {
    let d = var_attr_dim;
    let dims: Vec<MapDims> = match arch {
        ProxyArch::Aff | ProxyArch::Con => vec![
            MapDims { in_dim: d, hidden, out: width },
            MapDims { in_dim: 2 * d, hidden, out: width },
            MapDims { in_dim: 3 * d, hidden, out: width },
        ],
        ProxyArch::Higher => vec![
            MapDims { in_dim: 2 * d, hidden, out: width },
            MapDims { in_dim: 2 * d, hidden, out: width },
            MapDims { in_dim: 3 * d, hidden, out: width },
            MapDims { in_dim: 3 * d, hidden, out: width },
        ],
    };
    let mut maps = Vec::with_capacity(dims.len());
    let mut off = 0;
    for m in dims {
        maps.push((m, off));
        off += m.param_len();
    }
    let head_w = off;
    off += width;
    let head_b = if arch == ProxyArch::Con {
        let b = off;
        off += 1;
        Some(b)
    } else {
        None
    };
    Layout { maps, head_w, head_b, total: off }
}

// ---------------------------------------------------------------------------
// The model
// ---------------------------------------------------------------------------

/// A trained proxy: architecture, attribute/label standardization, and the flat
/// parameter vector. Instance-independent; [`ProxyModel::compile`] binds it to a
/// concrete instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyModel {
    arch: ProxyArch,
    width: usize,
    /// Attribute dimension of the raw instances this model accepts.
    attr_dim: usize,
    scope: VarScope,
    lift_products: bool,
    rectified: bool,
    hidden: usize,
    /// Per variable-graph attribute dimension: `(mean, 1/std)` applied before the
    /// feature maps.
    input_norm: Vec<(f64, f64)>,
    /// Prediction = `output_scale * head + output_shift`; the scale is positive,
    /// so the head's structure class is preserved.
    output_scale: f64,
    output_shift: f64,
    params: Vec<f64>,
}

impl ProxyModel {
    /// Attribute dimension of the graph the variables live on (the lifted graph
    /// for edge scope).
    fn var_attr_dim(&self) -> usize {
        match self.scope {
            VarScope::Node => self.attr_dim,
            VarScope::Edge => self.attr_dim * if self.lift_products { 3 } else { 2 },
        }
    }

    fn layout(&self) -> Layout {
        layout(
            self.arch,
            self.var_attr_dim(),
            self.width,
            if self.rectified { self.hidden } else { 0 },
        )
    }

    /// Fresh model with small random weights. Biases start at zero, except the
    /// higher-order `Q'` map's output bias, which starts at one so neighborhood
    /// products begin near the neutral element instead of near zero.
    pub fn init(
        arch: ProxyArch,
        attr_dim: usize,
        scope: VarScope,
        config: &TrainConfig,
    ) -> Result<Self> {
        if attr_dim == 0 {
            return Err(Error::InvalidArgument(
                "proxies need at least one node attribute".into(),
            ));
        }
        if config.width == 0 {
            return Err(Error::InvalidArgument("width must be at least 1".into()));
        }
        if config.rectified && config.hidden == 0 {
            return Err(Error::InvalidArgument(
                "rectified maps need a hidden width of at least 1".into(),
            ));
        }
        let mut model = ProxyModel {
            arch,
            width: config.width,
            attr_dim,
            scope,
            lift_products: config.lift_products,
            rectified: config.rectified,
            hidden: config.hidden,
            input_norm: vec![],
            output_scale: 1.0,
            output_shift: 0.0,
            params: vec![],
        };
        model.input_norm = vec![(0.0, 1.0); model.var_attr_dim()];
        let lay = model.layout();
        let mut rng = rng_from_seed(config.seed);
        let mut p = vec![0.0; lay.total];
        for (i, (dims, off)) in lay.maps.iter().enumerate() {
            let r1 = 1.0 / (dims.in_dim as f64).sqrt();
            if dims.hidden == 0 {
                for v in &mut p[*off..off + dims.out * dims.in_dim] {
                    *v = rng.gen_range(-r1..r1);
                }
            } else {
                for v in &mut p[*off..off + dims.hidden * dims.in_dim] {
                    *v = rng.gen_range(-r1..r1);
                }
                let r2 = 1.0 / (dims.hidden as f64).sqrt();
                let w2_off = off + dims.hidden * (dims.in_dim + 1);
                for v in &mut p[w2_off..w2_off + dims.out * dims.hidden] {
                    *v = rng.gen_range(-r2..r2);
                }
            }
            if arch == ProxyArch::Higher && i == 3 {
                // Output bias of the Q' map.
                let b_off = off + dims.param_len() - dims.out;
                for v in &mut p[b_off..off + dims.param_len()] {
                    *v = 1.0;
                }
            }
        }
        for k in 0..model.width {
            p[lay.head_w + k] = match arch {
                ProxyArch::Con => rng.gen_range(0.0..0.1),
                _ => rng.gen_range(-0.3..0.3),
            };
        }
        model.params = p;
        Ok(model)
    }

    pub fn arch(&self) -> ProxyArch {
        self.arch
    }

    pub fn scope(&self) -> VarScope {
        self.scope
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn param_len(&self) -> usize {
        self.params.len()
    }

    pub fn output_transform(&self) -> (f64, f64) {
        (self.output_scale, self.output_shift)
    }

    pub fn set_params(&mut self, params: Vec<f64>) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                params.len()
            )));
        }
        if let Some(i) = params.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "parameter", index: i });
        }
        self.params = params;
        Ok(())
    }

    /// Whether the concave head's weights are all nonnegative (vacuously true for
    /// the affine architectures).
    pub fn head_is_projected(&self) -> bool {
        match self.arch {
            ProxyArch::Con => {
                let lay = self.layout();
                self.params[lay.head_w..lay.head_w + self.width]
                    .iter()
                    .all(|&w| w >= 0.0)
            }
            _ => true,
        }
    }

    /// Structure class of the compiled function: affine latents with a linear head
    /// are entry-wise affine; the rectified head is entry-wise concave exactly when
    /// its weights are nonnegative, and unconstrained otherwise (the ablation that
    /// trains without projection lands there).
    pub fn structure(&self) -> StructureClass {
        match self.arch {
            ProxyArch::Aff | ProxyArch::Higher => StructureClass::EntrywiseAffine,
            ProxyArch::Con => {
                if self.head_is_projected() {
                    StructureClass::EntrywiseConcave
                } else {
                    StructureClass::Unconstrained
                }
            }
        }
    }

    /// The graph whose nodes carry the variables: the instance itself for node
    /// scope, the edge lift for edge scope.
    pub fn variable_graph(&self, g: &GraphInstance) -> Result<GraphInstance> {
        match self.scope {
            VarScope::Node => Ok(g.clone()),
            VarScope::Edge => g.lift_to_edges(self.lift_products),
        }
    }

    /// Binds the model to an instance, precomputing the per-node/per-edge latent
    /// coefficients so evaluation needs no feature-map work.
    pub fn compile(&self, g: &GraphInstance) -> Result<CompiledProxy> {
        if g.attr_dim() != self.attr_dim {
            return Err(Error::ScopeMismatch(format!(
                "model expects {}-dimensional attributes, instance has {}",
                self.attr_dim,
                g.attr_dim()
            )));
        }
        let inputs = self.instance_inputs(g)?;
        let tensors = self.tensors(&self.params, &inputs);
        let lay = self.layout();
        let head_w = self.params[lay.head_w..lay.head_w + self.width].to_vec();
        let head_b = lay.head_b.map_or(0.0, |o| self.params[o]);
        Ok(CompiledProxy {
            arch: self.arch,
            width: self.width,
            structure: self.structure(),
            topo: inputs.topo,
            tensors,
            head_w,
            head_b,
            output_scale: self.output_scale,
            output_shift: self.output_shift,
        })
    }

    /// Convenience: compile and evaluate at one point.
    pub fn eval(&self, g: &GraphInstance, x: &[f64]) -> Result<f64> {
        let c = self.compile(g)?;
        if x.len() != c.arity() {
            return Err(Error::ArityMismatch { expected: c.arity(), got: x.len() });
        }
        Ok(c.value(x))
    }

    /// Value plus analytic gradients in both directions at one point:
    /// `(value, d/dx, d/dparams)`, all in output units. Used by training and by
    /// the finite-difference tests.
    pub fn eval_gradients(
        &self,
        g: &GraphInstance,
        x: &[f64],
    ) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let inputs = self.instance_inputs(g)?;
        if x.len() != inputs.topo.n {
            return Err(Error::ArityMismatch { expected: inputs.topo.n, got: x.len() });
        }
        let fwd = self.forward(&self.params, &inputs, x);
        let dx = self.grad_x(&self.params, &inputs, &fwd, x);
        let mut dp = vec![0.0; self.params.len()];
        self.grad_params(&self.params, &inputs, &fwd, x, 1.0, &mut dp);
        Ok((fwd.value, dx, dp))
    }

    // -- internal engine ----------------------------------------------------

    fn instance_inputs(&self, g: &GraphInstance) -> Result<InstanceInputs> {
        let var_graph = self.variable_graph(g)?;
        let d = self.var_attr_dim();
        if self.input_norm.len() != d {
            return Err(Error::InvalidArgument(format!(
                "model normalization covers {} dims, variables have {d}",
                self.input_norm.len()
            )));
        }
        let n = var_graph.node_count();
        // Standardized attributes and their graph mean.
        let std_attrs: Vec<Vec<f64>> = var_graph
            .node_attrs()
            .iter()
            .map(|a| {
                a.iter()
                    .zip(&self.input_norm)
                    .map(|(v, (m, inv))| (v - m) * inv)
                    .collect()
            })
            .collect();
        let mut mean = vec![0.0; d];
        for a in &std_attrs {
            for (m, v) in mean.iter_mut().zip(a) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }

        let u_in: Vec<Vec<f64>> = std_attrs
            .iter()
            .map(|a| a.iter().chain(&mean).copied().collect())
            .collect();
        let edges = var_graph.edges().to_vec();
        let neighbors = var_graph.adjacency();
        let (w_in, q_in, q_dir_in) = match self.arch {
            ProxyArch::Aff | ProxyArch::Con => {
                let q_in = edges
                    .iter()
                    .map(|&(u, v)| {
                        std_attrs[u]
                            .iter()
                            .chain(&std_attrs[v])
                            .chain(&mean)
                            .copied()
                            .collect()
                    })
                    .collect();
                (mean.clone(), q_in, vec![])
            }
            ProxyArch::Higher => {
                let q_dir_in = neighbors
                    .iter()
                    .enumerate()
                    .map(|(v, nbrs)| {
                        nbrs.iter()
                            .map(|&u| {
                                std_attrs[v]
                                    .iter()
                                    .chain(&std_attrs[u])
                                    .chain(&mean)
                                    .copied()
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                (vec![], vec![], q_dir_in)
            }
        };
        Ok(InstanceInputs {
            topo: Topology { n, edges, neighbors },
            w_in,
            u_in,
            q_in,
            q_dir_in,
        })
    }

    /// Applies the feature maps, producing the numeric latent coefficients.
    fn tensors(&self, p: &[f64], inputs: &InstanceInputs) -> Tensors {
        let lay = self.layout();
        let f_w = self.width;
        let n = inputs.topo.n;
        let map_slice = |idx: usize| {
            let (dims, off) = lay.maps[idx];
            (dims, &p[off..off + dims.param_len()])
        };
        match self.arch {
            ProxyArch::Aff | ProxyArch::Con => {
                let (wd, wp) = map_slice(0);
                let (ud, up_) = map_slice(1);
                let (qd, qp_) = map_slice(2);
                let mut w = vec![0.0; f_w];
                wd.forward(wp, &inputs.w_in, &mut w);
                let mut u = vec![0.0; n * f_w];
                for v in 0..n {
                    ud.forward(up_, &inputs.u_in[v], &mut u[v * f_w..(v + 1) * f_w]);
                }
                let m = inputs.topo.edges.len();
                let mut q = vec![0.0; m * f_w];
                for e in 0..m {
                    qd.forward(qp_, &inputs.q_in[e], &mut q[e * f_w..(e + 1) * f_w]);
                }
                Tensors { w, u, up: vec![], q, qd: vec![], qdp: vec![] }
            }
            ProxyArch::Higher => {
                let (ud, up_slice) = map_slice(0);
                let (upd, upp) = map_slice(1);
                let (qd_dims, qp_slice) = map_slice(2);
                let (qpd, qpp) = map_slice(3);
                let mut u = vec![0.0; n * f_w];
                let mut up = vec![0.0; n * f_w];
                for v in 0..n {
                    ud.forward(up_slice, &inputs.u_in[v], &mut u[v * f_w..(v + 1) * f_w]);
                    upd.forward(upp, &inputs.u_in[v], &mut up[v * f_w..(v + 1) * f_w]);
                }
                let mut qd = Vec::with_capacity(n);
                let mut qdp = Vec::with_capacity(n);
                for v in 0..n {
                    let deg = inputs.topo.neighbors[v].len();
                    let mut qv = vec![0.0; deg * f_w];
                    let mut qpv = vec![0.0; deg * f_w];
                    for j in 0..deg {
                        qd_dims.forward(
                            qp_slice,
                            &inputs.q_dir_in[v][j],
                            &mut qv[j * f_w..(j + 1) * f_w],
                        );
                        qpd.forward(
                            qpp,
                            &inputs.q_dir_in[v][j],
                            &mut qpv[j * f_w..(j + 1) * f_w],
                        );
                    }
                    qd.push(qv);
                    qdp.push(qpv);
                }
                Tensors { w: vec![], u, up, q: vec![], qd, qdp }
            }
        }
    }

    fn forward(&self, p: &[f64], inputs: &InstanceInputs, x: &[f64]) -> Forward {
        let tensors = self.tensors(p, inputs);
        let phi = phi_from_tensors(self.arch, self.width, &tensors, &inputs.topo, x);
        let lay = self.layout();
        let head_w = &p[lay.head_w..lay.head_w + self.width];
        let head_b = lay.head_b.map_or(0.0, |o| p[o]);
        let raw = head_value(self.arch, head_w, head_b, &phi);
        Forward {
            value: self.output_scale * raw + self.output_shift,
            phi,
            tensors,
        }
    }

    fn grad_x(&self, p: &[f64], inputs: &InstanceInputs, fwd: &Forward, x: &[f64]) -> Vec<f64> {
        let lay = self.layout();
        let head_w = &p[lay.head_w..lay.head_w + self.width];
        let dphi = head_dphi(self.arch, head_w, &fwd.phi, self.output_scale);
        let mut dx = vec![0.0; inputs.topo.n];
        dx_from_tensors(
            self.arch,
            self.width,
            &fwd.tensors,
            &inputs.topo,
            x,
            &dphi,
            &mut dx,
        );
        dx
    }

    /// Accumulates `coef * d(value)/d(params)` into `grad`.
    fn grad_params(
        &self,
        p: &[f64],
        inputs: &InstanceInputs,
        fwd: &Forward,
        x: &[f64],
        coef: f64,
        grad: &mut [f64],
    ) {
        let lay = self.layout();
        let f_w = self.width;
        let head_w = &p[lay.head_w..lay.head_w + f_w];
        let coef_raw = coef * self.output_scale;
        // Head parameters.
        for k in 0..f_w {
            let dw = match self.arch {
                ProxyArch::Con => -fwd.phi[k].max(0.0),
                _ => fwd.phi[k],
            };
            grad[lay.head_w + k] += coef_raw * dw;
        }
        if let Some(bo) = lay.head_b {
            grad[bo] += coef_raw;
        }
        // Latent coefficients, then through the maps.
        let dphi = head_dphi(self.arch, head_w, &fwd.phi, coef_raw);
        let t = &fwd.tensors;
        let topo = &inputs.topo;
        match self.arch {
            ProxyArch::Aff | ProxyArch::Con => {
                let (wd, w_off) = lay.maps[0];
                let (ud, u_off) = lay.maps[1];
                let (qd, q_off) = lay.maps[2];
                let wp = &p[w_off..w_off + wd.param_len()];
                let up_ = &p[u_off..u_off + ud.param_len()];
                let qp_ = &p[q_off..q_off + qd.param_len()];
                // dphi_k/dW_k = 1
                wd.backward(wp, &inputs.w_in, &dphi, &mut grad[w_off..w_off + wd.param_len()]);
                let mut dvec = vec![0.0; f_w];
                for v in 0..topo.n {
                    if x[v] == 0.0 {
                        continue;
                    }
                    for k in 0..f_w {
                        dvec[k] = dphi[k] * x[v];
                    }
                    ud.backward(
                        up_,
                        &inputs.u_in[v],
                        &dvec,
                        &mut grad[u_off..u_off + ud.param_len()],
                    );
                }
                for (e, &(a, b)) in topo.edges.iter().enumerate() {
                    let prod = x[a] * x[b];
                    if prod == 0.0 {
                        continue;
                    }
                    for k in 0..f_w {
                        dvec[k] = dphi[k] * prod;
                    }
                    qd.backward(
                        qp_,
                        &inputs.q_in[e],
                        &dvec,
                        &mut grad[q_off..q_off + qd.param_len()],
                    );
                }
            }
            ProxyArch::Higher => {
                let (ud, u_off) = lay.maps[0];
                let (upd, up_off) = lay.maps[1];
                let (qdims, q_off) = lay.maps[2];
                let (qpd, qp_off) = lay.maps[3];
                let up_slice = &p[u_off..u_off + ud.param_len()];
                let upp = &p[up_off..up_off + upd.param_len()];
                let qp_slice = &p[q_off..q_off + qdims.param_len()];
                let qpp = &p[qp_off..qp_off + qpd.param_len()];
                let mut du = vec![0.0; f_w];
                let mut dup = vec![0.0; f_w];
                let mut dq = vec![0.0; f_w];
                let mut dqp = vec![0.0; f_w];
                for v in 0..topo.n {
                    let deg = topo.neighbors[v].len();
                    let (prod, prefix, suffix) =
                        node_products(f_w, &t.qd[v], &t.qdp[v], &topo.neighbors[v], x);
                    for k in 0..f_w {
                        du[k] = dphi[k] * x[v] * prod[k];
                        dup[k] = dphi[k] * prod[k];
                    }
                    ud.backward(
                        up_slice,
                        &inputs.u_in[v],
                        &du,
                        &mut grad[u_off..u_off + ud.param_len()],
                    );
                    upd.backward(
                        upp,
                        &inputs.u_in[v],
                        &dup,
                        &mut grad[up_off..up_off + upd.param_len()],
                    );
                    for j in 0..deg {
                        let xu = x[topo.neighbors[v][j]];
                        for k in 0..f_w {
                            let own = t.u[v * f_w + k] * x[v] + t.up[v * f_w + k];
                            let leave = prefix[j * f_w + k] * suffix[j * f_w + k];
                            let base = dphi[k] * own * leave;
                            dq[k] = base * xu;
                            dqp[k] = base;
                        }
                        qdims.backward(
                            qp_slice,
                            &inputs.q_dir_in[v][j],
                            &dq,
                            &mut grad[q_off..q_off + qdims.param_len()],
                        );
                        qpd.backward(
                            qpp,
                            &inputs.q_dir_in[v][j],
                            &dqp,
                            &mut grad[qp_off..qp_off + qpd.param_len()],
                        );
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Shared numeric cores
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

/// Numeric latent coefficients for one instance (fields unused by the current
/// architecture stay empty). `u`, `up` are `n x F` row-major; `q` is `m x F`;
/// `qd[v]`, `qdp[v]` are `deg(v) x F` in neighbor order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tensors {
    w: Vec<f64>,
    u: Vec<f64>,
    up: Vec<f64>,
    q: Vec<f64>,
    qd: Vec<Vec<f64>>,
    qdp: Vec<Vec<f64>>,
}

struct Forward {
    value: f64,
    phi: Vec<f64>,
    tensors: Tensors,
}

/// Per-node factor products for the higher-order latent: returns the full product
/// and prefix/suffix leave-one-out tables, each `deg x F` row-major.
fn node_products(
    f_w: usize,
    qv: &[f64],
    qpv: &[f64],
    nbrs: &[usize],
    x: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let deg = nbrs.len();
    let mut factors = vec![0.0; deg * f_w];
    for j in 0..deg {
        let xu = x[nbrs[j]];
        for k in 0..f_w {
            factors[j * f_w + k] = qv[j * f_w + k] * xu + qpv[j * f_w + k];
        }
    }
    let mut prefix = vec![1.0; deg * f_w];
    for j in 1..deg {
        for k in 0..f_w {
            prefix[j * f_w + k] = prefix[(j - 1) * f_w + k] * factors[(j - 1) * f_w + k];
        }
    }
    let mut suffix = vec![1.0; deg * f_w];
    for j in (0..deg.saturating_sub(1)).rev() {
        for k in 0..f_w {
            suffix[j * f_w + k] = suffix[(j + 1) * f_w + k] * factors[(j + 1) * f_w + k];
        }
    }
    let mut prod = vec![1.0; f_w];
    if deg > 0 {
        for k in 0..f_w {
            prod[k] = prefix[(deg - 1) * f_w + k] * factors[(deg - 1) * f_w + k];
        }
    }
    (prod, prefix, suffix)
}

fn phi_from_tensors(
    arch: ProxyArch,
    f_w: usize,
    t: &Tensors,
    topo: &Topology,
    x: &[f64],
) -> Vec<f64> {
    match arch {
        ProxyArch::Aff | ProxyArch::Con => {
            let mut phi = t.w.clone();
            for v in 0..topo.n {
                let xv = x[v];
                if xv == 0.0 {
                    continue;
                }
                for k in 0..f_w {
                    phi[k] += t.u[v * f_w + k] * xv;
                }
            }
            for (e, &(a, b)) in topo.edges.iter().enumerate() {
                let prod = x[a] * x[b];
                if prod == 0.0 {
                    continue;
                }
                for k in 0..f_w {
                    phi[k] += t.q[e * f_w + k] * prod;
                }
            }
            phi
        }
        ProxyArch::Higher => {
            let mut phi = vec![0.0; f_w];
            for v in 0..topo.n {
                let (prod, _, _) = node_products(f_w, &t.qd[v], &t.qdp[v], &topo.neighbors[v], x);
                for k in 0..f_w {
                    phi[k] += (t.u[v * f_w + k] * x[v] + t.up[v * f_w + k]) * prod[k];
                }
            }
            phi
        }
    }
}

fn dx_from_tensors(
    arch: ProxyArch,
    f_w: usize,
    t: &Tensors,
    topo: &Topology,
    x: &[f64],
    dphi: &[f64],
    dx: &mut [f64],
) {
    match arch {
        ProxyArch::Aff | ProxyArch::Con => {
            for v in 0..topo.n {
                let mut s = 0.0;
                for k in 0..f_w {
                    s += dphi[k] * t.u[v * f_w + k];
                }
                dx[v] += s;
            }
            for (e, &(a, b)) in topo.edges.iter().enumerate() {
                let mut s = 0.0;
                for k in 0..f_w {
                    s += dphi[k] * t.q[e * f_w + k];
                }
                dx[a] += s * x[b];
                dx[b] += s * x[a];
            }
        }
        ProxyArch::Higher => {
            for v in 0..topo.n {
                let deg = topo.neighbors[v].len();
                let (prod, prefix, suffix) =
                    node_products(f_w, &t.qd[v], &t.qdp[v], &topo.neighbors[v], x);
                let mut s = 0.0;
                for k in 0..f_w {
                    s += dphi[k] * t.u[v * f_w + k] * prod[k];
                }
                dx[v] += s;
                for j in 0..deg {
                    let u_j = topo.neighbors[v][j];
                    let mut s = 0.0;
                    for k in 0..f_w {
                        let own = t.u[v * f_w + k] * x[v] + t.up[v * f_w + k];
                        let leave = prefix[j * f_w + k] * suffix[j * f_w + k];
                        s += dphi[k] * own * t.qd[v][j * f_w + k] * leave;
                    }
                    dx[u_j] += s;
                }
            }
        }
    }
}

fn head_value(arch: ProxyArch, w: &[f64], b: f64, phi: &[f64]) -> f64 {
    match arch {
        ProxyArch::Aff | ProxyArch::Higher => w.iter().zip(phi).map(|(a, p)| a * p).sum(),
        ProxyArch::Con => {
            b - w
                .iter()
                .zip(phi)
                .map(|(a, p)| a * p.max(0.0))
                .sum::<f64>()
        }
    }
}

/// `coef * d(raw head output)/d(phi)`; the rectifier subgradient at 0 is 0.
fn head_dphi(arch: ProxyArch, w: &[f64], phi: &[f64], coef: f64) -> Vec<f64> {
    match arch {
        ProxyArch::Aff | ProxyArch::Higher => w.iter().map(|a| coef * a).collect(),
        ProxyArch::Con => w
            .iter()
            .zip(phi)
            .map(|(a, p)| if *p > 0.0 { -coef * a } else { 0.0 })
            .collect(),
    }
}

/// Standardized feature-map inputs for one instance.
struct InstanceInputs {
    topo: Topology,
    w_in: Vec<f64>,
    u_in: Vec<Vec<f64>>,
    q_in: Vec<Vec<f64>>,
    q_dir_in: Vec<Vec<Vec<f64>>>,
}

// ---------------------------------------------------------------------------
// Compiled form (fixed parameters, one instance)
// ---------------------------------------------------------------------------

/// A proxy bound to one instance with its latent coefficients precomputed; this is
/// what the solver optimizes against.
#[derive(Debug, Clone)]
pub struct CompiledProxy {
    arch: ProxyArch,
    width: usize,
    structure: StructureClass,
    topo: Topology,
    tensors: Tensors,
    head_w: Vec<f64>,
    head_b: f64,
    output_scale: f64,
    output_shift: f64,
}

impl CompiledProxy {
    /// The latent vector at a point; used to keep finite-difference probes away
    /// from the rectifier kinks.
    pub fn latent(&self, x: &[f64]) -> Vec<f64> {
        phi_from_tensors(self.arch, self.width, &self.tensors, &self.topo, x)
    }
}

impl Relaxation for CompiledProxy {
    fn arity(&self) -> usize {
        self.topo.n
    }

    fn structure(&self) -> StructureClass {
        self.structure
    }

    fn value(&self, x: &[f64]) -> f64 {
        let phi = self.latent(x);
        self.output_scale * head_value(self.arch, &self.head_w, self.head_b, &phi)
            + self.output_shift
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let phi = self.latent(x);
        let dphi = head_dphi(self.arch, &self.head_w, &phi, self.output_scale);
        grad.fill(0.0);
        dx_from_tensors(self.arch, self.width, &self.tensors, &self.topo, x, &dphi, grad);
    }
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// Per-epoch mean training loss and the final parameters' loss, in the units the
/// optimizer saw: standardized label units when standardization is on (so a
/// squared loss of `x` means a fraction `x` of the label variance is unexplained),
/// raw label units otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub loss_curve: Vec<f64>,
    pub final_loss: f64,
}

fn loss_and_dresidual(kind: LossKind, residual: f64) -> (f64, f64) {
    match kind {
        LossKind::Squared => (residual * residual, 2.0 * residual),
        LossKind::Huber { delta } => {
            if residual.abs() <= delta {
                (0.5 * residual * residual, residual)
            } else {
                (delta * (residual.abs() - 0.5 * delta), delta * residual.signum())
            }
        }
    }
}

fn validate_training(dataset: &Dataset, config: &TrainConfig) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    if !(config.step_size > 0.0) {
        return Err(Error::InvalidArgument("step size must be positive".into()));
    }
    if config.batch == 0 || config.steps == 0 {
        return Err(Error::InvalidArgument("batch and steps must be at least 1".into()));
    }
    Ok(())
}

/// Trains a proxy of the given architecture on a labeled dataset with minibatch
/// gradient descent. Deterministic in `(dataset, arch, config)`.
pub fn train_proxy(
    dataset: &Dataset,
    arch: ProxyArch,
    config: &TrainConfig,
) -> Result<(ProxyModel, TrainReport)> {
    validate_training(dataset, config)?;
    let scope = dataset.scope();
    let attr_dim = dataset.pairs[0].0.attr_dim();
    let mut model = ProxyModel::init(arch, attr_dim, scope, config)?;

    // Standardization statistics from the variable graphs and labels.
    if config.standardize {
        let d = model.var_attr_dim();
        let mut sum = vec![0.0; d];
        let mut sumsq = vec![0.0; d];
        let mut count = 0usize;
        for (g, _) in &dataset.pairs {
            let vg = model.variable_graph(g)?;
            for a in vg.node_attrs() {
                for j in 0..d {
                    sum[j] += a[j];
                    sumsq[j] += a[j] * a[j];
                }
            }
            count += vg.node_count();
        }
        model.input_norm = (0..d)
            .map(|j| {
                let mean = sum[j] / count as f64;
                let var = (sumsq[j] / count as f64 - mean * mean).max(0.0);
                (mean, 1.0 / var.sqrt().max(1e-9))
            })
            .collect();
        let y_mean =
            dataset.pairs.iter().map(|(_, s)| s.cost).sum::<f64>() / dataset.len() as f64;
        let y_var = dataset
            .pairs
            .iter()
            .map(|(_, s)| (s.cost - y_mean).powi(2))
            .sum::<f64>()
            / dataset.len() as f64;
        model.output_scale = y_var.sqrt().max(1e-9);
        model.output_shift = y_mean;
    }
    fit(model, dataset, config)
}

/// Continues training an existing model (typically loaded from a checkpoint) on
/// a dataset. The model's input and output normalization are kept exactly as
/// stored — recomputing them would silently reinterpret the parameters.
pub fn train_proxy_warm(
    model: ProxyModel,
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(ProxyModel, TrainReport)> {
    validate_training(dataset, config)?;
    fit(model, dataset, config)
}

fn fit(
    mut model: ProxyModel,
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(ProxyModel, TrainReport)> {
    let arch = model.arch();
    let width = model.width();

    // Per-sample constants.
    let mut inputs = Vec::with_capacity(dataset.len());
    let mut points = Vec::with_capacity(dataset.len());
    let mut labels = Vec::with_capacity(dataset.len());
    for (g, s) in &dataset.pairs {
        inputs.push(model.instance_inputs(g)?);
        points.push(binary_to_f64(&s.assignment));
        labels.push(s.cost);
    }

    let lay = model.layout();
    let mut params = std::mem::take(&mut model.params);
    let mut grad = vec![0.0; params.len()];
    let mut rng = rng_from_seed(config.seed.wrapping_add(1));
    let epoch_len = dataset.len().div_ceil(config.batch).max(1);
    let mut curve = Vec::new();
    // The loss acts on standardized residuals, which keeps gradients O(1)
    // regardless of the label scale; with standardization off this divides by 1.
    let scale = model.output_scale;

    let mean_loss = |p: &[f64], m: &ProxyModel| -> f64 {
        let mut total = 0.0;
        for i in 0..inputs.len() {
            let fwd = m.forward_with(p, &inputs[i], &points[i]);
            total += loss_and_dresidual(config.loss, (fwd - labels[i]) / scale).0;
        }
        total / inputs.len() as f64
    };

    for step in 0..config.steps {
        grad.fill(0.0);
        let mut batch_loss = 0.0;
        for _ in 0..config.batch {
            let i = rng.gen_range(0..inputs.len());
            let fwd = model.forward(&params, &inputs[i], &points[i]);
            let (l, dres) =
                loss_and_dresidual(config.loss, (fwd.value - labels[i]) / scale);
            batch_loss += l;
            model.grad_params(
                &params,
                &inputs[i],
                &fwd,
                &points[i],
                dres / (scale * config.batch as f64),
                &mut grad,
            );
        }
        if !batch_loss.is_finite() {
            return Err(Error::Diverged(step));
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= config.step_size * g;
        }
        if config.projection && arch == ProxyArch::Con {
            for w in &mut params[lay.head_w..lay.head_w + width] {
                if *w < 0.0 {
                    *w = 0.0;
                }
            }
        }
        if let Some(i) = params.iter().position(|v| !v.is_finite()) {
            let _ = i;
            return Err(Error::Diverged(step));
        }
        if (step + 1) % epoch_len == 0 {
            curve.push(mean_loss(&params, &model));
        }
    }
    let final_loss = mean_loss(&params, &model);
    if curve.last() != Some(&final_loss) {
        curve.push(final_loss);
    }
    model.params = params;
    Ok((model, TrainReport { loss_curve: curve, final_loss }))
}

impl ProxyModel {
    /// Forward value only, with explicit parameters (training inner loop).
    fn forward_with(&self, p: &[f64], inputs: &InstanceInputs, x: &[f64]) -> f64 {
        self.forward(p, inputs, x).value
    }
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

pub const CHECKPOINT_VERSION: u32 = 1;

/// A trained model plus the configuration that produced it, with a hash of the
/// configuration for audit. JSON on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub arch: ProxyArch,
    pub model: ProxyModel,
    pub config: TrainConfig,
    pub config_hash: String,
}

fn config_hash(config: &TrainConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    format!("{:016x}", fnv1a(json.as_bytes()))
}

impl Checkpoint {
    pub fn new(arch: ProxyArch, model: ProxyModel, config: TrainConfig) -> Self {
        let config_hash = config_hash(&config);
        Checkpoint { version: CHECKPOINT_VERSION, arch, model, config, config_hash }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, serde_json::to_string(self).expect("checkpoint serializes"))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {} (this build reads {})",
                cp.version, CHECKPOINT_VERSION
            )));
        }
        if cp.config_hash != config_hash(&cp.config) {
            return Err(Error::Checkpoint(
                "config hash does not match the stored config".into(),
            ));
        }
        if cp.arch != cp.model.arch() {
            return Err(Error::Checkpoint(
                "checkpoint architecture tag disagrees with the model".into(),
            ));
        }
        Ok(cp)
    }
}
