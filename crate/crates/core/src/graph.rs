//! Graph instances, variable scopes, and assignments.
//!
//! An instance is an undirected attributed graph. Decision variables attach either to
//! nodes or to edges; the edge-variable case can be reduced to the node case by lifting
//! the graph (edges become nodes, incident edge pairs become edges).

use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which entities of the graph carry decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarScope {
    Node,
    Edge,
}

impl VarScope {
    pub fn as_str(self) -> &'static str {
        match self {
            VarScope::Node => "node",
            VarScope::Edge => "edge",
        }
    }
}

impl std::str::FromStr for VarScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node" => Ok(VarScope::Node),
            "edge" => Ok(VarScope::Edge),
            other => Err(Error::Parse(format!("unknown scope {other:?}"))),
        }
    }
}

/// Undirected graph with per-node attribute vectors and optional per-edge attributes.
///
/// Invariants, enforced at construction: no self-loops, no duplicate edges (unordered),
/// endpoints in range, one attribute vector per node with a common dimension, and when
/// edge attributes are present, one vector per edge with a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInstance {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    node_attrs: Vec<Vec<f64>>,
    edge_attrs: Option<Vec<Vec<f64>>>,
}

impl GraphInstance {
    pub fn new(
        node_count: usize,
        edges: Vec<(usize, usize)>,
        node_attrs: Vec<Vec<f64>>,
        edge_attrs: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInstance("graph has no nodes".into()));
        }
        if node_attrs.len() != node_count {
            return Err(Error::InvalidInstance(format!(
                "expected {} node attribute vectors, got {}",
                node_count,
                node_attrs.len()
            )));
        }
        let attr_dim = node_attrs[0].len();
        for (v, attrs) in node_attrs.iter().enumerate() {
            if attrs.len() != attr_dim {
                return Err(Error::InvalidInstance(format!(
                    "node {v} has {} attributes, expected {attr_dim}",
                    attrs.len()
                )));
            }
            if let Some(a) = attrs.iter().find(|a| !a.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "node {v} has non-finite attribute {a}"
                )));
            }
        }
        let mut seen = HashSet::new();
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::InvalidInstance(format!(
                    "edge {idx} is a self-loop on node {u}"
                )));
            }
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidInstance(format!(
                    "edge {idx} = ({u}, {v}) references a node >= {node_count}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidInstance(format!(
                    "edge {idx} = ({u}, {v}) duplicates an earlier edge"
                )));
            }
        }
        if let Some(ea) = &edge_attrs {
            if ea.len() != edges.len() {
                return Err(Error::InvalidInstance(format!(
                    "expected {} edge attribute vectors, got {}",
                    edges.len(),
                    ea.len()
                )));
            }
            let dim = ea.first().map_or(0, Vec::len);
            for (e, attrs) in ea.iter().enumerate() {
                if attrs.len() != dim {
                    return Err(Error::InvalidInstance(format!(
                        "edge {e} has {} attributes, expected {dim}",
                        attrs.len()
                    )));
                }
            }
        }
        Ok(Self {
            node_count,
            edges,
            node_attrs,
            edge_attrs,
        })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn node_attrs(&self) -> &[Vec<f64>] {
        &self.node_attrs
    }

    pub fn edge_attrs(&self) -> Option<&[Vec<f64>]> {
        self.edge_attrs.as_deref()
    }

    pub fn attr_dim(&self) -> usize {
        self.node_attrs[0].len()
    }

    /// Number of decision variables under a scope.
    pub fn var_count(&self, scope: VarScope) -> usize {
        match scope {
            VarScope::Node => self.node_count,
            VarScope::Edge => self.edges.len(),
        }
    }

    /// Mean of the node attribute vectors; the cheap whole-graph summary used by
    /// feature maps.
    pub fn mean_attrs(&self) -> Vec<f64> {
        let d = self.attr_dim();
        let mut mean = vec![0.0; d];
        for attrs in &self.node_attrs {
            for (m, a) in mean.iter_mut().zip(attrs) {
                *m += a;
            }
        }
        let n = self.node_count as f64;
        for m in &mut mean {
            *m /= n;
        }
        mean
    }

    /// For each node, the indices of its incident edges, ascending.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            inc[v].push(e);
        }
        inc
    }

    /// For each node, its neighbor nodes, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Unordered node pairs that are NOT edges, lexicographic.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let present: HashSet<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        let mut out = Vec::new();
        for u in 0..self.node_count {
            for v in (u + 1)..self.node_count {
                if !present.contains(&(u, v)) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Edge list of a rows x cols lattice with nodes numbered row-major. Edges are
    /// listed as the horizontal edges of each row, then the vertical edges of each
    /// column; this order is part of the dataset contract.
    pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::with_capacity(2 * rows * cols - rows - cols);
        for r in 0..rows {
            for c in 0..cols.saturating_sub(1) {
                edges.push((at(r, c), at(r, c + 1)));
            }
        }
        for c in 0..cols {
            for r in 0..rows.saturating_sub(1) {
                edges.push((at(r, c), at(r + 1, c)));
            }
        }
        edges
    }

    /// Lattice instance with the row-major edge order of [`Self::grid_edges`].
    pub fn grid(rows: usize, cols: usize, node_attrs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows * cols, Self::grid_edges(rows, cols), node_attrs, None)
    }

    /// Random graph where each unordered pair is an edge independently with
    /// probability `p`. Node attributes are the degree normalized by `n - 1`.
    pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let scale = if n > 1 { (n - 1) as f64 } else { 1.0 };
        let attrs = degree.iter().map(|&d| vec![d as f64 / scale]).collect();
        Self::new(n, edges, attrs, None)
    }

    /// Two nodes joined by one edge.
    pub fn single_edge(attrs_a: Vec<f64>, attrs_b: Vec<f64>) -> Result<Self> {
        Self::new(2, vec![(0, 1)], vec![attrs_a, attrs_b], None)
    }

    /// Path on the given node attributes, edges (0,1), (1,2), ...
    pub fn path(node_attrs: Vec<Vec<f64>>) -> Result<Self> {
        let n = node_attrs.len();
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::new(n, edges, node_attrs, None)
    }

    /// Complete graph on the given node attributes.
    pub fn complete(node_attrs: Vec<Vec<f64>>) -> Result<Self> {
        let n = node_attrs.len();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::new(n, edges, node_attrs, None)
    }

    /// Reduction from edge variables to node variables: each edge of `self` becomes a
    /// node of the lifted graph, and two lifted nodes are adjacent when the original
    /// edges share an endpoint. A lifted node's attributes are the concatenated
    /// endpoint attributes; with `with_products`, the per-dimension products of the
    /// endpoint attributes are appended, which makes low-order polynomial edge costs
    /// linearly representable.
    pub fn lift_to_edges(&self, with_products: bool) -> Result<GraphInstance> {
        if self.edges.is_empty() {
            return Err(Error::InvalidInstance(
                "cannot lift a graph with no edges".into(),
            ));
        }
        let d = self.attr_dim();
        let mut attrs = Vec::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            let mut a = Vec::with_capacity(if with_products { 3 * d } else { 2 * d });
            a.extend_from_slice(&self.node_attrs[u]);
            a.extend_from_slice(&self.node_attrs[v]);
            if with_products {
                for k in 0..d {
                    a.push(self.node_attrs[u][k] * self.node_attrs[v][k]);
                }
            }
            attrs.push(a);
        }
        let mut lifted_edges = Vec::new();
        for i in 0..self.edges.len() {
            let (a, b) = self.edges[i];
            for j in (i + 1)..self.edges.len() {
                let (c, d2) = self.edges[j];
                if a == c || a == d2 || b == c || b == d2 {
                    lifted_edges.push((i, j));
                }
            }
        }
        GraphInstance::new(self.edges.len(), lifted_edges, attrs, None)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(s)?;
        raw.into_instance()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&GraphJson::from_instance(self))
            .expect("graph serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct GraphJson {
    nodes: Vec<NodeJson>,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_attrs: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    attrs: Vec<f64>,
}

impl GraphJson {
    pub(crate) fn from_instance(g: &GraphInstance) -> Self {
        GraphJson {
            nodes: g
                .node_attrs
                .iter()
                .map(|a| NodeJson { attrs: a.clone() })
                .collect(),
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            edge_attrs: g.edge_attrs.clone(),
        }
    }

    pub(crate) fn into_instance(self) -> Result<GraphInstance> {
        GraphInstance::new(
            self.nodes.len(),
            self.edges.iter().map(|e| (e[0], e[1])).collect(),
            self.nodes.into_iter().map(|n| n.attrs).collect(),
            self.edge_attrs,
        )
    }
}

/// Fractional assignment to the variables of one scope; every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftAssignment {
    pub scope: VarScope,
    pub values: Vec<f64>,
}

impl SoftAssignment {
    pub fn new(scope: VarScope, values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "soft assignment entry {i} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(Self { scope, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A binary assignment with its observed cost, and optionally the constraint value at
/// that assignment. Training data for surrogate objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub assignment: Vec<u8>,
    pub cost: f64,
    pub constraint_value: Option<f64>,
}

impl LabeledSample {
    pub fn new(assignment: Vec<u8>, cost: f64, constraint_value: Option<f64>) -> Result<Self> {
        if let Some(i) = assignment.iter().position(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "assignment entry {i} is not binary"
            )));
        }
        if !cost.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite cost {cost}")));
        }
        Ok(Self {
            assignment,
            cost,
            constraint_value,
        })
    }
}

/// Binary vector as floats, for evaluating relaxations at vertices.
pub fn binary_to_f64(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| f64::from(b)).collect()
}
