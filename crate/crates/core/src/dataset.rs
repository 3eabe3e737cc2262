//! Ground-truth cost generators and labeled-dataset sampling.
//!
//! A dataset is a list of `(instance, labeled sample)` pairs: each pair holds a
//! fresh randomly configured instance together with one uniformly drawn binary
//! assignment and its ground-truth cost. Sampling is a pure function of the
//! configuration and seed, and the on-disk form (JSON instances + CSV samples)
//! round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{binary_to_f64, GraphInstance, GraphJson, LabeledSample, VarScope};
use crate::multilinear::BooleanTable;
use crate::objectives::{toy_ground_truth_cost, CoverPenalty, MatchingPenalty};
use crate::relaxation::Relaxation;
use crate::rng::{child_seed, rng_from_seed};

// ---------------------------------------------------------------------------
// Ground-truth edge weights
// ---------------------------------------------------------------------------

/// How an edge's scalar cost is derived from its endpoints' first attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    /// `(z_u + z_v) / 3 + z_u z_v / 100`
    Covering,
    /// `z_u z_v`
    Matching,
}

impl WeightRule {
    pub fn apply(self, zu: f64, zv: f64) -> f64 {
        match self {
            WeightRule::Covering => (zu + zv) / 3.0 + zu * zv / 100.0,
            WeightRule::Matching => zu * zv,
        }
    }
}

/// Per-edge cost vector of an instance under a weight rule, reading the first
/// attribute of each endpoint.
pub fn edge_cost_vector(g: &GraphInstance, rule: WeightRule) -> Result<Vec<f64>> {
    if g.attr_dim() == 0 {
        return Err(Error::InvalidInstance(
            "edge weights need at least one node attribute".into(),
        ));
    }
    Ok(g.edges()
        .iter()
        .map(|&(u, v)| rule.apply(g.node_attrs()[u][0], g.node_attrs()[v][0]))
        .collect())
}

// ---------------------------------------------------------------------------
// Families and sampling
// ---------------------------------------------------------------------------

/// A problem family a dataset can be drawn from. Each sample gets a freshly
/// configured instance (except `Table`, where the hidden cost table is drawn once
/// per dataset and shared, mimicking repeated queries of one unknown function).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Single-edge instances with node attributes `(c1, c2)` drawn uniformly from
    /// `[0, config_max]`; node-scope assignments labeled by the two-variable
    /// benchmark cost.
    Toy { config_max: f64 },
    /// Grid instances with integer node attributes in `{0, ..., attr_max}`;
    /// edge-scope assignments labeled by the covering weight rule, with the
    /// covering penalty stored as the constraint value.
    Covering { rows: usize, cols: usize, attr_max: u32 },
    /// As `Covering`, with the matching weight rule and matching penalty.
    Matching { rows: usize, cols: usize, attr_max: u32 },
    /// One hidden random table on `arity` variables (values uniform in `[0, 10)`),
    /// queried at random binary points; instances are complete graphs with one-hot
    /// node attributes.
    Table { arity: usize },
}

impl Family {
    pub fn scope(&self) -> VarScope {
        match self {
            Family::Toy { .. } | Family::Table { .. } => VarScope::Node,
            Family::Covering { .. } | Family::Matching { .. } => VarScope::Edge,
        }
    }

    /// Number of variables per sample.
    pub fn var_count(&self) -> usize {
        match *self {
            Family::Toy { .. } => 2,
            Family::Covering { rows, cols, .. } | Family::Matching { rows, cols, .. } => {
                2 * rows * cols - rows - cols
            }
            Family::Table { arity } => arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    #[serde(flatten)]
    pub family: Family,
    pub count: usize,
    pub seed: u64,
}

/// A sampled dataset; pairs are in sampling order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub family: Family,
    pub seed: u64,
    pub pairs: Vec<(GraphInstance, LabeledSample)>,
}

impl Dataset {
    pub fn scope(&self) -> VarScope {
        self.family.scope()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn random_bits<R: Rng>(n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.gen::<bool>())).collect()
}

fn grid_with_random_attrs<R: Rng>(
    rows: usize,
    cols: usize,
    attr_max: u32,
    rng: &mut R,
) -> Result<GraphInstance> {
    let attrs = (0..rows * cols)
        .map(|_| vec![f64::from(rng.gen_range(0..=attr_max))])
        .collect();
    GraphInstance::grid(rows, cols, attrs)
}

/// Draws `config.count` pairs; deterministic in `(config, seed)`. Assignments are
/// uniform over all binary vectors of the family's variable count.
pub fn sample_dataset(config: &DatasetConfig) -> Result<Dataset> {
    if let Family::Covering { rows, cols, .. } | Family::Matching { rows, cols, .. } =
        config.family
    {
        if rows * cols < 2 {
            return Err(Error::InvalidArgument(
                "grid families need at least two nodes".into(),
            ));
        }
    }
    // The hidden table (if any) comes from its own seed stream so per-sample
    // streams stay independent of it.
    let shared_table = match config.family {
        Family::Table { arity } => {
            let mut rng = rng_from_seed(child_seed(config.seed, u64::MAX));
            Some(BooleanTable::random(arity, 0.0..10.0, &mut rng)?)
        }
        _ => None,
    };
    let shared_instance = match config.family {
        Family::Table { arity } => {
            let attrs = (0..arity)
                .map(|v| (0..arity).map(|k| f64::from(k == v)).collect())
                .collect();
            Some(GraphInstance::complete(attrs)?)
        }
        _ => None,
    };

    let mut pairs = Vec::with_capacity(config.count);
    for i in 0..config.count {
        let mut rng = rng_from_seed(child_seed(config.seed, i as u64));
        let pair = match config.family {
            Family::Toy { config_max } => {
                let c1 = rng.gen_range(0.0..=config_max);
                let c2 = rng.gen_range(0.0..=config_max);
                let g = GraphInstance::single_edge(vec![c1], vec![c2])?;
                let bits = random_bits(2, &mut rng);
                let cost = toy_ground_truth_cost(c1, c2, bits[0], bits[1]);
                (g, LabeledSample::new(bits, cost, None)?)
            }
            Family::Covering { rows, cols, attr_max } => {
                let g = grid_with_random_attrs(rows, cols, attr_max, &mut rng)?;
                let w = edge_cost_vector(&g, WeightRule::Covering)?;
                let bits = random_bits(g.edge_count(), &mut rng);
                let x = binary_to_f64(&bits);
                let cost = w.iter().zip(&x).map(|(c, v)| c * v).sum();
                let gval = CoverPenalty::from_instance(&g).value(&x);
                (g, LabeledSample::new(bits, cost, Some(gval))?)
            }
            Family::Matching { rows, cols, attr_max } => {
                let g = grid_with_random_attrs(rows, cols, attr_max, &mut rng)?;
                let w = edge_cost_vector(&g, WeightRule::Matching)?;
                let bits = random_bits(g.edge_count(), &mut rng);
                let x = binary_to_f64(&bits);
                let cost = w.iter().zip(&x).map(|(c, v)| c * v).sum();
                let gval = MatchingPenalty::from_instance(&g).value(&x);
                (g, LabeledSample::new(bits, cost, Some(gval))?)
            }
            Family::Table { .. } => {
                let table = shared_table.as_ref().expect("table family sets the table");
                let g = shared_instance.as_ref().expect("table family sets the instance");
                let bits = random_bits(table.arity(), &mut rng);
                let cost = table.at_binary(&bits)?;
                (g.clone(), LabeledSample::new(bits, cost, None)?)
            }
        };
        pairs.push(pair);
    }
    Ok(Dataset {
        family: config.family.clone(),
        seed: config.seed,
        pairs,
    })
}

// ---------------------------------------------------------------------------
// On-disk form: meta.json + instances.json + samples.csv
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MetaJson {
    #[serde(flatten)]
    family: Family,
    scope: VarScope,
    seed: u64,
    count: usize,
}

/// CSV header and rows for the samples: columns `x_0..x_{n-1}`, `cost`, and `g`
/// when constraint values are present. The column order is part of the format.
fn samples_to_csv(pairs: &[(GraphInstance, LabeledSample)], n: usize) -> Result<String> {
    let with_g = pairs
        .first()
        .is_some_and(|(_, s)| s.constraint_value.is_some());
    let mut out = String::new();
    for i in 0..n {
        let _ = write!(out, "x_{i},");
    }
    out.push_str(if with_g { "cost,g\n" } else { "cost\n" });
    for (idx, (_, s)) in pairs.iter().enumerate() {
        if s.assignment.len() != n {
            return Err(Error::InvalidArgument(format!(
                "sample {idx} has {} variables, expected {n}",
                s.assignment.len()
            )));
        }
        if s.constraint_value.is_some() != with_g {
            return Err(Error::InvalidArgument(format!(
                "sample {idx} is inconsistent about having a constraint value"
            )));
        }
        for &b in &s.assignment {
            let _ = write!(out, "{b},");
        }
        match s.constraint_value {
            Some(g) => {
                let _ = writeln!(out, "{},{}", s.cost, g);
            }
            None => {
                let _ = writeln!(out, "{}", s.cost);
            }
        }
    }
    Ok(out)
}

fn samples_from_csv(text: &str) -> Result<Vec<LabeledSample>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("samples file is empty".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().take_while(|c| c.starts_with("x_")).count();
    let with_g = match &cols[n..] {
        ["cost"] => false,
        ["cost", "g"] => true,
        other => {
            return Err(Error::Parse(format!(
                "unexpected trailing columns {other:?} in samples header"
            )))
        }
    };
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = n + 1 + usize::from(with_g);
        if fields.len() != expected {
            return Err(Error::Parse(format!(
                "line {}: expected {expected} fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut bits = Vec::with_capacity(n);
        for f in &fields[..n] {
            match *f {
                "0" => bits.push(0),
                "1" => bits.push(1),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: assignment entry {other:?} is not 0/1",
                        lineno + 2
                    )))
                }
            }
        }
        let cost: f64 = fields[n]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad cost: {e}", lineno + 2)))?;
        let gval = if with_g {
            Some(fields[n + 1].parse::<f64>().map_err(|e| {
                Error::Parse(format!("line {}: bad constraint value: {e}", lineno + 2))
            })?)
        } else {
            None
        };
        samples.push(LabeledSample::new(bits, cost, gval)?);
    }
    Ok(samples)
}

impl Dataset {
    /// Writes `meta.json`, `instances.json`, and `samples.csv` into `dir`,
    /// creating it if needed.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let meta = MetaJson {
            family: self.family.clone(),
            scope: self.scope(),
            seed: self.seed,
            count: self.pairs.len(),
        };
        std::fs::write(
            dir.join("meta.json"),
            serde_json::to_string_pretty(&meta).expect("meta serializes"),
        )?;
        let instances: Vec<GraphJson> = self
            .pairs
            .iter()
            .map(|(g, _)| GraphJson::from_instance(g))
            .collect();
        std::fs::write(
            dir.join("instances.json"),
            serde_json::to_string(&instances).expect("instances serialize"),
        )?;
        let n = self.family.var_count();
        std::fs::write(dir.join("samples.csv"), samples_to_csv(&self.pairs, n)?)?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let meta: MetaJson =
            serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)?;
        let raw: Vec<GraphJson> =
            serde_json::from_str(&std::fs::read_to_string(dir.join("instances.json"))?)?;
        let instances: Vec<GraphInstance> = raw
            .into_iter()
            .map(GraphJson::into_instance)
            .collect::<Result<_>>()?;
        let samples = samples_from_csv(&std::fs::read_to_string(dir.join("samples.csv"))?)?;
        if instances.len() != samples.len() || instances.len() != meta.count {
            return Err(Error::Parse(format!(
                "dataset is inconsistent: meta says {} samples, found {} instances and {} rows",
                meta.count,
                instances.len(),
                samples.len()
            )));
        }
        Ok(Dataset {
            family: meta.family,
            seed: meta.seed,
            pairs: instances.into_iter().zip(samples).collect(),
        })
    }
}
