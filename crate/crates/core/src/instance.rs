//! Problem instances: transport topology, traffic demands, and cost model,
//! plus a seeded random generator and JSON file I/O.
//!
//! Generation is a pure function of `(node_count, variant, seed)`: the RNG
//! is seeded from those three values and every draw happens over explicitly
//! sorted collections, so instances are identical across platforms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{EdgeId, NodeId};
use crate::paths::CompactGraph;

/// One unidirectional traffic demand between two distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub src: NodeId,
    pub dst: NodeId,
    /// Offered load in bandwidth units; always > 0.
    pub rate: u64,
}

/// An undirected transport-network edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportEdge {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
}

/// Equipment and channel prices. Costs are integers so solver results can
/// be compared exactly, without floating-point tolerances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    /// LSR equipment cost per node.
    pub lsr_cost: BTreeMap<NodeId, u64>,
    /// Price of one channel module on each transport edge.
    pub channel_cost: BTreeMap<EdgeId, u64>,
    /// Bandwidth units carried by one channel module; always > 0.
    pub channel_capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub node_count: usize,
    pub variant: String,
    pub seed: u64,
}

/// A complete problem instance: what the network looks like, what traffic
/// it must carry, and what equipment costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub nodes: Vec<NodeId>,
    pub transport_edges: Vec<TransportEdge>,
    pub demands: Vec<Demand>,
    pub cost: CostModel,
    pub meta: Meta,
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceViolation {
    pub code: InstanceViolationCode,
    /// The field or element the violation is anchored to, e.g. `demands[3]`.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceViolationCode {
    EmptyNodes,
    DuplicateNode,
    NodeCountMismatch,
    UnknownEndpoint,
    SelfLoopEdge,
    DuplicateEdgeId,
    ParallelEdge,
    Disconnected,
    SelfDemand,
    ZeroRate,
    MissingCost,
    UnknownCostKey,
    ZeroCapacity,
}

impl fmt::Display for InstanceViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = match self {
            InstanceViolationCode::EmptyNodes => "EMPTY_NODES",
            InstanceViolationCode::DuplicateNode => "DUPLICATE_NODE",
            InstanceViolationCode::NodeCountMismatch => "NODE_COUNT_MISMATCH",
            InstanceViolationCode::UnknownEndpoint => "UNKNOWN_ENDPOINT",
            InstanceViolationCode::SelfLoopEdge => "SELF_LOOP_EDGE",
            InstanceViolationCode::DuplicateEdgeId => "DUPLICATE_EDGE_ID",
            InstanceViolationCode::ParallelEdge => "PARALLEL_EDGE",
            InstanceViolationCode::Disconnected => "DISCONNECTED",
            InstanceViolationCode::SelfDemand => "SELF_DEMAND",
            InstanceViolationCode::ZeroRate => "ZERO_RATE",
            InstanceViolationCode::MissingCost => "MISSING_COST",
            InstanceViolationCode::UnknownCostKey => "UNKNOWN_COST_KEY",
            InstanceViolationCode::ZeroCapacity => "ZERO_CAPACITY",
        };
        f.write_str(code)
    }
}

fn violation(
    code: InstanceViolationCode,
    subject: impl Into<String>,
    detail: impl Into<String>,
) -> InstanceViolation {
    InstanceViolation {
        code,
        subject: subject.into(),
        detail: detail.into(),
    }
}

impl Instance {
    /// Checks every instance invariant; empty report means the instance is
    /// usable by the builder and solvers.
    pub fn validate(&self) -> Vec<InstanceViolation> {
        let mut report = Vec::new();

        if self.nodes.is_empty() {
            report.push(violation(
                InstanceViolationCode::EmptyNodes,
                "nodes",
                "node list is empty",
            ));
        }
        let mut node_set = BTreeSet::new();
        for n in &self.nodes {
            if !node_set.insert(n.clone()) {
                report.push(violation(
                    InstanceViolationCode::DuplicateNode,
                    "nodes",
                    format!("node {n} listed twice"),
                ));
            }
        }
        if self.meta.node_count != self.nodes.len() {
            report.push(violation(
                InstanceViolationCode::NodeCountMismatch,
                "meta.node_count",
                format!(
                    "meta says {} nodes, list has {}",
                    self.meta.node_count,
                    self.nodes.len()
                ),
            ));
        }

        let mut edge_ids = BTreeSet::new();
        let mut edge_pairs = BTreeSet::new();
        for (i, e) in self.transport_edges.iter().enumerate() {
            let subject = format!("transport_edges[{i}]");
            for end in [&e.a, &e.b] {
                if !node_set.contains(end) {
                    report.push(violation(
                        InstanceViolationCode::UnknownEndpoint,
                        subject.clone(),
                        format!("endpoint {end} is not a node"),
                    ));
                }
            }
            if e.a == e.b {
                report.push(violation(
                    InstanceViolationCode::SelfLoopEdge,
                    subject.clone(),
                    format!("edge {} joins {} to itself", e.id, e.a),
                ));
            }
            if !edge_ids.insert(e.id.clone()) {
                report.push(violation(
                    InstanceViolationCode::DuplicateEdgeId,
                    subject.clone(),
                    format!("edge id {} appears twice", e.id),
                ));
            }
            let pair = if e.a <= e.b {
                (e.a.clone(), e.b.clone())
            } else {
                (e.b.clone(), e.a.clone())
            };
            if !edge_pairs.insert(pair) {
                report.push(violation(
                    InstanceViolationCode::ParallelEdge,
                    subject,
                    format!("second edge between {} and {}", e.a, e.b),
                ));
            }
        }

        for (i, d) in self.demands.iter().enumerate() {
            let subject = format!("demands[{i}]");
            for end in [&d.src, &d.dst] {
                if !node_set.contains(end) {
                    report.push(violation(
                        InstanceViolationCode::UnknownEndpoint,
                        subject.clone(),
                        format!("endpoint {end} is not a node"),
                    ));
                }
            }
            if d.src == d.dst {
                report.push(violation(
                    InstanceViolationCode::SelfDemand,
                    subject.clone(),
                    format!("demand from {} to itself", d.src),
                ));
            }
            if d.rate == 0 {
                report.push(violation(
                    InstanceViolationCode::ZeroRate,
                    subject,
                    "demand rate is zero",
                ));
            }
        }

        if self.cost.channel_capacity == 0 {
            report.push(violation(
                InstanceViolationCode::ZeroCapacity,
                "cost.channel_capacity",
                "channel capacity is zero",
            ));
        }
        for n in &node_set {
            if !self.cost.lsr_cost.contains_key(n) {
                report.push(violation(
                    InstanceViolationCode::MissingCost,
                    "cost.lsr_cost",
                    format!("no LSR cost for node {n}"),
                ));
            }
        }
        for n in self.cost.lsr_cost.keys() {
            if !node_set.contains(n) {
                report.push(violation(
                    InstanceViolationCode::UnknownCostKey,
                    "cost.lsr_cost",
                    format!("cost entry for unknown node {n}"),
                ));
            }
        }
        for id in &edge_ids {
            if !self.cost.channel_cost.contains_key(id) {
                report.push(violation(
                    InstanceViolationCode::MissingCost,
                    "cost.channel_cost",
                    format!("no channel cost for edge {id}"),
                ));
            }
        }
        for id in self.cost.channel_cost.keys() {
            if !edge_ids.contains(id) {
                report.push(violation(
                    InstanceViolationCode::UnknownCostKey,
                    "cost.channel_cost",
                    format!("cost entry for unknown edge {id}"),
                ));
            }
        }

        // Connectivity check last, and only when the graph is otherwise
        // sound enough to index.
        if report.is_empty() && !self.nodes.is_empty() {
            let index: BTreeMap<&NodeId, u32> = self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n, i as u32))
                .collect();
            let mut graph = CompactGraph::new(self.nodes.len());
            for e in &self.transport_edges {
                graph.add_edge(index[&e.a], index[&e.b]);
            }
            if !graph.is_connected() {
                report.push(violation(
                    InstanceViolationCode::Disconnected,
                    "transport_edges",
                    "transport graph is not connected",
                ));
            }
        }

        report
    }

    /// Serializes to the canonical JSON form: object keys sorted, arrays in
    /// input order, integer numbers. Byte-stable for equal instances.
    pub fn to_canonical_json(&self) -> String {
        // serde_json's default object representation is key-sorted, so a
        // round-trip through Value yields sorted keys regardless of struct
        // field order.
        let value = serde_json::to_value(self).expect("instance serialization cannot fail");
        let mut out = serde_json::to_string_pretty(&value).expect("value printing cannot fail");
        out.push('\n');
        out
    }
}

/// Reads and validates an instance file.
pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    let instance: Instance = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let report = instance.validate();
    if !report.is_empty() {
        return Err(Error::Validation(report));
    }
    Ok(instance)
}

/// Validates and writes an instance in canonical JSON form.
pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let report = instance.validate();
    if !report.is_empty() {
        return Err(Error::Validation(report));
    }
    fs::write(path, instance.to_canonical_json())?;
    Ok(())
}

/// Knobs controlling one generated data-set variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantParams {
    pub tag: String,
    /// Fraction of all node pairs joined by a transport edge, in (0, 1].
    pub edge_density: f64,
    pub demand_count: usize,
    /// Inclusive demand-rate bounds in bandwidth units.
    pub rate_range: (u64, u64),
    /// Inclusive per-node LSR cost bounds.
    pub lsr_cost_range: (u64, u64),
    /// Inclusive per-edge channel cost bounds.
    pub channel_cost_range: (u64, u64),
    pub channel_capacity: u64,
}

/// The eight shipped variants, ordered. Tags name the three axes they span:
/// transport density (sparse/dense), LSR price (cheap/costly), and demand
/// rate relative to channel capacity (thin/thick).
pub const SUITE_VARIANTS: [&str; 8] = [
    "sparse-cheap-thin",
    "sparse-cheap-thick",
    "sparse-costly-thin",
    "sparse-costly-thick",
    "dense-cheap-thin",
    "dense-cheap-thick",
    "dense-costly-thin",
    "dense-costly-thick",
];

impl VariantParams {
    /// Materializes a named preset for a given node count. Accepts a tag
    /// from [`SUITE_VARIANTS`], a 1-based index into it, or `triangle`.
    pub fn preset(tag: &str, node_count: usize) -> Result<VariantParams> {
        if let Ok(i) = tag.parse::<usize>() {
            if (1..=SUITE_VARIANTS.len()).contains(&i) {
                return Self::preset(SUITE_VARIANTS[i - 1], node_count);
            }
            return Err(Error::ParamsInfeasible(format!(
                "variant index {i} out of range 1..={}",
                SUITE_VARIANTS.len()
            )));
        }

        if tag == "triangle" {
            return Ok(VariantParams {
                tag: tag.to_string(),
                edge_density: 1.0,
                demand_count: 1,
                rate_range: (4, 4),
                lsr_cost_range: (5, 5),
                channel_cost_range: (10, 10),
                channel_capacity: 10,
            });
        }

        let mut parts = tag.split('-');
        let (density_axis, price_axis, rate_axis) =
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(d), Some(p), Some(r), None) => (d, p, r),
                _ => {
                    return Err(Error::ParamsInfeasible(format!(
                        "unknown variant tag `{tag}`"
                    )))
                }
            };
        // Presets aim at an average transport degree rather than a fixed
        // density, so the same tag stays realistic (and above the
        // spanning-tree threshold) across the whole node-count grid.
        let target_degree = match density_axis {
            "sparse" => 3.0,
            "dense" => 6.0,
            _ => {
                return Err(Error::ParamsInfeasible(format!(
                    "unknown variant tag `{tag}`"
                )))
            }
        };
        let edge_density = (target_degree / (node_count.max(2) - 1) as f64).min(1.0);
        let lsr_cost_range = match price_axis {
            "cheap" => (40, 70),
            "costly" => (110, 165),
            _ => {
                return Err(Error::ParamsInfeasible(format!(
                    "unknown variant tag `{tag}`"
                )))
            }
        };
        let (rate_range, demand_factor) = match rate_axis {
            "thin" => ((8, 30), 1.05),
            "thick" => ((55, 95), 0.9),
            _ => {
                return Err(Error::ParamsInfeasible(format!(
                    "unknown variant tag `{tag}`"
                )))
            }
        };
        Ok(VariantParams {
            tag: tag.to_string(),
            edge_density,
            demand_count: ((node_count as f64) * demand_factor).round().max(1.0) as usize,
            rate_range,
            lsr_cost_range,
            channel_cost_range: (24, 40),
            channel_capacity: 100,
        })
    }
}

/// The first `count` shipped variant tags.
pub fn suite_variants(count: usize) -> Result<Vec<&'static str>> {
    if count == 0 || count > SUITE_VARIANTS.len() {
        return Err(Error::ParamsInfeasible(format!(
            "variant count {count} out of range 1..={}",
            SUITE_VARIANTS.len()
        )));
    }
    Ok(SUITE_VARIANTS[..count].to_vec())
}

/// FNV-1a over the generation arguments; gives each (node_count, variant,
/// seed) combination an independent RNG stream.
fn derive_rng_seed(node_count: usize, tag: &str, seed: u64) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    let mut eat = |byte: u8| {
        h ^= u64::from(byte);
        h = h.wrapping_mul(PRIME);
    };
    for b in (node_count as u64).to_le_bytes() {
        eat(b);
    }
    eat(0x1f);
    for b in tag.as_bytes() {
        eat(*b);
    }
    eat(0x1f);
    for b in seed.to_le_bytes() {
        eat(b);
    }
    h
}

fn id_width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len()
}

/// Decodes a Prüfer sequence into the edge list of a labeled tree on
/// `n = seq.len() + 2` nodes. Every labeled tree corresponds to exactly one
/// sequence, so a uniform sequence gives a uniform random spanning tree.
fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1u32; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n)
            .find(|&j| degree[j] == 1)
            .expect("a tree always has a leaf");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&j| degree[j] == 1);
    let (u, v) = (
        last.next().expect("two leaves remain"),
        last.next().expect("two leaves remain"),
    );
    edges.push((u.min(v), u.max(v)));
    edges
}

/// Generates a connected random instance as a deterministic function of
/// `(node_count, variant, seed)`.
pub fn generate_instance(
    node_count: usize,
    variant: &VariantParams,
    seed: u64,
) -> Result<Instance> {
    if node_count < 3 {
        return Err(Error::ParamsInfeasible(format!(
            "node_count {node_count} below minimum 3"
        )));
    }
    if !(variant.edge_density > 0.0 && variant.edge_density <= 1.0) {
        return Err(Error::ParamsInfeasible(format!(
            "edge_density {} outside (0, 1]",
            variant.edge_density
        )));
    }
    if variant.channel_capacity == 0 {
        return Err(Error::ParamsInfeasible("channel_capacity is zero".into()));
    }
    for (name, (lo, hi)) in [
        ("rate_range", variant.rate_range),
        ("lsr_cost_range", variant.lsr_cost_range),
        ("channel_cost_range", variant.channel_cost_range),
    ] {
        if lo > hi {
            return Err(Error::ParamsInfeasible(format!(
                "{name} ({lo}, {hi}) is empty"
            )));
        }
    }
    if variant.rate_range.0 == 0 {
        return Err(Error::ParamsInfeasible("demand rates must be positive".into()));
    }

    let pair_count = node_count * (node_count - 1) / 2;
    let target_edges = (variant.edge_density * pair_count as f64).round() as usize;
    if target_edges < node_count - 1 {
        return Err(Error::ParamsInfeasible(format!(
            "edge_density {} yields {} edges, below the {} needed for a spanning tree",
            variant.edge_density,
            target_edges,
            node_count - 1
        )));
    }
    let ordered_pairs = node_count * (node_count - 1);
    if variant.demand_count > ordered_pairs {
        return Err(Error::ParamsInfeasible(format!(
            "demand_count {} exceeds the {} distinct ordered node pairs",
            variant.demand_count, ordered_pairs
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_rng_seed(node_count, &variant.tag, seed));

    let node_width = id_width(node_count);
    let nodes: Vec<NodeId> = (0..node_count)
        .map(|i| NodeId::new(format!("n{i:0node_width$}")))
        .collect();

    // Spanning tree via a uniform Prüfer sequence, then extra edges drawn
    // without replacement from the sorted list of unused pairs.
    let seq: Vec<usize> = (0..node_count - 2)
        .map(|_| rng.random_range(0..node_count))
        .collect();
    let mut edge_pairs: BTreeSet<(usize, usize)> = prufer_decode(&seq, node_count).into_iter().collect();
    let mut spare: Vec<(usize, usize)> = (0..node_count)
        .flat_map(|i| ((i + 1)..node_count).map(move |j| (i, j)))
        .filter(|p| !edge_pairs.contains(p))
        .collect();
    let extra = target_edges - edge_pairs.len();
    for i in 0..extra {
        let j = rng.random_range(i..spare.len());
        spare.swap(i, j);
        edge_pairs.insert(spare[i]);
    }

    let edge_width = id_width(edge_pairs.len());
    let transport_edges: Vec<TransportEdge> = edge_pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| TransportEdge {
            id: EdgeId::new(format!("e{i:0edge_width$}")),
            a: nodes[a].clone(),
            b: nodes[b].clone(),
        })
        .collect();

    let channel_cost: BTreeMap<EdgeId, u64> = transport_edges
        .iter()
        .map(|e| {
            let (lo, hi) = variant.channel_cost_range;
            (e.id.clone(), rng.random_range(lo..=hi))
        })
        .collect();
    let lsr_cost: BTreeMap<NodeId, u64> = nodes
        .iter()
        .map(|n| {
            let (lo, hi) = variant.lsr_cost_range;
            (n.clone(), rng.random_range(lo..=hi))
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = (0..node_count)
        .flat_map(|i| (0..node_count).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    let demands: Vec<Demand> = (0..variant.demand_count)
        .map(|i| {
            let j = rng.random_range(i..pairs.len());
            pairs.swap(i, j);
            let (s, d) = pairs[i];
            let (lo, hi) = variant.rate_range;
            Demand {
                src: nodes[s].clone(),
                dst: nodes[d].clone(),
                rate: rng.random_range(lo..=hi),
            }
        })
        .collect();

    let instance = Instance {
        nodes,
        transport_edges,
        demands,
        cost: CostModel {
            lsr_cost,
            channel_cost,
            channel_capacity: variant.channel_capacity,
        },
        meta: Meta {
            node_count,
            variant: variant.tag.clone(),
            seed,
        },
    };
    debug_assert!(instance.validate().is_empty());
    Ok(instance)
}
