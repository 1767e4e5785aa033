//! The multilayer graph model: a transport layer, an MPLS layer, and one
//! flow layer per demand, joined by inter-layer edges that encode which
//! lower-layer element realizes or carries an upper-layer one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ids::{EdgeId, LinkId, NodeId};
use crate::optimizer::Solution;

/// Layer identity. The derived ordering (`Transport < Mpls < Flow(0) <
/// Flow(1) < ...`) is the required bottom-to-top layer order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayerId {
    Transport,
    Mpls,
    /// One layer per demand, indexed by demand ordinal.
    Flow(usize),
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerId::Transport => write!(f, "transport"),
            LayerId::Mpls => write!(f, "mpls"),
            LayerId::Flow(i) => write!(f, "flow[{i}]"),
        }
    }
}

/// A vertex of the multilayer graph: a transport node mirrored into one
/// layer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LayeredVertex {
    pub layer: LayerId,
    pub node: NodeId,
}

impl LayeredVertex {
    pub fn new(layer: LayerId, node: impl Into<NodeId>) -> Self {
        LayeredVertex {
            layer,
            node: node.into(),
        }
    }
}

impl fmt::Display for LayeredVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.node, self.layer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    IntraLayer,
    InterLayer,
}

/// Edge capacity in bandwidth units. Inter-layer edges and transport edges
/// are unbounded (channels are counted, not pre-provisioned); logical links
/// carry the per-channel module size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Unbounded,
    Finite(u64),
}

#[derive(Debug, Clone)]
pub struct MlgEdge {
    pub id: String,
    pub endpoints: (LayeredVertex, LayeredVertex),
    pub kind: EdgeKind,
    pub weight: u64,
    pub capacity: Capacity,
    /// For MPLS-layer intra-layer edges only: the ordered transport path
    /// that realizes the logical link.
    pub realization: Option<Vec<EdgeId>>,
}

/// The multilayer graph. Immutable after construction; build through
/// `builder::build_redundant_mlg` or assemble fields directly in tests.
#[derive(Debug, Clone, Default)]
pub struct MultilayerGraph {
    pub layers: Vec<LayerId>,
    pub vertices: BTreeSet<LayeredVertex>,
    pub edges: Vec<MlgEdge>,
    /// LSR installation cost on MPLS-layer vertices; absent means zero.
    pub vertex_weights: BTreeMap<LayeredVertex, u64>,
}

impl MultilayerGraph {
    pub fn vertex_weight(&self, v: &LayeredVertex) -> u64 {
        self.vertex_weights.get(v).copied().unwrap_or(0)
    }

    /// The MPLS-layer intra-layer edge carrying this logical link id.
    pub fn logical_edge(&self, id: &LinkId) -> Option<&MlgEdge> {
        self.edges.iter().find(|e| {
            e.kind == EdgeKind::IntraLayer
                && e.endpoints.0.layer == LayerId::Mpls
                && e.id == id.as_str()
        })
    }

    /// Id-indexed view of one layer's intra-layer edges; build once before
    /// repeated lookups.
    fn intra_edges_by_id(&self, layer: LayerId) -> BTreeMap<&str, &MlgEdge> {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::IntraLayer && e.endpoints.0.layer == layer)
            .map(|e| (e.id.as_str(), e))
            .collect()
    }
}

/// One structural invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Vertex or edge id the violation is anchored to.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    MissingLayer,
    DuplicateLayer,
    DuplicateFlowIndex,
    LayerOrder,
    UnmirroredVertex,
    DanglingEndpoint,
    CrossLayerIntra,
    NonAdjacentInter,
    MirrorMismatch,
    SelfLoop,
    ParallelEdge,
    DuplicateEdgeId,
    EmptyRealization,
    BrokenRealization,
    UnexpectedRealization,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = match self {
            ViolationCode::MissingLayer => "MISSING_LAYER",
            ViolationCode::DuplicateLayer => "DUPLICATE_LAYER",
            ViolationCode::DuplicateFlowIndex => "DUPLICATE_FLOW_INDEX",
            ViolationCode::LayerOrder => "LAYER_ORDER",
            ViolationCode::UnmirroredVertex => "UNMIRRORED_VERTEX",
            ViolationCode::DanglingEndpoint => "DANGLING_ENDPOINT",
            ViolationCode::CrossLayerIntra => "CROSS_LAYER_INTRA",
            ViolationCode::NonAdjacentInter => "NON_ADJACENT_INTER",
            ViolationCode::MirrorMismatch => "MIRROR_MISMATCH",
            ViolationCode::SelfLoop => "SELF_LOOP",
            ViolationCode::ParallelEdge => "PARALLEL_EDGE",
            ViolationCode::DuplicateEdgeId => "DUPLICATE_EDGE_ID",
            ViolationCode::EmptyRealization => "EMPTY_REALIZATION",
            ViolationCode::BrokenRealization => "BROKEN_REALIZATION",
            ViolationCode::UnexpectedRealization => "UNEXPECTED_REALIZATION",
        };
        f.write_str(code)
    }
}

/// Violations are data, not errors: an empty report means the graph is valid.
pub type ValidationReport = Vec<Violation>;

fn violation(code: ViolationCode, subject: impl fmt::Display, detail: impl Into<String>) -> Violation {
    Violation {
        code,
        subject: subject.to_string(),
        detail: detail.into(),
    }
}

/// Checks every structural invariant of the multilayer graph and returns
/// one entry per violation found.
pub fn validate(mlg: &MultilayerGraph) -> ValidationReport {
    let mut report = Vec::new();

    // Layer list: exactly one transport and one MPLS layer, distinct flow
    // indices, bottom-to-top order.
    let transport_count = mlg
        .layers
        .iter()
        .filter(|l| **l == LayerId::Transport)
        .count();
    let mpls_count = mlg.layers.iter().filter(|l| **l == LayerId::Mpls).count();
    if transport_count == 0 {
        report.push(violation(ViolationCode::MissingLayer, "transport", "no transport layer"));
    }
    if mpls_count == 0 {
        report.push(violation(ViolationCode::MissingLayer, "mpls", "no mpls layer"));
    }
    if transport_count > 1 {
        report.push(violation(ViolationCode::DuplicateLayer, "transport", "multiple transport layers"));
    }
    if mpls_count > 1 {
        report.push(violation(ViolationCode::DuplicateLayer, "mpls", "multiple mpls layers"));
    }
    let mut flow_indices = BTreeSet::new();
    for layer in &mlg.layers {
        if let LayerId::Flow(i) = layer {
            if !flow_indices.insert(*i) {
                report.push(violation(
                    ViolationCode::DuplicateFlowIndex,
                    layer,
                    "flow index appears twice",
                ));
            }
        }
    }
    if mlg.layers.windows(2).any(|w| w[0] >= w[1]) {
        report.push(violation(
            ViolationCode::LayerOrder,
            "layers",
            "layer list is not ordered transport < mpls < flows",
        ));
    }

    // Vertex mirroring: each MPLS vertex over a transport vertex, each flow
    // vertex over an MPLS vertex.
    for v in &mlg.vertices {
        let mirrors = match v.layer {
            LayerId::Transport => None,
            LayerId::Mpls => Some(LayerId::Transport),
            LayerId::Flow(_) => Some(LayerId::Mpls),
        };
        if let Some(lower) = mirrors {
            let mirror = LayeredVertex::new(lower, v.node.clone());
            if !mlg.vertices.contains(&mirror) {
                report.push(violation(
                    ViolationCode::UnmirroredVertex,
                    v,
                    format!("no {lower} vertex for node {}", v.node),
                ));
            }
        }
    }

    // Edge checks.
    let transport_by_id = mlg.intra_edges_by_id(LayerId::Transport);
    let mut seen_ids = BTreeSet::new();
    let mut intra_pairs: BTreeMap<(LayeredVertex, LayeredVertex), Vec<&MlgEdge>> = BTreeMap::new();
    for edge in &mlg.edges {
        if !seen_ids.insert(edge.id.clone()) {
            report.push(violation(ViolationCode::DuplicateEdgeId, &edge.id, "edge id appears twice"));
        }
        let (a, b) = (&edge.endpoints.0, &edge.endpoints.1);
        for end in [a, b] {
            if !mlg.vertices.contains(end) {
                report.push(violation(
                    ViolationCode::DanglingEndpoint,
                    &edge.id,
                    format!("endpoint {end} is not a vertex"),
                ));
            }
        }
        match edge.kind {
            EdgeKind::IntraLayer => {
                if a.layer != b.layer {
                    report.push(violation(
                        ViolationCode::CrossLayerIntra,
                        &edge.id,
                        format!("intra-layer edge joins {} and {}", a.layer, b.layer),
                    ));
                    continue;
                }
                if a.node == b.node {
                    report.push(violation(ViolationCode::SelfLoop, &edge.id, "self loop"));
                }
                let key = if a <= b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                };
                intra_pairs.entry(key).or_default().push(edge);
                check_realization(&transport_by_id, edge, &mut report);
            }
            EdgeKind::InterLayer => {
                let adjacent = matches!(
                    (a.layer.min(b.layer), a.layer.max(b.layer)),
                    (LayerId::Transport, LayerId::Mpls) | (LayerId::Mpls, LayerId::Flow(_))
                );
                if !adjacent {
                    report.push(violation(
                        ViolationCode::NonAdjacentInter,
                        &edge.id,
                        format!("inter-layer edge joins {} and {}", a.layer, b.layer),
                    ));
                }
                if a.node != b.node {
                    report.push(violation(
                        ViolationCode::MirrorMismatch,
                        &edge.id,
                        format!("joins different nodes {} and {}", a.node, b.node),
                    ));
                }
                if edge.realization.is_some() {
                    report.push(violation(
                        ViolationCode::UnexpectedRealization,
                        &edge.id,
                        "inter-layer edges carry no realization",
                    ));
                }
            }
        }
    }

    // Parallel intra-layer edges are allowed only for logical links with
    // distinct realizations.
    for (pair, edges) in &intra_pairs {
        if edges.len() < 2 {
            continue;
        }
        let layer = pair.0.layer;
        if layer == LayerId::Transport {
            for e in &edges[1..] {
                report.push(violation(
                    ViolationCode::ParallelEdge,
                    &e.id,
                    "parallel transport edges between one node pair",
                ));
            }
            continue;
        }
        let mut realizations = BTreeSet::new();
        for e in edges {
            if let Some(r) = &e.realization {
                if !realizations.insert(r.clone()) {
                    report.push(violation(
                        ViolationCode::ParallelEdge,
                        &e.id,
                        "parallel logical links share one realization",
                    ));
                }
            }
        }
    }

    report
}

fn check_realization(
    transport_by_id: &BTreeMap<&str, &MlgEdge>,
    edge: &MlgEdge,
    report: &mut Vec<Violation>,
) {
    let layer = edge.endpoints.0.layer;
    match (&edge.realization, layer) {
        (None, LayerId::Mpls) => {
            report.push(violation(
                ViolationCode::EmptyRealization,
                &edge.id,
                "logical link has no realization path",
            ));
        }
        (Some(path), LayerId::Mpls) => {
            if path.is_empty() {
                report.push(violation(
                    ViolationCode::EmptyRealization,
                    &edge.id,
                    "realization list is empty",
                ));
                return;
            }
            // Walk the transport path from one mirrored endpoint to the
            // other; each hop must extend a simple connected path.
            let mut current = edge.endpoints.0.node.clone();
            let goal = edge.endpoints.1.node.clone();
            let mut visited = BTreeSet::new();
            visited.insert(current.clone());
            for eid in path {
                let Some(te) = transport_by_id.get(eid.as_str()) else {
                    report.push(violation(
                        ViolationCode::BrokenRealization,
                        &edge.id,
                        format!("unknown transport edge {eid}"),
                    ));
                    return;
                };
                let (ta, tb) = (&te.endpoints.0.node, &te.endpoints.1.node);
                let next = if *ta == current {
                    tb.clone()
                } else if *tb == current {
                    ta.clone()
                } else {
                    report.push(violation(
                        ViolationCode::BrokenRealization,
                        &edge.id,
                        format!("transport edge {eid} does not extend the path at {current}"),
                    ));
                    return;
                };
                if !visited.insert(next.clone()) {
                    report.push(violation(
                        ViolationCode::BrokenRealization,
                        &edge.id,
                        format!("realization revisits node {next}"),
                    ));
                    return;
                }
                current = next;
            }
            if current != goal {
                report.push(violation(
                    ViolationCode::BrokenRealization,
                    &edge.id,
                    format!("realization ends at {current}, expected {goal}"),
                ));
            }
        }
        (Some(_), _) => {
            report.push(violation(
                ViolationCode::UnexpectedRealization,
                &edge.id,
                "realization on a non-logical edge",
            ));
        }
        (None, _) => {}
    }
}

/// Projection of one layer: its vertices and intra-layer edges, weights and
/// capacities preserved.
#[derive(Debug, Clone)]
pub struct LayerSubgraph<'a> {
    pub layer: LayerId,
    pub vertices: Vec<&'a LayeredVertex>,
    pub edges: Vec<&'a MlgEdge>,
}

/// Restricts the graph to a single layer.
pub fn layer_subgraph(mlg: &MultilayerGraph, layer: LayerId) -> Result<LayerSubgraph<'_>> {
    if !mlg.layers.contains(&layer) {
        return Err(Error::LayerNotFound(layer.to_string()));
    }
    Ok(LayerSubgraph {
        layer,
        vertices: mlg.vertices.iter().filter(|v| v.layer == layer).collect(),
        edges: mlg
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::IntraLayer && e.endpoints.0.layer == layer)
            .collect(),
    })
}

/// Bandwidth occupied on every transport edge by a solution's logical
/// links: each link loads each edge of its realization with
/// `channel_count * channel_capacity`. Every transport edge appears in the
/// result, unused ones with zero load.
pub fn physical_load(mlg: &MultilayerGraph, sol: &Solution) -> Result<BTreeMap<EdgeId, u64>> {
    let mut load: BTreeMap<EdgeId, u64> = mlg
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::IntraLayer && e.endpoints.0.layer == LayerId::Transport)
        .map(|e| (EdgeId::new(e.id.clone()), 0))
        .collect();

    let logical_by_id = mlg.intra_edges_by_id(LayerId::Mpls);
    for link in &sol.logical_links {
        let edge = logical_by_id
            .get(link.id.as_str())
            .ok_or_else(|| Error::UnknownLogicalLink(link.id.to_string()))?;
        let per_channel = match edge.capacity {
            Capacity::Finite(c) => c,
            Capacity::Unbounded => {
                debug_assert!(false, "logical links carry finite per-channel capacity");
                0
            }
        };
        let realization = edge.realization.as_deref().unwrap_or(&[]);
        for eid in realization {
            if let Some(entry) = load.get_mut(eid) {
                *entry += link.channels * per_channel;
            }
        }
    }
    Ok(load)
}
