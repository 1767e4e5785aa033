//! Demand routing over a selected overlay, traffic aggregation on shared
//! logical links, and conversion of aggregate loads into integer channel
//! counts.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ids::{LinkId, NodeId};
use crate::instance::Demand;
use crate::mlg::{EdgeKind, LayerId, MultilayerGraph};
use crate::paths::CompactGraph;

/// The overlay the router operates on: which nodes host an LSR and which
/// logical links exist between them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub lsr_nodes: std::collections::BTreeSet<NodeId>,
    pub logical_links: std::collections::BTreeSet<LinkId>,
}

/// Where every demand flows, and how much load each logical link carries
/// as a result. Single-path routing: each demand follows exactly one route.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlowAssignment {
    /// Demand ordinal → ordered logical links from src to dst.
    pub routes: BTreeMap<usize, Vec<LinkId>>,
    /// Summed rates of the demands routed over each used link.
    pub link_load: BTreeMap<LinkId, u64>,
}

/// Channels to buy per logical link: `ceil(load / channel_capacity)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CapacityPlan {
    pub channels: BTreeMap<LinkId, u64>,
}

/// Routes every demand on its shortest path in the selected MPLS overlay,
/// where a logical link's length is its realization hop count. Demands are
/// processed in descending rate order, ties by ordinal.
pub fn route_flows(
    mlg: &MultilayerGraph,
    demands: &[Demand],
    selection: &Selection,
) -> Result<FlowAssignment> {
    let logical_by_id: BTreeMap<&str, &crate::mlg::MlgEdge> = mlg
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::IntraLayer && e.endpoints.0.layer == LayerId::Mpls)
        .map(|e| (e.id.as_str(), e))
        .collect();

    let lsr_list: Vec<&NodeId> = selection.lsr_nodes.iter().collect();
    let pos: BTreeMap<&NodeId, u32> = lsr_list
        .iter()
        .enumerate()
        .map(|(i, n)| (*n, i as u32))
        .collect();

    // The set iterates in id order, so overlay edge indices — and with them
    // shortest-path tie-breaks between parallel links — are deterministic.
    let mut graph = CompactGraph::new(lsr_list.len());
    let mut link_ids: Vec<&LinkId> = Vec::new();
    let mut hops: Vec<u64> = Vec::new();
    for id in &selection.logical_links {
        let edge = logical_by_id
            .get(id.as_str())
            .ok_or_else(|| Error::UnknownLogicalLink(id.to_string()))?;
        let a = pos.get(&edge.endpoints.0.node);
        let b = pos.get(&edge.endpoints.1.node);
        let (Some(&a), Some(&b)) = (a, b) else {
            // A link outside the selected LSR set can never carry traffic;
            // the caller broke the selection precondition.
            debug_assert!(false, "logical link {id} leaves the selected LSR set");
            continue;
        };
        graph.add_edge(a, b);
        link_ids.push(id);
        hops.push(edge.realization.as_ref().map_or(1, Vec::len) as u64);
    }

    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by_key(|&i| (Reverse(demands[i].rate), i));

    let mut fa = FlowAssignment::default();
    for i in order {
        let d = &demands[i];
        let (src, dst) = match (pos.get(&d.src), pos.get(&d.dst)) {
            (Some(&s), Some(&t)) => (s, t),
            _ => return Err(Error::Unroutable { demand: i }),
        };
        let (_, path) = graph
            .shortest_path(src, dst, |e| hops[e as usize])
            .ok_or(Error::Unroutable { demand: i })?;
        let route: Vec<LinkId> = path
            .edges
            .iter()
            .map(|&e| link_ids[e as usize].clone())
            .collect();
        for id in &route {
            *fa.link_load.entry(id.clone()).or_insert(0) += d.rate;
        }
        fa.routes.insert(i, route);
    }
    Ok(fa)
}

/// Converts aggregate loads into integer channel counts. Only used links
/// appear in the plan, each with at least one channel.
pub fn assign_capacities(fa: &FlowAssignment, channel_capacity: u64) -> CapacityPlan {
    assert!(channel_capacity > 0, "channel capacity must be positive");
    CapacityPlan {
        channels: fa
            .link_load
            .iter()
            .filter(|(_, &load)| load > 0)
            .map(|(id, &load)| (id.clone(), load.div_ceil(channel_capacity)))
            .collect(),
    }
}
