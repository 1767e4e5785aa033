//! Shared indexed view of an instance's transport graph: node ids mapped to
//! dense indices in sorted-id order, so index-lexicographic path
//! comparisons agree with id-lexicographic ones.

use std::collections::BTreeMap;

use crate::ids::{EdgeId, NodeId};
use crate::instance::Instance;
use crate::paths::CompactGraph;

pub(crate) struct TransportIndex<'a> {
    /// Node ids in sorted order; position = dense index.
    pub nodes: Vec<&'a NodeId>,
    pub node_pos: BTreeMap<&'a NodeId, u32>,
    /// Transport graph over dense indices; edge index order follows sorted
    /// edge ids.
    pub graph: CompactGraph,
    pub edge_ids: Vec<&'a EdgeId>,
    /// Channel price per edge index.
    pub channel_cost: Vec<u64>,
    /// LSR price per node index.
    pub lsr_cost: Vec<u64>,
}

impl<'a> TransportIndex<'a> {
    /// Requires a validated instance (costs present, endpoints known).
    pub fn build(instance: &'a Instance) -> Self {
        let mut nodes: Vec<&NodeId> = instance.nodes.iter().collect();
        nodes.sort();
        let node_pos: BTreeMap<&NodeId, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (*n, i as u32))
            .collect();

        let mut edges: Vec<&crate::instance::TransportEdge> =
            instance.transport_edges.iter().collect();
        edges.sort_by_key(|e| &e.id);

        let mut graph = CompactGraph::new(nodes.len());
        let mut edge_ids = Vec::with_capacity(edges.len());
        let mut channel_cost = Vec::with_capacity(edges.len());
        for e in edges {
            graph.add_edge(node_pos[&e.a], node_pos[&e.b]);
            edge_ids.push(&e.id);
            channel_cost.push(instance.cost.channel_cost[&e.id]);
        }

        let lsr_cost = nodes.iter().map(|n| instance.cost.lsr_cost[*n]).collect();

        TransportIndex {
            nodes,
            node_pos,
            graph,
            edge_ids,
            channel_cost,
            lsr_cost,
        }
    }

    /// Sum of channel prices along a realization given as edge indices.
    pub fn path_channel_cost(&self, edges: &[u32]) -> u64 {
        edges.iter().map(|&e| self.channel_cost[e as usize]).sum()
    }

    pub fn edge_id_path(&self, edges: &[u32]) -> Vec<EdgeId> {
        edges
            .iter()
            .map(|&e| self.edge_ids[e as usize].clone())
            .collect()
    }
}
