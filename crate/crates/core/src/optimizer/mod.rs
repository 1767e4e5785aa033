//! Solvers for the minimum-cost overlay: the full-LSR baseline, a local
//! search over LSR placement / logical topology / routing, and an
//! exhaustive solver for tiny instances.

mod exact;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ids::{EdgeId, LinkId, NodeId};
use crate::instance::Instance;
use crate::mlg::{Capacity, EdgeKind, LayerId, LayeredVertex, MlgEdge, MultilayerGraph};
use crate::routing::{assign_capacities, route_flows, FlowAssignment, Selection};

pub use exact::{solve_exact, ExactLimits};
pub use search::{solve_multilayer, SearchParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CostBreakdown {
    /// Equipment cost of every installed LSR.
    pub lsr_total: u64,
    /// Channel cost over every logical link: channels × per-channel price
    /// of the realization.
    pub channel_total: u64,
    pub grand_total: u64,
}

/// One selected logical link with its bought capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChosenLink {
    pub id: LinkId,
    /// Ordered transport edges realizing the link.
    pub realization: Vec<EdgeId>,
    pub channels: u64,
}

/// A complete design: where LSRs go, which logical links exist with how
/// many channels, and how every demand flows. Only carrying links are
/// listed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub lsr_nodes: BTreeSet<NodeId>,
    pub logical_links: Vec<ChosenLink>,
    pub flow: FlowAssignment,
    pub cost: CostBreakdown,
}

/// Recomputes a solution's cost from first principles, checking every
/// feasibility constraint on the way: endpoints host LSRs, realizations
/// are simple transport paths between link ends, routes are simple
/// src→dst paths over chosen links, recorded loads match routed traffic,
/// and channel counts cover loads exactly.
pub fn evaluate_cost(instance: &Instance, sol: &Solution) -> Result<CostBreakdown> {
    let fail = |msg: String| Err(Error::InfeasibleSolution(msg));

    let node_set: BTreeSet<&NodeId> = instance.nodes.iter().collect();
    for n in &sol.lsr_nodes {
        if !node_set.contains(n) {
            return fail(format!("LSR placed on unknown node {n}"));
        }
    }
    for (i, d) in instance.demands.iter().enumerate() {
        for end in [&d.src, &d.dst] {
            if !sol.lsr_nodes.contains(end) {
                return fail(format!("demand {i} endpoint {end} hosts no LSR"));
            }
        }
    }

    let edge_ends: BTreeMap<&EdgeId, (&NodeId, &NodeId)> = instance
        .transport_edges
        .iter()
        .map(|e| (&e.id, (&e.a, &e.b)))
        .collect();

    let mut link_ends: BTreeMap<LinkId, (NodeId, NodeId)> = BTreeMap::new();
    let mut link_unit: BTreeMap<LinkId, u64> = BTreeMap::new();
    for l in &sol.logical_links {
        if link_ends.contains_key(&l.id) {
            return fail(format!("logical link {} listed twice", l.id));
        }
        let Some((start, end)) = walk_realization(&edge_ends, &l.realization) else {
            return fail(format!(
                "logical link {} has no valid transport realization",
                l.id
            ));
        };
        for n in [&start, &end] {
            if !sol.lsr_nodes.contains(n) {
                return fail(format!("logical link {} ends at non-LSR node {n}", l.id));
            }
        }
        // The walk succeeded, so every realization edge id is known.
        let unit = l
            .realization
            .iter()
            .map(|e| instance.cost.channel_cost[e])
            .sum();
        link_unit.insert(l.id.clone(), unit);
        link_ends.insert(l.id.clone(), (start, end));
    }

    let mut routed_load: BTreeMap<LinkId, u64> = BTreeMap::new();
    for (i, d) in instance.demands.iter().enumerate() {
        let Some(route) = sol.flow.routes.get(&i) else {
            return fail(format!("demand {i} has no route"));
        };
        let mut current = d.src.clone();
        let mut visited: BTreeSet<NodeId> = [current.clone()].into();
        for id in route {
            let Some((u, v)) = link_ends.get(id) else {
                return fail(format!("route of demand {i} uses unselected link {id}"));
            };
            let next = if *u == current {
                v.clone()
            } else if *v == current {
                u.clone()
            } else {
                return fail(format!(
                    "route of demand {i}: link {id} does not extend the path at {current}"
                ));
            };
            if !visited.insert(next.clone()) {
                return fail(format!("route of demand {i} revisits node {next}"));
            }
            *routed_load.entry(id.clone()).or_insert(0) += d.rate;
            current = next;
        }
        if current != d.dst {
            return fail(format!(
                "route of demand {i} ends at {current}, expected {}",
                d.dst
            ));
        }
    }
    for ordinal in sol.flow.routes.keys() {
        if *ordinal >= instance.demands.len() {
            return fail(format!("route recorded for unknown demand {ordinal}"));
        }
    }

    if sol.flow.link_load != routed_load {
        for (id, load) in &sol.flow.link_load {
            let actual = routed_load.get(id).copied().unwrap_or(0);
            if actual != *load {
                return fail(format!(
                    "recorded load {load} on link {id} differs from routed load {actual}"
                ));
            }
        }
        for (id, load) in &routed_load {
            if !sol.flow.link_load.contains_key(id) {
                return fail(format!("routed load {load} on link {id} is not recorded"));
            }
        }
    }

    let mut channel_total = 0u64;
    for l in &sol.logical_links {
        let load = routed_load.get(&l.id).copied().unwrap_or(0);
        let expected = load.div_ceil(instance.cost.channel_capacity);
        if l.channels != expected {
            return fail(format!(
                "link {} carries load {load} but buys {} channels, expected {expected}",
                l.id, l.channels
            ));
        }
        channel_total += l.channels * link_unit[&l.id];
    }

    let lsr_total = sol
        .lsr_nodes
        .iter()
        .map(|n| instance.cost.lsr_cost[n])
        .sum::<u64>();
    Ok(CostBreakdown {
        lsr_total,
        channel_total,
        grand_total: lsr_total + channel_total,
    })
}

/// Walks an edge-id realization, returning (start, end) nodes iff it forms
/// a nonempty simple connected transport path.
fn walk_realization(
    edge_ends: &BTreeMap<&EdgeId, (&NodeId, &NodeId)>,
    realization: &[EdgeId],
) -> Option<(NodeId, NodeId)> {
    let first = edge_ends.get(realization.first()?)?;
    if realization.len() == 1 {
        return Some((first.0.clone(), first.1.clone()));
    }
    // Orient the first edge so the walk continues into the second.
    let second = edge_ends.get(&realization[1])?;
    let start = if first.1 == second.0 || first.1 == second.1 {
        first.0.clone()
    } else if first.0 == second.0 || first.0 == second.1 {
        first.1.clone()
    } else {
        return None;
    };
    let mut current = start.clone();
    let mut visited: BTreeSet<NodeId> = [current.clone()].into();
    for eid in realization {
        let (u, v) = edge_ends.get(eid)?;
        let next = if **u == current {
            (*v).clone()
        } else if **v == current {
            (*u).clone()
        } else {
            return None;
        };
        if !visited.insert(next.clone()) {
            return None;
        }
        current = next;
    }
    Some((start, current))
}

/// The comparison method: an LSR at every node, one logical link per
/// transport edge, shortest-path routing with grooming at every node.
pub fn solve_full_lsr_baseline(instance: &Instance) -> Result<Solution> {
    let (mlg, selection, link_info) = full_lsr_overlay(instance);
    let fa = route_flows(&mlg, &instance.demands, &selection)?;
    let plan = assign_capacities(&fa, instance.cost.channel_capacity);
    let logical_links = plan
        .channels
        .iter()
        .map(|(id, &channels)| ChosenLink {
            id: id.clone(),
            realization: link_info[id].clone(),
            channels,
        })
        .collect();
    let mut sol = Solution {
        lsr_nodes: instance.nodes.iter().cloned().collect(),
        logical_links,
        flow: fa,
        cost: CostBreakdown::default(),
    };
    sol.cost = evaluate_cost(instance, &sol)?;
    Ok(sol)
}

/// Builds the baseline overlay: MPLS mirror of the transport graph with
/// one logical link per transport edge.
fn full_lsr_overlay(
    instance: &Instance,
) -> (MultilayerGraph, Selection, BTreeMap<LinkId, Vec<EdgeId>>) {
    let mut mlg = MultilayerGraph {
        layers: vec![LayerId::Transport, LayerId::Mpls],
        ..Default::default()
    };
    for n in &instance.nodes {
        mlg.vertices
            .insert(LayeredVertex::new(LayerId::Transport, n.clone()));
        let v = LayeredVertex::new(LayerId::Mpls, n.clone());
        mlg.vertex_weights.insert(v.clone(), instance.cost.lsr_cost[n]);
        mlg.vertices.insert(v);
        mlg.edges.push(MlgEdge {
            id: format!("x:{n}"),
            endpoints: (
                LayeredVertex::new(LayerId::Transport, n.clone()),
                LayeredVertex::new(LayerId::Mpls, n.clone()),
            ),
            kind: EdgeKind::InterLayer,
            weight: 0,
            capacity: Capacity::Unbounded,
            realization: None,
        });
    }

    let mut selection = Selection {
        lsr_nodes: instance.nodes.iter().cloned().collect(),
        logical_links: BTreeSet::new(),
    };
    let mut link_info = BTreeMap::new();
    for e in &instance.transport_edges {
        mlg.edges.push(MlgEdge {
            id: e.id.to_string(),
            endpoints: (
                LayeredVertex::new(LayerId::Transport, e.a.clone()),
                LayeredVertex::new(LayerId::Transport, e.b.clone()),
            ),
            kind: EdgeKind::IntraLayer,
            weight: instance.cost.channel_cost[&e.id],
            capacity: Capacity::Unbounded,
            realization: None,
        });
        let (a, b) = if e.a <= e.b { (&e.a, &e.b) } else { (&e.b, &e.a) };
        let id = crate::builder::link_id(a, b, 0);
        mlg.edges.push(MlgEdge {
            id: id.to_string(),
            endpoints: (
                LayeredVertex::new(LayerId::Mpls, a.clone()),
                LayeredVertex::new(LayerId::Mpls, b.clone()),
            ),
            kind: EdgeKind::IntraLayer,
            weight: instance.cost.channel_cost[&e.id],
            capacity: Capacity::Finite(instance.cost.channel_capacity),
            realization: Some(vec![e.id.clone()]),
        });
        selection.logical_links.insert(id.clone());
        link_info.insert(id, vec![e.id.clone()]);
    }
    (mlg, selection, link_info)
}
