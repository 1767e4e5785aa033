//! Synthesis of the initial redundant multilayer graph: every candidate
//! LSR, every candidate logical link with its transport realization, and
//! one flow layer per demand. The optimizer later selects a subgraph; the
//! builder's job is to make sure everything worth selecting is present.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ids::{EdgeId, LinkId, NodeId};
use crate::index::TransportIndex;
use crate::instance::Instance;
use crate::mlg::{
    Capacity, EdgeKind, LayerId, LayeredVertex, MlgEdge, MultilayerGraph,
};

/// Which nodes may host an LSR. Demand endpoints are always included — a
/// demand must enter and leave the MPLS layer at its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateLsrSet {
    AllNodes,
    EndpointsPlus(BTreeSet<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuilderParams {
    /// Candidate transport realizations kept per LSR pair; ≥ 1.
    pub k_paths: usize,
    /// Optional cap on candidate logical links per node. The shortest
    /// candidate of each pair is always kept so the candidate overlay stays
    /// complete; the cap trims alternates only.
    pub max_logical_degree: Option<usize>,
    pub candidate_lsr_set: CandidateLsrSet,
}

impl Default for BuilderParams {
    fn default() -> Self {
        BuilderParams {
            k_paths: 2,
            max_logical_degree: None,
            candidate_lsr_set: CandidateLsrSet::AllNodes,
        }
    }
}

/// One candidate logical link: an LSR pair plus one concrete transport
/// realization. Pairs can appear with several ranks (alternative paths).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLink {
    pub a: NodeId,
    pub b: NodeId,
    /// Position of this realization in the pair's shortest-path list.
    pub rank: usize,
    pub id: LinkId,
    /// Ordered transport edges from `a` to `b`.
    pub realization: Vec<EdgeId>,
    pub hops: usize,
    /// Price of one channel across the whole realization.
    pub unit_cost: u64,
    /// Bandwidth units per channel, from the instance cost model.
    pub capacity: u64,
}

pub fn link_id(a: &NodeId, b: &NodeId, rank: usize) -> LinkId {
    LinkId::new(format!("{a}--{b}~{rank}"))
}

pub(crate) fn candidate_nodes(
    instance: &Instance,
    params: &BuilderParams,
) -> Result<BTreeSet<NodeId>> {
    let all: BTreeSet<NodeId> = instance.nodes.iter().cloned().collect();
    match &params.candidate_lsr_set {
        CandidateLsrSet::AllNodes => Ok(all),
        CandidateLsrSet::EndpointsPlus(extra) => {
            for n in extra {
                if !all.contains(n) {
                    return Err(Error::ParamsInfeasible(format!(
                        "candidate LSR {n} is not an instance node"
                    )));
                }
            }
            let mut set = extra.clone();
            for d in &instance.demands {
                set.insert(d.src.clone());
                set.insert(d.dst.clone());
            }
            Ok(set)
        }
    }
}

/// Enumerates candidate logical links: for every unordered pair of
/// candidate LSR nodes, the `k_paths` shortest transport realizations by
/// hop count, ties broken by lexicographic node-id sequence. Sorted by
/// (a, b, rank).
pub fn candidate_logical_links(
    instance: &Instance,
    params: &BuilderParams,
) -> Result<Vec<CandidateLink>> {
    if params.k_paths == 0 {
        return Err(Error::ParamsInfeasible("k_paths must be at least 1".into()));
    }
    let idx = TransportIndex::build(instance);
    let lsrs = candidate_nodes(instance, params)?;
    let lsr_list: Vec<&NodeId> = lsrs.iter().collect();

    let mut links = Vec::new();
    for (i, a) in lsr_list.iter().enumerate() {
        for b in &lsr_list[i + 1..] {
            let (ia, ib) = (idx.node_pos[*a], idx.node_pos[*b]);
            let paths = idx.graph.k_shortest_paths(ia, ib, params.k_paths, |_| 1);
            for (rank, p) in paths.iter().enumerate() {
                links.push(CandidateLink {
                    a: (*a).clone(),
                    b: (*b).clone(),
                    rank,
                    id: link_id(a, b, rank),
                    realization: idx.edge_id_path(&p.edges),
                    hops: p.edges.len(),
                    unit_cost: idx.path_channel_cost(&p.edges),
                    capacity: instance.cost.channel_capacity,
                });
            }
        }
    }

    if let Some(cap) = params.max_logical_degree {
        links = apply_degree_cap(links, cap);
    }
    // Pair enumeration already yields (a, b, rank) order; capping preserves
    // relative order.
    debug_assert!(links.windows(2).all(|w| {
        (&w[0].a, &w[0].b, w[0].rank) < (&w[1].a, &w[1].b, w[1].rank)
    }));
    Ok(links)
}

/// Trims rank ≥ 1 alternates so no node exceeds `cap` candidate links.
/// Rank-0 links always survive; alternates are admitted in (rank, a, b)
/// order while both endpoints have room.
fn apply_degree_cap(links: Vec<CandidateLink>, cap: usize) -> Vec<CandidateLink> {
    let mut degree: std::collections::BTreeMap<&NodeId, usize> = std::collections::BTreeMap::new();
    for l in links.iter().filter(|l| l.rank == 0) {
        *degree.entry(&l.a).or_default() += 1;
        *degree.entry(&l.b).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..links.len()).collect();
    order.sort_by_key(|&i| (links[i].rank, &links[i].a, &links[i].b));
    let mut keep = vec![false; links.len()];
    for i in order {
        let l = &links[i];
        if l.rank == 0 {
            keep[i] = true;
            continue;
        }
        let da = degree.get(&l.a).copied().unwrap_or(0);
        let db = degree.get(&l.b).copied().unwrap_or(0);
        if da < cap && db < cap {
            keep[i] = true;
            *degree.entry(&l.a).or_default() += 1;
            *degree.entry(&l.b).or_default() += 1;
        }
    }
    links
        .into_iter()
        .zip(keep)
        .filter_map(|(l, k)| k.then_some(l))
        .collect()
}

/// Builds the initial redundant multilayer graph:
/// transport layer mirroring the instance graph, an MPLS layer holding
/// every candidate LSR and logical link, one flow layer per demand
/// mirroring the MPLS layer, and the inter-layer edges tying mirrored
/// vertices together.
pub fn build_redundant_mlg(instance: &Instance, params: &BuilderParams) -> Result<MultilayerGraph> {
    let links = candidate_logical_links(instance, params)?;
    let lsrs = candidate_nodes(instance, params)?;
    Ok(mlg_from_links(instance, &lsrs, &links))
}

/// [`build_redundant_mlg`] with the candidate enumeration already done, so
/// callers that need the link list anyway don't pay for it twice.
pub(crate) fn mlg_from_links(
    instance: &Instance,
    lsrs: &BTreeSet<NodeId>,
    links: &[CandidateLink],
) -> MultilayerGraph {
    let mut mlg = MultilayerGraph::default();
    mlg.layers.push(LayerId::Transport);
    mlg.layers.push(LayerId::Mpls);
    for i in 0..instance.demands.len() {
        mlg.layers.push(LayerId::Flow(i));
    }

    for n in &instance.nodes {
        mlg.vertices
            .insert(LayeredVertex::new(LayerId::Transport, n.clone()));
    }
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
    }

    for n in lsrs {
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
    for l in links {
        mlg.edges.push(MlgEdge {
            id: l.id.to_string(),
            endpoints: (
                LayeredVertex::new(LayerId::Mpls, l.a.clone()),
                LayeredVertex::new(LayerId::Mpls, l.b.clone()),
            ),
            kind: EdgeKind::IntraLayer,
            weight: l.unit_cost,
            capacity: Capacity::Finite(l.capacity),
            realization: Some(l.realization.clone()),
        });
    }

    for i in 0..instance.demands.len() {
        let layer = LayerId::Flow(i);
        for n in lsrs {
            mlg.vertices.insert(LayeredVertex::new(layer, n.clone()));
            mlg.edges.push(MlgEdge {
                id: format!("xf{i}:{n}"),
                endpoints: (
                    LayeredVertex::new(LayerId::Mpls, n.clone()),
                    LayeredVertex::new(layer, n.clone()),
                ),
                kind: EdgeKind::InterLayer,
                weight: 0,
                capacity: Capacity::Unbounded,
                realization: None,
            });
        }
        for l in links {
            mlg.edges.push(MlgEdge {
                id: format!("f{i}:{}", l.id),
                endpoints: (
                    LayeredVertex::new(layer, l.a.clone()),
                    LayeredVertex::new(layer, l.b.clone()),
                ),
                kind: EdgeKind::IntraLayer,
                weight: l.hops as u64,
                capacity: Capacity::Unbounded,
                realization: None,
            });
        }
    }

    mlg
}
