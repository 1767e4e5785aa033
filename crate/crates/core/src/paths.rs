//! Deterministic path search over compact index-based graphs.
//!
//! All public entry points break ties the same way: among equal-cost paths
//! the lexicographically smallest node sequence wins, and among identical
//! node sequences (parallel edges) the smallest edge-index sequence wins.
//! Every caller that needs byte-identical output across runs and platforms
//! relies on this ordering.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

/// A path through a [`CompactGraph`]: `nodes` has one more element than
/// `edges`, and `edges[i]` joins `nodes[i]` to `nodes[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub nodes: Vec<u32>,
    pub edges: Vec<u32>,
}

impl Path {
    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }
}

/// Undirected multigraph over node indices `0..node_count`, with edges
/// addressed by insertion index.
#[derive(Debug, Clone, Default)]
pub struct CompactGraph {
    adj: Vec<Vec<(u32, u32)>>,
    endpoints: Vec<(u32, u32)>,
}

impl CompactGraph {
    pub fn new(node_count: usize) -> Self {
        CompactGraph {
            adj: vec![Vec::new(); node_count],
            endpoints: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn endpoints(&self, edge: u32) -> (u32, u32) {
        self.endpoints[edge as usize]
    }

    /// Adds an undirected edge and returns its index.
    pub fn add_edge(&mut self, a: u32, b: u32) -> u32 {
        let id = self.endpoints.len() as u32;
        self.endpoints.push((a, b));
        self.adj[a as usize].push((b, id));
        self.adj[b as usize].push((a, id));
        // Keep adjacency sorted so traversal order is index-independent.
        self.adj[a as usize].sort_unstable();
        self.adj[b as usize].sort_unstable();
        id
    }

    pub fn neighbors(&self, node: u32) -> &[(u32, u32)] {
        &self.adj[node as usize]
    }

    /// True when every node is reachable from node 0 (vacuously true for
    /// empty graphs).
    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0u32];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Least-cost path from `src` to `dst` under `edge_weight`, with the
    /// deterministic tie order described in the module docs. Returns `None`
    /// when `dst` is unreachable.
    pub fn shortest_path<W>(&self, src: u32, dst: u32, edge_weight: W) -> Option<(u64, Path)>
    where
        W: Fn(u32) -> u64,
    {
        self.shortest_path_avoiding(src, dst, &[], &[], edge_weight)
    }

    /// [`CompactGraph::shortest_path`] restricted to paths that touch no
    /// banned node (other than `src` itself) and no banned edge. The ban
    /// slices may be empty or sized to node/edge count.
    pub fn shortest_path_avoiding<W>(
        &self,
        src: u32,
        dst: u32,
        banned_nodes: &[bool],
        banned_edges: &[bool],
        edge_weight: W,
    ) -> Option<(u64, Path)>
    where
        W: Fn(u32) -> u64,
    {
        let node_banned = |n: u32| banned_nodes.get(n as usize).copied().unwrap_or(false);
        let edge_banned = |e: u32| banned_edges.get(e as usize).copied().unwrap_or(false);
        if node_banned(dst) && dst != src {
            return None;
        }

        // Heap entries carry the full (cost, node-seq, edge-seq) key, so the
        // first settled entry per node is minimal in the deterministic order.
        let mut settled = vec![false; self.adj.len()];
        let mut heap: BinaryHeap<Reverse<(u64, Vec<u32>, Vec<u32>)>> = BinaryHeap::new();
        heap.push(Reverse((0, vec![src], Vec::new())));

        while let Some(Reverse((cost, nodes, edges))) = heap.pop() {
            let u = *nodes.last().expect("path is never empty");
            if settled[u as usize] {
                continue;
            }
            settled[u as usize] = true;
            if u == dst {
                return Some((cost, Path { nodes, edges }));
            }
            for &(v, e) in &self.adj[u as usize] {
                if settled[v as usize] || node_banned(v) || edge_banned(e) {
                    continue;
                }
                let mut next_nodes = nodes.clone();
                next_nodes.push(v);
                let mut next_edges = edges.clone();
                next_edges.push(e);
                heap.push(Reverse((cost + edge_weight(e), next_nodes, next_edges)));
            }
        }
        None
    }

    /// The `k` least-cost simple paths from `src` to `dst` (Yen's algorithm),
    /// sorted by (cost, node sequence, edge sequence). Fewer than `k` paths
    /// are returned when the graph has fewer simple paths.
    pub fn k_shortest_paths<W>(&self, src: u32, dst: u32, k: usize, edge_weight: W) -> Vec<Path>
    where
        W: Fn(u32) -> u64,
    {
        if k == 0 || src == dst {
            return Vec::new();
        }
        let mut found: Vec<(u64, Path)> = match self.shortest_path(src, dst, &edge_weight) {
            Some(first) => vec![first],
            None => return Vec::new(),
        };
        let mut candidates: BTreeSet<(u64, Vec<u32>, Vec<u32>)> = BTreeSet::new();

        while found.len() < k {
            let (_, prev) = found.last().expect("at least one path found").clone();
            for spur_idx in 0..prev.nodes.len() - 1 {
                let spur_node = prev.nodes[spur_idx];
                let root_nodes = &prev.nodes[..=spur_idx];
                let root_edges = &prev.edges[..spur_idx];

                let mut banned_edges = vec![false; self.endpoints.len()];
                for (_, p) in &found {
                    if p.nodes.len() > spur_idx && p.nodes[..=spur_idx] == *root_nodes {
                        if let Some(&e) = p.edges.get(spur_idx) {
                            banned_edges[e as usize] = true;
                        }
                    }
                }
                let mut banned_nodes = vec![false; self.adj.len()];
                for &n in &root_nodes[..spur_idx] {
                    banned_nodes[n as usize] = true;
                }

                if let Some((spur_cost, spur)) = self.shortest_path_avoiding(
                    spur_node,
                    dst,
                    &banned_nodes,
                    &banned_edges,
                    &edge_weight,
                ) {
                    let root_cost: u64 = root_edges.iter().map(|&e| edge_weight(e)).sum();
                    let mut nodes = root_nodes.to_vec();
                    nodes.extend_from_slice(&spur.nodes[1..]);
                    let mut edges = root_edges.to_vec();
                    edges.extend_from_slice(&spur.edges);
                    candidates.insert((root_cost + spur_cost, nodes, edges));
                }
            }

            // Skip candidates already promoted to the result list.
            let next = loop {
                match candidates.pop_first() {
                    Some((cost, nodes, edges)) => {
                        let path = Path { nodes, edges };
                        if !found.iter().any(|(_, p)| *p == path) {
                            break Some((cost, path));
                        }
                    }
                    None => break None,
                }
            };
            match next {
                Some(entry) => found.push(entry),
                None => break,
            }
        }
        found.into_iter().map(|(_, p)| p).collect()
    }

    /// Every simple path from `src` to `dst`, sorted by (hop count, node
    /// sequence, edge sequence). Parallel edges yield one path each.
    /// Exponential; callers guard the graph size.
    pub fn all_simple_paths(&self, src: u32, dst: u32) -> Vec<Path> {
        let mut out = Vec::new();
        if src == dst {
            return out;
        }
        let mut on_path = vec![false; self.adj.len()];
        on_path[src as usize] = true;
        let mut nodes = vec![src];
        let mut edges = Vec::new();
        self.dfs_paths(dst, &mut on_path, &mut nodes, &mut edges, &mut out);
        out.sort_by(|a, b| {
            (a.edges.len(), &a.nodes, &a.edges).cmp(&(b.edges.len(), &b.nodes, &b.edges))
        });
        out
    }

    fn dfs_paths(
        &self,
        dst: u32,
        on_path: &mut Vec<bool>,
        nodes: &mut Vec<u32>,
        edges: &mut Vec<u32>,
        out: &mut Vec<Path>,
    ) {
        let u = *nodes.last().expect("path is never empty");
        if u == dst {
            out.push(Path {
                nodes: nodes.clone(),
                edges: edges.clone(),
            });
            return;
        }
        for &(v, e) in &self.adj[u as usize] {
            if on_path[v as usize] {
                continue;
            }
            on_path[v as usize] = true;
            nodes.push(v);
            edges.push(e);
            self.dfs_paths(dst, on_path, nodes, edges, out);
            edges.pop();
            nodes.pop();
            on_path[v as usize] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> CompactGraph {
        let mut g = CompactGraph::new(3);
        g.add_edge(0, 1); // e0: A-B
        g.add_edge(0, 2); // e1: A-C
        g.add_edge(1, 2); // e2: B-C
        g
    }

    #[test]
    fn shortest_path_prefers_fewer_hops() {
        let g = triangle();
        let (cost, path) = g.shortest_path(0, 2, |_| 1).unwrap();
        assert_eq!(cost, 1);
        assert_eq!(path.nodes, vec![0, 2]);
    }

    #[test]
    fn shortest_path_breaks_ties_lexicographically() {
        // Square 0-1-3 and 0-2-3: both 2 hops; via node 1 is lexicographically
        // smaller.
        let mut g = CompactGraph::new(4);
        g.add_edge(0, 1);
        g.add_edge(0, 2);
        g.add_edge(1, 3);
        g.add_edge(2, 3);
        let (cost, path) = g.shortest_path(0, 3, |_| 1).unwrap();
        assert_eq!(cost, 2);
        assert_eq!(path.nodes, vec![0, 1, 3]);
    }

    #[test]
    fn parallel_edges_resolve_to_smallest_index() {
        let mut g = CompactGraph::new(2);
        g.add_edge(0, 1);
        g.add_edge(0, 1);
        let (_, path) = g.shortest_path(0, 1, |_| 1).unwrap();
        assert_eq!(path.edges, vec![0]);
    }

    #[test]
    fn k_shortest_matches_exhaustive_enumeration_on_triangle() {
        // Oracle: enumerate every simple path by hand and sort by
        // (hops, node sequence). The triangle has exactly two A-to-C paths.
        let g = triangle();
        let paths = g.k_shortest_paths(0, 2, 4, |_| 1);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes, vec![0, 2]);
        assert_eq!(paths[1].nodes, vec![0, 1, 2]);

        let exhaustive = g.all_simple_paths(0, 2);
        assert_eq!(paths, exhaustive);
    }

    #[test]
    fn k_shortest_is_monotone_in_k() {
        let mut g = CompactGraph::new(5);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 3);
        g.add_edge(3, 2);
        g.add_edge(0, 2);
        g.add_edge(3, 4);
        g.add_edge(4, 2);
        for k in 1..6 {
            let shorter = g.k_shortest_paths(0, 2, k, |_| 1);
            let longer = g.k_shortest_paths(0, 2, k + 1, |_| 1);
            assert_eq!(&longer[..shorter.len()], &shorter[..]);
        }
    }

    #[test]
    fn all_simple_paths_on_path_graph() {
        let mut g = CompactGraph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let paths = g.all_simple_paths(0, 2);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].nodes, vec![0, 1, 2]);
    }

    #[test]
    fn bans_exclude_paths() {
        let g = triangle();
        let banned_edges = vec![false, true, false];
        let (cost, path) = g
            .shortest_path_avoiding(0, 2, &[], &banned_edges, |_| 1)
            .unwrap();
        assert_eq!(cost, 2);
        assert_eq!(path.nodes, vec![0, 1, 2]);

        let banned_nodes = vec![false, true, false];
        assert!(g
            .shortest_path_avoiding(0, 2, &banned_nodes, &banned_edges, |_| 1)
            .is_none());
    }

    #[test]
    fn disconnected_pair_yields_none() {
        let mut g = CompactGraph::new(4);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        assert!(g.shortest_path(0, 3, |_| 1).is_none());
        assert!(!g.is_connected());
    }
}
