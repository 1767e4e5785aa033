//! Exhaustive optimizer for micro instances. It enumerates every LSR
//! subset and every combination of simple routes, pooling the traffic
//! between each LSR pair onto that pair's cheapest transport realization.
//! The pooling is lossless: channel counts are subadditive under merging
//! (⌈x⌉ + ⌈y⌉ ≥ ⌈x + y⌉ in units of capacity) and the cheapest
//! realization minimizes the per-channel price, so some optimal design
//! always uses at most one logical link per pair.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ids::LinkId;
use crate::index::TransportIndex;
use crate::instance::Instance;
use crate::optimizer::{evaluate_cost, solve_full_lsr_baseline, ChosenLink, Solution};

/// Size caps above which [`solve_exact`] refuses to run. The search is
/// factorial in both dimensions, so the defaults are deliberately tiny.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_nodes: usize,
    pub max_demands: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_nodes: 5,
            max_demands: 4,
        }
    }
}

/// Position of unordered pair `(u, v)`, `u < v`, in a flat upper-triangle
/// table over `n` nodes.
fn pair_index(n: usize, u: u32, v: u32) -> usize {
    let (u, v) = (u as usize, v as usize);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// All simple node paths from `s` to `t` through active nodes, extending
/// in ascending node order. The overlay is complete: any two active LSRs
/// can be joined by a logical link.
fn simple_paths(active: &[bool], s: u32, t: u32) -> Vec<Vec<u32>> {
    fn go(
        active: &[bool],
        t: u32,
        path: &mut Vec<u32>,
        visited: &mut [bool],
        out: &mut Vec<Vec<u32>>,
    ) {
        let u = *path.last().expect("path starts non-empty");
        if u == t {
            out.push(path.clone());
            return;
        }
        for v in 0..active.len() as u32 {
            if active[v as usize] && !visited[v as usize] {
                visited[v as usize] = true;
                path.push(v);
                go(active, t, path, visited, out);
                path.pop();
                visited[v as usize] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut visited = vec![false; active.len()];
    visited[s as usize] = true;
    go(active, t, &mut vec![s], &mut visited, &mut out);
    out
}

struct Fixed<'a> {
    /// Demand ordinals in search order: descending rate, ties by ordinal.
    order: &'a [usize],
    /// Rate per ordinal.
    rates: &'a [u64],
    /// Candidate node paths per search position.
    options: &'a [Vec<Vec<u32>>],
    /// Cheapest realization cost per pair index.
    pair_unit: &'a [u64],
    cap: u64,
    n: usize,
}

type Best = (Vec<bool>, Vec<Vec<u32>>);

/// Depth-first route assignment with undo. `channel` only grows as
/// demands are placed, so `lsr_sum + channel` is a valid lower bound and
/// the incumbent prunes whole subtrees.
#[allow(clippy::too_many_arguments)]
fn assign(
    fixed: &Fixed,
    pos: usize,
    lsr_sum: u64,
    active: &[bool],
    loads: &mut [u64],
    channel: &mut u64,
    chosen: &mut Vec<usize>,
    best_cost: &mut u64,
    best: &mut Option<Best>,
) {
    if lsr_sum + *channel >= *best_cost {
        return;
    }
    if pos == fixed.order.len() {
        *best_cost = lsr_sum + *channel;
        *best = Some((
            active.to_vec(),
            chosen
                .iter()
                .enumerate()
                .map(|(p, &c)| fixed.options[p][c].clone())
                .collect(),
        ));
        return;
    }
    let rate = fixed.rates[fixed.order[pos]];
    for c in 0..fixed.options[pos].len() {
        let path = &fixed.options[pos][c];
        let mut delta = 0;
        for w in path.windows(2) {
            let (u, v) = (w[0].min(w[1]), w[0].max(w[1]));
            let p = pair_index(fixed.n, u, v);
            let before = loads[p].div_ceil(fixed.cap);
            loads[p] += rate;
            delta += (loads[p].div_ceil(fixed.cap) - before) * fixed.pair_unit[p];
        }
        *channel += delta;
        chosen.push(c);
        assign(
            fixed, pos + 1, lsr_sum, active, loads, channel, chosen, best_cost, best,
        );
        chosen.pop();
        *channel -= delta;
        for w in path.windows(2) {
            let (u, v) = (w[0].min(w[1]), w[0].max(w[1]));
            loads[pair_index(fixed.n, u, v)] -= rate;
        }
    }
}

/// Provably minimum-cost overlay design for a micro instance, found by
/// exhaustive enumeration. Instances above `limits` are refused with
/// `LIMITS_EXCEEDED`. Seeded with the full-LSR baseline as the incumbent;
/// when nothing beats it, the baseline itself is already optimal and is
/// returned unchanged.
pub fn solve_exact(instance: &Instance, limits: &ExactLimits) -> Result<Solution> {
    let n = instance.nodes.len();
    if n > limits.max_nodes {
        return Err(Error::LimitsExceeded(format!(
            "{n} nodes exceed the exhaustive-search cap of {}",
            limits.max_nodes
        )));
    }
    if instance.demands.len() > limits.max_demands {
        return Err(Error::LimitsExceeded(format!(
            "{} demands exceed the exhaustive-search cap of {}",
            instance.demands.len(),
            limits.max_demands
        )));
    }

    let baseline = solve_full_lsr_baseline(instance)?;
    let idx = TransportIndex::build(instance);
    let cap = instance.cost.channel_capacity;

    let pairs = n * (n - 1) / 2;
    let mut pair_unit = vec![0u64; pairs];
    let mut pair_path: Vec<Vec<u32>> = vec![Vec::new(); pairs];
    let mut pair_ends = vec![(0u32, 0u32); pairs];
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            let (cost, path) = idx
                .graph
                .shortest_path(u, v, |e| idx.channel_cost[e as usize])
                .expect("validated instances are connected");
            let p = pair_index(n, u, v);
            pair_unit[p] = cost;
            pair_path[p] = path.edges;
            pair_ends[p] = (u, v);
        }
    }

    let mut endpoint = vec![false; n];
    let mut ends = Vec::with_capacity(instance.demands.len());
    let mut rates = Vec::with_capacity(instance.demands.len());
    for d in &instance.demands {
        let s = idx.node_pos[&d.src];
        let t = idx.node_pos[&d.dst];
        endpoint[s as usize] = true;
        endpoint[t as usize] = true;
        ends.push((s, t));
        rates.push(d.rate);
    }
    let free: Vec<usize> = (0..n).filter(|&i| !endpoint[i]).collect();
    let mut order: Vec<usize> = (0..instance.demands.len()).collect();
    order.sort_by_key(|&i| (Reverse(rates[i]), i));

    let mut best_cost = baseline.cost.grand_total;
    let mut best: Option<Best> = None;

    let mut active = endpoint.clone();
    for mask in 0u64..1 << free.len() {
        for (bit, &i) in free.iter().enumerate() {
            active[i] = mask & (1 << bit) != 0;
        }
        let lsr_sum: u64 = (0..n).filter(|&i| active[i]).map(|i| idx.lsr_cost[i]).sum();
        if lsr_sum >= best_cost {
            continue;
        }
        let options: Vec<Vec<Vec<u32>>> = order
            .iter()
            .map(|&d| simple_paths(&active, ends[d].0, ends[d].1))
            .collect();
        debug_assert!(options.iter().all(|o| !o.is_empty()));
        let fixed = Fixed {
            order: &order,
            rates: &rates,
            options: &options,
            pair_unit: &pair_unit,
            cap,
            n,
        };
        let mut loads = vec![0u64; pairs];
        let mut channel = 0u64;
        let mut chosen = Vec::with_capacity(order.len());
        assign(
            &fixed,
            0,
            lsr_sum,
            &active,
            &mut loads,
            &mut channel,
            &mut chosen,
            &mut best_cost,
            &mut best,
        );
    }

    let Some((active, node_paths)) = best else {
        return Ok(baseline);
    };

    let mut sol = Solution::default();
    for (i, &on) in active.iter().enumerate() {
        if on {
            sol.lsr_nodes.insert(idx.nodes[i].clone());
        }
    }
    let mut load: BTreeMap<usize, u64> = BTreeMap::new();
    let mut route_pairs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, path) in node_paths.iter().enumerate() {
        let ordinal = order[pos];
        let rate = rates[ordinal];
        let mut seq = Vec::with_capacity(path.len().saturating_sub(1));
        for w in path.windows(2) {
            let p = pair_index(n, w[0].min(w[1]), w[0].max(w[1]));
            *load.entry(p).or_default() += rate;
            seq.push(p);
        }
        route_pairs.insert(ordinal, seq);
    }
    let link_ids: BTreeMap<usize, LinkId> = load
        .keys()
        .map(|&p| {
            let (u, v) = pair_ends[p];
            let id = format!(
                "{}--{}~x",
                idx.nodes[u as usize],
                idx.nodes[v as usize]
            );
            (p, LinkId::from(id))
        })
        .collect();
    for (&p, &l) in &load {
        sol.logical_links.push(ChosenLink {
            id: link_ids[&p].clone(),
            realization: idx.edge_id_path(&pair_path[p]),
            channels: l.div_ceil(cap),
        });
        sol.flow.link_load.insert(link_ids[&p].clone(), l);
    }
    sol.logical_links.sort_by(|a, b| a.id.cmp(&b.id));
    for (ordinal, seq) in route_pairs {
        sol.flow
            .routes
            .insert(ordinal, seq.iter().map(|p| link_ids[p].clone()).collect());
    }
    sol.cost = evaluate_cost(instance, &sol)?;
    debug_assert_eq!(sol.cost.grand_total, best_cost);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::BuilderParams;
    use crate::instance::{generate_instance, VariantParams};
    use crate::optimizer::{solve_multilayer, SearchParams};

    fn hand_instance(json: serde_json::Value) -> Instance {
        let inst: Instance = serde_json::from_value(json).unwrap();
        assert!(inst.validate().is_empty());
        inst
    }

    fn triangle_instance() -> Instance {
        hand_instance(serde_json::json!({
            "nodes": ["a", "b", "c"],
            "transport_edges": [
                {"id": "e0", "a": "a", "b": "b"},
                {"id": "e1", "a": "b", "b": "c"},
                {"id": "e2", "a": "a", "b": "c"},
            ],
            "demands": [
                {"src": "a", "dst": "c", "rate": 4},
            ],
            "cost": {
                "lsr_cost": {"a": 5, "b": 5, "c": 5},
                "channel_cost": {"e0": 10, "e1": 10, "e2": 10},
                "channel_capacity": 10,
            },
            "meta": {"node_count": 3, "variant": "hand", "seed": 0},
        }))
    }

    fn path_instance() -> Instance {
        hand_instance(serde_json::json!({
            "nodes": ["a", "b", "c"],
            "transport_edges": [
                {"id": "e0", "a": "a", "b": "b"},
                {"id": "e1", "a": "b", "b": "c"},
            ],
            "demands": [
                {"src": "a", "dst": "c", "rate": 4},
            ],
            "cost": {
                "lsr_cost": {"a": 5, "b": 5, "c": 5},
                "channel_cost": {"e0": 10, "e1": 10},
                "channel_capacity": 10,
            },
            "meta": {"node_count": 3, "variant": "hand", "seed": 0},
        }))
    }

    #[test]
    fn triangle_optimum_drops_the_middle_lsr() {
        let sol = solve_exact(&triangle_instance(), &ExactLimits::default()).unwrap();
        assert_eq!(sol.cost.grand_total, 20);
        let lsrs: Vec<&str> = sol.lsr_nodes.iter().map(|n| n.as_str()).collect();
        assert_eq!(lsrs, ["a", "c"]);
    }

    #[test]
    fn relay_lsr_is_dropped_when_it_carries_nothing_extra() {
        // One demand across a path graph: tunneling straight through b
        // (one two-hop logical link, LSRs at the ends only) saves b's
        // LSR cost and pays the same channel bill.
        let sol = solve_exact(&path_instance(), &ExactLimits::default()).unwrap();
        assert_eq!(sol.cost.grand_total, 30);
        let lsrs: Vec<&str> = sol.lsr_nodes.iter().map(|n| n.as_str()).collect();
        assert_eq!(lsrs, ["a", "c"]);
        assert_eq!(sol.logical_links.len(), 1);
        assert_eq!(sol.logical_links[0].realization.len(), 2);
    }

    #[test]
    fn forced_endpoints_leave_nothing_to_drop() {
        let mut inst = path_instance();
        inst.demands = vec![
            crate::instance::Demand {
                src: crate::ids::NodeId::new("a"),
                dst: crate::ids::NodeId::new("c"),
                rate: 3,
            },
            crate::instance::Demand {
                src: crate::ids::NodeId::new("b"),
                dst: crate::ids::NodeId::new("c"),
                rate: 3,
            },
        ];
        assert!(inst.validate().is_empty());
        let sol = solve_exact(&inst, &ExactLimits::default()).unwrap();
        // Every node hosts an endpoint, and grooming both demands over
        // the b--c hop matches the baseline overlay exactly.
        assert_eq!(sol.cost.grand_total, 35);
        assert_eq!(sol.lsr_nodes.len(), 3);
    }

    #[test]
    fn size_caps_are_enforced() {
        let params = VariantParams::preset("sparse-cheap-thin", 6).unwrap();
        let inst = generate_instance(6, &params, 1).unwrap();
        let err = solve_exact(&inst, &ExactLimits::default()).unwrap_err();
        assert_eq!(err.code(), "LIMITS_EXCEEDED");

        let mut small = triangle_instance();
        small.demands = ["b", "c", "a", "c", "b"]
            .iter()
            .zip(["a", "b", "b", "a", "c"])
            .map(|(s, t)| crate::instance::Demand {
                src: crate::ids::NodeId::new(*s),
                dst: crate::ids::NodeId::new(t),
                rate: 1,
            })
            .collect();
        assert!(small.validate().is_empty());
        let err = solve_exact(&small, &ExactLimits::default()).unwrap_err();
        assert_eq!(err.code(), "LIMITS_EXCEEDED");
    }

    /// Complete micro-instance generator parameters with an explicit
    /// demand count, sized for the exhaustive solver.
    fn micro_params(demand_count: usize) -> VariantParams {
        VariantParams {
            tag: "micro".into(),
            edge_density: 1.0,
            demand_count,
            rate_range: (8, 95),
            lsr_cost_range: (40, 165),
            channel_cost_range: (24, 40),
            channel_capacity: 100,
        }
    }

    #[test]
    fn local_search_never_beats_the_exhaustive_optimum() {
        for seed in 1..=6u64 {
            let inst = generate_instance(5, &micro_params(3), seed).unwrap();
            let exact = solve_exact(&inst, &ExactLimits::default()).unwrap();
            let search =
                solve_multilayer(&inst, &BuilderParams::default(), &SearchParams::default())
                    .unwrap();
            assert!(
                exact.cost.grand_total <= search.cost.grand_total,
                "seed {seed}: exact {} > search {}",
                exact.cost.grand_total,
                search.cost.grand_total
            );
        }
    }

    /// Brute force over the unreduced design space: every LSR subset,
    /// every simple route, and an independent realization choice for
    /// every logical hop — traffic on the same pair may split across
    /// differently realized links. Used to confirm that pooling each
    /// pair's traffic onto its cheapest realization loses nothing.
    fn full_space_optimum(inst: &Instance) -> u64 {
        let idx = TransportIndex::build(inst);
        let n = idx.nodes.len();
        let cap = inst.cost.channel_capacity;
        let pairs = n * (n - 1) / 2;
        let mut realization_units: Vec<Vec<u64>> = vec![Vec::new(); pairs];
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                let units: Vec<u64> = idx
                    .graph
                    .all_simple_paths(u, v)
                    .iter()
                    .map(|p| idx.path_channel_cost(&p.edges))
                    .collect();
                realization_units[pair_index(n, u, v)] = units;
            }
        }

        let mut endpoint = vec![false; n];
        let mut demands = Vec::new();
        for d in &inst.demands {
            let s = idx.node_pos[&d.src];
            let t = idx.node_pos[&d.dst];
            endpoint[s as usize] = true;
            endpoint[t as usize] = true;
            demands.push((s, t, d.rate));
        }
        let free: Vec<usize> = (0..n).filter(|&i| !endpoint[i]).collect();

        // Load per (pair, realization choice); rebuilt incrementally.
        type LinkKey = (usize, usize);
        fn place(
            demands: &[(u32, u32, u64)],
            d: usize,
            active: &[bool],
            realization_units: &[Vec<u64>],
            n: usize,
            cap: u64,
            lsr_sum: u64,
            loads: &mut BTreeMap<LinkKey, u64>,
            best: &mut u64,
        ) {
            if d == demands.len() {
                let channel: u64 = loads
                    .iter()
                    .map(|(&(p, r), &l)| l.div_ceil(cap) * realization_units[p][r])
                    .sum();
                *best = (*best).min(lsr_sum + channel);
                return;
            }
            let (s, t, rate) = demands[d];
            for path in simple_paths(active, s, t) {
                // Choose a realization for each hop independently.
                fn choose(
                    hops: &[usize],
                    h: usize,
                    rate: u64,
                    realization_units: &[Vec<u64>],
                    loads: &mut BTreeMap<LinkKey, u64>,
                    leaf: &mut dyn FnMut(&mut BTreeMap<LinkKey, u64>),
                ) {
                    if h == hops.len() {
                        leaf(loads);
                        return;
                    }
                    let p = hops[h];
                    for r in 0..realization_units[p].len() {
                        *loads.entry((p, r)).or_default() += rate;
                        choose(hops, h + 1, rate, realization_units, loads, leaf);
                        let slot = loads.get_mut(&(p, r)).unwrap();
                        *slot -= rate;
                        if *slot == 0 {
                            loads.remove(&(p, r));
                        }
                    }
                }
                let hops: Vec<usize> = path
                    .windows(2)
                    .map(|w| pair_index(n, w[0].min(w[1]), w[0].max(w[1])))
                    .collect();
                let mut leaf = |loads: &mut BTreeMap<LinkKey, u64>| {
                    place(
                        demands,
                        d + 1,
                        active,
                        realization_units,
                        n,
                        cap,
                        lsr_sum,
                        loads,
                        best,
                    );
                };
                choose(&hops, 0, rate, realization_units, loads, &mut leaf);
            }
        }

        let mut best = u64::MAX;
        let mut active = endpoint.clone();
        for mask in 0u64..1 << free.len() {
            for (bit, &i) in free.iter().enumerate() {
                active[i] = mask & (1 << bit) != 0;
            }
            let lsr_sum: u64 = (0..n).filter(|&i| active[i]).map(|i| idx.lsr_cost[i]).sum();
            let mut loads = BTreeMap::new();
            place(
                &demands,
                0,
                &active,
                &realization_units,
                n,
                cap,
                lsr_sum,
                &mut loads,
                &mut best,
            );
        }
        best
    }

    #[test]
    fn pooling_onto_cheapest_realizations_is_lossless() {
        let mut cases = vec![triangle_instance(), path_instance()];
        for seed in [1u64, 2, 3] {
            cases.push(generate_instance(4, &micro_params(2), seed).unwrap());
        }
        for (i, inst) in cases.iter().enumerate() {
            assert!(inst.demands.len() <= 2, "case {i} grew too big to brute-force");
            let exact = solve_exact(inst, &ExactLimits::default()).unwrap();
            let brute = full_space_optimum(inst);
            assert_eq!(
                exact.cost.grand_total, brute,
                "case {i}: exhaustive {} vs unreduced {}",
                exact.cost.grand_total, brute
            );
        }
    }
}
