//! Local search over the candidate overlay: starts from the full-LSR
//! baseline, then repeatedly drops LSRs, swaps parallel logical links,
//! and regrooms traffic while the total cost keeps falling. Restarts
//! perturb the best design found so far to escape shallow local optima.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::builder::{candidate_logical_links, BuilderParams, CandidateLink};
use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::instance::Instance;
use crate::optimizer::{evaluate_cost, solve_full_lsr_baseline, ChosenLink, Solution};
use crate::paths::CompactGraph;

/// Knobs for [`solve_multilayer`]'s descent-with-restarts loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    /// Hard cap on accepted moves across the whole run, restarts included.
    pub max_iters: usize,
    /// Perturbed descents run after the initial one.
    pub restarts: usize,
    /// Seed for the perturbation RNG.
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_iters: 10_000,
            restarts: 2,
            seed: 0,
        }
    }
}

/// Immutable search context: the instance and candidate links flattened
/// into index space. Nodes are numbered in sorted-id order, links in
/// `(a, b, rank)` order, and the overlay graph's edge indices coincide
/// with positions in `links`.
struct Ctx<'a> {
    instance: &'a Instance,
    links: &'a [CandidateLink],
    node_ids: Vec<&'a NodeId>,
    lsr_cost: Vec<u64>,
    /// Node hosts a demand endpoint, so its LSR can never be dropped.
    endpoint: Vec<bool>,
    /// Node has at least one incident candidate link.
    has_links: Vec<bool>,
    overlay: CompactGraph,
    unit: Vec<u64>,
    /// Demands by ordinal as (src, dst, rate) node indices.
    demands: Vec<(u32, u32, u64)>,
    /// Grooming order: descending rate, ties by ordinal.
    order: Vec<usize>,
    /// Other candidate links joining the same node pair, ascending index.
    parallel: Vec<Vec<u32>>,
    cap: u64,
}

impl<'a> Ctx<'a> {
    fn build(instance: &'a Instance, links: &'a [CandidateLink]) -> Ctx<'a> {
        let mut node_ids: Vec<&NodeId> = instance.nodes.iter().collect();
        node_ids.sort();
        let pos: BTreeMap<&NodeId, u32> = node_ids
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i as u32))
            .collect();
        let lsr_cost: Vec<u64> = node_ids
            .iter()
            .map(|n| instance.cost.lsr_cost[*n])
            .collect();

        let mut overlay = CompactGraph::new(node_ids.len());
        let mut unit = Vec::with_capacity(links.len());
        let mut has_links = vec![false; node_ids.len()];
        for l in links {
            let a = pos[&l.a];
            let b = pos[&l.b];
            let e = overlay.add_edge(a, b);
            debug_assert_eq!(e as usize, unit.len());
            unit.push(l.unit_cost);
            has_links[a as usize] = true;
            has_links[b as usize] = true;
        }

        let mut endpoint = vec![false; node_ids.len()];
        let mut demands = Vec::with_capacity(instance.demands.len());
        for d in &instance.demands {
            let s = pos[&d.src];
            let t = pos[&d.dst];
            endpoint[s as usize] = true;
            endpoint[t as usize] = true;
            demands.push((s, t, d.rate));
        }
        let mut order: Vec<usize> = (0..demands.len()).collect();
        order.sort_by_key(|&i| (Reverse(demands[i].2), i));

        let mut parallel: Vec<Vec<u32>> = vec![Vec::new(); links.len()];
        let mut start = 0;
        while start < links.len() {
            let mut end = start + 1;
            while end < links.len()
                && links[end].a == links[start].a
                && links[end].b == links[start].b
            {
                end += 1;
            }
            for i in start..end {
                for j in start..end {
                    if i != j {
                        parallel[i].push(j as u32);
                    }
                }
            }
            start = end;
        }

        Ctx {
            instance,
            links,
            node_ids,
            lsr_cost,
            endpoint,
            has_links,
            overlay,
            unit,
            demands,
            order,
            parallel,
            cap: instance.cost.channel_capacity,
        }
    }
}

/// A working design: which nodes run an LSR, each demand's route as a
/// sequence of candidate-link indices, and per-link load with the channel
/// cost kept incrementally consistent.
#[derive(Clone, PartialEq, Eq)]
struct State {
    lsr: Vec<bool>,
    routes: Vec<Vec<u32>>,
    load: Vec<u64>,
    lsr_total: u64,
    channel_total: u64,
}

impl State {
    fn fresh(ctx: &Ctx) -> State {
        State {
            lsr: vec![false; ctx.node_ids.len()],
            routes: vec![Vec::new(); ctx.demands.len()],
            load: vec![0; ctx.links.len()],
            lsr_total: 0,
            channel_total: 0,
        }
    }

    fn grand(&self) -> u64 {
        self.lsr_total + self.channel_total
    }
}

fn add_rate(ctx: &Ctx, st: &mut State, l: u32, rate: u64) {
    let li = l as usize;
    let before = st.load[li].div_ceil(ctx.cap);
    st.load[li] += rate;
    let after = st.load[li].div_ceil(ctx.cap);
    st.channel_total += (after - before) * ctx.unit[li];
}

fn remove_rate(ctx: &Ctx, st: &mut State, l: u32, rate: u64) {
    let li = l as usize;
    let before = st.load[li].div_ceil(ctx.cap);
    st.load[li] -= rate;
    let after = st.load[li].div_ceil(ctx.cap);
    st.channel_total -= (before - after) * ctx.unit[li];
}

/// Channel cost added by pushing `rate` more units over link `l`.
fn marginal(ctx: &Ctx, st: &State, l: u32, rate: u64) -> u64 {
    let li = l as usize;
    let before = st.load[li].div_ceil(ctx.cap);
    let after = (st.load[li] + rate).div_ceil(ctx.cap);
    (after - before) * ctx.unit[li]
}

/// Cheapest-marginal-cost route for demand `d` over the active LSRs.
fn route_one(ctx: &Ctx, st: &State, d: usize) -> Option<Vec<u32>> {
    let (s, t, rate) = ctx.demands[d];
    let banned: Vec<bool> = st.lsr.iter().map(|&on| !on).collect();
    let (_, path) = ctx
        .overlay
        .shortest_path_avoiding(s, t, &banned, &[], |e| marginal(ctx, st, e, rate))?;
    Some(path.edges)
}

fn apply_route(ctx: &Ctx, st: &mut State, d: usize, path: Vec<u32>) {
    for &l in &path {
        add_rate(ctx, st, l, ctx.demands[d].2);
    }
    st.routes[d] = path;
}

fn strip_route(ctx: &Ctx, st: &mut State, d: usize) {
    let path = std::mem::take(&mut st.routes[d]);
    for &l in &path {
        remove_rate(ctx, st, l, ctx.demands[d].2);
    }
}

/// Clears every route and re-routes all demands in grooming order.
/// Fails with the first unroutable demand's ordinal.
fn regroom_all(ctx: &Ctx, st: &mut State) -> std::result::Result<(), usize> {
    for r in &mut st.routes {
        r.clear();
    }
    st.load.iter_mut().for_each(|l| *l = 0);
    st.channel_total = 0;
    for &d in &ctx.order {
        match route_one(ctx, st, d) {
            Some(path) => apply_route(ctx, st, d, path),
            None => return Err(d),
        }
    }
    Ok(())
}

fn improves(current: &State, cand: State) -> Option<State> {
    (cand.grand() < current.grand()).then_some(cand)
}

/// Deactivate LSR `i` and reroute the demands that were using it.
fn try_drop(ctx: &Ctx, st: &State, i: usize) -> Option<State> {
    let mut cand = st.clone();
    cand.lsr[i] = false;
    cand.lsr_total -= ctx.lsr_cost[i];
    let touches = |route: &[u32]| {
        route.iter().any(|&l| {
            let (a, b) = ctx.overlay.endpoints(l);
            a as usize == i || b as usize == i
        })
    };
    let affected: Vec<usize> = ctx
        .order
        .iter()
        .copied()
        .filter(|&d| touches(&cand.routes[d]))
        .collect();
    for &d in &affected {
        strip_route(ctx, &mut cand, d);
    }
    for &d in &affected {
        let path = route_one(ctx, &cand, d)?;
        apply_route(ctx, &mut cand, d, path);
    }
    improves(st, cand)
}

/// Merge all of link `l`'s traffic onto a parallel candidate when that is
/// strictly cheaper (fewer channels after pooling, or a cheaper realization).
fn try_swap(ctx: &Ctx, st: &State, l: u32) -> Option<State> {
    let li = l as usize;
    let load_l = st.load[li];
    for &alt in &ctx.parallel[li] {
        let ai = alt as usize;
        let merged = (st.load[ai] + load_l).div_ceil(ctx.cap) * ctx.unit[ai];
        let split = st.load[ai].div_ceil(ctx.cap) * ctx.unit[ai]
            + load_l.div_ceil(ctx.cap) * ctx.unit[li];
        if merged >= split {
            continue;
        }
        let mut cand = st.clone();
        for d in 0..ctx.demands.len() {
            let rate = ctx.demands[d].2;
            for p in 0..cand.routes[d].len() {
                if cand.routes[d][p] == l {
                    cand.routes[d][p] = alt;
                    remove_rate(ctx, &mut cand, l, rate);
                    add_rate(ctx, &mut cand, alt, rate);
                }
            }
        }
        debug_assert_eq!(cand.load[li], 0);
        debug_assert_eq!(cand.grand() + split - merged, st.grand());
        return Some(cand);
    }
    None
}

/// Re-route one demand against the residual loads of all the others.
fn try_reroute(ctx: &Ctx, st: &State, d: usize) -> Option<State> {
    let mut cand = st.clone();
    strip_route(ctx, &mut cand, d);
    let path = route_one(ctx, &cand, d)?;
    apply_route(ctx, &mut cand, d, path);
    improves(st, cand)
}

/// Throw away all routes and regroom from scratch in demand order.
fn try_regroom(ctx: &Ctx, st: &State) -> Option<State> {
    let mut cand = st.clone();
    regroom_all(ctx, &mut cand).ok()?;
    improves(st, cand)
}

/// Activate LSR `i` and regroom everything through the new overlay.
fn try_add(ctx: &Ctx, st: &State, i: usize) -> Option<State> {
    let mut cand = st.clone();
    cand.lsr[i] = true;
    cand.lsr_total += ctx.lsr_cost[i];
    regroom_all(ctx, &mut cand).ok()?;
    improves(st, cand)
}

/// First-improvement descent: after every accepted move the scan restarts
/// from the cheapest move family. Returns the number of accepted moves.
/// Terminates because each move strictly decreases an integer cost.
fn descend(ctx: &Ctx, st: &mut State, max_moves: usize) -> usize {
    let nodes = ctx.node_ids.len();
    let mut accepted = 0;
    'scan: loop {
        if accepted >= max_moves {
            debug_assert!(
                false,
                "move budget exhausted before reaching a local optimum"
            );
            return accepted;
        }
        for i in 0..nodes {
            if st.lsr[i] && !ctx.endpoint[i] {
                if let Some(next) = try_drop(ctx, st, i) {
                    *st = next;
                    accepted += 1;
                    continue 'scan;
                }
            }
        }
        for l in 0..ctx.links.len() {
            if st.load[l] > 0 {
                if let Some(next) = try_swap(ctx, st, l as u32) {
                    *st = next;
                    accepted += 1;
                    continue 'scan;
                }
            }
        }
        for d in 0..ctx.demands.len() {
            if let Some(next) = try_reroute(ctx, st, d) {
                *st = next;
                accepted += 1;
                continue 'scan;
            }
        }
        if let Some(next) = try_regroom(ctx, st) {
            *st = next;
            accepted += 1;
            continue 'scan;
        }
        for i in 0..nodes {
            if !st.lsr[i] && ctx.has_links[i] {
                if let Some(next) = try_add(ctx, st, i) {
                    *st = next;
                    accepted += 1;
                    continue 'scan;
                }
            }
        }
        return accepted;
    }
}

/// Projects the full-LSR baseline into candidate space: every node keeps
/// its LSR and each baseline route maps onto the rank-0 candidate for the
/// same adjacent pair. Returns `None` when some baseline link has no
/// candidate (possible under a restricted candidate LSR set).
fn seed_from_baseline(ctx: &Ctx, baseline: &Solution) -> Option<State> {
    let by_id: BTreeMap<&str, u32> = ctx
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| (l.id.as_str(), i as u32))
        .collect();
    let mut st = State::fresh(ctx);
    for i in 0..ctx.node_ids.len() {
        st.lsr[i] = true;
        st.lsr_total += ctx.lsr_cost[i];
    }
    for (&d, route) in &baseline.flow.routes {
        let mut path = Vec::with_capacity(route.len());
        for id in route {
            path.push(*by_id.get(id.as_str())?);
        }
        apply_route(ctx, &mut st, d, path);
    }
    debug_assert_eq!(st.grand(), baseline.cost.grand_total);
    Some(st)
}

/// Fallback seed when the baseline does not project: activate every
/// candidate node and groom from scratch.
fn seed_all_candidates(ctx: &Ctx) -> std::result::Result<State, usize> {
    let mut st = State::fresh(ctx);
    for i in 0..ctx.node_ids.len() {
        if ctx.endpoint[i] || ctx.has_links[i] {
            st.lsr[i] = true;
            st.lsr_total += ctx.lsr_cost[i];
        }
    }
    regroom_all(ctx, &mut st)?;
    Ok(st)
}

/// Flip a few random droppable LSRs and regroom, giving the next descent
/// a different basin to explore.
fn perturb(ctx: &Ctx, base: &State, rng: &mut ChaCha8Rng) -> Option<State> {
    let flippable: Vec<usize> = (0..ctx.node_ids.len())
        .filter(|&i| !ctx.endpoint[i] && ctx.has_links[i])
        .collect();
    if flippable.is_empty() {
        return None;
    }
    let mut st = base.clone();
    for _ in 0..3.min(flippable.len()) {
        let i = flippable[rng.random_range(0..flippable.len())];
        st.lsr[i] = !st.lsr[i];
        if st.lsr[i] {
            st.lsr_total += ctx.lsr_cost[i];
        } else {
            st.lsr_total -= ctx.lsr_cost[i];
        }
    }
    regroom_all(ctx, &mut st).ok()?;
    Some(st)
}

/// Deterministic preference between equally explored states: cheaper
/// first, then the lexicographically least active-LSR set and routes.
fn prefer(a: &State, b: &State) -> Ordering {
    let active = |st: &State| -> Vec<u32> {
        st.lsr
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i as u32))
            .collect()
    };
    a.grand()
        .cmp(&b.grand())
        .then_with(|| active(a).cmp(&active(b)))
        .then_with(|| a.routes.cmp(&b.routes))
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn materialize(ctx: &Ctx, st: &State) -> Result<Solution> {
    let mut sol = Solution::default();
    for (i, &on) in st.lsr.iter().enumerate() {
        if on {
            sol.lsr_nodes.insert(ctx.node_ids[i].clone());
        }
    }
    let mut used: Vec<u32> = (0..ctx.links.len() as u32)
        .filter(|&l| st.load[l as usize] > 0)
        .collect();
    used.sort_by_key(|&l| ctx.links[l as usize].id.as_str());
    for &l in &used {
        let link = &ctx.links[l as usize];
        sol.logical_links.push(ChosenLink {
            id: link.id.clone(),
            realization: link.realization.clone(),
            channels: st.load[l as usize].div_ceil(ctx.cap),
        });
        sol.flow
            .link_load
            .insert(link.id.clone(), st.load[l as usize]);
    }
    for (d, route) in st.routes.iter().enumerate() {
        sol.flow.routes.insert(
            d,
            route.iter().map(|&l| ctx.links[l as usize].id.clone()).collect(),
        );
    }
    sol.cost = evaluate_cost(ctx.instance, &sol)?;
    debug_assert_eq!(sol.cost.grand_total, st.grand());
    Ok(sol)
}

/// Designs a cheap overlay for `instance`: builds the candidate link set,
/// seeds from the full-LSR baseline, and runs first-improvement descent
/// with perturbation restarts. The result never costs more than
/// [`solve_full_lsr_baseline`] on the same instance.
pub fn solve_multilayer(
    instance: &Instance,
    builder: &BuilderParams,
    search: &SearchParams,
) -> Result<Solution> {
    let baseline = solve_full_lsr_baseline(instance)?;
    let links = candidate_logical_links(instance, builder)?;
    #[cfg(debug_assertions)]
    {
        let lsrs = crate::builder::candidate_nodes(instance, builder)?;
        let mlg = crate::builder::mlg_from_links(instance, &lsrs, &links);
        let violations = crate::mlg::validate(&mlg);
        debug_assert!(
            violations.is_empty(),
            "candidate multilayer graph failed validation: {violations:?}"
        );
    }

    let ctx = Ctx::build(instance, &links);
    let mut st = match seed_from_baseline(&ctx, &baseline) {
        Some(st) => st,
        None => seed_all_candidates(&ctx).map_err(|d| Error::Unroutable { demand: d })?,
    };

    let mut budget = search.max_iters;
    budget = budget.saturating_sub(descend(&ctx, &mut st, budget));
    let mut best = st;
    for r in 0..search.restarts {
        if budget == 0 {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix(search.seed, r as u64 + 1));
        let Some(mut cand) = perturb(&ctx, &best, &mut rng) else {
            continue;
        };
        budget = budget.saturating_sub(descend(&ctx, &mut cand, budget));
        if prefer(&cand, &best) == Ordering::Less {
            best = cand;
        }
    }

    let sol = materialize(&ctx, &best)?;
    if sol.cost.grand_total > baseline.cost.grand_total {
        debug_assert!(false, "search regressed past its own seed");
        return Ok(baseline);
    }
    Ok(sol)
}
