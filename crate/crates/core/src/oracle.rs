//! Brute-force reference solvers, a tour validator, and instance generators.
//!
//! Nothing here shares an algorithmic path with the main pipeline: tours are
//! found by sweeping request orders over Floyd-Warshall distances, min-cost
//! circulations by scanning a coefficient box, Steiner trees by Prim over
//! every vertex subset.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circulation::{circulation_cost, initial_circulation, Circulation, Instance, Request};
use crate::graph::{distances_from, BaseGraph, CycleBasis, Cost, VertexId};
use crate::homology_tour::{Step, StepKind, Tour};

pub const MAX_ORACLE_DEMAND: i64 = 8;
pub const MAX_ORACLE_RANK: usize = 4;
pub const MAX_ORACLE_STEINER_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for oracle: {what} is {size}, limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub cost: Cost,
    pub witness: W,
    pub nodes_explored: u64,
}

struct AllPairs {
    dist: Vec<Vec<Cost>>,
    next: Vec<Vec<usize>>,
}

fn floyd_warshall(graph: &BaseGraph) -> AllPairs {
    let n = graph.vertex_count();
    let inf = Cost::MAX / 4;
    let mut dist = vec![vec![inf; n]; n];
    let mut next = vec![vec![usize::MAX; n]; n];
    for v in 0..n {
        dist[v][v] = 0;
        next[v][v] = v;
    }
    for e in graph.edges() {
        dist[e.tail][e.head] = e.cost;
        dist[e.head][e.tail] = e.cost;
        next[e.tail][e.head] = e.head;
        next[e.head][e.tail] = e.tail;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    AllPairs { dist, next }
}

impl AllPairs {
    fn walk(&self, graph: &BaseGraph, from: VertexId, to: VertexId, steps: &mut Vec<Step>) {
        let mut v = from;
        while v != to {
            let w = self.next[v][to];
            steps.push(Step {
                kind: StepKind::Edge,
                id: graph.edge_between(v, w).expect("hop follows an edge"),
                from: v,
                to: w,
            });
            v = w;
        }
    }
}

/// Visits every permutation of `items[1..]` (Heap's algorithm).
fn for_each_rotation_free_order(items: &mut [usize], mut visit: impl FnMut(&[usize])) {
    let rest = items.len().saturating_sub(1);
    let mut counters = vec![0usize; rest];
    visit(items);
    let mut i = 1;
    while i < rest {
        if counters[i] < i {
            let j = if i % 2 == 0 { 0 } else { counters[i] };
            items.swap(1 + j, 1 + i);
            visit(items);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Optimal tour by trying every cyclic order of request traversals, joining
/// consecutive requests by shortest paths. Each request is traversed exactly
/// its demand many times and edges are unconstrained, so shortest-path
/// transfers are optimal for a fixed order.
pub fn brute_force_tour(instance: &Instance) -> Result<OracleResult<Tour>, OracleError> {
    let total = instance.total_demand();
    if total > MAX_ORACLE_DEMAND {
        return Err(OracleError::TooLarge {
            what: "total demand",
            size: total as u64,
            limit: MAX_ORACLE_DEMAND as u64,
        });
    }
    if total == 0 {
        return Ok(OracleResult {
            cost: 0,
            witness: Tour::default(),
            nodes_explored: 0,
        });
    }
    let graph = instance.graph();
    let requests = instance.requests();
    let apsp = floyd_warshall(graph);
    let mut copies: Vec<usize> = requests
        .iter()
        .enumerate()
        .flat_map(|(a, r)| std::iter::repeat_n(a, r.demand as usize))
        .collect();

    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut explored = 0u64;
    for_each_rotation_free_order(&mut copies, |order| {
        explored += 1;
        let mut cost = 0;
        for (i, &a) in order.iter().enumerate() {
            let next = order[(i + 1) % order.len()];
            cost += requests[a].cost + apsp.dist[requests[a].target][requests[next].source];
        }
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, order.to_vec()));
        }
    });
    let (cost, order) = best.expect("at least one order");

    let mut steps = Vec::new();
    for (i, &a) in order.iter().enumerate() {
        let req = &requests[a];
        steps.push(Step {
            kind: StepKind::Request,
            id: a,
            from: req.source,
            to: req.target,
        });
        let next = &requests[order[(i + 1) % order.len()]];
        apsp.walk(graph, req.target, next.source, &mut steps);
    }
    Ok(OracleResult {
        cost,
        witness: Tour { steps, cost },
        nodes_explored: explored,
    })
}

fn odometer(r: usize, bound: i64, mut visit: impl FnMut(&[i64])) {
    let mut lambda = vec![-bound; r];
    loop {
        visit(&lambda);
        let mut i = 0;
        loop {
            if i == r {
                return;
            }
            if lambda[i] < bound {
                lambda[i] += 1;
                break;
            }
            lambda[i] = -bound;
            i += 1;
        }
    }
}

/// Minimum-cost feasible circulation by scanning integer coefficient boxes
/// `[-D, D]^r` around the tree-routed circulation, doubling `D` until the
/// minimizer is interior. The cost is convex in the coefficients, so an
/// interior box minimum is global.
pub fn brute_force_circulation(
    instance: &Instance,
    basis: &CycleBasis,
) -> Result<OracleResult<Circulation>, OracleError> {
    let r = basis.rank();
    if r > MAX_ORACLE_RANK {
        return Err(OracleError::TooLarge {
            what: "cycle rank",
            size: r as u64,
            limit: MAX_ORACLE_RANK as u64,
        });
    }
    let start = initial_circulation(instance, basis);
    let mut bound = instance.total_demand().max(1);
    let mut explored = 0u64;
    loop {
        // ties prefer the coefficient vector closest to the origin, so a flat
        // direction cannot push the minimizer to the boundary forever
        let mut best: Option<(Cost, i64, Vec<i64>)> = None;
        odometer(r, bound, |lambda| {
            explored += 1;
            let mut g = start.clone();
            for (e, x) in basis.combine(lambda).into_iter().enumerate() {
                g.edge_flow[e] += x;
            }
            let key = (
                circulation_cost(instance, &g),
                lambda.iter().map(|x| x.abs()).max().unwrap_or(0),
            );
            if best.as_ref().is_none_or(|(c, norm, _)| key < (*c, *norm)) {
                best = Some((key.0, key.1, lambda.to_vec()));
            }
        });
        let (cost, _, lambda) = best.expect("box is nonempty");
        if lambda.iter().any(|x| x.abs() == bound) {
            bound *= 2;
            continue;
        }
        let mut witness = start;
        for (e, x) in basis.combine(&lambda).into_iter().enumerate() {
            witness.edge_flow[e] += x;
        }
        return Ok(OracleResult {
            cost,
            witness,
            nodes_explored: explored,
        });
    }
}

/// Minimum Steiner tree by Prim's algorithm on every terminal-plus-subset
/// induced subgraph. The witness lists indices into `edges`.
pub fn brute_force_steiner(
    vertex_count: usize,
    terminals: &[usize],
    edges: &[(usize, usize, Cost)],
) -> Result<OracleResult<Vec<usize>>, OracleError> {
    if vertex_count > MAX_ORACLE_STEINER_VERTICES {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            size: vertex_count as u64,
            limit: MAX_ORACLE_STEINER_VERTICES as u64,
        });
    }
    let is_terminal: Vec<bool> = (0..vertex_count).map(|v| terminals.contains(&v)).collect();
    if terminals.len() <= 1 {
        return Ok(OracleResult {
            cost: 0,
            witness: Vec::new(),
            nodes_explored: 0,
        });
    }
    // cheapest edge index between each vertex pair
    let mut link: Vec<Vec<Option<usize>>> = vec![vec![None; vertex_count]; vertex_count];
    for (i, &(a, b, w)) in edges.iter().enumerate() {
        if a == b {
            continue;
        }
        if link[a][b].is_none_or(|j| w < edges[j].2) {
            link[a][b] = Some(i);
            link[b][a] = Some(i);
        }
    }
    let others: Vec<usize> = (0..vertex_count).filter(|&v| !is_terminal[v]).collect();
    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut explored = 0u64;
    for mask in 0u32..(1u32 << others.len()) {
        explored += 1;
        let mut member = is_terminal.clone();
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                member[v] = true;
            }
        }
        let chosen: Vec<usize> = (0..vertex_count).filter(|&v| member[v]).collect();
        let mut in_tree = vec![false; vertex_count];
        let mut key: Vec<Option<(Cost, usize)>> = vec![None; vertex_count];
        in_tree[chosen[0]] = true;
        let mut last = chosen[0];
        let mut total = 0;
        let mut tree_edges = Vec::new();
        let mut ok = true;
        for _ in 1..chosen.len() {
            for &v in &chosen {
                if let Some(i) = link[last][v] {
                    if !in_tree[v] && key[v].is_none_or(|(w, _)| edges[i].2 < w) {
                        key[v] = Some((edges[i].2, i));
                    }
                }
            }
            let pick = chosen
                .iter()
                .copied()
                .filter(|&v| !in_tree[v] && key[v].is_some())
                .min_by_key(|&v| key[v].unwrap().0);
            match pick {
                Some(v) => {
                    let (w, i) = key[v].unwrap();
                    in_tree[v] = true;
                    total += w;
                    tree_edges.push(i);
                    last = v;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && best.as_ref().is_none_or(|(c, _)| total < *c) {
            best = Some((total, tree_edges));
        }
    }
    let (cost, mut witness) = best.ok_or(OracleError::InvalidParameters("terminals not connectable"))?;
    witness.sort_unstable();
    Ok(OracleResult {
        cost,
        witness,
        nodes_explored: explored,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourCheck {
    pub valid: bool,
    pub reason: Option<String>,
    pub cost: Cost,
    /// Signed edge traversal counts and arc traversal counts.
    pub class: Circulation,
}

/// Independently checks a tour: steps exist and match their endpoints, the
/// walk chains and closes, every request is traversed exactly its demand
/// many times, and the recorded cost is right.
pub fn verify_tour(instance: &Instance, tour: &Tour) -> TourCheck {
    let graph = instance.graph();
    let requests = instance.requests();
    let mut class = Circulation::for_instance(instance);
    let mut cost = 0;
    let mut problems = Vec::new();

    for (i, step) in tour.steps.iter().enumerate() {
        match step.kind {
            StepKind::Edge => match graph.edges().get(step.id) {
                Some(e) if (step.from, step.to) == (e.tail, e.head) => {
                    class.edge_flow[step.id] += 1;
                    cost += e.cost;
                }
                Some(e) if (step.from, step.to) == (e.head, e.tail) => {
                    class.edge_flow[step.id] -= 1;
                    cost += e.cost;
                }
                _ => problems.push(format!("step {i}: no edge {} joins {} and {}", step.id, step.from, step.to)),
            },
            StepKind::Request => match requests.get(step.id) {
                Some(r) if (step.from, step.to) == (r.source, r.target) => {
                    class.arc_flow[step.id] += 1;
                    cost += r.cost;
                }
                _ => problems.push(format!("step {i}: request {} does not run {} to {}", step.id, step.from, step.to)),
            },
        }
        let next = &tour.steps[(i + 1) % tour.steps.len()];
        if step.to != next.from {
            problems.push(format!("step {i} ends at {} but the next step starts at {}", step.to, next.from));
        }
    }
    for (a, (r, &x)) in requests.iter().zip(&class.arc_flow).enumerate() {
        if x != r.demand {
            problems.push(format!("request {a} traversed {x} times, demand {}", r.demand));
        }
    }
    if cost != tour.cost {
        problems.push(format!("recorded cost {} but steps cost {cost}", tour.cost));
    }
    TourCheck {
        valid: problems.is_empty(),
        reason: (!problems.is_empty()).then(|| problems.join("; ")),
        cost,
        class,
    }
}

/// Theta graph with `r + 1` strands of two unit edges between `u = 0` and
/// `w = 1` (strand `j` passes through vertex `j + 2`), and the circulation
/// sending one unit out along each strand `1..=r` and returning all of them
/// along strand 0. That circulation is elementary and carries `r` on strand 0.
pub fn make_tight_instance(r: usize) -> (BaseGraph, Circulation) {
    assert!(r >= 1, "tight family starts at rank 1");
    let strands = r + 1;
    let edges = (0..strands).flat_map(|j| [(0, j + 2, 1), (1, j + 2, 1)]);
    let graph = BaseGraph::new(strands + 2, edges).expect("theta graph is simple");
    let mut edge_flow = vec![0; graph.edge_count()];
    for j in 1..strands {
        edge_flow[2 * j] += 1; // u -> midpoint j
        edge_flow[2 * j + 1] -= 1; // midpoint j -> w
        edge_flow[1] += 1; // w -> midpoint 0
        edge_flow[0] -= 1; // midpoint 0 -> u
    }
    (
        graph,
        Circulation {
            edge_flow,
            arc_flow: Vec::new(),
        },
    )
}

/// SplitMix64 finaliser; derives independent per-instance seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    pub n_max: usize,
    pub r_max: usize,
    /// Bound on total demand; distinct requests never exceed it either.
    pub p_max: usize,
    pub cost_max: Cost,
}

impl RandomParams {
    fn check(&self) -> Result<(), OracleError> {
        if self.n_max < 2 {
            return Err(OracleError::InvalidParameters("n_max must be at least 2"));
        }
        if self.cost_max < 1 {
            return Err(OracleError::InvalidParameters("cost_max must be positive"));
        }
        if self.p_max < 1 {
            return Err(OracleError::InvalidParameters("p_max must be positive"));
        }
        Ok(())
    }
}

/// Random connected simple graph: a random recursive tree plus up to `r_max`
/// chords, costs uniform in `[1, cost_max]`.
pub fn random_graph(rng: &mut impl Rng, n_max: usize, r_max: usize, cost_max: Cost) -> BaseGraph {
    let n = rng.gen_range(2..=n_max.max(2));
    let mut edges: BTreeMap<(usize, usize), Cost> = BTreeMap::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v), rng.gen_range(1..=cost_max));
    }
    let room = n * (n - 1) / 2 - (n - 1);
    let chords = rng.gen_range(0..=r_max.min(room));
    while edges.len() < n - 1 + chords {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            let key = (a.min(b), a.max(b));
            edges.entry(key).or_insert_with(|| rng.gen_range(1..=cost_max));
        }
    }
    BaseGraph::new(n, edges.into_iter().map(|((a, b), c)| (a, b, c))).expect("generated graph is simple")
}

/// Deterministic random instance. Request costs are the shortest-path
/// distance or a uniform draw between it and `cost_max`.
pub fn random_instance(seed: u64, params: RandomParams) -> Result<Instance, OracleError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_graph(&mut rng, params.n_max, params.r_max, params.cost_max);
    let n = graph.vertex_count();
    let total = rng.gen_range(1..=params.p_max);
    let mut costs: BTreeMap<(VertexId, VertexId), Cost> = BTreeMap::new();
    let mut requests = Vec::with_capacity(total);
    for _ in 0..total {
        let s = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        let sp = distances_from(&graph, s)[t];
        let fresh = if rng.gen_bool(0.5) {
            sp
        } else {
            rng.gen_range(sp..=sp.max(params.cost_max))
        };
        let cost = *costs.entry((s, t)).or_insert(fresh);
        requests.push(Request::new(s, t, cost));
    }
    Ok(Instance::new(graph, requests).expect("generated instance is valid"))
}
