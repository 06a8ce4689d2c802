//! Requests, instances and integral circulations on the mixed graph.
//!
//! Request arcs are fixed at their demand; base-graph edges are unconstrained
//! and carry signed flow relative to the edge orientation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BaseGraph, CycleBasis, Cost, EdgeId, GraphError, SparseFlow, VertexId};

pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub source: VertexId,
    pub target: VertexId,
    pub cost: Cost,
    pub demand: i64,
}

impl Request {
    pub fn new(source: VertexId, target: VertexId, cost: Cost) -> Self {
        Self {
            source,
            target,
            cost,
            demand: 1,
        }
    }

    pub fn with_demand(mut self, demand: i64) -> Self {
        self.demand = demand;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("request {request} references vertex {vertex} outside the graph")]
    RequestEndpoint { request: ArcId, vertex: VertexId },
    #[error("request {0} starts and ends at the same vertex")]
    RequestLoop(ArcId),
    #[error("request {0} has negative cost")]
    NegativeRequestCost(ArcId),
    #[error("request {0} has non-positive demand")]
    NonPositiveDemand(ArcId),
    #[error("request {request} repeats request {first} with a different cost")]
    ConflictingDuplicate { request: ArcId, first: ArcId },
}

/// Base graph plus requests. Duplicate `(source, target)` requests are merged
/// into one request whose demand is the sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: BaseGraph,
    requests: Vec<Request>,
    /// Costs are fixed-point with this many decimal digits.
    pub cost_decimals: u32,
}

impl Instance {
    pub fn new(
        graph: BaseGraph,
        requests: impl IntoIterator<Item = Request>,
    ) -> Result<Self, InstanceError> {
        if !graph.is_connected() {
            return Err(GraphError::NotConnected.into());
        }
        let mut merged: Vec<Request> = Vec::new();
        let mut first_index: BTreeMap<(VertexId, VertexId), (ArcId, usize)> = BTreeMap::new();
        for (id, req) in requests.into_iter().enumerate() {
            for vertex in [req.source, req.target] {
                if vertex >= graph.vertex_count() {
                    return Err(InstanceError::RequestEndpoint { request: id, vertex });
                }
            }
            if req.source == req.target {
                return Err(InstanceError::RequestLoop(id));
            }
            if req.cost < 0 {
                return Err(InstanceError::NegativeRequestCost(id));
            }
            if req.demand <= 0 {
                return Err(InstanceError::NonPositiveDemand(id));
            }
            match first_index.get(&(req.source, req.target)) {
                Some(&(first, slot)) => {
                    if merged[slot].cost != req.cost {
                        return Err(InstanceError::ConflictingDuplicate { request: id, first });
                    }
                    merged[slot].demand += req.demand;
                }
                None => {
                    first_index.insert((req.source, req.target), (id, merged.len()));
                    merged.push(req);
                }
            }
        }
        Ok(Self {
            graph,
            requests: merged,
            cost_decimals: 0,
        })
    }

    pub fn graph(&self) -> &BaseGraph {
        &self.graph
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn total_demand(&self) -> i64 {
        self.requests.iter().map(|r| r.demand).sum()
    }
}

/// Integral flow on base edges (signed) and request arcs (nonnegative).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Circulation {
    pub edge_flow: Vec<i64>,
    pub arc_flow: Vec<i64>,
}

impl Circulation {
    pub fn zero(edge_count: usize, arc_count: usize) -> Self {
        Self {
            edge_flow: vec![0; edge_count],
            arc_flow: vec![0; arc_count],
        }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::zero(instance.graph().edge_count(), instance.requests().len())
    }

    pub fn add_sparse(&mut self, flow: &SparseFlow, times: i64) {
        for &(e, x) in flow {
            self.edge_flow[e] += times * x;
        }
    }

    /// Largest absolute edge value.
    pub fn edge_norm_inf(&self) -> i64 {
        self.edge_flow.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Edge-wise `self - other`; arcs are ignored.
    pub fn edge_difference(&self, other: &Circulation) -> Vec<i64> {
        self.edge_flow
            .iter()
            .zip(&other.edge_flow)
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn edge_support(&self) -> Vec<EdgeId> {
        (0..self.edge_flow.len())
            .filter(|&e| self.edge_flow[e] != 0)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CirculationError {
    #[error("flow is not conserved at vertex {0}")]
    NotConserving(VertexId),
    #[error("flow vector has {got} entries, graph has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
}

/// Net inflow at every vertex from edges alone.
fn edge_imbalance(graph: &BaseGraph, edge_flow: &[i64]) -> Vec<i64> {
    let mut net = vec![0i64; graph.vertex_count()];
    for (e, &x) in graph.edges().iter().zip(edge_flow) {
        net[e.tail] -= x;
        net[e.head] += x;
    }
    net
}

fn check_edge_circulation(graph: &BaseGraph, edge_flow: &[i64]) -> Result<(), CirculationError> {
    if edge_flow.len() != graph.edge_count() {
        return Err(CirculationError::LengthMismatch {
            expected: graph.edge_count(),
            got: edge_flow.len(),
        });
    }
    match edge_imbalance(graph, edge_flow).iter().position(|&b| b != 0) {
        Some(v) => Err(CirculationError::NotConserving(v)),
        None => Ok(()),
    }
}

/// Conservation at every vertex, counting both edges and request arcs.
pub fn conserves(instance: &Instance, f: &Circulation) -> bool {
    if f.edge_flow.len() != instance.graph().edge_count()
        || f.arc_flow.len() != instance.requests().len()
    {
        return false;
    }
    let mut net = edge_imbalance(instance.graph(), &f.edge_flow);
    for (req, &x) in instance.requests().iter().zip(&f.arc_flow) {
        net[req.source] -= x;
        net[req.target] += x;
    }
    net.iter().all(|&b| b == 0)
}

/// `sum_a f(a) c(a) + sum_e |f(e)| c(e)`.
pub fn circulation_cost(instance: &Instance, f: &Circulation) -> Cost {
    let arcs: Cost = instance
        .requests()
        .iter()
        .zip(&f.arc_flow)
        .map(|(r, &x)| r.cost * x)
        .sum();
    let edges: Cost = instance
        .graph()
        .edges()
        .iter()
        .zip(&f.edge_flow)
        .map(|(e, &x)| e.cost * x.abs())
        .sum();
    arcs + edges
}

pub fn is_feasible(instance: &Instance, f: &Circulation) -> bool {
    conserves(instance, f)
        && instance
            .requests()
            .iter()
            .zip(&f.arc_flow)
            .all(|(r, &x)| x == r.demand)
}

/// Fixes every arc at its demand and routes the return flow from target back
/// to source through the spanning tree.
pub fn initial_circulation(instance: &Instance, basis: &CycleBasis) -> Circulation {
    let mut f = Circulation::for_instance(instance);
    for (a, req) in instance.requests().iter().enumerate() {
        f.arc_flow[a] = req.demand;
        f.add_sparse(&basis.tree_path(req.target, req.source), req.demand);
    }
    f
}

struct ResidualArc {
    from: VertexId,
    to: VertexId,
    edge: EdgeId,
    cost: Cost,
    /// `None` means unbounded.
    capacity: Option<i64>,
}

fn residual_arcs(graph: &BaseGraph, edge_flow: &[i64]) -> Vec<ResidualArc> {
    let mut arcs = Vec::with_capacity(2 * graph.edge_count());
    for (id, (e, &x)) in graph.edges().iter().zip(edge_flow).enumerate() {
        // Moving against the current flow direction first cancels |x| units
        // at cost -c; moving with it (or on a zero edge) costs +c.
        let forward = if x < 0 {
            (-e.cost, Some(-x))
        } else {
            (e.cost, None)
        };
        let backward = if x > 0 {
            (-e.cost, Some(x))
        } else {
            (e.cost, None)
        };
        arcs.push(ResidualArc {
            from: e.tail,
            to: e.head,
            edge: id,
            cost: forward.0,
            capacity: forward.1,
        });
        arcs.push(ResidualArc {
            from: e.head,
            to: e.tail,
            edge: id,
            cost: backward.0,
            capacity: backward.1,
        });
    }
    arcs
}

/// Karp's minimum mean cycle. Returns the arc indices of a cycle whose mean
/// cost is minimum, or `None` if the mean is nonnegative (or no cycle exists).
fn min_mean_negative_cycle(n: usize, arcs: &[ResidualArc]) -> Option<Vec<usize>> {
    if arcs.is_empty() {
        return None;
    }
    // best[k][v]: minimum cost of a walk with exactly k arcs ending at v
    let mut best: Vec<Vec<Option<Cost>>> = vec![vec![None; n]; n + 1];
    let mut pred: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; n + 1];
    best[0].iter_mut().for_each(|d| *d = Some(0));
    for k in 1..=n {
        let (done, rest) = best.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for (i, arc) in arcs.iter().enumerate() {
            if let Some(d) = prev[arc.from] {
                let cand = d + arc.cost;
                if cur[arc.to].is_none_or(|c| cand < c) {
                    cur[arc.to] = Some(cand);
                    pred[k][arc.to] = i;
                }
            }
        }
    }

    // mean values compared as fractions num/den with den > 0
    let mut best_vertex: Option<(VertexId, Cost, i64)> = None;
    for v in 0..n {
        let Some(dn) = best[n][v] else { continue };
        let mut worst: Option<(Cost, i64)> = None;
        for k in 0..n {
            if let Some(dk) = best[k][v] {
                let (num, den) = (dn - dk, (n - k) as i64);
                if worst.is_none_or(|(wn, wd)| (num as i128) * (wd as i128) > (wn as i128) * (den as i128)) {
                    worst = Some((num, den));
                }
            }
        }
        if let Some((num, den)) = worst {
            if best_vertex.is_none_or(|(_, bn, bd)| (num as i128) * (bd as i128) < (bn as i128) * (den as i128)) {
                best_vertex = Some((v, num, den));
            }
        }
    }
    let (v, num, _) = best_vertex?;
    if num >= 0 {
        return None;
    }

    // The n-arc walk ending at v contains a cycle of minimum mean.
    let mut walk_vertices = vec![v];
    let mut walk_arcs = Vec::with_capacity(n);
    let mut at = v;
    for k in (1..=n).rev() {
        let i = pred[k][at];
        walk_arcs.push(i);
        at = arcs[i].from;
        walk_vertices.push(at);
    }
    // walk_arcs[j] runs from walk_vertices[j + 1] to walk_vertices[j]
    let mut last_seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (j, &u) in walk_vertices.iter().enumerate() {
        if let Some(&i) = last_seen.get(&u) {
            let mut cycle: Vec<usize> = walk_arcs[i..j].to_vec();
            cycle.reverse();
            return Some(cycle);
        }
        last_seen.insert(u, j);
    }
    unreachable!("a walk with n arcs repeats a vertex")
}

/// Minimum-cost feasible circulation by minimum-mean cycle canceling on the
/// residual graph of the edges. Request arcs stay fixed at their demand.
pub fn min_cost_circulation(instance: &Instance, basis: &CycleBasis) -> Circulation {
    let graph = instance.graph();
    let mut f = initial_circulation(instance, basis);
    while let Some(cycle) = {
        let arcs = residual_arcs(graph, &f.edge_flow);
        min_mean_negative_cycle(graph.vertex_count(), &arcs).map(|c| (c, arcs))
    } {
        let (cycle, arcs) = cycle;
        debug_assert!(cycle.iter().map(|&i| arcs[i].cost).sum::<Cost>() < 0);
        let amount = cycle
            .iter()
            .filter_map(|&i| arcs[i].capacity)
            .min()
            .expect("a negative cycle uses a cancelling arc");
        for &i in &cycle {
            let arc = &arcs[i];
            f.edge_flow[arc.edge] += amount * graph.edge(arc.edge).direction_from(arc.from);
        }
    }
    f
}

/// One term of a flow decomposition: `multiplier * cycle`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTerm {
    pub multiplier: i64,
    /// Signed unit cycle flow, every nonzero entry agreeing in sign with the
    /// decomposed flow.
    pub cycle: SparseFlow,
}

/// Splits an edge circulation into sign-consistent unit cycles with positive
/// multipliers. At most `m - n + 1` terms are produced.
pub fn decompose(graph: &BaseGraph, edge_flow: &[i64]) -> Result<Vec<CycleTerm>, CirculationError> {
    check_edge_circulation(graph, edge_flow)?;
    let mut remaining: Vec<i64> = edge_flow.iter().map(|x| x.abs()).collect();
    // arcs leaving each vertex once negative edges are reversed
    let mut out: Vec<Vec<(EdgeId, VertexId)>> = vec![Vec::new(); graph.vertex_count()];
    for (id, (e, &x)) in graph.edges().iter().zip(edge_flow).enumerate() {
        match x.signum() {
            1 => out[e.tail].push((id, e.head)),
            -1 => out[e.head].push((id, e.tail)),
            _ => {}
        }
    }
    let mut cursor = vec![0usize; graph.vertex_count()];
    let mut terms = Vec::new();
    let mut scan = 0;
    loop {
        while scan < remaining.len() && remaining[scan] == 0 {
            scan += 1;
        }
        if scan == remaining.len() {
            break;
        }
        let e = graph.edge(scan);
        let start = if edge_flow[scan] > 0 { e.tail } else { e.head };

        let mut position: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut trail: Vec<EdgeId> = Vec::new();
        let mut v = start;
        let cycle = loop {
            if let Some(&p) = position.get(&v) {
                break trail[p..].to_vec();
            }
            position.insert(v, trail.len());
            while remaining[out[v][cursor[v]].0] == 0 {
                cursor[v] += 1;
            }
            let (id, w) = out[v][cursor[v]];
            trail.push(id);
            v = w;
        };
        let multiplier = cycle.iter().map(|&id| remaining[id]).min().unwrap();
        let mut flow: SparseFlow = cycle
            .iter()
            .map(|&id| (id, edge_flow[id].signum()))
            .collect();
        flow.sort_unstable();
        for &id in &cycle {
            remaining[id] -= multiplier;
        }
        terms.push(CycleTerm {
            multiplier,
            cycle: flow,
        });
    }
    Ok(terms)
}

/// True iff the flow contains no cycle flow of value two: the edges with
/// `|f(e)| >= 2`, directed by the sign of `f(e)`, form no directed cycle.
pub fn is_elementary(graph: &BaseGraph, edge_flow: &[i64]) -> bool {
    let n = graph.vertex_count();
    let mut out: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (e, &x) in graph.edges().iter().zip(edge_flow) {
        if x.abs() >= 2 {
            let (from, to) = if x > 0 { (e.tail, e.head) } else { (e.head, e.tail) };
            out[from].push(to);
            indegree[to] += 1;
        }
    }
    let mut ready: Vec<VertexId> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    removed == n
}
