//! Undirected base graph, its cycle space, and topology analysis.
//!
//! Every edge carries a fixed forward orientation from its lower-numbered
//! endpoint to its higher-numbered endpoint. Signed edge values throughout
//! the crate (circulations, cycles, tree paths) are relative to it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSets;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Cost = i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge {edge} references vertex {vertex} outside 0..{vertex_count}")]
    VertexOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        vertex_count: usize,
    },
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge {edge} duplicates edge {first}")]
    ParallelEdge { edge: EdgeId, first: EdgeId },
    #[error("edge {0} has negative cost")]
    NegativeCost(EdgeId),
    #[error("graph not connected")]
    NotConnected,
    #[error("edge set is not a spanning tree: {0}")]
    NotSpanningTree(&'static str),
}

/// An undirected edge stored in forward orientation (`tail < head`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: Cost,
}

impl Edge {
    /// +1 when leaving `from` moves along the forward orientation, else -1.
    pub fn direction_from(&self, from: VertexId) -> i64 {
        if from == self.tail {
            1
        } else {
            debug_assert_eq!(from, self.head);
            -1
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.tail {
            self.head
        } else {
            self.tail
        }
    }
}

/// Simple undirected graph with nonnegative integer edge costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl BaseGraph {
    /// Builds a simple graph. Endpoint order in `edges` does not matter; each
    /// edge is reoriented so that its forward direction is low id to high id.
    /// Connectivity is not required here; see [`BaseGraph::is_connected`].
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Cost)>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut stored = Vec::new();
        let mut seen: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
        for (id, (u, v, cost)) in edges.into_iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        edge: id,
                        vertex,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(id));
            }
            if cost < 0 {
                return Err(GraphError::NegativeCost(id));
            }
            let key = (u.min(v), u.max(v));
            if let Some(&first) = seen.get(&key) {
                return Err(GraphError::ParallelEdge { edge: id, first });
            }
            seen.insert(key, id);
            stored.push(Edge {
                tail: key.0,
                head: key.1,
                cost,
            });
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, e) in stored.iter().enumerate() {
            adjacency[e.tail].push((e.head, id));
            adjacency[e.head].push((e.tail, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            edges: stored,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Neighbors of `v` with the connecting edge, in ascending neighbor order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.vertex_count
    }

    fn require_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::NotConnected)
        }
    }

    /// Vertices of degree at least three.
    pub fn branch_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count)
            .filter(|&v| self.degree(v) >= 3)
            .collect()
    }
}

/// `m - n + 1` for a connected graph.
pub fn cycle_rank(graph: &BaseGraph) -> Result<usize, GraphError> {
    graph.require_connected()?;
    Ok(graph.edge_count() + 1 - graph.vertex_count())
}

/// BFS tree rooted at vertex 0, scanning neighbors in ascending id order.
/// Returns the tree edge ids in ascending order.
pub fn spanning_tree(graph: &BaseGraph) -> Result<Vec<EdgeId>, GraphError> {
    graph.require_connected()?;
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut tree = Vec::with_capacity(graph.vertex_count() - 1);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                tree.push(e);
                queue.push_back(w);
            }
        }
    }
    tree.sort_unstable();
    Ok(tree)
}

/// Sparse signed edge values, sorted by edge id, each entry nonzero.
pub type SparseFlow = Vec<(EdgeId, i64)>;

/// Spanning tree plus the fundamental cycle of every non-tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    edge_count: usize,
    tree_edges: Vec<EdgeId>,
    non_tree_edges: Vec<EdgeId>,
    cycles: Vec<SparseFlow>,
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<usize>,
    edges: Vec<Edge>,
}

impl CycleBasis {
    pub fn rank(&self) -> usize {
        self.non_tree_edges.len()
    }

    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree_edges
    }

    pub fn non_tree_edges(&self) -> &[EdgeId] {
        &self.non_tree_edges
    }

    pub fn cycles(&self) -> &[SparseFlow] {
        &self.cycles
    }

    pub fn cycle(&self, i: usize) -> &SparseFlow {
        &self.cycles[i]
    }

    /// Dense form of cycle `i` over all edge ids.
    pub fn dense_cycle(&self, i: usize) -> Vec<i64> {
        let mut out = vec![0; self.edge_count];
        for &(e, x) in &self.cycles[i] {
            out[e] = x;
        }
        out
    }

    /// Signed unit flow carrying one unit from `from` to `to` through the tree.
    pub fn tree_path(&self, from: VertexId, to: VertexId) -> SparseFlow {
        let (mut a, mut b) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            let (p, e) = self.parent[a].expect("non-root has parent");
            up.push((e, self.edges[e].direction_from(a)));
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let (p, e) = self.parent[b].expect("non-root has parent");
            down.push((e, self.edges[e].direction_from(p)));
            b = p;
        }
        while a != b {
            let (pa, ea) = self.parent[a].expect("non-root has parent");
            up.push((ea, self.edges[ea].direction_from(a)));
            a = pa;
            let (pb, eb) = self.parent[b].expect("non-root has parent");
            down.push((eb, self.edges[eb].direction_from(pb)));
            b = pb;
        }
        up.extend(down);
        up.sort_unstable();
        up
    }

    /// `sum_i lambda[i] * C_i` as a dense edge vector.
    pub fn combine(&self, lambda: &[i64]) -> Vec<i64> {
        assert_eq!(lambda.len(), self.rank());
        let mut out = vec![0; self.edge_count];
        for (cycle, &coef) in self.cycles.iter().zip(lambda) {
            if coef != 0 {
                for &(e, x) in cycle {
                    out[e] += coef * x;
                }
            }
        }
        out
    }

    /// Values of a dense edge vector on the non-tree edges, which are the
    /// basis coordinates of any circulation.
    pub fn coordinates(&self, flow: &[i64]) -> Vec<i64> {
        self.non_tree_edges.iter().map(|&e| flow[e]).collect()
    }
}

/// Fundamental cycles of `graph` with respect to the spanning tree `tree`.
///
/// The cycle for non-tree edge `(u, v)` is +1 on that edge followed by the
/// tree path from `v` back to `u`.
pub fn fundamental_cycles(graph: &BaseGraph, tree: &[EdgeId]) -> Result<CycleBasis, GraphError> {
    let n = graph.vertex_count();
    if tree.len() != n - 1 {
        return Err(GraphError::NotSpanningTree("wrong edge count"));
    }
    let mut in_tree = vec![false; graph.edge_count()];
    for &e in tree {
        if e >= graph.edge_count() {
            return Err(GraphError::NotSpanningTree("unknown edge id"));
        }
        if in_tree[e] {
            return Err(GraphError::NotSpanningTree("repeated edge id"));
        }
        in_tree[e] = true;
    }

    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in graph.neighbors(v) {
            if in_tree[e] && !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                depth[w] = depth[v] + 1;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached != n {
        return Err(GraphError::NotSpanningTree("does not reach every vertex"));
    }

    let mut tree_edges = tree.to_vec();
    tree_edges.sort_unstable();
    let non_tree_edges: Vec<EdgeId> = (0..graph.edge_count()).filter(|&e| !in_tree[e]).collect();
    let mut basis = CycleBasis {
        edge_count: graph.edge_count(),
        tree_edges,
        non_tree_edges,
        cycles: Vec::new(),
        parent,
        depth,
        edges: graph.edges().to_vec(),
    };
    basis.cycles = basis
        .non_tree_edges
        .iter()
        .map(|&e| {
            let edge = graph.edge(e);
            let mut cycle = basis.tree_path(edge.head, edge.tail);
            cycle.push((e, 1));
            cycle.sort_unstable();
            cycle
        })
        .collect();
    Ok(basis)
}

/// Basis with respect to the default BFS spanning tree.
pub fn cycle_basis(graph: &BaseGraph) -> Result<CycleBasis, GraphError> {
    let tree = spanning_tree(graph)?;
    fundamental_cycles(graph, &tree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub cost: Cost,
}

/// Multigraph left after smoothing every degree-2 vertex. Loops and parallel
/// edges are allowed; vertex ids refer to the input graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreMultigraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<CoreEdge>,
}

impl CoreMultigraph {
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Degrees in ascending order; a loop contributes two.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degree: BTreeMap<VertexId, usize> =
            self.vertices.iter().map(|&v| (v, 0)).collect();
        for e in &self.edges {
            *degree.get_mut(&e.a).unwrap() += 1;
            *degree.get_mut(&e.b).unwrap() += 1;
        }
        let mut seq: Vec<usize> = degree.into_values().collect();
        seq.sort_unstable();
        seq
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub cycle_rank: usize,
    pub branch_vertices: Vec<VertexId>,
    pub branch_count: usize,
    pub core: CoreMultigraph,
}

/// Repeatedly replaces a degree-2 vertex and its two edges by one edge of
/// summed cost. A path collapses to one edge, a cycle to one looped vertex.
pub fn smooth_topology(graph: &BaseGraph) -> Result<TopologyReport, GraphError> {
    let cycle_rank = cycle_rank(graph)?;
    let n = graph.vertex_count();

    let mut edges: Vec<Option<CoreEdge>> = graph
        .edges()
        .iter()
        .map(|e| {
            Some(CoreEdge {
                a: e.tail,
                b: e.head,
                cost: e.cost,
            })
        })
        .collect();
    // Incidence lists hold one entry per edge end, so a loop appears twice.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, e) in graph.edges().iter().enumerate() {
        incident[e.tail].push(id);
        incident[e.head].push(id);
    }
    let mut alive = vec![true; n];
    let mut work: Vec<VertexId> = (0..n).rev().collect();

    while let Some(v) = work.pop() {
        if !alive[v] || incident[v].len() != 2 {
            continue;
        }
        let (e1, e2) = (incident[v][0], incident[v][1]);
        if e1 == e2 {
            continue; // lone loop: the whole graph is a cycle
        }
        let x = edges[e1].take().unwrap();
        let y = edges[e2].take().unwrap();
        let a = if x.a == v { x.b } else { x.a };
        let b = if y.a == v { y.b } else { y.a };
        let merged = edges.len();
        edges.push(Some(CoreEdge {
            a: a.min(b),
            b: a.max(b),
            cost: x.cost + y.cost,
        }));
        alive[v] = false;
        incident[v].clear();
        for end in [a, b] {
            let list = &mut incident[end];
            let pos = list.iter().position(|&e| e == e1 || e == e2).unwrap();
            list[pos] = merged;
        }
        work.push(a);
        if b != a {
            work.push(b);
        }
    }

    let core = CoreMultigraph {
        vertices: (0..n).filter(|&v| alive[v]).collect(),
        edges: edges.into_iter().flatten().collect(),
    };
    let branch_vertices = graph.branch_vertices();
    Ok(TopologyReport {
        cycle_rank,
        branch_count: branch_vertices.len(),
        branch_vertices,
        core,
    })
}

/// Minimum-cost path from `source` to `target`. Among minimum-cost paths the
/// lexicographically smallest vertex sequence is returned.
pub fn shortest_path(
    graph: &BaseGraph,
    source: VertexId,
    target: VertexId,
) -> (Cost, Vec<VertexId>) {
    let n = graph.vertex_count();
    // (cost, hops) from every vertex to target
    let mut dist: Vec<Option<(Cost, usize)>> = vec![None; n];
    let mut heap = BinaryHeap::from([Reverse((0, 0, target))]);
    while let Some(Reverse((d, h, v))) = heap.pop() {
        if dist[v].is_some() {
            continue;
        }
        dist[v] = Some((d, h));
        for &(w, e) in graph.neighbors(v) {
            if dist[w].is_none() {
                heap.push(Reverse((d + graph.edge(e).cost, h + 1, w)));
            }
        }
    }
    let (total, _) = dist[source].expect("graph is connected");

    // Greedy walk over the tight-edge DAG. Zero-cost edges only count when they
    // shorten the hop count, which keeps the DAG acyclic.
    let mut path = vec![source];
    let mut v = source;
    while v != target {
        let (dv, hv) = dist[v].unwrap();
        let next = graph
            .neighbors(v)
            .iter()
            .find(|&&(w, e)| {
                let (dw, hw) = dist[w].unwrap();
                let c = graph.edge(e).cost;
                dv == c + dw && (c > 0 || hw < hv)
            })
            .map(|&(w, _)| w)
            .expect("some neighbor continues a shortest path");
        path.push(next);
        v = next;
    }
    (total, path)
}

/// Single-source shortest path costs.
pub fn distances_from(graph: &BaseGraph, source: VertexId) -> Vec<Cost> {
    let mut dist = vec![Cost::MAX; graph.vertex_count()];
    let mut heap = BinaryHeap::from([Reverse((0, source))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v] != Cost::MAX {
            continue;
        }
        dist[v] = d;
        for &(w, e) in graph.neighbors(v) {
            if dist[w] == Cost::MAX {
                heap.push(Reverse((d + graph.edge(e).cost, w)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeComponents {
    /// Each component sorted; components ordered by smallest vertex.
    pub components: Vec<Vec<VertexId>>,
    pub untouched: Vec<VertexId>,
}

/// Connected components of the subgraph formed by `subset`.
pub fn edge_components(graph: &BaseGraph, subset: &[EdgeId]) -> EdgeComponents {
    let n = graph.vertex_count();
    let mut sets = DisjointSets::new(n);
    let mut touched = vec![false; n];
    for &e in subset {
        let edge = graph.edge(e);
        touched[edge.tail] = true;
        touched[edge.head] = true;
        sets.union(edge.tail, edge.head);
    }
    let mut by_root: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    let mut untouched = Vec::new();
    for v in 0..n {
        if touched[v] {
            by_root.entry(sets.find(v)).or_default().push(v);
        } else {
            untouched.push(v);
        }
    }
    let mut components: Vec<Vec<VertexId>> = by_root.into_values().collect();
    components.sort_by_key(|c| c[0]);
    EdgeComponents {
        components,
        untouched,
    }
}
