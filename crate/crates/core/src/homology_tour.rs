//! Cheapest tour inside the homology class of a feasible circulation.
//!
//! Every component of the circulation's support is contracted to a terminal.
//! Edges outside the support that the tour needs are walked once in each
//! direction, so connecting the terminals is a Steiner tree problem with
//! doubled edge weights. Only branch vertices of the base graph survive
//! preprocessing as Steiner vertices, and those are searched exhaustively.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circulation::{circulation_cost, ArcId, Circulation, Instance};
use crate::dsu::DisjointSets;
use crate::graph::{Cost, EdgeId, VertexId};

/// Largest number of Steiner vertices the subset search accepts.
pub const MAX_STEINER_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TourError {
    #[error("homology class disconnected")]
    HomologyClassDisconnected,
    #[error("{count} Steiner vertices remain after preprocessing, limit is {limit}")]
    TooManySteinerVertices { count: usize, limit: usize },
    #[error("multigraph unbalanced at vertex {0}")]
    Unbalanced(VertexId),
    #[error("multigraph arcs do not form one connected component")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientEdge {
    pub a: usize,
    pub b: usize,
    pub weight: Cost,
    /// Base-graph edge this quotient edge stands for.
    pub edge: EdgeId,
}

/// Base graph with each support component collapsed to one terminal.
/// Terminals are numbered `0..terminal_count`, remaining vertices follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedGraph {
    pub vertex_count: usize,
    pub terminal_count: usize,
    pub edges: Vec<QuotientEdge>,
    /// Base vertex to quotient vertex.
    pub vertex_map: Vec<usize>,
}

impl ContractedGraph {
    /// Steiner input over an arbitrary weighted graph. `terminals` are moved to
    /// the front of the numbering; edge `i` keeps `i` as its original id.
    pub fn from_weighted(
        vertex_count: usize,
        terminals: &[usize],
        edges: &[(usize, usize, Cost)],
    ) -> Self {
        let is_terminal: BTreeSet<usize> = terminals.iter().copied().collect();
        let mut vertex_map = vec![0; vertex_count];
        let mut next = 0;
        for &t in &is_terminal {
            vertex_map[t] = next;
            next += 1;
        }
        for (v, slot) in vertex_map.iter_mut().enumerate() {
            if !is_terminal.contains(&v) {
                *slot = next;
                next += 1;
            }
        }
        let edges = edges
            .iter()
            .enumerate()
            .filter_map(|(id, &(a, b, weight))| {
                let (qa, qb) = (vertex_map[a], vertex_map[b]);
                (qa != qb).then_some(QuotientEdge {
                    a: qa.min(qb),
                    b: qa.max(qb),
                    weight,
                    edge: id,
                })
            })
            .collect();
        Self {
            vertex_count,
            terminal_count: is_terminal.len(),
            edges,
            vertex_map,
        }
    }

    pub fn is_terminal(&self, q: usize) -> bool {
        q < self.terminal_count
    }
}

/// Collapses every connected component of `supp(g)` (edges and arcs alike).
/// Quotient loops are dropped; parallel quotient edges are kept.
pub fn contract_support(instance: &Instance, g: &Circulation) -> ContractedGraph {
    let graph = instance.graph();
    let n = graph.vertex_count();
    let mut sets = DisjointSets::new(n);
    let mut touched = vec![false; n];
    for (e, &x) in graph.edges().iter().zip(&g.edge_flow) {
        if x != 0 {
            touched[e.tail] = true;
            touched[e.head] = true;
            sets.union(e.tail, e.head);
        }
    }
    for (req, &x) in instance.requests().iter().zip(&g.arc_flow) {
        if x != 0 {
            touched[req.source] = true;
            touched[req.target] = true;
            sets.union(req.source, req.target);
        }
    }

    let mut vertex_map = vec![usize::MAX; n];
    let mut root_slot: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        if touched[v] {
            let next = root_slot.len();
            vertex_map[v] = *root_slot.entry(sets.find(v)).or_insert(next);
        }
    }
    let terminal_count = root_slot.len();
    let mut next = terminal_count;
    for v in 0..n {
        if !touched[v] {
            vertex_map[v] = next;
            next += 1;
        }
    }

    let edges = graph
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(id, e)| {
            let (qa, qb) = (vertex_map[e.tail], vertex_map[e.head]);
            (qa != qb).then_some(QuotientEdge {
                a: qa.min(qb),
                b: qa.max(qb),
                weight: 2 * e.cost,
                edge: id,
            })
        })
        .collect();
    ContractedGraph {
        vertex_count: next,
        terminal_count,
        edges,
        vertex_map,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedEdge {
    pub a: usize,
    pub b: usize,
    pub weight: Cost,
    /// Base-graph edges this reduced edge expands to.
    pub expansion: Vec<EdgeId>,
}

/// Steiner graph after dropping low-degree Steiner vertices. Vertex ids are
/// those of the contracted graph; `alive` marks the survivors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    pub terminal_count: usize,
    pub alive: Vec<bool>,
    pub edges: Vec<ReducedEdge>,
}

impl ReducedGraph {
    pub fn terminals(&self) -> Vec<usize> {
        (0..self.terminal_count).collect()
    }

    pub fn steiner_vertices(&self) -> Vec<usize> {
        (self.terminal_count..self.alive.len())
            .filter(|&v| self.alive[v])
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }
}

fn insert_cheapest(edges: &mut BTreeMap<(usize, usize), ReducedEdge>, edge: ReducedEdge) {
    let key = (edge.a, edge.b);
    match edges.get(&key) {
        Some(old) if old.weight <= edge.weight => {}
        _ => {
            edges.insert(key, edge);
        }
    }
}

/// Removes Steiner vertices of degree 0 and 1 and smooths those of degree 2,
/// keeping only the cheapest of any parallel edges, until every remaining
/// Steiner vertex has degree at least 3.
pub fn steiner_preprocess(cg: &ContractedGraph) -> ReducedGraph {
    let mut edges: BTreeMap<(usize, usize), ReducedEdge> = BTreeMap::new();
    for e in &cg.edges {
        insert_cheapest(
            &mut edges,
            ReducedEdge {
                a: e.a,
                b: e.b,
                weight: e.weight,
                expansion: vec![e.edge],
            },
        );
    }
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cg.vertex_count];
    for &(a, b) in edges.keys() {
        neighbors[a].insert(b);
        neighbors[b].insert(a);
    }
    let mut alive = vec![true; cg.vertex_count];
    let mut work: Vec<usize> = (cg.terminal_count..cg.vertex_count).rev().collect();
    let key = |x: usize, y: usize| (x.min(y), x.max(y));

    while let Some(v) = work.pop() {
        if !alive[v] || cg.is_terminal(v) {
            continue;
        }
        match neighbors[v].len() {
            0 => alive[v] = false,
            1 => {
                let w = *neighbors[v].first().unwrap();
                edges.remove(&key(v, w));
                neighbors[w].remove(&v);
                neighbors[v].clear();
                alive[v] = false;
                work.push(w);
            }
            2 => {
                let mut it = neighbors[v].iter();
                let (x, y) = (*it.next().unwrap(), *it.next().unwrap());
                let ex = edges.remove(&key(v, x)).unwrap();
                let ey = edges.remove(&key(v, y)).unwrap();
                neighbors[x].remove(&v);
                neighbors[y].remove(&v);
                neighbors[v].clear();
                alive[v] = false;
                let mut expansion = ex.expansion;
                expansion.extend(ey.expansion);
                expansion.sort_unstable();
                let (a, b) = key(x, y);
                insert_cheapest(
                    &mut edges,
                    ReducedEdge {
                        a,
                        b,
                        weight: ex.weight + ey.weight,
                        expansion,
                    },
                );
                neighbors[x].insert(y);
                neighbors[y].insert(x);
                work.push(x);
                work.push(y);
            }
            _ => {}
        }
    }
    ReducedGraph {
        terminal_count: cg.terminal_count,
        alive,
        edges: edges.into_values().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SteinerSolution {
    /// Base-graph edge ids, ascending.
    pub edges: Vec<EdgeId>,
    /// Total weight in doubled-cost units.
    pub weight: Cost,
}

/// Exact minimum Steiner tree: for every subset of Steiner vertices, take the
/// minimum spanning tree on terminals plus that subset, prune Steiner leaves,
/// and keep the lightest result.
pub fn min_steiner_tree(reduced: &ReducedGraph) -> Result<SteinerSolution, TourError> {
    if reduced.terminal_count <= 1 {
        return Ok(SteinerSolution::default());
    }
    let steiner = reduced.steiner_vertices();
    if steiner.len() > MAX_STEINER_VERTICES {
        return Err(TourError::TooManySteinerVertices {
            count: steiner.len(),
            limit: MAX_STEINER_VERTICES,
        });
    }
    let n = reduced.alive.len();
    let mut order: Vec<usize> = (0..reduced.edges.len()).collect();
    order.sort_by_key(|&i| (reduced.edges[i].weight, reduced.edges[i].a, reduced.edges[i].b));

    let mut best: Option<(Cost, Vec<usize>)> = None;
    let mut included = vec![false; n];
    for mask in 0u64..(1u64 << steiner.len()) {
        included.iter_mut().for_each(|x| *x = false);
        included[..reduced.terminal_count].iter_mut().for_each(|x| *x = true);
        for (bit, &v) in steiner.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                included[v] = true;
            }
        }
        let vertices = reduced.terminal_count + mask.count_ones() as usize;

        let mut sets = DisjointSets::new(n);
        let mut tree = Vec::with_capacity(vertices - 1);
        for &i in &order {
            let e = &reduced.edges[i];
            if included[e.a] && included[e.b] && sets.union(e.a, e.b) {
                tree.push(i);
                if tree.len() == vertices - 1 {
                    break;
                }
            }
        }
        if tree.len() != vertices - 1 {
            continue;
        }

        // Steiner leaves never help; strip them repeatedly.
        let mut degree = vec![0usize; n];
        for &i in &tree {
            degree[reduced.edges[i].a] += 1;
            degree[reduced.edges[i].b] += 1;
        }
        let mut kept = vec![true; tree.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (slot, &i) in tree.iter().enumerate() {
                let e = &reduced.edges[i];
                if !kept[slot] {
                    continue;
                }
                let leaf = [e.a, e.b]
                    .into_iter()
                    .any(|v| v >= reduced.terminal_count && degree[v] == 1);
                if leaf {
                    kept[slot] = false;
                    degree[e.a] -= 1;
                    degree[e.b] -= 1;
                    changed = true;
                }
            }
        }
        let chosen: Vec<usize> = tree
            .iter()
            .zip(&kept)
            .filter_map(|(&i, &k)| k.then_some(i))
            .collect();
        let weight: Cost = chosen.iter().map(|&i| reduced.edges[i].weight).sum();
        if best.as_ref().is_none_or(|(w, _)| weight < *w) {
            best = Some((weight, chosen));
        }
    }

    let (weight, chosen) = best.ok_or(TourError::HomologyClassDisconnected)?;
    let mut edges: Vec<EdgeId> = chosen
        .iter()
        .flat_map(|&i| reduced.edges[i].expansion.iter().copied())
        .collect();
    edges.sort_unstable();
    Ok(SteinerSolution { edges, weight })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Request,
    Edge,
}

/// One traversal: request arc `id` or base edge `id`, walked `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub id: usize,
    pub from: VertexId,
    pub to: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tour {
    pub steps: Vec<Step>,
    pub cost: Cost,
}

impl Tour {
    pub fn start(&self) -> Option<VertexId> {
        self.steps.first().map(|s| s.from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TourArc {
    pub step: Step,
    pub cost: Cost,
}

/// Directed multigraph whose Euler circuit is the tour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerMultigraph {
    pub vertex_count: usize,
    pub arcs: Vec<TourArc>,
}

fn check_euler(mg: &EulerMultigraph) -> Result<(), TourError> {
    let mut balance = vec![0i64; mg.vertex_count];
    let mut sets = DisjointSets::new(mg.vertex_count);
    for arc in &mg.arcs {
        balance[arc.step.from] -= 1;
        balance[arc.step.to] += 1;
        sets.union(arc.step.from, arc.step.to);
    }
    if let Some(v) = balance.iter().position(|&b| b != 0) {
        return Err(TourError::Unbalanced(v));
    }
    let roots: BTreeSet<usize> = mg
        .arcs
        .iter()
        .map(|arc| sets.find(arc.step.from))
        .collect();
    if roots.len() > 1 {
        return Err(TourError::Disconnected);
    }
    Ok(())
}

/// Arcs of the tour: `d(a)` copies of each request, `|g(e)|` copies of each
/// edge in the sign direction of `g(e)`, and both directions of each Steiner
/// edge.
pub fn build_euler_multigraph(
    instance: &Instance,
    g: &Circulation,
    st: &SteinerSolution,
) -> Result<EulerMultigraph, TourError> {
    let graph = instance.graph();
    let mut arcs = Vec::new();
    for (id, (req, &x)) in instance.requests().iter().zip(&g.arc_flow).enumerate() {
        let arc = TourArc {
            step: Step {
                kind: StepKind::Request,
                id,
                from: req.source,
                to: req.target,
            },
            cost: req.cost,
        };
        arcs.extend(std::iter::repeat_n(arc, x as usize));
    }
    let edge_arc = |id: EdgeId, from: VertexId, to: VertexId| TourArc {
        step: Step {
            kind: StepKind::Edge,
            id,
            from,
            to,
        },
        cost: graph.edge(id).cost,
    };
    for (id, (e, &x)) in graph.edges().iter().zip(&g.edge_flow).enumerate() {
        let (from, to) = if x > 0 { (e.tail, e.head) } else { (e.head, e.tail) };
        arcs.extend(std::iter::repeat_n(edge_arc(id, from, to), x.unsigned_abs() as usize));
    }
    for &id in &st.edges {
        let e = graph.edge(id);
        arcs.push(edge_arc(id, e.tail, e.head));
        arcs.push(edge_arc(id, e.head, e.tail));
    }
    let mg = EulerMultigraph {
        vertex_count: graph.vertex_count(),
        arcs,
    };
    check_euler(&mg)?;
    Ok(mg)
}

/// Hierholzer circuit from the lowest vertex with an outgoing arc. At each
/// vertex arcs are taken by ascending target, requests before edges, then id.
pub fn euler_tour(mg: &EulerMultigraph) -> Result<Tour, TourError> {
    check_euler(mg)?;
    let Some(start) = mg.arcs.iter().map(|a| a.step.from).min() else {
        return Ok(Tour::default());
    };
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); mg.vertex_count];
    for (i, arc) in mg.arcs.iter().enumerate() {
        out[arc.step.from].push(i);
    }
    for list in &mut out {
        list.sort_by_key(|&i| {
            let s = mg.arcs[i].step;
            (s.to, s.kind, s.id, i)
        });
    }
    let mut next = vec![0usize; mg.vertex_count];
    let mut stack: Vec<(VertexId, Option<usize>)> = vec![(start, None)];
    let mut circuit = Vec::with_capacity(mg.arcs.len());
    while let Some(&(v, _)) = stack.last() {
        if next[v] < out[v].len() {
            let i = out[v][next[v]];
            next[v] += 1;
            stack.push((mg.arcs[i].step.to, Some(i)));
        } else {
            let (_, via) = stack.pop().unwrap();
            if let Some(i) = via {
                circuit.push(i);
            }
        }
    }
    if circuit.len() != mg.arcs.len() {
        return Err(TourError::Disconnected);
    }
    circuit.reverse();
    Ok(Tour {
        cost: circuit.iter().map(|&i| mg.arcs[i].cost).sum(),
        steps: circuit.into_iter().map(|i| mg.arcs[i].step).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTour {
    pub tour: Tour,
    pub steiner: SteinerSolution,
}

/// Cheapest tour whose signed edge-traversal counts equal `g`.
pub fn tour_in_class(instance: &Instance, g: &Circulation) -> Result<ClassTour, TourError> {
    let contracted = contract_support(instance, g);
    let reduced = steiner_preprocess(&contracted);
    let steiner = min_steiner_tree(&reduced)?;
    let mg = build_euler_multigraph(instance, g, &steiner)?;
    let tour = euler_tour(&mg)?;
    debug_assert_eq!(tour.cost, circulation_cost(instance, g) + steiner.weight);
    Ok(ClassTour { tour, steiner })
}

/// Request ids a tour traverses, in order.
pub fn request_sequence(tour: &Tour) -> Vec<ArcId> {
    tour.steps
        .iter()
        .filter(|s| s.kind == StepKind::Request)
        .map(|s| s.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulation::{initial_circulation, min_cost_circulation, Request};
    use crate::graph::{cycle_basis, fixtures::*, BaseGraph};

    fn two_request_path() -> (Instance, Circulation) {
        let inst = Instance::new(path(4, 1), [Request::new(0, 1, 1), Request::new(2, 3, 1)]).unwrap();
        let g = Circulation {
            edge_flow: vec![-1, 0, -1],
            arc_flow: vec![1, 1],
        };
        (inst, g)
    }

    #[test]
    fn connected_support_has_one_terminal() {
        let inst = Instance::new(path(3, 1), [Request::new(0, 2, 2)]).unwrap();
        let g = initial_circulation(&inst, &cycle_basis(inst.graph()).unwrap());
        let cg = contract_support(&inst, &g);
        assert_eq!(cg.terminal_count, 1);
        assert!(cg.edges.is_empty());
        let st = min_steiner_tree(&steiner_preprocess(&cg)).unwrap();
        assert_eq!(st, SteinerSolution::default());
    }

    #[test]
    fn split_support_contracts_to_two_terminals() {
        let (inst, g) = two_request_path();
        let cg = contract_support(&inst, &g);
        assert_eq!(cg.terminal_count, 2);
        assert_eq!(cg.vertex_count, 2);
        assert_eq!(
            cg.edges,
            vec![QuotientEdge {
                a: 0,
                b: 1,
                weight: 2,
                edge: 1
            }]
        );
    }

    #[test]
    fn theta_with_two_disjoint_request_cycles() {
        // a=0, b=1; strands through 2, 3 and 4. Requests circulate 0->2->0 and 1->4->1
        let g = theta();
        let inst = Instance::new(
            g,
            [Request::new(0, 2, 1), Request::new(4, 1, 1)],
        )
        .unwrap();
        let mut f = Circulation::for_instance(&inst);
        f.arc_flow = vec![1, 1];
        f.edge_flow[0] = -1; // 2 -> 0 on edge (0,2)
        f.edge_flow[5] = 1; // 1 -> 4 on edge (1,4)
        assert!(crate::circulation::is_feasible(&inst, &f));
        let cg = contract_support(&inst, &f);
        assert_eq!(cg.terminal_count, 2);
        // terminal 0 = {0,2}, terminal 1 = {1,4}; vertex 3 is Steiner
        let between: Vec<_> = cg.edges.iter().filter(|e| (e.a, e.b) == (0, 1)).collect();
        assert_eq!(between.len(), 2); // edge 2-1 and edge 0-4
        assert_eq!(cg.edges.len(), 4);
    }

    #[test]
    fn preprocess_without_steiner_vertices_is_identity() {
        let cg = ContractedGraph::from_weighted(3, &[0, 1, 2], &[(0, 1, 2), (1, 2, 3)]);
        let r = steiner_preprocess(&cg);
        assert_eq!(r.edges.len(), 2);
        assert!(r.steiner_vertices().is_empty());
    }

    #[test]
    fn preprocess_smooths_steiner_path() {
        // T0 - s - s - s - T1
        let cg = ContractedGraph::from_weighted(
            5,
            &[0, 4],
            &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 4, 4)],
        );
        let r = steiner_preprocess(&cg);
        assert!(r.steiner_vertices().is_empty());
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].weight, 10);
        assert_eq!(r.edges[0].expansion, vec![0, 1, 2, 3]);
    }

    #[test]
    fn preprocess_drops_steiner_leaf() {
        let cg = ContractedGraph::from_weighted(3, &[0, 1], &[(0, 1, 5), (1, 2, 1)]);
        let r = steiner_preprocess(&cg);
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.steiner_vertices(), Vec::<usize>::new());
    }

    #[test]
    fn preprocess_keeps_cheapest_parallel() {
        // two routes T0-T1: direct 9, and through a Steiner vertex 3+4
        let cg = ContractedGraph::from_weighted(3, &[0, 1], &[(0, 1, 9), (0, 2, 3), (2, 1, 4)]);
        let r = steiner_preprocess(&cg);
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].weight, 7);
        assert_eq!(min_steiner_tree(&r).unwrap().weight, 7);
    }

    #[test]
    fn star_beats_terminal_only_tree() {
        // terminals 0,1,2, centre 3; spokes 2, terminal pairs 4
        let cg = ContractedGraph::from_weighted(
            4,
            &[0, 1, 2],
            &[(0, 3, 2), (1, 3, 2), (2, 3, 2), (0, 1, 4), (1, 2, 4), (0, 2, 4)],
        );
        let r = steiner_preprocess(&cg);
        assert_eq!(r.steiner_vertices(), vec![3]);
        let st = min_steiner_tree(&r).unwrap();
        assert_eq!(st.weight, 6);
        assert_eq!(st.edges, vec![0, 1, 2]);
    }

    #[test]
    fn single_terminal_is_free_and_two_terminals_take_cheapest_link() {
        let cg = ContractedGraph::from_weighted(2, &[0], &[(0, 1, 3)]);
        assert_eq!(min_steiner_tree(&steiner_preprocess(&cg)).unwrap().weight, 0);
        let cg = ContractedGraph::from_weighted(4, &[0, 3], &[(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 5)]);
        assert_eq!(min_steiner_tree(&steiner_preprocess(&cg)).unwrap().weight, 2);
    }

    #[test]
    fn unreachable_terminals_error() {
        let cg = ContractedGraph::from_weighted(3, &[0, 1], &[(0, 2, 1)]);
        assert_eq!(
            min_steiner_tree(&steiner_preprocess(&cg)),
            Err(TourError::HomologyClassDisconnected)
        );
    }

    #[test]
    fn euler_multigraph_examples() {
        let inst = Instance::new(BaseGraph::new(2, [(0, 1, 5)]).unwrap(), [Request::new(0, 1, 5)])
            .unwrap();
        let g = Circulation {
            edge_flow: vec![-1],
            arc_flow: vec![1],
        };
        let mg = build_euler_multigraph(&inst, &g, &SteinerSolution::default()).unwrap();
        assert_eq!(mg.arcs.len(), 2);
        let tour = euler_tour(&mg).unwrap();
        assert_eq!(tour.cost, 10);
        assert_eq!((tour.steps[0].from, tour.steps[0].to), (0, 1));
        assert_eq!((tour.steps[1].from, tour.steps[1].to), (1, 0));

        let empty = Instance::new(path(3, 1), []).unwrap();
        let mg = build_euler_multigraph(&empty, &Circulation::for_instance(&empty), &SteinerSolution::default())
            .unwrap();
        assert!(mg.arcs.is_empty());
        assert_eq!(euler_tour(&mg).unwrap(), Tour::default());

        let (inst, g) = two_request_path();
        let st = SteinerSolution {
            edges: vec![1],
            weight: 2,
        };
        let mg = build_euler_multigraph(&inst, &g, &st).unwrap();
        assert_eq!(mg.arcs.len(), 6);
        assert_eq!(euler_tour(&mg).unwrap().steps.len(), 6);
    }

    #[test]
    fn broken_multigraphs_are_rejected() {
        let (inst, g) = two_request_path();
        assert_eq!(
            build_euler_multigraph(&inst, &g, &SteinerSolution::default()),
            Err(TourError::Disconnected)
        );
        let bad = Circulation {
            edge_flow: vec![0, 0, -1],
            arc_flow: vec![1, 1],
        };
        assert!(matches!(
            build_euler_multigraph(&inst, &bad, &SteinerSolution::default()),
            Err(TourError::Unbalanced(_))
        ));
    }

    #[test]
    fn tour_in_class_examples() {
        let (inst, _) = two_request_path();
        let basis = cycle_basis(inst.graph()).unwrap();
        let g = min_cost_circulation(&inst, &basis);
        let ct = tour_in_class(&inst, &g).unwrap();
        assert_eq!(ct.steiner.edges, vec![1]);
        assert_eq!(ct.tour.cost, 6);
        assert_eq!(ct.tour.start(), Some(0));

        // single request on a tree: c(a) + tree path back
        let inst = Instance::new(BaseGraph::new(4, [(0, 1, 2), (1, 2, 3), (1, 3, 7)]).unwrap(), [Request::new(3, 2, 4)])
            .unwrap();
        let g = initial_circulation(&inst, &cycle_basis(inst.graph()).unwrap());
        assert_eq!(tour_in_class(&inst, &g).unwrap().tour.cost, 4 + 3 + 7);
    }
}
