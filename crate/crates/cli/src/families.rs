//! Benchmark instance families.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scp_core::circulation::{Instance, Request};
use scp_core::graph::{distances_from, BaseGraph, Cost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Cycle,
    /// Three strands of `size` edges between two hubs.
    Theta,
    /// Two rails of `size` vertices joined by vertical aisles.
    GridAisle,
}

fn edges_for(family: Family, size: usize, aisles: usize) -> (usize, Vec<(usize, usize)>) {
    let size = size.max(2);
    match family {
        Family::Path => (size, (0..size - 1).map(|v| (v, v + 1)).collect()),
        Family::Cycle => {
            let n = size.max(3);
            (n, (0..n).map(|v| (v, (v + 1) % n)).collect())
        }
        Family::Theta => {
            // hubs 0 and 1, each strand has size - 1 interior vertices
            let mut n = 2;
            let mut edges = Vec::new();
            for _ in 0..3 {
                let mut prev = 0;
                for _ in 0..size - 1 {
                    edges.push((prev, n));
                    prev = n;
                    n += 1;
                }
                edges.push((prev, 1));
            }
            (n, edges)
        }
        Family::GridAisle => {
            let aisles = aisles.clamp(2, size);
            let mut edges: Vec<(usize, usize)> = (0..size - 1)
                .flat_map(|c| [(c, c + 1), (size + c, size + c + 1)])
                .collect();
            for a in 0..aisles {
                let c = a * (size - 1) / (aisles - 1);
                edges.push((c, size + c));
            }
            (2 * size, edges)
        }
    }
}

/// Deterministic instance: uniform edge costs in `1..=9`, `requests` moves
/// priced at their shortest-path distance.
pub fn build(family: Family, size: usize, aisles: usize, requests: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ size as u64);
    let (n, edges) = edges_for(family, size, aisles);
    let graph = BaseGraph::new(n, edges.into_iter().map(|(u, v)| (u, v, rng.gen_range(1..=9) as Cost)))
        .expect("family graphs are simple");
    let reqs: Vec<Request> = (0..requests)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            Request::new(s, t, distances_from(&graph, s)[t])
        })
        .collect();
    Instance::new(graph, reqs).expect("family instances are valid")
}
