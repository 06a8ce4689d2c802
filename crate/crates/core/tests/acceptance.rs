//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Seed defaults to 2024 and can be overridden with `SCP_SEED`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scp_core::acceptance::{run_acceptance, AcceptanceSummary};
use scp_core::circulation::{decompose, is_elementary, Circulation, Instance, Request};
use scp_core::enumeration::enumerate_candidates;
use scp_core::graph::{cycle_basis, BaseGraph, Cost};
use scp_core::homology_tour::{min_steiner_tree, steiner_preprocess, ContractedGraph};
use scp_core::io::{emit_report, ReportFormat};
use scp_core::oracle::{
    brute_force_steiner, brute_force_tour, derive_seed, make_tight_instance, random_graph, random_instance,
    RandomParams,
};
use scp_core::solver::{solve, SolveOptions};

const ORACLE_INSTANCES: usize = 500;
const TIME_LIMIT: Duration = Duration::from_secs(60);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn property_line(summary: &AcceptanceSummary, name: &str) -> Outcome {
    let p = summary.property(name).expect("known property");
    match &p.first_message {
        None if p.oracle_class_only_fails.is_empty() => outcome(true, format!("{}/{} instances", p.checked, p.checked)),
        None => outcome(
            true,
            format!(
                "{}/{} instances; {} would fail if judged on the oracle tour's class alone: seeds {:?}",
                p.checked,
                p.checked,
                p.oracle_class_only_fails.len(),
                p.oracle_class_only_fails
            ),
        ),
        Some(msg) => outcome(
            false,
            format!("{} of {} instances fail; first {msg}; seeds {:?}", p.failures.len(), p.checked, p.failures),
        ),
    }
}

fn oracle_equivalence(summary: &AcceptanceSummary, elapsed: Duration) -> Outcome {
    let base = property_line(summary, "oracle-equality");
    let valid = property_line(summary, "tour-valid");
    let count = property_line(summary, "candidate-count");
    let in_time = elapsed < TIME_LIMIT;
    outcome(
        base.passed && valid.passed && count.passed && in_time,
        format!(
            "cost {}; tours {}; candidates {}; {:.1}s",
            base.detail,
            valid.detail,
            count.detail,
            elapsed.as_secs_f64()
        ),
    )
}

/// All edge flows in `[-k, k]^m` that conserve at every vertex, built edge by
/// edge with pruning once a vertex has all its edges fixed.
fn bounded_circulations(graph: &BaseGraph, k: i64) -> Vec<Vec<i64>> {
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let mut last_edge = vec![0usize; n];
    for (id, e) in graph.edges().iter().enumerate() {
        last_edge[e.tail] = last_edge[e.tail].max(id);
        last_edge[e.head] = last_edge[e.head].max(id);
    }
    let mut out = Vec::new();
    let mut flow = vec![0i64; m];
    let mut excess = vec![0i64; n];

    fn go(
        graph: &BaseGraph,
        k: i64,
        j: usize,
        last_edge: &[usize],
        flow: &mut Vec<i64>,
        excess: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if j == flow.len() {
            out.push(flow.clone());
            return;
        }
        let e = graph.edge(j);
        for x in -k..=k {
            flow[j] = x;
            excess[e.tail] -= x;
            excess[e.head] += x;
            let closed = |v: usize| last_edge[v] != j || excess[v] == 0;
            if closed(e.tail) && closed(e.head) {
                go(graph, k, j + 1, last_edge, flow, excess, out);
            }
            excess[e.tail] += x;
            excess[e.head] -= x;
        }
        flow[j] = 0;
    }
    go(graph, k, 0, &last_edge, &mut flow, &mut excess, &mut out);
    out
}

fn counting_bound(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    let mut problems = Vec::new();
    let mut graphs = 0;
    while graphs < 50 {
        let graph = random_graph(&mut rng, 6, 3, 9);
        let basis = cycle_basis(&graph).unwrap();
        let r = basis.rank();
        if r == 0 {
            continue;
        }
        graphs += 1;
        // an arbitrary starting circulation: a random mix of basis cycles
        let lambda0: Vec<i64> = (0..r).map(|_| rng.gen_range(-2..=2)).collect();
        let f = Circulation {
            edge_flow: basis.combine(&lambda0),
            arc_flow: Vec::new(),
        };
        for k in 1..=3usize {
            let stream: Vec<Vec<i64>> = enumerate_candidates(&f, &basis, k).map(|c| c.circulation.edge_flow).collect();
            let expected = (2 * k + 1).pow(r as u32);
            let distinct: BTreeSet<&Vec<i64>> = stream.iter().collect();
            if stream.len() != expected || distinct.len() != expected {
                problems.push(format!("graph {graphs} k {k}: {} emitted, {} distinct", stream.len(), distinct.len()));
            }
            let single_steps = stream.windows(2).all(|w| {
                let diff: Vec<i64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
                (0..r).any(|i| {
                    let c = basis.dense_cycle(i);
                    diff == c || diff.iter().zip(&c).all(|(d, c)| *d == -c)
                })
            });
            if !single_steps {
                problems.push(format!("graph {graphs} k {k}: a step is not one fundamental cycle"));
            }
            for delta in bounded_circulations(&graph, k as i64) {
                let g: Vec<i64> = f.edge_flow.iter().zip(&delta).map(|(a, b)| a + b).collect();
                if !distinct.contains(&g) {
                    problems.push(format!("graph {graphs} k {k}: circulation {g:?} missing"));
                    break;
                }
            }
        }
    }
    outcome(problems.is_empty(), problems.first().cloned().unwrap_or_else(|| format!("{graphs} graphs, k = 1..3")))
}

fn flow_decomposition(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 4));
    let mut problems = Vec::new();
    let mut max_terms = 0;
    for i in 0..200 {
        let graph = random_graph(&mut rng, 10, 5, 9);
        let basis = cycle_basis(&graph).unwrap();
        let r = basis.rank();
        let lambda: Vec<i64> = (0..r).map(|_| rng.gen_range(-4..=4)).collect();
        let flow = basis.combine(&lambda);
        let terms = match decompose(&graph, &flow) {
            Ok(t) => t,
            Err(e) => {
                problems.push(format!("circulation {i}: {e}"));
                continue;
            }
        };
        max_terms = max_terms.max(terms.len());
        let mut sum = vec![0; flow.len()];
        for t in &terms {
            for &(e, x) in &t.cycle {
                sum[e] += t.multiplier * x;
                if x != flow[e].signum() {
                    problems.push(format!("circulation {i}: term against the flow on edge {e}"));
                }
            }
        }
        if terms.len() > r || sum != flow || terms.iter().any(|t| t.multiplier <= 0) {
            problems.push(format!("circulation {i}: {} terms for rank {r}, sum matches {}", terms.len(), sum == flow));
        }
    }
    outcome(
        problems.is_empty(),
        problems.first().cloned().unwrap_or_else(|| format!("200 circulations, at most {max_terms} terms")),
    )
}

fn tightness() -> Outcome {
    let mut problems = Vec::new();
    for r in 1..=6 {
        let (graph, f) = make_tight_instance(r);
        let norm = f.edge_flow.iter().map(|x| x.abs()).max().unwrap_or(0);
        if !is_elementary(&graph, &f.edge_flow) || norm != r as i64 || graph.edge_count() + 1 - graph.vertex_count() != r {
            problems.push(format!("rank {r}: norm {norm}"));
        }
    }
    outcome(problems.is_empty(), problems.first().cloned().unwrap_or_else(|| "r = 1..6".into()))
}

fn random_on(graph: BaseGraph, rng: &mut ChaCha8Rng) -> Instance {
    let n = graph.vertex_count();
    let p = rng.gen_range(1..=5);
    let mut requests: Vec<Request> = Vec::new();
    while requests.len() < p {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s != t && !requests.iter().any(|q| (q.source, q.target) == (s, t)) {
            requests.push(Request::new(s, t, rng.gen_range(1..=20)));
        }
    }
    Instance::new(graph, requests).unwrap()
}

fn specialization(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 7));
    let mut problems = Vec::new();
    for (family, expected) in [("path", 1u64), ("cycle", 3)] {
        for i in 0..50 {
            let n = rng.gen_range(3..=10);
            let mut edges: Vec<(usize, usize, Cost)> = (0..n - 1).map(|v| (v, v + 1, rng.gen_range(1..=20))).collect();
            if family == "cycle" {
                edges.push((0, n - 1, rng.gen_range(1..=20)));
            }
            let inst = random_on(BaseGraph::new(n, edges).unwrap(), &mut rng);
            let report = solve(&inst, SolveOptions::default()).unwrap();
            let oracle = brute_force_tour(&inst).unwrap();
            if report.candidates_evaluated != expected || report.cost != oracle.cost {
                problems.push(format!(
                    "{family} {i}: {} candidates, cost {} vs oracle {}",
                    report.candidates_evaluated, report.cost, oracle.cost
                ));
            }
        }
    }
    outcome(problems.is_empty(), problems.first().cloned().unwrap_or_else(|| "50 paths, 50 cycles".into()))
}

fn steiner_exactness(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 8));
    let mut problems = Vec::new();
    let mut checked = 0;
    while checked < 200 {
        let graph = random_graph(&mut rng, 12, 10, 20);
        let n = graph.vertex_count();
        if n < 2 {
            continue;
        }
        checked += 1;
        let want = rng.gen_range(2..=5.min(n));
        let mut terminals = BTreeSet::new();
        while terminals.len() < want {
            terminals.insert(rng.gen_range(0..n));
        }
        let terminals: Vec<usize> = terminals.into_iter().collect();
        let edges: Vec<(usize, usize, Cost)> = graph.edges().iter().map(|e| (e.tail, e.head, e.cost)).collect();
        let fast = min_steiner_tree(&steiner_preprocess(&ContractedGraph::from_weighted(n, &terminals, &edges)));
        let slow = brute_force_steiner(n, &terminals, &edges);
        match (fast, slow) {
            (Ok(a), Ok(b)) if a.weight == b.cost => {}
            (a, b) => problems.push(format!("graph {checked}: {a:?} vs {b:?}")),
        }
    }
    outcome(problems.is_empty(), problems.first().cloned().unwrap_or_else(|| format!("{checked} graphs")))
}

fn determinism(seed: u64) -> Outcome {
    let params = RandomParams {
        n_max: 10,
        r_max: 4,
        p_max: 6,
        cost_max: 20,
    };
    let mut differing = 0;
    for i in 0..50 {
        let s = derive_seed(seed, 9_000 + i);
        let emit = || {
            let inst = random_instance(s, params).unwrap();
            emit_report(&solve(&inst, SolveOptions::default()).unwrap(), ReportFormat::Json)
        };
        if emit() != emit() {
            differing += 1;
        }
    }
    let a = run_acceptance(seed, 5);
    let b = run_acceptance(seed, 5);
    let same_summary = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();
    outcome(
        differing == 0 && same_summary,
        format!("{differing} of 50 reports differ; acceptance summaries identical: {same_summary}"),
    )
}

fn main() -> ExitCode {
    let seed = std::env::var("SCP_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024u64);
    println!("acceptance seed {seed}");

    let clock = Instant::now();
    let summary = run_acceptance(seed, ORACLE_INSTANCES);
    let elapsed = clock.elapsed();

    let results = [
        ("oracle optimality equivalence", oracle_equivalence(&summary, elapsed)),
        ("proximity", property_line(&summary, "proximity")),
        ("candidate counting bound", counting_bound(seed)),
        ("flow decomposition", flow_decomposition(seed)),
        ("tight family", tightness()),
        ("relaxation bound", property_line(&summary, "relaxation")),
        ("path and cycle specialization", specialization(seed)),
        ("steiner exactness", steiner_exactness(seed)),
        ("determinism", determinism(seed)),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!("criterion {} {name}: {} ({})", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
