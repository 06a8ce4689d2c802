//! Top-level solve: min-cost circulation, candidate enumeration within
//! distance `r`, cheapest tour per homology class, minimum over candidates.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circulation::{min_cost_circulation, Instance};
use crate::enumeration::enumerate_candidates;
use crate::graph::{cycle_basis, Cost, GraphError};
use crate::homology_tour::{tour_in_class, Tour, TourError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tour(#[from] TourError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub r: usize,
    pub k: usize,
}

impl Parameters {
    pub fn of(instance: &Instance) -> Self {
        let graph = instance.graph();
        Self {
            n: graph.vertex_count(),
            m: graph.edge_count(),
            p: instance.requests().len(),
            r: graph.edge_count() + 1 - graph.vertex_count(),
            k: graph.branch_vertices().len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub circulation: f64,
    pub enumeration: f64,
    pub tours: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub tour: Tour,
    pub cost: Cost,
    /// Decimal digits of the fixed-point costs (0 for integer instances).
    pub cost_decimals: u32,
    pub parameters: Parameters,
    pub candidates_evaluated: u64,
    pub winning_lambda: Vec<i64>,
    /// Wall-clock milliseconds per phase, only when requested.
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub record_timings: bool,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Exact optimum. Ties between candidates go to the lexicographically
/// smallest coefficient vector.
pub fn solve(instance: &Instance, options: SolveOptions) -> Result<SolveReport, SolveError> {
    let parameters = Parameters::of(instance);
    let mut report = SolveReport {
        tour: Tour::default(),
        cost: 0,
        cost_decimals: instance.cost_decimals,
        parameters,
        candidates_evaluated: 0,
        winning_lambda: Vec::new(),
        timings: None,
    };
    if instance.requests().is_empty() {
        if options.record_timings {
            report.timings = Some(Timings {
                circulation: 0.0,
                enumeration: 0.0,
                tours: 0.0,
            });
        }
        return Ok(report);
    }

    let clock = Instant::now();
    let basis = cycle_basis(instance.graph())?;
    let f = min_cost_circulation(instance, &basis);
    let circulation_time = clock.elapsed();

    let mut enumeration_time = Duration::ZERO;
    let mut tour_time = Duration::ZERO;
    let mut best: Option<(Cost, Vec<i64>, Tour)> = None;
    let mut stream = enumerate_candidates(&f, &basis, basis.rank());
    loop {
        let clock = Instant::now();
        let more = stream.advance();
        enumeration_time += clock.elapsed();
        if !more {
            break;
        }
        let clock = Instant::now();
        let class_tour = tour_in_class(instance, stream.current())?;
        tour_time += clock.elapsed();
        report.candidates_evaluated += 1;
        let cost = class_tour.tour.cost;
        let better = match &best {
            None => true,
            Some((c, lambda, _)) => cost < *c || (cost == *c && stream.lambda() < lambda.as_slice()),
        };
        if better {
            best = Some((cost, stream.lambda().to_vec(), class_tour.tour));
        }
    }

    let (cost, lambda, tour) = best.expect("at least one candidate");
    report.tour = tour;
    report.cost = cost;
    report.winning_lambda = lambda;
    if options.record_timings {
        report.timings = Some(Timings {
            circulation: millis(circulation_time),
            enumeration: millis(enumeration_time),
            tours: millis(tour_time),
        });
    }
    Ok(report)
}
