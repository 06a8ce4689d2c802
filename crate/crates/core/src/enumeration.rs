//! Candidate circulations near a given one, visited in reflected mixed-radix
//! Gray order over fundamental-cycle coefficients.

use crate::circulation::Circulation;
use crate::graph::CycleBasis;

/// Coefficients `lambda` in `[-k, k]^r`.
pub type LambdaVector = Vec<i64>;

/// One Gray-code move: coordinate `index` changed by `delta` (always +1 or -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayStep {
    pub index: usize,
    pub delta: i64,
}

/// Reflected Gray code over `[-k, k]^r`, coordinate 0 changing fastest.
/// Starts at all `-k`; every later vector differs from its predecessor in
/// exactly one coordinate by exactly one.
#[derive(Debug, Clone)]
pub struct GrayCode {
    bound: i64,
    current: LambdaVector,
    direction: Vec<i64>,
    started: bool,
    finished: bool,
}

impl GrayCode {
    pub fn new(r: usize, k: usize) -> Self {
        let bound = k as i64;
        Self {
            bound,
            current: vec![-bound; r],
            direction: vec![1; r],
            started: false,
            finished: false,
        }
    }

    pub fn current(&self) -> &[i64] {
        &self.current
    }

    /// Advances and reports the move, `None` once the code is exhausted.
    /// The first call only marks the initial vector as visited.
    pub fn advance(&mut self) -> Option<Option<GrayStep>> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(None);
        }
        let mut j = 0;
        loop {
            if j == self.current.len() {
                self.finished = true;
                return None;
            }
            let next = self.current[j] + self.direction[j];
            if (-self.bound..=self.bound).contains(&next) {
                self.current[j] = next;
                return Some(Some(GrayStep {
                    index: j,
                    delta: self.direction[j],
                }));
            }
            self.direction[j] = -self.direction[j];
            j += 1;
        }
    }
}

impl Iterator for GrayCode {
    type Item = LambdaVector;

    fn next(&mut self) -> Option<LambdaVector> {
        self.advance().map(|_| self.current.clone())
    }
}

/// All `(2k + 1)^r` coefficient vectors in Gray order.
pub fn gray_code_lambdas(r: usize, k: usize) -> GrayCode {
    GrayCode::new(r, k)
}

/// Number of vectors `gray_code_lambdas(r, k)` emits.
pub fn candidate_count(r: usize, k: usize) -> u128 {
    (2 * k as u128 + 1).pow(r as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub lambda: LambdaVector,
    pub circulation: Circulation,
}

/// Streams `f + sum_i lambda_i C_i` for every `lambda` in `[-k, k]^r`, each
/// obtained from the previous one by adding or subtracting one cycle.
pub struct CandidateStream<'a> {
    basis: &'a CycleBasis,
    code: GrayCode,
    current: Circulation,
}

impl<'a> CandidateStream<'a> {
    /// The candidate most recently produced by [`CandidateStream::advance`].
    pub fn current(&self) -> &Circulation {
        &self.current
    }

    pub fn lambda(&self) -> &[i64] {
        self.code.current()
    }

    /// Moves to the next candidate without cloning it; `false` when done.
    pub fn advance(&mut self) -> bool {
        match self.code.advance() {
            None => false,
            Some(None) => true,
            Some(Some(step)) => {
                self.current
                    .add_sparse(self.basis.cycle(step.index), step.delta);
                true
            }
        }
    }
}

impl Iterator for CandidateStream<'_> {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        self.advance().then(|| Candidate {
            lambda: self.code.current().to_vec(),
            circulation: self.current.clone(),
        })
    }
}

pub fn enumerate_candidates<'a>(
    f: &Circulation,
    basis: &'a CycleBasis,
    k: usize,
) -> CandidateStream<'a> {
    let code = GrayCode::new(basis.rank(), k);
    let mut current = f.clone();
    for i in 0..basis.rank() {
        current.add_sparse(basis.cycle(i), -(k as i64));
    }
    CandidateStream {
        basis,
        code,
        current,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::{cycle_basis, fixtures::*};

    #[test]
    fn gray_code_small_cases() {
        assert_eq!(gray_code_lambdas(0, 3).collect::<Vec<_>>(), vec![Vec::<i64>::new()]);
        assert_eq!(
            gray_code_lambdas(1, 1).collect::<Vec<_>>(),
            vec![vec![-1], vec![0], vec![1]]
        );
        assert_eq!(
            gray_code_lambdas(2, 1).collect::<Vec<_>>(),
            vec![
                vec![-1, -1],
                vec![0, -1],
                vec![1, -1],
                vec![1, 0],
                vec![0, 0],
                vec![-1, 0],
                vec![-1, 1],
                vec![0, 1],
                vec![1, 1],
            ]
        );
        assert_eq!(gray_code_lambdas(3, 0).collect::<Vec<_>>(), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn gray_code_visits_box_once_with_unit_steps() {
        for r in 0..=4 {
            for k in 0..=3 {
                let all: Vec<_> = gray_code_lambdas(r, k).collect();
                assert_eq!(all.len() as u128, candidate_count(r, k));
                let distinct: BTreeSet<_> = all.iter().cloned().collect();
                assert_eq!(distinct.len(), all.len());
                assert!(all.iter().flatten().all(|x| x.abs() <= k as i64));
                if let Some(first) = all.first() {
                    assert!(first.iter().all(|&x| x == -(k as i64)));
                }
                for w in all.windows(2) {
                    let diff: i64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum();
                    assert_eq!(diff, 1);
                }
            }
        }
    }

    #[test]
    fn tree_yields_only_f() {
        let g = path(4, 1);
        let basis = cycle_basis(&g).unwrap();
        let f = Circulation {
            edge_flow: vec![-1, -1, 0],
            arc_flow: vec![1],
        };
        let all: Vec<_> = enumerate_candidates(&f, &basis, 2).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].circulation, f);
        assert!(all[0].lambda.is_empty());
    }

    #[test]
    fn rank_one_gives_three_shifts() {
        let g = cycle(3, 1);
        let basis = cycle_basis(&g).unwrap();
        let f = Circulation {
            edge_flow: vec![1, 0, -1],
            arc_flow: vec![],
        };
        let c = basis.dense_cycle(0);
        let shifted = |t: i64| -> Vec<i64> { f.edge_flow.iter().zip(&c).map(|(a, b)| a + t * b).collect() };
        let all: Vec<_> = enumerate_candidates(&f, &basis, 1)
            .map(|cand| cand.circulation.edge_flow)
            .collect();
        assert_eq!(all, vec![shifted(-1), shifted(0), shifted(1)]);
    }

    #[test]
    fn incremental_matches_recomputed() {
        let g = theta();
        let basis = cycle_basis(&g).unwrap();
        let f = Circulation {
            edge_flow: vec![0; g.edge_count()],
            arc_flow: vec![],
        };
        for cand in enumerate_candidates(&f, &basis, 2) {
            assert_eq!(cand.circulation.edge_flow, basis.combine(&cand.lambda));
        }
    }
}
