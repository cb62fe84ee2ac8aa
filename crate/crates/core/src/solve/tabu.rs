//! Tabu search and clamping decomposition.
//!
//! Each round ranks the variables by impact, the energy increase caused by
//! negating that bit in the current best assignment, and walks the ranking in
//! chunks of `subproblem_size`. Every chunk becomes a sub-QUBO with all other
//! bits clamped; it is solved exhaustively when small enough and by tabu
//! search otherwise, and the result is kept if it lowers the energy. A
//! single-flip tabu search over the full problem closes the round. The search
//! ends after `stall_rounds` consecutive rounds without improvement.

use serde::{Deserialize, Serialize};

use super::exhaustive::solve_exhaustive;
use crate::qubo::QuboInstance;

/// Sub-problems up to this size are solved by enumeration.
pub const EXACT_SUBPROBLEM_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuParams {
    pub tenure: usize,
    pub subproblem_size: usize,
    pub stall_rounds: usize,
    /// Iteration cap of one tabu search.
    pub max_iterations: usize,
    /// A tabu search stops after this many iterations without a new best.
    pub max_stall_iterations: usize,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            tenure: 10,
            subproblem_size: 20,
            stall_rounds: 3,
            max_iterations: 2000,
            max_stall_iterations: 200,
        }
    }
}

fn fields(q: &QuboInstance, x: &[u8]) -> Vec<f64> {
    let n = q.n();
    (0..n)
        .map(|i| {
            let row = q.row(i);
            (0..n)
                .filter(|&j| j != i && x[j] == 1)
                .map(|j| row[j])
                .sum()
        })
        .collect()
}

fn flip_cost(q: &QuboInstance, x: &[u8], field: &[f64], i: usize) -> f64 {
    let sign = if x[i] == 1 { -1.0 } else { 1.0 };
    sign * (q.get(i, i) + 2.0 * field[i])
}

/// Single-flip tabu search from `start`; returns the best assignment visited.
///
/// Each iteration takes the cheapest admissible flip (lowest index on ties).
/// A flipped bit stays tabu for `tenure` iterations unless flipping it would
/// produce a new best.
pub fn tabu_search(q: &QuboInstance, start: &[u8], params: &TabuParams) -> Vec<u8> {
    let n = q.n();
    let tenure = params.tenure.min(n.saturating_sub(1));
    let mut x = start.to_vec();
    let mut field = fields(q, &x);
    let mut energy = q.energy_unchecked(&x);
    let mut best = x.clone();
    let mut best_energy = energy;
    let tol = 1e-12 * (1.0 + q.max_abs() * n as f64);
    let mut tabu_until = vec![0usize; n];
    let mut stall = 0;

    for it in 1..=params.max_iterations {
        let mut choice: Option<(usize, f64)> = None;
        for i in 0..n {
            let delta = flip_cost(q, &x, &field, i);
            let aspirates = energy + delta < best_energy - tol;
            if it <= tabu_until[i] && !aspirates {
                continue;
            }
            if choice.is_none_or(|(_, d)| delta < d) {
                choice = Some((i, delta));
            }
        }
        let Some((i, delta)) = choice else { break };
        let sign = if x[i] == 1 { -1.0 } else { 1.0 };
        x[i] ^= 1;
        energy += delta;
        let row = q.row(i);
        for (j, f) in field.iter_mut().enumerate() {
            if j != i {
                *f += sign * row[j];
            }
        }
        tabu_until[i] = it + tenure;
        if energy < best_energy - tol {
            best.clone_from(&x);
            best_energy = energy;
            stall = 0;
        } else {
            stall += 1;
            if stall >= params.max_stall_iterations {
                break;
            }
        }
    }
    best
}

/// Variables ordered by decreasing impact in `x`, lowest index first on ties.
pub fn impact_order(q: &QuboInstance, x: &[u8]) -> Vec<usize> {
    let field = fields(q, x);
    let costs: Vec<f64> = (0..q.n()).map(|i| flip_cost(q, x, &field, i)).collect();
    let mut order: Vec<usize> = (0..q.n()).collect();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    order
}

fn solve_subproblem(sub: &QuboInstance, current: &[u8], params: &TabuParams) -> Vec<u8> {
    if sub.n() <= EXACT_SUBPROBLEM_LIMIT {
        solve_exhaustive(sub)
            .expect("subproblem within enumeration limit")
            .best
    } else {
        tabu_search(sub, current, params)
    }
}

/// Runs the decomposition loop from `start` and returns the best assignment.
pub fn tabu_decompose_from(q: &QuboInstance, start: &[u8], params: &TabuParams) -> Vec<u8> {
    let n = q.n();
    let chunk = params.subproblem_size.clamp(1, n.max(1));
    let mut best = start.to_vec();
    let mut best_energy = q.energy_unchecked(&best);
    let mut stall = 0;
    while stall < params.stall_rounds.max(1) {
        let mut improved = false;
        for free in impact_order(q, &best).chunks(chunk) {
            let sub = q.clamp(free, &best).expect("free set is valid");
            let current: Vec<u8> = free.iter().map(|&f| best[f]).collect();
            let y = solve_subproblem(&sub, &current, params);
            let mut candidate = best.clone();
            for (&f, &v) in free.iter().zip(&y) {
                candidate[f] = v;
            }
            let e = q.energy_unchecked(&candidate);
            if e < best_energy {
                best = candidate;
                best_energy = e;
                improved = true;
            }
        }
        let polished = tabu_search(q, &best, params);
        let e = q.energy_unchecked(&polished);
        if e < best_energy {
            best = polished;
            best_energy = e;
            improved = true;
        }
        stall = if improved { 0 } else { stall + 1 };
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance() -> QuboInstance {
        QuboInstance::from_rows(&[
            vec![-1.0, 2.0, 0.0, -0.5],
            vec![2.0, -1.5, 1.0, 0.0],
            vec![0.0, 1.0, -2.0, 0.75],
            vec![-0.5, 0.0, 0.75, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn tabu_search_reaches_optimum_on_small_instance() {
        let q = instance();
        let opt = solve_exhaustive(&q).unwrap();
        for start in 0..16u8 {
            let x: Vec<u8> = (0..4).map(|i| (start >> i) & 1).collect();
            let best = tabu_search(&q, &x, &TabuParams::default());
            assert_eq!(q.energy(&best).unwrap(), opt.energy, "start {x:?}");
        }
    }

    #[test]
    fn impact_order_ties_by_index() {
        let q = QuboInstance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(impact_order(&q, &[0, 0]), vec![0, 1]);
        let q = QuboInstance::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(impact_order(&q, &[0, 0]), vec![1, 0]);
    }

    #[test]
    fn optimum_is_left_unchanged() {
        let q = instance();
        let opt = solve_exhaustive(&q).unwrap().best;
        let params = TabuParams {
            stall_rounds: 1,
            subproblem_size: 2,
            ..TabuParams::default()
        };
        assert_eq!(tabu_decompose_from(&q, &opt, &params), opt);
    }

    #[test]
    fn whole_instance_as_one_subproblem_is_exact() {
        let q = instance();
        let opt = solve_exhaustive(&q).unwrap();
        let params = TabuParams {
            subproblem_size: 4,
            ..TabuParams::default()
        };
        let x = tabu_decompose_from(&q, &[0, 0, 0, 0], &params);
        assert_eq!(q.energy(&x).unwrap(), opt.energy);
    }
}
