//! Binary search over α for a subset of prescribed size, plus α-sweep and
//! attainability diagnostics.
//!
//! A probe at α builds `Q(α)`, applies the ε/μ substitution, solves, and reads
//! the subset size `k'` of the minimizer. Larger α rewards importance more, so
//! the search moves α up when `k' < k` and down when `k' > k`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Probe, QfsError, Result};
use crate::infotheory::{ImportanceVector, RedundancyMatrix};
use crate::qubo::{self, MuPolicy, DEFAULT_EPSILON};
use crate::rng::{stream_rng, Stream};
use crate::solve::{solve_exhaustive, solve_minima, SolverConfig, SolverKind};

/// The search stops once the bracket is narrower than this.
pub const ALPHA_RESOLUTION: f64 = 1.0 / (1u64 << 32) as f64;
/// Largest instance [`verify_subset_sizes`] enumerates.
pub const VERIFY_LIMIT: usize = 12;

/// Settings of the ε/μ substitution applied at every probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub epsilon: f64,
    pub mu: MuPolicy,
}

impl Default for Threshold {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            mu: MuPolicy::MaxEntry,
        }
    }
}

impl Threshold {
    /// No diagonal is ever substituted.
    pub fn disabled() -> Self {
        Self {
            epsilon: 0.0,
            mu: MuPolicy::MaxEntry,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub alpha_star: f64,
    pub x_star: Vec<u8>,
    pub k: usize,
    pub energy: f64,
    pub trace: Vec<Probe>,
    pub solver: SolverKind,
}

impl SelectionResult {
    pub fn selected(&self) -> Vec<usize> {
        indices_of(&self.x_star)
    }
}

pub fn weight(x: &[u8]) -> usize {
    x.iter().filter(|&&b| b == 1).count()
}

pub fn indices_of(x: &[u8]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect()
}

struct Probed {
    x: Vec<u8>,
    energy: f64,
}

/// Solves at one α. Among equally good minimizers the first of weight
/// `prefer` wins, otherwise the lexicographically smallest.
fn probe(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    alpha: f64,
    solver: &SolverConfig,
    threshold: &Threshold,
    prefer: Option<usize>,
) -> Result<Probed> {
    let q = qubo::build_with_threshold(
        importance,
        redundancy,
        alpha,
        threshold.epsilon,
        threshold.mu,
    )?;
    let minima = solve_minima(&q, solver)?;
    let x = prefer
        .and_then(|k| minima.minimizers.iter().find(|x| weight(x) == k))
        .unwrap_or(&minima.minimizers[0])
        .clone();
    let energy = q.energy_unchecked(&x);
    Ok(Probed { x, energy })
}

/// First earlier probe that contradicts a nondecreasing `k(α)`.
fn contradiction(trace: &[Probe], alpha: f64, k: usize) -> Option<Probe> {
    trace
        .iter()
        .copied()
        .find(|&(a, ka)| (a < alpha && ka > k) || (a > alpha && ka < k))
}

/// Binary search for an α whose minimizer selects exactly `k` features.
///
/// Starts at α = 1/2 in the bracket [0, 1] and returns the first probe that
/// hits `k`. Fails with [`QfsError::UnreachableK`] once the bracket is
/// narrower than [`ALPHA_RESOLUTION`], and, for heuristic solvers, with
/// [`QfsError::NonMonotone`] as soon as two probes disagree on the direction.
pub fn select_k(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    k: usize,
    solver: &SolverConfig,
    threshold: &Threshold,
) -> Result<SelectionResult> {
    let n = importance.len();
    if redundancy.n() != n {
        return Err(QfsError::DimensionMismatch {
            expected: n,
            actual: redundancy.n(),
        });
    }
    if k > n {
        return Err(QfsError::InvalidArgument(format!(
            "k = {k} exceeds the {n} features"
        )));
    }
    solver.validate()?;

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut lo_k, mut hi_k) = (None, None);
    let mut alpha = 0.5;
    let mut trace: Vec<Probe> = Vec::new();
    loop {
        let p = probe(importance, redundancy, alpha, solver, threshold, Some(k))?;
        let got = weight(&p.x);
        if !solver.kind.is_exact() {
            if let Some((a, ka)) = contradiction(&trace, alpha, got) {
                trace.push((alpha, got));
                let ((alpha_before, k_before), (alpha_after, k_after)) = if a < alpha {
                    ((a, ka), (alpha, got))
                } else {
                    ((alpha, got), (a, ka))
                };
                return Err(QfsError::NonMonotone {
                    alpha_before,
                    k_before,
                    alpha_after,
                    k_after,
                    solver: solver.kind.to_string(),
                    trace,
                });
            }
        }
        trace.push((alpha, got));
        if got == k {
            return Ok(SelectionResult {
                alpha_star: alpha,
                x_star: p.x,
                k,
                energy: p.energy,
                trace,
                solver: solver.kind,
            });
        }
        if got < k {
            lo = alpha;
            lo_k = Some(got);
        } else {
            hi = alpha;
            hi_k = Some(got);
        }
        if hi - lo < ALPHA_RESOLUTION {
            // The endpoints themselves are never midpoints; try the one the
            // bracket collapsed onto before giving up.
            let endpoint = match (lo_k, hi_k) {
                (None, _) => Some(0.0),
                (_, None) => Some(1.0),
                _ => None,
            };
            if let Some(edge) = endpoint {
                let p = probe(importance, redundancy, edge, solver, threshold, Some(k))?;
                let got = weight(&p.x);
                trace.push((edge, got));
                if got == k {
                    return Ok(SelectionResult {
                        alpha_star: edge,
                        x_star: p.x,
                        k,
                        energy: p.energy,
                        trace,
                        solver: solver.kind,
                    });
                }
                if edge == 0.0 {
                    lo_k = Some(got);
                } else {
                    hi_k = Some(got);
                }
            }
            return Err(QfsError::UnreachableK {
                k,
                lower_alpha: lo,
                lower_k: lo_k.unwrap_or(0),
                upper_alpha: hi,
                upper_k: hi_k.unwrap_or(n),
                trace,
            });
        }
        alpha = 0.5 * (lo + hi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub k: usize,
    pub energy: f64,
}

/// Subset size and energy of the canonical minimizer at every grid point.
pub fn sweep_alpha(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    grid: &[f64],
    solver: &SolverConfig,
    threshold: &Threshold,
) -> Result<Vec<SweepPoint>> {
    if let Some(&bad) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(QfsError::InvalidArgument(format!(
            "grid value {bad} outside [0, 1]"
        )));
    }
    grid.par_iter()
        .map(|&alpha| {
            let p = probe(importance, redundancy, alpha, solver, threshold, None)?;
            Ok(SweepPoint {
                alpha,
                k: weight(&p.x),
                energy: p.energy,
            })
        })
        .collect()
}

/// `points` evenly spaced values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Pairs of consecutive sweep points where the subset size drops.
pub fn monotonicity_violations(sweep: &[SweepPoint]) -> Vec<(SweepPoint, SweepPoint)> {
    sweep
        .windows(2)
        .filter(|w| w[1].k < w[0].k)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Where a subset size is globally optimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: usize,
    /// An α at which some global minimizer of `Q(α)` has size `k`.
    pub alpha: Option<f64>,
    /// Whether every global minimizer at `alpha` has size `k`.
    pub strict: bool,
    /// Whether the exhaustive solver confirms a minimizer of size `k` there.
    pub solver_confirms: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSizeReport {
    /// Every size from 0 to n is globally optimal somewhere in [0, 1].
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    /// α values in (0, 1) where the optimal energy changes slope.
    pub breakpoints: Vec<f64>,
}

/// Energy of subset `x` at α as an affine function: `Rₓ − α(Iₓ + Rₓ)`, with
/// `Rₓ` summed over ordered pairs.
#[derive(Debug, Clone, Copy)]
struct Line {
    intercept: f64,
    slope: f64,
    k: usize,
}

impl Line {
    fn at(&self, alpha: f64) -> f64 {
        self.intercept + self.slope * alpha
    }
}

fn subset_lines(importance: &ImportanceVector, redundancy: &RedundancyMatrix) -> Vec<Line> {
    let n = importance.len();
    (0u32..1 << n)
        .map(|mask| {
            let on: Vec<usize> = (0..n).filter(|i| (mask >> i) & 1 == 1).collect();
            let mut r = 0.0;
            for &i in &on {
                for &j in &on {
                    r += redundancy.get(i, j);
                }
            }
            let imp: f64 = on.iter().map(|&i| importance.values()[i]).sum();
            Line {
                intercept: r,
                slope: -(imp + r),
                k: on.len(),
            }
        })
        .collect()
}

/// Breakpoints of the lower envelope of `lines` inside (0, 1).
fn envelope_breakpoints(lines: &[Line], tol: f64) -> Vec<f64> {
    let lowest_at = |alpha: f64| {
        lines
            .iter()
            .map(|l| l.at(alpha))
            .fold(f64::INFINITY, f64::min)
    };
    // start on the steepest line among those minimal at 0
    let floor = lowest_at(0.0);
    let mut current = *lines
        .iter()
        .filter(|l| l.at(0.0) <= floor + tol)
        .min_by(|a, b| a.slope.total_cmp(&b.slope))
        .expect("at least one subset");
    let mut alpha = 0.0;
    let mut breakpoints = Vec::new();
    loop {
        let mut next: Option<(f64, Line)> = None;
        for l in lines.iter().filter(|l| l.slope < current.slope) {
            let cross = (l.intercept - current.intercept) / (current.slope - l.slope);
            let cross = cross.max(alpha);
            let better = match next {
                None => true,
                Some((c, best)) => cross < c - tol || (cross <= c + tol && l.slope < best.slope),
            };
            if better {
                next = Some((cross, *l));
            }
        }
        match next {
            Some((cross, line)) if cross < 1.0 => {
                if cross > 0.0 && breakpoints.last().is_none_or(|&b: &f64| cross > b + tol) {
                    breakpoints.push(cross);
                }
                alpha = cross;
                current = line;
            }
            _ => return breakpoints,
        }
    }
}

/// Checks by enumeration that every subset size `0..=n` is the size of some
/// global minimizer of the raw `Q(α)` for some α in [0, 1].
///
/// Each subset's energy is affine in α; the optimal energy is their lower
/// envelope. Candidates are 0, 1, the envelope breakpoints and the midpoints
/// between them. A witness is taken from a midpoint where the size is the
/// only optimal one when possible, otherwise from a point where it ties.
pub fn verify_subset_sizes(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
) -> Result<SubsetSizeReport> {
    let n = importance.len();
    if redundancy.n() != n {
        return Err(QfsError::DimensionMismatch {
            expected: n,
            actual: redundancy.n(),
        });
    }
    if n > VERIFY_LIMIT {
        return Err(QfsError::TooLarge {
            n,
            limit: VERIFY_LIMIT,
        });
    }
    let lines = subset_lines(importance, redundancy);
    let scale = 1.0
        + lines
            .iter()
            .map(|l| l.intercept.abs() + l.slope.abs())
            .fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let breakpoints = envelope_breakpoints(&lines, tol);

    let mut nodes = vec![0.0];
    nodes.extend(&breakpoints);
    nodes.push(1.0);
    let mut candidates: Vec<(f64, bool)> = Vec::new();
    for w in nodes.windows(2) {
        candidates.push((w[0], false));
        candidates.push((0.5 * (w[0] + w[1]), true));
    }
    candidates.push((1.0, false));

    let mut strict: Vec<Option<f64>> = vec![None; n + 1];
    let mut tied: Vec<Option<f64>> = vec![None; n + 1];
    for &(alpha, interior) in &candidates {
        let mut best_by_k = vec![f64::INFINITY; n + 1];
        for l in &lines {
            best_by_k[l.k] = best_by_k[l.k].min(l.at(alpha));
        }
        let floor = best_by_k.iter().copied().fold(f64::INFINITY, f64::min);
        let optimal: Vec<usize> = (0..=n).filter(|&k| best_by_k[k] <= floor + tol).collect();
        for &k in &optimal {
            if interior && optimal.len() == 1 {
                strict[k].get_or_insert(alpha);
            }
            tied[k].get_or_insert(alpha);
        }
    }

    let witnesses = (0..=n)
        .map(|k| {
            let alpha = strict[k].or(tied[k]);
            let solver_confirms = match alpha {
                Some(a) => {
                    let q = qubo::build(importance, redundancy, a)?;
                    solve_exhaustive(&q)?
                        .minimizers
                        .iter()
                        .any(|x| weight(x) == k)
                }
                None => false,
            };
            Ok(Witness {
                k,
                alpha,
                strict: strict[k].is_some(),
                solver_confirms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubsetSizeReport {
        holds: witnesses.iter().all(|w| w.alpha.is_some()),
        witnesses,
        breakpoints,
    })
}

/// Random non-negative instance: `Iᵢ` and `Rᵢⱼ = Rⱼᵢ` uniform on [0, 1).
pub fn random_instance(n: usize, seed: u64) -> (ImportanceVector, RedundancyMatrix) {
    let mut rng = stream_rng(seed, Stream::RandomInstance);
    let importance = ImportanceVector((0..n).map(|_| rng.random::<f64>()).collect());
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random::<f64>();
            r[i * n + j] = v;
            r[j * n + i] = v;
        }
    }
    let redundancy = RedundancyMatrix::from_dense(n, r).expect("valid by construction");
    (importance, redundancy)
}
