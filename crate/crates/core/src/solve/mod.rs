//! QUBO solvers behind one configuration type, with multi-shot sample statistics.

mod anneal;
mod exhaustive;
mod tabu;

pub use anneal::AnnealingParams;
pub use exhaustive::{
    solve_exhaustive, ExhaustiveResult, EXHAUSTIVE_LIMIT, MAX_STORED_MINIMIZERS, TIE_TOLERANCE,
};
pub use tabu::{
    impact_order, tabu_decompose_from, tabu_search, TabuParams, EXACT_SUBPROBLEM_LIMIT,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QfsError, Result};
use crate::qubo::QuboInstance;
use crate::rng::shot_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exhaustive,
    Annealing,
    TabuDecomposition,
}

impl SolverKind {
    pub fn is_exact(self) -> bool {
        self == SolverKind::Exhaustive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Annealing => "annealing",
            SolverKind::TabuDecomposition => "tabu-decomposition",
        }
    }

    /// Exhaustive up to 20 variables, tabu decomposition beyond.
    pub fn default_for(n: usize) -> Self {
        if n <= 20 {
            SolverKind::Exhaustive
        } else {
            SolverKind::TabuDecomposition
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = QfsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" | "brute-force" => Ok(SolverKind::Exhaustive),
            "annealing" | "sa" => Ok(SolverKind::Annealing),
            "tabu-decomposition" | "tabu" | "qbsolv" => Ok(SolverKind::TabuDecomposition),
            other => Err(QfsError::InvalidArgument(format!(
                "unknown solver '{other}' (expected exhaustive, annealing or tabu-decomposition)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub shots: usize,
    pub seed: u64,
    #[serde(default)]
    pub annealing: AnnealingParams,
    #[serde(default)]
    pub tabu: TabuParams,
}

impl SolverConfig {
    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            shots: match kind {
                SolverKind::Exhaustive => 1,
                SolverKind::Annealing => 100,
                SolverKind::TabuDecomposition => 10,
            },
            seed: 0,
            annealing: AnnealingParams::default(),
            tabu: TabuParams::default(),
        }
    }

    pub fn exhaustive() -> Self {
        Self::new(SolverKind::Exhaustive)
    }

    pub fn annealing() -> Self {
        Self::new(SolverKind::Annealing)
    }

    pub fn tabu() -> Self {
        Self::new(SolverKind::TabuDecomposition)
    }

    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(QfsError::InvalidArgument("shots must be at least 1".into()));
        }
        if self.kind == SolverKind::TabuDecomposition && self.tabu.subproblem_size == 0 {
            return Err(QfsError::InvalidArgument(
                "subproblem size must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<u8>,
    pub energy: f64,
    pub multiplicity: usize,
}

/// Distinct states seen over all shots, ordered by energy then bit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub sorted_energies: Vec<f64>,
    pub bit_counts: Vec<usize>,
}

impl SampleSet {
    /// Aggregates one final state per shot; energies are recomputed from `q`.
    pub fn from_states(q: &QuboInstance, states: &[Vec<u8>]) -> Result<Self> {
        if states.is_empty() {
            return Err(QfsError::InvalidArgument(
                "sample set needs at least one shot".into(),
            ));
        }
        let mut bit_counts = vec![0usize; q.n()];
        let mut distinct: BTreeMap<&[u8], usize> = BTreeMap::new();
        let mut sorted_energies = Vec::with_capacity(states.len());
        for x in states {
            let e = q.energy(x)?;
            sorted_energies.push(e);
            for (c, &b) in bit_counts.iter_mut().zip(x) {
                *c += b as usize;
            }
            *distinct.entry(x.as_slice()).or_default() += 1;
        }
        sorted_energies.sort_by(f64::total_cmp);
        let mut samples: Vec<Sample> = distinct
            .into_iter()
            .map(|(x, multiplicity)| Sample {
                x: x.to_vec(),
                energy: q.energy_unchecked(x),
                multiplicity,
            })
            .collect();
        samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.x.cmp(&b.x)));
        Ok(Self {
            samples,
            sorted_energies,
            bit_counts,
        })
    }

    pub fn shots(&self) -> usize {
        self.sorted_energies.len()
    }

    /// Lowest-energy sample, lexicographically smallest among equals.
    pub fn best(&self) -> &Sample {
        &self.samples[0]
    }

    /// Every sampled state within [`TIE_TOLERANCE`] of the best energy, in
    /// lexicographic order.
    pub fn lowest(&self) -> Vec<&Sample> {
        let best = self.best().energy;
        let mut low: Vec<&Sample> = self
            .samples
            .iter()
            .filter(|s| s.energy <= best + TIE_TOLERANCE)
            .collect();
        low.sort_by(|a, b| a.x.cmp(&b.x));
        low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSample {
    pub x: Vec<u8>,
    pub energy: f64,
}

/// Sorted shot energies and per-bit counts of ones, plus how often the
/// reference energy was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub sorted_energies: Vec<f64>,
    pub bit_counts: Vec<usize>,
    pub best: BestSample,
    pub reference_energy: f64,
    pub optimum_fraction: f64,
}

/// Summarizes a sample set against `reference` (the best sampled energy when
/// `None`). A shot attains the reference when its energy is within
/// [`TIE_TOLERANCE`] of it or below.
pub fn summarize(samples: &SampleSet, reference: Option<f64>) -> SummaryReport {
    let best = samples.best();
    let reference = reference.unwrap_or(best.energy);
    let hits = samples
        .sorted_energies
        .iter()
        .filter(|&&e| e <= reference + TIE_TOLERANCE)
        .count();
    SummaryReport {
        sorted_energies: samples.sorted_energies.clone(),
        bit_counts: samples.bit_counts.clone(),
        best: BestSample {
            x: best.x.clone(),
            energy: best.energy,
        },
        reference_energy: reference,
        optimum_fraction: hits as f64 / samples.shots() as f64,
    }
}

fn random_bits<R: Rng>(n: usize, rng: &mut R) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}

/// Runs `cfg.shots` independent annealing shots.
pub fn solve_annealing(q: &QuboInstance, cfg: &SolverConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let states: Vec<Vec<u8>> = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| anneal::anneal_shot(q, &cfg.annealing, &mut shot_rng(cfg.seed, shot)))
        .collect();
    SampleSet::from_states(q, &states)
}

/// Runs `cfg.shots` decomposition restarts from random starting points.
pub fn solve_tabu_decomposed(q: &QuboInstance, cfg: &SolverConfig) -> Result<SampleSet> {
    cfg.validate()?;
    if cfg.tabu.subproblem_size > q.n() {
        return Err(QfsError::InvalidArgument(format!(
            "subproblem size {} exceeds the {} variables",
            cfg.tabu.subproblem_size,
            q.n()
        )));
    }
    let states: Vec<Vec<u8>> = (0..cfg.shots)
        .into_par_iter()
        .map(|shot| {
            let start = random_bits(q.n(), &mut shot_rng(cfg.seed, shot));
            tabu_decompose_from(q, &start, &cfg.tabu)
        })
        .collect();
    SampleSet::from_states(q, &states)
}

/// Dispatches on `cfg.kind`. The exhaustive solver reports its canonical
/// minimizer once per shot.
pub fn solve(q: &QuboInstance, cfg: &SolverConfig) -> Result<SampleSet> {
    match cfg.kind {
        SolverKind::Exhaustive => {
            cfg.validate()?;
            let r = solve_exhaustive(q)?;
            SampleSet::from_states(q, &vec![r.best; cfg.shots])
        }
        SolverKind::Annealing => solve_annealing(q, cfg),
        SolverKind::TabuDecomposition => {
            // a subproblem larger than the instance is the whole instance
            let mut cfg = *cfg;
            cfg.tabu.subproblem_size = cfg.tabu.subproblem_size.min(q.n());
            solve_tabu_decomposed(q, &cfg)
        }
    }
}

/// The lowest energy a solver found and every assignment reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct Minima {
    pub energy: f64,
    /// Lexicographic order; the first entry is the canonical minimizer.
    pub minimizers: Vec<Vec<u8>>,
}

impl Minima {
    pub fn canonical(&self) -> &[u8] {
        &self.minimizers[0]
    }
}

/// All global minimizers for the exhaustive solver, all best-of-shots states
/// for the heuristics.
pub fn solve_minima(q: &QuboInstance, cfg: &SolverConfig) -> Result<Minima> {
    match cfg.kind {
        SolverKind::Exhaustive => {
            let r = solve_exhaustive(q)?;
            Ok(Minima {
                energy: r.energy,
                minimizers: r.minimizers,
            })
        }
        _ => {
            let set = solve(q, cfg)?;
            let low = set.lowest();
            Ok(Minima {
                energy: set.best().energy,
                minimizers: low.into_iter().map(|s| s.x.clone()).collect(),
            })
        }
    }
}
