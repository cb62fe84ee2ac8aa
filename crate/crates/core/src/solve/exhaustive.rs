//! Brute-force enumeration of all `2ⁿ` assignments.
//!
//! A Gray-code walk visits every mask with one bit flip per step and O(n)
//! incremental updates. Incremental energies drift slightly, so the walk is
//! done twice: once for an approximate minimum, then again re-evaluating every
//! mask near that minimum with the exact, order-fixed energy. Ties are decided
//! on exact energies only.

use serde::Serialize;

use crate::error::{QfsError, Result};
use crate::qubo::QuboInstance;

pub const EXHAUSTIVE_LIMIT: usize = 30;
/// Absolute tolerance under which two energies count as the same minimum.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Beyond this many minimizers only the count is kept.
pub const MAX_STORED_MINIMIZERS: usize = 1 << 20;

const RESYNC_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustiveResult {
    /// Lexicographically smallest minimizer.
    pub best: Vec<u8>,
    pub energy: f64,
    /// Minimizers in lexicographic order, at most [`MAX_STORED_MINIMIZERS`].
    pub minimizers: Vec<Vec<u8>>,
    pub minimizer_count: u64,
}

impl ExhaustiveResult {
    pub fn truncated(&self) -> bool {
        self.minimizer_count > self.minimizers.len() as u64
    }
}

pub(crate) fn mask_to_bits(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

/// Ordering key under which smaller means lexicographically smaller bit vector
/// (bit 0 most significant).
fn lex_key(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

/// Exact energy of a mask, summed in the same order as
/// [`QuboInstance::energy_unchecked`].
fn mask_energy(q: &QuboInstance, mask: u64) -> f64 {
    let n = q.n();
    let mut e = 0.0;
    for i in (0..n).filter(|i| (mask >> i) & 1 == 1) {
        let row = q.row(i);
        for j in (0..n).filter(|j| (mask >> j) & 1 == 1) {
            e += row[j];
        }
    }
    e + q.offset()
}

struct GrayWalk<'a> {
    q: &'a QuboInstance,
    mask: u64,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> GrayWalk<'a> {
    fn new(q: &'a QuboInstance) -> Self {
        Self {
            q,
            mask: 0,
            field: vec![0.0; q.n()],
            energy: q.offset(),
        }
    }

    fn resync(&mut self) {
        let n = self.q.n();
        for i in 0..n {
            let row = self.q.row(i);
            self.field[i] = (0..n)
                .filter(|&j| j != i && (self.mask >> j) & 1 == 1)
                .map(|j| row[j])
                .sum();
        }
        self.energy = mask_energy(self.q, self.mask);
    }

    /// Visits every mask (starting with 0) with its approximate energy.
    fn run(mut self, mut visit: impl FnMut(u64, f64)) {
        let n = self.q.n();
        visit(0, self.energy);
        for step in 1u64..(1u64 << n) {
            let i = step.trailing_zeros() as usize;
            let on = (self.mask >> i) & 1 == 0;
            let row = self.q.row(i);
            let delta = row[i] + 2.0 * self.field[i];
            let sign = if on { 1.0 } else { -1.0 };
            self.energy += sign * delta;
            self.mask ^= 1 << i;
            for (j, f) in self.field.iter_mut().enumerate() {
                if j != i {
                    *f += sign * row[j];
                }
            }
            if step % RESYNC_INTERVAL == 0 {
                self.resync();
            }
            visit(self.mask, self.energy);
        }
    }
}

pub fn solve_exhaustive(q: &QuboInstance) -> Result<ExhaustiveResult> {
    let n = q.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(QfsError::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let scale = 1.0 + q.as_slice().iter().map(|v| v.abs()).sum::<f64>() + q.offset().abs();
    let slack = 1e-9 * scale;

    let mut approx_min = f64::INFINITY;
    GrayWalk::new(q).run(|_, e| approx_min = approx_min.min(e));

    let mut exact_min = f64::INFINITY;
    GrayWalk::new(q).run(|mask, e| {
        if e <= approx_min + slack {
            exact_min = exact_min.min(mask_energy(q, mask));
        }
    });

    let mut stored: Vec<u64> = Vec::new();
    let mut count = 0u64;
    let mut smallest: Option<u64> = None;
    GrayWalk::new(q).run(|mask, e| {
        if e > approx_min + slack || mask_energy(q, mask) > exact_min + TIE_TOLERANCE {
            return;
        }
        count += 1;
        if smallest.is_none_or(|s| lex_key(mask, n) < lex_key(s, n)) {
            smallest = Some(mask);
        }
        if stored.len() < MAX_STORED_MINIMIZERS {
            stored.push(mask);
        }
    });
    stored.sort_by_key(|&m| lex_key(m, n));
    let best_mask = smallest.expect("at least one assignment");
    Ok(ExhaustiveResult {
        best: mask_to_bits(best_mask, n),
        energy: mask_energy(q, best_mask),
        minimizers: stored.iter().map(|&m| mask_to_bits(m, n)).collect(),
        minimizer_count: count,
    })
}
