use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qubo::QuboInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealingParams {
    pub sweeps: usize,
    /// Starting temperature; `max|Qᵢⱼ|·n` when unset.
    pub t_start: Option<f64>,
    /// Final temperature; `10⁻³·min nonzero |Qᵢⱼ|` when unset.
    pub t_end: Option<f64>,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            t_start: None,
            t_end: None,
        }
    }
}

impl AnnealingParams {
    fn schedule(&self, q: &QuboInstance) -> Option<(f64, f64)> {
        let min_nz = q.min_nonzero_abs()?;
        let t0 = self.t_start.unwrap_or(q.max_abs() * q.n() as f64);
        let t1 = self.t_end.unwrap_or(1e-3 * min_nz);
        Some((t0, t1.min(t0)))
    }
}

/// One Metropolis anneal from a random start with single-bit flips in sweep
/// order and a geometric temperature schedule. Returns the final state.
pub(crate) fn anneal_shot<R: Rng>(
    q: &QuboInstance,
    params: &AnnealingParams,
    rng: &mut R,
) -> Vec<u8> {
    let n = q.n();
    let mut x: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    let Some((t0, t1)) = params.schedule(q) else {
        // all coefficients zero: every state is optimal
        return x;
    };
    let mut field: Vec<f64> = (0..n)
        .map(|i| {
            let row = q.row(i);
            (0..n)
                .filter(|&j| j != i && x[j] == 1)
                .map(|j| row[j])
                .sum()
        })
        .collect();
    let sweeps = params.sweeps.max(1);
    let ratio = if sweeps > 1 {
        (t1 / t0).powf(1.0 / (sweeps - 1) as f64)
    } else {
        1.0
    };
    let mut temperature = t0;
    for sweep in 0..sweeps {
        if sweep + 1 == sweeps {
            temperature = t1;
        }
        for i in 0..n {
            let row = q.row(i);
            let sign = if x[i] == 1 { -1.0 } else { 1.0 };
            let delta = sign * (row[i] + 2.0 * field[i]);
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                x[i] ^= 1;
                for (j, f) in field.iter_mut().enumerate() {
                    if j != i {
                        *f += sign * row[j];
                    }
                }
            }
        }
        temperature *= ratio;
    }
    x
}
