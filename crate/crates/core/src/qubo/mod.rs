//! The α-weighted feature-selection QUBO.
//!
//! The objective for a selection mask `x` is
//! `−α Σᵢ Iᵢ xᵢ + (1−α) Σᵢⱼ Rᵢⱼ xᵢ xⱼ`, stored as a dense symmetric matrix
//! `Q(α)` with `Qᵢⱼ = Rᵢⱼ − α(Rᵢⱼ + δᵢⱼ Iᵢ)` and evaluated as the full double
//! sum `xᵀQx`. Off-diagonal weight is therefore carried twice, once in each
//! triangle.

mod io;
mod ising;

pub use io::{ExportFormat, QuboFile};
pub use ising::{spins_of, IsingInstance};

use serde::{Deserialize, Serialize};

use crate::error::{QfsError, Result};
use crate::infotheory::{ImportanceVector, RedundancyMatrix};

pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Parameters an instance was built with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub penalty: Option<Penalty>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub k: usize,
    pub lambda: f64,
}

/// Dense symmetric QUBO with an optional constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    q: Vec<f64>,
    offset: f64,
    provenance: Option<Provenance>,
}

impl QuboInstance {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            q: vec![0.0; n * n],
            offset: 0.0,
            provenance: None,
        }
    }

    /// Wraps a row-major `n×n` matrix, which must be exactly symmetric.
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(QfsError::InvalidArgument(
                "QUBO needs at least one variable".into(),
            ));
        }
        if values.len() != n * n {
            return Err(QfsError::DimensionMismatch {
                expected: n * n,
                actual: values.len(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(QfsError::InvalidArgument(format!(
                        "QUBO matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(QfsError::InvalidArgument(format!(
                "non-finite coefficient {v}"
            )));
        }
        Ok(Self {
            n,
            q: values,
            offset: 0.0,
            provenance: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QfsError::Malformed("QUBO matrix is not square".into()));
        }
        Self::from_dense(n, rows.concat())
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn check_bits(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(QfsError::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if let Some(b) = x.iter().find(|&&b| b > 1) {
            return Err(QfsError::InvalidArgument(format!(
                "bit value {b} is not 0 or 1"
            )));
        }
        Ok(())
    }

    /// `xᵀQx` plus the stored offset.
    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        self.check_bits(x)?;
        Ok(self.energy_unchecked(x))
    }

    /// Same as [`energy`](Self::energy) without validating `x`. The summation
    /// order is fixed (rows, then columns, ascending), so every caller gets
    /// bitwise-identical values for the same mask.
    pub fn energy_unchecked(&self, x: &[u8]) -> f64 {
        let ones: Vec<usize> = (0..self.n).filter(|&i| x[i] == 1).collect();
        let mut e = 0.0;
        for &i in &ones {
            let row = self.row(i);
            for &j in &ones {
                e += row[j];
            }
        }
        e + self.offset
    }

    /// Energy change from flipping bit `i` of `x`.
    pub fn flip_delta(&self, x: &[u8], i: usize) -> f64 {
        let row = self.row(i);
        let mut field = 0.0;
        for (j, (&q, &xj)) in row.iter().zip(x).enumerate() {
            if j != i && xj == 1 {
                field += q;
            }
        }
        let sign = if x[i] == 1 { -1.0 } else { 1.0 };
        sign * (row[i] + 2.0 * field)
    }

    /// Multiplies every coefficient, and the offset, by `gamma`.
    pub fn scaled(&self, gamma: f64) -> Self {
        Self {
            q: self.q.iter().map(|v| v * gamma).collect(),
            offset: self.offset * gamma,
            ..self.clone()
        }
    }

    pub fn max_entry(&self) -> f64 {
        self.q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_nonzero_abs(&self) -> Option<f64> {
        self.q
            .iter()
            .map(|v| v.abs())
            .filter(|&v| v > 0.0)
            .min_by(f64::total_cmp)
    }

    /// The sub-QUBO over `free` with every other bit clamped to its value in `x`.
    ///
    /// Diagonal entries absorb the couplings to clamped ones and the offset
    /// holds the energy of the clamped part, so for any assignment `y` of the
    /// free bits `sub.energy(y)` equals the full energy of `x` with `y` written
    /// into the free positions.
    pub fn clamp(&self, free: &[usize], x: &[u8]) -> Result<Self> {
        self.check_bits(x)?;
        let mut is_free = vec![false; self.n];
        for &f in free {
            if f >= self.n {
                return Err(QfsError::IndexOutOfRange {
                    what: "variable",
                    index: f,
                    len: self.n,
                });
            }
            if is_free[f] {
                return Err(QfsError::InvalidArgument(format!(
                    "variable {f} listed twice"
                )));
            }
            is_free[f] = true;
        }
        let m = free.len();
        let mut sub = vec![0.0; m * m];
        for (a, &fa) in free.iter().enumerate() {
            let row = self.row(fa);
            for (b, &fb) in free.iter().enumerate() {
                sub[a * m + b] = row[fb];
            }
            let coupling: f64 = (0..self.n)
                .filter(|&j| !is_free[j] && x[j] == 1)
                .map(|j| row[j])
                .sum();
            sub[a * m + a] += 2.0 * coupling;
        }
        let mut clamped_only = x.to_vec();
        for &f in free {
            clamped_only[f] = 0;
        }
        Ok(Self {
            n: m,
            q: sub,
            offset: self.energy_unchecked(&clamped_only),
            provenance: None,
        })
    }
}

fn check_inputs(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    alpha: f64,
) -> Result<usize> {
    let n = importance.len();
    if redundancy.n() != n {
        return Err(QfsError::DimensionMismatch {
            expected: n,
            actual: redundancy.n(),
        });
    }
    if n == 0 {
        return Err(QfsError::InvalidArgument("no features".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(QfsError::InvalidArgument(format!(
            "α = {alpha} outside [0, 1]"
        )));
    }
    Ok(n)
}

/// `Qᵢⱼ(α) = Rᵢⱼ − α(Rᵢⱼ + δᵢⱼ Iᵢ)`.
pub fn build(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    alpha: f64,
) -> Result<QuboInstance> {
    let n = check_inputs(importance, redundancy, alpha)?;
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let r = redundancy.get(i, j);
            let diag = if i == j { importance.values()[i] } else { 0.0 };
            q[i * n + j] = r - alpha * (r + diag);
        }
    }
    Ok(QuboInstance {
        n,
        q,
        offset: 0.0,
        provenance: Some(Provenance {
            alpha,
            epsilon: None,
            mu: None,
            penalty: None,
        }),
    })
}

/// Replaces `Qᵢᵢ` by `mu` wherever `α·Iᵢ < ε`. Off-diagonals are untouched.
///
/// With non-negative off-diagonals a positive diagonal makes selecting that
/// feature strictly worse than leaving it out, so such features never appear
/// in an optimum.
pub fn apply_epsilon_mu(
    qubo: &QuboInstance,
    importance: &ImportanceVector,
    alpha: f64,
    epsilon: f64,
    mu: f64,
) -> Result<QuboInstance> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(QfsError::InvalidArgument(format!(
            "μ must be positive, got {mu}"
        )));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(QfsError::InvalidArgument(format!(
            "ε must be non-negative, got {epsilon}"
        )));
    }
    if importance.len() != qubo.n {
        return Err(QfsError::DimensionMismatch {
            expected: qubo.n,
            actual: importance.len(),
        });
    }
    let mut out = qubo.clone();
    for (i, &imp) in importance.values().iter().enumerate() {
        if alpha * imp < epsilon {
            out.q[i * out.n + i] = mu;
        }
    }
    let mut prov = qubo.provenance.unwrap_or(Provenance {
        alpha,
        epsilon: None,
        mu: None,
        penalty: None,
    });
    prov.epsilon = Some(epsilon);
    prov.mu = Some(mu);
    out.provenance = Some(prov);
    Ok(out)
}

/// The α-weighted QUBO plus the expanded penalty `λ(Σxᵢ − k)²`.
///
/// Each diagonal gains `λ(1 − 2k)`, each off-diagonal entry `λ` (so each
/// unordered pair gains `2λ` in the double sum), and the constant `λk²` is
/// kept as the offset.
pub fn build_penalty(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    alpha: f64,
    k: usize,
    lambda: f64,
) -> Result<QuboInstance> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(QfsError::InvalidArgument(format!(
            "λ must be positive, got {lambda}"
        )));
    }
    let mut out = build(importance, redundancy, alpha)?;
    let n = out.n;
    if k > n {
        return Err(QfsError::InvalidArgument(format!(
            "k = {k} exceeds n = {n}"
        )));
    }
    let kf = k as f64;
    for i in 0..n {
        for j in 0..n {
            out.q[i * n + j] += if i == j {
                lambda * (1.0 - 2.0 * kf)
            } else {
                lambda
            };
        }
    }
    out.offset = lambda * kf * kf;
    if let Some(p) = out.provenance.as_mut() {
        p.penalty = Some(Penalty { k, lambda });
    }
    Ok(out)
}

/// How μ is chosen at each α.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "value")]
pub enum MuPolicy {
    /// Largest entry of `Q(α)` before substitution. Falls back to the largest
    /// magnitude, then to 1, when that entry is not positive.
    #[default]
    MaxEntry,
    Fixed(f64),
}

impl MuPolicy {
    pub fn resolve(&self, qubo: &QuboInstance) -> f64 {
        match *self {
            MuPolicy::Fixed(mu) => mu,
            MuPolicy::MaxEntry => {
                let max = qubo.max_entry();
                if max > 0.0 {
                    max
                } else if qubo.max_abs() > 0.0 {
                    qubo.max_abs()
                } else {
                    1.0
                }
            }
        }
    }
}

/// Builds `Q(α)` and applies the ε/μ substitution with μ chosen by `policy`.
pub fn build_with_threshold(
    importance: &ImportanceVector,
    redundancy: &RedundancyMatrix,
    alpha: f64,
    epsilon: f64,
    policy: MuPolicy,
) -> Result<QuboInstance> {
    let q = build(importance, redundancy, alpha)?;
    let mu = policy.resolve(&q);
    apply_epsilon_mu(&q, importance, alpha, epsilon, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(imp: &[f64], rows: &[Vec<f64>]) -> (ImportanceVector, RedundancyMatrix) {
        (
            ImportanceVector(imp.to_vec()),
            RedundancyMatrix::from_rows(rows).unwrap(),
        )
    }

    #[test]
    fn build_at_endpoints() {
        let (i, r) = inputs(&[1.0, 2.0], &[vec![0.0, 0.5], vec![0.5, 0.0]]);
        let q1 = build(&i, &r, 1.0).unwrap();
        assert_eq!(q1.rows(), vec![vec![-1.0, 0.0], vec![0.0, -2.0]]);
        let q0 = build(&i, &r, 0.0).unwrap();
        assert_eq!(q0.rows(), r.rows());
    }

    #[test]
    fn build_half() {
        let (i, r) = inputs(&[1.0, 2.0], &[vec![0.0, 0.5], vec![0.5, 0.0]]);
        let q = build(&i, &r, 0.5).unwrap();
        assert_eq!(q.rows(), vec![vec![-0.5, 0.25], vec![0.25, -1.0]]);
        assert_eq!(q.energy(&[1, 1]).unwrap(), -1.0);
        assert_eq!(q.energy(&[0, 0]).unwrap(), 0.0);
        assert_eq!(q.energy(&[0, 1]).unwrap(), -1.0);
        assert_eq!(q.energy(&[1, 0]).unwrap(), -0.5);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let (i, r) = inputs(&[1.0, 2.0], &[vec![0.0, 0.5], vec![0.5, 0.0]]);
        assert!(build(&i, &r, 1.5).is_err());
        assert!(build(&i, &r, -0.1).is_err());
        let short = ImportanceVector(vec![1.0]);
        assert!(matches!(
            build(&short, &r, 0.5),
            Err(QfsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn energy_rejects_wrong_length() {
        let q = QuboInstance::zeros(3);
        assert!(q.energy(&[1, 0]).is_err());
        assert!(q.energy(&[1, 0, 2]).is_err());
    }

    #[test]
    fn epsilon_mu_rule() {
        let (i, r) = inputs(&[0.0, 1.0], &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let q = build(&i, &r, 0.5).unwrap();
        let t = apply_epsilon_mu(&q, &i, 0.5, 1e-8, 2.0).unwrap();
        assert_eq!(t.get(0, 0), 2.0);
        assert_eq!(t.get(1, 1), -0.5);

        let unchanged = apply_epsilon_mu(&q, &i, 0.5, 0.0, 2.0).unwrap();
        assert_eq!(unchanged.as_slice(), q.as_slice());

        let q0 = build(&i, &r, 0.0).unwrap();
        let all = apply_epsilon_mu(&q0, &i, 0.0, 1e-8, 3.0).unwrap();
        assert_eq!(all.get(0, 0), 3.0);
        assert_eq!(all.get(1, 1), 3.0);

        assert!(apply_epsilon_mu(&q, &i, 0.5, 1e-8, 0.0).is_err());
        assert!(apply_epsilon_mu(&q, &i, 0.5, 1e-8, -1.0).is_err());
    }

    #[test]
    fn penalty_single_variable() {
        let (i, r) = inputs(&[0.0], &[vec![0.0]]);
        let q = build_penalty(&i, &r, 0.5, 0, 1.0).unwrap();
        assert_eq!(q.rows(), vec![vec![1.0]]);
        assert_eq!(q.offset(), 0.0);
        assert_eq!(q.energy(&[0]).unwrap(), 0.0);
        assert_eq!(q.energy(&[1]).unwrap(), 1.0);
        assert!(build_penalty(&i, &r, 0.5, 0, 0.0).is_err());
        assert!(build_penalty(&i, &r, 0.5, 2, 1.0).is_err());
    }

    #[test]
    fn penalty_two_variables_one_hot_minima() {
        let (i, r) = inputs(&[0.0, 0.0], &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let q = build_penalty(&i, &r, 0.3, 1, 1.0).unwrap();
        let e: Vec<f64> = [[0, 0], [1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|x| q.energy(x).unwrap())
            .collect();
        assert_eq!(e, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn clamp_matches_full_energy() {
        let q = QuboInstance::from_rows(&[
            vec![-1.0, 2.0, 0.5],
            vec![2.0, 0.0, -3.0],
            vec![0.5, -3.0, 1.5],
        ])
        .unwrap();
        let x = [1, 0, 1];
        let sub = q.clamp(&[1], &x).unwrap();
        assert_eq!(sub.energy(&[0]).unwrap(), q.energy(&[1, 0, 1]).unwrap());
        assert_eq!(sub.energy(&[1]).unwrap(), q.energy(&[1, 1, 1]).unwrap());
        assert!(q.clamp(&[1, 1], &x).is_err());
        assert!(q.clamp(&[3], &x).is_err());
    }

    #[test]
    fn flip_delta_matches_energy_difference() {
        let q = QuboInstance::from_rows(&[
            vec![-1.0, 2.0, 0.5],
            vec![2.0, 0.0, -3.0],
            vec![0.5, -3.0, 1.5],
        ])
        .unwrap();
        for mask in 0..8u8 {
            let x: Vec<u8> = (0..3).map(|i| (mask >> i) & 1).collect();
            for i in 0..3 {
                let mut y = x.clone();
                y[i] ^= 1;
                let diff = q.energy(&y).unwrap() - q.energy(&x).unwrap();
                assert!((q.flip_delta(&x, i) - diff).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mu_policy() {
        let q = QuboInstance::from_rows(&[vec![-1.0, 0.25], vec![0.25, -2.0]]).unwrap();
        assert_eq!(MuPolicy::MaxEntry.resolve(&q), 0.25);
        let neg = QuboInstance::from_rows(&[vec![-1.0, 0.0], vec![0.0, -2.0]]).unwrap();
        assert_eq!(MuPolicy::MaxEntry.resolve(&neg), 2.0);
        assert_eq!(MuPolicy::MaxEntry.resolve(&QuboInstance::zeros(2)), 1.0);
        assert_eq!(MuPolicy::Fixed(0.7).resolve(&q), 0.7);
    }
}
