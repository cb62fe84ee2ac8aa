//! Empirical pmfs and plug-in mutual information on discretized data.
//!
//! All logarithms are natural, so values are in nats. Cells with zero joint
//! mass contribute nothing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DiscretizedDataset;
use crate::error::{QfsError, Result};

/// Dense row-major probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl PmfTable {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// Per-feature mutual information with the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImportanceVector(pub Vec<f64>);

impl ImportanceVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Pairwise mutual information between features; symmetric with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyMatrix {
    n: usize,
    values: Vec<f64>,
}

impl RedundancyMatrix {
    /// Builds from a full `n×n` row-major matrix, which must be symmetric with
    /// a zero diagonal and non-negative entries.
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(QfsError::DimensionMismatch {
                expected: n * n,
                actual: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(QfsError::InvalidArgument(format!(
                    "redundancy diagonal entry {i} is nonzero"
                )));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if v != values[j * n + i] {
                    return Err(QfsError::InvalidArgument(format!(
                        "redundancy matrix is not symmetric at ({i}, {j})"
                    )));
                }
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(QfsError::InvalidArgument(format!(
                        "redundancy entry ({i}, {j}) = {v} is not a finite non-negative number"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QfsError::Malformed(
                "redundancy matrix is not square".into(),
            ));
        }
        Self::from_dense(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }
}

impl Serialize for RedundancyMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RedundancyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        RedundancyMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// The importance vector and redundancy matrix of one dataset, as written to
/// and read from `{importance, redundancy}` JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    pub importance: ImportanceVector,
    pub redundancy: RedundancyMatrix,
}

impl MutualInformation {
    pub fn new(importance: ImportanceVector, redundancy: RedundancyMatrix) -> Result<Self> {
        if importance.len() != redundancy.n() {
            return Err(QfsError::DimensionMismatch {
                expected: redundancy.n(),
                actual: importance.len(),
            });
        }
        Ok(Self {
            importance,
            redundancy,
        })
    }

    pub fn compute(d: &DiscretizedDataset) -> Self {
        Self {
            importance: importance(d),
            redundancy: redundancy(d),
        }
    }

    pub fn n(&self) -> usize {
        self.importance.len()
    }
}

fn check_feature(d: &DiscretizedDataset, i: usize) -> Result<()> {
    if i >= d.n_features() {
        return Err(QfsError::IndexOutOfRange {
            what: "feature",
            index: i,
            len: d.n_features(),
        });
    }
    Ok(())
}

fn feature_label_counts(d: &DiscretizedDataset, i: usize) -> Vec<u64> {
    let c = d.num_classes();
    let mut counts = vec![0u64; d.n_bins() * c];
    for (&b, &y) in d.column(i).iter().zip(d.labels()) {
        counts[(b as usize - 1) * c + y as usize] += 1;
    }
    counts
}

fn feature_pair_counts(d: &DiscretizedDataset, i: usize, j: usize) -> Vec<u64> {
    let b = d.n_bins();
    let mut counts = vec![0u64; b * b];
    for (&bi, &bj) in d.column(i).iter().zip(d.column(j)) {
        counts[(bi as usize - 1) * b + (bj as usize - 1)] += 1;
    }
    counts
}

fn to_pmf(counts: &[u64], rows: usize, cols: usize, total: usize) -> PmfTable {
    let total = total as f64;
    PmfTable {
        rows,
        cols,
        values: counts.iter().map(|&c| c as f64 / total).collect(),
    }
}

/// Joint pmf of feature `i`'s bin (rows, bin 1 first) and the label (columns).
pub fn joint_pmf_feature_label(d: &DiscretizedDataset, i: usize) -> Result<PmfTable> {
    check_feature(d, i)?;
    Ok(to_pmf(
        &feature_label_counts(d, i),
        d.n_bins(),
        d.num_classes(),
        d.n_samples(),
    ))
}

/// Joint pmf of the bins of features `i` (rows) and `j` (columns).
pub fn joint_pmf_feature_pair(d: &DiscretizedDataset, i: usize, j: usize) -> Result<PmfTable> {
    check_feature(d, i)?;
    check_feature(d, j)?;
    if i == j {
        return Err(QfsError::InvalidArgument(format!(
            "pairwise pmf needs two distinct features, got {i} twice"
        )));
    }
    Ok(to_pmf(
        &feature_pair_counts(d, i, j),
        d.n_bins(),
        d.n_bins(),
        d.n_samples(),
    ))
}

/// Plug-in mutual information of a contingency table of counts.
fn mi_from_counts(counts: &[u64], rows: usize, cols: usize, total: usize) -> f64 {
    let mut row_sums = vec![0u64; rows];
    let mut col_sums = vec![0u64; cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = counts[r * cols + c];
            row_sums[r] += v;
            col_sums[c] += v;
        }
    }
    let n = total as f64;
    let mut mi = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let joint = counts[r * cols + c];
            if joint == 0 {
                continue;
            }
            let joint = joint as f64;
            let ratio = joint * n / (row_sums[r] as f64 * col_sums[c] as f64);
            mi += joint / n * ratio.ln();
        }
    }
    // rounding can push independent tables a hair below zero
    mi.max(0.0)
}

/// Mutual information of every feature with the label.
pub fn importance(d: &DiscretizedDataset) -> ImportanceVector {
    let values = (0..d.n_features())
        .into_par_iter()
        .map(|i| {
            mi_from_counts(
                &feature_label_counts(d, i),
                d.n_bins(),
                d.num_classes(),
                d.n_samples(),
            )
        })
        .collect();
    ImportanceVector(values)
}

/// Pairwise mutual information between features.
///
/// Each unordered pair is computed once and mirrored, so the result is exactly
/// symmetric; the diagonal is zero.
pub fn redundancy(d: &DiscretizedDataset) -> RedundancyMatrix {
    let n = d.n_features();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mis: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            mi_from_counts(
                &feature_pair_counts(d, i, j),
                d.n_bins(),
                d.n_bins(),
                d.n_samples(),
            )
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), &v) in pairs.iter().zip(&mis) {
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    RedundancyMatrix { n, values }
}
