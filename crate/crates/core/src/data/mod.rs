//! Tabular datasets: ingestion, quantile binning and synthetic generators.

mod correlation;
mod csv_io;
mod discretize;
mod synth;

pub use correlation::gen_correlation_matrix;
pub use csv_io::{load_csv, write_csv, write_csv_to, write_csv_with_comment, LabelColumn};
pub use discretize::{discretize, quantile_edges, DiscretizedDataset, DEFAULT_BINS};
pub use synth::{gen_synth, SynthSpec};

use crate::error::{QfsError, Result};

/// Real-valued features with integer class labels.
///
/// Features are stored row-major (`N` rows of `n` values). Labels are dense
/// codes in `0..num_classes()`; `label_names[c]` is the original spelling of
/// code `c` as it appeared in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u32>,
    n_samples: usize,
    n_features: usize,
    feature_names: Vec<Option<String>>,
    label_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from rows of features and dense labels.
    ///
    /// Labels must already be contiguous codes `0..c`; use [`Dataset::with_raw_labels`]
    /// to remap arbitrary integers.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<u32>) -> Result<Self> {
        let n_samples = rows.len();
        if n_samples == 0 {
            return Err(QfsError::InvalidArgument("dataset has no samples".into()));
        }
        let n_features = rows[0].len();
        if n_features == 0 {
            return Err(QfsError::InvalidArgument("dataset has no features".into()));
        }
        if labels.len() != n_samples {
            return Err(QfsError::DimensionMismatch {
                expected: n_samples,
                actual: labels.len(),
            });
        }
        let mut features = Vec::with_capacity(n_samples * n_features);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(QfsError::Malformed(format!(
                    "row {r} has {} values, expected {n_features}",
                    row.len()
                )));
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(QfsError::Malformed(format!(
                    "row {r}, column {c}: non-finite value"
                )));
            }
            features.extend_from_slice(row);
        }
        let num_classes = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; num_classes];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(QfsError::InvalidArgument(
                "labels are not contiguous codes 0..c".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            n_samples,
            n_features,
            feature_names: vec![None; n_features],
            label_names: (0..num_classes).map(|c| c.to_string()).collect(),
        })
    }

    /// Builds a dataset from arbitrary non-negative integer labels, remapping
    /// them in ascending order onto `0..c`.
    pub fn with_raw_labels(rows: Vec<Vec<f64>>, raw_labels: &[u64]) -> Result<Self> {
        let mut distinct: Vec<u64> = raw_labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw_labels
            .iter()
            .map(|l| distinct.binary_search(l).unwrap() as u32)
            .collect();
        let mut d = Self::new(rows, labels)?;
        d.label_names = distinct.iter().map(|l| l.to_string()).collect();
        Ok(d)
    }

    pub(crate) fn from_parts(
        features: Vec<f64>,
        labels: Vec<u32>,
        n_features: usize,
        feature_names: Vec<Option<String>>,
        label_names: Vec<String>,
    ) -> Self {
        let n_samples = labels.len();
        debug_assert_eq!(features.len(), n_samples * n_features);
        Self {
            features,
            labels,
            n_samples,
            n_features,
            feature_names,
            label_names,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn feature_names(&self) -> &[Option<String>] {
        &self.feature_names
    }

    pub fn set_feature_names(&mut self, names: Vec<Option<String>>) -> Result<()> {
        if names.len() != self.n_features {
            return Err(QfsError::DimensionMismatch {
                expected: self.n_features,
                actual: names.len(),
            });
        }
        self.feature_names = names;
        Ok(())
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        &self.features[sample * self.n_features..(sample + 1) * self.n_features]
    }

    pub fn value(&self, sample: usize, feature: usize) -> f64 {
        self.features[sample * self.n_features + feature]
    }

    /// Copies one feature column out of the row-major store.
    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.n_samples)
            .map(|s| self.value(s, feature))
            .collect()
    }
}
