use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{QfsError, Result};

pub const DEFAULT_BINS: usize = 20;

/// Per-feature bin indices in `1..=B` plus the untouched labels.
///
/// Bins are held column-major so that pmf estimation walks contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedDataset {
    n_bins: usize,
    n_samples: usize,
    n_features: usize,
    num_classes: usize,
    columns: Vec<u32>,
    labels: Vec<u32>,
    bin_edges: Vec<Vec<f64>>,
}

impl DiscretizedDataset {
    /// Builds from explicit bin indices (`rows[sample][feature]`, each in `1..=n_bins`).
    /// No quantile edges are recorded.
    pub fn from_bins(n_bins: usize, rows: &[Vec<u32>], labels: Vec<u32>) -> Result<Self> {
        if n_bins < 1 {
            return Err(QfsError::InvalidArgument(
                "bin count must be positive".into(),
            ));
        }
        let n_samples = rows.len();
        if n_samples == 0 || rows[0].is_empty() {
            return Err(QfsError::InvalidArgument("empty bin matrix".into()));
        }
        if labels.len() != n_samples {
            return Err(QfsError::DimensionMismatch {
                expected: n_samples,
                actual: labels.len(),
            });
        }
        let n_features = rows[0].len();
        let mut columns = vec![0u32; n_samples * n_features];
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(QfsError::Malformed(format!(
                    "row {s} has {} bins, expected {n_features}",
                    row.len()
                )));
            }
            for (f, &b) in row.iter().enumerate() {
                if b < 1 || b as usize > n_bins {
                    return Err(QfsError::Malformed(format!(
                        "bin index {b} at row {s}, feature {f} outside 1..={n_bins}"
                    )));
                }
                columns[f * n_samples + s] = b;
            }
        }
        let num_classes = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(1);
        Ok(Self {
            n_bins,
            n_samples,
            n_features,
            num_classes,
            columns,
            labels,
            bin_edges: vec![Vec::new(); n_features],
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Bin indices of one feature over all samples.
    pub fn column(&self, feature: usize) -> &[u32] {
        &self.columns[feature * self.n_samples..(feature + 1) * self.n_samples]
    }

    pub fn bin(&self, sample: usize, feature: usize) -> u32 {
        self.columns[feature * self.n_samples + sample]
    }

    pub fn bin_edges(&self) -> &[Vec<f64>] {
        &self.bin_edges
    }

    /// Keeps only the listed features, in the given order.
    pub fn select_features(&self, features: &[usize]) -> Result<Self> {
        let mut columns = Vec::with_capacity(features.len() * self.n_samples);
        let mut bin_edges = Vec::with_capacity(features.len());
        for &f in features {
            if f >= self.n_features {
                return Err(QfsError::IndexOutOfRange {
                    what: "feature",
                    index: f,
                    len: self.n_features,
                });
            }
            columns.extend_from_slice(self.column(f));
            bin_edges.push(self.bin_edges[f].clone());
        }
        Ok(Self {
            n_features: features.len(),
            columns,
            bin_edges,
            labels: self.labels.clone(),
            ..*self
        })
    }
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct DiscretizedFile {
    B: usize,
    bin_edges: Vec<Vec<f64>>,
    bins: Vec<Vec<u32>>,
    labels: Vec<u32>,
}

impl Serialize for DiscretizedDataset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let bins = (0..self.n_samples)
            .map(|s| (0..self.n_features).map(|f| self.bin(s, f)).collect())
            .collect();
        DiscretizedFile {
            B: self.n_bins,
            bin_edges: self.bin_edges.clone(),
            bins,
            labels: self.labels.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscretizedDataset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = DiscretizedFile::deserialize(deserializer)?;
        let mut d = DiscretizedDataset::from_bins(file.B, &file.bins, file.labels)
            .map_err(serde::de::Error::custom)?;
        if !file.bin_edges.is_empty() {
            if file.bin_edges.len() != d.n_features {
                return Err(serde::de::Error::custom(format!(
                    "{} edge lists for {} features",
                    file.bin_edges.len(),
                    d.n_features
                )));
            }
            d.bin_edges = file.bin_edges;
        }
        Ok(d)
    }
}

/// The `B + 1` quantiles of `values` at fractions `ℓ/B`, linearly interpolated
/// between order statistics. The first edge is the minimum, the last the maximum.
pub fn quantile_edges(values: &[f64], n_bins: usize) -> Vec<f64> {
    assert!(!values.is_empty() && n_bins >= 1);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let last = sorted.len() - 1;
    (0..=n_bins)
        .map(|l| {
            // position (N-1)·ℓ/B split exactly into integer and fractional parts
            let scaled = last * l;
            let lo = scaled / n_bins;
            let rem = scaled % n_bins;
            if rem == 0 {
                sorted[lo]
            } else {
                let frac = rem as f64 / n_bins as f64;
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            }
        })
        .collect()
}

/// Bin index in `1..=B` of `v` given nondecreasing `edges` of length `B + 1`.
///
/// Bins `1..B` are half-open `[q(ℓ-1), q(ℓ))`, the last is closed. The index is
/// one plus the number of interior edges at or below `v`, which is the lowest
/// bin containing `v` when edges coincide.
fn bin_of(v: f64, edges: &[f64]) -> u32 {
    let interior = &edges[1..edges.len() - 1];
    (interior.partition_point(|&q| q <= v) + 1) as u32
}

/// Quantile-bins every feature of `dataset` into `n_bins` bins.
pub fn discretize(dataset: &Dataset, n_bins: usize) -> Result<DiscretizedDataset> {
    if n_bins < 2 {
        return Err(QfsError::InvalidArgument(format!(
            "bin count must be at least 2, got {n_bins}"
        )));
    }
    if n_bins > u32::MAX as usize {
        return Err(QfsError::InvalidArgument("bin count too large".into()));
    }
    let n_samples = dataset.n_samples();
    let n_features = dataset.n_features();
    let mut columns = Vec::with_capacity(n_samples * n_features);
    let mut bin_edges = Vec::with_capacity(n_features);
    for f in 0..n_features {
        let values = dataset.column(f);
        let edges = quantile_edges(&values, n_bins);
        columns.extend(values.iter().map(|&v| bin_of(v, &edges)));
        bin_edges.push(edges);
    }
    Ok(DiscretizedDataset {
        n_bins,
        n_samples,
        n_features,
        num_classes: dataset.num_classes(),
        columns,
        labels: dataset.labels().to_vec(),
        bin_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_feature(values: &[f64]) -> Dataset {
        let rows = values.iter().map(|&v| vec![v]).collect();
        Dataset::new(rows, vec![0; values.len()]).unwrap()
    }

    #[test]
    fn median_split_of_four_values() {
        // edges at fractions 0, 1/2, 1: (1, 2.5, 4)
        let d = discretize(&single_feature(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(d.bin_edges()[0], vec![1.0, 2.5, 4.0]);
        assert_eq!(d.column(0), &[1, 1, 2, 2]);
    }

    #[test]
    fn constant_feature_lands_in_one_bin() {
        for b in [2, 5, 20] {
            let d = discretize(&single_feature(&[7.0, 7.0, 7.0]), b).unwrap();
            let col = d.column(0);
            assert!(col.iter().all(|&x| x == col[0]));
        }
    }

    #[test]
    fn single_sample_in_final_bin() {
        let d = discretize(&single_feature(&[3.5]), 20).unwrap();
        assert_eq!(d.column(0), &[20]);
    }

    #[test]
    fn maximum_is_binned_in_last_bin() {
        let d = discretize(&single_feature(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]), 3).unwrap();
        assert_eq!(*d.column(0).last().unwrap(), 3);
        assert_eq!(d.column(0)[0], 1);
    }

    #[test]
    fn tie_goes_to_lowest_containing_bin() {
        // edges (0, 0, 0, 1): bins 1 and 2 are empty [0,0); 0 lands in bin 3
        let edges = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(bin_of(0.0, &edges), 3);
        assert_eq!(bin_of(1.0, &edges), 3);
        let edges = [0.0, 1.0, 1.0, 2.0];
        assert_eq!(bin_of(0.5, &edges), 1);
        assert_eq!(bin_of(1.0, &edges), 3);
    }

    #[test]
    fn rejects_single_bin() {
        assert!(discretize(&single_feature(&[1.0, 2.0]), 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let ds = Dataset::new(
            vec![vec![1.0, 5.0], vec![2.0, 4.0], vec![3.0, 3.0]],
            vec![0, 1, 0],
        )
        .unwrap();
        let d = discretize(&ds, 2).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with("{\"B\":2,\"bin_edges\""));
        let back: DiscretizedDataset = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    proptest! {
        #[test]
        fn every_bin_in_range_and_edges_sorted(
            values in proptest::collection::vec(-1e6f64..1e6, 1..200),
            b in 2usize..30,
        ) {
            let d = discretize(&single_feature(&values), b).unwrap();
            prop_assert!(d.column(0).iter().all(|&x| x >= 1 && x as usize <= b));
            prop_assert!(d.bin_edges()[0].windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn invariant_under_increasing_maps(
            values in proptest::collection::vec(-50.0f64..50.0, 1..150),
            b in 2usize..25,
            scale in 0.1f64..10.0,
            shift in -100.0f64..100.0,
        ) {
            // strictly increasing, nonlinear
            let map = |v: f64| scale * v.powi(3) + v.exp() * 0.001 + shift;
            let mapped: Vec<f64> = values.iter().map(|&v| map(v)).collect();
            let a = discretize(&single_feature(&values), b).unwrap();
            let m = discretize(&single_feature(&mapped), b).unwrap();
            prop_assert_eq!(a.column(0), m.column(0));
        }
    }
}
