//! Comparing feature subsets: swap distance, ground-truth recovery and the
//! distance graph between selection methods.

use serde::{Deserialize, Serialize};

use crate::error::{QfsError, Result};

/// Sorted set of feature indices out of `n` features.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSubset {
    indices: Vec<usize>,
    n: usize,
}

impl FeatureSubset {
    /// Accepts indices in any order; duplicates and indices `>= n` are errors.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(QfsError::InvalidArgument(format!(
                "feature {} listed twice",
                w[0]
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(QfsError::IndexOutOfRange {
                    what: "feature",
                    index: last,
                    len: n,
                });
            }
        }
        Ok(Self { indices, n })
    }

    pub fn from_bits(x: &[u8]) -> Self {
        Self {
            indices: crate::selection::indices_of(x),
            n: x.len(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut x = vec![0u8; self.n];
        for &i in &self.indices {
            x[i] = 1;
        }
        x
    }

    pub fn intersection_size(&self, other: &FeatureSubset) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditDistance {
    pub distance: usize,
    /// False when the subsets differ in size and `distance` is the rounded-up
    /// half Hamming distance rather than a swap count.
    pub swap_metric: bool,
}

fn same_dimension(a: &FeatureSubset, b: &FeatureSubset) -> Result<()> {
    if a.n != b.n {
        return Err(QfsError::DimensionMismatch {
            expected: a.n,
            actual: b.n,
        });
    }
    Ok(())
}

/// Number of swaps turning `a` into `b`, i.e. `|a \ b|` for equal sizes.
pub fn edit_distance(a: &FeatureSubset, b: &FeatureSubset) -> Result<EditDistance> {
    same_dimension(a, b)?;
    let common = a.intersection_size(b);
    let hamming = a.len() + b.len() - 2 * common;
    Ok(EditDistance {
        distance: hamming.div_ceil(2),
        swap_metric: a.len() == b.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub intersection: usize,
    pub distance: usize,
    pub swap_metric: bool,
    pub exact: bool,
}

pub fn recovery_report(selected: &FeatureSubset, truth: &FeatureSubset) -> Result<RecoveryReport> {
    let d = edit_distance(selected, truth)?;
    Ok(RecoveryReport {
        intersection: selected.intersection_size(truth),
        distance: d.distance,
        swap_metric: d.swap_metric,
        exact: selected == truth,
    })
}

/// A cluster of methods that selected the same subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub name: String,
    pub members: Vec<String>,
    pub features: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: String,
    pub b: String,
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

/// Complete graph of edit distances between named subsets. Subsets at
/// distance zero share one node named after all its members joined by `=`.
pub fn distance_graph(subsets: &[(String, FeatureSubset)]) -> Result<DistanceGraph> {
    if subsets.len() < 2 {
        return Err(QfsError::InvalidArgument(
            "distance graph needs at least two subsets".into(),
        ));
    }
    let (_, first) = &subsets[0];
    for (name, s) in &subsets[1..] {
        same_dimension(first, s)?;
        if s.len() != first.len() {
            return Err(QfsError::InvalidArgument(format!(
                "subset '{name}' has {} features, expected {}",
                s.len(),
                first.len()
            )));
        }
    }

    let mut clusters: Vec<(Vec<String>, &FeatureSubset)> = Vec::new();
    for (name, s) in subsets {
        match clusters.iter_mut().find(|(_, rep)| *rep == s) {
            Some((members, _)) => members.push(name.clone()),
            None => clusters.push((vec![name.clone()], s)),
        }
    }
    let nodes: Vec<GraphNode> = clusters
        .iter()
        .map(|(members, s)| GraphNode {
            name: members.join("="),
            members: members.clone(),
            features: s.indices().to_vec(),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            edges.push(GraphEdge {
                a: nodes[i].name.clone(),
                b: nodes[j].name.clone(),
                w: edit_distance(clusters[i].1, clusters[j].1)?.distance,
            });
        }
    }
    Ok(DistanceGraph { nodes, edges })
}
