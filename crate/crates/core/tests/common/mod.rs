//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::HashMap;

use qfs::data::DiscretizedDataset;
use qfs::QuboInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symmetric QUBO with entries uniform on [-1, 1).
pub fn random_qubo(n: usize, seed: u64) -> QuboInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    QuboInstance::from_dense(n, q).unwrap()
}

/// Every bit vector of length `n`, bit `i` of the counter at position `i`.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u64..1 << n).map(move |m| (0..n).map(|i| ((m >> i) & 1) as u8).collect())
}

/// Small random binned dataset: returns `(bins, rows, labels)`.
pub fn random_binned(seed: u64) -> (usize, Vec<Vec<u32>>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_samples = rng.random_range(1..=200);
    let n_features = rng.random_range(2..=6);
    let bins = rng.random_range(1..=5u32);
    let classes = rng.random_range(1..=3u32);
    let rows = (0..n_samples)
        .map(|_| {
            (0..n_features)
                .map(|_| rng.random_range(1..=bins))
                .collect()
        })
        .collect();
    let labels = (0..n_samples)
        .map(|_| rng.random_range(0..classes))
        .collect();
    (bins as usize, rows, labels)
}

/// Plug-in mutual information `Σ p(a,b) ln(p(a,b) / (p(a) p(b)))` from raw
/// value pairs, counted with hash maps.
pub fn mi_oracle(a: &[u32], b: &[u32]) -> f64 {
    let n = a.len() as f64;
    let mut joint: HashMap<(u32, u32), f64> = HashMap::new();
    let mut pa: HashMap<u32, f64> = HashMap::new();
    let mut pb: HashMap<u32, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(x, y), &c)| {
            let p = c / n;
            p * (p / ((pa[&x] / n) * (pb[&y] / n))).ln()
        })
        .sum()
}

/// Largest deviation between the library's MI and the oracle on one dataset.
pub fn mi_max_error(bins: usize, rows: &[Vec<u32>], labels: &[u32]) -> f64 {
    let d = DiscretizedDataset::from_bins(bins, rows, labels.to_vec()).unwrap();
    let mi = qfs::MutualInformation::compute(&d);
    let col = |f: usize| rows.iter().map(|r| r[f]).collect::<Vec<u32>>();
    let n = d.n_features();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max((mi.importance.values()[i] - mi_oracle(&col(i), labels)).abs());
        worst = worst.max(mi.redundancy.get(i, i).abs());
        for j in 0..n {
            if i != j {
                worst = worst.max((mi.redundancy.get(i, j) - mi_oracle(&col(i), &col(j))).abs());
            }
        }
    }
    worst
}
