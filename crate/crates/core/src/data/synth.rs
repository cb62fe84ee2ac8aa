//! Synthetic binary classification data with a known informative subset.
//!
//! `d_inf` feature indices are drawn uniformly. The informative block and the
//! remaining block are each multivariate normal with covariance `σσᵀ ⊙ C`,
//! where `C` is a random correlation matrix, `σᵢ = exp(N(0,1))` and the means
//! are `N(0, 10²)`. The two blocks are independent. A weight vector
//! `w ~ N(0, I)` over the informative block defines `z = wᵀx_I`; a sample is
//! labelled 0 when `z` is below the sample mean of `z` and 1 otherwise.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::correlation::onion;
use super::Dataset;
use crate::error::{QfsError, Result};
use crate::rng::{stream_rng, Stream};

const MEAN_STD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Total number of features.
    pub n: usize,
    /// Number of informative features.
    pub d_inf: usize,
    /// Number of samples.
    pub n_samples: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(n: usize, d_inf: usize, n_samples: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            n,
            d_inf,
            n_samples,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_inf < 1 || self.d_inf > self.n {
            return Err(QfsError::InvalidArgument(format!(
                "need 1 <= d_inf <= n, got d_inf={} n={}",
                self.d_inf, self.n
            )));
        }
        if self.n_samples < 1 {
            return Err(QfsError::InvalidArgument("need at least one sample".into()));
        }
        Ok(())
    }
}

struct Block {
    indices: Vec<usize>,
    mean: DVector<f64>,
    chol: DMatrix<f64>,
}

impl Block {
    fn new(indices: Vec<usize>, means: &[f64], scales: &[f64], corr: DMatrix<f64>) -> Result<Self> {
        let d = indices.len();
        let mean = DVector::from_iterator(d, indices.iter().map(|&i| means[i]));
        let cov = DMatrix::from_fn(d, d, |r, c| {
            scales[indices[r]] * scales[indices[c]] * corr[(r, c)]
        });
        let chol = if d == 0 {
            DMatrix::zeros(0, 0)
        } else {
            cov.cholesky()
                .ok_or(QfsError::NotPositiveDefinite("synthetic covariance"))?
                .l()
        };
        Ok(Self {
            indices,
            mean,
            chol,
        })
    }

    fn sample_into<R: Rng>(&self, row: &mut [f64], rng: &mut R) {
        let d = self.indices.len();
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for r in 0..d {
            let mut v = self.mean[r];
            for (c, zc) in z.iter().enumerate().take(r + 1) {
                v += self.chol[(r, c)] * zc;
            }
            row[self.indices[r]] = v;
        }
    }
}

/// Generates a dataset and its sorted informative feature indices.
pub fn gen_synth(spec: &SynthSpec) -> Result<(Dataset, Vec<usize>)> {
    spec.validate()?;
    let SynthSpec {
        n,
        d_inf,
        n_samples,
        seed,
    } = *spec;

    let mut informative =
        index::sample(&mut stream_rng(seed, Stream::InformativeIndices), n, d_inf).into_vec();
    informative.sort_unstable();
    let rest: Vec<usize> = (0..n).filter(|i| !informative.contains(i)).collect();

    let corr_inf = onion(d_inf, &mut stream_rng(seed, Stream::CorrelationInformative))?;
    let corr_rest = if rest.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        onion(rest.len(), &mut stream_rng(seed, Stream::CorrelationRest))?
    };

    let mean_dist = Normal::new(0.0, MEAN_STD).unwrap();
    let mut mean_rng = stream_rng(seed, Stream::Means);
    let means: Vec<f64> = (0..n).map(|_| mean_dist.sample(&mut mean_rng)).collect();
    let mut scale_rng = stream_rng(seed, Stream::Scales);
    let scales: Vec<f64> = (0..n).map(|_| rng_normal(&mut scale_rng).exp()).collect();

    let inf_block = Block::new(informative.clone(), &means, &scales, corr_inf)?;
    let rest_block = Block::new(rest, &means, &scales, corr_rest)?;

    let mut sample_rng = stream_rng(seed, Stream::Samples);
    let mut features = vec![0.0; n_samples * n];
    for row in features.chunks_exact_mut(n) {
        inf_block.sample_into(row, &mut sample_rng);
        rest_block.sample_into(row, &mut sample_rng);
    }

    let mut weight_rng = stream_rng(seed, Stream::LabelWeights);
    let weights: Vec<f64> = (0..d_inf).map(|_| rng_normal(&mut weight_rng)).collect();
    let z: Vec<f64> = features
        .chunks_exact(n)
        .map(|row| {
            informative
                .iter()
                .zip(&weights)
                .map(|(&i, w)| w * row[i])
                .sum()
        })
        .collect();
    let mean_z = z.iter().sum::<f64>() / n_samples as f64;
    let labels: Vec<u32> = z.iter().map(|&v| u32::from(v >= mean_z)).collect();

    let present = [labels.contains(&0), labels.contains(&1)];
    let (labels, label_names) = match present {
        [true, true] => (labels, vec!["0".to_string(), "1".to_string()]),
        // a single sample (or degenerate weights) yields one class only
        [false, true] => (vec![0; n_samples], vec!["1".to_string()]),
        _ => (vec![0; n_samples], vec!["0".to_string()]),
    };

    let names = (0..n).map(|i| Some(format!("f{i}"))).collect();
    let dataset = Dataset::from_parts(features, labels, n, names, label_names);
    Ok((dataset, informative))
}

fn rng_normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
