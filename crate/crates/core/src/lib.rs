//! Feature selection by mutual-information QUBOs.
//!
//! The pipeline discretizes a labelled dataset, estimates feature importance
//! `I(Xᵢ; Y)` and pairwise redundancy `I(Xᵢ; Xⱼ)`, folds both into a QUBO
//! weighted by `α`, and searches `α` until the optimal subset has the
//! requested size.

#![allow(clippy::needless_range_loop)]

pub mod data;
pub mod error;
pub mod eval;
pub mod infotheory;
pub mod manifest;
pub mod qubo;
pub mod rng;
pub mod selection;
pub mod solve;

pub use data::{Dataset, DiscretizedDataset};
pub use error::{QfsError, Result};
pub use eval::FeatureSubset;
pub use infotheory::{ImportanceVector, MutualInformation, RedundancyMatrix};
pub use manifest::RunManifest;
pub use qubo::{IsingInstance, MuPolicy, QuboInstance};
pub use selection::{select_k, sweep_alpha, SelectionResult, Threshold};
pub use solve::{SampleSet, SolverConfig, SolverKind};
