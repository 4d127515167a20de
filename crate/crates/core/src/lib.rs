//! Offline multi-objective optimization toolkit.
//!
//! The pipeline: collect an offline dataset on a true objective function with
//! amateur-survival MOEAs, construct a training set, fit a surrogate (MLP
//! family or per-objective Gaussian processes), search inside the frozen
//! surrogate with an MOEA, and score the resulting candidate batch with
//! hypervolume under nadir reference points and percentile filtering.
//!
//! Modules map onto pipeline stages:
//! - [`pareto`] — dominance, sorting, crowding, hypervolume, IGD, selection
//! - [`problems`] — oracle objective functions and instance generators
//! - [`moea`] — genetic operators and the NSGA-II / MOEA/D / NSGA-III engines
//! - [`datagen`] — dataset collection, training-set construction, persistence
//! - [`nn`] — MLP surrogates, Adam, GradNorm / PcGrad, data pruning
//! - [`gp`] — exact Gaussian-process surrogates with RBF and Kendall kernels
//! - [`search`] — surrogate-space search and one-shot batch evaluation

pub mod datagen;
pub mod error;
pub mod moea;
pub mod problems;
pub mod pareto;
pub mod types;

pub use error::{Error, Result};
pub use types::{Genotype, SearchSpace};
