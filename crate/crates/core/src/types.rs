//! Shared domain types: genotypes and search spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genotype {
    /// Real-valued decision vector.
    Continuous(Vec<f64>),
    /// Permutation of `0..n`.
    Permutation(Vec<usize>),
}

impl Genotype {
    pub fn len(&self) -> usize {
        match self {
            Genotype::Continuous(v) => v.len(),
            Genotype::Permutation(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_continuous(&self) -> Result<&[f64]> {
        match self {
            Genotype::Continuous(v) => Ok(v),
            Genotype::Permutation(_) => Err(Error::Domain(
                "expected a continuous genotype, got a permutation".into(),
            )),
        }
    }

    pub fn as_permutation(&self) -> Result<&[usize]> {
        match self {
            Genotype::Permutation(p) => Ok(p),
            Genotype::Continuous(_) => Err(Error::Domain(
                "expected a permutation genotype, got a continuous vector".into(),
            )),
        }
    }

    /// Flat real-valued view used as surrogate-model input.
    pub fn features(&self) -> Vec<f64> {
        match self {
            Genotype::Continuous(v) => v.clone(),
            Genotype::Permutation(p) => p.iter().map(|&i| i as f64).collect(),
        }
    }

    /// Exact-equality key for deduplication. Continuous values are compared
    /// by bit pattern, so `-0.0 != 0.0` and NaNs never merge.
    pub fn dedup_key(&self) -> Vec<u64> {
        match self {
            Genotype::Continuous(v) => v.iter().map(|x| x.to_bits()).collect(),
            Genotype::Permutation(p) => p.iter().map(|&i| i as u64).collect(),
        }
    }
}

/// Checks that `perm` is a permutation of `0..perm.len()`.
pub fn is_valid_permutation(perm: &[usize]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// The decision space of a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSpace {
    /// Box-constrained real vectors; one `(lo, hi)` pair per dimension.
    Continuous { bounds: Vec<(f64, f64)> },
    /// Permutations of `0..n`.
    Permutation { n: usize },
    /// Weight vectors of length `n` repaired to sum 1 with entries >= `min_weight`.
    Simplex { n: usize, min_weight: f64 },
}

impl SearchSpace {
    pub fn continuous_uniform(dims: usize, lo: f64, hi: f64) -> Self {
        SearchSpace::Continuous {
            bounds: vec![(lo, hi); dims],
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            SearchSpace::Continuous { bounds } => bounds.len(),
            SearchSpace::Permutation { n } => *n,
            SearchSpace::Simplex { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SearchSpace::Continuous { bounds } => {
                if bounds.iter().any(|(lo, hi)| !(lo < hi)) {
                    return Err(Error::Config("continuous bounds must satisfy lo < hi".into()));
                }
            }
            SearchSpace::Permutation { n } => {
                if *n < 2 {
                    return Err(Error::Config("permutation space needs n >= 2".into()));
                }
            }
            SearchSpace::Simplex { n, min_weight } => {
                if *n < 2 {
                    return Err(Error::Config("simplex space needs n >= 2".into()));
                }
                if !(0.0..1.0 / *n as f64).contains(min_weight) {
                    return Err(Error::Config(format!(
                        "simplex min_weight must lie in [0, 1/{n})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that a genotype conforms to this space.
    pub fn check_member(&self, g: &Genotype) -> Result<()> {
        match (self, g) {
            (SearchSpace::Continuous { bounds }, Genotype::Continuous(x)) => {
                if x.len() != bounds.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "genotype has {} dims, space has {}",
                        x.len(),
                        bounds.len()
                    )));
                }
                for (i, (&xi, &(lo, hi))) in x.iter().zip(bounds).enumerate() {
                    if !(lo..=hi).contains(&xi) || !xi.is_finite() {
                        return Err(Error::Domain(format!(
                            "x[{i}] = {xi} outside bounds [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            (SearchSpace::Permutation { n }, Genotype::Permutation(p)) => {
                if p.len() != *n {
                    return Err(Error::DimensionMismatch(format!(
                        "permutation has length {}, space has n = {n}",
                        p.len()
                    )));
                }
                if !is_valid_permutation(p) {
                    return Err(Error::Domain("not a permutation of 0..n".into()));
                }
                Ok(())
            }
            (SearchSpace::Simplex { n, .. }, Genotype::Continuous(w)) => {
                if w.len() != *n {
                    return Err(Error::DimensionMismatch(format!(
                        "weight vector has length {}, space has n = {n}",
                        w.len()
                    )));
                }
                for (i, &wi) in w.iter().enumerate() {
                    if !(0.0..=1.0).contains(&wi) || !wi.is_finite() {
                        return Err(Error::Domain(format!("w[{i}] = {wi} outside [0, 1]")));
                    }
                }
                Ok(())
            }
            _ => Err(Error::Domain("genotype kind does not match search space".into())),
        }
    }
}
