//! Multi-objective evolutionary algorithms: NSGA-II, MOEA/D, and NSGA-III
//! over a shared population representation and operator set. The engines are
//! used both for data collection on true objectives and for searching inside
//! frozen surrogates.

mod moead;
mod nsga2;
mod nsga3;
pub mod operators;

pub use moead::moead_run;
pub use nsga2::nsga2_run;
pub use nsga3::nsga3_run;
pub use operators::{
    inversion_mutation, order_crossover, pm_mutation, random_genotypes, sbx_crossover,
    start_from_zero_repair, variation, OperatorConfig,
};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::{crowding_distance, non_dominated_sort, nsga2_select};
use crate::problems::Evaluator;
use crate::types::Genotype;

/// The MOEA working set: genotypes, objective vectors, and the NSGA-II
/// metrics kept consistent with the pareto module.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Genotype>,
    pub objectives: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
    pub crowding: Vec<f64>,
}

impl Population {
    /// Evaluates `members` (in parallel, results in member order) and
    /// computes ranks and crowding distances.
    pub fn from_members(members: Vec<Genotype>, evaluator: &dyn Evaluator) -> Result<Self> {
        let objectives = evaluate_all(&members, evaluator)?;
        let mut pop = Population { members, objectives, ranks: Vec::new(), crowding: Vec::new() };
        pop.refresh_metrics()?;
        Ok(pop)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Recomputes ranks and crowding distances from the objectives.
    pub fn refresh_metrics(&mut self) -> Result<()> {
        let partition = non_dominated_sort(&self.objectives)?;
        self.crowding = vec![0.0; self.len()];
        for front in &partition.fronts {
            let objs: Vec<Vec<f64>> = front.iter().map(|&i| self.objectives[i].clone()).collect();
            for (&i, d) in front.iter().zip(crowding_distance(&objs)) {
                self.crowding[i] = d;
            }
        }
        self.ranks = partition.ranks;
        Ok(())
    }

    /// Index list of the current first front.
    pub fn first_front(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.ranks[i] == 0).collect()
    }
}

pub(crate) fn evaluate_all(
    members: &[Genotype],
    evaluator: &dyn Evaluator,
) -> Result<Vec<Vec<f64>>> {
    members.par_iter().map(|g| evaluator.evaluate(g)).collect()
}

/// Survivor-selection behavior of the generational engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalPolicy {
    /// The algorithm's own elitist survival.
    Standard,
    /// With probability `p` the standard survival; otherwise survivors are
    /// drawn uniformly without replacement, admitting inferior solutions.
    Amateur { p: f64 },
}

impl SurvivalPolicy {
    pub fn validate(&self) -> Result<()> {
        if let SurvivalPolicy::Amateur { p } = self {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Config(format!("amateur probability must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    /// Decides whether this survival event takes the standard elitist branch.
    pub(crate) fn take_standard_branch(&self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            SurvivalPolicy::Standard => true,
            SurvivalPolicy::Amateur { p } => rng.random::<f64>() < *p,
        }
    }
}

/// Selects `mu` survivor indices from pooled objectives under `policy`, with
/// `nsga2_select` as the standard branch.
pub(crate) fn select_survivors(
    policy: SurvivalPolicy,
    pool: &[Vec<f64>],
    mu: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if pool.len() < mu {
        return Err(Error::InvalidArgument(format!(
            "survival pool of {} cannot fill a population of {mu}",
            pool.len()
        )));
    }
    if policy.take_standard_branch(rng) {
        nsga2_select(pool, mu)
    } else {
        Ok(rand::seq::index::sample(rng, pool.len(), mu).into_vec())
    }
}

/// Uniform survivor sampling used by the amateur branch of niching/decomposition
/// engines where the standard branch is not `nsga2_select`.
pub(crate) fn uniform_survivors(
    pool_len: usize,
    mu: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    rand::seq::index::sample(rng, pool_len, mu).into_vec()
}

/// Binary tournament on (rank asc, crowding desc, index asc).
pub(crate) fn binary_tournament(pop: &Population, rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..pop.len());
    let b = rng.random_range(0..pop.len());
    if pop.ranks[a] != pop.ranks[b] {
        return if pop.ranks[a] < pop.ranks[b] { a } else { b };
    }
    if pop.crowding[a] != pop.crowding[b] {
        return if pop.crowding[a] > pop.crowding[b] { a } else { b };
    }
    a.min(b)
}

/// The three collection/search engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Nsga2,
    Moead,
    Nsga3,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nsga2" => Ok(Algorithm::Nsga2),
            "moead" => Ok(Algorithm::Moead),
            "nsga3" => Ok(Algorithm::Nsga3),
            _ => Err(Error::Config(format!("unknown algorithm '{s}' (expected nsga2|moead|nsga3)"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Moead => "moead",
            Algorithm::Nsga3 => "nsga3",
        })
    }
}

/// Runs `algorithm` for `generations` iterations, invoking `on_generation`
/// after the initial evaluation (generation 0) and after every survival step.
#[allow(clippy::too_many_arguments)]
pub fn run_algorithm(
    algorithm: Algorithm,
    evaluator: &dyn Evaluator,
    init: Population,
    mu: usize,
    generations: usize,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
    survival: SurvivalPolicy,
    on_generation: &mut dyn FnMut(usize, &Population),
) -> Result<Population> {
    cfg.validate()?;
    survival.validate()?;
    if init.len() != mu {
        return Err(Error::InvalidArgument(format!(
            "initial population of {} does not match mu = {mu}",
            init.len()
        )));
    }
    match algorithm {
        Algorithm::Nsga2 => nsga2::run(evaluator, init, mu, generations, cfg, rng, survival, on_generation),
        Algorithm::Moead => moead::run(evaluator, init, mu, generations, cfg, rng, survival, on_generation),
        Algorithm::Nsga3 => nsga3::run(evaluator, init, mu, generations, cfg, rng, survival, on_generation),
    }
}
