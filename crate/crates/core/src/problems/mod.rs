//! Ground-truth objective functions, true Pareto-front samplers for the
//! synthetic suites, and seeded instance generators for the combinatorial
//! tasks. All evaluators are pure and use the minimization convention
//! (maximization objectives are pre-negated).

mod moco;
mod synthetic;

pub use moco::{
    generate_instance, mo_cvrp_eval, mo_kp_eval, mo_tsp_eval, portfolio_eval, portfolio_repair,
    CombinatorialInstance, InstanceKind, CVRP_CAPACITY, KP_CAPACITY, PORTFOLIO_ASSETS,
    PORTFOLIO_MIN_WEIGHT,
};
pub use synthetic::{das_dennis, das_dennis_at_least};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Genotype, SearchSpace};

/// Static description of a task: dimensions, objective count, search space,
/// catalog reference point, and whether an analytic Pareto front is known.
///
/// Catalog reference points are fixed constants per task family; pipelines
/// score hypervolume against the nadir-derived reference stored with each
/// collected dataset, not against these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub dims: usize,
    pub num_objectives: usize,
    pub space: SearchSpace,
    pub reference_point: Vec<f64>,
    pub has_true_front: bool,
}

impl TaskSpec {
    /// Looks a task up by name. Combinatorial tasks are named
    /// `bi-tsp-{20,50,100,500}`, `bi-cvrp-{20,50,100}`, `bi-kp-{50,100,200}`,
    /// and `portfolio`.
    pub fn by_name(name: &str) -> Result<TaskSpec> {
        let catalog_entry = |dims: usize,
                             m: usize,
                             space: SearchSpace,
                             reference: &[f64],
                             has_front: bool| TaskSpec {
            name: name.to_string(),
            dims,
            num_objectives: m,
            space,
            reference_point: reference.to_vec(),
            has_true_front: has_front,
        };

        let unit = |d: usize| SearchSpace::continuous_uniform(d, 0.0, 1.0);
        let spec = match name {
            "dtlz1" => catalog_entry(7, 3, unit(7), &[558.21, 552.30, 568.36], true),
            "dtlz2" => catalog_entry(10, 3, unit(10), &[2.77, 2.78, 2.93], true),
            "dtlz3" => catalog_entry(10, 3, unit(10), &[1703.72, 1605.54, 1670.48], true),
            "dtlz4" => catalog_entry(10, 3, unit(10), &[3.03, 2.83, 2.78], true),
            "dtlz5" => catalog_entry(10, 3, unit(10), &[2.65, 2.61, 2.70], true),
            "dtlz6" => catalog_entry(10, 3, unit(10), &[9.80, 9.78, 9.78], true),
            "dtlz7" => catalog_entry(10, 3, unit(10), &[1.10, 1.10, 33.43], true),
            "zdt1" => catalog_entry(30, 2, unit(30), &[1.10, 8.58], true),
            "zdt2" => catalog_entry(30, 2, unit(30), &[1.10, 9.59], true),
            "zdt3" => catalog_entry(30, 2, unit(30), &[1.10, 8.74], true),
            "zdt4" => {
                let mut bounds = vec![(-5.0, 5.0); 10];
                bounds[0] = (0.0, 1.0);
                catalog_entry(10, 2, SearchSpace::Continuous { bounds }, &[1.10, 300.42], true)
            }
            "zdt6" => catalog_entry(10, 2, unit(10), &[1.07, 10.27], true),
            "omni-test" => catalog_entry(2, 2, SearchSpace::continuous_uniform(2, 0.0, 6.0), &[2.40, 2.40], true),
            "vlmop1" => catalog_entry(1, 2, SearchSpace::continuous_uniform(1, -2.0, 2.0), &[4.0, 4.0], true),
            "vlmop2" => catalog_entry(6, 2, SearchSpace::continuous_uniform(6, -2.0, 2.0), &[1.10, 1.10], true),
            "vlmop3" => catalog_entry(2, 3, SearchSpace::continuous_uniform(2, -3.0, 3.0), &[9.07, 66.62, 0.23], false),
            "portfolio" => catalog_entry(
                PORTFOLIO_ASSETS,
                2,
                SearchSpace::Simplex {
                    n: PORTFOLIO_ASSETS,
                    min_weight: PORTFOLIO_MIN_WEIGHT,
                },
                &[0.29, -0.13],
                false,
            ),
            _ => {
                if let Some((kind, n)) = moco::parse_task_name(name) {
                    let reference = match kind {
                        InstanceKind::BiTsp => vec![255.18, 248.44],
                        InstanceKind::BiCvrp => vec![49.19, 9.58],
                        InstanceKind::BiKp => vec![-7.85, -8.99],
                        InstanceKind::Portfolio => unreachable!("portfolio handled above"),
                    };
                    catalog_entry(n, 2, SearchSpace::Permutation { n }, &reference, false)
                } else {
                    return Err(Error::Unsupported(format!("unknown task '{name}'")));
                }
            }
        };
        Ok(spec)
    }

    /// All task names in the catalog.
    pub fn all_names() -> Vec<&'static str> {
        vec![
            "dtlz1", "dtlz2", "dtlz3", "dtlz4", "dtlz5", "dtlz6", "dtlz7", "zdt1", "zdt2",
            "zdt3", "zdt4", "zdt6", "omni-test", "vlmop1", "vlmop2", "vlmop3", "bi-tsp-20",
            "bi-tsp-50", "bi-tsp-100", "bi-tsp-500", "bi-cvrp-20", "bi-cvrp-50", "bi-cvrp-100",
            "bi-kp-50", "bi-kp-100", "bi-kp-200", "portfolio",
        ]
    }

    pub fn needs_instance(&self) -> bool {
        matches!(self.space, SearchSpace::Permutation { .. } | SearchSpace::Simplex { .. })
    }
}

/// Evaluates the true objective function of `task` at `x`.
///
/// Combinatorial tasks require their generated instance; continuous inputs
/// are bounds-checked and permutations validated before evaluation.
pub fn evaluate(
    task: &TaskSpec,
    instance: Option<&CombinatorialInstance>,
    x: &Genotype,
) -> Result<Vec<f64>> {
    task.space.check_member(x)?;
    match &task.space {
        SearchSpace::Continuous { .. } => synthetic::evaluate(&task.name, x.as_continuous()?),
        SearchSpace::Simplex { .. } => {
            let inst = require_instance(task, instance)?;
            portfolio_eval(inst, x.as_continuous()?)
        }
        SearchSpace::Permutation { .. } => {
            let inst = require_instance(task, instance)?;
            let perm = x.as_permutation()?;
            match inst {
                CombinatorialInstance::BiTsp { .. } => mo_tsp_eval(inst, perm),
                CombinatorialInstance::BiCvrp { .. } => mo_cvrp_eval(inst, perm),
                CombinatorialInstance::BiKp { .. } => mo_kp_eval(inst, perm),
                CombinatorialInstance::Portfolio { .. } => Err(Error::Domain(
                    "portfolio instance paired with a permutation task".into(),
                )),
            }
        }
    }
}

fn require_instance<'a>(
    task: &TaskSpec,
    instance: Option<&'a CombinatorialInstance>,
) -> Result<&'a CombinatorialInstance> {
    let inst = instance.ok_or_else(|| {
        Error::Config(format!("task '{}' requires a generated instance", task.name))
    })?;
    if inst.size() != task.dims {
        return Err(Error::DimensionMismatch(format!(
            "instance size {} does not match task dims {}",
            inst.size(),
            task.dims
        )));
    }
    Ok(inst)
}

/// Samples `n_points` objective vectors on the analytic Pareto front.
pub fn true_pareto_front(task: &TaskSpec, n_points: usize) -> Result<Vec<Vec<f64>>> {
    if !task.has_true_front {
        return Err(Error::Unsupported(format!(
            "task '{}' has no analytic Pareto front",
            task.name
        )));
    }
    synthetic::true_front(&task.name, n_points)
}

/// A problem- or surrogate-backed objective evaluator usable by the MOEA
/// engines. Implementations must be pure so one generation's offspring can be
/// evaluated from many threads.
pub trait Evaluator: Sync {
    fn evaluate(&self, x: &Genotype) -> Result<Vec<f64>>;
    fn num_objectives(&self) -> usize;
    fn space(&self) -> &SearchSpace;
}

/// [`Evaluator`] backed by a task's ground-truth objective function.
pub struct TaskEvaluator<'a> {
    pub task: &'a TaskSpec,
    pub instance: Option<&'a CombinatorialInstance>,
}

impl<'a> TaskEvaluator<'a> {
    pub fn new(task: &'a TaskSpec, instance: Option<&'a CombinatorialInstance>) -> Self {
        Self { task, instance }
    }
}

impl Evaluator for TaskEvaluator<'_> {
    fn evaluate(&self, x: &Genotype) -> Result<Vec<f64>> {
        evaluate(self.task, self.instance, x)
    }

    fn num_objectives(&self) -> usize {
        self.task.num_objectives
    }

    fn space(&self) -> &SearchSpace {
        &self.task.space
    }
}

#[cfg(test)]
mod tests;
