//! MOEA/D with Tchebycheff decomposition: Das-Dennis weight vectors, a
//! running ideal point, neighborhood mating, and capped neighborhood
//! replacement.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::operators::{variation, OperatorConfig};
use super::{Population, SurvivalPolicy};
use crate::error::Result;
use crate::problems::{das_dennis_at_least, Evaluator};

/// Default neighborhood size, clipped to the population size.
pub const NEIGHBORHOOD: usize = 20;

/// Replacement cap: one offspring may displace at most this many neighbors.
const MAX_REPLACEMENTS: usize = 2;

/// Tchebycheff scalarization against an ideal point.
pub fn tchebycheff(objs: &[f64], weight: &[f64], ideal: &[f64]) -> f64 {
    objs.iter()
        .zip(weight)
        .zip(ideal)
        .map(|((&f, &w), &z)| w * (f - z).abs())
        .fold(0.0, f64::max)
}

/// Evenly subsampled Das-Dennis lattice with exactly `mu` weight vectors.
pub fn moead_weights(m: usize, mu: usize) -> Vec<Vec<f64>> {
    let lattice = das_dennis_at_least(m, mu);
    if lattice.len() == mu {
        return lattice;
    }
    (0..mu).map(|i| lattice[i * lattice.len() / mu].clone()).collect()
}

fn neighborhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    let n = weights.len();
    (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                let da: f64 = weights[i].iter().zip(&weights[a]).map(|(x, y)| (x - y) * (x - y)).sum();
                let db: f64 = weights[i].iter().zip(&weights[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
            order.truncate(t);
            order
        })
        .collect()
}

/// One MOEA/D run. Each generation sweeps all subproblems, mating within
/// neighborhoods and replacing neighbors whose Tchebycheff value improves
/// (capped). Under an amateur policy, each offspring instead displaces one
/// random neighbor unconditionally with probability `1 - p`.
#[allow(clippy::too_many_arguments)]
pub fn moead_run(
    evaluator: &dyn Evaluator,
    init: Population,
    mu: usize,
    generations: usize,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
    survival: SurvivalPolicy,
) -> Result<Population> {
    run(evaluator, init, mu, generations, cfg, rng, survival, &mut |_, _| {})
}

#[allow(clippy::too_many_arguments)]
pub(super) fn run(
    evaluator: &dyn Evaluator,
    init: Population,
    mu: usize,
    generations: usize,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
    survival: SurvivalPolicy,
    on_generation: &mut dyn FnMut(usize, &Population),
) -> Result<Population> {
    let m = evaluator.num_objectives();
    let weights = moead_weights(m, mu);
    let nbhd = neighborhoods(&weights, NEIGHBORHOOD.min(mu));

    let mut pop = init;
    let mut ideal = vec![f64::INFINITY; m];
    for objs in &pop.objectives {
        for d in 0..m {
            ideal[d] = ideal[d].min(objs[d]);
        }
    }
    on_generation(0, &pop);

    for gen in 1..=generations {
        for i in 0..mu {
            let b = &nbhd[i];
            let p1 = b[rng.random_range(0..b.len())];
            let p2 = b[rng.random_range(0..b.len())];
            let (child, _) =
                variation(evaluator.space(), &pop.members[p1], &pop.members[p2], cfg, rng)?;
            let child_objs = evaluator.evaluate(&child)?;
            for d in 0..m {
                ideal[d] = ideal[d].min(child_objs[d]);
            }
            if survival.take_standard_branch(rng) {
                let mut replaced = 0;
                for &j in b {
                    if replaced >= MAX_REPLACEMENTS {
                        break;
                    }
                    let incumbent = tchebycheff(&pop.objectives[j], &weights[j], &ideal);
                    let candidate = tchebycheff(&child_objs, &weights[j], &ideal);
                    if candidate < incumbent {
                        pop.members[j] = child.clone();
                        pop.objectives[j] = child_objs.clone();
                        replaced += 1;
                    }
                }
            } else {
                // amateur acceptance: one random neighbor takes the offspring
                // regardless of quality
                let j = b[rng.random_range(0..b.len())];
                pop.members[j] = child.clone();
                pop.objectives[j] = child_objs.clone();
            }
        }
        pop.refresh_metrics()?;
        on_generation(gen, &pop);
    }
    Ok(pop)
}

/// Trace of per-subproblem scalarized values with the ideal point in effect
/// when they were recorded; used to check monotone improvement between
/// ideal-point updates.
#[allow(clippy::too_many_arguments)]
#[cfg(test)]
pub(crate) fn run_with_scalar_trace(
    evaluator: &dyn Evaluator,
    init: Population,
    mu: usize,
    generations: usize,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Population, Vec<(Vec<f64>, Vec<f64>)>)> {
    let m = evaluator.num_objectives();
    let weights = moead_weights(m, mu);
    let mut trace = Vec::new();

    // Standard algorithm with (ideal, scalarized incumbents) recorded after
    // each generation.
    let mut pop = init;
    let mut ideal = vec![f64::INFINITY; m];
    for objs in &pop.objectives {
        for d in 0..m {
            ideal[d] = ideal[d].min(objs[d]);
        }
    }
    let nbhd = neighborhoods(&weights, NEIGHBORHOOD.min(mu));
    for _ in 0..generations {
        for i in 0..mu {
            let b = &nbhd[i];
            let p1 = b[rng.random_range(0..b.len())];
            let p2 = b[rng.random_range(0..b.len())];
            let (child, _) =
                variation(evaluator.space(), &pop.members[p1], &pop.members[p2], cfg, rng)?;
            let child_objs = evaluator.evaluate(&child)?;
            for d in 0..m {
                ideal[d] = ideal[d].min(child_objs[d]);
            }
            let mut replaced = 0;
            for &j in b {
                if replaced >= MAX_REPLACEMENTS {
                    break;
                }
                if tchebycheff(&child_objs, &weights[j], &ideal)
                    < tchebycheff(&pop.objectives[j], &weights[j], &ideal)
                {
                    pop.members[j] = child.clone();
                    pop.objectives[j] = child_objs.clone();
                    replaced += 1;
                }
            }
        }
        let scalars: Vec<f64> = (0..mu)
            .map(|j| tchebycheff(&pop.objectives[j], &weights[j], &ideal))
            .collect();
        trace.push((ideal.clone(), scalars));
    }
    pop.refresh_metrics()?;
    Ok((pop, trace))
}
