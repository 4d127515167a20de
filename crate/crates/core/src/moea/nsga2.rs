//! NSGA-II: binary-tournament parent selection, SBX/PM (or permutation
//! operators), and rank/crowding survival over the merged parent+offspring
//! pool.

use rand_chacha::ChaCha8Rng;

use super::operators::{variation, OperatorConfig};
use super::{binary_tournament, evaluate_all, select_survivors, Population, SurvivalPolicy};
use crate::error::Result;
use crate::problems::Evaluator;
use crate::types::Genotype;

/// One NSGA-II run. `generations = 0` returns the initial population
/// unchanged. The survival policy selects mu from the (mu + mu) pool each
/// generation; the standard policy is `nsga2_select`.
#[allow(clippy::too_many_arguments)]
pub fn nsga2_run(
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
    let mut pop = init;
    on_generation(0, &pop);
    for gen in 1..=generations {
        let offspring = make_offspring(&pop, mu, evaluator, cfg, rng)?;
        let offspring_objs = evaluate_all(&offspring, evaluator)?;

        let mut pool_members = pop.members;
        pool_members.extend(offspring);
        let mut pool_objs = pop.objectives;
        pool_objs.extend(offspring_objs);

        let keep = select_survivors(survival, &pool_objs, mu, rng)?;
        pop = Population {
            members: keep.iter().map(|&i| pool_members[i].clone()).collect(),
            objectives: keep.iter().map(|&i| pool_objs[i].clone()).collect(),
            ranks: Vec::new(),
            crowding: Vec::new(),
        };
        pop.refresh_metrics()?;
        on_generation(gen, &pop);
    }
    Ok(pop)
}

/// mu offspring via binary tournaments and pairwise variation.
pub(super) fn make_offspring(
    pop: &Population,
    mu: usize,
    evaluator: &dyn Evaluator,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Genotype>> {
    let mut offspring = Vec::with_capacity(mu + 1);
    while offspring.len() < mu {
        let p1 = binary_tournament(pop, rng);
        let p2 = binary_tournament(pop, rng);
        let (c1, c2) = variation(
            evaluator.space(),
            &pop.members[p1],
            &pop.members[p2],
            cfg,
            rng,
        )?;
        offspring.push(c1);
        offspring.push(c2);
    }
    offspring.truncate(mu);
    Ok(offspring)
}
