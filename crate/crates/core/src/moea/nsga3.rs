//! NSGA-III: the NSGA-II generational loop with reference-direction niching
//! survival. Members are normalized by ideal/extreme points and associated
//! to their nearest Das-Dennis direction by perpendicular distance; the last
//! front is filled from the least-crowded niches.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::operators::{variation, OperatorConfig};
use super::{evaluate_all, uniform_survivors, Population, SurvivalPolicy};
use crate::error::Result;
use crate::pareto::non_dominated_sort;
use crate::problems::{das_dennis_at_least, Evaluator};
use crate::types::Genotype;

/// One NSGA-III run with the smallest Das-Dennis direction set of size >= mu.
#[allow(clippy::too_many_arguments)]
pub fn nsga3_run(
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
    let directions = das_dennis_at_least(m, mu);
    let mut pop = init;
    on_generation(0, &pop);
    for gen in 1..=generations {
        let offspring = make_offspring(&pop, mu, evaluator, cfg, rng)?;
        let offspring_objs = evaluate_all(&offspring, evaluator)?;

        let mut pool_members = pop.members;
        pool_members.extend(offspring);
        let mut pool_objs = pop.objectives;
        pool_objs.extend(offspring_objs);

        let keep = if survival.take_standard_branch(rng) {
            niching_survival(&pool_objs, mu, &directions)?
        } else {
            uniform_survivors(pool_objs.len(), mu, rng)
        };
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

/// Random parent pairs; NSGA-III applies its selection pressure in survival.
fn make_offspring(
    pop: &Population,
    mu: usize,
    evaluator: &dyn Evaluator,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Genotype>> {
    let mut offspring = Vec::with_capacity(mu + 1);
    while offspring.len() < mu {
        let p1 = rng.random_range(0..pop.len());
        let p2 = rng.random_range(0..pop.len());
        let (c1, c2) = variation(evaluator.space(), &pop.members[p1], &pop.members[p2], cfg, rng)?;
        offspring.push(c1);
        offspring.push(c2);
    }
    offspring.truncate(mu);
    Ok(offspring)
}

/// Reference-direction niching over the merged pool.
pub(crate) fn niching_survival(
    pool: &[Vec<f64>],
    mu: usize,
    directions: &[Vec<f64>],
) -> Result<Vec<usize>> {
    let partition = non_dominated_sort(pool)?;
    let mut selected: Vec<usize> = Vec::with_capacity(mu);
    let mut last_front: Vec<usize> = Vec::new();
    for front in &partition.fronts {
        if selected.len() + front.len() <= mu {
            selected.extend(front.iter().copied());
            if selected.len() == mu {
                return Ok(selected);
            }
        } else {
            last_front = front.clone();
            break;
        }
    }

    // Normalize over the members under consideration.
    let considered: Vec<usize> = selected.iter().chain(&last_front).copied().collect();
    let m = pool[0].len();
    let mut ideal = vec![f64::INFINITY; m];
    for &i in &considered {
        for d in 0..m {
            ideal[d] = ideal[d].min(pool[i][d]);
        }
    }
    let translated: Vec<Vec<f64>> = considered
        .iter()
        .map(|&i| pool[i].iter().zip(&ideal).map(|(&f, &z)| f - z).collect())
        .collect();
    let intercepts = hyperplane_intercepts(&translated, m);
    let normalized: Vec<Vec<f64>> = translated
        .iter()
        .map(|t| t.iter().zip(&intercepts).map(|(&v, &a)| v / a).collect())
        .collect();

    // Associate every considered member to its closest direction.
    let assoc: Vec<(usize, f64)> = normalized
        .iter()
        .map(|f| {
            let mut best = (0usize, f64::INFINITY);
            for (j, dir) in directions.iter().enumerate() {
                let d = perpendicular_distance(f, dir);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best
        })
        .collect();

    // The first `selected.len()` positions of `considered` are the already
    // accepted members.
    let mut niche_count = vec![0usize; directions.len()];
    for pos in 0..selected.len() {
        niche_count[assoc[pos].0] += 1;
    }
    // Candidates from the last front, grouped by niche.
    let mut candidates: Vec<Vec<(usize, f64)>> = vec![Vec::new(); directions.len()];
    for (pos, &i) in considered.iter().enumerate() {
        if pos >= selected.len() {
            candidates[assoc[pos].0].push((i, assoc[pos].1));
        }
    }
    for niche in candidates.iter_mut() {
        niche.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    }

    let mut closed = vec![false; directions.len()];
    while selected.len() < mu {
        let mut best_niche = None;
        for j in 0..directions.len() {
            if closed[j] || candidates[j].is_empty() {
                continue;
            }
            match best_niche {
                None => best_niche = Some(j),
                Some(b) if niche_count[j] < niche_count[b] => best_niche = Some(j),
                _ => {}
            }
        }
        let Some(j) = best_niche else {
            // no open niches left; this cannot happen while candidates remain
            break;
        };
        let (idx, _) = candidates[j].remove(0);
        selected.push(idx);
        niche_count[j] += 1;
        if candidates[j].is_empty() {
            closed[j] = true;
        }
    }
    Ok(selected)
}

/// Intercepts of the hyperplane through the per-axis extreme points, with a
/// nadir fallback when the system is singular or produces non-positive
/// intercepts.
fn hyperplane_intercepts(translated: &[Vec<f64>], m: usize) -> Vec<f64> {
    const EPS: f64 = 1e-9;
    let mut extremes: Vec<&Vec<f64>> = Vec::with_capacity(m);
    for axis in 0..m {
        let best = translated
            .iter()
            .min_by(|a, b| {
                let asf = |f: &Vec<f64>| {
                    f.iter()
                        .enumerate()
                        .map(|(d, &v)| if d == axis { v } else { v / 1e-6 })
                        .fold(0.0, f64::max)
                };
                asf(a).partial_cmp(&asf(b)).unwrap()
            })
            .expect("non-empty set");
        extremes.push(best);
    }
    let fallback = || -> Vec<f64> {
        (0..m)
            .map(|d| {
                let max = translated.iter().map(|f| f[d]).fold(0.0, f64::max);
                if max > EPS {
                    max
                } else {
                    1.0
                }
            })
            .collect()
    };
    match solve_plane(&extremes, m) {
        Some(beta) if beta.iter().all(|&b| b > EPS) => {
            beta.iter().map(|&b| 1.0 / b).collect()
        }
        _ => fallback(),
    }
}

/// Solves `E beta = 1` with Gaussian elimination; rows of `E` are the
/// extreme points.
fn solve_plane(extremes: &[&Vec<f64>], m: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = extremes.iter().map(|e| (*e).clone()).collect();
    let mut b = vec![1.0f64; m];
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for k in col..m {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    Some((0..m).map(|i| b[i] / a[i][i]).collect())
}

/// Distance from `f` to the ray spanned by `dir`.
pub(crate) fn perpendicular_distance(f: &[f64], dir: &[f64]) -> f64 {
    let dir_norm2: f64 = dir.iter().map(|v| v * v).sum();
    let dot: f64 = f.iter().zip(dir).map(|(a, b)| a * b).sum();
    let scale = dot / dir_norm2;
    f.iter()
        .zip(dir)
        .map(|(&fi, &di)| {
            let r = fi - scale * di;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}
