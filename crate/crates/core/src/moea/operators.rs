//! Genetic operators: simulated binary crossover and polynomial mutation for
//! continuous spaces, order-crossover and inversion-mutation for permutation
//! spaces, plus the start-from-zero rotation repair.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::portfolio_repair;
use crate::types::{is_valid_permutation, Genotype, SearchSpace};

/// Variation operator parameters shared by all algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// SBX distribution index.
    pub sbx_eta: f64,
    /// Probability of crossing a parent pair at all.
    pub sbx_prob: f64,
    /// Polynomial-mutation distribution index.
    pub pm_eta: f64,
    /// Per-gene mutation probability; defaults to 1/D when unset.
    pub pm_prob: Option<f64>,
    /// Probability of applying inversion mutation to a permutation offspring.
    pub perm_mutation_prob: f64,
    /// Rotate permutations so element 0 leads (TSP/CVRP depot convention).
    pub start_from_zero: bool,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            sbx_eta: 15.0,
            sbx_prob: 0.9,
            pm_eta: 20.0,
            pm_prob: None,
            perm_mutation_prob: 1.0,
            start_from_zero: true,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("sbx_prob", self.sbx_prob),
            ("pm_prob", self.pm_prob.unwrap_or(0.0)),
            ("perm_mutation_prob", self.perm_mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.sbx_eta <= 0.0 || self.pm_eta <= 0.0 {
            return Err(Error::Config("distribution indices must be positive".into()));
        }
        Ok(())
    }

    fn pm_prob_for(&self, dims: usize) -> f64 {
        self.pm_prob.unwrap_or(1.0 / dims as f64)
    }
}

/// SBX spread factor for one uniform draw.
fn sbx_beta(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// Gene-level SBX kernel: `u = 0.5` gives spread 1 and children equal to the
/// parents.
pub(crate) fn sbx_gene(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = sbx_beta(u, eta);
    let c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2);
    let c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2);
    (c1, c2)
}

/// Simulated binary crossover over a bounded continuous pair. With
/// probability `1 - sbx_prob` the children are copies of the parents;
/// otherwise each gene is crossed with probability 0.5. Children are clipped
/// to the bounds.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    bounds: &[(f64, f64)],
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(p1.len(), p2.len());
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() > cfg.sbx_prob {
        return (c1, c2);
    }
    for i in 0..p1.len() {
        if p1[i] == p2[i] || rng.random::<f64>() >= 0.5 {
            continue;
        }
        let (a, b) = sbx_gene(p1[i], p2[i], rng.random(), cfg.sbx_eta);
        let (lo, hi) = bounds[i];
        c1[i] = a.clamp(lo, hi);
        c2[i] = b.clamp(lo, hi);
    }
    (c1, c2)
}

/// Gene-level polynomial-mutation kernel; `u = 0.5` leaves the gene
/// unchanged.
pub(crate) fn pm_gene(x: f64, lo: f64, hi: f64, u: f64, eta: f64) -> f64 {
    let range = hi - lo;
    if range <= 0.0 {
        return x;
    }
    let delta = if u < 0.5 {
        let d1 = (x - lo) / range;
        (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0)).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        let d2 = (hi - x) / range;
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0))
            .powf(1.0 / (eta + 1.0))
    };
    (x + delta * range).clamp(lo, hi)
}

/// Polynomial mutation: each gene perturbed with probability `pm_prob`.
pub fn pm_mutation(
    x: &[f64],
    bounds: &[(f64, f64)],
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let prob = cfg.pm_prob_for(x.len());
    x.iter()
        .zip(bounds)
        .map(|(&xi, &(lo, hi))| {
            if rng.random::<f64>() < prob {
                pm_gene(xi, lo, hi, rng.random(), cfg.pm_eta)
            } else {
                xi
            }
        })
        .collect()
}

/// Order crossover: copies a random segment of `p1` and fills the remaining
/// positions with the missing elements in `p2`'s order.
pub fn order_crossover(p1: &[usize], p2: &[usize], rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if !is_valid_permutation(p1) || !is_valid_permutation(p2) || p1.len() != p2.len() {
        return Err(Error::Domain("order crossover needs two equal-length permutations".into()));
    }
    let n = p1.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    let (lo, hi) = (a.min(b), a.max(b));
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in lo..=hi {
        child[i] = p1[i];
        used[p1[i]] = true;
    }
    let mut fill = p2.iter().filter(|&&v| !used[v]);
    for slot in child.iter_mut() {
        if *slot == usize::MAX {
            *slot = *fill.next().expect("fill values exhausted");
        }
    }
    debug_assert!(is_valid_permutation(&child));
    Ok(child)
}

/// Reverses a random contiguous segment.
pub fn inversion_mutation(x: &[usize], rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if !is_valid_permutation(x) {
        return Err(Error::Domain("inversion mutation needs a permutation".into()));
    }
    let n = x.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    let (lo, hi) = (a.min(b), a.max(b));
    let mut out = x.to_vec();
    out[lo..=hi].reverse();
    Ok(out)
}

/// Rotates a permutation so element 0 comes first.
pub fn start_from_zero_repair(x: &[usize]) -> Result<Vec<usize>> {
    if !is_valid_permutation(x) {
        return Err(Error::Domain("repair needs a permutation".into()));
    }
    let zero_at = x.iter().position(|&v| v == 0).expect("0 must be present");
    Ok(x[zero_at..].iter().chain(&x[..zero_at]).copied().collect())
}

/// Produces two offspring from two parents under the operators appropriate
/// for `space`, including any repair the space requires.
pub fn variation(
    space: &SearchSpace,
    p1: &Genotype,
    p2: &Genotype,
    cfg: &OperatorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Genotype, Genotype)> {
    match space {
        SearchSpace::Continuous { bounds } => {
            let (mut c1, mut c2) =
                sbx_crossover(p1.as_continuous()?, p2.as_continuous()?, bounds, cfg, rng);
            c1 = pm_mutation(&c1, bounds, cfg, rng);
            c2 = pm_mutation(&c2, bounds, cfg, rng);
            Ok((Genotype::Continuous(c1), Genotype::Continuous(c2)))
        }
        SearchSpace::Simplex { min_weight, .. } => {
            let unit = vec![(0.0, 1.0); space.dims()];
            let (mut c1, mut c2) =
                sbx_crossover(p1.as_continuous()?, p2.as_continuous()?, &unit, cfg, rng);
            c1 = portfolio_repair(&pm_mutation(&c1, &unit, cfg, rng), *min_weight);
            c2 = portfolio_repair(&pm_mutation(&c2, &unit, cfg, rng), *min_weight);
            Ok((Genotype::Continuous(c1), Genotype::Continuous(c2)))
        }
        SearchSpace::Permutation { .. } => {
            let mut make_child = |a: &Genotype, b: &Genotype| -> Result<Genotype> {
                let mut child = order_crossover(a.as_permutation()?, b.as_permutation()?, rng)?;
                if rng.random::<f64>() < cfg.perm_mutation_prob {
                    child = inversion_mutation(&child, rng)?;
                }
                if cfg.start_from_zero {
                    child = start_from_zero_repair(&child)?;
                }
                Ok(Genotype::Permutation(child))
            };
            Ok((make_child(p1, p2)?, make_child(p2, p1)?))
        }
    }
}

/// Uniform random genotypes for `space`, with the space's repair applied.
pub fn random_genotypes(
    space: &SearchSpace,
    cfg: &OperatorConfig,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Genotype> {
    (0..n)
        .map(|_| match space {
            SearchSpace::Continuous { bounds } => Genotype::Continuous(
                bounds
                    .iter()
                    .map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
                    .collect(),
            ),
            SearchSpace::Simplex { n, min_weight } => {
                let w: Vec<f64> = (0..*n).map(|_| rng.random()).collect();
                Genotype::Continuous(portfolio_repair(&w, *min_weight))
            }
            SearchSpace::Permutation { n } => {
                let mut p: Vec<usize> = (0..*n).collect();
                // Fisher-Yates
                for i in (1..*n).rev() {
                    p.swap(i, rng.random_range(0..=i));
                }
                let p = if cfg.start_from_zero {
                    start_from_zero_repair(&p).expect("shuffle is a permutation")
                } else {
                    p
                };
                Genotype::Permutation(p)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sbx_gene_identity_at_half() {
        let (c1, c2) = sbx_gene(0.2, 0.8, 0.5, 15.0);
        assert!((c1 - 0.2).abs() < 1e-12);
        assert!((c2 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn sbx_identical_parents_give_identical_children() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = OperatorConfig::default();
        let p = vec![0.3; 5];
        let bounds = vec![(0.0, 1.0); 5];
        for _ in 0..100 {
            let (c1, c2) = sbx_crossover(&p, &p, &bounds, &cfg, &mut rng);
            assert_eq!(c1, p);
            assert_eq!(c2, p);
        }
    }

    #[test]
    fn sbx_mean_preservation_statistical() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = OperatorConfig::default();
        let p1 = vec![0.4];
        let p2 = vec![0.6];
        let bounds = vec![(0.0, 1.0)];
        let trials = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let (c1, c2) = sbx_crossover(&p1, &p2, &bounds, &cfg, &mut rng);
            let mid = 0.5 * (c1[0] + c2[0]);
            sum += mid;
            sum_sq += mid * mid;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let sigma = (var / trials as f64).sqrt();
        let expected = 0.5;
        assert!(
            (mean - expected).abs() <= 3.0 * sigma + 1e-9,
            "mean {mean} deviates from {expected} beyond 3 sigma ({sigma})"
        );
    }

    #[test]
    fn pm_gene_identity_at_half() {
        assert_eq!(pm_gene(0.3, 0.0, 1.0, 0.5, 20.0), 0.3);
    }

    #[test]
    fn pm_zero_probability_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = OperatorConfig { pm_prob: Some(0.0), ..Default::default() };
        let x = vec![0.1, 0.9, 0.5];
        let bounds = vec![(0.0, 1.0); 3];
        assert_eq!(pm_mutation(&x, &bounds, &cfg, &mut rng), x);
    }

    #[test]
    fn pm_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = OperatorConfig { pm_prob: Some(1.0), ..Default::default() };
        let bounds = vec![(-2.0, 3.0); 4];
        let mut x = vec![-2.0, 3.0, 0.0, 2.9];
        for _ in 0..100_000 / 4 {
            x = pm_mutation(&x, &bounds, &cfg, &mut rng);
            for &v in &x {
                assert!((-2.0..=3.0).contains(&v));
            }
        }
    }

    #[test]
    fn order_crossover_validity_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = OperatorConfig { start_from_zero: false, ..Default::default() };
        let space = SearchSpace::Permutation { n: 12 };
        let parents = random_genotypes(&space, &cfg, 2, &mut rng);
        for _ in 0..10_000 {
            let child = order_crossover(
                parents[0].as_permutation().unwrap(),
                parents[1].as_permutation().unwrap(),
                &mut rng,
            )
            .unwrap();
            assert!(is_valid_permutation(&child));
        }
    }

    #[test]
    fn order_crossover_identical_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p: Vec<usize> = vec![3, 1, 4, 0, 2];
        for _ in 0..50 {
            assert_eq!(order_crossover(&p, &p, &mut rng).unwrap(), p);
        }
    }

    #[test]
    fn inversion_produces_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p: Vec<usize> = (0..10).collect();
        for _ in 0..1000 {
            assert!(is_valid_permutation(&inversion_mutation(&p, &mut rng).unwrap()));
        }
    }

    #[test]
    fn repair_rotates_to_zero() {
        assert_eq!(start_from_zero_repair(&[2, 0, 1]).unwrap(), vec![0, 1, 2]);
        assert_eq!(start_from_zero_repair(&[0, 2, 1]).unwrap(), vec![0, 2, 1]);
        assert!(start_from_zero_repair(&[1, 1, 0]).is_err());
    }

    #[test]
    fn variation_respects_simplex_repair() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let space = SearchSpace::Simplex { n: 6, min_weight: 0.001 };
        let cfg = OperatorConfig::default();
        let parents = random_genotypes(&space, &cfg, 2, &mut rng);
        for _ in 0..200 {
            let (c1, c2) = variation(&space, &parents[0], &parents[1], &cfg, &mut rng).unwrap();
            for c in [c1, c2] {
                let w = c.as_continuous().unwrap().to_vec();
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(w.iter().all(|&v| v >= 0.001));
            }
        }
    }
}
