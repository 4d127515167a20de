//! Combinatorial task instances and evaluators: bi-objective TSP, CVRP, and
//! knapsack on permutation encodings, plus mean-variance portfolio
//! allocation on the weight simplex.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::is_valid_permutation;

/// Vehicle capacity for CVRP instances.
pub const CVRP_CAPACITY: f64 = 50.0;
/// Knapsack capacity for KP instances.
pub const KP_CAPACITY: f64 = 25.0;
/// Asset count of the portfolio task.
pub const PORTFOLIO_ASSETS: usize = 20;
/// Minimum repaired portfolio weight.
pub const PORTFOLIO_MIN_WEIGHT: f64 = 0.001;

/// Combinatorial task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    BiTsp,
    BiCvrp,
    BiKp,
    Portfolio,
}

impl InstanceKind {
    /// Instance sizes used by the benchmark for this family.
    pub fn standard_sizes(self) -> &'static [usize] {
        match self {
            InstanceKind::BiTsp => &[20, 50, 100, 500],
            InstanceKind::BiCvrp => &[20, 50, 100],
            InstanceKind::BiKp => &[50, 100, 200],
            InstanceKind::Portfolio => &[PORTFOLIO_ASSETS],
        }
    }
}

/// Parses task names of the form `bi-tsp-20` / `bi-cvrp-50` / `bi-kp-100` /
/// `portfolio` into a kind and size.
pub fn parse_task_name(name: &str) -> Option<(InstanceKind, usize)> {
    if name == "portfolio" {
        return Some((InstanceKind::Portfolio, PORTFOLIO_ASSETS));
    }
    for (prefix, kind) in [
        ("bi-tsp-", InstanceKind::BiTsp),
        ("bi-cvrp-", InstanceKind::BiCvrp),
        ("bi-kp-", InstanceKind::BiKp),
    ] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if let Ok(n) = rest.parse::<usize>() {
                return Some((kind, n));
            }
        }
    }
    None
}

/// A generated problem instance. Serialized as JSON with a `kind` tag;
/// integers round-trip exactly and reals via shortest-round-trip decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CombinatorialInstance {
    BiTsp {
        n: usize,
        seed: u64,
        coords_a: Vec<[f64; 2]>,
        coords_b: Vec<[f64; 2]>,
    },
    BiCvrp {
        n: usize,
        seed: u64,
        depot: [f64; 2],
        customers: Vec<[f64; 2]>,
        demands: Vec<u32>,
        capacity: f64,
    },
    BiKp {
        n: usize,
        seed: u64,
        weights: Vec<f64>,
        values: Vec<[f64; 2]>,
        capacity: f64,
    },
    Portfolio {
        n: usize,
        seed: u64,
        mean_returns: Vec<f64>,
        covariance: Vec<Vec<f64>>,
        min_weight: f64,
    },
}

impl CombinatorialInstance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            CombinatorialInstance::BiTsp { .. } => InstanceKind::BiTsp,
            CombinatorialInstance::BiCvrp { .. } => InstanceKind::BiCvrp,
            CombinatorialInstance::BiKp { .. } => InstanceKind::BiKp,
            CombinatorialInstance::Portfolio { .. } => InstanceKind::Portfolio,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CombinatorialInstance::BiTsp { n, .. }
            | CombinatorialInstance::BiCvrp { n, .. }
            | CombinatorialInstance::BiKp { n, .. }
            | CombinatorialInstance::Portfolio { n, .. } => *n,
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Generates a deterministic instance for `(kind, n, seed)`.
///
/// `n` must be one of the family's standard sizes unless `allow_any_size` is
/// set.
pub fn generate_instance(
    kind: InstanceKind,
    n: usize,
    seed: u64,
    allow_any_size: bool,
) -> Result<CombinatorialInstance> {
    if !allow_any_size && !kind.standard_sizes().contains(&n) {
        return Err(Error::Config(format!(
            "size {n} is not standard for {kind:?} (expected one of {:?}); pass allow_any_size to override",
            kind.standard_sizes()
        )));
    }
    if n < 2 {
        return Err(Error::Config("instance size must be >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> [f64; 2] { [rng.random(), rng.random()] };
    let inst = match kind {
        InstanceKind::BiTsp => CombinatorialInstance::BiTsp {
            n,
            seed,
            coords_a: (0..n).map(|_| point(&mut rng)).collect(),
            coords_b: (0..n).map(|_| point(&mut rng)).collect(),
        },
        InstanceKind::BiCvrp => CombinatorialInstance::BiCvrp {
            n,
            seed,
            depot: point(&mut rng),
            customers: (0..n).map(|_| point(&mut rng)).collect(),
            demands: (0..n).map(|_| rng.random_range(0..=9u32)).collect(),
            capacity: CVRP_CAPACITY,
        },
        InstanceKind::BiKp => CombinatorialInstance::BiKp {
            n,
            seed,
            weights: (0..n).map(|_| rng.random()).collect(),
            values: (0..n).map(|_| [rng.random(), rng.random()]).collect(),
            capacity: KP_CAPACITY,
        },
        InstanceKind::Portfolio => {
            // Seeded factor model: covariance = A^T A / n plus diagonal
            // jitter, which is symmetric PSD by construction.
            let mean_returns: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 0.3).collect();
            let a: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| normal_sample(&mut rng) * 0.1).collect())
                .collect();
            let mut covariance = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for row in &a {
                        s += row[i] * row[j];
                    }
                    covariance[i][j] = s / n as f64;
                }
                covariance[i][i] += 1e-6;
            }
            CombinatorialInstance::Portfolio {
                n,
                seed,
                mean_returns,
                covariance,
                min_weight: PORTFOLIO_MIN_WEIGHT,
            }
        }
    };
    Ok(inst)
}

/// Box-Muller standard normal draw.
fn normal_sample(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n || !is_valid_permutation(perm) {
        return Err(Error::Domain(format!(
            "expected a permutation of 0..{n}, got {perm:?}"
        )));
    }
    Ok(())
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Closed-tour lengths under each coordinate set.
pub fn mo_tsp_eval(instance: &CombinatorialInstance, perm: &[usize]) -> Result<Vec<f64>> {
    let CombinatorialInstance::BiTsp { n, coords_a, coords_b, .. } = instance else {
        return Err(Error::Domain("instance is not a bi-tsp instance".into()));
    };
    check_perm(perm, *n)?;
    let tour_length = |coords: &[[f64; 2]]| -> f64 {
        perm.windows(2).map(|w| dist(coords[w[0]], coords[w[1]])).sum::<f64>()
            + dist(coords[perm[*n - 1]], coords[perm[0]])
    };
    Ok(vec![tour_length(coords_a), tour_length(coords_b)])
}

/// Greedy capacity split: the vehicle follows the permutation, returning to
/// the depot just before a customer whose demand would overflow. Objectives:
/// total length of all routes and the longest single-route length.
pub fn mo_cvrp_eval(instance: &CombinatorialInstance, perm: &[usize]) -> Result<Vec<f64>> {
    let CombinatorialInstance::BiCvrp { n, depot, customers, demands, capacity, .. } = instance
    else {
        return Err(Error::Domain("instance is not a bi-cvrp instance".into()));
    };
    check_perm(perm, *n)?;
    let mut total = 0.0;
    let mut longest = 0.0f64;
    let mut route_len = 0.0;
    let mut load = 0.0;
    let mut position = *depot;
    for &c in perm {
        let demand = demands[c] as f64;
        if load + demand > *capacity {
            route_len += dist(position, *depot);
            total += route_len;
            longest = longest.max(route_len);
            route_len = 0.0;
            load = 0.0;
            position = *depot;
        }
        route_len += dist(position, customers[c]);
        load += demand;
        position = customers[c];
    }
    route_len += dist(position, *depot);
    total += route_len;
    longest = longest.max(route_len);
    Ok(vec![total, longest])
}

/// Prefix knapsack: items enter in permutation order while the running
/// weight stays within capacity; the first overflowing item stops the scan.
/// Returns the negated value sums (minimization convention).
pub fn mo_kp_eval(instance: &CombinatorialInstance, perm: &[usize]) -> Result<Vec<f64>> {
    let CombinatorialInstance::BiKp { n, weights, values, capacity, .. } = instance else {
        return Err(Error::Domain("instance is not a bi-kp instance".into()));
    };
    check_perm(perm, *n)?;
    let mut load = 0.0;
    let mut v = [0.0f64; 2];
    for &item in perm {
        if load + weights[item] > *capacity {
            break;
        }
        load += weights[item];
        v[0] += values[item][0];
        v[1] += values[item][1];
    }
    Ok(vec![-v[0], -v[1]])
}

/// Repairs a weight vector onto the constrained simplex: entries below the
/// threshold are pinned to it and the remainder rescaled until the vector
/// sums to 1 with every weight >= the threshold. An all-zero input repairs
/// to the uniform portfolio.
pub fn portfolio_repair(weights: &[f64], min_weight: f64) -> Vec<f64> {
    let n = weights.len();
    let uniform = vec![1.0 / n as f64; n];
    if weights.iter().all(|&w| w <= 0.0) {
        return uniform;
    }
    let mut pinned = vec![false; n];
    loop {
        let pinned_mass = pinned.iter().filter(|&&p| p).count() as f64 * min_weight;
        let free_mass: f64 = weights
            .iter()
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|(&w, _)| w)
            .sum();
        if free_mass <= 0.0 {
            return uniform;
        }
        let scale = (1.0 - pinned_mass) / free_mass;
        let mut changed = false;
        for i in 0..n {
            if !pinned[i] && weights[i] * scale < min_weight {
                pinned[i] = true;
                changed = true;
            }
        }
        if !changed {
            return (0..n)
                .map(|i| if pinned[i] { min_weight } else { weights[i] * scale })
                .collect();
        }
    }
}

/// Negated expected return and risk (standard deviation) of a weight vector.
/// Weights are evaluated as given; apply [`portfolio_repair`] first to land on
/// the constrained simplex.
pub fn portfolio_eval(instance: &CombinatorialInstance, weights: &[f64]) -> Result<Vec<f64>> {
    let CombinatorialInstance::Portfolio { n, mean_returns, covariance, .. } = instance else {
        return Err(Error::Domain("instance is not a portfolio instance".into()));
    };
    if weights.len() != *n {
        return Err(Error::DimensionMismatch(format!(
            "weight vector of length {} for {n} assets",
            weights.len()
        )));
    }
    let expected: f64 = weights.iter().zip(mean_returns).map(|(&wi, &mu)| wi * mu).sum();
    let mut variance = 0.0;
    for i in 0..*n {
        for j in 0..*n {
            variance += weights[i] * covariance[i][j] * weights[j];
        }
    }
    Ok(vec![-expected, variance.max(0.0).sqrt()])
}
