//! Pareto dominance, non-dominated sorting, crowding distance, hypervolume,
//! IGD, reference points, NSGA-II selection, and percentile filtering.
//!
//! All objective vectors follow the minimization convention. Every function
//! here is pure; Monte-Carlo hypervolume takes an explicit seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sample count for the Monte-Carlo hypervolume fallback (m > 4).
pub const HV_MC_DEFAULT_SAMPLES: usize = 1_000_000;
const HV_MC_DEFAULT_SEED: u64 = 0x9e3779b97f4a7c15;

/// Returns true iff `a` Pareto-dominates `b`: `a <= b` componentwise and
/// `a < b` in at least one component. Comparison is on raw floats with no
/// epsilon; equal vectors do not dominate each other.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "objective vectors of length {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Partition of a point set into successive non-dominated fronts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontPartition {
    /// Front rank of each point (0 = non-dominated).
    pub ranks: Vec<usize>,
    /// Point indices grouped by front, ordered by rank.
    pub fronts: Vec<Vec<usize>>,
}

fn check_uniform(points: &[Vec<f64>]) -> Result<usize> {
    let m = points
        .first()
        .ok_or(Error::EmptyInput("point set must be non-empty"))?
        .len();
    if points.iter().any(|p| p.len() != m) {
        return Err(Error::DimensionMismatch(
            "points have differing objective counts".into(),
        ));
    }
    Ok(m)
}

/// Fast non-dominated sorting.
///
/// Runs in O(m * n^2) time and O(n) extra memory: domination counts are
/// computed once, then fronts are peeled by re-scanning the remaining points
/// against each peeled front.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Result<FrontPartition> {
    check_uniform(points)?;
    let n = points.len();
    let mut dom_count = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates_unchecked(&points[j], &points[i]) {
                dom_count[i] += 1;
            }
        }
    }

    let mut ranks = vec![usize::MAX; n];
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while !remaining.is_empty() {
        let (front, rest): (Vec<usize>, Vec<usize>) =
            remaining.iter().partition(|&&i| dom_count[i] == 0);
        debug_assert!(!front.is_empty(), "cycle in dominance relation");
        for &i in &front {
            ranks[i] = rank;
        }
        for &q in &front {
            for &i in &rest {
                if dominates_unchecked(&points[q], &points[i]) {
                    dom_count[i] -= 1;
                }
            }
        }
        fronts.push(front);
        remaining = rest;
        rank += 1;
    }
    Ok(FrontPartition { ranks, fronts })
}

/// NSGA-II crowding distance for one front.
///
/// Boundary points of every objective get +infinity; interior points sum
/// `(next - prev) / (max - min)` over objectives. Objectives with zero range
/// contribute nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    let m = front[0].len();
    let mut dist = vec![0.0f64; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        order.sort_by(|&a, &b| front[a][obj].partial_cmp(&front[b][obj]).unwrap());
        let lo = front[order[0]][obj];
        let hi = front[order[n - 1]][obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let i = order[w];
            if dist[i].is_finite() {
                dist[i] += (front[order[w + 1]][obj] - front[order[w - 1]][obj]) / range;
            }
        }
    }
    dist
}

/// Exact hypervolume dominated by `points` and bounded by `reference`.
///
/// Points not strictly below the reference in every coordinate contribute
/// nothing. Uses a sorted sweep for m = 2, recursive exclusive-volume
/// slicing for 3 <= m <= 4, and seeded Monte-Carlo for m > 4.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let m = reference.len();
    debug_assert!(points.iter().all(|p| p.len() == m));
    let contributing: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(&pi, &ri)| pi < ri))
        .collect();
    if contributing.is_empty() {
        return 0.0;
    }
    match m {
        0 => 0.0,
        1 => contributing
            .iter()
            .map(|p| reference[0] - p[0])
            .fold(0.0, f64::max),
        2 => hv_sweep_2d(&contributing, reference),
        3 | 4 => {
            let pts: Vec<Vec<f64>> = contributing.iter().map(|p| (*p).clone()).collect();
            hv_recursive(&non_dominated_subset(pts), reference)
        }
        _ => hypervolume_mc(points, reference, HV_MC_DEFAULT_SAMPLES, HV_MC_DEFAULT_SEED),
    }
}

fn hv_sweep_2d(points: &[&Vec<f64>], reference: &[f64]) -> f64 {
    let mut sorted: Vec<&Vec<f64>> = points.to_vec();
    sorted.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
    let mut area = 0.0;
    let mut best_f2 = reference[1];
    for p in sorted {
        if p[1] < best_f2 {
            area += (reference[0] - p[0]) * (best_f2 - p[1]);
            best_f2 = p[1];
        }
    }
    area
}

fn non_dominated_subset(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut keep: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            // Drop p if q dominates it, or if they are equal and q comes first.
            if dominates_unchecked(q, p) || (q == p && j < i) {
                continue 'outer;
            }
        }
        keep.push(p.clone());
    }
    keep
}

/// Exclusive-volume recursion over a mutually non-dominated point set.
fn hv_recursive(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => box_volume(&points[0], reference),
        2 => {
            let joint: Vec<f64> = points[0]
                .iter()
                .zip(&points[1])
                .map(|(&a, &b)| a.max(b))
                .collect();
            box_volume(&points[0], reference) + box_volume(&points[1], reference)
                - box_volume(&joint, reference)
        }
        _ => {
            let mut sorted = points.to_vec();
            sorted.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
            let mut total = 0.0;
            for i in 0..sorted.len() {
                total += exclusive_volume(&sorted[i], &sorted[i + 1..], reference);
            }
            total
        }
    }
}

fn exclusive_volume(p: &[f64], rest: &[Vec<f64>], reference: &[f64]) -> f64 {
    let own = box_volume(p, reference);
    if rest.is_empty() {
        return own;
    }
    let limited: Vec<Vec<f64>> = rest
        .iter()
        .map(|q| q.iter().zip(p).map(|(&qi, &pi)| qi.max(pi)).collect())
        .collect();
    own - hv_recursive(&non_dominated_subset(limited), reference)
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter()
        .zip(reference)
        .map(|(&pi, &ri)| (ri - pi).max(0.0))
        .product()
}

/// Monte-Carlo hypervolume estimate: unbiased, deterministic given `seed`.
pub fn hypervolume_mc(points: &[Vec<f64>], reference: &[f64], samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "samples must be >= 1");
    let m = reference.len();
    let contributing: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(&pi, &ri)| pi < ri))
        .collect();
    if contributing.is_empty() {
        return 0.0;
    }
    let mut lo = vec![f64::INFINITY; m];
    for p in &contributing {
        for d in 0..m {
            lo[d] = lo[d].min(p[d]);
        }
    }
    let box_vol: f64 = lo.iter().zip(reference).map(|(&l, &r)| r - l).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut sample = vec![0.0f64; m];
    for _ in 0..samples {
        for d in 0..m {
            sample[d] = lo[d] + rng.random::<f64>() * (reference[d] - lo[d]);
        }
        if contributing
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(&pi, &si)| pi <= si))
        {
            hits += 1;
        }
    }
    box_vol * hits as f64 / samples as f64
}

/// Inverted generational distance: mean distance from each true-front point
/// to its nearest neighbour in `approx`.
pub fn igd(approx: &[Vec<f64>], true_front: &[Vec<f64>]) -> Result<f64> {
    if approx.is_empty() || true_front.is_empty() {
        return Err(Error::EmptyInput("igd needs non-empty sets"));
    }
    let total: f64 = true_front
        .iter()
        .map(|t| {
            approx
                .iter()
                .map(|a| {
                    t.iter()
                        .zip(a)
                        .map(|(&ti, &ai)| (ti - ai) * (ti - ai))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / true_front.len() as f64)
}

/// Per-objective normalization statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormStats {
    pub fn dims(&self) -> usize {
        self.min.len()
    }

    /// Maps a raw objective vector to [0, 1] per dimension. Dimensions with
    /// zero range map to 0.
    pub fn normalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(d, &v)| {
                let range = self.max[d] - self.min[d];
                if range > 0.0 {
                    (v - self.min[d]) / range
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn denormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(d, &v)| {
                let range = self.max[d] - self.min[d];
                if range > 0.0 {
                    self.min[d] + v * range
                } else {
                    self.min[d]
                }
            })
            .collect()
    }
}

/// Per-objective min-max normalization of a whole set; returns the
/// normalized set and the statistics needed to invert it.
pub fn normalize_objectives(objectives: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, NormStats)> {
    let m = check_uniform(objectives)?;
    let mut min = vec![f64::INFINITY; m];
    let mut max = vec![f64::NEG_INFINITY; m];
    for y in objectives {
        for d in 0..m {
            min[d] = min[d].min(y[d]);
            max[d] = max[d].max(y[d]);
        }
    }
    let stats = NormStats { min, max };
    let normalized = objectives.iter().map(|y| stats.normalize(y)).collect();
    Ok((normalized, stats))
}

/// Reference point at `z_min + scale * (z_max - z_min)` per dimension, so
/// that it sits at `(scale, ..., scale)` in normalized objective space.
/// Dimensions with zero range are offset by `scale` to keep the hypervolume
/// box non-degenerate.
pub fn nadir_reference(objectives: &[Vec<f64>], scale: f64) -> Result<Vec<f64>> {
    let m = check_uniform(objectives)?;
    let mut min = vec![f64::INFINITY; m];
    let mut max = vec![f64::NEG_INFINITY; m];
    for y in objectives {
        for d in 0..m {
            min[d] = min[d].min(y[d]);
            max[d] = max[d].max(y[d]);
        }
    }
    Ok((0..m)
        .map(|d| {
            let range = max[d] - min[d];
            if range > 0.0 {
                min[d] + scale * range
            } else {
                min[d] + scale
            }
        })
        .collect())
}

/// Full NSGA-II ordering of `points` truncated to the first `n` indices:
/// rank ascending, then crowding distance descending, then original index
/// ascending as the final tie-break.
pub fn nsga2_select(points: &[Vec<f64>], n: usize) -> Result<Vec<usize>> {
    if n > points.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {n} from {} points",
            points.len()
        )));
    }
    let partition = non_dominated_sort(points)?;
    let mut crowding = vec![0.0f64; points.len()];
    for front in &partition.fronts {
        let objs: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&objs)) {
            crowding[i] = d;
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        partition.ranks[a]
            .cmp(&partition.ranks[b])
            .then(crowding[b].partial_cmp(&crowding[a]).unwrap())
            .then(a.cmp(&b))
    });
    order.truncate(n);
    Ok(order)
}

/// Removes the best `floor((1 - p/100) * n)` points under the NSGA-II
/// ordering and returns the retained indices (in ordering position after the
/// removed prefix). `p = 100` retains everything.
pub fn percentile_filter(points: &[Vec<f64>], p: f64) -> Result<Vec<usize>> {
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::InvalidArgument(format!(
            "percentile must lie in (0, 100], got {p}"
        )));
    }
    let n = points.len();
    let order = nsga2_select(points, n)?;
    let removed = ((1.0 - p / 100.0) * n as f64).floor() as usize;
    Ok(order[removed..].to_vec())
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Brute-force oracles, kept independent of the implementations above.

    /// Dominance-matrix front peeling.
    pub fn brute_force_ranks(points: &[Vec<f64>]) -> Vec<usize> {
        let n = points.len();
        let mut dominated_by = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = &points[j];
                let b = &points[i];
                let all_le = a.iter().zip(b).all(|(x, y)| x <= y);
                let any_lt = a.iter().zip(b).any(|(x, y)| x < y);
                dominated_by[i][j] = all_le && any_lt;
            }
        }
        let mut ranks = vec![usize::MAX; n];
        let mut assigned = 0;
        let mut rank = 0;
        while assigned < n {
            let front: Vec<usize> = (0..n)
                .filter(|&i| {
                    ranks[i] == usize::MAX
                        && (0..n).all(|j| ranks[j] != usize::MAX || !dominated_by[i][j])
                })
                .collect();
            for &i in &front {
                ranks[i] = rank;
            }
            assigned += front.len();
            rank += 1;
        }
        ranks
    }

    /// Double-loop IGD.
    pub fn igd_double_loop(approx: &[Vec<f64>], true_front: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for t in true_front {
            let mut best = f64::INFINITY;
            for a in approx {
                let mut d2 = 0.0;
                for k in 0..t.len() {
                    d2 += (t[k] - a[k]) * (t[k] - a[k]);
                }
                if d2.sqrt() < best {
                    best = d2.sqrt();
                }
            }
            total += best;
        }
        total / true_front.len() as f64
    }
}
