//! Multi-task gradient techniques: gradient normalization (adaptive task
//! weights equalizing relative inverse training rates) and gradient surgery
//! (projecting away conflicting components).

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Lower bound keeping GradNorm task weights strictly positive.
const WEIGHT_FLOOR: f64 = 1e-4;

/// One GradNorm update at the designated shared layer.
///
/// Task weights move toward equalizing `G_i = w_i * |g_i|` with the targets
/// `mean(G) * r_i^alpha`, where `r_i` is task i's relative inverse training
/// rate `(L_i / L_i(0)) / mean_j(L_j / L_j(0))`. Targets are treated as
/// constants; the weight step is plain gradient descent with rate `lr`,
/// followed by renormalization to sum m. Returns the combined shared-layer
/// gradient `sum_i w_i g_i` under the updated weights, and the weights.
pub fn gradnorm_combine(
    task_grads: &[&[f64]],
    task_losses: &[f64],
    initial_losses: &[f64],
    weights: &[f64],
    alpha: f64,
    lr: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = task_grads.len();
    if m == 0 || task_losses.len() != m || initial_losses.len() != m || weights.len() != m {
        return Err(Error::DimensionMismatch("gradnorm inputs must all have m tasks".into()));
    }
    if initial_losses.iter().any(|&l| l <= 0.0) || task_losses.iter().any(|&l| l < 0.0) {
        return Err(Error::Numeric("gradnorm requires positive initial losses".into()));
    }

    let norms: Vec<f64> = task_grads
        .iter()
        .map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let g: Vec<f64> = norms.iter().zip(weights).map(|(&n, &w)| w * n).collect();
    let g_mean = g.iter().sum::<f64>() / m as f64;

    let rates: Vec<f64> = task_losses
        .iter()
        .zip(initial_losses)
        .map(|(&l, &l0)| l / l0)
        .collect();
    let rate_mean = rates.iter().sum::<f64>() / m as f64;

    let mut updated = weights.to_vec();
    for i in 0..m {
        let relative = if rate_mean > 0.0 { rates[i] / rate_mean } else { 1.0 };
        let target = g_mean * relative.powf(alpha);
        // d|G_i - target| / d w_i with the target detached; sign(0) = 0 so
        // the symmetric point is a true fixed point
        let diff = g[i] - target;
        let sign = if diff > 0.0 {
            1.0
        } else if diff < 0.0 {
            -1.0
        } else {
            0.0
        };
        updated[i] = (updated[i] - lr * sign * norms[i]).max(WEIGHT_FLOOR);
    }
    let sum: f64 = updated.iter().sum();
    for w in &mut updated {
        *w *= m as f64 / sum;
    }

    let len = task_grads[0].len();
    let mut combined = vec![0.0; len];
    for (g, &w) in task_grads.iter().zip(&updated) {
        for (c, &v) in combined.iter_mut().zip(*g) {
            *c += w * v;
        }
    }
    Ok((combined, updated))
}

/// Gradient surgery: for each task gradient, in a random task order, project
/// out components that conflict with other tasks' raw gradients, then sum.
///
/// `g_i <- g_i - (g_i . g_j / |g_j|^2) g_j` whenever `g_i . g_j < 0`;
/// zero-norm raw gradients are skipped.
pub fn pcgrad_combine(task_grads: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let m = task_grads.len();
    if m < 2 {
        return Err(Error::InvalidArgument("gradient surgery needs at least two tasks".into()));
    }
    let len = task_grads[0].len();
    if task_grads.iter().any(|g| g.len() != len) {
        return Err(Error::DimensionMismatch("task gradients differ in length".into()));
    }
    let norms_sq: Vec<f64> = task_grads.iter().map(|g| g.iter().map(|v| v * v).sum()).collect();

    let mut combined = vec![0.0; len];
    for i in 0..m {
        let mut projected = task_grads[i].clone();
        let mut others: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        others.shuffle(rng);
        for j in others {
            if norms_sq[j] == 0.0 {
                continue;
            }
            let dot: f64 = projected.iter().zip(&task_grads[j]).map(|(a, b)| a * b).sum();
            if dot < 0.0 {
                let scale = dot / norms_sq[j];
                for (p, &gj) in projected.iter_mut().zip(&task_grads[j]) {
                    *p -= scale * gj;
                }
            }
        }
        for (c, p) in combined.iter_mut().zip(&projected) {
            *c += p;
        }
    }
    Ok(combined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn gradnorm_symmetric_tasks_are_a_fixed_point() {
        let g1 = vec![1.0, 0.0];
        let g2 = vec![0.0, 1.0];
        let (_, w) = gradnorm_combine(
            &[&g1, &g2],
            &[0.5, 0.5],
            &[1.0, 1.0],
            &[1.0, 1.0],
            1.5,
            0.025,
        )
        .unwrap();
        assert_eq!(w, vec![1.0, 1.0]);
    }

    #[test]
    fn gradnorm_weights_sum_to_m_and_stay_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut weights = vec![1.0, 1.0, 1.0];
        for _ in 0..200 {
            let grads: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..8).map(|_| rng.random::<f64>() - 0.5).collect())
                .collect();
            let refs: Vec<&[f64]> = grads.iter().map(|g| g.as_slice()).collect();
            let losses: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.1).collect();
            let (_, w) =
                gradnorm_combine(&refs, &losses, &[1.0, 0.8, 1.2], &weights, 1.5, 0.05).unwrap();
            assert!((w.iter().sum::<f64>() - 3.0).abs() < 1e-9);
            assert!(w.iter().all(|&v| v > 0.0));
            weights = w;
        }
    }

    #[test]
    fn gradnorm_slower_task_gains_weight() {
        // task 2 trains slower: its loss ratio is larger
        let g1 = vec![1.0, 0.0];
        let g2 = vec![0.0, 1.0];
        let (_, w) = gradnorm_combine(
            &[&g1, &g2],
            &[0.2, 0.9],
            &[1.0, 1.0],
            &[1.0, 1.0],
            1.5,
            0.025,
        )
        .unwrap();
        assert!(w[1] > 1.0, "slow task weight did not increase: {w:?}");
        assert!(w[0] < 1.0);
    }

    #[test]
    fn gradnorm_guards_non_positive_initial_losses() {
        let g = vec![1.0];
        assert!(matches!(
            gradnorm_combine(&[&g, &g], &[0.5, 0.5], &[0.0, 1.0], &[1.0, 1.0], 1.5, 0.025),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn pcgrad_orthogonal_gradients_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let combined = pcgrad_combine(&g, &mut rng).unwrap();
        assert_eq!(combined, vec![1.0, 2.0]);
    }

    #[test]
    fn pcgrad_antiparallel_gradients_annihilate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = vec![vec![1.0, -2.0], vec![-1.0, 2.0]];
        let combined = pcgrad_combine(&g, &mut rng).unwrap();
        assert_eq!(combined, vec![0.0, 0.0]);
    }

    #[test]
    fn pcgrad_hand_computed_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g1 = vec![1.0, 0.0];
        let g2 = vec![-1.0, 1.0];
        // projected g1 = g1 - (g1.g2 / |g2|^2) g2 = (0.5, 0.5)
        let combined = pcgrad_combine(&[g1.clone(), g2.clone()], &mut rng).unwrap();
        // g2 does not conflict with g1? g2.g1 = -1 < 0, so g2 is projected too:
        // g2' = g2 - (-1/1) g1 = (0, 1). combined = (0.5, 1.5)
        assert!((combined[0] - 0.5).abs() < 1e-12);
        assert!((combined[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn pcgrad_two_task_no_conflict_guarantee() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let g: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..4).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .collect();
            let combined = pcgrad_combine(&g, &mut rng).unwrap();
            for gj in &g {
                let dot: f64 = combined.iter().zip(gj).map(|(a, b)| a * b).sum();
                assert!(dot >= -1e-9, "combined gradient conflicts with a raw task gradient");
            }
        }
    }

    #[test]
    fn pcgrad_skips_zero_norm_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = vec![vec![1.0, 1.0], vec![0.0, 0.0]];
        let combined = pcgrad_combine(&g, &mut rng).unwrap();
        assert_eq!(combined, vec![1.0, 1.0]);
    }
}
