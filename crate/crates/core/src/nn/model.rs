//! Two-hidden-layer MLPs over flat parameter vectors, with exact per-task
//! backpropagation of the mean-squared-error loss.
//!
//! All three surrogate architectures share the same compute graph
//! (input -> hidden -> relu -> hidden -> relu -> outputs); they differ in how
//! outputs are grouped into networks and where multi-task gradient
//! techniques attach.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surrogate architecture families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    /// One network, m-wide output layer.
    EndToEnd,
    /// Shared trunk with one width-1 head per objective.
    MultiHead,
    /// m independent single-output networks.
    Multiple,
}

impl std::str::FromStr for SurrogateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "end-to-end" | "end_to_end" => Ok(SurrogateKind::EndToEnd),
            "multi-head" | "multi_head" => Ok(SurrogateKind::MultiHead),
            "multiple" => Ok(SurrogateKind::Multiple),
            _ => Err(Error::Config(format!(
                "unknown surrogate kind '{s}' (expected end-to-end|multi-head|multiple)"
            ))),
        }
    }
}

impl std::fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SurrogateKind::EndToEnd => "end-to-end",
            SurrogateKind::MultiHead => "multi-head",
            SurrogateKind::Multiple => "multiple",
        })
    }
}

/// A dense input -> hidden -> relu -> hidden -> relu -> output network with
/// parameters in one flat vector:
/// `[W1 (h x d), b1 (h), W2 (h x h), b2 (h), W3 (out x h), b3 (out)]`,
/// matrices row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub d_in: usize,
    pub hidden: usize,
    pub n_out: usize,
    pub theta: Vec<f64>,
}

impl Net {
    pub fn param_count(d_in: usize, hidden: usize, n_out: usize) -> usize {
        hidden * d_in + hidden + hidden * hidden + hidden + n_out * hidden + n_out
    }

    /// He-style uniform fan-in initialization, seeded.
    pub fn new_seeded(d_in: usize, hidden: usize, n_out: usize, rng: &mut ChaCha8Rng) -> Net {
        let mut theta = Vec::with_capacity(Self::param_count(d_in, hidden, n_out));
        let mut layer = |rows: usize, cols: usize, fan_in: usize, theta: &mut Vec<f64>| {
            let limit = (6.0 / fan_in as f64).sqrt();
            theta.extend((0..rows * cols).map(|_| (rng.random::<f64>() * 2.0 - 1.0) * limit));
            theta.extend(std::iter::repeat_n(0.0, rows));
        };
        layer(hidden, d_in, d_in, &mut theta);
        layer(hidden, hidden, hidden, &mut theta);
        layer(n_out, hidden, hidden, &mut theta);
        Net { d_in, hidden, n_out, theta }
    }

    pub fn from_theta(d_in: usize, hidden: usize, n_out: usize, theta: Vec<f64>) -> Result<Net> {
        if theta.len() != Self::param_count(d_in, hidden, n_out) {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} parameters, layout needs {}",
                theta.len(),
                Self::param_count(d_in, hidden, n_out)
            )));
        }
        Ok(Net { d_in, hidden, n_out, theta })
    }

    // flat-layout offsets
    pub fn w1(&self) -> usize {
        0
    }
    pub fn b1(&self) -> usize {
        self.hidden * self.d_in
    }
    pub fn w2(&self) -> usize {
        self.b1() + self.hidden
    }
    pub fn b2(&self) -> usize {
        self.w2() + self.hidden * self.hidden
    }
    pub fn w3(&self) -> usize {
        self.b2() + self.hidden
    }
    pub fn b3(&self) -> usize {
        self.w3() + self.n_out * self.hidden
    }

    /// Parameter range of the layer GradNorm attaches to: the output weight
    /// matrix for end-to-end networks, the trunk's last weight matrix for
    /// multi-head networks.
    pub fn shared_layer_range(&self, kind: SurrogateKind) -> std::ops::Range<usize> {
        match kind {
            SurrogateKind::MultiHead => self.w2()..self.w2() + self.hidden * self.hidden,
            _ => self.w3()..self.w3() + self.n_out * self.hidden,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "input of {} dims, network expects {}",
                x.len(),
                self.d_in
            )));
        }
        let (_, _, _, a2) = self.forward_trunk(x);
        Ok(self.output_from(&a2))
    }

    /// Trunk activations: (z1, a1, z2, a2) with a = relu(z).
    fn forward_trunk(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        let t = &self.theta;
        let mut z1 = vec![0.0; h];
        for r in 0..h {
            let row = self.w1() + r * self.d_in;
            let mut s = t[self.b1() + r];
            for c in 0..self.d_in {
                s += t[row + c] * x[c];
            }
            z1[r] = s;
        }
        let a1: Vec<f64> = z1.iter().map(|&v| v.max(0.0)).collect();
        let mut z2 = vec![0.0; h];
        for r in 0..h {
            let row = self.w2() + r * h;
            let mut s = t[self.b2() + r];
            for c in 0..h {
                s += t[row + c] * a1[c];
            }
            z2[r] = s;
        }
        let a2: Vec<f64> = z2.iter().map(|&v| v.max(0.0)).collect();
        (z1, a1, z2, a2)
    }

    fn output_from(&self, a2: &[f64]) -> Vec<f64> {
        let h = self.hidden;
        let t = &self.theta;
        (0..self.n_out)
            .map(|r| {
                let row = self.w3() + r * h;
                let mut s = t[self.b3() + r];
                for c in 0..h {
                    s += t[row + c] * a2[c];
                }
                s
            })
            .collect()
    }

    /// Exact gradients of each task's batch MSE with respect to all
    /// parameters, plus the per-task losses. Task `t`'s loss is
    /// `mean_b (pred_t - target_t)^2`.
    pub fn backward_batch(
        &self,
        xs: &[&[f64]],
        targets: &[&[f64]],
    ) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        if xs.is_empty() {
            return Err(Error::EmptyInput("backward needs a non-empty batch"));
        }
        let h = self.hidden;
        let d = self.d_in;
        let m = self.n_out;
        let t = &self.theta;
        let batch = xs.len() as f64;
        let mut grads = vec![vec![0.0; t.len()]; m];
        let mut losses = vec![0.0; m];

        for (x, target) in xs.iter().zip(targets) {
            let (z1, a1, z2, a2) = self.forward_trunk(x);
            let y = self.output_from(&a2);
            for task in 0..m {
                let residual = y[task] - target[task];
                losses[task] += residual * residual / batch;
                let g_out = 2.0 * residual / batch;
                let grad = &mut grads[task];

                // output layer: row `task` only
                let w3_row = self.w3() + task * h;
                for c in 0..h {
                    grad[w3_row + c] += g_out * a2[c];
                }
                grad[self.b3() + task] += g_out;

                // trunk
                let mut dz2 = vec![0.0; h];
                for r in 0..h {
                    if z2[r] > 0.0 {
                        dz2[r] = t[w3_row + r] * g_out;
                    }
                }
                for r in 0..h {
                    if dz2[r] == 0.0 {
                        continue;
                    }
                    let row = self.w2() + r * h;
                    for c in 0..h {
                        grad[row + c] += dz2[r] * a1[c];
                    }
                    grad[self.b2() + r] += dz2[r];
                }
                let mut dz1 = vec![0.0; h];
                for c in 0..h {
                    if z1[c] > 0.0 {
                        let mut s = 0.0;
                        for r in 0..h {
                            if dz2[r] != 0.0 {
                                s += t[self.w2() + r * h + c] * dz2[r];
                            }
                        }
                        dz1[c] = s;
                    }
                }
                for r in 0..h {
                    if dz1[r] == 0.0 {
                        continue;
                    }
                    let row = self.w1() + r * d;
                    for c in 0..d {
                        grad[row + c] += dz1[r] * x[c];
                    }
                    grad[self.b1() + r] += dz1[r];
                }
            }
        }
        Ok((grads, losses))
    }

    /// Per-task mean squared errors over a sample set.
    pub fn losses(&self, xs: &[&[f64]], targets: &[&[f64]]) -> Result<Vec<f64>> {
        if xs.is_empty() {
            return Err(Error::EmptyInput("loss evaluation needs samples"));
        }
        let mut losses = vec![0.0; self.n_out];
        for (x, target) in xs.iter().zip(targets) {
            let y = self.forward(x)?;
            for task in 0..self.n_out {
                let r = y[task] - target[task];
                losses[task] += r * r;
            }
        }
        for l in &mut losses {
            *l /= xs.len() as f64;
        }
        Ok(losses)
    }
}

/// Adam with bias correction over a flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(n_params: usize) -> Adam {
        Adam { m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        debug_assert_eq!(theta.len(), grad.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..theta.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            theta[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
