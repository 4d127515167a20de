//! The DTLZ, ZDT, VLMOP, and Omni-test families with their analytic
//! Pareto-front samplers.
//!
//! Formulas follow the original problem suites (Deb et al. for DTLZ,
//! Zitzler et al. for ZDT, Van Veldhuizen for VLMOP, Deb-Tiwari for
//! Omni-test); dimensions are fixed by the task catalog.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn evaluate(name: &str, x: &[f64]) -> Result<Vec<f64>> {
    let y = match name {
        "dtlz1" => dtlz1(x),
        "dtlz2" => dtlz2(x),
        "dtlz3" => dtlz3(x),
        "dtlz4" => dtlz4(x),
        "dtlz5" => dtlz5(x),
        "dtlz6" => dtlz6(x),
        "dtlz7" => dtlz7(x),
        "zdt1" => zdt1(x),
        "zdt2" => zdt2(x),
        "zdt3" => zdt3(x),
        "zdt4" => zdt4(x),
        "zdt6" => zdt6(x),
        "omni-test" => omni_test(x),
        "vlmop1" => vlmop1(x),
        "vlmop2" => vlmop2(x),
        "vlmop3" => vlmop3(x),
        _ => return Err(Error::Unsupported(format!("unknown synthetic task '{name}'"))),
    };
    debug_assert!(y.iter().all(|v| v.is_finite()), "{name} produced non-finite objectives");
    Ok(y)
}

const M: usize = 3; // objective count of all DTLZ tasks in the catalog

fn g_dtlz1(tail: &[f64]) -> f64 {
    let k = tail.len() as f64;
    100.0
        * (k + tail
            .iter()
            .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
            .sum::<f64>())
}

fn g_dtlz2(tail: &[f64]) -> f64 {
    tail.iter().map(|&v| (v - 0.5).powi(2)).sum()
}

fn dtlz1(x: &[f64]) -> Vec<f64> {
    let g = g_dtlz1(&x[M - 1..]);
    let c = 0.5 * (1.0 + g);
    vec![
        c * x[0] * x[1],
        c * x[0] * (1.0 - x[1]),
        c * (1.0 - x[0]),
    ]
}

fn dtlz2_like(x0: f64, x1: f64, g: f64) -> Vec<f64> {
    let (t0, t1) = (x0 * PI / 2.0, x1 * PI / 2.0);
    vec![
        (1.0 + g) * t0.cos() * t1.cos(),
        (1.0 + g) * t0.cos() * t1.sin(),
        (1.0 + g) * t0.sin(),
    ]
}

fn dtlz2(x: &[f64]) -> Vec<f64> {
    dtlz2_like(x[0], x[1], g_dtlz2(&x[M - 1..]))
}

fn dtlz3(x: &[f64]) -> Vec<f64> {
    dtlz2_like(x[0], x[1], g_dtlz1(&x[M - 1..]))
}

fn dtlz4(x: &[f64]) -> Vec<f64> {
    const ALPHA: i32 = 100;
    dtlz2_like(x[0].powi(ALPHA), x[1].powi(ALPHA), g_dtlz2(&x[M - 1..]))
}

fn dtlz5_like(x: &[f64], g: f64) -> Vec<f64> {
    let t0 = x[0] * PI / 2.0;
    let t1 = PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[1]);
    vec![
        (1.0 + g) * t0.cos() * t1.cos(),
        (1.0 + g) * t0.cos() * t1.sin(),
        (1.0 + g) * t0.sin(),
    ]
}

fn dtlz5(x: &[f64]) -> Vec<f64> {
    dtlz5_like(x, g_dtlz2(&x[M - 1..]))
}

fn dtlz6(x: &[f64]) -> Vec<f64> {
    let g: f64 = x[M - 1..].iter().map(|&v| v.powf(0.1)).sum();
    dtlz5_like(x, g)
}

fn dtlz7(x: &[f64]) -> Vec<f64> {
    let tail = &x[M - 1..];
    let g = 1.0 + 9.0 / tail.len() as f64 * tail.iter().sum::<f64>();
    let f0 = x[0];
    let f1 = x[1];
    let h = M as f64
        - f0 / (1.0 + g) * (1.0 + (3.0 * PI * f0).sin())
        - f1 / (1.0 + g) * (1.0 + (3.0 * PI * f1).sin());
    vec![f0, f1, (1.0 + g) * h]
}

fn zdt_g(x: &[f64]) -> f64 {
    1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64
}

fn zdt1(x: &[f64]) -> Vec<f64> {
    let g = zdt_g(x);
    vec![x[0], g * (1.0 - (x[0] / g).sqrt())]
}

fn zdt2(x: &[f64]) -> Vec<f64> {
    let g = zdt_g(x);
    vec![x[0], g * (1.0 - (x[0] / g).powi(2))]
}

fn zdt3(x: &[f64]) -> Vec<f64> {
    let g = zdt_g(x);
    vec![
        x[0],
        g * (1.0 - (x[0] / g).sqrt() - x[0] / g * (10.0 * PI * x[0]).sin()),
    ]
}

fn zdt4(x: &[f64]) -> Vec<f64> {
    let g = 1.0
        + 10.0 * (x.len() - 1) as f64
        + x[1..]
            .iter()
            .map(|&v| v * v - 10.0 * (4.0 * PI * v).cos())
            .sum::<f64>();
    vec![x[0], g * (1.0 - (x[0] / g).sqrt())]
}

fn zdt6_f1(x0: f64) -> f64 {
    1.0 - (-4.0 * x0).exp() * (6.0 * PI * x0).sin().powi(6)
}

fn zdt6(x: &[f64]) -> Vec<f64> {
    let f1 = zdt6_f1(x[0]);
    let g = 1.0 + 9.0 * (x[1..].iter().sum::<f64>() / (x.len() - 1) as f64).powf(0.25);
    vec![f1, g * (1.0 - (f1 / g).powi(2))]
}

fn omni_test(x: &[f64]) -> Vec<f64> {
    vec![
        x.iter().map(|&v| (PI * v).sin()).sum(),
        x.iter().map(|&v| (PI * v).cos()).sum(),
    ]
}

fn vlmop1(x: &[f64]) -> Vec<f64> {
    vec![x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)]
}

fn vlmop2(x: &[f64]) -> Vec<f64> {
    let shift = 1.0 / (x.len() as f64).sqrt();
    let s1: f64 = x.iter().map(|&v| (v - shift).powi(2)).sum();
    let s2: f64 = x.iter().map(|&v| (v + shift).powi(2)).sum();
    vec![1.0 - (-s1).exp(), 1.0 - (-s2).exp()]
}

fn vlmop3(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    let r2 = a * a + b * b;
    vec![
        0.5 * r2 + r2.sin(),
        (3.0 * a - 2.0 * b + 4.0).powi(2) / 8.0 + (a - b + 1.0).powi(2) / 27.0 + 15.0,
        1.0 / (r2 + 1.0) - 1.1 * (-r2).exp(),
    ]
}

/// Evenly spaced values in [lo, hi], inclusive of both ends.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Das-Dennis simplex lattice with `h` partitions: all weight vectors with
/// components i/h summing to 1, in lexicographic order.
pub fn das_dennis(m: usize, h: usize) -> Vec<Vec<f64>> {
    fn recurse(m: usize, h: usize, left: usize, prefix: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == m - 1 {
            let mut w = prefix.clone();
            w.push(left as f64 / h as f64);
            out.push(w);
            return;
        }
        for i in 0..=left {
            prefix.push(i as f64 / h as f64);
            recurse(m, h, left - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    recurse(m, h, h, &mut Vec::new(), &mut out);
    out
}

/// Das-Dennis lattice with the smallest partition count whose size is at
/// least `n`.
pub fn das_dennis_at_least(m: usize, n: usize) -> Vec<Vec<f64>> {
    let mut h = 1;
    loop {
        let lattice = das_dennis(m, h);
        if lattice.len() >= n {
            return lattice;
        }
        h += 1;
    }
}

/// Takes `n` evenly spaced elements from `v` (by index), preserving order.
fn even_subsample<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    if n >= v.len() {
        return v.to_vec();
    }
    (0..n).map(|i| v[i * v.len() / n].clone()).collect()
}

/// Filters a candidate curve/surface sample down to its non-dominated subset
/// and returns `n` evenly spaced survivors.
fn nds_subsample(candidates: Vec<Vec<f64>>, n: usize) -> Vec<Vec<f64>> {
    let mut keep: Vec<Vec<f64>> = Vec::new();
    'outer: for (i, p) in candidates.iter().enumerate() {
        for (j, q) in candidates.iter().enumerate() {
            if i != j && (crate::pareto::dominates_unchecked(q, p) || (p == q && j < i)) {
                continue 'outer;
            }
        }
        keep.push(p.clone());
    }
    even_subsample(&keep, n)
}

pub fn true_front(name: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("front sample size must be >= 1".into()));
    }
    let front = match name {
        // f2 = 1 - sqrt(f1) on g = 1
        "zdt1" | "zdt4" => linspace(0.0, 1.0, n)
            .into_iter()
            .map(|f1| vec![f1, 1.0 - f1.sqrt()])
            .collect(),
        "zdt2" => linspace(0.0, 1.0, n)
            .into_iter()
            .map(|f1| vec![f1, 1.0 - f1 * f1])
            .collect(),
        "zdt3" => {
            let candidates = linspace(0.0, 1.0, (20 * n).max(2000))
                .into_iter()
                .map(|f1| {
                    vec![f1, 1.0 - f1.sqrt() - f1 * (10.0 * PI * f1).sin()]
                })
                .collect();
            nds_subsample(candidates, n)
        }
        "zdt6" => {
            // achievable f1 values are images of x1; the curve f2 = 1 - f1^2
            // is strictly decreasing, so every sample is non-dominated
            let mut f1s: Vec<f64> = linspace(0.0, 1.0, (20 * n).max(2000))
                .into_iter()
                .map(zdt6_f1)
                .collect();
            f1s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            f1s.dedup();
            even_subsample(&f1s, n)
                .into_iter()
                .map(|f1| vec![f1, 1.0 - f1 * f1])
                .collect()
        }
        // linear plane sum f = 0.5 on g = 0
        "dtlz1" => {
            let lattice: Vec<Vec<f64>> = das_dennis_at_least(M, n)
                .into_iter()
                .map(|w| w.into_iter().map(|v| 0.5 * v).collect())
                .collect();
            even_subsample(&lattice, n)
        }
        // unit sphere, positive orthant
        "dtlz2" | "dtlz3" | "dtlz4" => {
            let sphere: Vec<Vec<f64>> = das_dennis_at_least(M, n)
                .into_iter()
                .map(|w| {
                    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    w.into_iter().map(|v| v / norm).collect()
                })
                .collect();
            even_subsample(&sphere, n)
        }
        // degenerate curve (cos t / sqrt2, cos t / sqrt2, sin t)
        "dtlz5" | "dtlz6" => linspace(0.0, PI / 2.0, n)
            .into_iter()
            .map(|t| vec![t.cos() / 2f64.sqrt(), t.cos() / 2f64.sqrt(), t.sin()])
            .collect(),
        "dtlz7" => {
            let side = ((20 * n) as f64).sqrt().ceil() as usize;
            let grid = linspace(0.0, 1.0, side.max(40));
            let mut candidates = Vec::with_capacity(grid.len() * grid.len());
            for &f0 in &grid {
                for &f1 in &grid {
                    let h = M as f64
                        - f0 * (1.0 + (3.0 * PI * f0).sin())
                        - f1 * (1.0 + (3.0 * PI * f1).sin());
                    candidates.push(vec![f0, f1, h]);
                }
            }
            nds_subsample(candidates, n)
        }
        "omni-test" => {
            // Pareto set: all coordinates equal, t in [1, 1.5]
            let dims = 2.0;
            linspace(1.0, 1.5, n)
                .into_iter()
                .map(|t| vec![dims * (PI * t).sin(), dims * (PI * t).cos()])
                .collect()
        }
        "vlmop1" => linspace(0.0, 2.0, n)
            .into_iter()
            .map(|t| vec![t * t, (t - 2.0) * (t - 2.0)])
            .collect(),
        "vlmop2" => {
            let d = 6.0f64;
            let shift = 1.0 / d.sqrt();
            linspace(-shift, shift, n)
                .into_iter()
                .map(|t| {
                    vec![
                        1.0 - (-d * (t - shift).powi(2)).exp(),
                        1.0 - (-d * (t + shift).powi(2)).exp(),
                    ]
                })
                .collect()
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "no analytic front sampler for task '{name}'"
            )))
        }
    };
    Ok(front)
}
