//! Test-only oracles, written independently of the library's code paths:
//! plain (uncompensated) sums, literal index loops and a separate Newton solver.

#![allow(dead_code)]

use aec::data::{Dataset, TaskKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Slope of `y` regressed on `x`: covariance over variance, plain two-pass sums.
pub fn naive_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Two-parameter Newton-Raphson for the logit model, iterated until the step
/// stops changing the parameters.
pub fn newton_logistic_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(y) {
            let p = sigmoid(a + b * xi);
            let w = p * (1.0 - p);
            g0 += yi - p;
            g1 += (yi - p) * xi;
            h00 += w;
            h01 += w * xi;
            h11 += w * xi * xi;
        }
        let det = h00 * h11 - h01 * h01;
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;
        a += da;
        b += db;
        if da.abs() <= 1e-15 * (1.0 + a.abs()) && db.abs() <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    b
}

/// Literal evaluation of the AEC double sum with every slope refitted.
pub fn brute_force_aec(d: &Dataset) -> Vec<f64> {
    let n = d.n_features();
    (0..n)
        .map(|j| {
            let target = match d.task() {
                TaskKind::Regression => naive_slope(d.column(j), d.target()),
                TaskKind::BinaryClassification => newton_logistic_slope(d.column(j), d.target()),
            };
            let mut s = 0.0;
            for z in 0..n {
                for i in 0..n {
                    if i != j && z != i {
                        s += naive_slope(d.column(i), d.column(z));
                    }
                }
            }
            target * s
        })
        .collect()
}

/// True if some feature separates the classes (completely or quasi-completely).
pub fn any_feature_separates(d: &Dataset) -> bool {
    d.columns().iter().any(|c| {
        let (mut min0, mut max0, mut min1, mut max1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (&x, &y) in c.iter().zip(d.target()) {
            if y == 1.0 {
                min1 = min1.min(x);
                max1 = max1.max(x);
            } else {
                min0 = min0.min(x);
                max0 = max0.max(x);
            }
        }
        max0 <= min1 || max1 <= min0
    })
}

/// Correlated Gaussian features: every column mixes a shared latent factor
/// with its own noise, in random proportions and units.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    n_features: usize,
    n_samples: usize,
    task: TaskKind,
) -> Dataset {
    loop {
        let latent: Vec<f64> = (0..n_samples).map(|_| rng.sample(StandardNormal)).collect();
        let columns: Vec<Vec<f64>> = (0..n_features)
            .map(|_| {
                let load: f64 = rng.random_range(-1.5..1.5);
                let scale: f64 = rng.random_range(0.2..5.0);
                let shift: f64 = rng.random_range(-10.0..10.0);
                latent
                    .iter()
                    .map(|l| shift + scale * (load * l + rng.sample::<f64, _>(StandardNormal)))
                    .collect()
            })
            .collect();
        let weights: Vec<f64> = (0..n_features)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let score: Vec<f64> = (0..n_samples)
            .map(|s| {
                weights
                    .iter()
                    .zip(&columns)
                    .map(|(w, c)| w * c[s])
                    .sum::<f64>()
                    * 0.3
            })
            .collect();
        let target: Vec<f64> = match task {
            TaskKind::Regression => score
                .iter()
                .map(|v| v + rng.sample::<f64, _>(StandardNormal))
                .collect(),
            TaskKind::BinaryClassification => score
                .iter()
                .map(|v| {
                    if rng.random::<f64>() < sigmoid(0.3 * v) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        };
        let names = (0..n_features).map(|k| format!("F{}", k + 1)).collect();
        match Dataset::new(names, columns, target, task) {
            Ok(d) if task == TaskKind::Regression || !any_feature_separates(&d) => return d,
            Ok(_) | Err(aec::Error::SingleClass) => continue,
            Err(e) => panic!("bad dataset shape: {e}"),
        }
    }
}

/// Shapley values of the linear model `intercept + coefficients . x` for
/// sample `x`, by enumerating every coalition. Absent features are filled in
/// from each background row and the model output averaged.
pub fn shapley_by_enumeration(
    intercept: f64,
    coefficients: &[f64],
    background: &[Vec<f64>],
    x: &[f64],
) -> Vec<f64> {
    let n = coefficients.len();
    let f = |row: &[f64]| {
        intercept
            + coefficients
                .iter()
                .zip(row)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    };
    let value = |mask: u32| -> f64 {
        let total: f64 = background
            .iter()
            .map(|bg| {
                let row: Vec<f64> = (0..n)
                    .map(|k| if mask & (1 << k) != 0 { x[k] } else { bg[k] })
                    .collect();
                f(&row)
            })
            .sum();
        total / background.len() as f64
    };
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    (0..n)
        .map(|j| {
            let mut phi = 0.0;
            for mask in 0u32..(1 << n) {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let size = mask.count_ones() as usize;
                let weight = fact(size) * fact(n - size - 1) / fact(n);
                phi += weight * (value(mask | (1 << j)) - value(mask));
            }
            phi
        })
        .collect()
}

pub fn relative_error(actual: f64, expected: f64) -> f64 {
    let scale = actual.abs().max(expected.abs());
    if scale == 0.0 {
        0.0
    } else {
        (actual - expected).abs() / scale
    }
}
