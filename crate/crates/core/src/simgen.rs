//! Seeded synthetic datasets with informative, redundant and noise features.
//!
//! * informative features are iid standard normal;
//! * each redundant feature is a random linear combination of the informative
//!   ones (weights drawn once from a standard normal) plus Gaussian noise;
//! * noise features are iid standard normal and unrelated to anything else.
//!
//! The latent score is `sum_k w_k * informative_k + eps` with `w_k ~ U[1, 100]`
//! and `eps ~ N(0, target_noise_sd)`. Regression targets are the score itself;
//! classification labels are 1 where the score exceeds its sample median.
//!
//! Columns are shuffled by a second RNG stream derived from the same seed, so
//! [`ground_truth`] can recover the roles without generating any data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, TaskKind};
use crate::{Error, Result};

const DATA_STREAM: u64 = 0;
const SHUFFLE_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub n_samples: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_noise: usize,
    pub redundant_noise_sd: f64,
    pub target_noise_sd: f64,
    pub seed: u64,
    pub task: TaskKind,
}

impl SimSpec {
    pub const DEFAULT_REDUNDANT_NOISE_SD: f64 = 0.1;

    /// Spec with default noise levels for `task`.
    pub fn new(
        task: TaskKind,
        n_samples: usize,
        n_informative: usize,
        n_redundant: usize,
        n_noise: usize,
        seed: u64,
    ) -> Self {
        Self {
            n_samples,
            n_informative,
            n_redundant,
            n_noise,
            redundant_noise_sd: Self::DEFAULT_REDUNDANT_NOISE_SD,
            target_noise_sd: Self::default_target_noise_sd(task),
            seed,
            task,
        }
    }

    /// Default sd of the latent-score noise.
    ///
    /// Classification uses a noise level comparable to the score's spread so
    /// the classes overlap and the logistic likelihood has a finite maximizer.
    pub fn default_target_noise_sd(task: TaskKind) -> f64 {
        match task {
            TaskKind::Regression => 10.0,
            TaskKind::BinaryClassification => 100.0,
        }
    }

    /// 100,000 samples, 16 features: 9 informative, 5 redundant, 2 noise.
    pub fn collinear_classification(seed: u64) -> Self {
        Self::new(TaskKind::BinaryClassification, 100_000, 9, 5, 2, seed)
    }

    /// 150,000 samples, 16 features: 7 informative, 5 redundant, 4 noise.
    pub fn collinear_regression(seed: u64) -> Self {
        Self::new(TaskKind::Regression, 150_000, 7, 5, 4, seed)
    }

    pub fn n_features(&self) -> usize {
        self.n_informative + self.n_redundant + self.n_noise
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_informative < 1 {
            return Err(Error::InvalidSpec(
                "at least one informative feature required".into(),
            ));
        }
        let n = self.n_features();
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "at least 2 features required, got {n}"
            )));
        }
        if self.n_samples < n + 2 {
            return Err(Error::InvalidSpec(format!(
                "{} samples is too few for {n} features (need at least {})",
                self.n_samples,
                n + 2
            )));
        }
        for (name, sd) in [
            ("redundant_noise_sd", self.redundant_noise_sd),
            ("target_noise_sd", self.target_noise_sd),
        ] {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{name} must be finite and non-negative, got {sd}"
                )));
            }
        }
        Ok(())
    }

    fn column_order(&self) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(SHUFFLE_STREAM);
        let mut order: Vec<usize> = (0..self.n_features()).collect();
        order.shuffle(&mut rng);
        order
    }

    fn unshuffled_roles(&self) -> Vec<(FeatureRole, usize)> {
        let inf = (1..=self.n_informative).map(|k| (FeatureRole::Informative, k));
        let red = (1..=self.n_redundant).map(|k| (FeatureRole::Redundant, k));
        let noise = (1..=self.n_noise).map(|k| (FeatureRole::Noise, k));
        inf.chain(red).chain(noise).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureRole {
    Informative,
    Redundant,
    Noise,
}

impl FeatureRole {
    pub fn prefix(self) -> &'static str {
        match self {
            FeatureRole::Informative => "inf",
            FeatureRole::Redundant => "red",
            FeatureRole::Noise => "noise",
        }
    }
}

/// Role of each generated column, in the generated (shuffled) column order.
pub fn ground_truth(spec: &SimSpec) -> Vec<FeatureRole> {
    let roles = spec.unshuffled_roles();
    spec.column_order()
        .into_iter()
        .map(|k| roles[k].0)
        .collect()
}

fn normal_column(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Generates the dataset described by `spec`; a pure function of `spec`.
pub fn generate(spec: &SimSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(DATA_STREAM);

    let informative: Vec<Vec<f64>> = (0..spec.n_informative)
        .map(|_| normal_column(&mut rng, n))
        .collect();

    let mut columns = informative.clone();
    for _ in 0..spec.n_redundant {
        let weights: Vec<f64> = (0..spec.n_informative)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let column = (0..n)
            .map(|s| {
                let signal: f64 = weights
                    .iter()
                    .zip(&informative)
                    .map(|(w, c)| w * c[s])
                    .sum();
                let e: f64 = rng.sample(StandardNormal);
                signal + spec.redundant_noise_sd * e
            })
            .collect();
        columns.push(column);
    }
    for _ in 0..spec.n_noise {
        columns.push(normal_column(&mut rng, n));
    }

    let weight_dist = Uniform::new_inclusive(1.0, 100.0).expect("valid bounds");
    let target_weights: Vec<f64> = (0..spec.n_informative)
        .map(|_| rng.sample(weight_dist))
        .collect();
    let eps =
        Normal::new(0.0, spec.target_noise_sd).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let score: Vec<f64> = (0..n)
        .map(|s| {
            let signal: f64 = target_weights
                .iter()
                .zip(&informative)
                .map(|(w, c)| w * c[s])
                .sum();
            signal + rng.sample(eps)
        })
        .collect();
    let target = match spec.task {
        TaskKind::Regression => score,
        TaskKind::BinaryClassification => {
            let m = median(&score);
            score
                .iter()
                .map(|&v| if v > m { 1.0 } else { 0.0 })
                .collect()
        }
    };

    let roles = spec.unshuffled_roles();
    let order = spec.column_order();
    let names = order
        .iter()
        .map(|&k| format!("{}_{}", roles[k].0.prefix(), roles[k].1))
        .collect();
    let mut slots: Vec<Option<Vec<f64>>> = columns.into_iter().map(Some).collect();
    let shuffled = order
        .iter()
        .map(|&k| slots[k].take().expect("permutation"))
        .collect();
    Dataset::new(names, shuffled, target, spec.task)
}
