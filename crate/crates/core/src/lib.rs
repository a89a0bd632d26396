//! Additive Effects of Collinearity (AEC) feature attribution.
//!
//! AEC scores each feature by its univariate effect on the outcome, scaled by
//! the summed univariate slopes the features have on one another:
//!
//! ```text
//! AEC(j) = beta(y ~ X_j) * sum_{z} sum_{i != j, i != z} beta(X_z ~ X_i)
//! ```
//!
//! The crate also ships the pieces needed to evaluate that score:
//!
//! * [`data`]: datasets, CSV ingestion, standardization and Pearson correlation.
//! * [`simgen`]: seeded generators with informative, redundant and noise features.
//! * [`fit`]: closed-form OLS and IRLS logistic regression.
//! * [`engine`]: pairwise slope matrix, collinearity sums and AEC reports.
//! * [`shap`]: exact interventional Shapley values for linear and logistic models.
//! * [`stability`]: Normalized Movement Rate, a ranking stability score.
//! * [`report`] and [`heatmap`]: CSV tables and SVG correlation heatmaps.
//!
//! ```
//! use aec::data::{Dataset, TaskKind};
//! use aec::engine::aec_scores;
//!
//! let x1 = vec![1.0, 2.0, 3.0, 4.0];
//! let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
//! let y: Vec<f64> = x1.iter().map(|v| 3.0 * v).collect();
//! let d = Dataset::new(vec!["X1".into(), "X2".into()], vec![x1, x2], y, TaskKind::Regression)?;
//!
//! let report = aec_scores(&d)?;
//! assert_eq!(report.score, vec![1.5, 3.0]);
//! assert_eq!(report.rank, vec![1, 0]);
//! # Ok::<(), aec::Error>(())
//! ```

pub mod cli;
pub mod data;
pub mod engine;
mod error;
pub mod fit;
pub mod heatmap;
pub mod report;
pub mod shap;
pub mod simgen;
pub mod stability;
pub mod sum;

pub use error::{Error, Result};
