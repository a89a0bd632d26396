//! Exact interventional Shapley values for linear and logistic models.
//!
//! With features treated as independent and the value function taken as the
//! expectation over the data's marginal distribution, the Shapley value of a
//! linear model `f(x) = b0 + sum_j b_j x_j` has the closed form
//! `phi_j(x) = b_j (x_j - mean_j)`. Logistic models are attributed on the
//! log-odds scale, where they are linear.

use std::io;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::{is_permutation, Dataset};
use crate::engine::{rank_by_magnitude, AecReport};
use crate::fit::{self, FitKind, MultivariateFit};
use crate::sum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShapReport {
    pub names: Vec<String>,
    /// `n_samples x n_features` attributions.
    pub phi: DMatrix<f64>,
    /// Mean `|phi|` per feature.
    pub global_importance: Vec<f64>,
    /// Feature indices by global importance descending, ties by index.
    pub rank: Vec<usize>,
    pub fit: MultivariateFit,
    pub feature_means: Vec<f64>,
}

impl ShapReport {
    pub fn ranked_names(&self) -> Vec<&str> {
        self.rank.iter().map(|&k| self.names[k].as_str()).collect()
    }

    /// CSV with header `feature,global_importance,rank`, in rank order; `rank` is 1-based.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "global_importance", "rank"])?;
        for (pos, &k) in self.rank.iter().enumerate() {
            w.write_record([
                self.names[k].clone(),
                self.global_importance[k].to_string(),
                (pos + 1).to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Attributions for a given fitted linear model.
pub fn shap_from_fit(d: &Dataset, fit: MultivariateFit) -> Result<ShapReport> {
    if fit.coefficients.len() != d.n_features() {
        return Err(Error::LengthMismatch {
            left: fit.coefficients.len(),
            right: d.n_features(),
        });
    }
    let (n, p) = (d.n_samples(), d.n_features());
    let feature_means: Vec<f64> = d.columns().iter().map(|c| sum::mean(c)).collect();
    let columns: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|j| {
            let (b, m) = (fit.coefficients[j], feature_means[j]);
            d.column(j).iter().map(|x| b * (x - m)).collect()
        })
        .collect();
    let global_importance: Vec<f64> = columns
        .iter()
        .map(|c| sum::sum(c.iter().map(|v| v.abs())) / n as f64)
        .collect();
    let phi = DMatrix::from_fn(n, p, |s, j| columns[j][s]);
    Ok(ShapReport {
        names: d.names().to_vec(),
        rank: rank_by_magnitude(&global_importance),
        global_importance,
        phi,
        fit,
        feature_means,
    })
}

/// Fits the task's multivariate model and attributes it exactly.
///
/// A logistic fit that fails to converge is an error: the comparator needs a
/// trustworthy model.
pub fn shap_linear(d: &Dataset) -> Result<ShapReport> {
    let fit = fit::fit_dataset(d)?;
    if fit.kind == FitKind::Logistic && !fit.converged {
        return Err(Error::NotConverged(fit.iterations));
    }
    shap_from_fit(d, fit)
}

/// One feature's positions in the two rankings (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Displacement {
    pub feature: String,
    pub aec_rank: usize,
    pub shap_rank: usize,
    pub displacement: usize,
}

/// Side-by-side ranking lists plus per-feature rank displacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingComparison {
    /// `(aec, shap)` feature names at each position.
    pub rows: Vec<(String, String)>,
    /// In the order of the first ranking's feature names.
    pub displacement: Vec<Displacement>,
}

impl RankingComparison {
    pub fn max_displacement(&self) -> usize {
        self.displacement
            .iter()
            .map(|d| d.displacement)
            .max()
            .unwrap_or(0)
    }

    /// CSV `position,aec,linear_shap`.
    pub fn write_table_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["position", "aec", "linear_shap"])?;
        for (pos, (a, b)) in self.rows.iter().enumerate() {
            w.write_record([(pos + 1).to_string(), a.clone(), b.clone()])?;
        }
        w.flush()
    }

    /// CSV `feature,aec_rank,linear_shap_rank,displacement`.
    pub fn write_displacement_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature", "aec_rank", "linear_shap_rank", "displacement"])?;
        for d in &self.displacement {
            w.write_record([
                d.feature.clone(),
                d.aec_rank.to_string(),
                d.shap_rank.to_string(),
                d.displacement.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Compares two orderings over the same named features.
pub fn compare_orders(
    names_a: &[String],
    rank_a: &[usize],
    names_b: &[String],
    rank_b: &[usize],
) -> Result<RankingComparison> {
    let n = names_a.len();
    if !is_permutation(rank_a, n) || !is_permutation(rank_b, names_b.len()) {
        return Err(Error::InvalidRanking("rank is not a permutation".into()));
    }
    let mut sorted_a: Vec<&String> = names_a.iter().collect();
    let mut sorted_b: Vec<&String> = names_b.iter().collect();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Err(Error::NameMismatch);
    }
    let rows = rank_a
        .iter()
        .zip(rank_b)
        .map(|(&a, &b)| (names_a[a].clone(), names_b[b].clone()))
        .collect();
    let position_b = |name: &str| rank_b.iter().position(|&k| names_b[k] == name).unwrap();
    let displacement = names_a
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let pa = rank_a.iter().position(|&r| r == k).unwrap();
            let pb = position_b(name);
            Displacement {
                feature: name.clone(),
                aec_rank: pa + 1,
                shap_rank: pb + 1,
                displacement: pa.abs_diff(pb),
            }
        })
        .collect();
    Ok(RankingComparison { rows, displacement })
}

pub fn compare_rankings(a: &AecReport, b: &ShapReport) -> Result<RankingComparison> {
    compare_orders(&a.names, &a.rank, &b.names, &b.rank)
}
