//! Pairwise slope matrix, collinearity sums and AEC scores.
//!
//! For features `X_1..X_n` and outcome `y`, the score of feature `j` is
//!
//! ```text
//! AEC(j) = beta(y ~ X_j) * S(j)
//! S(j)   = sum_{z=1..n} sum_{i=1..n, i != j, i != z} B[z][i]
//! ```
//!
//! where `B[z][i]` is the univariate OLS slope of `X_z` (dependent) regressed
//! on `X_i` (independent). The index set keeps `z = j`: those `n - 1` terms
//! are the direct slopes of `X_j` on every other feature, and each `z != j`
//! contributes the `n - 2` slopes of `X_z` on the features other than `j` and
//! itself.
//!
//! The target slope is OLS for regression tasks and logistic (log-odds) for
//! binary classification. Feature-on-feature slopes are always OLS.

use std::io;

use rayon::prelude::*;

use crate::data::{Dataset, TaskKind};
use crate::fit::{self, LogisticOptions, UnivariateFit};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// `B[z][i]`: slope of feature `z` regressed on feature `i`, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseSlopeMatrix {
    names: Vec<String>,
    values: Vec<f64>,
}

impl PairwiseSlopeMatrix {
    /// Builds a matrix from row-major values (`values[z * n + i]`).
    ///
    /// The diagonal is forced to 1.
    pub fn from_values(names: Vec<String>, mut values: Vec<f64>) -> Result<Self> {
        let n = names.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n * n,
            });
        }
        for k in 0..n {
            values[k * n + k] = 1.0;
        }
        Ok(Self { names, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Slope of feature `z` (dependent) on feature `i` (independent).
    pub fn get(&self, z: usize, i: usize) -> f64 {
        self.values[z * self.len() + i]
    }
}

/// Fits all `n (n - 1)` feature-on-feature regressions.
///
/// Fits run in parallel; each lands in a preassigned slot so the result does
/// not depend on scheduling.
pub fn pairwise_slopes(d: &Dataset) -> Result<PairwiseSlopeMatrix> {
    d.check_feature_variance()?;
    let n = d.n_features();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (z, i) = (k / n, k % n);
            if z == i {
                Ok(1.0)
            } else {
                fit::ols_univariate(d.column(i), d.column(z)).map(|f| f.slope)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    PairwiseSlopeMatrix::from_values(d.names().to_vec(), values)
}

/// `S(j)`: the double sum over ordered pairs `(z, i)` with `i != j` and `i != z`.
///
/// Summed with `z` ascending in the outer loop and `i` ascending in the inner
/// loop, with compensation.
pub fn collinearity_sum(b: &PairwiseSlopeMatrix, j: usize) -> Result<f64> {
    let n = b.len();
    if j >= n {
        return Err(Error::IndexOutOfRange {
            index: j,
            n_features: n,
        });
    }
    let mut acc = NeumaierSum::new();
    for z in 0..n {
        for i in 0..n {
            if i != j && i != z {
                acc.add(b.get(z, i));
            }
        }
    }
    Ok(acc.total())
}

/// Grand total of off-diagonal slopes and per-column sums.
///
/// `S(j) = total - column_sums[j]` for every `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTotals {
    pub total: f64,
    pub column_sums: Vec<f64>,
}

impl SlopeTotals {
    pub fn collinearity_sum(&self, j: usize) -> f64 {
        self.total - self.column_sums[j]
    }
}

pub fn total_slope_identity(b: &PairwiseSlopeMatrix) -> SlopeTotals {
    let n = b.len();
    let mut total = NeumaierSum::new();
    let mut column_sums = vec![NeumaierSum::new(); n];
    for z in 0..n {
        for (i, col) in column_sums.iter_mut().enumerate() {
            if i != z {
                total.add(b.get(z, i));
                col.add(b.get(z, i));
            }
        }
    }
    SlopeTotals {
        total: total.total(),
        column_sums: column_sums.iter().map(NeumaierSum::total).collect(),
    }
}

/// Univariate fit of the outcome on feature `j`.
pub fn target_fit(d: &Dataset, j: usize) -> Result<UnivariateFit> {
    d.check_index(j)?;
    let fit = match d.task() {
        TaskKind::Regression => fit::ols_univariate(d.column(j), d.target()),
        TaskKind::BinaryClassification => {
            fit::logistic_univariate(d.column(j), d.target(), LogisticOptions::default())
        }
    };
    fit.map_err(|e| match e {
        Error::ZeroVariance(_) => Error::ZeroVariance(d.names()[j].clone()),
        other => other,
    })
}

/// Slope of `y ~ X_j`: OLS for regression, log-odds for classification.
pub fn target_slope(d: &Dataset, j: usize) -> Result<f64> {
    target_fit(d, j).map(|f| f.slope)
}

/// Per-feature AEC scores with their ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct AecReport {
    pub names: Vec<String>,
    pub target_slope: Vec<f64>,
    pub collinearity_sum: Vec<f64>,
    pub score: Vec<f64>,
    /// Feature indices ordered by `|score|` descending, ties by index.
    pub rank: Vec<usize>,
    /// False where a logistic target fit did not converge; the slope is still used.
    pub target_converged: Vec<bool>,
}

impl AecReport {
    /// Feature names in rank order.
    pub fn ranked_names(&self) -> Vec<&str> {
        self.rank.iter().map(|&k| self.names[k].as_str()).collect()
    }

    pub fn all_targets_converged(&self) -> bool {
        self.target_converged.iter().all(|&c| c)
    }

    /// CSV with header `feature,target_slope,collinearity_sum,score,abs_score,rank`,
    /// one row per feature in rank order; `rank` is 1-based.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "feature",
            "target_slope",
            "collinearity_sum",
            "score",
            "abs_score",
            "rank",
        ])?;
        for (pos, &k) in self.rank.iter().enumerate() {
            w.write_record([
                self.names[k].clone(),
                self.target_slope[k].to_string(),
                self.collinearity_sum[k].to_string(),
                self.score[k].to_string(),
                self.score[k].abs().to_string(),
                (pos + 1).to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Indices ordered by `|values|` descending; ties keep ascending index order.
pub fn rank_by_magnitude(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    order
}

/// Computes `AEC(j)` for every feature.
pub fn aec_scores(d: &Dataset) -> Result<AecReport> {
    let b = pairwise_slopes(d)?;
    let fits = (0..d.n_features())
        .into_par_iter()
        .map(|j| target_fit(d, j))
        .collect::<Result<Vec<_>>>()?;
    let target_slope: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    let collinearity_sum = (0..d.n_features())
        .map(|j| collinearity_sum(&b, j))
        .collect::<Result<Vec<_>>>()?;
    let score: Vec<f64> = target_slope
        .iter()
        .zip(&collinearity_sum)
        .map(|(t, s)| t * s)
        .collect();
    Ok(AecReport {
        names: d.names().to_vec(),
        rank: rank_by_magnitude(&score),
        target_converged: fits.iter().map(|f| f.converged).collect(),
        target_slope,
        collinearity_sum,
        score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Dataset {
        let x1 = vec![1.0, 2.0, 3.0, 4.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y: Vec<f64> = x1.iter().map(|v| 3.0 * v).collect();
        Dataset::new(
            vec!["X1".into(), "X2".into()],
            vec![x1, x2],
            y,
            TaskKind::Regression,
        )
        .unwrap()
    }

    fn matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> PairwiseSlopeMatrix {
        let names = (0..n).map(|k| format!("f{k}")).collect();
        let values = (0..n * n).map(|k| f(k / n, k % n)).collect();
        PairwiseSlopeMatrix::from_values(names, values).unwrap()
    }

    #[test]
    fn closed_form_fixture() {
        let d = fixture();
        let b = pairwise_slopes(&d).unwrap();
        assert_eq!(b.get(0, 1), 0.5);
        assert_eq!(b.get(1, 0), 2.0);
        assert_eq!(target_slope(&d, 0).unwrap(), 3.0);
        assert_eq!(target_slope(&d, 1).unwrap(), 1.5);
        let r = aec_scores(&d).unwrap();
        assert_eq!(r.score, vec![1.5, 3.0]);
        assert_eq!(r.rank, vec![1, 0]);
        assert_eq!(r.ranked_names(), vec!["X2", "X1"]);
    }

    #[test]
    fn three_feature_sum_uses_the_four_allowed_pairs() {
        let b = matrix(3, |z, i| (10 * (z + 1) + i + 1) as f64);
        // S(1) = B12 + B13 + B23 + B32 (1-indexed).
        assert_eq!(collinearity_sum(&b, 0).unwrap(), 12.0 + 13.0 + 23.0 + 32.0);
    }

    #[test]
    fn two_feature_sum_is_single_slope() {
        let b = matrix(2, |z, i| (10 * (z + 1) + i + 1) as f64);
        assert_eq!(collinearity_sum(&b, 0).unwrap(), 12.0);
        assert_eq!(collinearity_sum(&b, 1).unwrap(), 21.0);
        let t = total_slope_identity(&b);
        assert_eq!(t.total, 33.0);
        assert_eq!(t.collinearity_sum(0), 12.0);
        assert!(collinearity_sum(&b, 2).is_err());
    }

    #[test]
    fn equicorrelated_totals_are_uniform() {
        let b = matrix(5, |z, i| if z == i { 1.0 } else { 0.3 });
        let t = total_slope_identity(&b);
        for j in 0..5 {
            assert_eq!(t.collinearity_sum(j), t.collinearity_sum(0));
        }
    }

    #[test]
    fn orthogonal_features_score_zero_and_rank_by_index() {
        let cols = vec![
            vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        ];
        let y: Vec<f64> = (0..8)
            .map(|s| cols[0][s] + 2.0 * cols[1][s] + 0.5 * cols[2][s])
            .collect();
        let d = Dataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            cols,
            y,
            TaskKind::Regression,
        )
        .unwrap();
        let b = pairwise_slopes(&d).unwrap();
        for z in 0..3 {
            for i in 0..3 {
                if z != i {
                    assert!(b.get(z, i).abs() < 1e-12);
                }
            }
        }
        let r = aec_scores(&d).unwrap();
        assert!(r.collinearity_sum.iter().all(|s| s.abs() < 1e-10));
        assert_eq!(r.rank, vec![0, 1, 2]);
    }

    #[test]
    fn zero_variance_feature_is_named() {
        let d = Dataset::new(
            vec!["a".into(), "flat".into()],
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]],
            vec![1.0, 2.0, 3.0],
            TaskKind::Regression,
        )
        .unwrap();
        assert!(matches!(pairwise_slopes(&d), Err(Error::ZeroVariance(n)) if n == "flat"));
        assert!(matches!(target_slope(&d, 1), Err(Error::ZeroVariance(n)) if n == "flat"));
    }

    #[test]
    fn rank_ties_keep_index_order() {
        assert_eq!(rank_by_magnitude(&[1.0, -3.0, 3.0, 0.5]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn report_csv_in_rank_order() {
        let mut out = Vec::new();
        aec_scores(&fixture()).unwrap().write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "feature,target_slope,collinearity_sum,score,abs_score,rank\n\
             X2,1.5,2,3,3,1\n\
             X1,3,0.5,1.5,1.5,2\n"
        );
    }
}
