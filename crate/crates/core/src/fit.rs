//! Regression solvers: closed-form OLS and IRLS logistic regression.
//!
//! Every fit includes an intercept. Multivariate systems are solved on centered
//! columns through a Cholesky factorization of the correlation-scaled normal
//! equations; the intercept is recovered afterwards.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::data::{is_constant, Dataset, TaskKind};
use crate::sum::{self, NeumaierSum};
use crate::{Error, Result};

/// Probabilities are clamped to `[PROBABILITY_CLAMP, 1 - PROBABILITY_CLAMP]`
/// inside the logistic solver.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Normal-equation systems whose condition estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Ols,
    Logistic,
}

/// Slope and intercept of a one-regressor model.
///
/// For logistic fits the slope is in log-odds per unit of the regressor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateFit {
    pub slope: f64,
    pub intercept: f64,
    pub kind: FitKind,
    /// Always true for OLS.
    pub converged: bool,
    /// Newton updates performed; always 0 for OLS.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub kind: FitKind,
    pub converged: bool,
    pub iterations: usize,
}

impl MultivariateFit {
    /// `intercept + X * coefficients` for every sample.
    pub fn linear_predictor(&self, columns: &[Vec<f64>]) -> Vec<f64> {
        let n = columns.first().map_or(0, Vec::len);
        (0..n)
            .map(|s| linear_predictor_at(columns, s, self.intercept, &self.coefficients))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_iter: usize,
    /// Convergence threshold on the max-norm of the log-likelihood gradient.
    pub tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-8,
        }
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

/// Closed-form simple linear regression of `y` on `x`.
pub fn ols_univariate(x: &[f64], y: &[f64]) -> Result<UnivariateFit> {
    check_lengths(x.len(), y.len())?;
    if x.len() < 3 {
        return Err(Error::InvalidDataset(format!(
            "at least 3 samples required, got {}",
            x.len()
        )));
    }
    if is_constant(x) {
        return Err(Error::ZeroVariance("x".into()));
    }
    let mx = sum::mean(x);
    let my = sum::mean(y);
    let mut sxy = NeumaierSum::new();
    let mut sxx = NeumaierSum::new();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        sxy.add(dx * (yi - my));
        sxx.add(dx * dx);
    }
    let slope = sxy.total() / sxx.total();
    Ok(UnivariateFit {
        slope,
        intercept: my - slope * mx,
        kind: FitKind::Ols,
        converged: true,
        iterations: 0,
    })
}

struct Centered {
    means: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

fn center(columns: &[Vec<f64>]) -> Result<Centered> {
    let mut means = Vec::with_capacity(columns.len());
    let mut centered = Vec::with_capacity(columns.len());
    for (j, c) in columns.iter().enumerate() {
        if is_constant(c) {
            return Err(Error::ZeroVariance(format!("column {j}")));
        }
        let m = sum::mean(c);
        means.push(m);
        centered.push(c.iter().map(|v| v - m).collect());
    }
    Ok(Centered {
        means,
        columns: centered,
    })
}

fn check_design(columns: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if columns.is_empty() {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }
    for c in columns {
        check_lengths(c.len(), y.len())?;
    }
    if y.len() <= columns.len() {
        return Err(Error::InvalidDataset(format!(
            "{} samples cannot determine {} coefficients",
            y.len(),
            columns.len()
        )));
    }
    Ok(())
}

/// Gram matrix of `columns`, optionally weighted per sample.
fn gram(columns: &[&[f64]], weights: Option<&[f64]>) -> DMatrix<f64> {
    let p = columns.len();
    let mut g = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = match weights {
                Some(w) => sum::sum(
                    columns[a]
                        .iter()
                        .zip(columns[b])
                        .zip(w)
                        .map(|((x, z), w)| w * x * z),
                ),
                None => sum::dot(columns[a], columns[b]),
            };
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

/// Solves `g * x = rhs` after symmetric diagonal scaling to unit diagonal.
///
/// The condition estimate is the eigenvalue ratio of the scaled matrix.
fn solve_scaled_spd(
    g: &DMatrix<f64>,
    rhs: &DVector<f64>,
    check_condition: bool,
) -> Result<DVector<f64>> {
    let p = g.nrows();
    let scale = DVector::from_iterator(p, (0..p).map(|a| 1.0 / g[(a, a)].sqrt()));
    if scale.iter().any(|s| !s.is_finite()) {
        return Err(Error::Singular(f64::INFINITY));
    }
    let scaled = DMatrix::from_fn(p, p, |a, b| g[(a, b)] * scale[a] * scale[b]);
    if check_condition {
        let cond = condition_estimate(&scaled);
        if cond.is_nan() || cond > MAX_CONDITION {
            return Err(Error::Singular(cond));
        }
    }
    let chol = scaled.cholesky().ok_or(Error::Singular(f64::INFINITY))?;
    let z = chol.solve(&rhs.component_mul(&scale));
    Ok(z.component_mul(&scale))
}

fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Ordinary least squares with intercept over all `columns`.
pub fn ols_multivariate(columns: &[Vec<f64>], y: &[f64]) -> Result<MultivariateFit> {
    check_design(columns, y)?;
    let centered = center(columns)?;
    let my = sum::mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - my).collect();
    let refs: Vec<&[f64]> = centered.columns.iter().map(Vec::as_slice).collect();
    let g = gram(&refs, None);
    let rhs = DVector::from_iterator(refs.len(), refs.iter().map(|c| sum::dot(c, &yc)));
    let beta = solve_scaled_spd(&g, &rhs, true)?;
    let intercept = my - sum::sum(beta.iter().zip(&centered.means).map(|(b, m)| b * m));
    Ok(MultivariateFit {
        coefficients: beta.iter().copied().collect(),
        intercept,
        kind: FitKind::Ols,
        converged: true,
        iterations: 0,
    })
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn clamped_probability(eta: f64) -> f64 {
    sigmoid(eta).clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
}

fn linear_predictor_at(
    columns: &[Vec<f64>],
    s: usize,
    intercept: f64,
    coefficients: &[f64],
) -> f64 {
    coefficients
        .iter()
        .zip(columns)
        .fold(intercept, |acc, (b, c)| acc + b * c[s])
}

/// Bernoulli log-likelihood of a logit model, with the solver's probability clamp.
pub fn logistic_log_likelihood(
    columns: &[Vec<f64>],
    y: &[f64],
    intercept: f64,
    coefficients: &[f64],
) -> f64 {
    sum::sum(y.iter().enumerate().map(|(s, &yi)| {
        let p = clamped_probability(linear_predictor_at(columns, s, intercept, coefficients));
        yi * p.ln() + (1.0 - yi) * (1.0 - p).ln()
    }))
}

/// Analytic gradient of [`logistic_log_likelihood`] with respect to
/// `[intercept, coefficients...]` (exact wherever the clamp is inactive).
pub fn logistic_score(
    columns: &[Vec<f64>],
    y: &[f64],
    intercept: f64,
    coefficients: &[f64],
) -> Vec<f64> {
    let residual: Vec<f64> = (0..y.len())
        .map(|s| {
            y[s] - clamped_probability(linear_predictor_at(columns, s, intercept, coefficients))
        })
        .collect();
    let mut g = Vec::with_capacity(columns.len() + 1);
    g.push(sum::sum(residual.iter().copied()));
    g.extend(columns.iter().map(|c| sum::dot(c, &residual)));
    g
}

fn check_binary(y: &[f64]) -> Result<f64> {
    let mut ones = 0usize;
    for (sample, &value) in y.iter().enumerate() {
        if value == 1.0 {
            ones += 1;
        } else if value != 0.0 {
            return Err(Error::InvalidLabel { sample, value });
        }
    }
    if ones == 0 || ones == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(ones as f64 / y.len() as f64)
}

/// IRLS state in the centered parameterization: `theta[0]` is the intercept
/// for centered columns, `theta[1..]` the coefficients.
fn irls(columns: &[Vec<f64>], y: &[f64], options: LogisticOptions) -> Result<MultivariateFit> {
    check_design(columns, y)?;
    let base_rate = check_binary(y)?;
    let centered = center(columns)?;
    let p = columns.len();
    let n = y.len();

    if p > 1 {
        let refs: Vec<&[f64]> = centered.columns.iter().map(Vec::as_slice).collect();
        let g = gram(&refs, None);
        let scale: Vec<f64> = (0..p).map(|a| 1.0 / g[(a, a)].sqrt()).collect();
        let cond = condition_estimate(&DMatrix::from_fn(p, p, |a, b| {
            g[(a, b)] * scale[a] * scale[b]
        }));
        if cond.is_nan() || cond > MAX_CONDITION {
            return Err(Error::Singular(cond));
        }
    }

    let mut theta = vec![0.0; p + 1];
    theta[0] = (base_rate / (1.0 - base_rate)).ln();
    let log_lik =
        |theta: &[f64]| logistic_log_likelihood(&centered.columns, y, theta[0], &theta[1..]);
    let mut ll = log_lik(&theta);

    let mut eta = vec![0.0; n];
    let mut prob = vec![0.0; n];
    let mut residual = vec![0.0; n];
    let mut weight = vec![0.0; n];
    let mut converged = false;
    let mut polished = false;
    let mut iterations = 0;

    for iter in 0..=options.max_iter {
        iterations = iter;
        let mut saturated = false;
        for s in 0..n {
            eta[s] = linear_predictor_at(&centered.columns, s, theta[0], &theta[1..]);
            let raw = sigmoid(eta[s]);
            let pr = raw.clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP);
            saturated |= raw <= PROBABILITY_CLAMP || raw >= 1.0 - PROBABILITY_CLAMP;
            prob[s] = pr;
            residual[s] = y[s] - pr;
            weight[s] = pr * (1.0 - pr);
        }
        if eta.iter().any(|e| !e.is_finite()) {
            return Err(Error::Diverged(format!(
                "non-finite linear predictor at iteration {iter}"
            )));
        }

        // Convergence is judged on the gradient in the caller's (uncentered)
        // parameterization.
        let g0 = sum::sum(residual.iter().copied());
        let raw_grad_max = columns
            .iter()
            .map(|c| sum::dot(c, &residual).abs())
            .fold(g0.abs(), f64::max);
        if !raw_grad_max.is_finite() {
            return Err(Error::Diverged(format!(
                "non-finite gradient at iteration {iter}"
            )));
        }
        let at_tol = raw_grad_max < options.tol && !saturated;
        if raw_grad_max < options.tol {
            if saturated {
                // The fit sits on the clamp: the data are separable and the
                // likelihood has no finite maximizer.
                break;
            }
            // One extra Newton step after the tolerance is first met brings
            // the estimate to rounding level.
            if polished || iter == options.max_iter {
                converged = true;
                break;
            }
            polished = true;
        }
        if iter == options.max_iter {
            break;
        }

        let mut design: Vec<&[f64]> = Vec::with_capacity(p + 1);
        let ones = vec![1.0; n];
        design.push(&ones);
        design.extend(centered.columns.iter().map(Vec::as_slice));
        let hessian = gram(&design, Some(&weight));
        let grad = DVector::from_iterator(p + 1, design.iter().map(|c| sum::dot(c, &residual)));
        let step = match solve_scaled_spd(&hessian, &grad, false) {
            Ok(step) => step,
            Err(_) => {
                converged = at_tol;
                break;
            }
        };
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged(format!(
                "non-finite Newton step at iteration {iter}"
            )));
        }

        // Step halving keeps the log-likelihood from decreasing.
        let mut accepted = None;
        let mut factor = 1.0;
        for _ in 0..40 {
            let candidate: Vec<f64> = theta
                .iter()
                .zip(step.iter())
                .map(|(t, d)| t + factor * d)
                .collect();
            let cand_ll = log_lik(&candidate);
            if cand_ll.is_finite() && cand_ll >= ll - 1e-12 * (1.0 + ll.abs()) {
                accepted = Some((candidate, cand_ll));
                break;
            }
            factor *= 0.5;
        }
        match accepted {
            Some((candidate, cand_ll)) => {
                theta = candidate;
                ll = cand_ll;
            }
            None => {
                converged = at_tol;
                break;
            }
        }
        iterations = iter + 1;
    }

    let coefficients = theta[1..].to_vec();
    let intercept =
        theta[0] - sum::sum(coefficients.iter().zip(&centered.means).map(|(b, m)| b * m));
    if !intercept.is_finite() || coefficients.iter().any(|b| !b.is_finite()) {
        return Err(Error::Diverged("non-finite coefficients".into()));
    }
    Ok(MultivariateFit {
        coefficients,
        intercept,
        kind: FitKind::Logistic,
        converged,
        iterations,
    })
}

/// Logistic regression of a 0/1 outcome on a single regressor.
///
/// Perfectly separated data do not raise an error: the last finite iterate is
/// returned with `converged == false`.
pub fn logistic_univariate(
    x: &[f64],
    y: &[f64],
    options: LogisticOptions,
) -> Result<UnivariateFit> {
    check_lengths(x.len(), y.len())?;
    if is_constant(x) {
        return Err(Error::ZeroVariance("x".into()));
    }
    let fit = irls(&[x.to_vec()], y, options)?;
    Ok(UnivariateFit {
        slope: fit.coefficients[0],
        intercept: fit.intercept,
        kind: FitKind::Logistic,
        converged: fit.converged,
        iterations: fit.iterations,
    })
}

/// Logistic regression on every column with intercept, by IRLS.
pub fn logistic_multivariate(
    columns: &[Vec<f64>],
    y: &[f64],
    options: LogisticOptions,
) -> Result<MultivariateFit> {
    irls(columns, y, options)
}

/// Fits the multivariate model matching the dataset's task.
pub fn fit_dataset(d: &Dataset) -> Result<MultivariateFit> {
    match d.task() {
        TaskKind::Regression => ols_multivariate(d.columns(), d.target()),
        TaskKind::BinaryClassification => {
            logistic_multivariate(d.columns(), d.target(), LogisticOptions::default())
        }
    }
}

/// R² for OLS fits, accuracy at the 0.5 threshold for logistic fits.
pub fn model_quality(fit: &MultivariateFit, d: &Dataset) -> Result<f64> {
    check_lengths(fit.coefficients.len(), d.n_features())?;
    let eta = fit.linear_predictor(d.columns());
    let y = d.target();
    match fit.kind {
        FitKind::Ols => {
            let my = sum::mean(y);
            let ss_tot = sum::sum(y.iter().map(|v| (v - my) * (v - my)));
            if ss_tot == 0.0 {
                return Err(Error::ZeroVariance("target".into()));
            }
            let ss_res = sum::sum(y.iter().zip(&eta).map(|(v, e)| (v - e) * (v - e)));
            Ok(1.0 - ss_res / ss_tot)
        }
        FitKind::Logistic => {
            let hits = y
                .iter()
                .zip(&eta)
                .filter(|(v, e)| (**e >= 0.0) == (**v == 1.0))
                .count();
            Ok(hits as f64 / y.len() as f64)
        }
    }
}
