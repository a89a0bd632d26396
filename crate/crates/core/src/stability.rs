//! Normalized Movement Rate (NMR).
//!
//! NMR measures how much an explainer's ranking reshuffles when its top
//! feature is removed and the explanation recomputed. Starting from `n`
//! features, each step
//!
//! 1. ranks the current dataset (`L_t`),
//! 2. drops `L_t`'s top feature,
//! 3. ranks the reduced dataset (`L_{t+1}`),
//! 4. counts the features whose position in `L_{t+1}` differs from their
//!    position in `E_t`, which is `L_t` minus its first element.
//!
//! The loop stops when two features remain, giving `n - 2` steps. NMR is the
//! total movement over the total number of ranked positions, so 0 means the
//! ranking never reshuffled and 1 means every feature moved at every step.

use std::io;

use crate::data::{is_permutation, Dataset};
use crate::engine::aec_scores;
use crate::shap::shap_linear;
use crate::{Error, Result};

/// Anything that orders a dataset's features from most to least important.
pub trait Explainer: Sync {
    fn name(&self) -> &str;

    /// Feature indices of `d`, most important first.
    fn rank(&self, d: &Dataset) -> Result<Vec<usize>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AecExplainer;

impl Explainer for AecExplainer {
    fn name(&self) -> &str {
        "aec"
    }

    fn rank(&self, d: &Dataset) -> Result<Vec<usize>> {
        aec_scores(d).map(|r| r.rank)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LinearShapExplainer;

impl Explainer for LinearShapExplainer {
    fn name(&self) -> &str {
        "linear-shap"
    }

    fn rank(&self, d: &Dataset) -> Result<Vec<usize>> {
        shap_linear(d).map(|r| r.rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NmrStep {
    pub removed_feature: String,
    pub movement_count: usize,
    pub remaining_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmrResult {
    pub nmr: f64,
    pub steps: Vec<NmrStep>,
    pub removal_sequence: Vec<String>,
}

impl NmrResult {
    /// CSV `step,removed_feature,movement_count,remaining_count`, then a
    /// `total` row with the summed counts and a `nmr` row with the score.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "step",
            "removed_feature",
            "movement_count",
            "remaining_count",
        ])?;
        for (t, s) in self.steps.iter().enumerate() {
            w.write_record([
                (t + 1).to_string(),
                s.removed_feature.clone(),
                s.movement_count.to_string(),
                s.remaining_count.to_string(),
            ])?;
        }
        let moved: usize = self.steps.iter().map(|s| s.movement_count).sum();
        let remaining: usize = self.steps.iter().map(|s| s.remaining_count).sum();
        w.write_record(["total", "", &moved.to_string(), &remaining.to_string()])?;
        w.write_record(["nmr", "", &self.nmr.to_string(), ""])?;
        w.flush()
    }
}

fn checked_rank(e: &dyn Explainer, d: &Dataset) -> Result<Vec<String>> {
    let rank = e.rank(d)?;
    if !is_permutation(&rank, d.n_features()) {
        return Err(Error::InvalidRanking(format!(
            "{} returned {rank:?} for {} features",
            e.name(),
            d.n_features()
        )));
    }
    Ok(rank.into_iter().map(|k| d.names()[k].clone()).collect())
}

/// Runs the removal loop for `e` on `d`.
pub fn nmr(d: &Dataset, e: &dyn Explainer) -> Result<NmrResult> {
    if d.n_features() < 3 {
        return Err(Error::InvalidDataset(format!(
            "NMR needs at least 3 features, got {}",
            d.n_features()
        )));
    }
    let mut current = d.clone();
    let mut ranking = checked_rank(e, &current).map_err(|e| Error::Step {
        step: 0,
        source: Box::new(e),
    })?;
    let mut steps = Vec::with_capacity(d.n_features() - 2);
    while current.n_features() > 2 {
        let step = steps.len() + 1;
        let with_step = |e: Error| Error::Step {
            step,
            source: Box::new(e),
        };
        let top = ranking[0].clone();
        let idx = current
            .feature_index(&top)
            .expect("ranked names come from the dataset");
        current = current.without_feature(idx).map_err(with_step)?;
        let next = checked_rank(e, &current).map_err(with_step)?;
        let expected = &ranking[1..];
        let moved = expected.iter().zip(&next).filter(|(a, b)| a != b).count();
        steps.push(NmrStep {
            removed_feature: top,
            movement_count: moved,
            remaining_count: expected.len(),
        });
        ranking = next;
    }
    let moved: usize = steps.iter().map(|s| s.movement_count).sum();
    let total: usize = steps.iter().map(|s| s.remaining_count).sum();
    Ok(NmrResult {
        nmr: moved as f64 / total as f64,
        removal_sequence: steps.iter().map(|s| s.removed_feature.clone()).collect(),
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmrComparison {
    pub aec: NmrResult,
    pub linear_shap: NmrResult,
}

impl NmrComparison {
    /// `(method, nmr)` rows.
    pub fn rows(&self) -> [(&'static str, f64); 2] {
        [("aec", self.aec.nmr), ("linear-shap", self.linear_shap.nmr)]
    }

    /// CSV `dataset,aec,linear_shap`: one row per dataset, as in a
    /// per-dataset comparison table.
    pub fn write_csv<W: io::Write>(&self, writer: W, dataset: &str) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["dataset", "aec", "linear_shap"])?;
        w.write_record([
            dataset.to_owned(),
            self.aec.nmr.to_string(),
            self.linear_shap.nmr.to_string(),
        ])?;
        w.flush()
    }
}

/// NMR of AEC and of the linear Shapley comparator on the same dataset.
pub fn nmr_comparison(d: &Dataset) -> Result<NmrComparison> {
    Ok(NmrComparison {
        aec: nmr(d, &AecExplainer)?,
        linear_shap: nmr(d, &LinearShapExplainer)?,
    })
}
