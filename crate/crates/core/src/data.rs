//! Datasets, CSV ingestion, standardization and Pearson correlation.
//!
//! A [`Dataset`] is a named, column-major numeric feature matrix together with
//! an outcome vector and the kind of task the outcome describes. It is
//! immutable once built; every transformation returns a new value.

use std::collections::HashSet;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Regression,
    #[serde(rename = "classification")]
    BinaryClassification,
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskKind::Regression => f.write_str("regression"),
            TaskKind::BinaryClassification => f.write_str("classification"),
        }
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regression" => Ok(TaskKind::Regression),
            "classification" => Ok(TaskKind::BinaryClassification),
            other => Err(format!(
                "unknown task `{other}` (expected regression or classification)"
            )),
        }
    }
}

/// Named feature columns, an outcome vector and a task kind.
///
/// Invariants checked by [`Dataset::new`]:
/// * names are unique and match the column count,
/// * at least 3 samples and 2 features,
/// * every value is finite,
/// * classification targets are 0/1 with both classes present.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    target: Vec<f64>,
    task: TaskKind,
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        columns: Vec<Vec<f64>>,
        target: Vec<f64>,
        task: TaskKind,
    ) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidDataset(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if columns.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "at least 2 features required, got {}",
                columns.len()
            )));
        }
        if target.len() < 3 {
            return Err(Error::InvalidDataset(format!(
                "at least 3 samples required, got {}",
                target.len()
            )));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (name, column) in names.iter().zip(&columns) {
            if column.len() != target.len() {
                return Err(Error::InvalidDataset(format!(
                    "column `{name}` has {} values, target has {}",
                    column.len(),
                    target.len()
                )));
            }
            if let Some(v) = column.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "column `{name}` contains non-finite value {v}"
                )));
            }
        }
        if let Some(v) = target.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "target contains non-finite value {v}"
            )));
        }
        if task == TaskKind::BinaryClassification {
            check_binary_target(&target)?;
        }
        Ok(Self {
            names,
            columns,
            target,
            task,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn n_samples(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j < self.n_features() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: j,
                n_features: self.n_features(),
            })
        }
    }

    /// Row `s` of the feature matrix.
    pub fn row(&self, s: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[s]).collect()
    }

    /// A copy of the dataset without feature `j`.
    pub fn without_feature(&self, j: usize) -> Result<Dataset> {
        self.check_index(j)?;
        let mut names = self.names.clone();
        let mut columns = self.columns.clone();
        names.remove(j);
        columns.remove(j);
        Dataset::new(names, columns, self.target.clone(), self.task)
    }

    /// A copy with columns reordered so that new column `k` is old column `order[k]`.
    pub fn permute_features(&self, order: &[usize]) -> Result<Dataset> {
        if !is_permutation(order, self.n_features()) {
            return Err(Error::InvalidDataset(format!(
                "{order:?} is not a permutation of the {} features",
                self.n_features()
            )));
        }
        let names = order.iter().map(|&k| self.names[k].clone()).collect();
        let columns = order.iter().map(|&k| self.columns[k].clone()).collect();
        Dataset::new(names, columns, self.target.clone(), self.task)
    }

    /// Fails with [`Error::ZeroVariance`] naming the first constant feature.
    pub fn check_feature_variance(&self) -> Result<()> {
        for (name, column) in self.names.iter().zip(&self.columns) {
            if is_constant(column) {
                return Err(Error::ZeroVariance(name.clone()));
            }
        }
        Ok(())
    }

    /// Writes the dataset as CSV with the target as the last column.
    ///
    /// Values use the shortest representation that parses back to the same
    /// `f64`, so [`load_csv`] recovers them bit for bit.
    pub fn write_csv<W: io::Write>(&self, writer: W, target_column: &str) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.push(target_column);
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for s in 0..self.n_samples() {
            record.clear();
            record.extend(self.columns.iter().map(|c| c[s].to_string()));
            record.push(self.target[s].to_string());
            w.write_record(&record)?;
        }
        w.flush()
    }
}

fn check_binary_target(target: &[f64]) -> Result<()> {
    let mut has = [false; 2];
    for (sample, &value) in target.iter().enumerate() {
        if value == 0.0 {
            has[0] = true;
        } else if value == 1.0 {
            has[1] = true;
        } else {
            return Err(Error::InvalidLabel { sample, value });
        }
    }
    if has[0] && has[1] {
        Ok(())
    } else {
        Err(Error::SingleClass)
    }
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &k in order {
        if k >= n || seen[k] {
            return false;
        }
        seen[k] = true;
    }
    true
}

pub(crate) fn is_constant(values: &[f64]) -> bool {
    match values.first() {
        Some(&first) => values.iter().all(|&v| v == first),
        None => true,
    }
}

/// Loads a headed CSV file, splitting `target_column` off as the outcome.
///
/// Feature columns keep their file order. Empty cells, `NaN` and infinities are
/// rejected; there is no imputation.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str, task: TaskKind) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target_column, task).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: io::Read>(reader: R, target_column: &str, task: TaskKind) -> Result<Dataset> {
    let csv_err = |source| Error::Csv {
        path: "<input>".into(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();

    let mut seen = HashSet::with_capacity(header.len());
    for name in &header {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateName(name.clone()));
        }
    }
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingTarget(target_column.to_owned()))?;

    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        for (k, cell) in record.iter().enumerate() {
            raw[k].push(parse_cell(cell, line, &header[k])?);
        }
    }

    let target = raw.remove(target_idx);
    let mut names = header;
    names.remove(target_idx);
    Dataset::new(names, raw, target, task)
}

fn parse_cell(cell: &str, line: u64, column: &str) -> Result<f64> {
    let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
        line,
        column: column.to_owned(),
        value: cell.to_owned(),
    })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            line,
            column: column.to_owned(),
            value: cell.to_owned(),
        })
    }
}

/// Sample mean and unbiased standard deviation, two-pass and compensated.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let m = sum::mean(values);
    let ss = sum::sum(values.iter().map(|v| (v - m) * (v - m)));
    (m, (ss / (values.len() - 1) as f64).sqrt())
}

/// Rescales every feature to mean 0 and unit sample standard deviation.
///
/// The target and task are left untouched.
pub fn standardize(d: &Dataset) -> Result<Dataset> {
    d.check_feature_variance()?;
    let columns = d
        .columns()
        .iter()
        .map(|c| {
            let (m, sd) = mean_sd(c);
            c.iter().map(|v| (v - m) / sd).collect()
        })
        .collect();
    Dataset::new(d.names.clone(), columns, d.target.clone(), d.task)
}

/// Symmetric matrix of Pearson correlations with an exact unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    names: Vec<String>,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    /// Builds a matrix from row-major values, enforcing symmetry, a unit
    /// diagonal and entries in [-1, 1].
    pub fn from_values(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = names.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n * n,
            });
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::InvalidDataset(format!(
                    "diagonal entry {i} is {}, expected 1",
                    values[i * n + i]
                )));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(-1.0..=1.0).contains(&v) || v != values[j * n + i] {
                    return Err(Error::InvalidDataset(format!(
                        "entry ({i}, {j}) = {v} breaks symmetry or bounds"
                    )));
                }
            }
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    /// Writes the matrix as CSV: a `feature` header followed by the names, then
    /// one row per feature led by its name.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["feature"];
        header.extend(self.names.iter().map(String::as_str));
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.names[i].clone()];
            row.extend((0..self.len()).map(|j| self.get(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// Pearson correlation of every feature pair.
pub fn correlation_matrix(d: &Dataset) -> Result<CorrelationMatrix> {
    d.check_feature_variance()?;
    let n = d.n_features();
    let centered: Vec<Vec<f64>> = d
        .columns()
        .iter()
        .map(|c| {
            let m = sum::mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let ss: Vec<f64> = centered.iter().map(|c| sum::dot(c, c)).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let r =
                (sum::dot(&centered[i], &centered[j]) / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0);
            values[i * n + j] = r;
            values[j * n + i] = r;
        }
    }
    CorrelationMatrix::from_values(d.names.clone(), values)
}
