//! Dataset ingestion, validation, scaling, and splitting.
//!
//! A [`FeatureMatrix`] is a rectangular, all-finite numeric matrix with named
//! feature columns and optional binary label, binary prediction, and real
//! score columns. CSV rows with missing values are dropped (and counted), and
//! categorical columns are one-hot encoded with a deterministic category
//! order, so identical files always ingest to identical matrices.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major numeric dataset with feature names and optional label,
/// prediction, and score columns.
///
/// Intentionally not serializable: model files must never embed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    labels: Option<Vec<u8>>,
    predictions: Option<Vec<u8>>,
    scores: Option<Vec<f64>>,
}

impl FeatureMatrix {
    /// Builds a matrix from a flat row-major value buffer.
    pub fn new(feature_names: Vec<String>, values: Vec<f64>, n_rows: usize) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::InvalidParameter(
                "a feature matrix needs at least one column".into(),
            ));
        }
        let n_cols = feature_names.len();
        if values.len() != n_rows * n_cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for {} rows x {} columns, got {}",
                n_rows * n_cols,
                n_rows,
                n_cols,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value at row {}, column {}",
                bad / n_cols,
                bad % n_cols
            )));
        }
        Ok(Self {
            feature_names,
            values,
            n_rows,
            n_cols,
            labels: None,
            predictions: None,
            scores: None,
        })
    }

    /// Builds a matrix from per-row slices.
    pub fn from_rows(feature_names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = feature_names.len();
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {} has {} values, expected {}",
                    i,
                    row.len(),
                    n_cols
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(feature_names, values, rows.len())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows).map(move |i| self.values[i * self.n_cols + j])
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn predictions(&self) -> Option<&[u8]> {
        self.predictions.as_deref()
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<u8>) -> Result<()> {
        validate_binary_column("labels", &labels, self.n_rows)?;
        self.labels = Some(labels);
        Ok(())
    }

    pub fn set_predictions(&mut self, predictions: Vec<u8>) -> Result<()> {
        validate_binary_column("predictions", &predictions, self.n_rows)?;
        self.predictions = Some(predictions);
        Ok(())
    }

    pub fn set_scores(&mut self, scores: Vec<f64>) -> Result<()> {
        if scores.len() != self.n_rows {
            return Err(Error::ShapeMismatch(format!(
                "scores has {} entries, expected {}",
                scores.len(),
                self.n_rows
            )));
        }
        if scores.iter().any(|s| !s.is_finite() || !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidParameter(
                "scores must be finite values in [0, 1]".into(),
            ));
        }
        self.scores = Some(scores);
        Ok(())
    }

    /// Selects rows by index, carrying label/prediction/score columns along.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            values,
            n_rows: indices.len(),
            n_cols: self.n_cols,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            predictions: self
                .predictions
                .as_ref()
                .map(|p| indices.iter().map(|&i| p[i]).collect()),
            scores: self
                .scores
                .as_ref()
                .map(|s| indices.iter().map(|&i| s[i]).collect()),
        }
    }

    /// Per-feature population standard deviations.
    pub fn column_stds(&self) -> Vec<f64> {
        let n = self.n_rows as f64;
        (0..self.n_cols)
            .map(|j| {
                let mean = self.column(j).sum::<f64>() / n;
                let var = self.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                var.sqrt()
            })
            .collect()
    }
}

fn validate_binary_column(name: &str, values: &[u8], n_rows: usize) -> Result<()> {
    if values.len() != n_rows {
        return Err(Error::ShapeMismatch(format!(
            "{name} has {} entries, expected {}",
            values.len(),
            n_rows
        )));
    }
    if values.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter(format!("{name} must be 0 or 1")));
    }
    Ok(())
}

/// Per-feature (min, max) pairs for min-max scaling, fitted on training data
/// only.
///
/// Values outside the fitted range scale linearly beyond [0, 1]; there is no
/// clipping, since out-of-range magnitudes are exactly the signal the density
/// check relies on. A constant feature maps to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    bounds: Vec<(f64, f64)>,
}

impl ScalerState {
    pub fn fit(matrix: &FeatureMatrix) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::EmptyInput("cannot fit a scaler on zero rows".into()));
        }
        let bounds = (0..matrix.n_cols())
            .map(|j| {
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for v in matrix.column(j) {
                    min = min.min(v);
                    max = max.max(v);
                }
                (min, max)
            })
            .collect();
        Ok(Self { bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Indices of features with min == max.
    pub fn constant_features(&self) -> Vec<usize> {
        self.bounds
            .iter()
            .enumerate()
            .filter(|(_, (lo, hi))| lo == hi)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.bounds.len() {
            return Err(Error::ShapeMismatch(format!(
                "row has {} features, scaler expects {}",
                row.len(),
                self.bounds.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.bounds)
            .map(|(&v, &(lo, hi))| if lo == hi { 0.5 } else { (v - lo) / (hi - lo) })
            .collect())
    }

    pub fn transform_matrix(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
        if matrix.n_cols() != self.bounds.len() {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} features, scaler expects {}",
                matrix.n_cols(),
                self.bounds.len()
            )));
        }
        let mut out = Vec::with_capacity(matrix.n_rows() * matrix.n_cols());
        for row in matrix.rows() {
            out.extend(self.transform_row(row)?);
        }
        let mut scaled = FeatureMatrix::new(matrix.feature_names.clone(), out, matrix.n_rows())?;
        scaled.labels = matrix.labels.clone();
        scaled.predictions = matrix.predictions.clone();
        scaled.scores = matrix.scores.clone();
        Ok(scaled)
    }
}

/// Column-role map declaring how a CSV file is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    /// Feature columns, in the order they become matrix columns.
    pub features: Vec<String>,
    /// Subset of `features` to one-hot encode.
    pub categorical: Vec<String>,
    pub label: Option<String>,
    pub prediction: Option<String>,
    pub score: Option<String>,
}

impl CsvSchema {
    pub fn numeric_features(features: Vec<String>) -> Self {
        Self {
            features,
            categorical: Vec::new(),
            label: None,
            prediction: None,
            score: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Schema("schema declares no feature columns".into()));
        }
        let unique: HashSet<_> = self.features.iter().collect();
        if unique.len() != self.features.len() {
            return Err(Error::Schema("duplicate feature column in schema".into()));
        }
        for c in &self.categorical {
            if !self.features.contains(c) {
                return Err(Error::Schema(format!(
                    "categorical column '{c}' is not a declared feature"
                )));
            }
        }
        Ok(())
    }

    fn declared_columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = self.features.iter().map(String::as_str).collect();
        cols.extend(self.label.as_deref());
        cols.extend(self.prediction.as_deref());
        cols.extend(self.score.as_deref());
        cols
    }
}

/// Fixed category list for one categorical column, in encoding order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEncoding {
    pub column: String,
    pub categories: Vec<String>,
}

/// Result of a CSV ingestion.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub matrix: FeatureMatrix,
    /// Rows dropped because a declared column had a missing value.
    pub dropped_rows: usize,
    /// One-hot encodings discovered (or enforced) during the load.
    pub encodings: Vec<CategoricalEncoding>,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty()
        || t.eq_ignore_ascii_case("na")
        || t.eq_ignore_ascii_case("nan")
        || t.eq_ignore_ascii_case("null")
}

fn parse_numeric(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        row,
        column: column.to_string(),
        detail: format!("'{}' is not a number", cell.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column: column.to_string(),
            detail: "non-finite value".into(),
        });
    }
    Ok(v)
}

fn parse_binary(cell: &str, row: usize, column: &str) -> Result<u8> {
    match parse_numeric(cell, row, column)? {
        v if v == 0.0 => Ok(0),
        v if v == 1.0 => Ok(1),
        v => Err(Error::Parse {
            row,
            column: column.to_string(),
            detail: format!("expected a binary 0/1 value, got {v}"),
        }),
    }
}

/// Loads a CSV file, discovering categorical encodings by first appearance.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<LoadedData> {
    load_csv_impl(path.as_ref(), schema, None)
}

/// Loads a CSV file against fixed categorical encodings (e.g. from a saved
/// model); an unseen category is a schema error rather than a new column.
pub fn load_csv_with_encodings(
    path: impl AsRef<Path>,
    schema: &CsvSchema,
    encodings: &[CategoricalEncoding],
) -> Result<LoadedData> {
    load_csv_impl(path.as_ref(), schema, Some(encodings))
}

fn load_csv_impl(
    path: &Path,
    schema: &CsvSchema,
    fixed: Option<&[CategoricalEncoding]>,
) -> Result<LoadedData> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let col_idx = |name: &str| header.iter().position(|h| h == name);
    let mut missing_cols = Vec::new();
    for name in schema.declared_columns() {
        if col_idx(name).is_none() {
            missing_cols.push(name.to_string());
        }
    }
    if !missing_cols.is_empty() {
        return Err(Error::Schema(format!(
            "missing column(s) [{}] in '{}'",
            missing_cols.join(", "),
            path.display()
        )));
    }

    let records: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;

    // Pass 1: find surviving rows (no missing cell in any declared column).
    let declared_idx: Vec<usize> = schema
        .declared_columns()
        .iter()
        .map(|n| col_idx(n).expect("checked above"))
        .collect();
    let mut surviving = Vec::with_capacity(records.len());
    let mut dropped_rows = 0usize;
    for (r, record) in records.iter().enumerate() {
        let missing = declared_idx
            .iter()
            .any(|&c| record.get(c).map_or(true, is_missing));
        if missing {
            dropped_rows += 1;
        } else {
            surviving.push(r);
        }
    }

    // Category order: fixed encodings when supplied, else first appearance
    // over surviving rows.
    let mut encodings: Vec<CategoricalEncoding> = Vec::new();
    for cat_col in &self_order_categoricals(schema) {
        let idx = col_idx(cat_col).expect("checked above");
        if let Some(fixed) = fixed {
            let enc = fixed
                .iter()
                .find(|e| &e.column == cat_col)
                .ok_or_else(|| {
                    Error::Schema(format!("no stored encoding for categorical column '{cat_col}'"))
                })?
                .clone();
            for &r in &surviving {
                let cell = records[r].get(idx).unwrap_or("").trim();
                if !enc.categories.iter().any(|c| c == cell) {
                    return Err(Error::Schema(format!(
                        "column '{cat_col}' has unknown category '{cell}' (known: [{}])",
                        enc.categories.join(", ")
                    )));
                }
            }
            encodings.push(enc);
        } else {
            let mut categories = Vec::new();
            for &r in &surviving {
                let cell = records[r].get(idx).unwrap_or("").trim().to_string();
                if !categories.contains(&cell) {
                    categories.push(cell);
                }
            }
            encodings.push(CategoricalEncoding {
                column: cat_col.clone(),
                categories,
            });
        }
    }

    // Expanded column names, one-hot columns in category order.
    let mut expanded_names = Vec::new();
    for f in &schema.features {
        if schema.categorical.contains(f) {
            let enc = encodings.iter().find(|e| &e.column == f).expect("built above");
            for c in &enc.categories {
                expanded_names.push(format!("{f}={c}"));
            }
        } else {
            expanded_names.push(f.clone());
        }
    }

    // Pass 2: build the matrix.
    let mut values = Vec::with_capacity(surviving.len() * expanded_names.len());
    let mut labels = schema.label.as_ref().map(|_| Vec::with_capacity(surviving.len()));
    let mut predictions = schema
        .prediction
        .as_ref()
        .map(|_| Vec::with_capacity(surviving.len()));
    let mut scores = schema.score.as_ref().map(|_| Vec::with_capacity(surviving.len()));

    for &r in &surviving {
        let record = &records[r];
        let data_row = r + 1; // 1-based data row, header excluded
        for f in &schema.features {
            let idx = col_idx(f).expect("checked above");
            let cell = record.get(idx).unwrap_or("");
            if schema.categorical.contains(f) {
                let enc = encodings.iter().find(|e| &e.column == f).expect("built above");
                let cell = cell.trim();
                for c in &enc.categories {
                    values.push(if c == cell { 1.0 } else { 0.0 });
                }
            } else {
                values.push(parse_numeric(cell, data_row, f)?);
            }
        }
        if let (Some(col), Some(out)) = (&schema.label, labels.as_mut()) {
            let idx = col_idx(col).expect("checked above");
            out.push(parse_binary(record.get(idx).unwrap_or(""), data_row, col)?);
        }
        if let (Some(col), Some(out)) = (&schema.prediction, predictions.as_mut()) {
            let idx = col_idx(col).expect("checked above");
            out.push(parse_binary(record.get(idx).unwrap_or(""), data_row, col)?);
        }
        if let (Some(col), Some(out)) = (&schema.score, scores.as_mut()) {
            let idx = col_idx(col).expect("checked above");
            let v = parse_numeric(record.get(idx).unwrap_or(""), data_row, col)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Parse {
                    row: data_row,
                    column: col.clone(),
                    detail: format!("score {v} outside [0, 1]"),
                });
            }
            out.push(v);
        }
    }

    let mut matrix = FeatureMatrix::new(expanded_names, values, surviving.len())?;
    if let Some(l) = labels {
        matrix.set_labels(l)?;
    }
    if let Some(p) = predictions {
        matrix.set_predictions(p)?;
    }
    if let Some(s) = scores {
        matrix.set_scores(s)?;
    }

    Ok(LoadedData {
        matrix,
        dropped_rows,
        encodings,
    })
}

fn self_order_categoricals(schema: &CsvSchema) -> Vec<String> {
    schema
        .features
        .iter()
        .filter(|f| schema.categorical.contains(*f))
        .cloned()
        .collect()
}

/// Writes a matrix to CSV; label/prediction/score columns (when present) are
/// appended under those fixed names.
pub fn write_csv(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = matrix.feature_names().to_vec();
    if matrix.labels().is_some() {
        header.push("label".into());
    }
    if matrix.predictions().is_some() {
        header.push("prediction".into());
    }
    if matrix.scores().is_some() {
        header.push("score".into());
    }
    writer.write_record(&header)?;
    for i in 0..matrix.n_rows() {
        let mut record: Vec<String> = matrix.row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(l) = matrix.labels() {
            record.push(format!("{}", l[i]));
        }
        if let Some(p) = matrix.predictions() {
            record.push(format!("{}", p[i]));
        }
        if let Some(s) = matrix.scores() {
            record.push(format!("{}", s[i]));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Seeded train/holdout split; exact, disjoint, optionally stratified by the
/// label column.
pub fn split(
    matrix: &FeatureMatrix,
    train_fraction: f64,
    seed: u64,
    stratify: bool,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    if matrix.n_rows() < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 rows to split".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Vec<usize>> = if stratify {
        let labels = matrix.labels().ok_or_else(|| {
            Error::InvalidConfig("stratified split requires a label column".into())
        })?;
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
        for (i, &l) in labels.iter().enumerate() {
            by_class[l as usize].push(i);
        }
        for class in by_class.iter() {
            if !class.is_empty() && class.len() < 2 {
                return Err(Error::InvalidParameter(
                    "stratified split needs at least 2 rows in every present class".into(),
                ));
            }
        }
        by_class.into_iter().filter(|c| !c.is_empty()).collect()
    } else {
        vec![(0..matrix.n_rows()).collect()]
    };

    let mut train_idx = Vec::new();
    let mut holdout_idx = Vec::new();
    for mut group in groups {
        group.shuffle(&mut rng);
        let take = ((group.len() as f64) * train_fraction).round() as usize;
        let take = take.clamp(1, group.len() - 1);
        train_idx.extend_from_slice(&group[..take]);
        holdout_idx.extend_from_slice(&group[take..]);
    }
    train_idx.sort_unstable();
    holdout_idx.sort_unstable();
    Ok((matrix.subset(&train_idx), matrix.subset(&holdout_idx)))
}

/// Up-samples the minority class by seeded sampling with replacement until
/// class counts are equal.
pub fn rebalance(matrix: &FeatureMatrix, seed: u64) -> Result<FeatureMatrix> {
    let labels = matrix
        .labels()
        .ok_or_else(|| Error::InvalidConfig("rebalance requires a label column".into()))?;
    let pos: Vec<usize> = (0..matrix.n_rows()).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..matrix.n_rows()).filter(|&i| labels[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidParameter(
            "rebalance requires both classes to be present".into(),
        ));
    }
    if pos.len() == neg.len() {
        return Ok(matrix.clone());
    }
    let minority = if pos.len() < neg.len() { &pos } else { &neg };
    let deficit = pos.len().abs_diff(neg.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..matrix.n_rows()).collect();
    for _ in 0..deficit {
        indices.push(minority[rng.random_range(0..minority.len())]);
    }
    Ok(matrix.subset(&indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn simple_schema() -> CsvSchema {
        CsvSchema {
            features: vec!["a".into(), "b".into()],
            categorical: vec![],
            label: None,
            prediction: None,
            score: None,
        }
    }

    #[test]
    fn missing_cell_drops_row_and_counts() {
        let f = write_temp("a,b\n1,2\n3,\n5,6\n");
        let loaded = load_csv(f.path(), &simple_schema()).unwrap();
        assert_eq!(loaded.matrix.n_rows(), 2);
        assert_eq!(loaded.dropped_rows, 1);
        assert_eq!(loaded.matrix.row(1), &[5.0, 6.0]);
    }

    #[test]
    fn categorical_one_hot_by_first_appearance() {
        let f = write_temp("c,x\nB,1\nA,2\nB,3\n");
        let schema = CsvSchema {
            features: vec!["c".into(), "x".into()],
            categorical: vec!["c".into()],
            label: None,
            prediction: None,
            score: None,
        };
        let loaded = load_csv(f.path(), &schema).unwrap();
        assert_eq!(
            loaded.matrix.feature_names(),
            &["c=B".to_string(), "c=A".to_string(), "x".to_string()]
        );
        assert_eq!(loaded.matrix.row(0), &[1.0, 0.0, 1.0]);
        assert_eq!(loaded.matrix.row(1), &[0.0, 1.0, 2.0]);
        // exactly one 1 among the derived columns per row
        for row in loaded.matrix.rows() {
            assert_eq!(row[..2].iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn fixed_encodings_reject_unknown_category() {
        let f = write_temp("c,x\nC,1\n");
        let schema = CsvSchema {
            features: vec!["c".into(), "x".into()],
            categorical: vec!["c".into()],
            label: None,
            prediction: None,
            score: None,
        };
        let enc = [CategoricalEncoding {
            column: "c".into(),
            categories: vec!["A".into(), "B".into()],
        }];
        let err = load_csv_with_encodings(f.path(), &schema, &enc).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
        assert!(err.to_string().contains("unknown category 'C'"));
    }

    #[test]
    fn missing_column_is_schema_error_naming_it() {
        let f = write_temp("a\n1\n");
        let err = load_csv(f.path(), &simple_schema()).unwrap_err();
        assert!(err.to_string().contains("[b]"), "{err}");
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let f = write_temp("a,b\n1,2\n1,zzz\n");
        let err = load_csv(f.path(), &simple_schema()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn round_trip_write_then_load_is_identical() {
        let mut m = FeatureMatrix::from_rows(
            vec!["a".into(), "b".into()],
            &[vec![0.125, -3.5], vec![1e-9, 7.25], vec![2.0, 0.3333333333333333]],
        )
        .unwrap();
        m.set_labels(vec![1, 0, 1]).unwrap();
        m.set_predictions(vec![1, 1, 0]).unwrap();
        m.set_scores(vec![0.9, 0.25, 0.5]).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_csv(&m, &path).unwrap();
        let schema = CsvSchema {
            features: vec!["a".into(), "b".into()],
            categorical: vec![],
            label: Some("label".into()),
            prediction: Some("prediction".into()),
            score: Some("score".into()),
        };
        let loaded = load_csv(&path, &schema).unwrap();
        assert_eq!(loaded.matrix, m);
        assert_eq!(loaded.dropped_rows, 0);
    }

    #[test]
    fn split_is_exact_and_seeded() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64]).collect();
        let m = FeatureMatrix::from_rows(vec!["x".into()], &rows).unwrap();
        let (train, holdout) = split(&m, 0.75, 9, false).unwrap();
        assert_eq!(train.n_rows(), 75);
        assert_eq!(holdout.n_rows(), 25);
        let (train2, holdout2) = split(&m, 0.75, 9, false).unwrap();
        assert_eq!(train, train2);
        assert_eq!(holdout, holdout2);
        // disjoint partition
        let mut all: Vec<f64> = train.column(0).chain(holdout.column(0)).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..100).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn stratified_split_preserves_class_ratio() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64]).collect();
        let mut m = FeatureMatrix::from_rows(vec!["x".into()], &rows).unwrap();
        m.set_labels((0..100).map(|i| u8::from(i < 60)).collect()).unwrap();
        let (train, holdout) = split(&m, 0.5, 3, true).unwrap();
        let pos = |fm: &FeatureMatrix| fm.labels().unwrap().iter().filter(|&&l| l == 1).count();
        assert_eq!(pos(&train), 30);
        assert_eq!(pos(&holdout), 30);
        assert_eq!(train.n_rows(), 50);
    }

    #[test]
    fn rebalance_equalises_counts_and_is_seeded() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64]).collect();
        let mut m = FeatureMatrix::from_rows(vec!["x".into()], &rows).unwrap();
        m.set_labels((0..100).map(|i| u8::from(i < 30)).collect()).unwrap();
        let r = rebalance(&m, 11).unwrap();
        let labels = r.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 70);
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 70);
        assert_eq!(rebalance(&m, 11).unwrap(), r);

        let mut balanced = FeatureMatrix::from_rows(vec!["x".into()], &rows).unwrap();
        balanced.set_labels((0..100).map(|i| u8::from(i < 50)).collect()).unwrap();
        assert_eq!(rebalance(&balanced, 0).unwrap(), balanced);

        let mut single = FeatureMatrix::from_rows(vec!["x".into()], &rows).unwrap();
        single.set_labels(vec![1; 100]).unwrap();
        assert!(rebalance(&single, 0).is_err());
    }

    #[test]
    fn scaler_maps_constant_feature_to_half_and_does_not_clip() {
        let m = FeatureMatrix::from_rows(
            vec!["a".into(), "c".into()],
            &[vec![0.0, 7.0], vec![10.0, 7.0]],
        )
        .unwrap();
        let scaler = ScalerState::fit(&m).unwrap();
        assert_eq!(scaler.constant_features(), vec![1]);
        let scaled = scaler.transform_row(&[5.0, 7.0]).unwrap();
        assert_eq!(scaled, vec![0.5, 0.5]);
        // out-of-range values extend linearly beyond [0, 1]
        let far = scaler.transform_row(&[20.0, 7.0]).unwrap();
        assert_eq!(far[0], 2.0);
    }
}
