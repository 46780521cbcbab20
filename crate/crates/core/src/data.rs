//! Datasets: synthetic generators, CSV ingestion, `[-1, 1]` scaling and
//! stratified train/test splitting.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer encoding of a non-numeric CSV column, by first appearance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEncoding {
    pub column: String,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    /// Dense class ids indexing `class_names`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub encodings: Vec<CategoricalEncoding>,
    /// Set once the features have been passed through a fitted scaler.
    pub scaler: Option<Scaler>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let width = features.first().map_or(0, Vec::len);
        let feature_names = (0..width).map(|i| format!("x{i}")).collect();
        Self::with_names(features, labels, class_names, feature_names)
    }

    pub fn with_names(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::input(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let width = feature_names.len();
        if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(Error::input(format!(
                "row {i} has {} features, expected {width}",
                row.len()
            )));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("features must be finite"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::input(format!(
                "label id {bad} has no class name ({} classes)",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            class_names,
            feature_names,
            encodings: Vec::new(),
            scaler: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            encodings: self.encodings.clone(),
            scaler: self.scaler.clone(),
        }
    }

    /// Relabels this dataset so its class ids index `reference` names.
    pub fn align_classes(&self, reference: &[String]) -> Result<Dataset> {
        let map: Vec<usize> = self
            .class_names
            .iter()
            .map(|name| {
                reference.iter().position(|r| r == name).ok_or_else(|| {
                    Error::input(format!(
                        "class '{name}' does not occur in the training data"
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let mut out = self.clone();
        out.labels = self.labels.iter().map(|&l| map[l]).collect();
        out.class_names = reference.to_vec();
        Ok(out)
    }

    /// Header of feature names plus `label`; labels written by class name.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = self.feature_names.clone();
        header.push("label".into());
        wtr.write_record(&header)?;
        for (row, &label) in self.features.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(self.class_names[label].clone());
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn numeric_class_names(k: usize) -> Vec<String> {
    (0..k).map(|c| c.to_string()).collect()
}

/// Two interleaving half circles: class 0 on `(cos t, sin t)`, class 1 on
/// `(1 - cos t, 0.5 - sin t)` with `t ~ U[0, pi]`, plus Gaussian noise.
/// Class 0 receives `ceil(n/2)` points.
pub fn make_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::input(format!("make_moons needs n >= 2, got {n}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::input(format!(
            "noise must be nonnegative, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_upper = n.div_ceil(2);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let t = rng.random_range(0.0..=PI);
        let (s, c) = t.sin_cos();
        if i < n_upper {
            features.push(vec![c, s]);
            labels.push(0);
        } else {
            features.push(vec![1.0 - c, 0.5 - s]);
            labels.push(1);
        }
    }
    if noise > 0.0 {
        let normal = Normal::new(0.0, noise).expect("noise is finite and nonnegative");
        for row in &mut features {
            for v in row.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
    }
    Dataset::new(features, labels, numeric_class_names(2))
}

/// Isotropic Gaussian blobs with centers drawn uniformly in `[-10, 10]^d`.
/// Points are spread evenly across classes, earlier classes taking any
/// remainder.
pub fn make_blobs(
    n: usize,
    num_features: usize,
    num_classes: usize,
    cluster_std: f64,
    seed: u64,
) -> Result<Dataset> {
    if num_classes == 0 || num_features == 0 || n < num_classes {
        return Err(Error::input(format!(
            "make_blobs needs n >= classes >= 1 and features >= 1 (n={n}, classes={num_classes}, features={num_features})"
        )));
    }
    if !(cluster_std >= 0.0 && cluster_std.is_finite()) {
        return Err(Error::input(format!(
            "cluster_std must be nonnegative, got {cluster_std}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| {
            (0..num_features)
                .map(|_| rng.random_range(-10.0..10.0))
                .collect()
        })
        .collect();
    let normal = Normal::new(0.0, cluster_std).expect("std is finite and nonnegative");
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (class, center) in centers.iter().enumerate() {
        let count = n / num_classes + usize::from(class < n % num_classes);
        for _ in 0..count {
            features.push(center.iter().map(|c| c + normal.sample(&mut rng)).collect());
            labels.push(class);
        }
    }
    Dataset::new(features, labels, numeric_class_names(num_classes))
}

/// Per-column affine map sending the fitted min to -1 and max to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl Scaler {
    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    2.0 * (v - lo) / (hi - lo) - 1.0
                } else {
                    // constant column
                    0.0
                }
            })
            .collect()
    }

    pub fn inverse(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| lo + (v + 1.0) * 0.5 * (hi - lo))
            .collect()
    }
}

pub fn fit_scale(train: &Dataset) -> Result<Scaler> {
    if train.is_empty() {
        return Err(Error::input("cannot fit a scaler on an empty dataset"));
    }
    let d = train.num_features();
    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    for row in &train.features {
        for (k, &v) in row.iter().enumerate() {
            mins[k] = mins[k].min(v);
            maxs[k] = maxs[k].max(v);
        }
    }
    Ok(Scaler { mins, maxs })
}

/// Applies `scaler` unchanged; values outside the fitted range map outside
/// `[-1, 1]`.
pub fn apply_scale(scaler: &Scaler, data: &Dataset) -> Result<Dataset> {
    if scaler.mins.len() != data.num_features() {
        return Err(Error::input(format!(
            "scaler fitted on {} features, data has {}",
            scaler.mins.len(),
            data.num_features()
        )));
    }
    let mut out = data.clone();
    out.features = data.features.iter().map(|r| scaler.transform(r)).collect();
    out.scaler = Some(scaler.clone());
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    /// Row indices into the source dataset.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Random stratified split. Each class with at least two members appears in
/// both partitions; singleton classes go to train.
pub fn split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::input(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = data.len();
    let counts = data.class_counts();
    let total_train = (train_fraction * n as f64).round() as usize;

    // largest-remainder allocation of the train quota across classes
    let ideal: Vec<f64> = counts.iter().map(|&c| train_fraction * c as f64).collect();
    let mut quota: Vec<usize> = ideal.iter().map(|v| v.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut remaining = total_train.saturating_sub(quota.iter().sum());
    for &c in &order {
        if remaining == 0 {
            break;
        }
        if quota[c] < counts[c] {
            quota[c] += 1;
            remaining -= 1;
        }
    }
    for (c, q) in quota.iter_mut().enumerate() {
        match counts[c] {
            0 => {}
            1 => {
                log::warn!(
                    "class '{}' has a single member; it goes to the training split",
                    data.class_names[c]
                );
                *q = 1;
            }
            k => *q = (*q).clamp(1, k - 1),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut taken = vec![0usize; counts.len()];
    let (mut train_indices, mut test_indices) = (Vec::new(), Vec::new());
    for &i in &perm {
        let c = data.labels[i];
        if taken[c] < quota[c] {
            taken[c] += 1;
            train_indices.push(i);
        } else {
            test_indices.push(i);
        }
    }
    Ok(Split {
        train: data.subset(&train_indices),
        test: data.subset(&test_indices),
        train_indices,
        test_indices,
    })
}

fn load_error(path: &Path, row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Load {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Reads a headed CSV. Non-label columns are parsed as reals; a column with
/// no numeric cell at all is treated as categorical and integer-encoded in
/// first-appearance order. Labels map to dense ids in first-appearance order.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    load_csv_impl(path.as_ref(), label_column, None)
}

/// Like [`load_csv`] but reuses the categorical encodings and class names of
/// `reference`, so ids line up with a previously loaded training set.
pub fn load_csv_aligned(
    path: impl AsRef<Path>,
    label_column: &str,
    reference: &Dataset,
) -> Result<Dataset> {
    load_csv_impl(path.as_ref(), label_column, Some(reference))
}

fn load_csv_impl(path: &Path, label_column: &str, reference: Option<&Dataset>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| load_error(path, 1, label_column, "label column not found in header"))?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();

    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(load_error(path, 1, label_column, "no data rows"));
    }

    let ref_encodings: HashMap<&str, &CategoricalEncoding> = reference
        .map(|r| r.encodings.iter().map(|e| (e.column.as_str(), e)).collect())
        .unwrap_or_default();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(feature_cols.len());
    let mut encodings = Vec::new();
    for &col in &feature_cols {
        let name = &headers[col];
        for (line, cells) in &rows {
            if cells[col].is_empty() {
                return Err(load_error(path, *line, name, "missing value"));
            }
        }
        let parsed: Vec<Option<f64>> = rows
            .iter()
            .map(|(_, c)| c[col].parse::<f64>().ok())
            .collect();
        let categorical = match ref_encodings.get(name.as_str()) {
            Some(_) => true,
            None => reference.is_none() && parsed.iter().all(Option::is_none),
        };
        if categorical {
            let mut cats: Vec<String> = ref_encodings
                .get(name.as_str())
                .map(|e| e.categories.clone())
                .unwrap_or_default();
            let mut values = Vec::with_capacity(rows.len());
            for (line, cells) in &rows {
                let cell = &cells[col];
                let id = match cats.iter().position(|c| c == cell) {
                    Some(id) => id,
                    None if reference.is_some() => {
                        return Err(load_error(
                            path,
                            *line,
                            name,
                            format!("unknown category '{cell}'"),
                        ));
                    }
                    None => {
                        cats.push(cell.clone());
                        cats.len() - 1
                    }
                };
                values.push(id as f64);
            }
            encodings.push(CategoricalEncoding {
                column: name.clone(),
                categories: cats,
            });
            columns.push(values);
        } else {
            let mut values = Vec::with_capacity(rows.len());
            for ((line, cells), p) in rows.iter().zip(&parsed) {
                match p {
                    Some(v) if v.is_finite() => values.push(*v),
                    _ => {
                        return Err(load_error(
                            path,
                            *line,
                            name,
                            format!("cannot parse '{}' as a number", cells[col]),
                        ));
                    }
                }
            }
            columns.push(values);
        }
    }

    let mut class_names: Vec<String> = reference.map(|r| r.class_names.clone()).unwrap_or_default();
    let mut labels = Vec::with_capacity(rows.len());
    for (line, cells) in &rows {
        let cell = &cells[label_idx];
        if cell.is_empty() {
            return Err(load_error(path, *line, label_column, "missing label"));
        }
        let id = match class_names.iter().position(|c| c == cell) {
            Some(id) => id,
            None if reference.is_some() => {
                return Err(load_error(
                    path,
                    *line,
                    label_column,
                    format!("unknown class '{cell}'"),
                ));
            }
            None => {
                class_names.push(cell.clone());
                class_names.len() - 1
            }
        };
        labels.push(id);
    }

    let features: Vec<Vec<f64>> = (0..rows.len())
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let feature_names = feature_cols.iter().map(|&c| headers[c].clone()).collect();
    let mut ds = Dataset::with_names(features, labels, class_names, feature_names)?;
    ds.encodings = encodings;
    Ok(ds)
}
