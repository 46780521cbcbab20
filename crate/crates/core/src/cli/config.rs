//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is optional
//! and falls back to its default; unknown keys are rejected.

use std::path::{Path, PathBuf};

use crate::data::{self, Dataset};
use crate::error::{Error, Result};
use crate::evolve::{EarlyStop, EvolutionConfig, ObjectiveMode, Variation};
use crate::qsim::KernelMode;
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Moons {
        n_samples: usize,
        noise: f64,
    },
    Blobs {
        n_samples: usize,
        n_features: usize,
        n_classes: usize,
        cluster_std: f64,
    },
    Csv {
        path: PathBuf,
        label_column: String,
    },
}

impl DatasetSource {
    /// Generates (or loads) a dataset; generators draw `n` points.
    pub fn materialize(&self, n: Option<usize>, seed: u64) -> Result<Dataset> {
        match self {
            DatasetSource::Moons { n_samples, noise } => {
                data::make_moons(n.unwrap_or(*n_samples), *noise, seed)
            }
            DatasetSource::Blobs {
                n_samples,
                n_features,
                n_classes,
                cluster_std,
            } => data::make_blobs(
                n.unwrap_or(*n_samples),
                *n_features,
                *n_classes,
                *cluster_std,
                seed,
            ),
            DatasetSource::Csv { path, label_column } => data::load_csv(path, label_column),
        }
    }

    pub fn is_generator(&self) -> bool {
        !matches!(self, DatasetSource::Csv { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub resolution: usize,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetSource,
    pub train_fraction: f64,
    pub scale: bool,
    pub evolution: EvolutionConfig,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub validation_n_samples: usize,
    pub validation_csv: Option<PathBuf>,
    pub grid: GridConfig,
    /// Pins the dataset draw and split independently of `seed`.
    pub data_seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Moons {
                n_samples: 150,
                noise: 0.2,
            },
            train_fraction: 0.7,
            scale: true,
            evolution: EvolutionConfig::default(),
            threads: None,
            out: PathBuf::from("out"),
            validation_n_samples: 500,
            validation_csv: None,
            grid: GridConfig {
                resolution: 100,
                x_range: None,
                y_range: None,
            },
            data_seed: None,
        }
    }
}

/// Raw values collected before the dataset source is assembled.
#[derive(Debug, Clone)]
struct DatasetKeys {
    kind: String,
    n_samples: usize,
    noise: f64,
    n_features: usize,
    n_classes: usize,
    cluster_std: f64,
    csv_path: Option<PathBuf>,
    label_column: String,
}

impl Default for DatasetKeys {
    fn default() -> Self {
        Self {
            kind: "moons".into(),
            n_samples: 150,
            noise: 0.2,
            n_features: 2,
            n_classes: 2,
            cluster_std: 1.0,
            csv_path: None,
            label_column: "label".into(),
        }
    }
}

/// Accumulates key/value pairs, then validates them into a [`RunConfig`].
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    dataset: DatasetKeys,
    early_stop_accuracy: Option<f64>,
    early_stop_patience: usize,
    config: RunConfig,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_range(key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] => {
            let (lo, hi): (f64, f64) = (parse(key, lo)?, parse(key, hi)?);
            if lo < hi {
                Ok((lo, hi))
            } else {
                Err(Error::config(format!("{key} needs lo < hi, got '{value}'")))
            }
        }
        _ => Err(Error::config(format!(
            "{key} expects 'lo,hi', got '{value}'"
        ))),
    }
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self {
            early_stop_patience: EarlyStop::default().patience,
            ..Default::default()
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut b = Self::new();
        b.apply_text(text)?;
        Ok(b)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let ds = &mut self.dataset;
        let c = &mut self.config;
        let ev = &mut c.evolution;
        match key {
            "dataset" => ds.kind = value.to_string(),
            "n_samples" => ds.n_samples = parse(key, value)?,
            "noise" => ds.noise = parse(key, value)?,
            "n_features" => ds.n_features = parse(key, value)?,
            "n_classes" => ds.n_classes = parse(key, value)?,
            "cluster_std" => ds.cluster_std = parse(key, value)?,
            "csv_path" => ds.csv_path = Some(PathBuf::from(value)),
            "label_column" => ds.label_column = value.to_string(),
            "train_fraction" => c.train_fraction = parse(key, value)?,
            "scale" => c.scale = parse(key, value)?,
            "qubits" => ev.num_qubits = parse(key, value)?,
            "layers" => ev.max_layers = parse(key, value)?,
            "population" => ev.population_mu = parse(key, value)?,
            "offspring" => ev.offspring_lambda = parse(key, value)?,
            "generations" => ev.generations = parse(key, value)?,
            "p_cross" => ev.p_cross = parse(key, value)?,
            "p_mut" => ev.p_mut = parse(key, value)?,
            "p_ind" => ev.p_ind = parse(key, value)?,
            "svm_c" => ev.svm.c = parse(key, value)?,
            "svm_tol" => ev.svm.tol = parse(key, value)?,
            "kernel" => ev.kernel_mode = value.parse::<KernelMode>()?,
            "objectives" => ev.objectives = value.parse::<ObjectiveMode>()?,
            "variation" => ev.variation = value.parse::<Variation>()?,
            "max_qubits" => ev.max_qubits = parse(key, value)?,
            "seed" => ev.seed = parse(key, value)?,
            "data_seed" => {
                c.data_seed = if value == "none" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "early_stop_accuracy" => {
                self.early_stop_accuracy = if value == "none" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "early_stop_patience" => self.early_stop_patience = parse(key, value)?,
            "threads" => {
                c.threads = if value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "out" => c.out = PathBuf::from(value),
            "validation_n_samples" => c.validation_n_samples = parse(key, value)?,
            "validation_csv" => c.validation_csv = Some(PathBuf::from(value)),
            "grid_resolution" => c.grid.resolution = parse(key, value)?,
            "grid_x_range" => c.grid.x_range = Some(parse_range(key, value)?),
            "grid_y_range" => c.grid.y_range = Some(parse_range(key, value)?),
            other => return Err(Error::config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn build(&self) -> Result<RunConfig> {
        let mut config = self.config.clone();
        let ds = &self.dataset;
        config.dataset = match ds.kind.as_str() {
            "moons" | "blobs" if ds.csv_path.is_some() => {
                return Err(Error::config(format!(
                    "csv_path given but dataset = {}; choose exactly one source",
                    ds.kind
                )))
            }
            "moons" => DatasetSource::Moons {
                n_samples: ds.n_samples,
                noise: ds.noise,
            },
            "blobs" => DatasetSource::Blobs {
                n_samples: ds.n_samples,
                n_features: ds.n_features,
                n_classes: ds.n_classes,
                cluster_std: ds.cluster_std,
            },
            "csv" => DatasetSource::Csv {
                path: ds
                    .csv_path
                    .clone()
                    .ok_or_else(|| Error::config("dataset = csv requires csv_path"))?,
                label_column: ds.label_column.clone(),
            },
            other => {
                return Err(Error::config(format!(
                    "unknown dataset '{other}' (expected moons, blobs or csv)"
                )))
            }
        };
        if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
            return Err(Error::config(format!(
                "train_fraction must be in (0, 1), got {}",
                config.train_fraction
            )));
        }
        if config.threads == Some(0) {
            return Err(Error::config("threads must be at least 1"));
        }
        if config.grid.resolution == 0 {
            return Err(Error::config("grid_resolution must be at least 1"));
        }
        config.evolution.early_stop = self.early_stop_accuracy.map(|target_accuracy| EarlyStop {
            target_accuracy,
            patience: self.early_stop_patience,
        });
        config.evolution.validate()?;
        Ok(config)
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        ConfigBuilder::from_text(&text)?.build()
    }

    pub fn parse(text: &str) -> Result<Self> {
        ConfigBuilder::from_text(text)?.build()
    }

    pub fn seed(&self) -> u64 {
        self.evolution.seed
    }

    fn data_master(&self) -> u64 {
        self.data_seed.unwrap_or(self.seed())
    }

    pub fn data_seed(&self) -> u64 {
        derive_seed(self.data_master(), "data", 0)
    }

    pub fn split_seed(&self) -> u64 {
        derive_seed(self.data_master(), "split", 0)
    }

    pub fn validation_seed(&self) -> u64 {
        derive_seed(self.data_master(), "validation", 0)
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let ev = &self.evolution;
        let mut lines: Vec<(String, String)> = Vec::new();
        let mut kv = |k: &str, v: String| lines.push((k.to_string(), v));
        match &self.dataset {
            DatasetSource::Moons { n_samples, noise } => {
                kv("dataset", "moons".into());
                kv("n_samples", n_samples.to_string());
                kv("noise", noise.to_string());
            }
            DatasetSource::Blobs {
                n_samples,
                n_features,
                n_classes,
                cluster_std,
            } => {
                kv("dataset", "blobs".into());
                kv("n_samples", n_samples.to_string());
                kv("n_features", n_features.to_string());
                kv("n_classes", n_classes.to_string());
                kv("cluster_std", cluster_std.to_string());
            }
            DatasetSource::Csv { path, label_column } => {
                kv("dataset", "csv".into());
                kv("csv_path", path.display().to_string());
                kv("label_column", label_column.clone());
            }
        }
        kv("train_fraction", self.train_fraction.to_string());
        kv("scale", self.scale.to_string());
        kv("qubits", ev.num_qubits.to_string());
        kv("layers", ev.max_layers.to_string());
        kv("population", ev.population_mu.to_string());
        kv("offspring", ev.offspring_lambda.to_string());
        kv("generations", ev.generations.to_string());
        kv("p_cross", ev.p_cross.to_string());
        kv("p_mut", ev.p_mut.to_string());
        kv("p_ind", ev.p_ind.to_string());
        kv("svm_c", ev.svm.c.to_string());
        kv("svm_tol", ev.svm.tol.to_string());
        kv("kernel", ev.kernel_mode.to_string());
        kv(
            "objectives",
            match ev.objectives {
                ObjectiveMode::AccuracyWeightsControl => "accuracy_wc",
                ObjectiveMode::AccuracySize => "accuracy_sm",
            }
            .into(),
        );
        kv("variation", ev.variation.to_string());
        kv("max_qubits", ev.max_qubits.to_string());
        kv("seed", ev.seed.to_string());
        if let Some(ds) = self.data_seed {
            kv("data_seed", ds.to_string());
        }
        match &ev.early_stop {
            Some(es) => {
                kv("early_stop_accuracy", es.target_accuracy.to_string());
                kv("early_stop_patience", es.patience.to_string());
            }
            None => kv("early_stop_accuracy", "none".into()),
        }
        kv(
            "threads",
            self.threads
                .map_or_else(|| "auto".to_string(), |t| t.to_string()),
        );
        kv("out", self.out.display().to_string());
        kv(
            "validation_n_samples",
            self.validation_n_samples.to_string(),
        );
        if let Some(p) = &self.validation_csv {
            kv("validation_csv", p.display().to_string());
        }
        kv("grid_resolution", self.grid.resolution.to_string());
        if let Some((lo, hi)) = self.grid.x_range {
            kv("grid_x_range", format!("{lo},{hi}"));
        }
        if let Some((lo, hi)) = self.grid.y_range {
            kv("grid_y_range", format!("{lo},{hi}"));
        }
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
