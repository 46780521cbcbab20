//! The four pipeline commands. Each writes its artifacts into `config.out`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::RunConfig;
use crate::data::{self, Dataset, Scaler, Split};
use crate::error::{Error, Result};
use crate::evolve::{self, EvolutionResult, Individual};
use crate::genome::{count_gates, decode_genome, CircuitSpec};
use crate::interpret::{self, GridSpec};
use crate::qsim::QuantumKernel;
use crate::qsvm::{self, ConfusionMatrix};

pub const HISTORY_FILE: &str = "history.csv";
pub const FRONT_FILE: &str = "front.json";
pub const BEST_CIRCUIT_FILE: &str = "best_circuit.json";
pub const CONFIG_FILE: &str = "config.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Dataset after splitting and (optionally) scaling.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub raw: Dataset,
    pub split: Split,
    pub scaler: Option<Scaler>,
    pub train: Dataset,
    pub test: Dataset,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let raw = config.dataset.materialize(None, config.data_seed())?;
    let split = data::split(&raw, config.train_fraction, config.split_seed())?;
    let (scaler, train, test) = if config.scale {
        let s = data::fit_scale(&split.train)?;
        let train = data::apply_scale(&s, &split.train)?;
        let test = data::apply_scale(&s, &split.test)?;
        (Some(s), train, test)
    } else {
        (None, split.train.clone(), split.test.clone())
    };
    Ok(Prepared {
        raw,
        split,
        scaler,
        train,
        test,
    })
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", dir.display()),
        ))
    })
}

fn individual_json(ind: &Individual) -> serde_json::Value {
    let circuit = decode_genome(&ind.genome);
    let counts = count_gates(&circuit);
    let o = ind.objectives.expect("evaluated");
    json!({
        "genome": ind.genome.to_bit_string(),
        "accuracy": o.accuracy,
        "size_metric": o.size_metric,
        "weights_control": o.weights_control,
        "n_local": counts.local,
        "n_cnot": counts.cnot,
        "circuit": serde_json::to_value(&circuit).expect("circuit serializes"),
    })
}

fn data_json(p: &Prepared) -> serde_json::Value {
    json!({
        "n_samples": p.raw.len(),
        "n_train": p.train.len(),
        "n_test": p.test.len(),
        "n_features": p.raw.num_features(),
        "classes": p.raw.class_names,
    })
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub result: EvolutionResult,
    pub best: Individual,
    pub out: PathBuf,
}

/// Evolves circuits and writes history, front, best circuit, config and
/// finally the manifest.
pub fn cmd_evolve(config: &RunConfig) -> Result<EvolveOutcome> {
    prepare_out_dir(&config.out)?;
    let manifest_path = config.out.join(MANIFEST_FILE);
    if manifest_path.exists() {
        fs::remove_file(&manifest_path)?;
    }
    let prepared = prepare(config)?;
    log::info!(
        "evolving on {} train / {} test points, {} features, {} classes",
        prepared.train.len(),
        prepared.test.len(),
        prepared.train.num_features(),
        prepared.raw.num_classes()
    );
    let result = with_threads(config.threads, || {
        evolve::run_with_observer(&config.evolution, &prepared.train, &prepared.test, |r| {
            if r.stats.generation % 100 == 0 {
                log::info!(
                    "generation {}: best accuracy {:.4}, best SM {:.3}, front {}",
                    r.stats.generation,
                    r.stats.best_accuracy,
                    r.stats.best_sm,
                    r.stats.front_size
                );
            }
        })
    })??;
    let best = result.best().clone();

    evolve::write_history_csv(&result.history, create(&config.out.join(HISTORY_FILE))?)?;
    let front: Vec<serde_json::Value> = result.front.iter().map(individual_json).collect();
    write_json(&config.out.join(FRONT_FILE), &json!(front))?;
    let best_circuit = decode_genome(&best.genome);
    fs::write(
        config.out.join(BEST_CIRCUIT_FILE),
        best_circuit.to_json()? + "\n",
    )?;
    fs::write(config.out.join(CONFIG_FILE), config.to_text())?;

    let last = result.history.last().expect("history has generation 0");
    let manifest = json!({
        "command": "evolve",
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed(),
        "config": config.to_text(),
        "data": data_json(&prepared),
        "generations_run": last.generation,
        "stopped_early": result.stopped_early,
        "best": individual_json(&best),
        "artifacts": [HISTORY_FILE, FRONT_FILE, BEST_CIRCUIT_FILE, CONFIG_FILE],
    });
    write_json(&manifest_path, &manifest)?;
    Ok(EvolveOutcome {
        result,
        best,
        out: config.out.clone(),
    })
}

pub fn read_circuit(path: &Path) -> Result<CircuitSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read circuit {}: {e}", path.display())))?;
    CircuitSpec::from_json(&text)
}

fn check_dimension(circuit: &CircuitSpec, data: &Dataset, what: &str) -> Result<()> {
    if circuit.num_features() != data.num_features() {
        return Err(Error::input(format!(
            "circuit expects d = {} features but the {what} data has {}",
            circuit.num_features(),
            data.num_features()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ValidateOutcome {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub predictions: Vec<usize>,
    pub model: qsvm::TrainedMulticlassModel,
}

/// Unscaled validation points: a CSV, a fresh generator draw, or the
/// held-out split when neither is available.
fn validation_raw(config: &RunConfig, prepared: &Prepared) -> Result<Dataset> {
    let label = match &config.dataset {
        super::config::DatasetSource::Csv { label_column, .. } => label_column.clone(),
        _ => "label".to_string(),
    };
    if let Some(path) = &config.validation_csv {
        return data::load_csv_aligned(path, &label, &prepared.raw);
    }
    if config.dataset.is_generator() {
        let fresh = config
            .dataset
            .materialize(Some(config.validation_n_samples), config.validation_seed())?;
        return fresh.align_classes(&prepared.raw.class_names);
    }
    log::warn!("no validation_csv given; validating on the held-out test split");
    Ok(prepared.split.test.clone())
}

/// Refits the SVM on the training split and scores the validation set.
pub fn cmd_validate(config: &RunConfig, circuit_path: &Path) -> Result<ValidateOutcome> {
    let circuit = read_circuit(circuit_path)?;
    let prepared = prepare(config)?;
    check_dimension(&circuit, &prepared.train, "training")?;
    let raw_val = validation_raw(config, &prepared)?;
    check_dimension(&circuit, &raw_val, "validation")?;
    let val = match &prepared.scaler {
        Some(s) => data::apply_scale(s, &raw_val)?,
        None => raw_val.clone(),
    };
    prepare_out_dir(&config.out)?;

    let kernel = QuantumKernel::new(circuit)
        .with_mode(config.evolution.kernel_mode)
        .with_max_qubits(config.evolution.max_qubits);
    let (model, predictions) = with_threads(config.threads, || -> Result<_> {
        let model = qsvm::fit(
            &kernel,
            &prepared.train.features,
            &prepared.train.labels,
            &config.evolution.svm,
        )?;
        let predictions = qsvm::predict(&model, &kernel, &prepared.train.features, &val.features)?;
        Ok((model, predictions))
    })??;
    let classes: Vec<usize> = (0..prepared.raw.num_classes()).collect();
    let confusion = qsvm::confusion(&predictions, &val.labels, &classes)?;
    let accuracy = qsvm::accuracy(&predictions, &val.labels)?;
    let names = &prepared.raw.class_names;

    confusion.write_csv(create(&config.out.join("confusion.csv"))?, names)?;
    confusion.write_metrics_csv(create(&config.out.join("class_metrics.csv"))?, names)?;
    {
        let mut w = csv::Writer::from_writer(create(&config.out.join("predictions.csv"))?);
        let mut header = raw_val.feature_names.clone();
        header.push("label".into());
        header.push("predicted".into());
        w.write_record(&header)?;
        for ((row, &truth), &pred) in raw_val
            .features
            .iter()
            .zip(&raw_val.labels)
            .zip(&predictions)
        {
            let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
            rec.push(names[truth].clone());
            rec.push(names[pred].clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    write_json(&config.out.join("model.json"), &model.summary_json(names))?;
    write_json(
        &config.out.join("metrics.json"),
        &json!({
            "accuracy": accuracy,
            "correct": confusion.trace(),
            "total": confusion.total(),
            "misclassified": confusion.off_diagonal(),
            "n_train": prepared.train.len(),
            "n_validation": val.len(),
            "circuit": circuit_path.display().to_string(),
            "seed": config.seed(),
            "per_class": confusion.class_metrics(),
        }),
    )?;
    log::info!(
        "validation accuracy {accuracy:.4} ({} of {})",
        confusion.trace(),
        confusion.total()
    );
    Ok(ValidateOutcome {
        accuracy,
        confusion,
        predictions,
        model,
    })
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    (lo - 0.5, hi + 0.5)
}

/// Per-cluster accuracies plus decision grids for 2-feature data.
pub fn cmd_interpret(
    config: &RunConfig,
    circuit_path: &Path,
) -> Result<interpret::InterpretReport> {
    let circuit = read_circuit(circuit_path)?;
    let prepared = prepare(config)?;
    check_dimension(&circuit, &prepared.train, "training")?;
    prepare_out_dir(&config.out)?;

    let grid = if prepared.raw.num_features() == 2 {
        let col = |k: usize| prepared.raw.features.iter().map(move |r| r[k]);
        Some(GridSpec {
            x_range: config.grid.x_range.unwrap_or_else(|| padded_range(col(0))),
            y_range: config.grid.y_range.unwrap_or_else(|| padded_range(col(1))),
            resolution: config.grid.resolution,
        })
    } else {
        log::warn!(
            "decision grids need 2 features, data has {}; writing reports without grids",
            prepared.raw.num_features()
        );
        None
    };
    let report = with_threads(config.threads, || {
        interpret::per_cluster_report(
            &circuit,
            &prepared.train,
            &prepared.test,
            &config.evolution.svm,
            config.evolution.kernel_mode,
            grid.as_ref().map(|g| (g, prepared.scaler.as_ref())),
        )
    })??;

    let names = &prepared.raw.class_names;
    let mut grid_files = Vec::new();
    if let Some(g) = &report.full.grid {
        g.write_csv(create(&config.out.join("grid_full.csv"))?, names)?;
        grid_files.push("grid_full.csv".to_string());
    }
    for (k, c) in report.clusters.iter().enumerate() {
        if let Some(g) = &c.grid {
            let name = format!("grid_cluster_{k}.csv");
            g.write_csv(create(&config.out.join(&name))?, names)?;
            grid_files.push(name);
        }
    }
    let mut value = serde_json::to_value(&report)?;
    value["grids"] = json!(grid_files);
    if grid.is_none() {
        value["notice"] = json!("decision grids omitted: data is not 2-dimensional");
    }
    write_json(&config.out.join("clusters.json"), &value)?;
    Ok(report)
}

/// Writes the configured generator's dataset to `output` with a
/// `<output>.manifest.json` sidecar.
pub fn cmd_gen_data(config: &RunConfig, output: &Path) -> Result<Dataset> {
    if !config.dataset.is_generator() {
        return Err(Error::config("gen-data needs dataset = moons or blobs"));
    }
    let data = config.dataset.materialize(None, config.data_seed())?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        prepare_out_dir(parent)?;
    }
    data.write_csv(create(output)?)?;
    let mut sidecar = output.as_os_str().to_owned();
    sidecar.push(".manifest.json");
    write_json(
        Path::new(&sidecar),
        &json!({
            "command": "gen-data",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed(),
            "data_seed": config.data_seed(),
            "config": config.to_text(),
            "rows": data.len(),
        }),
    )?;
    Ok(data)
}
