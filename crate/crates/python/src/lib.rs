//! Python bindings: `import qfm`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfm_core::data::{self, Dataset};
use qfm_core::evolve::{self as search, EarlyStop, EvolutionConfig, ObjectiveMode, Variation};
use qfm_core::genome::{self, count_gates};
use qfm_core::interpret;
use qfm_core::qsvm::{self, SvmParams};
use qfm_core::{CircuitSpec, KernelMode, QuantumKernel};

create_exception!(qfm, QfmError, PyException);

fn err(e: qfm_core::Error) -> PyErr {
    QfmError::new_err(e.to_string())
}

fn kernel_mode(mode: &str) -> PyResult<KernelMode> {
    mode.parse().map_err(err)
}

/// Bit-string encoding of a layered circuit.
#[pyclass(name = "Genome", module = "qfm", frozen, from_py_object)]
#[derive(Clone)]
struct PyGenome(genome::Genome);

#[pymethods]
impl PyGenome {
    #[new]
    fn new(
        bits: &str,
        num_qubits: usize,
        max_layers: usize,
        num_features: usize,
    ) -> PyResult<Self> {
        genome::Genome::from_bit_string(bits, num_qubits, max_layers, num_features)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn random(
        num_qubits: usize,
        max_layers: usize,
        num_features: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        genome::random_genome(num_qubits, max_layers, num_features, &mut rng)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn bits(&self) -> String {
        self.0.to_bit_string()
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn max_layers(&self) -> usize {
        self.0.max_layers()
    }

    #[getter]
    fn num_features(&self) -> usize {
        self.0.num_features()
    }

    fn decode(&self) -> PyCircuit {
        PyCircuit(genome::decode_genome(&self.0))
    }

    fn __len__(&self) -> usize {
        self.0.bits().len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "Genome(qubits={}, layers={}, features={}, bits='{}')",
            self.0.num_qubits(),
            self.0.max_layers(),
            self.0.num_features(),
            self.0.to_bit_string()
        )
    }
}

/// Decoded feature-map circuit.
#[pyclass(name = "Circuit", module = "qfm", frozen, from_py_object)]
#[derive(Clone)]
struct PyCircuit(CircuitSpec);

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CircuitSpec::from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn num_features(&self) -> usize {
        self.0.num_features()
    }

    /// `(n_local, n_cnot)`.
    fn gate_counts(&self) -> (usize, usize) {
        let c = count_gates(&self.0);
        (c.local, c.cnot)
    }

    fn size_metric(&self) -> f64 {
        let c = count_gates(&self.0);
        search::size_metric(c.local, c.cnot, self.0.num_qubits())
    }

    #[pyo3(signature = (x, y, mode = "real"))]
    fn kernel(&self, x: Vec<f64>, y: Vec<f64>, mode: &str) -> PyResult<f64> {
        QuantumKernel::new(self.0.clone())
            .with_mode(kernel_mode(mode)?)
            .evaluate(&x, &y)
            .map_err(err)
    }

    /// Kernel matrix between two point sets, as nested lists.
    #[pyo3(signature = (xs, ys = None, mode = "real"))]
    fn gram(
        &self,
        py: Python<'_>,
        xs: Vec<Vec<f64>>,
        ys: Option<Vec<Vec<f64>>>,
        mode: &str,
    ) -> PyResult<Vec<Vec<f64>>> {
        let kernel = QuantumKernel::new(self.0.clone()).with_mode(kernel_mode(mode)?);
        let g = py
            .detach(|| match &ys {
                Some(ys) => kernel.gram(&xs, ys),
                None => kernel.gram_square(&xs),
            })
            .map_err(err)?;
        Ok((0..g.rows()).map(|i| g.row(i).to_vec()).collect())
    }

    /// Qubit clusters connected by CNOTs.
    fn clusters(&self) -> Vec<Vec<usize>> {
        interpret::decompose(&self.0).clusters
    }

    fn __repr__(&self) -> String {
        let c = count_gates(&self.0);
        format!(
            "Circuit(qubits={}, features={}, local={}, cnot={})",
            self.0.num_qubits(),
            self.0.num_features(),
            c.local,
            c.cnot
        )
    }
}

/// Kernel SVM on a fixed circuit, one-vs-one for more than two classes.
#[pyclass(name = "QSVM", module = "qfm")]
struct PyQsvm {
    kernel: QuantumKernel,
    params: SvmParams,
    fitted: Option<(qsvm::TrainedMulticlassModel, Vec<Vec<f64>>)>,
}

#[pymethods]
impl PyQsvm {
    #[new]
    #[pyo3(signature = (circuit, c = 1.0, tol = 1e-3, mode = "real"))]
    fn new(circuit: &PyCircuit, c: f64, tol: f64, mode: &str) -> PyResult<Self> {
        Ok(Self {
            kernel: QuantumKernel::new(circuit.0.clone()).with_mode(kernel_mode(mode)?),
            params: SvmParams { c, tol },
            fitted: None,
        })
    }

    fn fit(&mut self, py: Python<'_>, x: Vec<Vec<f64>>, y: Vec<usize>) -> PyResult<()> {
        let model = py
            .detach(|| qsvm::fit(&self.kernel, &x, &y, &self.params))
            .map_err(err)?;
        self.fitted = Some((model, x));
        Ok(())
    }

    fn predict(&self, py: Python<'_>, x: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
        let (model, train) = self
            .fitted
            .as_ref()
            .ok_or_else(|| QfmError::new_err("QSVM is not fitted"))?;
        py.detach(|| qsvm::predict(model, &self.kernel, train, &x))
            .map_err(err)
    }

    fn score(&self, py: Python<'_>, x: Vec<Vec<f64>>, y: Vec<usize>) -> PyResult<f64> {
        let pred = self.predict(py, x)?;
        qsvm::accuracy(&pred, &y).map_err(err)
    }

    /// Number of pairwise binary models in the fitted ensemble.
    #[getter]
    fn num_models(&self) -> usize {
        self.fitted.as_ref().map_or(0, |(m, _)| m.pairwise.len())
    }
}

#[pyfunction]
#[pyo3(signature = (n, noise = 0.2, seed = 0))]
fn make_moons(n: usize, noise: f64, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<usize>)> {
    let d = data::make_moons(n, noise, seed).map_err(err)?;
    Ok((d.features, d.labels))
}

#[pyfunction]
#[pyo3(signature = (n, num_features, num_classes, cluster_std = 1.0, seed = 0))]
fn make_blobs(
    n: usize,
    num_features: usize,
    num_classes: usize,
    cluster_std: f64,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Vec<usize>)> {
    let d = data::make_blobs(n, num_features, num_classes, cluster_std, seed).map_err(err)?;
    Ok((d.features, d.labels))
}

#[pyfunction]
fn size_metric(n_local: usize, n_cnot: usize, n_qubits: usize) -> f64 {
    search::size_metric(n_local, n_cnot, n_qubits)
}

#[pyfunction]
fn weights_control(size_metric: f64, accuracy: f64) -> f64 {
    search::weights_control(size_metric, accuracy)
}

fn dataset(x: Vec<Vec<f64>>, y: Vec<usize>) -> PyResult<Dataset> {
    let k = y.iter().max().map_or(0, |m| m + 1);
    Dataset::new(x, y, (0..k).map(|c| c.to_string()).collect()).map_err(err)
}

/// Runs the genetic search and returns a dict with the best genome, its
/// circuit and objectives, the final front and the per-generation history.
#[pyfunction]
#[pyo3(signature = (
    x_train, y_train, x_test, y_test, *,
    num_qubits = 6, max_layers = 6, population = 100, offspring = 15, generations = 100,
    p_cross = 0.3, p_mut = 0.7, p_ind = 0.2, c = 1.0, tol = 1e-3, kernel = "real",
    objectives = "accuracy_wc", variation = "sequential", seed = 0, target_accuracy = None, patience = 200
))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    x_train: Vec<Vec<f64>>,
    y_train: Vec<usize>,
    x_test: Vec<Vec<f64>>,
    y_test: Vec<usize>,
    num_qubits: usize,
    max_layers: usize,
    population: usize,
    offspring: usize,
    generations: usize,
    p_cross: f64,
    p_mut: f64,
    p_ind: f64,
    c: f64,
    tol: f64,
    kernel: &str,
    objectives: &str,
    variation: &str,
    seed: u64,
    target_accuracy: Option<f64>,
    patience: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = EvolutionConfig {
        population_mu: population,
        offspring_lambda: offspring,
        generations,
        p_cross,
        p_mut,
        p_ind,
        num_qubits,
        max_layers,
        svm: SvmParams { c, tol },
        kernel_mode: kernel_mode(kernel)?,
        objectives: objectives.parse::<ObjectiveMode>().map_err(err)?,
        variation: variation.parse::<Variation>().map_err(err)?,
        seed,
        early_stop: target_accuracy.map(|target_accuracy| EarlyStop {
            target_accuracy,
            patience,
        }),
        ..EvolutionConfig::default()
    };
    let train = dataset(x_train, y_train)?;
    let test = dataset(x_test, y_test)?
        .align_classes(&train.class_names)
        .map_err(err)?;
    let result = py
        .detach(|| search::run(&config, &train, &test))
        .map_err(err)?;

    let best = result.best();
    let objs = best.objectives.expect("evaluated");
    let out = PyDict::new(py);
    out.set_item("genome", PyGenome(best.genome.clone()))?;
    out.set_item("circuit", PyCircuit(genome::decode_genome(&best.genome)))?;
    out.set_item("accuracy", objs.accuracy)?;
    out.set_item("size_metric", objs.size_metric)?;
    out.set_item("weights_control", objs.weights_control)?;
    let front: Vec<(PyGenome, f64, f64)> = result
        .front
        .iter()
        .map(|i| {
            let o = i.objectives.expect("evaluated");
            (PyGenome(i.genome.clone()), o.accuracy, o.size_metric)
        })
        .collect();
    out.set_item("front", front)?;
    let history: Vec<(usize, f64, f64, usize, f64)> = result
        .history
        .iter()
        .map(|h| {
            (
                h.generation,
                h.best_accuracy,
                h.best_sm,
                h.front_size,
                h.hypervolume,
            )
        })
        .collect();
    out.set_item("history", history)?;
    out.set_item("stopped_early", result.stopped_early)?;
    Ok(out)
}

#[pymodule]
fn qfm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QfmError", m.py().get_type::<QfmError>())?;
    m.add_class::<PyGenome>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyQsvm>()?;
    m.add_function(wrap_pyfunction!(make_moons, m)?)?;
    m.add_function(wrap_pyfunction!(make_blobs, m)?)?;
    m.add_function(wrap_pyfunction!(size_metric, m)?)?;
    m.add_function(wrap_pyfunction!(weights_control, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
