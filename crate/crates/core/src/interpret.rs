//! Splitting a circuit into qubit clusters that never interact.
//!
//! CNOTs are the only two-qubit gates, so qubits connected by no chain of
//! CNOTs evolve independently and the feature state is a tensor product of
//! cluster states. Each cluster then defines its own kernel, and training an
//! SVM on each factor shows what every cluster contributes.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{Dataset, Scaler};
use crate::error::{Error, Result};
use crate::genome::{CircuitSpec, Gate, GateSpec};
use crate::qsim::{feature_state, KernelMode, QuantumKernel};
use crate::qsvm::{self, SvmParams, TrainedMulticlassModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterDecomposition {
    /// Ascending qubit indices per cluster, clusters ordered by smallest qubit.
    pub clusters: Vec<Vec<usize>>,
    /// Gates of each cluster with qubits renumbered to positions in the cluster.
    pub sub_circuits: Vec<CircuitSpec>,
}

impl ClusterDecomposition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the graph with an edge `{j, (j+1) mod M}` per CNOT.
pub fn decompose(circuit: &CircuitSpec) -> ClusterDecomposition {
    let m = circuit.num_qubits();
    let mut parent: Vec<usize> = (0..m).collect();
    for g in circuit.gates().iter().filter(|g| g.is_cnot()) {
        let a = find(&mut parent, g.qubit);
        let b = find(&mut parent, circuit.cnot_target(g.qubit));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; m];
    let cluster_of: Vec<usize> = (0..m)
        .map(|q| {
            let r = find(&mut parent, q);
            let slot = *root_slot[r].get_or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[slot].push(q);
            slot
        })
        .collect();

    // A component is an arc of the CNOT ring, so renumbering by ascending
    // qubit keeps every target at (control + 1) mod cluster size.
    let mut gates: Vec<Vec<GateSpec>> = vec![Vec::new(); clusters.len()];
    for g in circuit.gates() {
        let k = cluster_of[g.qubit];
        let pos = clusters[k]
            .binary_search(&g.qubit)
            .expect("qubit in its cluster");
        if g.is_cnot() {
            let target = circuit.cnot_target(g.qubit);
            debug_assert_eq!(
                clusters[k].binary_search(&target).ok(),
                Some((pos + 1) % clusters[k].len())
            );
        }
        gates[k].push(GateSpec { qubit: pos, ..*g });
    }
    let sub_circuits = clusters
        .iter()
        .zip(gates)
        .map(|(qubits, gs)| {
            CircuitSpec::new(qubits.len(), circuit.num_features(), gs)
                .expect("sub-circuit of a valid circuit is valid")
        })
        .collect();
    ClusterDecomposition {
        clusters,
        sub_circuits,
    }
}

/// Full state rebuilt as the tensor product of the cluster states.
pub fn tensor_product_state(
    decomposition: &ClusterDecomposition,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    let m: usize = decomposition.clusters.iter().map(Vec::len).sum();
    let factors = decomposition
        .sub_circuits
        .iter()
        .map(|c| feature_state(c, x))
        .collect::<Result<Vec<_>>>()?;
    let amps = (0..1usize << m)
        .map(|index| {
            decomposition
                .clusters
                .iter()
                .zip(&factors)
                .map(|(qubits, state)| {
                    let sub = qubits
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (p, &q)| acc | (((index >> q) & 1) << p));
                    state.amplitudes()[sub]
                })
                .product()
        })
        .collect();
    Ok(amps)
}

/// Largest elementwise gap between the simulated state and the tensor product
/// of cluster states, over all `points`.
pub fn state_factorization_error(
    circuit: &CircuitSpec,
    decomposition: &ClusterDecomposition,
    points: &[Vec<f64>],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let full = feature_state(circuit, x)?;
        let product = tensor_product_state(decomposition, x)?;
        for (a, b) in full.amplitudes().iter().zip(&product) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Largest `|K_full - prod K_i|` over all pairs of `points` using the
/// real-part kernel. Nonzero values come from factor overlaps with an
/// imaginary part.
pub fn factor_kernel_check(
    circuit: &CircuitSpec,
    decomposition: &ClusterDecomposition,
    points: &[Vec<f64>],
) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::input("factor kernel check needs at least 2 points"));
    }
    let full = QuantumKernel::new(circuit.clone());
    let factors: Vec<QuantumKernel> = decomposition
        .sub_circuits
        .iter()
        .map(|c| QuantumKernel::new(c.clone()))
        .collect();
    let mut worst = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let k = full.evaluate(&points[i], &points[j])?;
            let mut prod = 1.0;
            for f in &factors {
                prod *= f.evaluate(&points[i], &points[j])?;
            }
            worst = worst.max((k - prod).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub predicted_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionGrid {
    pub resolution: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Row-major: `y` varies slowest.
    pub points: Vec<GridPoint>,
}

impl DecisionGrid {
    /// Rows `x,y,predicted_class`, class written by name.
    pub fn write_csv<W: Write>(&self, w: W, class_names: &[String]) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "y", "predicted_class"])?;
        for p in &self.points {
            let name = class_names
                .get(p.predicted_class)
                .cloned()
                .unwrap_or_else(|| p.predicted_class.to_string());
            out.write_record([p.x.to_string(), p.y.to_string(), name])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Class of the node nearest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> usize {
        self.points
            .iter()
            .min_by(|a, b| {
                let da = (a.x - x).powi(2) + (a.y - y).powi(2);
                let db = (b.x - x).powi(2) + (b.y - y).powi(2);
                da.total_cmp(&db)
            })
            .map(|p| p.predicted_class)
            .expect("grid has at least one node")
    }
}

/// Node coordinates: centers of a `resolution x resolution` tiling of the box.
pub fn grid_nodes(x_range: (f64, f64), y_range: (f64, f64), resolution: usize) -> Vec<(f64, f64)> {
    let at = |(lo, hi): (f64, f64), i: usize| lo + (i as f64 + 0.5) * (hi - lo) / resolution as f64;
    (0..resolution)
        .flat_map(|r| (0..resolution).map(move |c| (at(x_range, c), at(y_range, r))))
        .collect()
}

/// Classifies every grid node. Node coordinates are in the raw data space
/// and pass through `scaler` (when given) before prediction.
pub fn boundary_grid(
    model: &TrainedMulticlassModel,
    kernel: &QuantumKernel,
    train_x: &[Vec<f64>],
    x_range: (f64, f64),
    y_range: (f64, f64),
    resolution: usize,
    scaler: Option<&Scaler>,
) -> Result<DecisionGrid> {
    let d = kernel.circuit().num_features();
    if d != 2 {
        return Err(Error::UnsupportedDimension(format!(
            "decision grids need 2 features, data has {d}"
        )));
    }
    if resolution == 0 {
        return Err(Error::input("grid resolution must be at least 1"));
    }
    let nodes = grid_nodes(x_range, y_range, resolution);
    let inputs: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&(x, y)| match scaler {
            Some(s) => s.transform(&[x, y]),
            None => vec![x, y],
        })
        .collect();
    let predicted = qsvm::predict(model, kernel, train_x, &inputs)?;
    let points = nodes
        .into_iter()
        .zip(predicted)
        .map(|((x, y), predicted_class)| GridPoint {
            x,
            y,
            predicted_class,
        })
        .collect();
    Ok(DecisionGrid {
        resolution,
        x_range,
        y_range,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    /// Original qubit indices; all qubits for the full-circuit report.
    pub qubits: Vec<usize>,
    pub circuit: CircuitSpec,
    pub accuracy: f64,
    /// True when the sub-circuit has no gates and the majority class is reported.
    pub baseline: bool,
    #[serde(skip)]
    pub grid: Option<DecisionGrid>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterpretReport {
    pub full: ClusterReport,
    pub clusters: Vec<ClusterReport>,
    /// Largest state gap between the full simulation and the cluster product.
    pub state_factorization_error: f64,
    /// Largest real-part kernel gap; absent with fewer than two test points.
    pub factor_kernel_error: Option<f64>,
}

fn majority_class(labels: &[usize]) -> usize {
    let top = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; top];
    for &l in labels {
        counts[l] += 1;
    }
    // first class wins ties
    counts
        .iter()
        .enumerate()
        .fold(
            (0, 0),
            |best, (c, &n)| if n > best.1 { (c, n) } else { best },
        )
        .0
}

fn cluster_report(
    qubits: Vec<usize>,
    circuit: &CircuitSpec,
    train: &Dataset,
    test: &Dataset,
    params: &SvmParams,
    mode: KernelMode,
    grid: Option<(&GridSpec, Option<&Scaler>)>,
) -> Result<ClusterReport> {
    if circuit.gates().is_empty() {
        let majority = majority_class(&train.labels);
        let hits = test.labels.iter().filter(|&&l| l == majority).count();
        let grid = grid.map(|(g, _)| DecisionGrid {
            resolution: g.resolution,
            x_range: g.x_range,
            y_range: g.y_range,
            points: grid_nodes(g.x_range, g.y_range, g.resolution)
                .into_iter()
                .map(|(x, y)| GridPoint {
                    x,
                    y,
                    predicted_class: majority,
                })
                .collect(),
        });
        return Ok(ClusterReport {
            qubits,
            circuit: circuit.clone(),
            accuracy: hits as f64 / test.len().max(1) as f64,
            baseline: true,
            grid,
        });
    }
    let kernel = QuantumKernel::new(circuit.clone()).with_mode(mode);
    let model = qsvm::fit(&kernel, &train.features, &train.labels, params)?;
    let predicted = qsvm::predict(&model, &kernel, &train.features, &test.features)?;
    let accuracy = qsvm::accuracy(&predicted, &test.labels)?;
    let grid = match grid {
        Some((g, scaler)) => Some(boundary_grid(
            &model,
            &kernel,
            &train.features,
            g.x_range,
            g.y_range,
            g.resolution,
            scaler,
        )?),
        None => None,
    };
    Ok(ClusterReport {
        qubits,
        circuit: circuit.clone(),
        accuracy,
        baseline: false,
        grid,
    })
}

/// Trains an SVM on the full kernel and on each cluster kernel, scoring each
/// on `test`. Grids are produced only when `grid` is given (2-feature data).
pub fn per_cluster_report(
    circuit: &CircuitSpec,
    train: &Dataset,
    test: &Dataset,
    params: &SvmParams,
    mode: KernelMode,
    grid: Option<(&GridSpec, Option<&Scaler>)>,
) -> Result<InterpretReport> {
    if train.num_features() != circuit.num_features()
        || test.num_features() != circuit.num_features()
    {
        return Err(Error::input(format!(
            "circuit expects {} features, data has {}",
            circuit.num_features(),
            train.num_features()
        )));
    }
    let decomposition = decompose(circuit);
    let full = cluster_report(
        (0..circuit.num_qubits()).collect(),
        circuit,
        train,
        test,
        params,
        mode,
        grid,
    )?;
    let clusters = decomposition
        .clusters
        .par_iter()
        .zip(&decomposition.sub_circuits)
        .map(|(qubits, sub)| cluster_report(qubits.clone(), sub, train, test, params, mode, grid))
        .collect::<Result<Vec<_>>>()?;
    let state_factorization_error =
        state_factorization_error(circuit, &decomposition, &test.features)?;
    let factor_kernel_error = if test.len() >= 2 {
        Some(factor_kernel_check(
            circuit,
            &decomposition,
            &test.features,
        )?)
    } else {
        None
    };
    Ok(InterpretReport {
        full,
        clusters,
        state_factorization_error,
        factor_kernel_error,
    })
}

/// True for circuits whose state amplitudes are always real (H, Ry, CNOT only).
pub fn has_real_amplitudes(circuit: &CircuitSpec) -> bool {
    circuit.gates().iter().all(|g| match g.gate {
        Gate::Rotation { axis, .. } => axis == crate::genome::Axis::Y,
        _ => true,
    })
}
