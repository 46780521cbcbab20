//! Statevector simulation of feature-map circuits and the quantum kernel.
//!
//! Qubit `j` is bit `j` of the amplitude index (little-endian). Gates are
//! applied in place with bit-indexed strides, so a local gate costs `O(2^M)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Axis, CircuitSpec, Gate, GateSpec};

pub const DEFAULT_MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>` accumulated in index order.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            re += a.re * b.re + a.im * b.im;
            im += a.re * b.im - a.im * b.re;
        }
        Complex64::new(re, im)
    }

    /// Applies one gate of a circuit on `num_qubits` qubits, reading features from `x`.
    pub fn apply(&mut self, gate: &GateSpec, x: &[f64]) {
        let q = gate.qubit;
        match gate.gate {
            Gate::Identity => {}
            Gate::Hadamard => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let h = Complex64::new(h, 0.0);
                self.apply_local(q, [[h, h], [h, -h]]);
            }
            Gate::Cnot => {
                let target = (q + 1) % self.num_qubits;
                self.apply_cnot(q, target);
            }
            Gate::Rotation {
                axis,
                theta,
                feature,
            } => {
                // exp(-i phi sigma) = cos(phi) I - i sin(phi) sigma
                let phi = theta * x[feature];
                let (s, c) = phi.sin_cos();
                let zero = Complex64::new(0.0, 0.0);
                match axis {
                    Axis::X => {
                        let cc = Complex64::new(c, 0.0);
                        let ms = Complex64::new(0.0, -s);
                        self.apply_local(q, [[cc, ms], [ms, cc]]);
                    }
                    Axis::Y => {
                        let cc = Complex64::new(c, 0.0);
                        self.apply_local(
                            q,
                            [[cc, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), cc]],
                        );
                    }
                    Axis::Z => {
                        let lo = Complex64::new(c, -s);
                        let hi = Complex64::new(c, s);
                        self.apply_local(q, [[lo, zero], [zero, hi]]);
                    }
                }
            }
        }
    }

    fn apply_local(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let stride = 1usize << qubit;
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i + stride];
                self.amplitudes[i] = u[0][0] * a + u[0][1] * b;
                self.amplitudes[i + stride] = u[1][0] * a + u[1][1] * b;
            }
            base += 2 * stride;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }
}

/// Which overlap functional turns two feature states into a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    /// `Re <phi(x)|phi(x')>`
    #[default]
    Real,
    /// `|<phi(x)|phi(x')>|^2`
    Squared,
}

impl KernelMode {
    fn value(self, overlap: Complex64) -> f64 {
        match self {
            KernelMode::Real => overlap.re.clamp(-1.0, 1.0),
            KernelMode::Squared => {
                (overlap.re * overlap.re + overlap.im * overlap.im).clamp(0.0, 1.0)
            }
        }
    }
}

impl FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" | "real-part" => Ok(KernelMode::Real),
            "squared" => Ok(KernelMode::Squared),
            other => Err(Error::config(format!(
                "unknown kernel mode '{other}' (expected 'real' or 'squared')"
            ))),
        }
    }
}

impl fmt::Display for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelMode::Real => "real",
            KernelMode::Squared => "squared",
        })
    }
}

/// Dense kernel matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl GramMatrix {
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::input(format!(
                "gram matrix of {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Self { values, rows, cols })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { values, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Principal submatrix on `idx` (rows and columns).
    pub fn select(&self, idx: &[usize]) -> GramMatrix {
        GramMatrix::from_fn(idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Row-major CSV, full precision, no header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// A circuit bound to a kernel mode and a simulator qubit cap.
#[derive(Debug, Clone)]
pub struct QuantumKernel {
    circuit: CircuitSpec,
    mode: KernelMode,
    max_qubits: usize,
}

impl QuantumKernel {
    pub fn new(circuit: CircuitSpec) -> Self {
        Self {
            circuit,
            mode: KernelMode::Real,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_qubits(mut self, cap: usize) -> Self {
        self.max_qubits = cap;
        self
    }

    pub fn circuit(&self) -> &CircuitSpec {
        &self.circuit
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        let c = &self.circuit;
        if x.len() != c.num_features() {
            return Err(Error::input(format!(
                "feature vector has length {}, circuit expects {}",
                x.len(),
                c.num_features()
            )));
        }
        if c.num_qubits() > self.max_qubits {
            return Err(Error::Capacity {
                requested: c.num_qubits(),
                cap: self.max_qubits,
            });
        }
        let mut psi = StateVector::zero(c.num_qubits());
        for g in c.gates() {
            psi.apply(g, x);
        }
        Ok(psi)
    }

    pub fn states(&self, points: &[Vec<f64>]) -> Result<Vec<StateVector>> {
        points.par_iter().map(|x| self.state(x)).collect()
    }

    pub fn evaluate(&self, x: &[f64], x_prime: &[f64]) -> Result<f64> {
        let a = self.state(x)?;
        let b = self.state(x_prime)?;
        Ok(self.mode.value(a.inner(&b)))
    }

    /// Kernel between state lists; each entry uses the same sequential
    /// arithmetic regardless of how rows are scheduled.
    pub fn gram_from_states(&self, rows: &[StateVector], cols: &[StateVector]) -> GramMatrix {
        let ncols = cols.len();
        let values: Vec<f64> = rows
            .par_iter()
            .flat_map_iter(|a| cols.iter().map(move |b| self.mode.value(a.inner(b))))
            .collect();
        GramMatrix {
            values,
            rows: rows.len(),
            cols: ncols,
        }
    }

    pub fn gram(&self, rows: &[Vec<f64>], cols: &[Vec<f64>]) -> Result<GramMatrix> {
        let rs = self.states(rows)?;
        let cs = self.states(cols)?;
        Ok(self.gram_from_states(&rs, &cs))
    }

    /// Square Gram over one point set; each state is simulated once.
    pub fn gram_square(&self, points: &[Vec<f64>]) -> Result<GramMatrix> {
        let s = self.states(points)?;
        Ok(self.gram_from_states(&s, &s))
    }
}

pub fn feature_state(circuit: &CircuitSpec, x: &[f64]) -> Result<StateVector> {
    QuantumKernel::new(circuit.clone()).state(x)
}

/// `Re <phi(x)|phi(x')>`, clamped to `[-1, 1]`.
pub fn kernel(circuit: &CircuitSpec, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    QuantumKernel::new(circuit.clone()).evaluate(x, x_prime)
}

/// `|<phi(x)|phi(x')>|^2`.
pub fn kernel_squared(circuit: &CircuitSpec, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    QuantumKernel::new(circuit.clone())
        .with_mode(KernelMode::Squared)
        .evaluate(x, x_prime)
}

pub fn gram_matrix(
    circuit: &CircuitSpec,
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
) -> Result<GramMatrix> {
    QuantumKernel::new(circuit.clone()).gram(rows, cols)
}
