//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use qfm_core::genome::{Axis, CircuitSpec, Gate};
use qfm_core::qsim::GramMatrix;
use qfm_core::qsvm::TrainedBinaryModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(axis: Axis) -> Matrix2<Complex64> {
    match axis {
        Axis::X => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Axis::Y => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Axis::Z => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    }
}

/// `exp(-i phi sigma) = cos(phi) I - i sin(phi) sigma` since sigma^2 = I.
pub fn rotation(axis: Axis, phi: f64) -> Matrix2<Complex64> {
    Matrix2::identity() * c(phi.cos(), 0.0) - pauli(axis) * c(0.0, phi.sin())
}

pub fn embed(u: &Matrix2<Complex64>, qubit: usize, m: usize) -> DMatrix<Complex64> {
    let dim = 1 << m;
    DMatrix::from_fn(dim, dim, |r, col| {
        if (r ^ col) & !(1 << qubit) != 0 {
            return c(0.0, 0.0);
        }
        u[((r >> qubit) & 1, (col >> qubit) & 1)]
    })
}

pub fn cnot_matrix(control: usize, target: usize, m: usize) -> DMatrix<Complex64> {
    let dim = 1 << m;
    DMatrix::from_fn(dim, dim, |r, col| {
        let image = if (col >> control) & 1 == 1 {
            col ^ (1 << target)
        } else {
            col
        };
        if r == image {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn dense_state(circuit: &CircuitSpec, x: &[f64]) -> DVector<Complex64> {
    let m = circuit.num_qubits();
    let mut psi = DVector::from_element(1 << m, c(0.0, 0.0));
    psi[0] = c(1.0, 0.0);
    let h = Matrix2::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0))
        * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for g in circuit.gates() {
        let u = match g.gate {
            Gate::Identity => continue,
            Gate::Hadamard => embed(&h, g.qubit, m),
            Gate::Cnot => cnot_matrix(g.qubit, (g.qubit + 1) % m, m),
            Gate::Rotation {
                axis,
                theta,
                feature,
            } => embed(&rotation(axis, theta * x[feature]), g.qubit, m),
        };
        psi = u * psi;
    }
    psi
}

pub fn dense_kernel(circuit: &CircuitSpec, x: &[f64], y: &[f64]) -> f64 {
    dense_state(circuit, x).dotc(&dense_state(circuit, y)).re
}

pub struct Problem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
}

impl Problem {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=20);
        let k = rng.random_range(1..=5);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let mut y: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let c = [0.1, 1.0, 10.0][rng.random_range(0..3)];
        Self { x, y, c }
    }

    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(p, q)| p * q).sum()
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::from_fn(self.x.len(), self.x.len(), |i, j| {
            Self::dot(&self.x[i], &self.x[j])
        })
    }

    pub fn q(&self) -> DMatrix<f64> {
        let n = self.x.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.y[i] * self.y[j] * Self::dot(&self.x[i], &self.x[j])
        })
    }
}

/// Euclidean projection onto `{0 <= a <= c, y.a = 0}` by bisection on the
/// multiplier of the equality constraint.
pub fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let residual = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };
    let bound = v.iter().map(|t| t.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// FISTA on `min 1/2 a^T Q a - 1^T a`; returns alpha.
pub fn oracle_alpha(p: &Problem) -> Vec<f64> {
    let q = p.q();
    let n = p.y.len();
    let lipschitz = q.symmetric_eigenvalues().max().max(1e-12);
    let step = 1.0 / lipschitz;
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..100_000 {
        let zv = nalgebra::DVector::from_column_slice(&z);
        let grad = &q * &zv - nalgebra::DVector::from_element(n, 1.0);
        let v: Vec<f64> = (0..n).map(|i| z[i] - step * grad[i]).collect();
        let next = project(&v, &p.y, p.c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = (0..n)
            .map(|i| next[i] + (t - 1.0) / t_next * (next[i] - a[i]))
            .collect();
        a = next;
        t = t_next;
    }
    a
}

pub fn dual_objective(q: &DMatrix<f64>, a: &[f64]) -> f64 {
    let av = nalgebra::DVector::from_column_slice(a);
    av.sum() - 0.5 * (av.transpose() * q * &av)[(0, 0)]
}

/// Bias from the oracle alpha using the same free-vector rule as the solver.
pub fn oracle_bias(p: &Problem, a: &[f64]) -> f64 {
    let n = a.len();
    let f = |i: usize| {
        (0..n)
            .map(|j| a[j] * p.y[j] * Problem::dot(&p.x[i], &p.x[j]))
            .sum::<f64>()
    };
    let eps = 1e-7 * p.c;
    let free: Vec<f64> = (0..n)
        .filter(|&i| a[i] > eps && a[i] < p.c - eps)
        .map(|i| p.y[i] - f(i))
        .collect();
    if !free.is_empty() {
        return free.iter().sum::<f64>() / free.len() as f64;
    }
    let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &ai) in a.iter().enumerate() {
        let r = p.y[i] - f(i);
        let at_upper = ai >= p.c - eps;
        // b must satisfy y_i (f_i + b) >= 1 at zero alpha, <= 1 at C
        if (p.y[i] > 0.0) != at_upper {
            lb = lb.max(r);
        } else {
            ub = ub.min(r);
        }
    }
    match (lb.is_finite(), ub.is_finite()) {
        (true, true) => 0.5 * (lb + ub),
        (true, false) => lb,
        (false, true) => ub,
        _ => 0.0,
    }
}

pub fn smo_alpha(model: &TrainedBinaryModel, y: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0; y.len()];
    for (&i, &coef) in model.support_indices.iter().zip(&model.dual_coefs) {
        a[i] = coef * y[i];
    }
    a
}
