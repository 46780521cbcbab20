//! Support vector classification on precomputed kernel matrices.
//!
//! Binary problems are solved in the dual with sequential minimal
//! optimization. The first index of each working pair is the maximal KKT
//! violator and the second uses second-order gain, as in LIBSVM. Iteration
//! stops once the maximal violation falls below `tol`. More than two classes
//! are handled one-vs-one.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{GramMatrix, QuantumKernel};

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint `C`.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, tol: 1e-3 }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::config(format!(
                "SVM C must be positive, got {}",
                self.c
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config(format!(
                "SVM tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBinaryModel {
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    /// Indices of the support vectors in the training set.
    pub support_indices: Vec<usize>,
    pub bias: f64,
    pub regularization: f64,
    /// `sum(alpha) - 1/2 alpha^T Q alpha` at the returned solution.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl TrainedBinaryModel {
    /// `|sum_i alpha_i y_i|`, zero at a feasible dual point.
    pub fn equality_residual(&self) -> f64 {
        self.dual_coefs.iter().sum::<f64>().abs()
    }

    /// Whether every `alpha_i` lies in `[0, C]` (up to `slack`).
    pub fn within_box(&self, slack: f64) -> bool {
        self.dual_coefs
            .iter()
            .all(|c| c.abs() <= self.regularization + slack)
    }

    /// Decision value from a row of kernel values against the *whole*
    /// training set the model was fitted on.
    pub fn decision_from_train_row(&self, k_train: &[f64]) -> f64 {
        self.dual_coefs
            .iter()
            .zip(&self.support_indices)
            .map(|(c, &s)| c * k_train[s])
            .sum::<f64>()
            + self.bias
    }
}

/// `sum_i beta_i y_i K(x_i, x) + b` where `k_row` holds the kernel values
/// against the support vectors, in `support_indices` order.
pub fn decision_function(model: &TrainedBinaryModel, k_row: &[f64]) -> Result<f64> {
    if k_row.len() != model.dual_coefs.len() {
        return Err(Error::input(format!(
            "kernel row has {} values, model has {} support vectors",
            k_row.len(),
            model.dual_coefs.len()
        )));
    }
    Ok(model
        .dual_coefs
        .iter()
        .zip(k_row)
        .map(|(c, k)| c * k)
        .sum::<f64>()
        + model.bias)
}

/// Solves the C-SVC dual for labels in `{+1, -1}` on a square Gram matrix.
pub fn solve_binary(
    gram: &GramMatrix,
    y: &[f64],
    params: &SvmParams,
) -> Result<TrainedBinaryModel> {
    params.validate()?;
    if !gram.is_square() {
        return Err(Error::input(format!(
            "gram matrix must be square, got {}x{}",
            gram.rows(),
            gram.cols()
        )));
    }
    let n = gram.rows();
    if y.len() != n {
        return Err(Error::input(format!(
            "{} labels for a {n}x{n} gram matrix",
            y.len()
        )));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::input(format!(
            "binary labels must be +1 or -1, found {bad}"
        )));
    }
    if n < 2 || !y.contains(&1.0) || !y.contains(&-1.0) {
        return Err(Error::DegenerateData(
            "binary training needs at least one point of each class".into(),
        ));
    }

    let c = params.c;
    let q: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            y[i] * y[j] * gram.get(i, j)
        })
        .collect();
    let qd: Vec<f64> = (0..n).map(|i| q[i * n + i]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];

    let max_iter = (100 * n).max(10_000_000);
    let mut iterations = 0;
    while iterations < max_iter {
        let Some((i, j)) = select_working_set(&alpha, &grad, y, &q, &qd, c, params.tol) else {
            break;
        };
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let qij = q[i * n + j];
        if y[i] != y[j] {
            let quad = positive(qd[i] + qd[j] + 2.0 * qij);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = positive(qd[i] + qd[j] - 2.0 * qij);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        let (qi, qj) = (&q[i * n..(i + 1) * n], &q[j * n..(j + 1) * n]);
        for k in 0..n {
            grad[k] += qi[k] * dai + qj[k] * daj;
        }
    }
    if iterations == max_iter {
        log::warn!("SMO stopped at the iteration limit ({max_iter}) before reaching tol");
    }

    let bias = compute_bias(&alpha, &grad, y, c);
    let dual_objective = alpha
        .iter()
        .zip(&grad)
        .map(|(a, g)| 0.5 * a * (1.0 - g))
        .sum();
    let (support_indices, dual_coefs) = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(i, &a)| (i, a * y[i]))
        .unzip();

    Ok(TrainedBinaryModel {
        dual_coefs,
        support_indices,
        bias,
        regularization: c,
        dual_objective,
        iterations,
    })
}

fn positive(quad: f64) -> f64 {
    if quad > 0.0 {
        quad
    } else {
        TAU
    }
}

// `i` is the maximal violator; `j` maximizes the second-order decrease of the
// dual among violating partners. None once the maximal violation drops below tol.
fn select_working_set(
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    q: &[f64],
    qd: &[f64],
    c: f64,
    tol: f64,
) -> Option<(usize, usize)> {
    let n = alpha.len();
    let in_up = |t: usize| (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
    let in_low = |t: usize| (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);

    let mut gmax = f64::NEG_INFINITY;
    let mut i_sel = None;
    for t in (0..n).filter(|&t| in_up(t)) {
        let v = -y[t] * grad[t];
        if v > gmax {
            gmax = v;
            i_sel = Some(t);
        }
    }
    let i = i_sel?;
    let qi = &q[i * n..(i + 1) * n];

    let mut gmax2 = f64::NEG_INFINITY;
    let mut best_gain = f64::INFINITY;
    let mut j_sel = None;
    for t in (0..n).filter(|&t| in_low(t)) {
        let v = y[t] * grad[t];
        gmax2 = gmax2.max(v);
        let b = gmax + v;
        if b > 0.0 {
            let a = positive(qd[i] + qd[t] - 2.0 * y[i] * y[t] * qi[t]);
            let gain = -(b * b) / a;
            if gain <= best_gain {
                best_gain = gain;
                j_sel = Some(t);
            }
        }
    }
    match j_sel {
        Some(j) if gmax + gmax2 >= tol => Some((i, j)),
        _ => None,
    }
}

fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        match (ub.is_finite(), lb.is_finite()) {
            (true, true) => 0.5 * (ub + lb),
            (true, false) => ub,
            (false, true) => lb,
            (false, false) => 0.0,
        }
    };
    -rho
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseModel {
    /// Class predicted for positive decision values.
    pub positive: usize,
    pub negative: usize,
    pub model: TrainedBinaryModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedMulticlassModel {
    /// Distinct class ids seen in training, ascending.
    pub classes: Vec<usize>,
    /// One model per class pair `(a, b)` with `a < b`, in lexicographic order.
    /// Support indices refer to the full training set.
    pub pairwise: Vec<PairwiseModel>,
}

impl TrainedMulticlassModel {
    pub fn pair(&self, a: usize, b: usize) -> Option<&PairwiseModel> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.pairwise
            .iter()
            .find(|p| p.positive == lo && p.negative == hi)
    }

    pub fn models(&self) -> impl Iterator<Item = &TrainedBinaryModel> {
        self.pairwise.iter().map(|p| &p.model)
    }

    /// Support counts, bias and C per pair as JSON.
    pub fn summary_json(&self, class_names: &[String]) -> serde_json::Value {
        let name = |c: usize| class_names.get(c).cloned().unwrap_or_else(|| c.to_string());
        let pairs: Vec<serde_json::Value> = self
            .pairwise
            .iter()
            .map(|p| {
                serde_json::json!({
                    "positive_class": name(p.positive),
                    "negative_class": name(p.negative),
                    "n_support": p.model.support_indices.len(),
                    "bias": p.model.bias,
                    "c": p.model.regularization,
                    "dual_objective": p.model.dual_objective,
                    "iterations": p.model.iterations,
                })
            })
            .collect();
        serde_json::json!({
            "classes": self.classes.iter().map(|&c| name(c)).collect::<Vec<_>>(),
            "pairwise_models": pairs,
        })
    }
}

/// One-vs-one training on a precomputed square training Gram matrix.
pub fn fit_precomputed(
    gram: &GramMatrix,
    labels: &[usize],
    params: &SvmParams,
) -> Result<TrainedMulticlassModel> {
    if !gram.is_square() || gram.rows() != labels.len() {
        return Err(Error::input(format!(
            "gram matrix {}x{} does not match {} labels",
            gram.rows(),
            gram.cols(),
            labels.len()
        )));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "training set has {} class(es), need at least 2",
            classes.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = classes
        .iter()
        .enumerate()
        .flat_map(|(k, &a)| classes[k + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let pairwise = pairs
        .par_iter()
        .map(|&(a, b)| {
            let idx: Vec<usize> = (0..labels.len())
                .filter(|&i| labels[i] == a || labels[i] == b)
                .collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| if labels[i] == a { 1.0 } else { -1.0 })
                .collect();
            let mut model = solve_binary(&gram.select(&idx), &y, params)?;
            for s in &mut model.support_indices {
                *s = idx[*s];
            }
            Ok(PairwiseModel {
                positive: a,
                negative: b,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainedMulticlassModel { classes, pairwise })
}

/// Votes per query row of `k_query_train` (queries x training points).
/// Ties go to the class with the largest summed decision value, then to the
/// lowest class id.
pub fn predict_precomputed(
    model: &TrainedMulticlassModel,
    k_query_train: &GramMatrix,
) -> Vec<usize> {
    let max_class = model.classes.iter().copied().max().unwrap_or(0);
    (0..k_query_train.rows())
        .map(|r| {
            let row = k_query_train.row(r);
            let mut votes = vec![0usize; max_class + 1];
            let mut sums = vec![0.0f64; max_class + 1];
            for p in &model.pairwise {
                let f = p.model.decision_from_train_row(row);
                if f > 0.0 {
                    votes[p.positive] += 1;
                } else {
                    votes[p.negative] += 1;
                }
                sums[p.positive] += f;
                sums[p.negative] -= f;
            }
            let mut best = model.classes[0];
            for &c in &model.classes[1..] {
                if votes[c] > votes[best] || (votes[c] == votes[best] && sums[c] > sums[best]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Builds the training Gram once through the simulator, then trains one
/// binary model per class pair.
pub fn fit(
    kernel: &QuantumKernel,
    train_x: &[Vec<f64>],
    train_y: &[usize],
    params: &SvmParams,
) -> Result<TrainedMulticlassModel> {
    if train_x.len() != train_y.len() {
        return Err(Error::input(format!(
            "{} training rows but {} labels",
            train_x.len(),
            train_y.len()
        )));
    }
    let gram = kernel.gram_square(train_x)?;
    fit_precomputed(&gram, train_y, params)
}

pub fn predict(
    model: &TrainedMulticlassModel,
    kernel: &QuantumKernel,
    train_x: &[Vec<f64>],
    query_x: &[Vec<f64>],
) -> Result<Vec<usize>> {
    if query_x.is_empty() {
        return Ok(Vec::new());
    }
    let k = kernel.gram(query_x, train_x)?;
    Ok(predict_precomputed(model, &k))
}

/// Fraction of positions where `predicted` equals `actual`.
pub fn accuracy<T: PartialEq>(predicted: &[T], actual: &[T]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != actual.len() {
        return Err(Error::input(format!(
            "accuracy needs equal nonempty sequences, got {} and {}",
            predicted.len(),
            actual.len()
        )));
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Rows are true classes, columns predicted classes, both in `classes` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<usize>,
    pub counts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn off_diagonal(&self) -> usize {
        self.total() - self.trace()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    pub fn class_metrics(&self) -> Vec<ClassMetrics> {
        let k = self.classes.len();
        (0..k)
            .map(|i| {
                let tp = self.counts[i][i] as f64;
                let support: usize = self.counts[i].iter().sum();
                let predicted: usize = (0..k).map(|r| self.counts[r][i]).sum();
                let ratio = |num: f64, den: usize| if den == 0 { 0.0 } else { num / den as f64 };
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    class: self.classes[i],
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W, class_names: &[String]) -> Result<()> {
        let name = |c: usize| class_names.get(c).cloned().unwrap_or_else(|| c.to_string());
        let header: Vec<String> = self.classes.iter().map(|&c| name(c)).collect();
        writeln!(w, "true\\predicted,{}", header.join(","))?;
        for (i, row) in self.counts.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{},{}", name(self.classes[i]), cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_metrics_csv<W: Write>(&self, mut w: W, class_names: &[String]) -> Result<()> {
        writeln!(w, "class,precision,recall,f1,support")?;
        for m in self.class_metrics() {
            let name = class_names
                .get(m.class)
                .cloned()
                .unwrap_or_else(|| m.class.to_string());
            writeln!(
                w,
                "{name},{},{},{},{}",
                m.precision, m.recall, m.f1, m.support
            )?;
        }
        Ok(())
    }
}

pub fn confusion(
    predicted: &[usize],
    actual: &[usize],
    classes: &[usize],
) -> Result<ConfusionMatrix> {
    if classes.is_empty() {
        return Err(Error::input("confusion matrix needs at least one class"));
    }
    if predicted.len() != actual.len() {
        return Err(Error::input(format!(
            "{} predictions for {} labels",
            predicted.len(),
            actual.len()
        )));
    }
    let pos = |label: usize| {
        classes
            .iter()
            .position(|&c| c == label)
            .ok_or_else(|| Error::input(format!("label {label} is not among the known classes")))
    };
    let mut counts = vec![vec![0usize; classes.len()]; classes.len()];
    for (&p, &a) in predicted.iter().zip(actual) {
        counts[pos(a)?][pos(p)?] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity2() -> GramMatrix {
        GramMatrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn two_orthogonal_points() {
        // dual: max a1 + a2 - (a1^2 + a2^2)/2 with a1 = a2 -> a = 1, b = 0
        let m = solve_binary(
            &identity2(),
            &[1.0, -1.0],
            &SvmParams { c: 10.0, tol: 1e-9 },
        )
        .unwrap();
        assert_eq!(m.support_indices, vec![0, 1]);
        assert!((m.dual_coefs[0] - 1.0).abs() < 1e-9);
        assert!((m.dual_coefs[1] + 1.0).abs() < 1e-9);
        assert!(m.bias.abs() < 1e-9);
        assert!((m.dual_objective - 1.0).abs() < 1e-9);
        let f0 = m.decision_from_train_row(&[1.0, 0.0]);
        let f1 = m.decision_from_train_row(&[0.0, 1.0]);
        assert!(f0 > 0.0 && f1 < 0.0);
        assert!((f0 - 1.0).abs() < 1e-9 && (f1 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_alphas_with_small_c() {
        let m = solve_binary(&identity2(), &[1.0, -1.0], &SvmParams { c: 0.5, tol: 1e-9 }).unwrap();
        assert!(m.within_box(0.0));
        assert!((m.dual_coefs[0] - 0.5).abs() < 1e-12);
        assert!(m.equality_residual() < 1e-12);
    }

    #[test]
    fn single_class_is_degenerate() {
        let g = identity2();
        assert!(matches!(
            solve_binary(&g, &[1.0, 1.0], &SvmParams::default()),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            fit_precomputed(&g, &[3, 3], &SvmParams::default()),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn non_square_gram_is_rejected() {
        let g = GramMatrix::from_vec(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(
            solve_binary(&g, &[1.0, -1.0], &SvmParams::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn all_ones_gram_predicts_majority() {
        let g = GramMatrix::from_fn(5, 5, |_, _| 1.0);
        let y = [1.0, 1.0, 1.0, -1.0, -1.0];
        let m = solve_binary(&g, &y, &SvmParams::default()).unwrap();
        assert!(m.equality_residual() < 1e-12);
        // f is constant and equal to the bias
        assert!(m.decision_from_train_row(&[1.0; 5]) > 0.0);
    }

    #[test]
    fn decision_function_length_and_bias() {
        let m = TrainedBinaryModel {
            dual_coefs: vec![0.0, 0.0],
            support_indices: vec![0, 3],
            bias: 0.5,
            regularization: 1.0,
            dual_objective: 0.0,
            iterations: 0,
        };
        assert_eq!(decision_function(&m, &[0.3, -2.0]).unwrap(), 0.5);
        assert!(decision_function(&m, &[0.3]).is_err());
    }

    #[test]
    fn non_bound_support_vectors_sit_on_the_margin() {
        // linear kernel on four 1-D points
        let x = [-2.0, -1.0, 1.0, 2.5];
        let y = [-1.0, -1.0, 1.0, 1.0];
        let g = GramMatrix::from_fn(4, 4, |i, j| x[i] * x[j]);
        let m = solve_binary(
            &g,
            &y,
            &SvmParams {
                c: 100.0,
                tol: 1e-10,
            },
        )
        .unwrap();
        for (k, &s) in m.support_indices.iter().enumerate() {
            if m.dual_coefs[k].abs() < m.regularization {
                let f = m.decision_from_train_row(g.row(s));
                assert!((f.abs() - 1.0).abs() < 1e-6, "f = {f}");
            }
        }
    }

    #[test]
    fn one_vs_one_counts_and_ordering() {
        // three well separated 1-D clusters under a gaussian kernel
        let x: Vec<f64> = vec![0.0, 0.1, 5.0, 5.1, 10.0, 10.1];
        let labels = vec![2, 2, 0, 0, 1, 1];
        let g = GramMatrix::from_fn(6, 6, |i, j| (-(x[i] - x[j]).powi(2)).exp());
        let m = fit_precomputed(&g, &labels, &SvmParams::default()).unwrap();
        assert_eq!(m.classes, vec![0, 1, 2]);
        assert_eq!(m.pairwise.len(), 3);
        assert!(m.pair(2, 0).is_some());
        let pred = predict_precomputed(&m, &g);
        assert_eq!(pred, labels);
        let again = fit_precomputed(&g, &labels, &SvmParams::default()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn accuracy_values() {
        let actual: Vec<usize> = (0..500).map(|i| i % 2).collect();
        let mut predicted = actual.clone();
        for p in predicted.iter_mut().take(27) {
            *p = 1 - *p;
        }
        assert_eq!(accuracy(&predicted, &actual).unwrap(), 0.946);
        assert_eq!(accuracy(&actual, &actual).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert!(accuracy::<usize>(&[], &[]).is_err());

        let cm = confusion(&predicted, &actual, &[0, 1]).unwrap();
        assert_eq!(cm.total(), 500);
        assert_eq!(cm.off_diagonal(), 27);
        assert_eq!(cm.accuracy(), 0.946);
    }

    #[test]
    fn confusion_edge_cases() {
        let cm = confusion(&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(confusion(&[0], &[0], &[]).is_err());
        assert!(confusion(&[5], &[0], &[0, 1]).is_err());
        let metrics = cm.class_metrics();
        assert!(metrics.iter().all(|m| m.f1 == 1.0 && m.support == 1));
    }

    #[test]
    fn confusion_csv_layout() {
        let cm = confusion(&[0, 1, 1], &[0, 0, 1], &[0, 1]).unwrap();
        let mut buf = Vec::new();
        cm.write_csv(&mut buf, &["a".into(), "b".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "true\\predicted,a,b\na,1,1\nb,0,1\n");
    }
}
