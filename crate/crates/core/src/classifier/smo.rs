//! Binary soft-margin SVM trained by sequential minimal optimization.
//!
//! The solver follows the simplified SMO scheme: sweep the training
//! points, and for each KKT violator pick a random second index (seeded)
//! and solve the two-variable subproblem analytically. Convergence is
//! declared after `max_passes` consecutive clean sweeps, re-checked
//! against freshly computed errors; the total sweep budget bounds
//! runtime on hard problems, returning the best iterate with a flag.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use super::ClassifierError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    pub kernel: Kernel,
    /// Soft-margin penalty. Must be positive.
    pub c: f64,
    /// KKT violation tolerance.
    pub tolerance: f64,
    /// Consecutive violation-free sweeps required to stop.
    pub max_passes: usize,
    /// Hard budget on total sweeps.
    pub max_sweeps: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            kernel: Kernel::Linear,
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 3,
            max_sweeps: 2000,
        }
    }
}

/// Dual solution of one binary subproblem.
#[derive(Debug, Clone)]
pub struct PairSolution {
    /// Support vectors (rows with alpha > threshold).
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub converged: bool,
    /// Full alpha vector in training order (support threshold not yet
    /// applied); used by diagnostics and tests.
    pub alphas: Vec<f64>,
}

impl PairSolution {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Kernel matrix cached densely up to this many rows; beyond it, rows
/// are recomputed on demand.
const DENSE_KERNEL_LIMIT: usize = 3000;

struct KernelEval<'a> {
    x: &'a [Vec<f64>],
    kernel: Kernel,
    dense: Option<Vec<f64>>,
    n: usize,
}

impl<'a> KernelEval<'a> {
    fn new(x: &'a [Vec<f64>], kernel: Kernel) -> Self {
        let n = x.len();
        let dense = if n <= DENSE_KERNEL_LIMIT {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval(&x[i], &x[j]);
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            Some(m)
        } else {
            None
        };
        KernelEval { x, kernel, dense, n }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(m) => m[i * self.n + j],
            None => self.kernel.eval(&self.x[i], &self.x[j]),
        }
    }
}

/// Train one binary sub-model on labels in {-1, +1}.
///
/// `c_by_label` gives the box constraint per class: `(C for y = +1,
/// C for y = -1)`; equal values reproduce the unweighted machine.
pub fn train_pair_smo(
    x: &[Vec<f64>],
    y: &[f64],
    params: &SmoParams,
    c_by_label: (f64, f64),
    seed: u64,
) -> Result<PairSolution, ClassifierError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(ClassifierError::InvalidInput(
            "empty or mismatched training arrays".to_string(),
        ));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(ClassifierError::InvalidInput(
            "labels must be -1 or +1".to_string(),
        ));
    }
    if !y.contains(&1.0) || !y.contains(&-1.0) {
        return Err(ClassifierError::InvalidInput(
            "both labels must be present".to_string(),
        ));
    }
    if params.c <= 0.0 || c_by_label.0 <= 0.0 || c_by_label.1 <= 0.0 {
        return Err(ClassifierError::InvalidInput("C must be positive".to_string()));
    }

    let n = x.len();
    let kmat = KernelEval::new(x, params.kernel);
    let c_of = |i: usize| if y[i] > 0.0 { c_by_label.0 } else { c_by_label.1 };
    let tol = params.tolerance;

    let mut alphas = vec![0.0f64; n];
    let mut bias = 0.0f64;
    // error cache: E_i = f(x_i) - y_i, maintained incrementally
    let mut errors: Vec<f64> = y.iter().map(|&yi| -yi).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut clean_passes = 0usize;
    let mut sweeps = 0usize;
    let mut converged = false;

    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut changed = 0usize;
        for i in 0..n {
            let e_i = errors[i];
            let r = y[i] * e_i;
            let violates = (r < -tol && alphas[i] < c_of(i)) || (r > tol && alphas[i] > 0.0);
            if !violates {
                continue;
            }
            // random second index; if that pair cannot move, scan the
            // rest from the same random start so a movable partner is
            // never missed
            let start = {
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                j
            };
            for offset in 0..n {
                let j = (start + offset) % n;
                if j == i {
                    continue;
                }
                if step(
                    i, j, x, y, &kmat, &c_of, &mut alphas, &mut bias, &mut errors,
                ) {
                    changed += 1;
                    break;
                }
            }
        }
        if changed == 0 {
            clean_passes += 1;
            if clean_passes >= params.max_passes {
                // verify against fresh errors before declaring victory
                recompute_errors(&mut errors, x, y, &alphas, bias, &kmat);
                let any_violation = (0..n).any(|i| {
                    let r = y[i] * errors[i];
                    (r < -tol && alphas[i] < c_of(i)) || (r > tol && alphas[i] > 0.0)
                });
                if !any_violation {
                    converged = true;
                    break;
                }
                clean_passes = 0;
            }
        } else {
            clean_passes = 0;
        }
    }

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for i in 0..n {
        if alphas[i] > SUPPORT_THRESHOLD {
            support_vectors.push(x[i].clone());
            coefficients.push(alphas[i] * y[i]);
        }
    }

    if !converged {
        log::warn!("SMO pass budget exhausted after {sweeps} sweeps; returning best iterate");
    }

    Ok(PairSolution {
        support_vectors,
        coefficients,
        bias,
        kernel: params.kernel,
        converged,
        alphas,
    })
}

/// One analytic two-variable update. Returns true if the pair moved.
#[allow(clippy::too_many_arguments)]
fn step(
    i: usize,
    j: usize,
    x: &[Vec<f64>],
    y: &[f64],
    kmat: &KernelEval,
    c_of: &dyn Fn(usize) -> f64,
    alphas: &mut [f64],
    bias: &mut f64,
    errors: &mut [f64],
) -> bool {
    if i == j {
        return false;
    }
    let (e_i, e_j) = (errors[i], errors[j]);
    let (a_i_old, a_j_old) = (alphas[i], alphas[j]);
    let (c_i, c_j) = (c_of(i), c_of(j));

    // feasible segment for alpha_j under the equality constraint
    let (lo, hi) = if y[i] != y[j] {
        let gap = a_j_old - a_i_old;
        (gap.max(0.0), (c_i + gap).min(c_j))
    } else {
        let sum = a_i_old + a_j_old;
        ((sum - c_i).max(0.0), sum.min(c_j))
    };
    if lo >= hi {
        return false;
    }

    let eta = 2.0 * kmat.get(i, j) - kmat.get(i, i) - kmat.get(j, j);
    let a_j = if eta < 0.0 {
        (a_j_old - y[j] * (e_i - e_j) / eta).clamp(lo, hi)
    } else {
        // objective is linear or convex along the segment: the maximum
        // sits at an endpoint. W(t) - W(old) = g*d + eta/2 * d^2.
        let g = y[j] * (e_i - e_j);
        let gain = |t: f64| {
            let d = t - a_j_old;
            g * d + 0.5 * eta * d * d
        };
        let (gain_lo, gain_hi) = (gain(lo), gain(hi));
        if gain_lo > gain_hi + 1e-12 && gain_lo > 1e-12 {
            lo
        } else if gain_hi > gain_lo + 1e-12 && gain_hi > 1e-12 {
            hi
        } else {
            return false;
        }
    };
    if (a_j - a_j_old).abs() < 1e-12 {
        return false;
    }
    let a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j);

    let d_i = a_i - a_i_old;
    let d_j = a_j - a_j_old;
    let b1 = *bias - e_i - y[i] * d_i * kmat.get(i, i) - y[j] * d_j * kmat.get(i, j);
    let b2 = *bias - e_j - y[i] * d_i * kmat.get(i, j) - y[j] * d_j * kmat.get(j, j);
    let new_bias = if a_i > 0.0 && a_i < c_i {
        b1
    } else if a_j > 0.0 && a_j < c_j {
        b2
    } else {
        0.5 * (b1 + b2)
    };
    let d_b = new_bias - *bias;

    alphas[i] = a_i;
    alphas[j] = a_j;
    *bias = new_bias;
    let n = x.len();
    for t in 0..n {
        errors[t] += y[i] * d_i * kmat.get(i, t) + y[j] * d_j * kmat.get(j, t) + d_b;
    }
    true
}

fn recompute_errors(
    errors: &mut [f64],
    x: &[Vec<f64>],
    y: &[f64],
    alphas: &[f64],
    bias: f64,
    kmat: &KernelEval,
) {
    let n = x.len();
    for t in 0..n {
        let f: f64 = (0..n)
            .filter(|&i| alphas[i] > 0.0)
            .map(|i| alphas[i] * y[i] * kmat.get(i, t))
            .sum::<f64>()
            + bias;
        errors[t] = f - y[t];
    }
}

/// Dual objective `sum(alpha) - 1/2 * sum_ij alpha_i alpha_j y_i y_j K_ij`.
pub fn dual_objective(x: &[Vec<f64>], y: &[f64], alphas: &[f64], kernel: Kernel) -> f64 {
    let n = x.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if alphas[j] == 0.0 {
                continue;
            }
            quad += alphas[i] * alphas[j] * y[i] * y[j] * kernel.eval(&x[i], &x[j]);
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Verify the KKT conditions of a solution at the given tolerance.
/// Returns the worst violation margin (<= 0 means fully satisfied).
pub fn kkt_violation(
    x: &[Vec<f64>],
    y: &[f64],
    solution: &PairSolution,
    c_by_label: (f64, f64),
    tol: f64,
) -> f64 {
    let mut worst: f64 = f64::NEG_INFINITY;
    for i in 0..x.len() {
        let margin = y[i] * solution.decision(&x[i]);
        let alpha = solution.alphas[i];
        let c = if y[i] > 0.0 { c_by_label.0 } else { c_by_label.1 };
        let violation = if alpha <= SUPPORT_THRESHOLD {
            (1.0 - tol) - margin
        } else if alpha >= c - SUPPORT_THRESHOLD {
            margin - (1.0 + tol)
        } else {
            (margin - 1.0).abs() - tol
        };
        worst = worst.max(violation);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_two_point_problem() {
        let x = vec![vec![1.0], vec![-1.0]];
        let y = vec![1.0, -1.0];
        let params = SmoParams {
            c: 10.0,
            ..Default::default()
        };
        let sol = train_pair_smo(&x, &y, &params, (10.0, 10.0), 1).unwrap();
        assert!(sol.converged);
        assert!((sol.alphas[0] - 0.5).abs() < 1e-6, "alpha = {:?}", sol.alphas);
        assert!((sol.alphas[1] - 0.5).abs() < 1e-6);
        assert!(sol.bias.abs() < 1e-6);
        // decision function f(x) = x
        assert!((sol.decision(&[0.7]) - 0.7).abs() < 1e-6);
        assert!((sol.decision(&[-0.2]) + 0.2).abs() < 1e-6);
    }

    #[test]
    fn contradictory_points_saturate_at_bound() {
        // identical coordinates with opposite labels: both alphas at C
        let x = vec![vec![0.5], vec![0.5]];
        let y = vec![1.0, -1.0];
        let params = SmoParams {
            c: 0.25,
            ..Default::default()
        };
        let sol = train_pair_smo(&x, &y, &params, (0.25, 0.25), 1).unwrap();
        assert!((sol.alphas[0] - 0.25).abs() < 1e-9, "alphas = {:?}", sol.alphas);
        assert!((sol.alphas[1] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn single_label_input_rejected() {
        let x = vec![vec![1.0], vec![2.0]];
        let y = vec![1.0, 1.0];
        assert!(matches!(
            train_pair_smo(&x, &y, &SmoParams::default(), (1.0, 1.0), 1),
            Err(ClassifierError::InvalidInput(_))
        ));
    }

    #[test]
    fn dual_constraint_holds() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let offset = if i < 15 { -1.5 } else { 1.5 };
                vec![offset + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            })
            .collect();
        let y: Vec<f64> = (0..30).map(|i| if i < 15 { -1.0 } else { 1.0 }).collect();
        let sol = train_pair_smo(&x, &y, &SmoParams::default(), (1.0, 1.0), 7).unwrap();
        let balance: f64 = sol
            .alphas
            .iter()
            .zip(&y)
            .map(|(a, yi)| a * yi)
            .sum();
        assert!(balance.abs() < 1e-6, "sum alpha_i y_i = {balance}");
        for (a, yi) in sol.alphas.iter().zip(&y) {
            let c = if *yi > 0.0 { 1.0 } else { 1.0 };
            assert!(*a >= -1e-12 && *a <= c + 1e-12);
        }
        assert!(sol.converged);
        assert!(kkt_violation(&x, &y, &sol, (1.0, 1.0), 1e-3) <= 1e-9);
    }

    #[test]
    fn rbf_solves_xor() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![1.0, 1.0, -1.0, -1.0];
        let params = SmoParams {
            kernel: Kernel::Rbf { gamma: 2.0 },
            c: 100.0,
            ..Default::default()
        };
        let sol = train_pair_smo(&x, &y, &params, (100.0, 100.0), 3).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!(sol.decision(xi) * yi > 0.0, "misclassified {xi:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let x: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i as f64) * 0.3 - 3.0, ((i * 7) % 5) as f64])
            .collect();
        let y: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = train_pair_smo(&x, &y, &SmoParams::default(), (1.0, 1.0), 11).unwrap();
        let b = train_pair_smo(&x, &y, &SmoParams::default(), (1.0, 1.0), 11).unwrap();
        assert_eq!(a.alphas, b.alphas);
        assert_eq!(a.bias, b.bias);
    }
}
