//! Linear soft-margin SVM for `1/2 |w|^2 + C * sum(hinge)` with an
//! unregularized bias.
//!
//! Two trainers share the objective: SMO on the dual (default) and seeded
//! stochastic subgradient descent in the primal. Both report the running
//! best primal objective once per epoch (n updates).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::label::Label;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvmSolver {
    /// Dual pair updates with maximal-violating-pair selection.
    Smo,
    /// Stochastic subgradient steps on the weights, exact bias per epoch.
    Subgradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// SMO: bound on the KKT violation gap. Subgradient: relative objective
    /// change that counts as converged.
    pub tolerance: f64,
    pub max_epochs: usize,
    /// Visit order for SMO tie-breaks and the subgradient shuffle.
    pub seed: u64,
    pub solver: SvmSolver,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tolerance: 1e-3,
            max_epochs: 10_000,
            seed: 0,
            solver: SvmSolver::Smo,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
}

/// Training result with the per-epoch running-best objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub model: SvmModel,
    pub trace: Vec<f64>,
    pub epochs: usize,
}

fn signed(label: Label) -> f64 {
    if label.is_yes() {
        1.0
    } else {
        -1.0
    }
}

fn decision(weights: &[f64], bias: f64, bits: &[u8]) -> f64 {
    bias + weights
        .iter()
        .zip(bits)
        .filter(|(_, &b)| b == 1)
        .map(|(w, _)| w)
        .sum::<f64>()
}

/// `1/2 |w|^2 + C * sum(max(0, 1 - y (w.x + b)))`.
pub fn objective(matrix: &FeatureMatrix, weights: &[f64], bias: f64, c: f64) -> f64 {
    let reg = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let hinge: f64 = matrix
        .rows()
        .iter()
        .zip(matrix.labels())
        .map(|(row, &label)| (1.0 - signed(label) * decision(weights, bias, row.bits())).max(0.0))
        .sum();
    reg + c * hinge
}

/// Exact minimizer over the bias of `sum(max(0, 1 - y_i (s_i + b)))` for
/// fixed scores `s_i`. The minimum sits on a breakpoint `b = y_i - s_i`;
/// among equal minima the one closest to `current` wins.
fn best_bias(scores: &[f64], ys: &[f64], current: f64) -> f64 {
    let hinge = |b: f64| -> f64 {
        scores
            .iter()
            .zip(ys)
            .map(|(s, y)| (1.0 - y * (s + b)).max(0.0))
            .sum()
    };
    let mut best = (hinge(current), current);
    for (s, y) in scores.iter().zip(ys) {
        let b = y - s;
        let h = hinge(b);
        let better = h < best.0 - 1e-12
            || (h <= best.0 + 1e-12 && (b - current).abs() < (best.1 - current).abs());
        if better {
            best = (h, b);
        }
    }
    best.1
}

impl SvmModel {
    pub fn fit(matrix: &FeatureMatrix, params: &SvmParams) -> SvmFit {
        match params.solver {
            SvmSolver::Smo => fit_smo(matrix, params),
            SvmSolver::Subgradient => fit_subgradient(matrix, params),
        }
    }

    pub fn decision(&self, bits: &[u8]) -> f64 {
        decision(&self.weights, self.bias, bits)
    }

    /// Yes iff the decision value is non-negative.
    pub fn predict(&self, bits: &[u8]) -> Label {
        Label::from_bool(self.decision(bits) >= 0.0)
    }
}

const TAU: f64 = 1e-12;

fn dot(a: &[u8], b: &[u8]) -> f64 {
    a.iter().zip(b).filter(|(&x, &y)| x == 1 && y == 1).count() as f64
}

/// Sequential minimal optimization with second-order working-set
/// selection. The seed fixes the scan order, which settles ties between
/// equally violating pairs.
fn fit_smo(matrix: &FeatureMatrix, params: &SvmParams) -> SvmFit {
    let n = matrix.n_rows();
    let d = matrix.n_attrs();
    let c = params.c;
    let rows: Vec<&[u8]> = matrix.rows().iter().map(|r| r.bits()).collect();
    let ys: Vec<f64> = matrix.labels().iter().map(|&l| signed(l)).collect();
    let kernel: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| dot(a, b)).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));

    let mut alpha = vec![0.0; n];
    // gradient of the dual objective (minimization form)
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let primal = |alpha: &[f64], grad: &[f64]| -> (Vec<f64>, f64) {
        let mut w = vec![0.0; d];
        for (i, &a) in alpha.iter().enumerate() {
            if a > 0.0 {
                for (wj, &x) in w.iter_mut().zip(rows[i]) {
                    if x == 1 {
                        *wj += a * ys[i];
                    }
                }
            }
        }
        // offset from the free multipliers, then refined exactly in the primal
        let (mut ub, mut lb, mut sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for i in 0..n {
            let yg = ys[i] * grad[i];
            let (at_upper, at_lower) = (upper(alpha[i]), lower(alpha[i]));
            if at_upper || at_lower {
                let tighten_ub = (at_upper && ys[i] < 0.0) || (at_lower && ys[i] > 0.0);
                if tighten_ub {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum += yg;
            }
        }
        let rho = if free > 0 {
            sum / free as f64
        } else {
            (ub + lb) / 2.0
        };
        let scores: Vec<f64> = rows.iter().map(|r| decision(&w, 0.0, r)).collect();
        let b = best_bias(&scores, &ys, -rho);
        (w, b)
    };

    let mut best_w = vec![0.0; d];
    let mut best_b = 0.0;
    let mut best = objective(matrix, &best_w, best_b, c);
    let mut trace = Vec::new();
    let mut epochs = 0;
    let mut converged = false;

    while !converged && epochs < params.max_epochs {
        epochs += 1;
        for _ in 0..n {
            // i: maximal violator from the "up" set
            let mut gmax = f64::NEG_INFINITY;
            let mut i_sel = None;
            for &t in &order {
                let v = if ys[t] > 0.0 {
                    (!upper(alpha[t])).then(|| -grad[t])
                } else {
                    (!lower(alpha[t])).then(|| grad[t])
                };
                if let Some(v) = v {
                    if v > gmax {
                        gmax = v;
                        i_sel = Some(t);
                    }
                }
            }
            // j: largest second-order decrease from the "low" set
            let mut gmax2 = f64::NEG_INFINITY;
            let mut j_sel = None;
            let mut best_drop = f64::INFINITY;
            if let Some(i) = i_sel {
                for &t in &order {
                    let (in_low, grad_diff, v) = if ys[t] > 0.0 {
                        (!lower(alpha[t]), gmax + grad[t], grad[t])
                    } else {
                        (!upper(alpha[t]), gmax - grad[t], -grad[t])
                    };
                    if !in_low {
                        continue;
                    }
                    gmax2 = gmax2.max(v);
                    if grad_diff > 0.0 {
                        let quad = kernel[i][i] + kernel[t][t] - 2.0 * kernel[i][t];
                        let quad = if quad > 0.0 { quad } else { TAU };
                        let drop = -(grad_diff * grad_diff) / quad;
                        if drop < best_drop {
                            best_drop = drop;
                            j_sel = Some(t);
                        }
                    }
                }
            }
            let (Some(i), Some(j)) = (i_sel, j_sel) else {
                converged = true;
                break;
            };
            if gmax + gmax2 < params.tolerance {
                converged = true;
                break;
            }

            let (old_i, old_j) = (alpha[i], alpha[j]);
            let qij = ys[i] * ys[j] * kernel[i][j];
            if ys[i] != ys[j] {
                let quad = kernel[i][i] + kernel[j][j] + 2.0 * qij;
                let quad = if quad > 0.0 { quad } else { TAU };
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
                let quad = kernel[i][i] + kernel[j][j] - 2.0 * qij;
                let quad = if quad > 0.0 { quad } else { TAU };
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
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..n {
                grad[t] += ys[t] * (ys[i] * kernel[t][i] * di + ys[j] * kernel[t][j] * dj);
            }
        }
        let (w, b) = primal(&alpha, &grad);
        let obj = objective(matrix, &w, b, c);
        if obj < best {
            best = obj;
            best_w = w;
            best_b = b;
        }
        trace.push(best);
    }
    SvmFit {
        model: SvmModel {
            weights: best_w,
            bias: best_b,
            c,
        },
        trace,
        epochs,
    }
}

impl SvmModel {
    /// Stochastic subgradient steps on the weights (Pegasos schedule
    /// `1 / (lambda t)`, `lambda = 1 / (C n)`), then an exact bias update at
    /// the end of every epoch. Stops once an epoch's objective lands within
    /// the relative tolerance of the running best; returns the best iterate.
    fn fit_subgradient_impl(matrix: &FeatureMatrix, params: &SvmParams) -> SvmFit {
        let n = matrix.n_rows();
        let d = matrix.n_attrs();
        let lambda = 1.0 / (params.c * n as f64);
        let ys: Vec<f64> = matrix.labels().iter().map(|&l| signed(l)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut order: Vec<usize> = (0..n).collect();

        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut best_w = w.clone();
        let mut best_b = b;
        let mut best = objective(matrix, &w, b, params.c);
        let mut trace = Vec::new();
        let mut t: u64 = 0;
        let mut epochs = 0;

        for _ in 0..params.max_epochs {
            epochs += 1;
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let row = matrix.rows()[i].bits();
                let margin = ys[i] * decision(&w, b, row);
                let shrink = 1.0 - eta * lambda;
                for wj in w.iter_mut() {
                    *wj *= shrink;
                }
                if margin < 1.0 {
                    for (wj, &x) in w.iter_mut().zip(row) {
                        if x == 1 {
                            *wj += eta * ys[i];
                        }
                    }
                }
            }
            let scores: Vec<f64> = matrix
                .rows()
                .iter()
                .map(|r| decision(&w, 0.0, r.bits()))
                .collect();
            b = best_bias(&scores, &ys, b);

            let obj = objective(matrix, &w, b, params.c);
            let within = (obj - best).abs() <= params.tolerance * best.abs().max(1.0);
            if obj < best {
                best = obj;
                best_w.clone_from(&w);
                best_b = b;
            }
            trace.push(best);
            if within {
                break;
            }
        }
        SvmFit {
            model: SvmModel {
                weights: best_w,
                bias: best_b,
                c: params.c,
            },
            trace,
            epochs,
        }
    }
}

fn fit_subgradient(matrix: &FeatureMatrix, params: &SvmParams) -> SvmFit {
    SvmModel::fit_subgradient_impl(matrix, params)
}
