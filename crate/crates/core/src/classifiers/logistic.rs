//! Logistic regression trained by batch gradient ascent on the mean
//! log-likelihood.

use crate::label::Label;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the objective changes by less than this between epochs.
    pub tolerance: f64,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.1,
            max_epochs: 1000,
            tolerance: 1e-6,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(weights: &[f64], bias: f64, bits: &[u8]) -> f64 {
    bias + weights
        .iter()
        .zip(bits)
        .filter(|(_, &b)| b == 1)
        .map(|(w, _)| w)
        .sum::<f64>()
}

/// Mean log-likelihood minus the L2 penalty `l2/2 * |w|^2`.
pub fn objective(matrix: &FeatureMatrix, weights: &[f64], bias: f64, l2: f64) -> f64 {
    value_and_gradient(matrix, weights, bias, l2).0
}

/// Analytic gradient of [`objective`]: weights, then bias.
pub fn gradient(matrix: &FeatureMatrix, weights: &[f64], bias: f64, l2: f64) -> (Vec<f64>, f64) {
    let (_, gw, gb) = value_and_gradient(matrix, weights, bias, l2);
    (gw, gb)
}

fn value_and_gradient(
    matrix: &FeatureMatrix,
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = matrix.n_rows() as f64;
    let mut ll = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
        let y = label.is_yes() as u8 as f64;
        let z = linear(weights, bias, row.bits());
        ll += y * z - softplus(z);
        let residual = y - sigmoid(z);
        gb += residual;
        for (g, &b) in gw.iter_mut().zip(row.bits()) {
            if b == 1 {
                *g += residual;
            }
        }
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n - l2 * w;
    }
    let penalty = 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (ll / n - penalty, gw, gb / n)
}

impl LogisticModel {
    pub fn zeros(d: usize) -> Self {
        LogisticModel {
            weights: vec![0.0; d],
            bias: 0.0,
        }
    }

    pub fn fit(matrix: &FeatureMatrix, params: &LogisticParams) -> Self {
        let mut model = LogisticModel::zeros(matrix.n_attrs());
        let (mut prev, mut gw, mut gb) =
            value_and_gradient(matrix, &model.weights, model.bias, params.l2);
        for _ in 0..params.max_epochs {
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w += params.learning_rate * g;
            }
            model.bias += params.learning_rate * gb;
            let (cur, next_gw, next_gb) =
                value_and_gradient(matrix, &model.weights, model.bias, params.l2);
            if (cur - prev).abs() < params.tolerance {
                break;
            }
            (prev, gw, gb) = (cur, next_gw, next_gb);
        }
        model
    }

    pub fn proba_yes(&self, bits: &[u8]) -> f64 {
        sigmoid(linear(&self.weights, self.bias, bits))
    }

    /// Yes iff the probability is at least 0.5.
    pub fn predict(&self, bits: &[u8]) -> Label {
        Label::from_bool(self.proba_yes(bits) >= 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_sits_on_the_boundary() {
        let m = LogisticModel::zeros(3);
        assert_eq!(m.proba_yes(&[1, 0, 1]), 0.5);
        assert_eq!(m.predict(&[1, 0, 1]), Label::Yes);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-9);
    }
}
