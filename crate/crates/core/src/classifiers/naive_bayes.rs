//! Bernoulli naive Bayes with Laplace smoothing.

use crate::label::Label;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    /// P(No), P(Yes).
    pub priors: [f64; 2],
    /// Per attribute: P(a = 1 | No), P(a = 1 | Yes).
    pub conditionals: Vec<[f64; 2]>,
}

impl NaiveBayesModel {
    pub fn fit(matrix: &FeatureMatrix, alpha: f64) -> Self {
        let mut class_counts = [0usize; 2];
        let mut ones = vec![[0usize; 2]; matrix.n_attrs()];
        for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
            let c = label.is_yes() as usize;
            class_counts[c] += 1;
            for (a, &b) in row.bits().iter().enumerate() {
                ones[a][c] += b as usize;
            }
        }
        let n = matrix.n_rows() as f64;
        let priors = [class_counts[0] as f64 / n, class_counts[1] as f64 / n];
        let conditionals = ones
            .iter()
            .map(|o| {
                let p = |c: usize| (o[c] as f64 + alpha) / (class_counts[c] as f64 + 2.0 * alpha);
                [p(0), p(1)]
            })
            .collect();
        NaiveBayesModel {
            priors,
            conditionals,
        }
    }

    /// Unnormalized log posteriors, [No, Yes].
    pub fn log_joint(&self, bits: &[u8]) -> [f64; 2] {
        let mut out = [self.priors[0].ln(), self.priors[1].ln()];
        for (p, &b) in self.conditionals.iter().zip(bits) {
            for c in 0..2 {
                out[c] += if b == 1 { p[c].ln() } else { (1.0 - p[c]).ln() };
            }
        }
        out
    }

    pub fn proba_yes(&self, bits: &[u8]) -> f64 {
        let [no, yes] = self.log_joint(bits);
        let m = no.max(yes);
        let (e_no, e_yes) = ((no - m).exp(), (yes - m).exp());
        e_yes / (e_no + e_yes)
    }

    /// Argmax posterior; ties go to No.
    pub fn predict(&self, bits: &[u8]) -> Label {
        let [no, yes] = self.log_joint(bits);
        Label::from_bool(yes > no)
    }
}
