//! ID3, Bernoulli naive Bayes, logistic regression and a linear SVM behind
//! one train/predict contract.

pub mod id3;
pub mod logistic;
pub mod model_io;
pub mod naive_bayes;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{FeatureMatrix, FeatureVector};

pub use id3::DecisionTree;
pub use logistic::{LogisticModel, LogisticParams};
pub use naive_bayes::NaiveBayesModel;
pub use svm::{SvmFit, SvmModel, SvmParams, SvmSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    Logistic,
    NaiveBayes,
    Id3,
    SvmLinear,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::Logistic,
        ClassifierKind::NaiveBayes,
        ClassifierKind::Id3,
        ClassifierKind::SvmLinear,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::NaiveBayes => "naive_bayes",
            ClassifierKind::Id3 => "id3",
            ClassifierKind::SvmLinear => "svm_linear",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Logistic => "Logistic regression",
            ClassifierKind::NaiveBayes => "Naive Bayes",
            ClassifierKind::Id3 => "ID3",
            ClassifierKind::SvmLinear => "SVM linear",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logistic" | "lr" => Ok(ClassifierKind::Logistic),
            "naive_bayes" | "nb" | "naive-bayes" => Ok(ClassifierKind::NaiveBayes),
            "id3" => Ok(ClassifierKind::Id3),
            "svm_linear" | "svm" | "svm-linear" => Ok(ClassifierKind::SvmLinear),
            other => Err(Error::InvalidParameter(format!(
                "unknown classifier `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub logistic: LogisticParams,
    /// Laplace smoothing strength for naive Bayes.
    pub nb_alpha: f64,
    pub svm: SvmParams,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            logistic: LogisticParams::default(),
            nb_alpha: 1.0,
            svm: SvmParams::default(),
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("logistic learning rate", self.logistic.learning_rate),
            ("logistic tolerance", self.logistic.tolerance),
            ("naive Bayes alpha", self.nb_alpha),
            ("SVM C", self.svm.c),
            ("SVM tolerance", self.svm.tolerance),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.logistic.l2.is_finite() && self.logistic.l2 >= 0.0) {
            return Err(Error::InvalidParameter(
                "logistic L2 must be non-negative".into(),
            ));
        }
        if self.logistic.max_epochs == 0 || self.svm.max_epochs == 0 {
            return Err(Error::InvalidParameter(
                "max epochs must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Training data held a single class.
    Constant(Label),
    Id3(DecisionTree),
    NaiveBayes(NaiveBayesModel),
    Logistic(LogisticModel),
    Svm(SvmModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    pub n_attrs: usize,
    pub model: Model,
}

pub fn train(
    kind: ClassifierKind,
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
) -> Result<TrainedModel> {
    if matrix.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    hp.validate()?;
    let positives = matrix.positive_count();
    let model = if positives == 0 || positives == matrix.n_rows() {
        Model::Constant(matrix.labels()[0])
    } else {
        match kind {
            ClassifierKind::Id3 => Model::Id3(DecisionTree::fit(matrix)),
            ClassifierKind::NaiveBayes => {
                Model::NaiveBayes(NaiveBayesModel::fit(matrix, hp.nb_alpha))
            }
            ClassifierKind::Logistic => Model::Logistic(LogisticModel::fit(matrix, &hp.logistic)),
            ClassifierKind::SvmLinear => Model::Svm(SvmModel::fit(matrix, &hp.svm).model),
        }
    };
    Ok(TrainedModel {
        kind,
        n_attrs: matrix.n_attrs(),
        model,
    })
}

impl TrainedModel {
    fn check(&self, fv: &FeatureVector) -> Result<()> {
        if fv.len() != self.n_attrs {
            return Err(Error::DimensionMismatch {
                expected: self.n_attrs,
                actual: fv.len(),
            });
        }
        Ok(())
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<Label> {
        self.check(fv)?;
        let bits = fv.bits();
        Ok(match &self.model {
            Model::Constant(l) => *l,
            Model::Id3(t) => t.predict(bits),
            Model::NaiveBayes(m) => m.predict(bits),
            Model::Logistic(m) => m.predict(bits),
            Model::Svm(m) => m.predict(bits),
        })
    }

    /// Probability of Yes; naive Bayes and logistic models only (a
    /// single-class model reports 0 or 1).
    pub fn predict_proba(&self, fv: &FeatureVector) -> Result<f64> {
        self.check(fv)?;
        let bits = fv.bits();
        match &self.model {
            Model::Constant(l) => Ok(if l.is_yes() { 1.0 } else { 0.0 }),
            Model::NaiveBayes(m) => Ok(m.proba_yes(bits)),
            Model::Logistic(m) => Ok(m.proba_yes(bits)),
            Model::Id3(_) | Model::Svm(_) => Err(Error::Unsupported(format!(
                "{} does not produce probabilities",
                self.kind.display_name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> FeatureMatrix {
        FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![
                FeatureVector::new(vec![1, 0]),
                FeatureVector::new(vec![1, 1]),
                FeatureVector::new(vec![0, 1]),
                FeatureVector::new(vec![0, 0]),
            ],
            vec![Label::Yes, Label::Yes, Label::No, Label::No],
        )
        .unwrap()
    }

    #[test]
    fn single_class_gives_constant_model() {
        let m = toy().select_rows(&[0, 1]);
        for kind in ClassifierKind::ALL {
            let t = train(kind, &m, &Hyperparams::default()).unwrap();
            assert_eq!(t.model, Model::Constant(Label::Yes));
            assert_eq!(
                t.predict(&FeatureVector::new(vec![0, 0])).unwrap(),
                Label::Yes
            );
        }
    }

    #[test]
    fn empty_matrix_is_error() {
        let m = toy().select_rows(&[]);
        assert!(train(ClassifierKind::Id3, &m, &Hyperparams::default()).is_err());
    }

    #[test]
    fn dimension_mismatch_and_unsupported_proba() {
        let t = train(ClassifierKind::Id3, &toy(), &Hyperparams::default()).unwrap();
        assert!(matches!(
            t.predict(&FeatureVector::new(vec![1])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            t.predict_proba(&FeatureVector::new(vec![1, 0])),
            Err(Error::Unsupported(_))
        ));
        let s = train(ClassifierKind::SvmLinear, &toy(), &Hyperparams::default()).unwrap();
        assert!(s.predict_proba(&FeatureVector::new(vec![1, 0])).is_err());
    }

    #[test]
    fn all_kinds_fit_the_toy_set() {
        for kind in ClassifierKind::ALL {
            let t = train(kind, &toy(), &Hyperparams::default()).unwrap();
            for (r, l) in toy().rows().iter().zip(toy().labels()) {
                assert_eq!(t.predict(r).unwrap(), *l, "{kind}");
            }
        }
    }

    #[test]
    fn bad_hyperparams_rejected() {
        let mut hp = Hyperparams::default();
        hp.svm.c = 0.0;
        assert!(train(ClassifierKind::SvmLinear, &toy(), &hp).is_err());
    }
}
