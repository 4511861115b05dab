//! Suspicious-email detection with keyword and context-indicator features,
//! filter feature selection, four classifiers and a cross-validated
//! comparison grid.

pub mod arff;
pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod label;
pub mod lexicon;
pub mod matrix;
pub mod selection;

pub use classifiers::{train, ClassifierKind, Hyperparams, TrainedModel};
pub use corpus::{
    generate_synthetic_corpus, load_corpus, parse_email, Email, LabeledCorpus, SyntheticParams,
};
pub use error::{Error, Result};
pub use evaluation::{
    cross_validate, format_report, make_folds, run_grid, CvResult, FoldPlan, GridReport,
    ReportStyle,
};
pub use label::Label;
pub use lexicon::{build_matrix, extract_features, rule_label, tokenize, Lexicon};
pub use matrix::{FeatureMatrix, FeatureVector};
pub use selection::{select, FeatureSubset, Selection, SelectionScheme};
