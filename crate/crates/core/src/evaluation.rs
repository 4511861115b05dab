//! Stratified k-fold cross-validation, the classifier-by-scheme accuracy
//! grid, and report rendering.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifiers::{train, ClassifierKind, Hyperparams};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::FeatureMatrix;
use crate::selection::{select_with, FeatureSubset, SelectionConfig, SelectionScheme};

/// Fold id for every instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffles each class with a seeded generator and deals the instances
/// round-robin to folds. Dealing continues across classes, so overall fold
/// sizes also differ by at most one.
pub fn make_folds(labels: &[Label], k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds {n} instances"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Vec<usize>> = if stratified {
        [Label::Yes, Label::No]
            .iter()
            .map(|&c| (0..n).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..n).collect()]
    };
    let mut assignment = vec![0; n];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        stratified,
        assignment,
    })
}

/// Per-fold outcome of one classifier/scheme pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub fold_correct: Vec<usize>,
    pub fold_sizes: Vec<usize>,
    /// One subset when selection ran on the full matrix, one per fold when
    /// it ran inside each training fold.
    pub subsets: Vec<FeatureSubset>,
}

impl CvResult {
    pub fn correct(&self) -> usize {
        self.fold_correct.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.fold_sizes.iter().sum()
    }

    /// 100 * correct / N over all test folds.
    pub fn pooled_accuracy(&self) -> f64 {
        100.0 * self.correct() as f64 / self.n() as f64
    }

    pub fn fold_accuracies(&self) -> Vec<f64> {
        self.fold_correct
            .iter()
            .zip(&self.fold_sizes)
            .map(|(&c, &s)| 100.0 * c as f64 / s as f64)
            .collect()
    }

    /// Mean of the per-fold accuracies.
    pub fn macro_accuracy(&self) -> f64 {
        let acc = self.fold_accuracies();
        acc.iter().sum::<f64>() / acc.len() as f64
    }

    pub fn pooled_text(&self) -> String {
        format_fraction(self.correct(), self.n())
    }

    pub fn macro_text(&self) -> String {
        format_truncated(self.macro_accuracy())
    }

    pub fn n_selected(&self) -> usize {
        let total: usize = self.subsets.iter().map(FeatureSubset::len).sum();
        (total as f64 / self.subsets.len() as f64).round() as usize
    }
}

/// Percentage `100 * num / den` truncated (not rounded) to two decimals,
/// computed in integers.
pub fn format_fraction(num: usize, den: usize) -> String {
    assert!(den > 0, "denominator must be positive");
    let hundredths = (num as u128 * 10_000) / den as u128;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// Truncates a percentage to two decimals. A 1e-9 guard absorbs
/// representation error just below an exact hundredth.
pub fn format_truncated(x: f64) -> String {
    let hundredths = (x * 100.0 + 1e-9).floor() as i64;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

fn check_plan(matrix: &FeatureMatrix, plan: &FoldPlan) -> Result<()> {
    if plan.n() != matrix.n_rows() {
        return Err(Error::InvalidParameter(format!(
            "fold plan covers {} instances, matrix has {}",
            plan.n(),
            matrix.n_rows()
        )));
    }
    Ok(())
}

fn run_folds(
    kind: ClassifierKind,
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
    plan: &FoldPlan,
    mut subset_for: impl FnMut(&FeatureMatrix) -> FeatureSubset,
) -> Result<CvResult> {
    let mut fold_correct = Vec::with_capacity(plan.k);
    let mut fold_sizes = Vec::with_capacity(plan.k);
    let mut subsets = Vec::new();
    for fold in 0..plan.k {
        let train_rows = plan.train_indices(fold);
        let test_rows = plan.test_indices(fold);
        let train_full = matrix.select_rows(&train_rows);
        let subset = subset_for(&train_full);
        let model = train(kind, &train_full.project(subset.indices()), hp)?;
        let mut correct = 0;
        for &r in &test_rows {
            let fv = matrix.rows()[r].project(subset.indices());
            if model.predict(&fv)? == matrix.labels()[r] {
                correct += 1;
            }
        }
        fold_correct.push(correct);
        fold_sizes.push(test_rows.len());
        if subsets.last() != Some(&subset) || subsets.is_empty() {
            subsets.push(subset);
        }
    }
    Ok(CvResult {
        fold_correct,
        fold_sizes,
        subsets,
    })
}

/// Cross-validates with a fixed attribute subset.
pub fn cross_validate_subset(
    kind: ClassifierKind,
    subset: &FeatureSubset,
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
    plan: &FoldPlan,
) -> Result<CvResult> {
    check_plan(matrix, plan)?;
    let mut r = run_folds(kind, matrix, hp, plan, |_| subset.clone())?;
    r.subsets = vec![subset.clone()];
    Ok(r)
}

/// By default the scheme selects once on the full matrix and every fold
/// reuses that subset. With `in_fold_selection` it reruns on each training
/// fold instead, which keeps test rows out of the selection.
pub fn cross_validate(
    kind: ClassifierKind,
    scheme: SelectionScheme,
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
    plan: &FoldPlan,
    in_fold_selection: bool,
) -> Result<CvResult> {
    cross_validate_with(
        kind,
        scheme,
        matrix,
        hp,
        plan,
        in_fold_selection,
        &SelectionConfig::default(),
    )
}

pub fn cross_validate_with(
    kind: ClassifierKind,
    scheme: SelectionScheme,
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
    plan: &FoldPlan,
    in_fold_selection: bool,
    selection: &SelectionConfig,
) -> Result<CvResult> {
    check_plan(matrix, plan)?;
    if in_fold_selection {
        let mut subsets = Vec::with_capacity(plan.k);
        let mut r = run_folds(kind, matrix, hp, plan, |train| {
            let s = select_with(scheme, train, selection).subset;
            subsets.push(s.clone());
            s
        })?;
        r.subsets = subsets;
        Ok(r)
    } else {
        let subset = select_with(scheme, matrix, selection).subset;
        cross_validate_subset(kind, &subset, matrix, hp, plan)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub in_fold_selection: bool,
    pub schemes: Vec<SelectionScheme>,
    pub classifiers: Vec<ClassifierKind>,
    pub selection: SelectionConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            k: 10,
            seed: 7,
            stratified: true,
            in_fold_selection: false,
            schemes: SelectionScheme::ALL.to_vec(),
            classifiers: ClassifierKind::ALL.to_vec(),
            selection: SelectionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub kind: ClassifierKind,
    pub scheme: SelectionScheme,
    pub result: CvResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    /// Classifier-major: for each classifier, every scheme in label order.
    pub cells: Vec<GridCell>,
    pub fingerprint: String,
    pub n_instances: usize,
    pub n_attrs: usize,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub in_fold_selection: bool,
    pub schemes: Vec<SelectionScheme>,
    pub classifiers: Vec<ClassifierKind>,
}

impl GridReport {
    pub fn cell(&self, kind: ClassifierKind, scheme: SelectionScheme) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.kind == kind && c.scheme == scheme)
    }
}

/// All four classifiers against all ten schemes, 10 folds.
pub fn run_grid(matrix: &FeatureMatrix, hp: &Hyperparams, seed: u64) -> Result<GridReport> {
    run_grid_with(
        matrix,
        hp,
        &GridConfig {
            seed,
            ..GridConfig::default()
        },
    )
}

/// Every cell shares one fold plan, so cells differ only in classifier and
/// selected columns. Cells run in parallel; the result is identical to a
/// serial run.
pub fn run_grid_with(
    matrix: &FeatureMatrix,
    hp: &Hyperparams,
    config: &GridConfig,
) -> Result<GridReport> {
    if matrix.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let positives = matrix.positive_count();
    if positives == 0 || positives == matrix.n_rows() {
        return Err(Error::InvalidParameter(
            "both classes must be present".into(),
        ));
    }
    hp.validate()?;
    let plan = make_folds(matrix.labels(), config.k, config.seed, config.stratified)?;

    let mut schemes = config.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut classifiers = config.classifiers.clone();
    classifiers.sort();
    classifiers.dedup();

    let subsets: Vec<Option<FeatureSubset>> = if config.in_fold_selection {
        vec![None; schemes.len()]
    } else {
        schemes
            .par_iter()
            .map(|&s| Some(select_with(s, matrix, &config.selection).subset))
            .collect()
    };

    let jobs: Vec<(ClassifierKind, usize)> = classifiers
        .iter()
        .flat_map(|&k| (0..schemes.len()).map(move |j| (k, j)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(kind, j)| {
            let scheme = schemes[j];
            let result = match &subsets[j] {
                Some(subset) => cross_validate_subset(kind, subset, matrix, hp, &plan)?,
                None => {
                    cross_validate_with(kind, scheme, matrix, hp, &plan, true, &config.selection)?
                }
            };
            Ok(GridCell {
                kind,
                scheme,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GridReport {
        cells,
        fingerprint: matrix.fingerprint(),
        n_instances: matrix.n_rows(),
        n_attrs: matrix.n_attrs(),
        k: config.k,
        seed: config.seed,
        stratified: config.stratified,
        in_fold_selection: config.in_fold_selection,
        schemes,
        classifiers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportStyle {
    Markdown,
    Csv,
}

impl std::str::FromStr for ReportStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportStyle::Markdown),
            "csv" => Ok(ReportStyle::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// One rendered grid cell; the unit shared by the CSV and markdown forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: SelectionScheme,
    pub kind: ClassifierKind,
    pub pooled: String,
    pub macro_avg: String,
    pub n_selected: usize,
    pub fold_accuracies: Vec<String>,
}

pub const CSV_HEADER: &str =
    "scheme_label,scheme_name,classifier,pooled_acc,macro_acc,n_selected,fold_accuracies";

/// Column order of the printed table.
const TABLE_COLUMNS: [ClassifierKind; 4] = [
    ClassifierKind::Logistic,
    ClassifierKind::Id3,
    ClassifierKind::NaiveBayes,
    ClassifierKind::SvmLinear,
];

pub fn report_rows(report: &GridReport) -> Vec<ReportRow> {
    report
        .cells
        .iter()
        .map(|c| ReportRow {
            scheme: c.scheme,
            kind: c.kind,
            pooled: c.result.pooled_text(),
            macro_avg: c.result.macro_text(),
            n_selected: c.result.n_selected(),
            fold_accuracies: c
                .result
                .fold_correct
                .iter()
                .zip(&c.result.fold_sizes)
                .map(|(&a, &b)| format_fraction(a, b))
                .collect(),
        })
        .collect()
}

pub fn format_report(report: &GridReport, style: ReportStyle) -> String {
    let rows = report_rows(report);
    match style {
        ReportStyle::Csv => render_csv(&rows),
        ReportStyle::Markdown => render_markdown(&rows, Some(report)),
    }
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scheme.label(),
            r.scheme.mnemonic(),
            r.kind.tag(),
            r.pooled,
            r.macro_avg,
            r.n_selected,
            r.fold_accuracies.join(";")
        );
    }
    out
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Report("missing or unexpected CSV header".into())),
    }
    let number = |s: &str| -> Result<String> {
        let t = s.trim();
        t.parse::<f64>()
            .map_err(|_| Error::Report(format!("bad accuracy `{t}`")))?;
        Ok(t.to_string())
    };
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Report(format!("expected 7 fields in `{line}`")));
            }
            let label: u8 = f[0]
                .trim()
                .parse()
                .map_err(|_| Error::Report(format!("bad scheme label `{}`", f[0])))?;
            let scheme = SelectionScheme::from_label(label)
                .ok_or_else(|| Error::Report(format!("unknown scheme label {label}")))?;
            if f[1].trim().parse::<SelectionScheme>().ok() != Some(scheme) {
                return Err(Error::Report(format!(
                    "scheme name `{}` does not match label {label}",
                    f[1]
                )));
            }
            let kind: ClassifierKind = f[2]
                .parse()
                .map_err(|e: Error| Error::Report(e.to_string()))?;
            let folds = if f[6].trim().is_empty() {
                Vec::new()
            } else {
                f[6].split(';').map(number).collect::<Result<Vec<_>>>()?
            };
            Ok(ReportRow {
                scheme,
                kind,
                pooled: number(f[3])?,
                macro_avg: number(f[4])?,
                n_selected: f[5]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Report(format!("bad n_selected `{}`", f[5])))?,
                fold_accuracies: folds,
            })
        })
        .collect()
}

fn hundredths(s: &str) -> i64 {
    s.parse::<f64>()
        .map(|x| (x * 100.0).round() as i64)
        .unwrap_or(i64::MIN)
}

fn render_table(rows: &[ReportRow], value: impl Fn(&ReportRow) -> &str, out: &mut String) {
    let mut schemes: Vec<SelectionScheme> = rows.iter().map(|r| r.scheme).collect();
    schemes.sort();
    schemes.dedup();
    let columns: Vec<ClassifierKind> = TABLE_COLUMNS
        .into_iter()
        .filter(|k| rows.iter().any(|r| r.kind == *k))
        .collect();
    let best: Vec<i64> = columns
        .iter()
        .map(|k| {
            rows.iter()
                .filter(|r| r.kind == *k)
                .map(|r| hundredths(value(r)))
                .max()
                .unwrap_or(i64::MIN)
        })
        .collect();

    out.push_str("| # | Method |");
    for k in &columns {
        let _ = write!(out, " {} |", k.display_name());
    }
    out.push_str("\n|---:|---|");
    for _ in &columns {
        out.push_str("---:|");
    }
    out.push('\n');
    for s in schemes {
        let _ = write!(out, "| {} | {} |", s.label(), s.display_name());
        for (k, &b) in columns.iter().zip(&best) {
            match rows.iter().find(|r| r.scheme == s && r.kind == *k) {
                Some(r) if hundredths(value(r)) == b => {
                    let _ = write!(out, " **{}** |", value(r));
                }
                Some(r) => {
                    let _ = write!(out, " {} |", value(r));
                }
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
}

/// Markdown tables of pooled and per-fold-mean accuracy. Column maxima are
/// bold. Run metadata is included when the full report is available.
pub fn render_markdown(rows: &[ReportRow], report: Option<&GridReport>) -> String {
    let mut out = String::new();
    out.push_str("# Cross-validated accuracy (%)\n\n");
    if let Some(r) = report {
        let _ = writeln!(out, "- corpus fingerprint: `{}`", r.fingerprint);
        let _ = writeln!(
            out,
            "- instances: {}, attributes: {}",
            r.n_instances, r.n_attrs
        );
        let _ = writeln!(
            out,
            "- folds: {} ({}), seed: {}",
            r.k,
            if r.stratified {
                "stratified"
            } else {
                "unstratified"
            },
            r.seed
        );
        let _ = writeln!(
            out,
            "- selection: {}",
            if r.in_fold_selection {
                "rerun inside each training fold"
            } else {
                "once on the full data set, before cross-validation"
            }
        );
        out.push('\n');
    }
    out.push_str("## Pooled accuracy (correct / N)\n\n");
    render_table(rows, |r| r.pooled.as_str(), &mut out);
    out.push_str("\n## Mean per-fold accuracy\n\n");
    render_table(rows, |r| r.macro_avg.as_str(), &mut out);
    out
}
