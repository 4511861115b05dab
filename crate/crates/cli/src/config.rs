//! Run configuration: a TOML file, then command-line overrides on top.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use mailscreen::classifiers::{LogisticParams, SvmParams, SvmSolver};
use mailscreen::evaluation::GridConfig;
use mailscreen::{ClassifierKind, Hyperparams, ReportStyle, SelectionScheme, SyntheticParams};

use crate::UsageError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub stratified: Option<bool>,
    pub in_fold_selection: Option<bool>,
    pub schemes: Option<Vec<String>>,
    pub classifiers: Option<Vec<String>>,
    pub lexicon: Option<PathBuf>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub logistic: LogisticSection,
    #[serde(default)]
    pub naive_bayes: NaiveBayesSection,
    #[serde(default)]
    pub svm: SvmSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub manifest: Option<PathBuf>,
    pub n: Option<usize>,
    pub positive_ratio: Option<f64>,
    pub noise_terms: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticSection {
    pub learning_rate: Option<f64>,
    pub max_epochs: Option<usize>,
    pub tolerance: Option<f64>,
    pub l2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NaiveBayesSection {
    pub alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmSection {
    pub c: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_epochs: Option<usize>,
    pub solver: Option<String>,
}

impl FileConfig {
    /// Relative paths inside the file resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| UsageError(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.lexicon, &mut cfg.out, &mut cfg.corpus.manifest]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Where the emails come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Manifest(PathBuf),
    Synthetic(SyntheticParams),
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: CorpusSource,
    pub lexicon: Option<PathBuf>,
    pub grid: GridConfig,
    /// Schemes and classifiers named explicitly; empty when defaulted.
    pub chosen_schemes: Vec<SelectionScheme>,
    pub chosen_classifiers: Vec<ClassifierKind>,
    pub hyperparams: Hyperparams,
    pub format: ReportStyle,
    pub out: Option<PathBuf>,
}

/// Flags shared by every command that reads a corpus. `None` means "not
/// given", so the config file value (or the default) stays in force.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub schemes: Vec<String>,
    pub classifiers: Vec<String>,
    pub in_fold_selection: bool,
    pub unstratified: bool,
    pub format: Option<String>,
    pub lexicon: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub n: Option<usize>,
    pub ratio: Option<f64>,
    pub noise_terms: Option<usize>,
}

fn parse_list<T>(
    items: &[String],
    parse: impl Fn(&str) -> mailscreen::Result<T>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in items
        .iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        out.push(parse(item).map_err(|e| UsageError(e.to_string()))?);
    }
    Ok(out)
}

fn parse_solver(s: &str) -> Result<SvmSolver> {
    match s.trim().to_ascii_lowercase().as_str() {
        "smo" => Ok(SvmSolver::Smo),
        "subgradient" => Ok(SvmSolver::Subgradient),
        other => Err(UsageError(format!("unknown SVM solver `{other}` (smo, subgradient)")).into()),
    }
}

impl RunConfig {
    pub fn resolve(file: FileConfig, o: Overrides) -> Result<Self> {
        let seed = o.seed.or(file.seed).unwrap_or(GridConfig::default().seed);

        let corpus = match o.manifest.or(file.corpus.manifest) {
            Some(path) => CorpusSource::Manifest(path),
            None => {
                let d = SyntheticParams::default();
                CorpusSource::Synthetic(SyntheticParams {
                    n: o.n.or(file.corpus.n).unwrap_or(d.n),
                    positive_ratio: o
                        .ratio
                        .or(file.corpus.positive_ratio)
                        .unwrap_or(d.positive_ratio),
                    noise_terms: o
                        .noise_terms
                        .or(file.corpus.noise_terms)
                        .unwrap_or(d.noise_terms),
                    seed,
                })
            }
        };

        let scheme_names = if o.schemes.is_empty() {
            file.schemes.unwrap_or_default()
        } else {
            o.schemes
        };
        let chosen_schemes = parse_list(&scheme_names, |s| s.parse::<SelectionScheme>())?;
        let kind_names = if o.classifiers.is_empty() {
            file.classifiers.unwrap_or_default()
        } else {
            o.classifiers
        };
        let chosen_classifiers = parse_list(&kind_names, |s| s.parse::<ClassifierKind>())?;
        let schemes = if chosen_schemes.is_empty() {
            SelectionScheme::ALL.to_vec()
        } else {
            chosen_schemes.clone()
        };
        let classifiers = if chosen_classifiers.is_empty() {
            ClassifierKind::ALL.to_vec()
        } else {
            chosen_classifiers.clone()
        };

        let k = o.k.or(file.k).unwrap_or(GridConfig::default().k);
        if k < 2 {
            return Err(UsageError(format!("--k must be at least 2, got {k}")).into());
        }
        let grid = GridConfig {
            k,
            seed,
            stratified: !o.unstratified && file.stratified.unwrap_or(true),
            in_fold_selection: o.in_fold_selection || file.in_fold_selection.unwrap_or(false),
            schemes,
            classifiers,
            ..GridConfig::default()
        };

        let dl = LogisticParams::default();
        let ds = SvmParams::default();
        let hyperparams = Hyperparams {
            logistic: LogisticParams {
                learning_rate: file.logistic.learning_rate.unwrap_or(dl.learning_rate),
                max_epochs: file.logistic.max_epochs.unwrap_or(dl.max_epochs),
                tolerance: file.logistic.tolerance.unwrap_or(dl.tolerance),
                l2: file.logistic.l2.unwrap_or(dl.l2),
            },
            nb_alpha: file.naive_bayes.alpha.unwrap_or(1.0),
            svm: SvmParams {
                c: file.svm.c.unwrap_or(ds.c),
                tolerance: file.svm.tolerance.unwrap_or(ds.tolerance),
                max_epochs: file.svm.max_epochs.unwrap_or(ds.max_epochs),
                seed: ds.seed,
                solver: file
                    .svm
                    .solver
                    .as_deref()
                    .map(parse_solver)
                    .transpose()?
                    .unwrap_or(ds.solver),
            },
        };
        hyperparams
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;

        let format = match o.format.or(file.format) {
            Some(f) => f
                .parse::<ReportStyle>()
                .map_err(|e| UsageError(e.to_string()))?,
            None => ReportStyle::Markdown,
        };

        Ok(RunConfig {
            corpus,
            lexicon: o.lexicon.or(file.lexicon),
            grid,
            chosen_schemes,
            chosen_classifiers,
            hyperparams,
            format,
            out: o.out.or(file.out),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_the_full_grid() {
        let cfg = RunConfig::resolve(FileConfig::default(), Overrides::default()).unwrap();
        assert_eq!(cfg.grid, GridConfig::default());
        assert_eq!(
            cfg.corpus,
            CorpusSource::Synthetic(SyntheticParams::default())
        );
        assert_eq!(cfg.hyperparams, Hyperparams::default());
        assert_eq!(cfg.format, ReportStyle::Markdown);
    }

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig =
            toml::from_str("seed = 3\nk = 5\nschemes = [\"wfs\"]\n[svm]\nc = 10.0\n").unwrap();
        let o = Overrides {
            k: Some(4),
            schemes: vec!["cse-gss,ig-r".into()],
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(file, o).unwrap();
        assert_eq!(cfg.grid.seed, 3);
        assert_eq!(cfg.grid.k, 4);
        assert_eq!(cfg.grid.schemes.len(), 2);
        assert_eq!(cfg.hyperparams.svm.c, 10.0);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let bad = Overrides {
            classifiers: vec!["perceptron".into()],
            ..Overrides::default()
        };
        let err = RunConfig::resolve(FileConfig::default(), bad).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
