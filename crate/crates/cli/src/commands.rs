use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use mailscreen::arff::{import_arff, to_arff_string};
use mailscreen::classifiers::model_io::SavedModel;
use mailscreen::evaluation::{parse_report_csv, render_csv, render_markdown, run_grid_with};
use mailscreen::selection::select_with;
use mailscreen::{
    build_matrix, extract_features, format_report, generate_synthetic_corpus, load_corpus,
    parse_email, train, FeatureMatrix, LabeledCorpus, Lexicon, ReportStyle, SelectionScheme,
};

use crate::config::{CorpusSource, FileConfig, Overrides, RunConfig};
use crate::{Command, CommonArgs, UsageError};

const RELATION: &str = "suspicious_email";
const DEFAULT_REPORT_DIR: &str = "reports";
const DEFAULT_MODEL: &str = "model.txt";

pub fn run(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Ingest(args) => ingest(&resolve(args)?, out),
        Command::Features { common, arff } => features(&resolve(common)?, arff, out),
        Command::Select { common, arff } => select(&resolve(common)?, arff, out),
        Command::Grid(args) => grid(&resolve(args)?, out),
        Command::Train { common, model } => train_model(&resolve(common)?, model, out),
        Command::Score {
            model,
            email,
            lexicon,
        } => score(&model, &email, lexicon.as_deref(), out),
        Command::Report {
            csv,
            format,
            out: path,
        } => report(&csv, format.as_deref(), path, out),
    }
}

fn resolve(args: CommonArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(
        file,
        Overrides {
            seed: args.seed,
            k: args.k,
            schemes: args.scheme,
            classifiers: args.classifier,
            in_fold_selection: args.in_fold_selection,
            unstratified: args.unstratified,
            format: args.format,
            lexicon: args.lexicon,
            out: args.out,
            manifest: args.corpus,
            n: args.n,
            ratio: args.ratio,
            noise_terms: args.noise_terms,
        },
    )
}

fn lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        Some(p) => Ok(Lexicon::load(p)?),
        None => Ok(Lexicon::default_lexicon()),
    }
}

fn corpus(cfg: &RunConfig, lex: &Lexicon) -> Result<LabeledCorpus> {
    Ok(match &cfg.corpus {
        CorpusSource::Manifest(path) => load_corpus(path)?,
        CorpusSource::Synthetic(params) => generate_synthetic_corpus(params, lex)?,
    })
}

fn matrix(cfg: &RunConfig) -> Result<FeatureMatrix> {
    let lex = lexicon(cfg.lexicon.as_deref())?;
    Ok(build_matrix(&corpus(cfg, &lex)?, &lex)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn one_of<T: Copy>(items: &[T], flag: &str, default: Option<T>) -> Result<T> {
    match (items, default) {
        ([one], _) => Ok(*one),
        ([], Some(d)) => Ok(d),
        ([], None) => Err(UsageError(format!("{flag} is required")).into()),
        _ => Err(UsageError(format!("{flag} takes exactly one value here")).into()),
    }
}

fn ingest(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let lex = lexicon(cfg.lexicon.as_deref())?;
    let corpus = corpus(cfg, &lex)?;
    writeln!(out, "{}", corpus.summary())?;
    if let Some(path) = &cfg.out {
        write_file(path, &corpus.to_manifest())?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn features(cfg: &RunConfig, arff: Option<PathBuf>, out: &mut impl Write) -> Result<()> {
    let m = matrix(cfg)?;
    let text = to_arff_string(&m, RELATION)?;
    match arff.or_else(|| cfg.out.clone()) {
        Some(path) => {
            write_file(&path, &text)?;
            writeln!(
                out,
                "wrote {} ({} rows, {} attributes)",
                path.display(),
                m.n_rows(),
                m.n_attrs()
            )?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn select(cfg: &RunConfig, arff: Option<PathBuf>, out: &mut impl Write) -> Result<()> {
    let scheme = one_of(&cfg.chosen_schemes, "--scheme", None)?;
    let m = match arff {
        Some(path) => import_arff(path)?,
        None => matrix(cfg)?,
    };
    let sel = select_with(scheme, &m, &cfg.grid.selection);
    writeln!(
        out,
        "scheme {} {} ({})",
        scheme.label(),
        scheme.mnemonic(),
        scheme.display_name()
    )?;
    match sel.merit {
        Some(merit) => writeln!(out, "merit {merit:.10}")?,
        None => writeln!(out, "merit n/a")?,
    }
    writeln!(out, "selected {}/{}", sel.subset.len(), m.n_attrs())?;
    match &sel.ranking {
        Some(ranking) => {
            for &(attr, score) in ranking.entries() {
                writeln!(out, "{}\t{score:.10}", m.names()[attr])?;
            }
        }
        None => {
            for attr in sel.ordered_indices() {
                writeln!(out, "{}", m.names()[attr])?;
            }
        }
    }
    Ok(())
}

fn grid(cfg: &RunConfig, out: &mut impl Write) -> Result<()> {
    let m = matrix(cfg)?;
    let report = run_grid_with(&m, &cfg.hyperparams, &cfg.grid)?;
    let markdown = format_report(&report, ReportStyle::Markdown);
    let csv = format_report(&report, ReportStyle::Csv);
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT_DIR));
    write_file(&dir.join("report.md"), &markdown)?;
    write_file(&dir.join("report.csv"), &csv)?;
    out.write_all(match cfg.format {
        ReportStyle::Markdown => markdown.as_bytes(),
        ReportStyle::Csv => csv.as_bytes(),
    })?;
    Ok(())
}

fn train_model(cfg: &RunConfig, model: Option<PathBuf>, out: &mut impl Write) -> Result<()> {
    let kind = one_of(&cfg.chosen_classifiers, "--classifier", None)?;
    let scheme = one_of(&cfg.chosen_schemes, "--scheme", Some(SelectionScheme::Wfs))?;
    let m = matrix(cfg)?;
    let attrs = select_with(scheme, &m, &cfg.grid.selection).subset;
    let projected = m.project(attrs.indices());
    let trained = train(kind, &projected, &cfg.hyperparams)?;
    let saved = SavedModel::new(projected.names().to_vec(), trained)?;
    let path = model
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_MODEL));
    write_file(&path, &saved.to_text())?;
    writeln!(
        out,
        "trained {} on {} emails, {} of {} attributes ({}) -> {}",
        kind.display_name(),
        m.n_rows(),
        projected.n_attrs(),
        m.n_attrs(),
        scheme.mnemonic(),
        path.display()
    )?;
    Ok(())
}

fn score(
    model: &Path,
    email: &Path,
    lexicon_path: Option<&Path>,
    out: &mut impl Write,
) -> Result<()> {
    let saved = SavedModel::load(model)?;
    let lex = lexicon(lexicon_path)?;
    let raw =
        std::fs::read_to_string(email).with_context(|| format!("reading {}", email.display()))?;
    let parsed = parse_email(&raw).with_context(|| email.display().to_string())?;
    let fv = extract_features(&parsed, &lex);

    let names = lex.attribute_names();
    let mut columns = Vec::with_capacity(saved.attribute_names.len());
    for name in &saved.attribute_names {
        match names.iter().position(|n| n == name) {
            Some(i) => columns.push(i),
            None => bail!("model expects attribute `{name}`, which the lexicon does not produce"),
        }
    }
    let fv = fv.project(&columns);
    writeln!(out, "{}", saved.model.predict(&fv)?)?;
    if let Ok(p) = saved.model.predict_proba(&fv) {
        writeln!(out, "probability {p:.6}")?;
    }
    Ok(())
}

fn report(
    csv: &Path,
    format: Option<&str>,
    path: Option<PathBuf>,
    out: &mut impl Write,
) -> Result<()> {
    let style = match format {
        Some(f) => f
            .parse::<ReportStyle>()
            .map_err(|e| UsageError(e.to_string()))?,
        None => ReportStyle::Markdown,
    };
    let text =
        std::fs::read_to_string(csv).with_context(|| format!("reading {}", csv.display()))?;
    let rows = parse_report_csv(&text)?;
    let rendered = match style {
        ReportStyle::Markdown => render_markdown(&rows, None),
        ReportStyle::Csv => render_csv(&rows),
    };
    match path {
        Some(p) => write_file(&p, &rendered)?,
        None => out.write_all(rendered.as_bytes())?,
    }
    Ok(())
}
