use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mailscreen::arff::parse_arff;
use mailscreen::evaluation::parse_report_csv;

fn appendix() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/appendix")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mailscreen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_summarises_the_default_corpus() {
    assert_eq!(
        stdout(&run(&["ingest"])).trim(),
        "56 emails, 25 Yes / 31 No"
    );
}

#[test]
fn ingest_writes_a_manifest_that_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("corpus.tsv");
    stdout(&run(&["ingest", "--out", path_str(&manifest)]));
    let again = stdout(&run(&["ingest", "--corpus", path_str(&manifest)]));
    assert_eq!(again.trim(), "56 emails, 25 Yes / 31 No");
}

#[test]
fn empty_manifest_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("empty.tsv");
    std::fs::write(&manifest, "# label\tpath\n").unwrap();
    let out = run(&["ingest", "--corpus", path_str(&manifest)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty corpus"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["grid", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["grid", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["select", "--scheme", "nope"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn features_of_the_appendix_round_trip_through_arff() {
    let manifest = appendix().join("manifest.tsv");
    let text = stdout(&run(&["features", "--corpus", path_str(&manifest)]));
    let m = parse_arff(&text).unwrap();
    assert_eq!((m.n_rows(), m.n_attrs()), (4, 19));
    assert_eq!(m.positive_count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let arff = dir.path().join("appendix.arff");
    let args = [
        "features",
        "--corpus",
        path_str(&manifest),
        "--arff",
        path_str(&arff),
    ];
    stdout(&run(&args));
    assert_eq!(std::fs::read_to_string(&arff).unwrap(), text);
}

#[test]
fn missing_lexicon_is_reported() {
    let out = run(&["features", "--lexicon", "/nonexistent/lexicon.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn select_reports_full_and_proper_subsets() {
    for scheme in ["wfs", "ig-r"] {
        let text = stdout(&run(&["select", "--scheme", scheme]));
        assert!(text.contains("selected 19/19"), "{scheme}: {text}");
    }
    let ranked = stdout(&run(&["select", "--scheme", "ig-r"]));
    assert!(ranked.contains("merit n/a"));
    assert_eq!(ranked.lines().filter(|l| l.contains('\t')).count(), 19);

    let text = stdout(&run(&["select", "--scheme", "cse-gss"]));
    let line = text.lines().find(|l| l.starts_with("selected ")).unwrap();
    let (k, d) = line["selected ".len()..].split_once('/').unwrap();
    let k: usize = k.parse().unwrap();
    assert!(k > 0 && k < d.parse().unwrap(), "{line}");
    assert_eq!(text.lines().skip(3).count(), k);
}

#[test]
fn select_needs_exactly_one_scheme() {
    assert_eq!(run(&["select"]).status.code(), Some(2));
    assert_eq!(
        run(&["select", "--scheme", "wfs", "--scheme", "cfs-bfs"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn grid_writes_both_reports_with_ranker_rows_matching() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let printed = stdout(&run(&["grid", "--format", "csv", "--out", path_str(&out)]));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(printed, csv);
    assert!(out.join("report.md").exists());

    let rows = parse_report_csv(&csv).unwrap();
    assert_eq!(rows.len(), 40);
    let accuracy = |classifier: &str, scheme: u8| {
        rows.iter()
            .find(|r| r.kind.tag() == classifier && r.scheme.label() == scheme)
            .map(|r| r.pooled.clone())
            .unwrap()
    };
    for classifier in ["logistic", "naive_bayes", "id3", "svm_linear"] {
        for scheme in 8..=10 {
            assert_eq!(accuracy(classifier, scheme), accuracy(classifier, 1));
        }
    }
}

#[test]
fn report_rerenders_a_saved_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    stdout(&run(&["grid", "--out", path_str(&out)]));
    let csv_path = out.join("report.csv");
    let md = stdout(&run(&["report", "--csv", path_str(&csv_path)]));
    assert!(md.contains("| # | Method |"));
    let csv = stdout(&run(&[
        "report",
        "--csv",
        path_str(&csv_path),
        "--format",
        "csv",
    ]));
    assert_eq!(csv, std::fs::read_to_string(&csv_path).unwrap());
}

#[test]
fn train_then_score_an_appendix_email() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("nb.model");
    stdout(&run(&[
        "train",
        "--classifier",
        "naive_bayes",
        "--model",
        path_str(&model),
    ]));
    let email = appendix().join("email3.txt");
    let text = stdout(&run(&[
        "score",
        "--model",
        path_str(&model),
        "--email",
        path_str(&email),
    ]));
    let mut lines = text.lines();
    assert!(matches!(lines.next(), Some("Yes" | "No")), "{text}");
    let p: f64 = lines
        .next()
        .and_then(|l| l.strip_prefix("probability "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&p));

    let tree = dir.path().join("id3.model");
    stdout(&run(&[
        "train",
        "--classifier",
        "id3",
        "--model",
        path_str(&tree),
    ]));
    let text = stdout(&run(&[
        "score",
        "--model",
        path_str(&tree),
        "--email",
        path_str(&email),
    ]));
    assert_eq!(text.trim(), "Yes");
}

#[test]
fn scoring_rejects_empty_emails_and_foreign_lexicons() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    stdout(&run(&[
        "train",
        "--classifier",
        "logistic",
        "--model",
        path_str(&model),
    ]));

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let out = run(&[
        "score",
        "--model",
        path_str(&model),
        "--email",
        path_str(&empty),
    ]);
    assert_eq!(out.status.code(), Some(3));

    let lexicon = dir.path().join("tiny.txt");
    std::fs::write(
        &lexicon,
        "[keywords]\nbomb\n[suspicious]\nplan\n[nonsuspicious]\nsad\n",
    )
    .unwrap();
    let email = appendix().join("email2.txt");
    let out = run(&[
        "score",
        "--model",
        path_str(&model),
        "--email",
        path_str(&email),
        "--lexicon",
        path_str(&lexicon),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn config_file_sets_the_corpus_and_folds() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "seed = 3\nk = 5\n\n[corpus]\nn = 40\n").unwrap();
    let text = stdout(&run(&["ingest", "--config", path_str(&config)]));
    assert!(text.starts_with("40 emails"), "{text}");
    // command-line flags win over the file
    let text = stdout(&run(&[
        "ingest",
        "--config",
        path_str(&config),
        "--n",
        "30",
    ]));
    assert!(text.starts_with("30 emails"), "{text}");

    std::fs::write(&config, "seeed = 3\n").unwrap();
    assert_eq!(
        run(&["ingest", "--config", path_str(&config)])
            .status
            .code(),
        Some(2)
    );
}
