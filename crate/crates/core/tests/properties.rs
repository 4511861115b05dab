use proptest::prelude::*;

use mailscreen::classifiers::NaiveBayesModel;
use mailscreen::evaluation::cross_validate_subset;
use mailscreen::lexicon::evidence;
use mailscreen::selection::evaluators::entropy;
use mailscreen::selection::{
    cfs_merit, consistency_merit, eval_chisquare, eval_gainratio, eval_infogain,
};
use mailscreen::*;

fn matrix_from(d: usize, cells: Vec<(Vec<u8>, bool)>) -> FeatureMatrix {
    let names = (0..d).map(|i| format!("a{i}")).collect();
    let (rows, labels): (Vec<_>, Vec<_>) = cells
        .into_iter()
        .map(|(bits, y)| (FeatureVector::new(bits), Label::from_bool(y)))
        .unzip();
    FeatureMatrix::new(names, rows, labels).unwrap()
}

/// Random binary matrices with up to `max_n` rows and `max_d` attributes.
fn matrices(max_n: usize, max_d: usize) -> impl Strategy<Value = FeatureMatrix> {
    (1..=max_d).prop_flat_map(move |d| {
        prop::collection::vec(
            (prop::collection::vec(0u8..=1, d), any::<bool>()),
            2..=max_n,
        )
        .prop_map(move |cells| matrix_from(d, cells))
    })
}

/// Matrices where both classes occur.
fn two_class(max_n: usize, max_d: usize) -> impl Strategy<Value = FeatureMatrix> {
    matrices(max_n, max_d).prop_filter("both classes", |m| {
        let p = m.positive_count();
        p > 0 && p < m.n_rows()
    })
}

fn mask_subset(d: usize, mask: u32) -> Vec<usize> {
    (0..d).filter(|i| mask >> i & 1 == 1).collect()
}

/// Appends a copy of column `attr` as the last attribute.
fn with_copy_of(m: &FeatureMatrix, attr: usize) -> FeatureMatrix {
    let mut names = m.names().to_vec();
    names.push("copy".into());
    let rows = m
        .rows()
        .iter()
        .map(|r| {
            let mut bits = r.bits().to_vec();
            bits.push(r.get(attr));
            FeatureVector::new(bits)
        })
        .collect();
    FeatureMatrix::new(names, rows, m.labels().to_vec()).unwrap()
}

/// H(A) - H(A|C), the other side of the mutual information identity.
fn info_gain_from_attribute_side(m: &FeatureMatrix, attr: usize) -> f64 {
    let mut joint = [[0usize; 2]; 2];
    for (r, l) in m.labels().iter().enumerate() {
        joint[l.is_yes() as usize][m.value(r, attr) as usize] += 1;
    }
    let n = m.n_rows() as f64;
    let h_a = entropy(&[joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]]);
    let h_a_given_c: f64 = joint
        .iter()
        .map(|row| (row[0] + row[1]) as f64 / n * entropy(row))
        .sum();
    h_a - h_a_given_c
}

/// Next to an irrelevant attribute, a copy of a predictive one pulls the
/// mean class correlation up faster than the redundancy term grows.
#[test]
fn duplicate_column_can_raise_cfs_merit_beside_noise() {
    let m = matrix_from(
        2,
        vec![
            (vec![0, 0], false),
            (vec![0, 1], false),
            (vec![1, 0], true),
            (vec![1, 1], true),
        ],
    );
    let widened = with_copy_of(&m, 0);
    let before = cfs_merit(&widened, &[0, 1]);
    let after = cfs_merit(&widened, &[0, 1, 2]);
    assert!((before - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    assert!((after - 2.0 / 5f64.sqrt()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn info_gain_is_symmetric(m in matrices(64, 8)) {
        for a in 0..m.n_attrs() {
            let ig = eval_infogain(&m, a);
            prop_assert!((ig - info_gain_from_attribute_side(&m, a)).abs() <= 1e-12);
        }
    }

    #[test]
    fn attribute_scores_are_bounded(m in matrices(64, 8)) {
        for a in 0..m.n_attrs() {
            prop_assert!(eval_infogain(&m, a) >= -1e-15);
            prop_assert!(eval_chisquare(&m, a) >= 0.0);
            let gr = eval_gainratio(&m, a);
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&gr), "gain ratio {}", gr);
        }
    }

    #[test]
    fn consistency_is_monotone(m in matrices(64, 8), small in any::<u32>(), extra in any::<u32>()) {
        let d = m.n_attrs();
        let s = mask_subset(d, small);
        let bigger = mask_subset(d, small | extra);
        prop_assert!(consistency_merit(&m, &bigger) >= consistency_merit(&m, &s) - 1e-12);
    }

    #[test]
    fn duplicate_of_a_lone_attribute_leaves_cfs_merit_unchanged(m in two_class(64, 6), pick in any::<prop::sample::Index>()) {
        let original = pick.index(m.n_attrs());
        let widened = with_copy_of(&m, original);
        let before = cfs_merit(&widened, &[original]);
        let after = cfs_merit(&widened, &[original, m.n_attrs()]);
        prop_assert!((after - before).abs() <= 1e-12, "{} vs {}", before, after);
    }

    #[test]
    fn every_scheme_is_deterministic(m in two_class(40, 7)) {
        let copy = m.clone();
        for scheme in SelectionScheme::ALL {
            prop_assert_eq!(select(scheme, &m), select(scheme, &copy));
        }
    }

    #[test]
    fn ranker_schemes_keep_everything(m in two_class(40, 8)) {
        for scheme in [SelectionScheme::GainRatioRanker, SelectionScheme::InfoGainRanker, SelectionScheme::ChiSquareRanker] {
            let sel = select(scheme, &m);
            prop_assert_eq!(sel.subset, FeatureSubset::full(m.n_attrs()));
            let mut order = sel.ranking.unwrap().order();
            order.sort_unstable();
            prop_assert_eq!(order, (0..m.n_attrs()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn repeating_a_word_changes_nothing(words in prop::collection::vec("[a-z]{1,8}", 0..20), pick in any::<prop::sample::Index>()) {
        let lex = Lexicon::default_lexicon();
        let mut vocab: Vec<String> = words;
        vocab.extend(["attack", "plan", "condemn", "will", "be"].map(String::from));
        let text = vocab.join(" ");
        let word = &vocab[pick.index(vocab.len())];
        let doubled = format!("{text} {word} {word}");
        prop_assert_eq!(
            lexicon::extract_from_text(&text, &lex),
            lexicon::extract_from_text(&format!("{text} {word}"), &lex)
        );
        prop_assert_eq!(
            lexicon::extract_from_text(&format!("{text} {word}"), &lex),
            lexicon::extract_from_text(&doubled, &lex)
        );
    }

    #[test]
    fn rule_depends_only_on_group_aggregates(a in prop::collection::vec(0u8..=1, 19), b in prop::collection::vec(0u8..=1, 19)) {
        let lex = Lexicon::default_lexicon();
        let (fa, fb) = (FeatureVector::new(a), FeatureVector::new(b));
        if evidence(&fa, &lex).unwrap() == evidence(&fb, &lex).unwrap() {
            prop_assert_eq!(rule_label(&fa, &lex).unwrap(), rule_label(&fb, &lex).unwrap());
        }
    }

    #[test]
    fn synthetic_labels_follow_the_rule(n in 10usize..80, ratio in 0.2f64..0.8, noise in 0usize..6, seed in any::<u64>()) {
        let lex = Lexicon::default_lexicon();
        let params = SyntheticParams { n, positive_ratio: ratio, noise_terms: noise, seed };
        match generate_synthetic_corpus(&params, &lex) {
            Ok(c) => {
                prop_assert_eq!(c.len(), n);
                prop_assert_eq!(c.positive_count(), (n as f64 * ratio).round() as usize);
                for e in c.emails() {
                    prop_assert_eq!(Some(rule_label(&extract_features(e, &lex), &lex).unwrap()), e.label);
                }
            }
            // only when rounding leaves a single class
            Err(_) => {
                let p = (n as f64 * ratio).round() as usize;
                prop_assert!(p == 0 || p == n);
            }
        }
    }

    #[test]
    fn arff_round_trips(m in matrices(40, 8)) {
        let text = arff::to_arff_string(&m, "random").unwrap();
        prop_assert_eq!(arff::parse_arff(&text).unwrap(), m);
    }

    #[test]
    fn folds_partition_the_instances(labels in prop::collection::vec(any::<bool>(), 2..120), k in 2usize..12, seed in any::<u64>(), stratified in any::<bool>()) {
        let labels: Vec<Label> = labels.into_iter().map(Label::from_bool).collect();
        prop_assume!(k <= labels.len());
        let plan = make_folds(&labels, k, seed, stratified).unwrap();
        let mut seen = vec![0usize; labels.len()];
        for f in 0..k {
            for i in plan.test_indices(f) {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        if stratified {
            for class in [Label::No, Label::Yes] {
                let per_fold: Vec<usize> = (0..k)
                    .map(|f| plan.test_indices(f).iter().filter(|&&i| labels[i] == class).count())
                    .collect();
                prop_assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
            }
        }
        prop_assert_eq!(plan, make_folds(&labels, k, seed, stratified).unwrap());
    }

    #[test]
    fn pooled_equals_macro_on_equal_folds(m in two_class(40, 5), k in 2usize..6) {
        // trim to a multiple of k so every fold has the same size
        let keep = m.n_rows() / k * k;
        prop_assume!(keep >= k);
        let rows: Vec<usize> = (0..keep).collect();
        let m = m.select_rows(&rows);
        let plan = make_folds(m.labels(), k, 1, false).unwrap();
        prop_assume!(plan.fold_sizes().iter().all(|&s| s == keep / k));
        let r = cross_validate_subset(ClassifierKind::NaiveBayes, &FeatureSubset::full(m.n_attrs()), &m, &Hyperparams::default(), &plan).unwrap();
        prop_assert!((r.pooled_accuracy() - r.macro_accuracy()).abs() < 1e-9);
        prop_assert_eq!(r.correct(), r.fold_correct.iter().sum::<usize>());
    }

    #[test]
    fn naive_bayes_posteriors_normalize(m in two_class(64, 8), x in prop::collection::vec(0u8..=1, 8)) {
        let nb = NaiveBayesModel::fit(&m, 1.0);
        for p in &nb.conditionals {
            prop_assert!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0);
        }
        let x = &x[..m.n_attrs()];
        // direct products, no logs
        let mut joint = nb.priors;
        for (p, &b) in nb.conditionals.iter().zip(x) {
            for c in 0..2 {
                joint[c] *= if b == 1 { p[c] } else { 1.0 - p[c] };
            }
        }
        let yes = nb.proba_yes(x);
        let no = 1.0 - yes;
        prop_assert!((yes - joint[1] / (joint[0] + joint[1])).abs() <= 1e-12);
        prop_assert!((yes + no - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn training_is_deterministic(m in two_class(40, 6)) {
        let hp = Hyperparams::default();
        for kind in ClassifierKind::ALL {
            prop_assert_eq!(train(kind, &m, &hp).unwrap(), train(kind, &m.clone(), &hp).unwrap());
        }
    }
}
