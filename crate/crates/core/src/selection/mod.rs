//! Filter feature selection: five evaluators, four search strategies and
//! the ten schemes built from them.

pub mod evaluators;
pub mod search;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::matrix::FeatureMatrix;

pub use evaluators::{
    cfs_merit, consistency_merit, eval_chisquare, eval_gainratio, eval_infogain, CfsEvaluator,
    ConsistencyEvaluator, SubsetEvaluator,
};
pub use search::{
    search_bestfirst, search_greedy_stepwise, search_rank_search, search_ranker,
    AttributeEvaluator, RankedList,
};

/// Merit comparisons treat differences below this as ties.
pub const MERIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluator {
    None,
    Cfs,
    Consistency,
    InfoGain,
    GainRatio,
    ChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Search {
    None,
    BestFirst,
    GreedyStepwise,
    RankSearch,
    Ranker,
}

/// The ten evaluator/search pairings, numbered 1 to 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SelectionScheme {
    Wfs,
    CfsBestFirst,
    CfsGreedyStepwise,
    CfsRankSearch,
    ConsistencyBestFirst,
    ConsistencyGreedyStepwise,
    ConsistencyRankSearch,
    GainRatioRanker,
    InfoGainRanker,
    ChiSquareRanker,
}

impl SelectionScheme {
    pub const ALL: [SelectionScheme; 10] = [
        SelectionScheme::Wfs,
        SelectionScheme::CfsBestFirst,
        SelectionScheme::CfsGreedyStepwise,
        SelectionScheme::CfsRankSearch,
        SelectionScheme::ConsistencyBestFirst,
        SelectionScheme::ConsistencyGreedyStepwise,
        SelectionScheme::ConsistencyRankSearch,
        SelectionScheme::GainRatioRanker,
        SelectionScheme::InfoGainRanker,
        SelectionScheme::ChiSquareRanker,
    ];

    pub fn label(self) -> u8 {
        SelectionScheme::ALL
            .iter()
            .position(|&s| s == self)
            .expect("listed") as u8
            + 1
    }

    pub fn from_label(label: u8) -> Option<Self> {
        (1..=10)
            .contains(&label)
            .then(|| SelectionScheme::ALL[label as usize - 1])
    }

    pub fn parts(self) -> (Evaluator, Search) {
        use Evaluator as E;
        use Search as S;
        use SelectionScheme::*;
        match self {
            Wfs => (E::None, S::None),
            CfsBestFirst => (E::Cfs, S::BestFirst),
            CfsGreedyStepwise => (E::Cfs, S::GreedyStepwise),
            CfsRankSearch => (E::Cfs, S::RankSearch),
            ConsistencyBestFirst => (E::Consistency, S::BestFirst),
            ConsistencyGreedyStepwise => (E::Consistency, S::GreedyStepwise),
            ConsistencyRankSearch => (E::Consistency, S::RankSearch),
            GainRatioRanker => (E::GainRatio, S::Ranker),
            InfoGainRanker => (E::InfoGain, S::Ranker),
            ChiSquareRanker => (E::ChiSquare, S::Ranker),
        }
    }

    /// Short CLI name, e.g. `cse-gss`.
    pub fn mnemonic(self) -> &'static str {
        use SelectionScheme::*;
        match self {
            Wfs => "wfs",
            CfsBestFirst => "cfs-bfs",
            CfsGreedyStepwise => "cfs-gss",
            CfsRankSearch => "cfs-rs",
            ConsistencyBestFirst => "cse-bfs",
            ConsistencyGreedyStepwise => "cse-gss",
            ConsistencyRankSearch => "cse-rs",
            GainRatioRanker => "gr-r",
            InfoGainRanker => "ig-r",
            ChiSquareRanker => "chi-r",
        }
    }

    /// Long name used in report tables.
    pub fn display_name(self) -> &'static str {
        use SelectionScheme::*;
        match self {
            Wfs => "Without Feature Selection",
            CfsBestFirst => "CfsSubsetEval, BestFirst Search",
            CfsGreedyStepwise => "CfsSubsetEval, GreedyStepwise Search",
            CfsRankSearch => "CfsSubsetEval, RankSearch",
            ConsistencyBestFirst => "ConsistencySubsetEval, BestFirst Search",
            ConsistencyGreedyStepwise => "ConsistencySubsetEval, GreedyStepwise Search",
            ConsistencyRankSearch => "ConsistencySubsetEval, Rank Search",
            GainRatioRanker => "GainRatio, Ranker Search",
            InfoGainRanker => "InfoGain, Ranker Search",
            ChiSquareRanker => "ChiSquare, Ranker Search",
        }
    }
}

impl fmt::Display for SelectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for SelectionScheme {
    type Err = Error;

    /// Accepts the mnemonic (case-insensitive) or the numeric label.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Ok(n) = t.parse::<u8>() {
            return SelectionScheme::from_label(n)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme label {n}")));
        }
        SelectionScheme::ALL
            .into_iter()
            .find(|sc| sc.mnemonic().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme `{t}`")))
    }
}

/// Strictly increasing attribute indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        FeatureSubset(indices)
    }

    pub fn full(d: usize) -> Self {
        FeatureSubset((0..d).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tunables for the search strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    /// Consecutive non-improving expansions before best-first gives up.
    pub best_first_max_stale: usize,
    /// Attribute ranking used to build rank-search prefixes.
    pub rank_search_evaluator: AttributeEvaluator,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            best_first_max_stale: 5,
            rank_search_evaluator: AttributeEvaluator::InfoGain,
        }
    }
}

/// Output of running a scheme on a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub scheme: SelectionScheme,
    pub subset: FeatureSubset,
    /// Present for the Ranker schemes.
    pub ranking: Option<RankedList>,
    /// Subset merit under the scheme's subset evaluator, when it has one.
    pub merit: Option<f64>,
}

impl Selection {
    /// Selected attribute indices in presentation order (ranked order for
    /// Ranker schemes).
    pub fn ordered_indices(&self) -> Vec<usize> {
        match &self.ranking {
            Some(r) => r.order(),
            None => self.subset.indices().to_vec(),
        }
    }
}

pub fn select(scheme: SelectionScheme, matrix: &FeatureMatrix) -> Selection {
    select_with(scheme, matrix, &SelectionConfig::default())
}

pub fn select_with(
    scheme: SelectionScheme,
    matrix: &FeatureMatrix,
    config: &SelectionConfig,
) -> Selection {
    let d = matrix.n_attrs();
    let (evaluator, search) = scheme.parts();

    fn run<E: SubsetEvaluator>(
        eval: &E,
        search: Search,
        matrix: &FeatureMatrix,
        config: &SelectionConfig,
    ) -> (Vec<usize>, f64) {
        let subset = match search {
            Search::BestFirst => search_bestfirst(eval, config.best_first_max_stale),
            Search::GreedyStepwise => search_greedy_stepwise(eval),
            Search::RankSearch => search_rank_search(matrix, eval, config.rank_search_evaluator),
            Search::None | Search::Ranker => unreachable!("not a subset search"),
        };
        let merit = eval.merit(&subset);
        (subset, merit)
    }

    let (subset, ranking, merit) = match evaluator {
        Evaluator::None => (FeatureSubset::full(d), None, None),
        Evaluator::Cfs => {
            let (s, m) = run(&CfsEvaluator::new(matrix), search, matrix, config);
            (FeatureSubset::new(s), None, Some(m))
        }
        Evaluator::Consistency => {
            let (s, m) = run(&ConsistencyEvaluator::new(matrix), search, matrix, config);
            (FeatureSubset::new(s), None, Some(m))
        }
        Evaluator::InfoGain | Evaluator::GainRatio | Evaluator::ChiSquare => {
            let attr_eval = match evaluator {
                Evaluator::InfoGain => AttributeEvaluator::InfoGain,
                Evaluator::GainRatio => AttributeEvaluator::GainRatio,
                _ => AttributeEvaluator::ChiSquare,
            };
            // the ranker keeps every attribute; only the order is informative
            let ranking = search_ranker(matrix, attr_eval);
            (FeatureSubset::full(d), Some(ranking), None)
        }
    };
    Selection {
        scheme,
        subset,
        ranking,
        merit,
    }
}
