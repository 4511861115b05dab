//! Subset search strategies and the attribute ranker.

use std::collections::HashSet;

use super::evaluators::{eval_chisquare, eval_gainratio, eval_infogain, SubsetEvaluator};
use super::MERIT_TOL;
use crate::matrix::FeatureMatrix;

/// Single-attribute scoring functions usable by the ranker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeEvaluator {
    InfoGain,
    GainRatio,
    ChiSquare,
}

impl AttributeEvaluator {
    pub fn score(self, matrix: &FeatureMatrix, attr: usize) -> f64 {
        match self {
            AttributeEvaluator::InfoGain => eval_infogain(matrix, attr),
            AttributeEvaluator::GainRatio => eval_gainratio(matrix, attr),
            AttributeEvaluator::ChiSquare => eval_chisquare(matrix, attr),
        }
    }
}

/// Every attribute with its score, best first; ties by ascending index.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList(Vec<(usize, f64)>);

impl RankedList {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn order(&self) -> Vec<usize> {
        self.0.iter().map(|&(a, _)| a).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn search_ranker(matrix: &FeatureMatrix, evaluator: AttributeEvaluator) -> RankedList {
    let mut scored: Vec<(usize, f64)> = (0..matrix.n_attrs())
        .map(|a| (a, evaluator.score(matrix, a)))
        .collect();
    scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    RankedList(scored)
}

fn with_attr(subset: &[usize], attr: usize) -> Vec<usize> {
    let mut s = subset.to_vec();
    let pos = s.partition_point(|&x| x < attr);
    s.insert(pos, attr);
    s
}

/// Best single attribute (lowest index among near-ties).
fn best_single<E: SubsetEvaluator + ?Sized>(eval: &E) -> Vec<usize> {
    let merits: Vec<f64> = (0..eval.n_attrs()).map(|a| eval.merit(&[a])).collect();
    pick_near_max(&merits).map(|a| vec![a]).unwrap_or_default()
}

/// Lowest index whose value is within tolerance of the maximum.
fn pick_near_max(values: &[f64]) -> Option<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= max - MERIT_TOL)
}

/// Forward selection from the empty set, one attribute per step.
pub fn search_greedy_stepwise<E: SubsetEvaluator + ?Sized>(eval: &E) -> Vec<usize> {
    let d = eval.n_attrs();
    let mut current: Vec<usize> = Vec::new();
    let mut current_merit = eval.merit(&current);
    loop {
        let candidates: Vec<(usize, f64)> = (0..d)
            .filter(|a| current.binary_search(a).is_err())
            .map(|a| (a, eval.merit(&with_attr(&current, a))))
            .collect();
        let merits: Vec<f64> = candidates.iter().map(|c| c.1).collect();
        let Some(pos) = pick_near_max(&merits) else {
            break;
        };
        let (attr, merit) = candidates[pos];
        if merit > current_merit + MERIT_TOL {
            current = with_attr(&current, attr);
            current_merit = merit;
        } else {
            break;
        }
    }
    if current.is_empty() {
        return best_single(eval);
    }
    current
}

struct OpenNode {
    subset: Vec<usize>,
    merit: f64,
}

/// Forward best-first search with backtracking through an open list.
///
/// Stops after `max_stale` consecutive expansions that fail to improve the
/// best merit seen, or when the open list is exhausted.
pub fn search_bestfirst<E: SubsetEvaluator + ?Sized>(eval: &E, max_stale: usize) -> Vec<usize> {
    let d = eval.n_attrs();
    let start_merit = eval.merit(&[]);
    let mut best: (Vec<usize>, f64) = (Vec::new(), start_merit);
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    visited.insert(Vec::new());
    // insertion order doubles as the tie-break among near-equal merits
    let mut open = vec![OpenNode {
        subset: Vec::new(),
        merit: start_merit,
    }];
    let mut stale = 0;
    while stale < max_stale && !open.is_empty() {
        let merits: Vec<f64> = open.iter().map(|n| n.merit).collect();
        let pos = pick_near_max(&merits).expect("open list non-empty");
        let node = open.remove(pos);
        let mut improved = false;
        for a in (0..d).filter(|a| node.subset.binary_search(a).is_err()) {
            let child = with_attr(&node.subset, a);
            if !visited.insert(child.clone()) {
                continue;
            }
            let merit = eval.merit(&child);
            if merit > best.1 + MERIT_TOL {
                best = (child.clone(), merit);
                improved = true;
            }
            open.push(OpenNode {
                subset: child,
                merit,
            });
        }
        if improved {
            stale = 0;
        } else {
            stale += 1;
        }
    }
    if best.0.is_empty() {
        return best_single(eval);
    }
    best.0
}

/// Evaluates nested prefixes of an attribute ranking and keeps the one with
/// the highest merit (shortest on ties).
pub fn search_rank_search<E: SubsetEvaluator + ?Sized>(
    matrix: &FeatureMatrix,
    eval: &E,
    ranking: AttributeEvaluator,
) -> Vec<usize> {
    let order = search_ranker(matrix, ranking).order();
    let mut best: Option<(usize, f64)> = None;
    for len in 1..=order.len() {
        let mut prefix = order[..len].to_vec();
        prefix.sort_unstable();
        let merit = eval.merit(&prefix);
        if best.is_none_or(|(_, m)| merit > m + MERIT_TOL) {
            best = Some((len, merit));
        }
    }
    let mut subset = best
        .map(|(len, _)| order[..len].to_vec())
        .unwrap_or_default();
    subset.sort_unstable();
    subset
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::matrix::FeatureVector;
    use crate::selection::evaluators::{CfsEvaluator, ConsistencyEvaluator};

    fn matrix(cols: &[&[u8]], labels: &[u8]) -> FeatureMatrix {
        let rows = (0..labels.len())
            .map(|r| FeatureVector::new(cols.iter().map(|c| c[r]).collect()))
            .collect();
        FeatureMatrix::new(
            (0..cols.len()).map(|i| format!("a{i}")).collect(),
            rows,
            labels.iter().map(|&l| Label::from_bool(l == 1)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn greedy_drops_constant_attribute() {
        let m = matrix(&[&[1, 1, 1, 1], &[1, 1, 0, 0]], &[1, 1, 0, 0]);
        assert_eq!(search_greedy_stepwise(&CfsEvaluator::new(&m)), vec![1]);
    }

    #[test]
    fn greedy_all_constant_falls_back_to_first() {
        let m = matrix(&[&[1, 1, 1, 1], &[0, 0, 0, 0]], &[1, 1, 0, 0]);
        assert_eq!(search_greedy_stepwise(&CfsEvaluator::new(&m)), vec![0]);
        assert_eq!(search_bestfirst(&CfsEvaluator::new(&m), 5), vec![0]);
    }

    #[test]
    fn bestfirst_keeps_informative_under_consistency() {
        let m = matrix(
            &[
                &[0, 1, 0, 1, 0, 1],
                &[1, 1, 0, 0, 1, 0],
                &[1, 1, 0, 0, 0, 0],
                &[0, 0, 1, 1, 0, 1],
            ],
            &[1, 1, 0, 0, 1, 0],
        );
        let s = search_bestfirst(&ConsistencyEvaluator::new(&m), 5);
        assert!(s.contains(&1), "{s:?}");
    }

    #[test]
    fn ranker_orders_by_score_then_index() {
        let m = matrix(
            &[&[1, 1, 1, 1], &[1, 1, 0, 0], &[0, 0, 0, 0]],
            &[1, 1, 0, 0],
        );
        let r = search_ranker(&m, AttributeEvaluator::InfoGain);
        assert_eq!(r.order(), vec![1, 0, 2]);
    }

    #[test]
    fn rank_search_single_attribute() {
        let m = matrix(&[&[1, 0, 1, 0]], &[1, 1, 0, 0]);
        let s = search_rank_search(&m, &CfsEvaluator::new(&m), AttributeEvaluator::InfoGain);
        assert_eq!(s, vec![0]);
    }

    #[test]
    fn rank_search_skips_redundant_copies() {
        // a0, a1 jointly informative; a2, a3 copies of a0
        let a0: &[u8] = &[1, 1, 0, 0, 1, 0, 1, 0];
        let a1: &[u8] = &[1, 0, 1, 0, 1, 1, 0, 0];
        let y: &[u8] = &[1, 1, 1, 0, 1, 1, 1, 0];
        let m = matrix(&[a0, a1, a0, a0], y);
        let cfs = CfsEvaluator::new(&m);
        let s = search_rank_search(&m, &cfs, AttributeEvaluator::InfoGain);
        let prefixes: Vec<f64> = (1..=4)
            .map(|k| {
                let mut p = search_ranker(&m, AttributeEvaluator::InfoGain).order()[..k].to_vec();
                p.sort_unstable();
                cfs.merit(&p)
            })
            .collect();
        let max = prefixes.iter().copied().fold(f64::MIN, f64::max);
        assert!((cfs.merit(&s) - max).abs() < 1e-12);
        assert!(s.len() < 4, "{s:?}");
    }
}
