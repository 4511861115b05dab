//! Single-attribute scores (information gain, gain ratio, chi-square) and
//! subset merits (CFS, consistency). All entropies are in bits.

use std::collections::HashMap;

use crate::matrix::FeatureMatrix;

/// Shannon entropy of a count distribution. Zero counts contribute nothing.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// 2x2 joint counts of two binary sequences, `t[x][y]`.
fn joint_counts(xs: impl Iterator<Item = u8>, ys: impl Iterator<Item = u8>) -> [[usize; 2]; 2] {
    let mut t = [[0usize; 2]; 2];
    for (x, y) in xs.zip(ys) {
        t[x as usize][y as usize] += 1;
    }
    t
}

fn class_bits(matrix: &FeatureMatrix) -> impl Iterator<Item = u8> + '_ {
    matrix.labels().iter().map(|l| l.is_yes() as u8)
}

/// H(Y) - H(Y|X) from a joint table.
fn mutual_information(t: &[[usize; 2]; 2]) -> f64 {
    let n: usize = t.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let hy = entropy(&[t[0][0] + t[1][0], t[0][1] + t[1][1]]);
    let hy_given_x: f64 = t
        .iter()
        .map(|row| {
            let nx = row[0] + row[1];
            nx as f64 / n as f64 * entropy(row)
        })
        .sum();
    (hy - hy_given_x).max(0.0)
}

fn attr_class_table(matrix: &FeatureMatrix, attr: usize) -> [[usize; 2]; 2] {
    joint_counts(matrix.column(attr), class_bits(matrix))
}

pub fn eval_infogain(matrix: &FeatureMatrix, attr: usize) -> f64 {
    mutual_information(&attr_class_table(matrix, attr))
}

/// Information gain over the attribute's own entropy; 0 for constant
/// attributes.
pub fn eval_gainratio(matrix: &FeatureMatrix, attr: usize) -> f64 {
    let t = attr_class_table(matrix, attr);
    let split = entropy(&[t[0][0] + t[0][1], t[1][0] + t[1][1]]);
    if split <= 0.0 {
        return 0.0;
    }
    mutual_information(&t) / split
}

/// Pearson chi-square of the attribute-by-class contingency table. Cells
/// with zero expected count contribute 0.
pub fn eval_chisquare(matrix: &FeatureMatrix, attr: usize) -> f64 {
    chi_square_table(&attr_class_table(matrix, attr))
}

pub fn chi_square_table(t: &[[usize; 2]; 2]) -> f64 {
    let n: usize = t.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let mut chi = 0.0;
    for a in 0..2 {
        for c in 0..2 {
            let expected = rows[a] as f64 * cols[c] as f64 / n as f64;
            if expected > 0.0 {
                let d = t[a][c] as f64 - expected;
                chi += d * d / expected;
            }
        }
    }
    chi
}

/// 2·I(X;Y) / (H(X) + H(Y)), defined as 0 when both entropies vanish.
pub fn symmetric_uncertainty(xs: impl Iterator<Item = u8>, ys: impl Iterator<Item = u8>) -> f64 {
    let t = joint_counts(xs, ys);
    let hx = entropy(&[t[0][0] + t[0][1], t[1][0] + t[1][1]]);
    let hy = entropy(&[t[0][0] + t[1][0], t[0][1] + t[1][1]]);
    let denom = hx + hy;
    if denom <= 0.0 {
        return 0.0;
    }
    (2.0 * mutual_information(&t) / denom).clamp(0.0, 1.0)
}

/// Scores an attribute subset. Subsets are sorted index slices.
pub trait SubsetEvaluator {
    fn n_attrs(&self) -> usize;
    fn merit(&self, subset: &[usize]) -> f64;
}

/// Correlation-based merit with symmetric uncertainty:
/// `sum(SU(a, class)) / sqrt(k + 2 * sum_{i<j} SU(a_i, a_j))`.
#[derive(Debug, Clone)]
pub struct CfsEvaluator {
    class_su: Vec<f64>,
    pair_su: Vec<Vec<f64>>,
}

impl CfsEvaluator {
    #[allow(clippy::needless_range_loop)]
    pub fn new(matrix: &FeatureMatrix) -> Self {
        let d = matrix.n_attrs();
        let class_su = (0..d)
            .map(|a| symmetric_uncertainty(matrix.column(a), class_bits(matrix)))
            .collect();
        let mut pair_su = vec![vec![0.0; d]; d];
        for i in 0..d {
            pair_su[i][i] = symmetric_uncertainty(matrix.column(i), matrix.column(i));
            for j in i + 1..d {
                let su = symmetric_uncertainty(matrix.column(i), matrix.column(j));
                pair_su[i][j] = su;
                pair_su[j][i] = su;
            }
        }
        CfsEvaluator { class_su, pair_su }
    }
}

impl SubsetEvaluator for CfsEvaluator {
    fn n_attrs(&self) -> usize {
        self.class_su.len()
    }

    fn merit(&self, subset: &[usize]) -> f64 {
        let k = subset.len();
        if k == 0 {
            return 0.0;
        }
        let relevance: f64 = subset.iter().map(|&a| self.class_su[a]).sum();
        let mut redundancy = 0.0;
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[i + 1..] {
                redundancy += self.pair_su[a][b];
            }
        }
        relevance / (k as f64 + 2.0 * redundancy).sqrt()
    }
}

pub fn cfs_merit(matrix: &FeatureMatrix, subset: &[usize]) -> f64 {
    CfsEvaluator::new(matrix).merit(subset)
}

/// One minus the inconsistency rate of the projected patterns.
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyEvaluator<'a> {
    matrix: &'a FeatureMatrix,
}

impl<'a> ConsistencyEvaluator<'a> {
    pub fn new(matrix: &'a FeatureMatrix) -> Self {
        ConsistencyEvaluator { matrix }
    }
}

impl SubsetEvaluator for ConsistencyEvaluator<'_> {
    fn n_attrs(&self) -> usize {
        self.matrix.n_attrs()
    }

    fn merit(&self, subset: &[usize]) -> f64 {
        let n = self.matrix.n_rows();
        if n == 0 {
            return 0.0;
        }
        let mut patterns: HashMap<Vec<u8>, [usize; 2]> = HashMap::new();
        for (row, label) in self.matrix.rows().iter().zip(self.matrix.labels()) {
            let key: Vec<u8> = subset.iter().map(|&a| row.get(a)).collect();
            patterns.entry(key).or_default()[label.is_yes() as usize] += 1;
        }
        let inconsistent: usize = patterns.values().map(|c| c[0].min(c[1])).sum();
        1.0 - inconsistent as f64 / n as f64
    }
}

pub fn consistency_merit(matrix: &FeatureMatrix, subset: &[usize]) -> f64 {
    ConsistencyEvaluator::new(matrix).merit(subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use crate::matrix::FeatureVector;

    fn matrix(cols: &[&[u8]], labels: &[u8]) -> FeatureMatrix {
        let n = labels.len();
        let rows = (0..n)
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
    fn infogain_examples() {
        let m = matrix(
            &[&[1, 1, 0, 0], &[1, 1, 1, 1], &[1, 1, 1, 0]],
            &[1, 1, 0, 0],
        );
        assert!((eval_infogain(&m, 0) - 1.0).abs() < 1e-12);
        assert_eq!(eval_infogain(&m, 1), 0.0);
        // H(C) = 1, H(C|A) = 0.75 * H(2/3, 1/3)
        assert!((eval_infogain(&m, 2) - 0.311_278_1).abs() < 1e-4);
    }

    #[test]
    fn gainratio_examples() {
        let m = matrix(
            &[&[1, 1, 0, 0], &[1, 1, 1, 1], &[1, 1, 1, 0]],
            &[1, 1, 0, 0],
        );
        assert!((eval_gainratio(&m, 0) - 1.0).abs() < 1e-12);
        assert_eq!(eval_gainratio(&m, 1), 0.0);
        assert!((eval_gainratio(&m, 2) - 0.3837).abs() < 1e-4);
    }

    #[test]
    fn chisquare_examples() {
        assert!((chi_square_table(&[[20, 10], [10, 20]]) - 20.0 / 3.0).abs() < 1e-3);
        assert_eq!(chi_square_table(&[[10, 20], [5, 10]]), 0.0);
        let m = matrix(&[&[1, 1, 0, 0], &[1, 1, 1, 1]], &[1, 1, 0, 0]);
        assert!((eval_chisquare(&m, 0) - 4.0).abs() < 1e-12);
        assert_eq!(eval_chisquare(&m, 1), 0.0);
    }

    #[test]
    fn cfs_examples() {
        let m = matrix(
            &[&[1, 1, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 1]],
            &[1, 1, 0, 0],
        );
        let s = cfs_merit(&m, &[0]);
        assert!((s - 1.0).abs() < 1e-12);
        assert!((cfs_merit(&m, &[0, 1]) - s).abs() < 1e-12);
        assert!(cfs_merit(&m, &[0, 2]) < s);
        assert_eq!(cfs_merit(&m, &[]), 0.0);
    }

    #[test]
    fn consistency_examples() {
        // pattern 1 holds 3 Yes / 1 No, pattern 0 is pure
        let m = matrix(&[&[1, 1, 1, 1, 0, 0, 0, 0]], &[1, 1, 1, 0, 0, 0, 0, 0]);
        assert!((consistency_merit(&m, &[0]) - 0.875).abs() < 1e-12);
        assert!((consistency_merit(&m, &[]) - 5.0 / 8.0).abs() < 1e-12);
        let clean = matrix(&[&[1, 0, 1], &[0, 0, 1]], &[1, 0, 0]);
        assert_eq!(consistency_merit(&clean, &[0, 1]), 1.0);
    }
}
