//! ID3 over binary attributes.

use crate::label::Label;
use crate::matrix::FeatureMatrix;
use crate::selection::evaluators::entropy;

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(Label),
    Split {
        attr: usize,
        /// Majority label of the training rows that reached this node.
        majority: Label,
        /// Child for attribute value 0, then value 1.
        children: Box<[Node; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub root: Node,
}

fn majority(matrix: &FeatureMatrix, rows: &[usize]) -> Label {
    let yes = rows
        .iter()
        .filter(|&&r| matrix.labels()[r].is_yes())
        .count();
    // ties resolve to No
    Label::from_bool(yes * 2 > rows.len())
}

fn gain(matrix: &FeatureMatrix, rows: &[usize], attr: usize) -> (f64, bool) {
    let mut t = [[0usize; 2]; 2];
    for &r in rows {
        t[matrix.value(r, attr) as usize][matrix.labels()[r].is_yes() as usize] += 1;
    }
    let n = rows.len() as f64;
    let h = entropy(&[t[0][0] + t[1][0], t[0][1] + t[1][1]]);
    let cond: f64 = t
        .iter()
        .map(|c| (c[0] + c[1]) as f64 / n * entropy(c))
        .sum();
    let splits = t[0][0] + t[0][1] > 0 && t[1][0] + t[1][1] > 0;
    (h - cond, splits)
}

fn grow(
    matrix: &FeatureMatrix,
    rows: &[usize],
    available: &mut Vec<usize>,
    fallback: Label,
) -> Node {
    if rows.is_empty() {
        return Node::Leaf(fallback);
    }
    let first = matrix.labels()[rows[0]];
    if rows.iter().all(|&r| matrix.labels()[r] == first) {
        return Node::Leaf(first);
    }
    let node_majority = majority(matrix, rows);

    // Highest gain among attributes that actually partition the node;
    // a zero-gain split is still taken so consistent data is always fit.
    let mut best: Option<(usize, f64)> = None;
    for &a in available.iter() {
        let (g, splits) = gain(matrix, rows, a);
        if !splits {
            continue;
        }
        if best.is_none_or(|(_, bg)| g > bg + GAIN_EPS) {
            best = Some((a, g));
        }
    }
    let Some((attr, _)) = best else {
        return Node::Leaf(node_majority);
    };

    let (zeros, ones): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&r| matrix.value(r, attr) == 0);
    let pos = available
        .iter()
        .position(|&a| a == attr)
        .expect("available");
    available.remove(pos);
    let left = grow(matrix, &zeros, available, node_majority);
    let right = grow(matrix, &ones, available, node_majority);
    available.insert(pos, attr);
    Node::Split {
        attr,
        majority: node_majority,
        children: Box::new([left, right]),
    }
}

impl DecisionTree {
    pub fn fit(matrix: &FeatureMatrix) -> Self {
        let rows: Vec<usize> = (0..matrix.n_rows()).collect();
        let mut available: Vec<usize> = (0..matrix.n_attrs()).collect();
        let root_majority = majority(matrix, &rows);
        DecisionTree {
            root: grow(matrix, &rows, &mut available, root_majority),
        }
    }

    pub fn predict(&self, bits: &[u8]) -> Label {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(l) => return *l,
                Node::Split { attr, children, .. } => node = &children[bits[*attr] as usize],
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Split { children, .. } => 1 + depth(&children[0]).max(depth(&children[1])),
            }
        }
        depth(&self.root)
    }

    /// True when no attribute repeats along any root-to-leaf path.
    pub fn paths_are_simple(&self) -> bool {
        fn check(n: &Node, seen: &mut Vec<usize>) -> bool {
            match n {
                Node::Leaf(_) => true,
                Node::Split { attr, children, .. } => {
                    if seen.contains(attr) {
                        return false;
                    }
                    seen.push(*attr);
                    let ok = check(&children[0], seen) && check(&children[1], seen);
                    seen.pop();
                    ok
                }
            }
        }
        check(&self.root, &mut Vec::new())
    }
}
