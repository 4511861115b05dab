use std::collections::HashSet;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::label::Label;

/// Binary presence vector, one entry per attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<u8>);

impl FeatureVector {
    /// Panics if any entry is not 0 or 1.
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "feature bits must be 0 or 1");
        FeatureVector(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn project(&self, indices: &[usize]) -> FeatureVector {
        FeatureVector(indices.iter().map(|&i| self.0[i]).collect())
    }
}

/// N x d binary matrix with attribute names and an aligned label column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    rows: Vec<FeatureVector>,
    labels: Vec<Label>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, rows: Vec<FeatureVector>, labels: Vec<Label>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != names.len()) {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                actual: bad.len(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "duplicate attribute name `{dup}`"
            )));
        }
        Ok(FeatureMatrix {
            names,
            rows,
            labels,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attrs(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, row: usize, attr: usize) -> u8 {
        self.rows[row].get(attr)
    }

    pub fn column(&self, attr: usize) -> impl Iterator<Item = u8> + '_ {
        self.rows.iter().map(move |r| r.get(attr))
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_yes()).count()
    }

    /// Keeps the given attribute columns, in the given order.
    pub fn project(&self, attrs: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: attrs.iter().map(|&a| self.names[a].clone()).collect(),
            rows: self.rows.iter().map(|r| r.project(attrs)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Keeps the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    /// Hex SHA-256 over names, rows and labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for n in &self.names {
            h.update(n.as_bytes());
            h.update(b",");
        }
        h.update(b"\n");
        for (r, l) in self.rows.iter().zip(&self.labels) {
            h.update(r.bits());
            h.update(l.as_str().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FeatureMatrix {
        FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![
                FeatureVector::new(vec![1, 0]),
                FeatureVector::new(vec![0, 1]),
            ],
            vec![Label::Yes, Label::No],
        )
        .unwrap()
    }

    #[test]
    fn rejects_ragged_rows_and_duplicate_names() {
        assert!(FeatureMatrix::new(
            vec!["a".into()],
            vec![FeatureVector::new(vec![1, 0])],
            vec![Label::Yes]
        )
        .is_err());
        assert!(FeatureMatrix::new(vec!["a".into(), "a".into()], vec![], vec![]).is_err());
        assert!(FeatureMatrix::new(vec!["a".into()], vec![], vec![Label::Yes]).is_err());
    }

    #[test]
    fn project_and_select_rows() {
        let m = small();
        let p = m.project(&[1]);
        assert_eq!(p.names(), &["b"]);
        assert_eq!(p.column(0).collect::<Vec<_>>(), vec![0, 1]);
        let s = m.select_rows(&[1]);
        assert_eq!(s.labels(), &[Label::No]);
        assert_ne!(m.fingerprint(), s.fingerprint());
    }
}
