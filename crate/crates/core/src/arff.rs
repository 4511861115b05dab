//! Binary-attribute subset of the ARFF format.
//!
//! ```text
//! @relation <name>
//! @attribute <name> {0,1}      (one per feature)
//! @attribute class {Yes,No}
//! @data
//! 0,1,...,Yes
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{FeatureMatrix, FeatureVector};

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub fn to_arff_string(matrix: &FeatureMatrix, relation_name: &str) -> Result<String> {
    if matrix.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !valid_name(relation_name) {
        return Err(Error::InvalidParameter(format!(
            "relation name `{relation_name}` must match [A-Za-z0-9_]+"
        )));
    }
    if let Some(bad) = matrix
        .names()
        .iter()
        .find(|n| !valid_name(n) || *n == "class")
    {
        return Err(Error::InvalidParameter(format!(
            "attribute name `{bad}` must match [A-Za-z0-9_]+ and differ from `class`"
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "@relation {relation_name}");
    for name in matrix.names() {
        let _ = writeln!(out, "@attribute {name} {{0,1}}");
    }
    out.push_str("@attribute class {Yes,No}\n@data\n");
    for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
        for b in row.bits() {
            out.push(if *b == 1 { '1' } else { '0' });
            out.push(',');
        }
        out.push_str(label.as_str());
        out.push('\n');
    }
    Ok(out)
}

pub fn export_arff(
    matrix: &FeatureMatrix,
    relation_name: &str,
    out: impl AsRef<Path>,
) -> Result<()> {
    let text = to_arff_string(matrix, relation_name)?;
    let out = out.as_ref();
    std::fs::write(out, text).map_err(|e| Error::io(out, e))
}

pub fn import_arff(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_arff(&text)
}

#[derive(PartialEq)]
enum Section {
    Start,
    Header,
    Data,
}

/// Also returns the relation name.
pub fn parse_arff_with_relation(text: &str) -> Result<(String, FeatureMatrix)> {
    let err = |line: usize, message: String| Error::Arff { line, message };
    let mut section = Section::Start;
    let mut relation = String::new();
    let mut attrs: Vec<String> = Vec::new();
    let mut saw_class = false;
    let mut rows = Vec::new();
    let mut labels = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        match section {
            Section::Start => {
                let mut it = line.splitn(2, char::is_whitespace);
                let kw = it.next().unwrap_or_default();
                if !kw.eq_ignore_ascii_case("@relation") {
                    return Err(err(ln, "expected @relation".into()));
                }
                relation = it.next().unwrap_or_default().trim().to_string();
                if relation.is_empty() {
                    return Err(err(ln, "missing relation name".into()));
                }
                section = Section::Header;
            }
            Section::Header => {
                if line.eq_ignore_ascii_case("@data") {
                    if !saw_class {
                        return Err(err(ln, "missing class attribute".into()));
                    }
                    section = Section::Data;
                    continue;
                }
                let mut it = line.splitn(3, char::is_whitespace);
                let kw = it.next().unwrap_or_default();
                if !kw.eq_ignore_ascii_case("@attribute") {
                    return Err(err(ln, format!("unexpected header line `{line}`")));
                }
                let name = it.next().unwrap_or_default();
                let domain: String = it
                    .next()
                    .unwrap_or_default()
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .collect();
                if saw_class {
                    return Err(err(ln, "class attribute must be last".into()));
                }
                if name == "class" {
                    if domain != "{Yes,No}" {
                        return Err(err(
                            ln,
                            format!("class domain must be {{Yes,No}}, got `{domain}`"),
                        ));
                    }
                    saw_class = true;
                } else {
                    if !valid_name(name) {
                        return Err(err(ln, format!("invalid attribute name `{name}`")));
                    }
                    if domain != "{0,1}" {
                        return Err(err(ln, format!("attribute `{name}` is not binary {{0,1}}")));
                    }
                    attrs.push(name.to_string());
                }
            }
            Section::Data => {
                let fields: Vec<&str> = line.split(',').map(str::trim).collect();
                if fields.len() != attrs.len() + 1 {
                    return Err(err(
                        ln,
                        format!("expected {} values, got {}", attrs.len() + 1, fields.len()),
                    ));
                }
                let (class, values) = fields.split_last().expect("non-empty");
                let bits = values
                    .iter()
                    .map(|v| match *v {
                        "0" => Ok(0u8),
                        "1" => Ok(1u8),
                        other => Err(err(ln, format!("non-binary value `{other}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let label = match *class {
                    "Yes" => Label::Yes,
                    "No" => Label::No,
                    other => return Err(err(ln, format!("unknown class token `{other}`"))),
                };
                rows.push(FeatureVector::new(bits));
                labels.push(label);
            }
        }
    }
    if section != Section::Data {
        return Err(err(text.lines().count(), "missing @data section".into()));
    }
    let matrix = FeatureMatrix::new(attrs, rows, labels).map_err(|e| err(0, e.to_string()))?;
    Ok((relation, matrix))
}

pub fn parse_arff(text: &str) -> Result<FeatureMatrix> {
    parse_arff_with_relation(text).map(|(_, m)| m)
}
