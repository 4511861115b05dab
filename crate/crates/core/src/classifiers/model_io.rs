//! Versioned plain-text model files.
//!
//! ```text
//! mailscreen-model 1
//! kind logistic
//! attributes 2
//! names kw_attack si_plan
//! bias 1.2500000000000000e0
//! weights 3.0000000000000000e-1 -2.0000000000000000e0
//! end
//! ```
//!
//! Reals are written with 17 significant digits so they read back exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::id3::{DecisionTree, Node};
use super::{ClassifierKind, LogisticModel, Model, NaiveBayesModel, SvmModel, TrainedModel};
use crate::error::{Error, Result};
use crate::label::Label;

const MAGIC: &str = "mailscreen-model";
const VERSION: u32 = 1;

/// A trained model plus the attribute names it expects, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub attribute_names: Vec<String>,
    pub model: TrainedModel,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn reals(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(real).collect::<Vec<_>>().join(" ")
}

impl SavedModel {
    pub fn new(attribute_names: Vec<String>, model: TrainedModel) -> Result<Self> {
        if attribute_names.len() != model.n_attrs {
            return Err(Error::DimensionMismatch {
                expected: model.n_attrs,
                actual: attribute_names.len(),
            });
        }
        Ok(SavedModel {
            attribute_names,
            model,
        })
    }

    pub fn to_text(&self) -> String {
        let m = &self.model;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "kind {}", m.kind.tag());
        let _ = writeln!(out, "attributes {}", m.n_attrs);
        let _ = writeln!(out, "names {}", self.attribute_names.join(" "));
        match &m.model {
            Model::Constant(l) => {
                let _ = writeln!(out, "constant {l}");
            }
            Model::Logistic(lm) => {
                let _ = writeln!(out, "bias {}", real(lm.bias));
                let _ = writeln!(out, "weights {}", reals(lm.weights.iter().copied()));
            }
            Model::Svm(sm) => {
                let _ = writeln!(out, "c {}", real(sm.c));
                let _ = writeln!(out, "bias {}", real(sm.bias));
                let _ = writeln!(out, "weights {}", reals(sm.weights.iter().copied()));
            }
            Model::NaiveBayes(nb) => {
                let _ = writeln!(out, "priors {}", reals(nb.priors));
                for c in &nb.conditionals {
                    let _ = writeln!(out, "cond {}", reals(*c));
                }
            }
            Model::Id3(tree) => {
                out.push_str("tree\n");
                fn emit(n: &Node, out: &mut String) {
                    match n {
                        Node::Leaf(l) => {
                            let _ = writeln!(out, "leaf {l}");
                        }
                        Node::Split {
                            attr,
                            majority,
                            children,
                        } => {
                            let _ = writeln!(out, "split {attr} {majority}");
                            emit(&children[0], out);
                            emit(&children[1], out);
                        }
                    }
                }
                emit(&tree.root, &mut out);
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let magic = lines.expect_key(MAGIC)?;
        if magic.trim() != VERSION.to_string() {
            return Err(lines.error(format!("unsupported version `{}`", magic.trim())));
        }
        let kind: ClassifierKind = lines
            .expect_key("kind")?
            .parse()
            .map_err(|e: Error| lines.error(e.to_string()))?;
        let n_attrs: usize = lines.parse_one("attributes")?;
        let names: Vec<String> = lines
            .expect_key("names")?
            .split_whitespace()
            .map(String::from)
            .collect();
        if names.len() != n_attrs {
            return Err(lines.error(format!("expected {n_attrs} names, got {}", names.len())));
        }

        let (key, rest) = lines.next_pair()?;
        let model = match key {
            "constant" => Model::Constant(lines.label(rest)?),
            "bias" if kind == ClassifierKind::Logistic => {
                let bias = lines.real(rest)?;
                let weights = lines.reals_for("weights", n_attrs)?;
                Model::Logistic(LogisticModel { weights, bias })
            }
            "c" if kind == ClassifierKind::SvmLinear => {
                let c = lines.real(rest)?;
                let bias_text = lines.expect_key("bias")?;
                let bias = lines.real(bias_text)?;
                let weights = lines.reals_for("weights", n_attrs)?;
                Model::Svm(SvmModel { weights, bias, c })
            }
            "priors" if kind == ClassifierKind::NaiveBayes => {
                let p = lines.reals(rest, 2)?;
                let mut conditionals = Vec::with_capacity(n_attrs);
                for _ in 0..n_attrs {
                    let c = lines.reals_for("cond", 2)?;
                    conditionals.push([c[0], c[1]]);
                }
                Model::NaiveBayes(NaiveBayesModel {
                    priors: [p[0], p[1]],
                    conditionals,
                })
            }
            "tree" if kind == ClassifierKind::Id3 => {
                let root = read_node(&mut lines, n_attrs, 0)?;
                Model::Id3(DecisionTree { root })
            }
            other => return Err(lines.error(format!("unexpected `{other}` for kind {kind}"))),
        };
        lines.expect_key("end")?;
        Ok(SavedModel {
            attribute_names: names,
            model: TrainedModel {
                kind,
                n_attrs,
                model,
            },
        })
    }
}

fn read_node(lines: &mut Lines<'_>, n_attrs: usize, depth: usize) -> Result<Node> {
    if depth > n_attrs {
        return Err(lines.error("tree deeper than attribute count".into()));
    }
    let (key, rest) = lines.next_pair()?;
    match key {
        "leaf" => Ok(Node::Leaf(lines.label(rest)?)),
        "split" => {
            let mut it = rest.split_whitespace();
            let attr: usize = it
                .next()
                .and_then(|a| a.parse().ok())
                .filter(|&a| a < n_attrs)
                .ok_or_else(|| lines.error("bad split attribute".into()))?;
            let majority = lines.label(it.next().unwrap_or_default())?;
            let left = read_node(lines, n_attrs, depth + 1)?;
            let right = read_node(lines, n_attrs, depth + 1)?;
            Ok(Node::Split {
                attr,
                majority,
                children: Box::new([left, right]),
            })
        }
        other => Err(lines.error(format!("expected leaf or split, got `{other}`"))),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn error(&self, message: String) -> Error {
        Error::ModelFormat {
            line: self.line,
            message,
        }
    }

    fn next_pair(&mut self) -> Result<(&'a str, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            return Ok(l.split_once(' ').unwrap_or((l, "")));
        }
        Err(self.error("unexpected end of file".into()))
    }

    fn expect_key(&mut self, key: &str) -> Result<&'a str> {
        let (k, rest) = self.next_pair()?;
        if k != key {
            return Err(self.error(format!("expected `{key}`, got `{k}`")));
        }
        Ok(rest)
    }

    fn parse_one<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let rest = self.expect_key(key)?;
        rest.trim()
            .parse()
            .map_err(|_| self.error(format!("bad value for `{key}`")))
    }

    fn real(&self, s: &str) -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.error(format!("bad number `{}`", s.trim())))
    }

    fn reals(&self, s: &str, n: usize) -> Result<Vec<f64>> {
        let v = s
            .split_whitespace()
            .map(|t| self.real(t))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != n {
            return Err(self.error(format!("expected {n} numbers, got {}", v.len())));
        }
        Ok(v)
    }

    fn reals_for(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        let rest = self.expect_key(key)?;
        self.reals(rest, n)
    }

    fn label(&self, s: &str) -> Result<Label> {
        s.trim()
            .parse()
            .map_err(|e: Error| self.error(e.to_string()))
    }
}
