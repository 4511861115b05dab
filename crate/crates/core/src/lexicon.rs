//! Feature space: keywords, suspicious indicators and non-suspicious
//! indicators, plus the rule that combines them into a label.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::{Email, LabeledCorpus};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::matrix::{FeatureMatrix, FeatureVector};

const DEFAULT_LEXICON: &str = include_str!("../data/default.lexicon");

/// Which of the three term groups an attribute came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Keyword,
    Suspicious,
    NonSuspicious,
}

impl TermKind {
    pub fn prefix(self) -> &'static str {
        match self {
            TermKind::Keyword => "kw_",
            TermKind::Suspicious => "si_",
            TermKind::NonSuspicious => "ni_",
        }
    }

    fn section(self) -> &'static str {
        match self {
            TermKind::Keyword => "keywords",
            TermKind::Suspicious => "suspicious",
            TermKind::NonSuspicious => "nonsuspicious",
        }
    }
}

/// Keyword vector plus the two indicator groups.
///
/// Multiword terms are stored underscore-joined (`will_be`) and match a run
/// of consecutive tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    keywords: Vec<String>,
    suspicious: Vec<String>,
    nonsuspicious: Vec<String>,
}

impl Lexicon {
    pub fn new<S: AsRef<str>>(
        keywords: &[S],
        suspicious: &[S],
        nonsuspicious: &[S],
    ) -> Result<Self> {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let lex = Lexicon {
            keywords: own(keywords),
            suspicious: own(suspicious),
            nonsuspicious: own(nonsuspicious),
        };
        lex.validate()?;
        Ok(lex)
    }

    /// The lexicon shipped with the crate. Illustrative vocabulary only.
    pub fn default_lexicon() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut groups: [Vec<String>; 3] = Default::default();
        let mut current: Option<usize> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                current = Some(match &line[1..line.len() - 1] {
                    "keywords" => 0,
                    "suspicious" => 1,
                    "nonsuspicious" => 2,
                    other => {
                        return Err(Error::Lexicon(format!(
                            "line {}: unknown section [{other}]",
                            i + 1
                        )))
                    }
                });
                continue;
            }
            let Some(idx) = current else {
                return Err(Error::Lexicon(format!(
                    "line {}: term outside of a section",
                    i + 1
                )));
            };
            groups[idx].push(line.to_lowercase());
        }
        let [keywords, suspicious, nonsuspicious] = groups;
        let lex = Lexicon {
            keywords,
            suspicious,
            nonsuspicious,
        };
        lex.validate()?;
        Ok(lex)
    }

    /// Serializes back to the sectioned text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for kind in [
            TermKind::Keyword,
            TermKind::Suspicious,
            TermKind::NonSuspicious,
        ] {
            let _ = writeln!(out, "[{}]", kind.section());
            for t in self.terms(kind) {
                let _ = writeln!(out, "{t}");
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (kind, term) in self.iter() {
            if !valid_term(term) {
                return Err(Error::Lexicon(format!(
                    "invalid {} term `{term}`: expected lowercase [a-z0-9] words joined by `_`",
                    kind.section()
                )));
            }
            if !seen.insert(term) {
                return Err(Error::Lexicon(format!(
                    "term `{term}` appears more than once"
                )));
            }
        }
        if self.is_empty() {
            return Err(Error::Lexicon("no terms".into()));
        }
        Ok(())
    }

    pub fn terms(&self, kind: TermKind) -> &[String] {
        match kind {
            TermKind::Keyword => &self.keywords,
            TermKind::Suspicious => &self.suspicious,
            TermKind::NonSuspicious => &self.nonsuspicious,
        }
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn suspicious(&self) -> &[String] {
        &self.suspicious
    }

    pub fn nonsuspicious(&self) -> &[String] {
        &self.nonsuspicious
    }

    /// Terms in feature order: keywords, then suspicious, then non-suspicious.
    pub fn iter(&self) -> impl Iterator<Item = (TermKind, &str)> {
        fn tag(kind: TermKind, terms: &[String]) -> impl Iterator<Item = (TermKind, &str)> {
            terms.iter().map(move |t| (kind, t.as_str()))
        }
        tag(TermKind::Keyword, &self.keywords)
            .chain(tag(TermKind::Suspicious, &self.suspicious))
            .chain(tag(TermKind::NonSuspicious, &self.nonsuspicious))
    }

    pub fn len(&self) -> usize {
        self.keywords.len() + self.suspicious.len() + self.nonsuspicious.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.iter()
            .map(|(kind, t)| format!("{}{}", kind.prefix(), t))
            .collect()
    }

    pub fn kind_of(&self, attr: usize) -> Option<TermKind> {
        let k = self.keywords.len();
        let s = self.suspicious.len();
        if attr < k {
            Some(TermKind::Keyword)
        } else if attr < k + s {
            Some(TermKind::Suspicious)
        } else if attr < self.len() {
            Some(TermKind::NonSuspicious)
        } else {
            None
        }
    }
}

fn valid_term(term: &str) -> bool {
    !term.is_empty()
        && term.split('_').all(|w| {
            !w.is_empty()
                && w.bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        })
}

/// Lowercases and splits on every non-alphanumeric character. No stemming.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn contains_run(tokens: &[String], run: &[&str]) -> bool {
    if run.is_empty() || run.len() > tokens.len() {
        return false;
    }
    tokens
        .windows(run.len())
        .any(|w| w.iter().zip(run).all(|(a, b)| a == b))
}

/// Presence bits over subject and body, in lexicon order.
pub fn extract_features(email: &Email, lexicon: &Lexicon) -> FeatureVector {
    let text = match &email.subject {
        Some(s) => format!("{s} {}", email.body),
        None => email.body.clone(),
    };
    extract_from_text(&text, lexicon)
}

pub fn extract_from_text(text: &str, lexicon: &Lexicon) -> FeatureVector {
    let tokens = tokenize(text);
    let bits = lexicon
        .iter()
        .map(|(_, term)| {
            let run: Vec<&str> = term.split('_').collect();
            contains_run(&tokens, &run) as u8
        })
        .collect();
    FeatureVector::new(bits)
}

/// OR-aggregates of the three term groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub keyword: bool,
    pub suspicious: bool,
    pub nonsuspicious: bool,
}

pub fn evidence(fv: &FeatureVector, lexicon: &Lexicon) -> Result<Evidence> {
    if fv.len() != lexicon.len() {
        return Err(Error::DimensionMismatch {
            expected: lexicon.len(),
            actual: fv.len(),
        });
    }
    let k = lexicon.keywords.len();
    let s = lexicon.suspicious.len();
    let bits = fv.bits();
    let any = |r: std::ops::Range<usize>| bits[r].contains(&1);
    Ok(Evidence {
        keyword: any(0..k),
        suspicious: any(k..k + s),
        nonsuspicious: any(k + s..bits.len()),
    })
}

impl Evidence {
    /// Yes iff a keyword co-occurs with a suspicious indicator; the
    /// non-suspicious group never turns a Yes into a No, and keywords alone
    /// are not enough.
    pub fn label(self) -> Label {
        Label::from_bool(self.keyword && self.suspicious)
    }
}

pub fn rule_label(fv: &FeatureVector, lexicon: &Lexicon) -> Result<Label> {
    Ok(evidence(fv, lexicon)?.label())
}

pub fn build_matrix(corpus: &LabeledCorpus, lexicon: &Lexicon) -> Result<FeatureMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let rows = corpus
        .emails()
        .iter()
        .map(|e| extract_features(e, lexicon))
        .collect();
    FeatureMatrix::new(lexicon.attribute_names(), rows, corpus.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(bits: &[u8]) -> FeatureVector {
        FeatureVector::new(bits.to_vec())
    }

    #[test]
    fn tokenize_splits_on_punctuation() {
        assert_eq!(
            tokenize("Attack at 2 o'clock!"),
            vec!["attack", "at", "2", "o", "clock"]
        );
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn multiword_terms_match_consecutive_tokens() {
        let lex = Lexicon::new(&["bomb"], &["will_be"], &["sad"]).unwrap();
        assert_eq!(
            extract_from_text("it will be a bomb", &lex).bits(),
            &[1, 1, 0]
        );
        assert_eq!(
            extract_from_text("be a bomb, it will", &lex).bits(),
            &[1, 0, 0]
        );
    }

    #[test]
    fn rule_label_cases() {
        let lex = Lexicon::new(&["attack"], &["plan"], &["condemn"]).unwrap();
        assert_eq!(rule_label(&fv(&[1, 1, 1]), &lex).unwrap(), Label::Yes);
        assert_eq!(rule_label(&fv(&[1, 1, 0]), &lex).unwrap(), Label::Yes);
        assert_eq!(rule_label(&fv(&[1, 0, 1]), &lex).unwrap(), Label::No);
        assert_eq!(rule_label(&fv(&[1, 0, 0]), &lex).unwrap(), Label::No);
        assert_eq!(rule_label(&fv(&[0, 1, 0]), &lex).unwrap(), Label::No);
        assert_eq!(rule_label(&fv(&[0, 0, 0]), &lex).unwrap(), Label::No);
        assert!(rule_label(&fv(&[0, 0]), &lex).is_err());
    }

    #[test]
    fn lexicon_rejects_overlap_and_bad_terms() {
        assert!(Lexicon::new(&["attack"], &["attack"], &["sad"]).is_err());
        assert!(Lexicon::new(&["two words"], &["plan"], &["sad"]).is_err());
        assert!(Lexicon::new(&["Attack"], &["plan"], &["sad"]).is_err());
        assert!(Lexicon::new(&["a__b"], &["plan"], &["sad"]).is_err());
    }

    #[test]
    fn parse_sections_and_comments() {
        let lex = Lexicon::parse(
            "# demo\n[keywords]\nAttack\nbomb # inline\n\n[suspicious]\nwill_be\n[nonsuspicious]\ncondemn\n",
        )
        .unwrap();
        assert_eq!(lex.keywords(), &["attack", "bomb"]);
        assert_eq!(
            lex.attribute_names(),
            vec!["kw_attack", "kw_bomb", "si_will_be", "ni_condemn"]
        );
        assert_eq!(Lexicon::parse(&lex.to_text()).unwrap(), lex);
        assert!(Lexicon::parse("attack\n").is_err());
        assert!(Lexicon::parse("[other]\nx\n").is_err());
    }

    #[test]
    fn default_lexicon_loads() {
        let lex = Lexicon::default_lexicon();
        assert!(lex.keywords().iter().any(|k| k == "attack"));
        assert_eq!(lex.kind_of(0), Some(TermKind::Keyword));
        assert_eq!(lex.kind_of(lex.len()), None);
    }
}
