//! Emails, labeled corpora, the manifest format and the seeded synthetic
//! corpus generator.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::lexicon::{extract_features, rule_label, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Email {
    pub id: String,
    pub subject: Option<String>,
    pub body: String,
    pub label: Option<Label>,
}

impl Email {
    /// Renders back to the minimal header-prefixed form `parse_email` reads.
    pub fn to_raw(&self) -> String {
        match &self.subject {
            Some(s) => format!("Subject: {s}\n\n{}", self.body),
            None => self.body.clone(),
        }
    }
}

fn is_header_line(line: &str) -> bool {
    let Some((name, _)) = line.split_once(':') else {
        return false;
    };
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '-')
}

/// Parses bare body text or a header block followed by a blank line.
///
/// Only `Subject` is kept. Every other header is dropped. The returned email
/// has an empty id and no label.
pub fn parse_email(raw: &str) -> Result<Email> {
    let text = raw.replace("\r\n", "\n");
    if text.trim().is_empty() {
        return Err(Error::EmptyMessage);
    }
    let lines: Vec<&str> = text.lines().collect();
    let blank = lines.iter().position(|l| l.trim().is_empty());
    let (subject, body) = match blank {
        Some(b) if b > 0 && lines[..b].iter().all(|l| is_header_line(l)) => {
            let subject = lines[..b].iter().find_map(|l| {
                let (name, value) = l.split_once(':')?;
                name.trim()
                    .eq_ignore_ascii_case("subject")
                    .then(|| value.trim().to_string())
            });
            (subject.filter(|s| !s.is_empty()), lines[b + 1..].join("\n"))
        }
        _ => (None, text.clone()),
    };
    let body = body.trim().to_string();
    if body.is_empty() {
        return Err(Error::EmptyMessage);
    }
    Ok(Email {
        id: String::new(),
        subject,
        body,
        label: None,
    })
}

/// Ordered emails, every one labeled, ids unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    emails: Vec<Email>,
    positive_count: usize,
    negative_count: usize,
}

impl LabeledCorpus {
    pub fn new(emails: Vec<Email>) -> Result<Self> {
        if emails.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut ids = HashSet::new();
        let mut positive_count = 0;
        for e in &emails {
            if !ids.insert(e.id.as_str()) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            match e.label {
                Some(Label::Yes) => positive_count += 1,
                Some(Label::No) => {}
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "email `{}` has no label",
                        e.id
                    )))
                }
            }
        }
        let negative_count = emails.len() - positive_count;
        Ok(LabeledCorpus {
            emails,
            positive_count,
            negative_count,
        })
    }

    pub fn emails(&self) -> &[Email] {
        &self.emails
    }

    pub fn len(&self) -> usize {
        self.emails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emails.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    pub fn labels(&self) -> Vec<Label> {
        self.emails
            .iter()
            .map(|e| e.label.expect("corpus emails are labeled"))
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} emails, {} Yes / {} No",
            self.len(),
            self.positive_count,
            self.negative_count
        )
    }

    /// Canonical manifest with every email inlined.
    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        for e in &self.emails {
            let label = e.label.expect("corpus emails are labeled");
            let _ = writeln!(out, "{label}\tinline:{}", escape_inline(&e.to_raw()));
        }
        out
    }

    pub fn write_manifest(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_manifest()).map_err(|e| Error::io(path, e))
    }
}

fn escape_inline(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

fn unescape_inline(text: &str, line: usize) -> Result<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            other => {
                return Err(Error::Manifest {
                    line,
                    message: format!(
                        "bad escape `\\{}`",
                        other.map(String::from).unwrap_or_default()
                    ),
                })
            }
        }
    }
    Ok(out)
}

/// Loads a manifest from disk. Relative paths resolve against the
/// manifest's directory.
pub fn load_corpus(manifest_path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = manifest_path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, &base)
}

pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<LabeledCorpus> {
    let mut emails = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, source) = line.split_once('\t').ok_or_else(|| Error::Manifest {
            line: line_no,
            message: "expected `<label><TAB><path or inline:text>`".into(),
        })?;
        let label: Label = label.parse()?;
        let (id, raw_text) = match source.strip_prefix("inline:") {
            Some(inline) => (
                format!("inline-{}", emails.len() + 1),
                unescape_inline(inline, line_no)?,
            ),
            None => {
                let rel = PathBuf::from(source.trim());
                let full = if rel.is_absolute() {
                    rel
                } else {
                    base_dir.join(rel)
                };
                let body = std::fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
                (source.trim().to_string(), body)
            }
        };
        let mut email = parse_email(&raw_text).map_err(|e| Error::Manifest {
            line: line_no,
            message: format!("{id}: {e}"),
        })?;
        email.id = id;
        email.label = Some(label);
        emails.push(email);
    }
    LabeledCorpus::new(emails)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub n: usize,
    pub positive_ratio: f64,
    /// Salt words added to every email. Drawn from filler vocabulary and
    /// from the lexicon itself (only where the label is unaffected).
    pub noise_terms: usize,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            n: 56,
            positive_ratio: 0.45,
            noise_terms: 3,
            seed: 7,
        }
    }
}

const FILLER: &[&str] = &[
    "family", "office", "report", "market", "football", "holiday", "dinner", "project", "weekend",
    "garden", "music", "coffee", "travel", "school", "budget", "health", "movie", "letter",
    "photo", "weather", "cricket", "news", "friends", "city", "book", "exam", "wedding", "shop",
];

const MAX_ATTEMPTS: usize = 10_000;

fn render(term: &str) -> String {
    term.replace('_', " ")
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &'a [String], count: usize) -> Vec<&'a str> {
    pool.choose_multiple(rng, count.min(pool.len()))
        .map(String::as_str)
        .collect()
}

fn synth_text(rng: &mut ChaCha8Rng, lexicon: &Lexicon, label: Label, noise_terms: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    let kw = lexicon.keywords();
    let si = lexicon.suspicious();
    let ni = lexicon.nonsuspicious();
    match label {
        Label::Yes => {
            let k = rng.gen_range(1..=2);
            let s = rng.gen_range(1..=2);
            parts.extend(pick(rng, kw, k).into_iter().map(render));
            parts.extend(pick(rng, si, s).into_iter().map(render));
            if rng.gen_bool(0.3) {
                parts.extend(pick(rng, ni, 1).into_iter().map(render));
            }
        }
        Label::No => {
            if rng.gen_bool(0.5) {
                // keywords neutralized by context
                let k = rng.gen_range(1..=2);
                parts.extend(pick(rng, kw, k).into_iter().map(render));
                parts.extend(pick(rng, ni, 1).into_iter().map(render));
            } else {
                if rng.gen_bool(0.5) {
                    parts.extend(pick(rng, si, 1).into_iter().map(render));
                }
                if rng.gen_bool(0.4) {
                    parts.extend(pick(rng, ni, 1).into_iter().map(render));
                }
            }
        }
    }
    let all_terms: Vec<&String> = kw.iter().chain(si).chain(ni).collect();
    for _ in 0..noise_terms {
        if rng.gen_bool(0.5) {
            parts.push(render(all_terms.choose(rng).expect("non-empty lexicon")));
        } else {
            parts.push(FILLER.choose(rng).expect("filler").to_string());
        }
    }
    let fill = rng.gen_range(4..=10);
    for _ in 0..fill {
        parts.push(FILLER.choose(rng).expect("filler").to_string());
    }
    parts.shuffle(rng);
    let mut body = parts.join(" ");
    if let Some(first) = body.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    body.push('.');
    body
}

/// Seeded stand-in corpus whose labels always agree with the keyword and
/// indicator rule.
pub fn generate_synthetic_corpus(
    params: &SyntheticParams,
    lexicon: &Lexicon,
) -> Result<LabeledCorpus> {
    if params.n < 10 {
        return Err(Error::InvalidParameter(format!(
            "n too small ({} < 10)",
            params.n
        )));
    }
    if !(params.positive_ratio > 0.0 && params.positive_ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "positive ratio must lie in (0, 1), got {}",
            params.positive_ratio
        )));
    }
    if lexicon.keywords().is_empty()
        || lexicon.suspicious().is_empty()
        || lexicon.nonsuspicious().is_empty()
    {
        return Err(Error::InvalidParameter(
            "synthetic generation needs at least one term in every lexicon section".into(),
        ));
    }
    let positives = (params.n as f64 * params.positive_ratio).round() as usize;
    if positives == 0 || positives == params.n {
        return Err(Error::InvalidParameter(format!(
            "positive ratio {} yields a single class for n = {}",
            params.positive_ratio, params.n
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::Yes, positives)
        .chain(std::iter::repeat_n(Label::No, params.n - positives))
        .collect();
    labels.shuffle(&mut rng);

    let mut emails = Vec::with_capacity(params.n);
    for (i, &label) in labels.iter().enumerate() {
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let body = synth_text(&mut rng, lexicon, label, params.noise_terms);
            let subject = rng.gen_bool(0.5).then(|| pick_filler_pair(&mut rng));
            let email = Email {
                id: format!("syn-{:04}", i + 1),
                subject,
                body,
                label: Some(label),
            };
            if rule_label(&extract_features(&email, lexicon), lexicon)? == label {
                accepted = Some(email);
                break;
            }
        }
        emails.push(accepted.ok_or_else(|| {
            Error::InvalidParameter(format!(
                "could not synthesize a {label} email for this lexicon"
            ))
        })?);
    }
    LabeledCorpus::new(emails)
}

fn pick_filler_pair(rng: &mut ChaCha8Rng) -> String {
    let a = FILLER.choose(rng).expect("filler");
    let b = FILLER.choose(rng).expect("filler");
    format!("{a} {b}")
}
