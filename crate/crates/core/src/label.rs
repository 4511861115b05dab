use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Binary class label `isSuspicious`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    No,
    Yes,
}

impl Label {
    pub fn is_yes(self) -> bool {
        self == Label::Yes
    }

    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Label::Yes
        } else {
            Label::No
        }
    }

    /// Canonical token used in manifests and ARFF files.
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Yes => "Yes",
            Label::No => "No",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Case-insensitive on read.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("yes") {
            Ok(Label::Yes)
        } else if t.eq_ignore_ascii_case("no") {
            Ok(Label::No)
        } else {
            Err(Error::UnknownLabel(t.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case_insensitively() {
        assert_eq!("YES".parse::<Label>().unwrap(), Label::Yes);
        assert_eq!("no".parse::<Label>().unwrap(), Label::No);
        assert!("Maybe".parse::<Label>().is_err());
    }
}
