//! Author-name normalization.
//!
//! Identity is the last name plus the full ordered sequence of initials.
//! Matching on the full sequence (rather than the first initial only)
//! minimizes false merges between distinct people. Diacritics are folded to
//! ASCII before comparison because export formats are inconsistent about
//! accents.
//!
//! Splitting rules:
//! - `"Last, F. M."` — split on the first comma; everything before it is
//!   the last name, tokens after it contribute initials.
//! - `"F. M. Last"` — no comma; the final whitespace token is the last
//!   name, the rest contribute initials.
//! - Hyphenated last names are kept whole, including the hyphen; compound
//!   last names keep their internal spaces ("van der berg").
//! - Each given-name token (split on whitespace, periods and commas)
//!   contributes the first letter of its folded form, except that a short
//!   all-uppercase token is read as a run of initials, so `"Alvarez, MJ"`
//!   and `"Alvarez, M.J."` normalize identically.

use serde::{Deserialize, Serialize};
use std::fmt;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

/// Normalized author identity: case-folded last name plus ordered initials.
///
/// Two keys are equal iff the last name and the full initials sequence are
/// equal. The initials sequence may be empty (mononym authors) but never
/// contains non-letter characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AuthorKey {
    last_name: String,
    initials: String,
}

impl AuthorKey {
    /// Builds a key from already-folded parts, validating the invariants.
    pub fn new(last_name: impl Into<String>, initials: impl Into<String>) -> Result<Self> {
        let last_name = last_name.into();
        let initials = initials.into();
        if last_name.is_empty() {
            return Err(Error::Domain("author key with empty last name".into()));
        }
        if !initials.chars().all(|c| c.is_alphabetic()) {
            return Err(Error::Domain(format!(
                "initials {initials:?} contain non-letter characters"
            )));
        }
        Ok(AuthorKey { last_name, initials })
    }

    pub fn last_name(&self) -> &str {
        &self.last_name
    }

    /// The initials as a contiguous sequence of letters, e.g. `"fg"`.
    pub fn initials(&self) -> &str {
        &self.initials
    }
}

/// Canonical rendering, e.g. `"alvarez, M. J."`. Feeding it back through
/// [`normalize_author`] reproduces an equal key.
impl fmt::Display for AuthorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.last_name)?;
        if !self.initials.is_empty() {
            write!(f, ",")?;
            for c in self.initials.chars() {
                write!(f, " {}.", c.to_uppercase())?;
            }
        }
        Ok(())
    }
}

/// Strips combining marks after NFD decomposition and lowercases.
fn fold(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Keeps alphanumerics, hyphens and apostrophes; everything else becomes a
/// space. Runs of whitespace collapse to one.
fn clean_name_part(folded: &str) -> String {
    let mapped: String = folded
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '\'' { c } else { ' ' })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A 2-3 letter all-uppercase token is an initials run ("FG", "JPM").
fn is_initials_run(token: &str) -> bool {
    let len = token.chars().count();
    (2..=3).contains(&len) && token.chars().all(|c| c.is_uppercase())
}

/// Normalizes one raw author string into an [`AuthorKey`].
///
/// Strings that are empty after trimming or contain no letters cannot be
/// normalized; the error carries the raw string so callers can skip the
/// record and log it.
pub fn normalize_author(raw: &str) -> Result<AuthorKey> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(Error::Normalization { raw: raw.to_string() });
    }

    let (last_part, given_part) = match trimmed.split_once(',') {
        Some((last, given)) => (last.to_string(), given.to_string()),
        None => {
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            match tokens.split_last() {
                Some((last, given)) => ((*last).to_string(), given.join(" ")),
                None => (trimmed.to_string(), String::new()),
            }
        }
    };

    let last_name = clean_name_part(&fold(&last_part));
    if last_name.chars().all(|c| !c.is_alphabetic()) {
        return Err(Error::Normalization { raw: raw.to_string() });
    }

    let mut initials = String::new();
    for token in given_part
        .split(|c: char| c.is_whitespace() || c == '.' || c == ',')
        .filter(|t| !t.is_empty())
    {
        if is_initials_run(token) {
            initials.extend(fold(token).chars().filter(|c| c.is_alphabetic()));
        } else if let Some(first) = fold(token).chars().find(|c| c.is_alphabetic()) {
            initials.push(first);
        }
    }

    AuthorKey::new(last_name, initials)
}
