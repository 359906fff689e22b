//! File formats and generators.
//!
//! Both formats are line oriented. Blank lines and lines starting with `#`
//! are skipped; every other line is a keyword followed by fields separated
//! by single spaces.

pub mod gen;
pub mod imcb;
pub mod plg;

use thiserror::Error;

use crate::planar::PlanarError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unexpected end of input")]
    Truncated { line: usize },
    #[error("document does not fit the graph: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Content lines with their 1-based numbers.
pub(crate) struct Lines<'a> {
    it: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { it: it.peekable(), last: text.lines().count() }
    }

    /// Next line split into fields, which must start with `key` and have
    /// `arity` fields after it.
    pub(crate) fn record(&mut self, key: &str, arity: usize) -> Result<(usize, Vec<&'a str>), ParseError> {
        let (line, text) = self.it.next().ok_or(ParseError::Truncated { line: self.last + 1 })?;
        let mut f: Vec<&str> = text.split_whitespace().collect();
        if f[0] != key {
            return Err(syntax(line, format!("expected `{key}`, found `{}`", f[0])));
        }
        f.remove(0);
        if f.len() != arity {
            return Err(syntax(line, format!("`{key}` takes {arity} fields, found {}", f.len())));
        }
        Ok((line, f))
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        match self.it.next() {
            Some((line, _)) => Err(syntax(line, "trailing content".into())),
            None => Ok(()),
        }
    }
}

pub(crate) fn syntax(line: usize, msg: String) -> ParseError {
    ParseError::Syntax { line, msg }
}

pub(crate) fn num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| syntax(line, format!("bad {what} `{s}`")))
}

/// `-` stands for "none".
pub(crate) fn opt_num(line: usize, s: &str, what: &str) -> Result<Option<u32>, ParseError> {
    if s == "-" {
        Ok(None)
    } else {
        num(line, s, what).map(Some)
    }
}

pub(crate) fn opt_str(x: Option<u32>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}
