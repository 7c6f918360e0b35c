//! Line-oriented text formats for modules, systems and Turing machines.
//!
//! All three formats share one lexical structure: one directive per line, tokens
//! separated by whitespace, and whole-line comments starting with `#` (a `#` elsewhere
//! on a line is an ordinary token, which the reduction alphabet relies on). The
//! canonical serializers sort every set-valued field so that serialization is
//! bit-exact for equal values.

mod des;
mod system;
mod tm;

use std::fmt;

use thiserror::Error;

pub use des::DesFile;
pub use system::{RectEntry, SystemFile};
pub use tm::TmFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
    Arity,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
            ErrorKind::Arity => "arity",
        })
    }
}

/// A parse or resolution error, located at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind} error: {message}")]
pub struct FormatError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A token with its 1-based column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

/// One non-blank, non-comment line split into its directive and arguments.
#[derive(Debug, Clone)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub keyword: Token<'a>,
    pub args: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    pub fn error(&self, kind: ErrorKind, column: usize, message: impl Into<String>) -> FormatError {
        FormatError {
            kind,
            line: self.number,
            column,
            message: message.into(),
        }
    }

    pub fn at(&self, tok: Token<'_>, kind: ErrorKind, message: impl Into<String>) -> FormatError {
        self.error(kind, tok.column, message)
    }

    /// Error at the end of the line, for missing arguments.
    pub fn missing(&self, message: impl Into<String>) -> FormatError {
        let end = self.args.last().unwrap_or(&self.keyword);
        self.error(
            ErrorKind::Syntax,
            end.column + end.text.chars().count(),
            message,
        )
    }

    pub fn exactly(&self, n: usize, what: &str) -> Result<(), FormatError> {
        match self.args.len().cmp(&n) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Less => {
                Err(self.missing(format!("`{}` expects {what}", self.keyword.text)))
            }
            std::cmp::Ordering::Greater => Err(self.at(
                self.args[n],
                ErrorKind::Syntax,
                format!("unexpected token after {what}"),
            )),
        }
    }

    pub fn texts(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.args.iter().map(|t| t.text)
    }
}

pub(crate) fn lex(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (col, (byte, ch)) in raw.char_indices().enumerate() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some((byte, col)),
                (true, Some((b, c))) => {
                    tokens.push(Token {
                        text: &raw[b..byte],
                        column: c + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some((b, c)) = start {
            tokens.push(Token {
                text: &raw[b..],
                column: c + 1,
            });
        }
        let mut it = tokens.into_iter();
        let keyword = it.next().expect("non-blank line has a token");
        out.push(Line {
            number: i + 1,
            keyword,
            args: it.collect(),
        });
    }
    out
}

/// Rejects a repeated single-occurrence directive.
pub(crate) fn once<T>(slot: &Option<T>, line: &Line<'_>) -> Result<(), FormatError> {
    if slot.is_some() {
        Err(line.at(
            line.keyword,
            ErrorKind::Syntax,
            format!("duplicate `{}` line", line.keyword.text),
        ))
    } else {
        Ok(())
    }
}

/// Error for a file that ends without a required directive.
pub(crate) fn absent(text: &str, directive: &str) -> FormatError {
    FormatError {
        kind: ErrorKind::Syntax,
        line: text.lines().count().max(1),
        column: 1,
        message: format!("missing `{directive}` line"),
    }
}

/// `keyword a b c` with a trailing newline; a bare keyword when `items` is empty.
pub(crate) fn directive<'a>(
    out: &mut String,
    keyword: &str,
    items: impl IntoIterator<Item = &'a str>,
) {
    out.push_str(keyword);
    for item in items {
        out.push(' ');
        out.push_str(item);
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_are_whole_line_only() {
        let lines = lex("# header\n  # indented\ntrans a # b\n\n");
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert_eq!(l.number, 3);
        assert_eq!(l.texts().collect::<Vec<_>>(), ["a", "#", "b"]);
        assert_eq!(l.args[1].column, 9);
    }

    #[test]
    fn columns_count_characters() {
        let lines = lex("  x  Σ y");
        assert_eq!(lines[0].keyword.column, 3);
        assert_eq!(lines[0].args[0].column, 6);
        assert_eq!(lines[0].args[1].column, 8);
    }
}
