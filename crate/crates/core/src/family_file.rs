//! Plain-text update family files.
//!
//! One rule per line as whitespace-separated `dx,dy` pairs; `#` starts a comment.
//!
//! ```text
//! # DTBP
//! 1,0 0,1
//! -1,-1 0,1
//! -1,-1 1,0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::dynamics::{builtin_family, DynamicsError};
use crate::geometry::{GeometryError, UpdateFamily, UpdateRule};
use crate::lattice::Site;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyFileError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Builtin(#[from] DynamicsError),
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> FamilyFileError {
    FamilyFileError::Parse { line, column, message: message.into() }
}

fn parse_pair(token: &str, line: usize, column: usize) -> Result<Site, FamilyFileError> {
    let (a, b) = token
        .split_once(',')
        .ok_or_else(|| parse_error(line, column, format!("expected 'dx,dy', found '{token}'")))?;
    let num = |s: &str, col: usize| {
        s.parse::<i64>()
            .map_err(|_| parse_error(line, col, format!("'{s}' is not an integer")))
    };
    let x = num(a, column)?;
    let y = num(b, column + a.chars().count() + 1)?;
    Ok(Site::new(x, y))
}

pub fn parse_family(text: &str) -> Result<UpdateFamily, FamilyFileError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut sites = Vec::new();
        let mut first_column = 0;
        let mut offset = 0;
        for token in content.split_whitespace() {
            let start = content[offset..].find(token).expect("token comes from this line") + offset;
            offset = start + token.len();
            let column = content[..start].chars().count() + 1;
            if sites.is_empty() {
                first_column = column;
            }
            let s = parse_pair(token, line, column)?;
            if s == Site::ORIGIN {
                return Err(parse_error(line, column, "the origin cannot belong to a rule"));
            }
            sites.push(s);
        }
        if sites.is_empty() {
            continue;
        }
        let rule = UpdateRule::new(sites).map_err(|e| parse_error(line, first_column, e.to_string()))?;
        rules.push(rule);
    }
    UpdateFamily::new(rules).map_err(|e| match e {
        GeometryError::EmptyFamily => parse_error(1, 1, "no rules found"),
        other => parse_error(1, 1, other.to_string()),
    })
}

/// Inverse of [`parse_family`] up to comments and rule order.
pub fn format_family(family: &UpdateFamily) -> String {
    let mut s = String::new();
    if let Some(name) = family.name() {
        let _ = writeln!(s, "# {name}");
    }
    for rule in family.rules() {
        let tokens: Vec<String> = rule.sites().iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "{}", tokens.join(" "));
    }
    s
}

/// Reads a family from a path, or from the builtin catalog for `builtin:<name>`.
pub fn load_family(spec: &str) -> Result<UpdateFamily, FamilyFileError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(builtin_family(name)?);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)
        .map_err(|e| FamilyFileError::Io { path: spec.to_string(), message: e.to_string() })?;
    let family = parse_family(&text)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    Ok(family.with_name(stem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let f = parse_family("# dtbp\n1,0 0,1  # first\n\n-1,-1 0,1\n-1,-1 1,0\n").unwrap();
        assert_eq!(f.rules(), builtin_family("dtbp").unwrap().rules());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_family("1,0\n  0,1 0,0\n"),
            Err(parse_error(2, 7, "the origin cannot belong to a rule"))
        );
        assert_eq!(parse_family("1,x"), Err(parse_error(1, 3, "'x' is not an integer")));
        assert_eq!(parse_family(" 10"), Err(parse_error(1, 2, "expected 'dx,dy', found '10'")));
        assert!(matches!(parse_family("# nothing\n"), Err(FamilyFileError::Parse { .. })));
    }

    #[test]
    fn builtin_prefix() {
        assert_eq!(load_family("builtin:osp").unwrap().rules().len(), 1);
        assert!(matches!(load_family("builtin:nope"), Err(FamilyFileError::Builtin(_))));
    }
}
