//! Spec files: one `key = value` per line, `#` starts a comment.
//!
//! ```text
//! m = 1
//! d = 1
//! order = 8
//! theta1 = w1 - 2*i*z1*zeta1
//! f = 5 + 5*z1 + 5*w1      # optional
//! g = 1 + z1 + w1          # optional
//! ```
//!
//! Required keys: `m`, `d`, `order`, and `theta1` .. `theta<d>`.

use std::collections::BTreeMap;

use cr_constancy::manifold::ManifoldModel;
use cr_constancy::{FrameKind, TruncatedSeries};
use thiserror::Error;

use crate::expr::{parse_expression, ParseError, ParseOptions};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SpecError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecEntry {
    pub line: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub m: usize,
    pub d: usize,
    pub order: usize,
    pub theta: Vec<SpecEntry>,
    pub f: Option<SpecEntry>,
    pub g: Option<SpecEntry>,
}

fn err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError {
        line,
        message: message.into(),
    }
}

fn positive(line: usize, key: &str, value: &str) -> Result<usize, SpecError> {
    value
        .parse::<usize>()
        .ok()
        .filter(|v| *v > 0)
        .ok_or_else(|| {
            err(
                line,
                format!("{key} must be a positive integer, got '{value}'"),
            )
        })
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut entries: BTreeMap<String, SpecEntry> = BTreeMap::new();
        let mut last_line = 0;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, "expected 'key = value'"))?;
            let (key, value) = (key.trim(), value.trim());
            let known = matches!(key, "m" | "d" | "order" | "f" | "g")
                || key
                    .strip_prefix("theta")
                    .is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()));
            if !known {
                return Err(err(line, format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(err(line, format!("missing value for '{key}'")));
            }
            if let Some(prev) = entries.get(key) {
                return Err(err(
                    line,
                    format!("duplicate key '{key}' (first given on line {})", prev.line),
                ));
            }
            entries.insert(
                key.to_string(),
                SpecEntry {
                    line,
                    text: value.to_string(),
                },
            );
        }
        let eof = last_line + 1;
        let mut take = |key: &str| entries.remove(key);
        let number = |e: Option<SpecEntry>, key: &str| -> Result<usize, SpecError> {
            let e = e.ok_or_else(|| err(eof, format!("missing required key '{key}'")))?;
            positive(e.line, key, &e.text)
        };
        let m = number(take("m"), "m")?;
        let d = number(take("d"), "d")?;
        let order = number(take("order"), "order")?;
        let mut theta = Vec::with_capacity(d);
        for j in 1..=d {
            let key = format!("theta{j}");
            theta
                .push(take(&key).ok_or_else(|| err(eof, format!("missing required key '{key}'")))?);
        }
        let f = take("f");
        let g = take("g");
        if let Some((key, e)) = entries.into_iter().next() {
            return Err(err(e.line, format!("'{key}' does not match d = {d}")));
        }
        Ok(Self {
            m,
            d,
            order,
            theta,
            f,
            g,
        })
    }

    pub fn options(&self, order: usize) -> ParseOptions {
        ParseOptions::new(self.m, self.d, order)
    }
}

/// A parse error located in a spec file or a command-line flag.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{origin}: {error}")]
pub struct LocatedParseError {
    pub origin: String,
    pub error: ParseError,
}

/// Parses a T-frame series (`f` or `g`).
pub fn parse_t_series(
    text: &str,
    opts: ParseOptions,
    origin: &str,
) -> Result<TruncatedSeries, LocatedParseError> {
    parse_expression(text, opts.in_frame(FrameKind::T)).map_err(|error| LocatedParseError {
        origin: origin.to_string(),
        error,
    })
}

/// Parses every `theta_j` in the FULL frame (ξ is rejected when building
/// the model).
pub fn parse_theta(
    spec: &SpecFile,
    order: usize,
) -> Result<Vec<TruncatedSeries>, LocatedParseError> {
    spec.theta
        .iter()
        .enumerate()
        .map(|(j, e)| {
            parse_expression(&e.text, spec.options(order).in_frame(FrameKind::Full)).map_err(
                |error| LocatedParseError {
                    origin: format!("line {} (theta{})", e.line, j + 1),
                    error,
                },
            )
        })
        .collect()
}

pub fn build_model(
    spec: &SpecFile,
    theta: Vec<TruncatedSeries>,
    order: usize,
) -> cr_constancy::Result<ManifoldModel> {
    ManifoldModel::new(spec.m, spec.d, theta, order)
}
