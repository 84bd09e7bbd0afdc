//! Plain-text instance files and JSON outcome files.
//!
//! ```text
//! # comment
//! n 2
//! rigidP 0 1
//! rigidQ 0 1
//! pair 1 1 3 3
//! pair 1 2 1 4
//! pair 2 1 5 2
//! pair 2 2 10 5
//! ```
//!
//! Indices are 1-based. Every `(i, j)` needs exactly one `pair` line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::MarketError;
use crate::market::{Instance, Matching, Outcome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    At { line: usize, column: usize, message: String },
    #[error("{0}")]
    Incomplete(String),
    #[error("invalid outcome document: {0}")]
    Json(String),
    #[error(transparent)]
    Market(#[from] MarketError),
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push(Token { text: &line[s..idx], column: s + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct LineCtx<'a> {
    line: usize,
    toks: Vec<Token<'a>>,
    /// Column just past the end of the line, for "missing value" errors.
    end: usize,
}

impl LineCtx<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::At { line: self.line, column, message: message.into() }
    }

    fn arity(&self, expected: usize) -> Result<(), ParseError> {
        match self.toks.len().cmp(&(expected + 1)) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Less => Err(self.err(self.end, format!("expected {expected} values after '{}'", self.toks[0].text))),
            std::cmp::Ordering::Greater => Err(self.err(self.toks[expected + 1].column, "unexpected extra value")),
        }
    }

    fn int<T: std::str::FromStr>(&self, k: usize, what: &str) -> Result<T, ParseError> {
        let t = &self.toks[k];
        t.text.parse().map_err(|_| self.err(t.column, format!("expected {what}, found '{}'", t.text)))
    }

    fn flags(&self, n: usize) -> Result<Vec<bool>, ParseError> {
        self.arity(n)?;
        (1..=n)
            .map(|k| match self.toks[k].text {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(self.err(self.toks[k].column, format!("expected 0 or 1, found '{other}'"))),
            })
            .collect()
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut n: Option<usize> = None;
    let mut rigid_p: Option<Vec<bool>> = None;
    let mut rigid_q: Option<Vec<bool>> = None;
    let mut cells: Vec<Option<(i64, i64)>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let ctx = LineCtx { line: idx + 1, toks: tokens(raw), end: raw.len() + 1 };
        let keyword = &ctx.toks[0];
        let need_n = || n.ok_or_else(|| ctx.err(keyword.column, format!("'{}' before the 'n' line", keyword.text)));
        match keyword.text {
            "n" => {
                if n.is_some() {
                    return Err(ctx.err(keyword.column, "duplicate 'n' line"));
                }
                ctx.arity(1)?;
                let size: usize = ctx.int(1, "a positive size")?;
                if size == 0 {
                    return Err(ctx.err(ctx.toks[1].column, "size must be positive"));
                }
                n = Some(size);
                cells = vec![None; size * size];
            }
            "rigidP" | "rigidQ" => {
                let flags = ctx.flags(need_n()?)?;
                let slot = if keyword.text == "rigidP" { &mut rigid_p } else { &mut rigid_q };
                if slot.replace(flags).is_some() {
                    return Err(ctx.err(keyword.column, format!("duplicate '{}' line", keyword.text)));
                }
            }
            "pair" => {
                let size = need_n()?;
                ctx.arity(4)?;
                let index = |k: usize| -> Result<usize, ParseError> {
                    let v: usize = ctx.int(k, "an index")?;
                    if v == 0 || v > size {
                        return Err(ctx.err(ctx.toks[k].column, format!("index {v} outside 1..={size}")));
                    }
                    Ok(v - 1)
                };
                let (i, j) = (index(1)?, index(2)?);
                let value = |k: usize| -> Result<i64, ParseError> {
                    let v: i64 = ctx.int(k, "an integer")?;
                    if v < 0 {
                        return Err(ctx.err(ctx.toks[k].column, "values must be nonnegative"));
                    }
                    Ok(v)
                };
                let (beta, gamma) = (value(3)?, value(4)?);
                if cells[i * size + j].replace((beta, gamma)).is_some() {
                    return Err(ctx.err(keyword.column, format!("duplicate pair ({}, {})", i + 1, j + 1)));
                }
            }
            other => return Err(ctx.err(keyword.column, format!("unknown keyword '{other}'"))),
        }
    }

    let n = n.ok_or_else(|| ParseError::Incomplete("missing 'n' line".into()))?;
    let rigid_p = rigid_p.ok_or_else(|| ParseError::Incomplete("missing 'rigidP' line".into()))?;
    let rigid_q = rigid_q.ok_or_else(|| ParseError::Incomplete("missing 'rigidQ' line".into()))?;
    if let Some(k) = cells.iter().position(Option::is_none) {
        return Err(ParseError::Incomplete(format!("missing pair ({}, {})", k / n + 1, k % n + 1)));
    }
    let (beta, gamma): (Vec<i64>, Vec<i64>) = cells.into_iter().flatten().unzip();
    let rows = |flat: Vec<i64>| flat.chunks(n).map(<[i64]>::to_vec).collect::<Vec<_>>();
    Ok(Instance::new(rows(beta), rows(gamma), rigid_p, rigid_q)?)
}

pub fn write_instance(inst: &Instance) -> String {
    let n = inst.n();
    let flags = |f: &[bool]| f.iter().map(|&b| if b { "1" } else { "0" }).collect::<Vec<_>>().join(" ");
    let mut out = format!("n {n}\nrigidP {}\nrigidQ {}\n", flags(inst.rigid_p_flags()), flags(inst.rigid_q_flags()));
    for i in 0..n {
        for j in 0..n {
            out.push_str(&format!("pair {} {} {} {}\n", i + 1, j + 1, inst.beta(i, j), inst.gamma(i, j)));
        }
    }
    out
}

/// Outcome as it appears in files and reports: matching as a 1-based list
/// of Q-indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub matching: Vec<usize>,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl From<&Outcome> for OutcomeDoc {
    fn from(o: &Outcome) -> Self {
        Self { matching: o.matching.to_one_based(), u: o.u.clone(), v: o.v.clone() }
    }
}

impl OutcomeDoc {
    pub fn to_outcome(&self) -> Result<Outcome, MarketError> {
        Outcome::new(Matching::from_one_based(&self.matching)?, self.u.clone(), self.v.clone())
    }
}

pub fn parse_outcome(text: &str) -> Result<Outcome, ParseError> {
    let doc: OutcomeDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    Ok(doc.to_outcome()?)
}
