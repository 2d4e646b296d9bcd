//! Text format:
//!
//! ```text
//! DIM 2
//! ALPHABET a b
//! A -> 'a'
//! B -> 'b'
//! R -> A .2 B
//! S -> R .1 R
//! START S
//! ```
//!
//! Rules may appear in any order; `#` starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{NdSlp, Rhs};
use crate::error::{Error, ParseError};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

enum RawRhs {
    Terminal(String),
    Concat(String, usize, String),
}

fn parse_rhs(ln: usize, rhs: &str) -> Result<RawRhs, ParseError> {
    if let Some(inner) = rhs.strip_prefix('\'') {
        let sym = inner
            .strip_suffix('\'')
            .ok_or_else(|| ParseError::new(ln, "unterminated symbol quote"))?;
        if sym.is_empty() || sym.contains(char::is_whitespace) || sym.contains('\'') {
            return Err(ParseError::new(ln, format!("bad symbol `{sym}`")));
        }
        return Ok(RawRhs::Terminal(sym.to_string()));
    }
    let parts: Vec<&str> = rhs.split_whitespace().collect();
    let [b, op, c] = parts[..] else {
        return Err(ParseError::new(ln, "expected `'<symbol>'` or `<var> .<axis> <var>`"));
    };
    let axis: usize = op
        .strip_prefix('.')
        .and_then(|a| a.parse().ok())
        .filter(|&a| a >= 1)
        .ok_or_else(|| ParseError::new(ln, format!("bad axis `{op}`, expected `.1`, `.2`, ...")))?;
    Ok(RawRhs::Concat(b.to_string(), axis - 1, c.to_string()))
}

impl FromStr for NdSlp {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut dim: Option<usize> = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut start: Option<(usize, String)> = None;
        let mut raw: Vec<(usize, String, RawRhs)> = Vec::new();
        for (ln, line) in content_lines(text) {
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "DIM" => {
                    if dim.is_some() {
                        return Err(ParseError::new(ln, "second DIM line").into());
                    }
                    let n: usize = rest
                        .parse()
                        .ok()
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| ParseError::new(ln, "expected `DIM <n>` with n >= 1"))?;
                    dim = Some(n);
                }
                "ALPHABET" => {
                    if alphabet.is_some() {
                        return Err(ParseError::new(ln, "second ALPHABET line").into());
                    }
                    let syms: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if syms.is_empty() {
                        return Err(ParseError::new(ln, "empty alphabet").into());
                    }
                    for (i, s) in syms.iter().enumerate() {
                        if syms[..i].contains(s) {
                            return Err(ParseError::new(ln, format!("symbol `{s}` listed twice")).into());
                        }
                        if s.contains('\'') {
                            return Err(ParseError::new(ln, format!("bad symbol `{s}`")).into());
                        }
                    }
                    alphabet = Some(syms);
                }
                "START" => {
                    if start.is_some() {
                        return Err(ParseError::new(ln, "second START line").into());
                    }
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(ParseError::new(ln, "expected `START <var>`").into());
                    }
                    start = Some((ln, rest.to_string()));
                }
                _ => {
                    let (name, rhs) = line
                        .split_once("->")
                        .ok_or_else(|| ParseError::new(ln, "expected `<var> -> <rhs>`"))?;
                    let name = name.trim();
                    if name.is_empty() || name.contains(char::is_whitespace) {
                        return Err(ParseError::new(ln, format!("bad variable name `{name}`")).into());
                    }
                    raw.push((ln, name.to_string(), parse_rhs(ln, rhs.trim())?));
                }
            }
        }
        let last = text.lines().count().max(1);
        let dim = dim.ok_or_else(|| ParseError::new(last, "missing DIM line"))?;
        let alphabet = alphabet.ok_or_else(|| ParseError::new(last, "missing ALPHABET line"))?;
        let (start_ln, start) = start.ok_or_else(|| ParseError::new(last, "missing START line"))?;
        let mut ids = HashMap::new();
        for (i, (ln, name, _)) in raw.iter().enumerate() {
            if ids.insert(name.clone(), i).is_some() {
                return Err(ParseError::new(*ln, format!("variable `{name}` is defined twice")).into());
            }
        }
        let resolve = |ln: usize, name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| ParseError::new(ln, format!("undefined variable `{name}`")))
        };
        let mut names = Vec::with_capacity(raw.len());
        let mut rules = Vec::with_capacity(raw.len());
        for (ln, name, rhs) in &raw {
            let rule = match rhs {
                RawRhs::Terminal(s) => Rhs::Terminal(
                    alphabet
                        .iter()
                        .position(|a| a == s)
                        .ok_or_else(|| ParseError::new(*ln, format!("symbol `{s}` is not in the alphabet")))?,
                ),
                RawRhs::Concat(b, axis, c) => {
                    if *axis >= dim {
                        return Err(ParseError::new(
                            *ln,
                            format!("axis {} exceeds the dimension {dim}", axis + 1),
                        )
                        .into());
                    }
                    Rhs::Concat {
                        left: resolve(*ln, b)?,
                        axis: *axis,
                        right: resolve(*ln, c)?,
                    }
                }
            };
            names.push(name.clone());
            rules.push(rule);
        }
        let start = resolve(start_ln, &start)?;
        NdSlp::new(dim, alphabet, names, rules, start)
    }
}

impl fmt::Display for NdSlp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DIM {}", self.dim)?;
        writeln!(f, "ALPHABET {}", self.alphabet.join(" "))?;
        for &v in &self.order {
            match self.rules[v] {
                Rhs::Terminal(s) => writeln!(f, "{} -> '{}'", self.names[v], self.alphabet[s])?,
                Rhs::Concat { left, axis, right } => writeln!(
                    f,
                    "{} -> {} .{} {}",
                    self.names[v],
                    self.names[left],
                    axis + 1,
                    self.names[right]
                )?,
            }
        }
        writeln!(f, "START {}", self.names[self.start])
    }
}
