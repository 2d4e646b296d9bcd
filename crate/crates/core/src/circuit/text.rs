//! Line-oriented text formats for circuits and branching programs.
//!
//! Circuit:
//!
//! ```text
//! # comment
//! g0 = INPUT 3*x1^17 + -1*x2^100000000000
//! g1 = INPUT 1
//! g2 = ADD g0 g1
//! g3 = MUL g0 g2
//! OUTPUT g3
//! ```
//!
//! Gates may be listed in any order. Branching program: `NODE n`, then
//! `EDGE u v <poly>` lines with 1-based nodes, `SOURCE s` and `SINK t`.

use std::fmt;
use std::str::FromStr;

use super::{Gate, GateId, Op, PowerfulBP, PowerfulSkewCircuit, SkewCircuit};
use crate::error::{Error, ParseError};
use crate::polyring::SparsePoly;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains('=') && !name.chars().any(char::is_whitespace)
}

enum RawOp {
    Input(SparsePoly),
    Add(String, String),
    Mul(String, String),
}

impl FromStr for PowerfulSkewCircuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut raw: Vec<(usize, String, RawOp)> = Vec::new();
        let mut output: Option<(usize, String)> = None;
        for (ln, line) in content_lines(text) {
            if let Some(rest) = line.strip_prefix("OUTPUT") {
                let name = rest.trim();
                if !valid_name(name) || !rest.starts_with(char::is_whitespace) {
                    return Err(ParseError::new(ln, "expected `OUTPUT <gate>`").into());
                }
                if output.is_some() {
                    return Err(ParseError::new(ln, "second OUTPUT line").into());
                }
                output = Some((ln, name.to_string()));
                continue;
            }
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| ParseError::new(ln, "expected `<gate> = <rhs>`"))?;
            let name = name.trim();
            if !valid_name(name) {
                return Err(ParseError::new(ln, format!("bad gate name `{name}`")).into());
            }
            let rhs = rhs.trim();
            let (kind, args) = rhs.split_once(char::is_whitespace).unwrap_or((rhs, ""));
            let args = args.trim();
            let op = match kind {
                "INPUT" => RawOp::Input(
                    SparsePoly::parse(args).map_err(|m| ParseError::new(ln, m))?,
                ),
                "ADD" | "MUL" => {
                    let parts: Vec<&str> = args.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(ParseError::new(ln, format!("{kind} takes two gates")).into());
                    }
                    let (a, b) = (parts[0].to_string(), parts[1].to_string());
                    if kind == "ADD" {
                        RawOp::Add(a, b)
                    } else {
                        RawOp::Mul(a, b)
                    }
                }
                other => {
                    return Err(ParseError::new(
                        ln,
                        format!("unknown gate kind `{other}` (expected INPUT, ADD or MUL)"),
                    )
                    .into())
                }
            };
            raw.push((ln, name.to_string(), op));
        }
        let (out_line, out_name) =
            output.ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing OUTPUT line"))?;
        let nvars = raw
            .iter()
            .filter_map(|(_, _, op)| match op {
                RawOp::Input(p) => Some(p.nvars()),
                _ => None,
            })
            .max()
            .unwrap_or(1);
        let mut ids = std::collections::HashMap::new();
        for (i, (ln, name, _)) in raw.iter().enumerate() {
            if ids.insert(name.clone(), i).is_some() {
                return Err(ParseError::new(*ln, format!("gate `{name}` is defined twice")).into());
            }
        }
        let resolve = |ln: usize, name: &str| -> Result<GateId, Error> {
            ids.get(name)
                .copied()
                .ok_or_else(|| ParseError::new(ln, format!("unknown gate `{name}`")).into())
        };
        let mut gates = Vec::with_capacity(raw.len());
        for (ln, name, op) in &raw {
            let op = match op {
                RawOp::Input(p) => Op::Input(p.with_nvars(nvars)),
                RawOp::Add(a, b) => Op::Add(resolve(*ln, a)?, resolve(*ln, b)?),
                RawOp::Mul(a, b) => Op::Mul(resolve(*ln, a)?, resolve(*ln, b)?),
            };
            gates.push(Gate {
                name: name.clone(),
                op,
            });
        }
        let out = resolve(out_line, &out_name)?;
        Ok(PowerfulSkewCircuit::from_graph(nvars, SkewCircuit::from_gates(gates, out)?))
    }
}

impl fmt::Display for PowerfulSkewCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gates = self.gates();
        for g in gates {
            match &g.op {
                Op::Input(p) => writeln!(f, "{} = INPUT {}", g.name, p)?,
                Op::Add(a, b) => writeln!(f, "{} = ADD {} {}", g.name, gates[*a].name, gates[*b].name)?,
                Op::Mul(a, b) => writeln!(f, "{} = MUL {} {}", g.name, gates[*a].name, gates[*b].name)?,
            }
        }
        if let Some(out) = gates.get(self.output()) {
            writeln!(f, "OUTPUT {}", out.name)?;
        }
        Ok(())
    }
}

fn parse_node(ln: usize, s: &str, nodes: Option<usize>) -> Result<usize, ParseError> {
    let v: usize = s
        .parse()
        .map_err(|_| ParseError::new(ln, format!("bad node `{s}`")))?;
    let n = nodes.ok_or_else(|| ParseError::new(ln, "NODE must come first"))?;
    if v == 0 || v > n {
        return Err(ParseError::new(ln, format!("node {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

impl FromStr for PowerfulBP {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut nodes: Option<usize> = None;
        let mut edges: Vec<(usize, usize, SparsePoly)> = Vec::new();
        let mut source = None;
        let mut sink = None;
        for (ln, line) in content_lines(text) {
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "NODE" => {
                    if nodes.is_some() {
                        return Err(ParseError::new(ln, "second NODE line").into());
                    }
                    let n: usize = rest
                        .parse()
                        .map_err(|_| ParseError::new(ln, "expected `NODE <count>`"))?;
                    if n == 0 {
                        return Err(ParseError::new(ln, "a program needs at least one node").into());
                    }
                    nodes = Some(n);
                }
                "EDGE" => {
                    let mut parts = rest.splitn(3, char::is_whitespace);
                    let u = parts.next().unwrap_or("");
                    let v = parts.next().unwrap_or("");
                    let label = parts
                        .next()
                        .ok_or_else(|| ParseError::new(ln, "expected `EDGE u v <poly>`"))?;
                    let u = parse_node(ln, u, nodes)?;
                    let v = parse_node(ln, v, nodes)?;
                    let label = SparsePoly::parse(label).map_err(|m| ParseError::new(ln, m))?;
                    edges.push((u, v, label));
                }
                "SOURCE" => source = Some(parse_node(ln, rest, nodes)?),
                "SINK" => sink = Some(parse_node(ln, rest, nodes)?),
                other => {
                    return Err(ParseError::new(ln, format!("unknown keyword `{other}`")).into())
                }
            }
        }
        let last = text.lines().count().max(1);
        let nodes = nodes.ok_or_else(|| ParseError::new(last, "missing NODE line"))?;
        let source = source.ok_or_else(|| ParseError::new(last, "missing SOURCE line"))?;
        let sink = sink.ok_or_else(|| ParseError::new(last, "missing SINK line"))?;
        let nvars = edges.iter().map(|(_, _, l)| l.nvars()).max().unwrap_or(1);
        let mut bp = PowerfulBP::new(nvars, nodes, source, sink);
        for (u, v, l) in edges {
            bp.add_edge(u, v, l);
        }
        bp.check()?;
        Ok(bp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# forward references are fine
g3 = MUL g0 g2
g0 = INPUT 3*x1^17 + -1*x2^100000000000
g1 = INPUT 1
g2 = ADD g0 g1
OUTPUT g3
";

    #[test]
    fn circuit_text_round_trip() {
        let c: PowerfulSkewCircuit = SAMPLE.parse().unwrap();
        assert_eq!(c.nvars(), 2);
        assert!(c.validate().is_empty());
        let again: PowerfulSkewCircuit = c.to_string().parse().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn circuit_errors_carry_line_numbers() {
        let cases = [
            ("g0 = INPUT x\ng1 = ADD g0 g9\nOUTPUT g1\n", 2),
            ("g0 = INPUT x^\nOUTPUT g0\n", 1),
            ("g0 = INPUT x\ng0 = INPUT 1\nOUTPUT g0\n", 2),
            ("g0 = SUB g0 g0\nOUTPUT g0\n", 1),
            ("g0 = INPUT x\n", 1),
            ("g0 = INPUT x\nOUTPUT nope\n", 2),
        ];
        for (text, line) in cases {
            match text.parse::<PowerfulSkewCircuit>() {
                Err(Error::Parse(e)) => assert_eq!(e.line, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn bp_text_round_trip() {
        let text = "NODE 3\nEDGE 1 2 x^5\nEDGE 2 3 1 + x\nEDGE 1 3 7\nSOURCE 1\nSINK 3\n";
        let bp: PowerfulBP = text.parse().unwrap();
        assert_eq!(bp.edges().len(), 3);
        let again: PowerfulBP = bp.to_text().parse().unwrap();
        assert_eq!(again, bp);
        assert!("NODE 2\nEDGE 1 3 x\nSOURCE 1\nSINK 2\n".parse::<PowerfulBP>().is_err());
    }
}
