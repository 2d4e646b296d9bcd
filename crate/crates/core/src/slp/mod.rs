//! Straight-line programs for n-dimensional pictures.
//!
//! Every variable derives either a single cell holding one alphabet symbol
//! or the concatenation of two pictures along an axis. A picture has a
//! length along each axis; concatenating `p` and `q` along axis `i`
//! requires equal lengths on the other axes and places `q` after `p`.

mod equal;
mod text;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use equal::{encode_binary, slp_equal, to_poly_circuit, SlpVerdict};

pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    /// A single cell holding the alphabet symbol with this index.
    Terminal(usize),
    /// `left` followed by `right` along `axis` (0-based).
    Concat { left: VarId, axis: usize, right: VarId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdSlp {
    dim: usize,
    alphabet: Vec<String>,
    names: Vec<String>,
    rules: Vec<Rhs>,
    start: VarId,
    /// Each variable after the variables it refers to.
    order: Vec<VarId>,
    lengths: Vec<Vec<BigUint>>,
}

impl NdSlp {
    /// Validate and build. Rules are indexed by variable.
    pub fn new(
        dim: usize,
        alphabet: Vec<String>,
        names: Vec<String>,
        rules: Vec<Rhs>,
        start: VarId,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSlp(m));
        if dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if alphabet.is_empty() {
            return bad("empty alphabet".into());
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return bad(format!("symbol `{a}` listed twice"));
            }
        }
        if names.len() != rules.len() {
            return bad("one name per rule is required".into());
        }
        if start >= rules.len() {
            return bad("start variable has no rule".into());
        }
        for (v, rhs) in rules.iter().enumerate() {
            match *rhs {
                Rhs::Terminal(s) if s >= alphabet.len() => {
                    return bad(format!("`{}` uses an unknown symbol", names[v]));
                }
                Rhs::Concat { left, axis, right } => {
                    if axis >= dim {
                        return bad(format!("`{}` uses axis {} in dimension {dim}", names[v], axis + 1));
                    }
                    if left >= rules.len() || right >= rules.len() {
                        return bad(format!("`{}` refers to an undefined variable", names[v]));
                    }
                }
                _ => {}
            }
        }
        let order = topo_order(&rules, &names)?;
        let lengths = compute_lengths(dim, &rules, &names, &order)?;
        Ok(NdSlp {
            dim,
            alphabet,
            names,
            rules,
            start,
            order,
            lengths,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[Rhs] {
        &self.rules
    }

    pub fn start(&self) -> VarId {
        self.start
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Variables ordered so that each comes after the ones it uses.
    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    /// `lengths()[v][i]` is the length of `val(v)` along axis `i`.
    pub fn lengths(&self) -> &[Vec<BigUint>] {
        &self.lengths
    }

    /// Lengths of the derived picture.
    pub fn shape(&self) -> &[BigUint] {
        &self.lengths[self.start]
    }

    /// Number of cells of the derived picture.
    pub fn cells(&self) -> BigUint {
        self.shape().iter().product()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name)
    }

    /// Variables reachable from the start, in dependency order.
    pub fn reachable(&self) -> Vec<VarId> {
        let mut seen = vec![false; self.rules.len()];
        seen[self.start] = true;
        for &v in self.order.iter().rev() {
            if !seen[v] {
                continue;
            }
            if let Rhs::Concat { left, right, .. } = self.rules[v] {
                seen[left] = true;
                seen[right] = true;
            }
        }
        self.order.iter().copied().filter(|&v| seen[v]).collect()
    }

    /// The same program over a reordered or larger alphabet containing every
    /// symbol of this one.
    pub fn with_alphabet(&self, alphabet: &[String]) -> Result<NdSlp> {
        let mut map = Vec::with_capacity(self.alphabet.len());
        for a in &self.alphabet {
            let i = alphabet
                .iter()
                .position(|b| b == a)
                .ok_or_else(|| Error::InvalidSlp(format!("symbol `{a}` is not in the target alphabet")))?;
            map.push(i);
        }
        let rules = self
            .rules
            .iter()
            .map(|r| match *r {
                Rhs::Terminal(s) => Rhs::Terminal(map[s]),
                ref c => c.clone(),
            })
            .collect();
        NdSlp::new(self.dim, alphabet.to_vec(), self.names.clone(), rules, self.start)
    }

    /// The derived picture, provided it has at most `budget` cells.
    pub fn expand(&self, budget: u64) -> Result<Picture> {
        let cells = self.cells();
        if cells > BigUint::from(budget) {
            return Err(Error::BudgetExceeded(format!(
                "picture has {cells} cells, budget is {budget}"
            )));
        }
        let shape: Vec<usize> = self
            .shape()
            .iter()
            .map(|l| l.to_usize().expect("within budget"))
            .collect();
        let mut strides = vec![1usize; self.dim];
        for i in (0..self.dim.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let small = |v: VarId, i: usize| self.lengths[v][i].to_usize().expect("within budget");
        let mut cells = vec![0usize; cells.to_usize().expect("within budget")];
        let mut stack = vec![(self.start, 0usize)];
        while let Some((v, offset)) = stack.pop() {
            match self.rules[v] {
                Rhs::Terminal(s) => cells[offset] = s,
                Rhs::Concat { left, axis, right } => {
                    stack.push((left, offset));
                    stack.push((right, offset + small(left, axis) * strides[axis]));
                }
            }
        }
        Ok(Picture { shape, cells })
    }
}

fn topo_order(rules: &[Rhs], names: &[String]) -> Result<Vec<VarId>> {
    // 0 = unvisited, 1 = on the stack, 2 = done
    let mut state = vec![0u8; rules.len()];
    let mut order = Vec::with_capacity(rules.len());
    for root in 0..rules.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                state[v] = 2;
                order.push(v);
                continue;
            }
            if state[v] == 2 {
                continue;
            }
            state[v] = 1;
            stack.push((v, true));
            if let Rhs::Concat { left, right, .. } = rules[v] {
                for w in [right, left] {
                    match state[w] {
                        0 => stack.push((w, false)),
                        1 => {
                            return Err(Error::InvalidSlp(format!(
                                "variable `{}` derives itself",
                                names[w]
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(order)
}

fn compute_lengths(
    dim: usize,
    rules: &[Rhs],
    names: &[String],
    order: &[VarId],
) -> Result<Vec<Vec<BigUint>>> {
    let mut len: Vec<Vec<BigUint>> = vec![Vec::new(); rules.len()];
    for &v in order {
        len[v] = match rules[v] {
            Rhs::Terminal(_) => vec![BigUint::one(); dim],
            Rhs::Concat { left, axis, right } => {
                let (b, c) = (&len[left], &len[right]);
                if let Some(j) = (0..dim).find(|&j| j != axis && b[j] != c[j]) {
                    return Err(Error::InvalidSlp(format!(
                        "`{}` concatenates along axis {} but `{}` and `{}` differ in length on axis {} ({} vs {})",
                        names[v],
                        axis + 1,
                        names[left],
                        names[right],
                        j + 1,
                        b[j],
                        c[j]
                    )));
                }
                let mut l = b.clone();
                l[axis] = &b[axis] + &c[axis];
                l
            }
        };
    }
    Ok(len)
}

/// An explicit picture. Cells hold alphabet indices in row-major order: the
/// last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Picture {
    pub shape: Vec<usize>,
    pub cells: Vec<usize>,
}

impl Picture {
    /// Cell at 0-based coordinates.
    pub fn get(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for (c, n) in coords.iter().zip(&self.shape) {
            idx = idx * n + c;
        }
        self.cells[idx]
    }

    /// Text form: a 1-dimensional picture is one line; higher dimensions
    /// print one line per row of the last axis, with a blank line between
    /// consecutive slices of earlier axes.
    pub fn render(&self, alphabet: &[String]) -> String {
        let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
        let row = *self.shape.last().unwrap_or(&1);
        let mut out = String::new();
        for (i, chunk) in self.cells.chunks(row.max(1)).enumerate() {
            if i > 0 && self.shape.len() > 2 {
                let plane = self.shape[self.shape.len() - 2];
                if i % plane == 0 {
                    out.push('\n');
                }
            }
            let line: Vec<&str> = chunk.iter().map(|&s| alphabet[s].as_str()).collect();
            out.push_str(&line.join(sep));
            out.push('\n');
        }
        out
    }
}

/// Incremental construction of an [`NdSlp`] with automatic names.
#[derive(Clone, Debug)]
pub struct SlpBuilder {
    dim: usize,
    alphabet: Vec<String>,
    names: Vec<String>,
    rules: Vec<Rhs>,
    terminals: Vec<Option<VarId>>,
}

impl SlpBuilder {
    pub fn new(dim: usize, alphabet: Vec<String>) -> Self {
        let n = alphabet.len();
        SlpBuilder {
            dim,
            alphabet,
            names: Vec::new(),
            rules: Vec::new(),
            terminals: vec![None; n],
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn push(&mut self, rhs: Rhs) -> VarId {
        let id = self.rules.len();
        self.names.push(format!("X{id}"));
        self.rules.push(rhs);
        id
    }

    /// Variable deriving the single symbol with index `s`; shared.
    pub fn terminal(&mut self, s: usize) -> VarId {
        if let Some(v) = self.terminals[s] {
            return v;
        }
        let v = self.push(Rhs::Terminal(s));
        self.terminals[s] = Some(v);
        v
    }

    /// Variable deriving the named symbol.
    pub fn symbol(&mut self, name: &str) -> VarId {
        let s = self
            .alphabet
            .iter()
            .position(|a| a == name)
            .unwrap_or_else(|| panic!("symbol `{name}` is not in the alphabet"));
        self.terminal(s)
    }

    pub fn concat(&mut self, left: VarId, axis: usize, right: VarId) -> VarId {
        self.push(Rhs::Concat { left, axis, right })
    }

    /// Concatenation where either side may be the empty word; 1-dimensional.
    pub fn join(&mut self, left: Option<VarId>, right: Option<VarId>) -> Option<VarId> {
        match (left, right) {
            (None, r) => r,
            (l, None) => l,
            (Some(l), Some(r)) => Some(self.concat(l, 0, r)),
        }
    }

    /// `v` repeated `n` times along `axis` by repeated doubling; `None` for
    /// `n = 0`. Uses at most `2 * bitlen(n)` new variables.
    pub fn power(&mut self, v: VarId, axis: usize, n: &BigUint) -> Option<VarId> {
        if n.is_zero() {
            return None;
        }
        let mut acc: Option<VarId> = None;
        let mut square = v;
        let bits = n.bits();
        for i in 0..bits {
            if n.bit(i) {
                acc = Some(match acc {
                    None => square,
                    Some(a) => self.concat(a, axis, square),
                });
            }
            if i + 1 < bits {
                square = self.concat(square, axis, square);
            }
        }
        acc
    }

    pub fn build(self, start: VarId) -> Result<NdSlp> {
        NdSlp::new(self.dim, self.alphabet, self.names, self.rules, start)
    }
}
