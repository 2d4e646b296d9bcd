//! Skew circuits and branching programs over polynomial rings and tropical
//! semirings.
//!
//! A [`SkewCircuit`] is a DAG of named gates whose leaves carry values of an
//! arbitrary type; [`PowerfulSkewCircuit`] fixes the leaves to succinct
//! multivariate polynomials.

mod bp;
mod eval;
mod semiring;
mod text;

pub use bp::PowerfulBP;
pub use eval::{degree_bound, eval_mod, kronecker_substitute, tropical_eval};
pub(crate) use eval::eval_mod_words;
pub use semiring::{MaxPlus, MinPlus, ResidueRing, Semiring, Tropical};

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::polyring::SparsePoly;

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op<L> {
    Input(L),
    Add(GateId, GateId),
    Mul(GateId, GateId),
}

impl<L> Op<L> {
    pub fn operands(&self) -> Option<(GateId, GateId)> {
        match self {
            Op::Input(_) => None,
            Op::Add(a, b) | Op::Mul(a, b) => Some((*a, *b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate<L> {
    pub name: String,
    pub op: Op<L>,
}

/// A structural problem found by [`SkewCircuit::violations`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The gate lies on a directed cycle.
    Cycle(String),
    /// A multiplication gate with two non-input operands.
    NotSkew(String),
    /// An operand or the output refers to a gate that does not exist.
    DanglingReference { gate: String, target: GateId },
    /// An input polynomial uses more variables than the circuit declares.
    VariableOutOfRange { gate: String, nvars: usize },
    /// An input polynomial is not in canonical form.
    NonCanonical(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(g) => write!(f, "gate {g} lies on a cycle"),
            Violation::NotSkew(g) => write!(f, "gate {g} multiplies two non-input gates"),
            Violation::DanglingReference { gate, target } => {
                write!(f, "gate {gate} refers to missing gate #{target}")
            }
            Violation::VariableOutOfRange { gate, nvars } => {
                write!(f, "gate {gate} uses more than {nvars} variables")
            }
            Violation::NonCanonical(g) => write!(f, "gate {g} has a non-canonical polynomial"),
        }
    }
}

/// A circuit with leaves of type `L`, `+` and `*` gates, and one output.
///
/// Gates may be stored in any order; evaluation recomputes a topological
/// order of the gates reachable from the output.
#[derive(Clone, Debug)]
pub struct SkewCircuit<L> {
    gates: Vec<Gate<L>>,
    names: HashMap<String, GateId>,
    output: GateId,
}

impl<L: PartialEq> PartialEq for SkewCircuit<L> {
    fn eq(&self, other: &Self) -> bool {
        self.gates == other.gates && self.output == other.output
    }
}

impl<L> Default for SkewCircuit<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L> SkewCircuit<L> {
    /// An empty circuit; its output is fixed by the first gate added until
    /// [`set_output`](Self::set_output) is called.
    pub fn new() -> Self {
        SkewCircuit {
            gates: Vec::new(),
            names: HashMap::new(),
            output: 0,
        }
    }

    /// Assemble a circuit from raw gates without checking anything.
    pub fn from_gates(gates: Vec<Gate<L>>, output: GateId) -> Result<Self> {
        let mut names = HashMap::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            if names.insert(g.name.clone(), i).is_some() {
                return Err(Error::InvalidCircuit(format!("gate {} is defined twice", g.name)));
            }
        }
        Ok(SkewCircuit {
            gates,
            names,
            output,
        })
    }

    pub fn gates(&self) -> &[Gate<L>] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate<L> {
        &self.gates[id]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn set_output(&mut self, g: GateId) {
        self.output = g;
    }

    pub fn lookup(&self, name: &str) -> Option<GateId> {
        self.names.get(name).copied()
    }

    fn fresh_name(&self) -> String {
        let mut name = format!("g{}", self.gates.len());
        while self.names.contains_key(&name) {
            name.push('_');
        }
        name
    }

    fn push(&mut self, op: Op<L>) -> GateId {
        let name = self.fresh_name();
        self.push_named(name, op)
    }

    /// Add a gate with a caller-chosen name (must be unused).
    pub fn push_named(&mut self, name: String, op: Op<L>) -> GateId {
        let id = self.gates.len();
        let previous = self.names.insert(name.clone(), id);
        assert!(previous.is_none(), "gate name {name} is already in use");
        self.gates.push(Gate { name, op });
        if id == 0 {
            self.output = 0;
        }
        id
    }

    pub fn input(&mut self, leaf: L) -> GateId {
        self.push(Op::Input(leaf))
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Op::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Op::Mul(a, b))
    }

    pub fn is_input(&self, g: GateId) -> bool {
        matches!(self.gates.get(g).map(|g| &g.op), Some(Op::Input(_)))
    }

    /// Structural problems: dangling references, cycles, non-skew products.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.gates.len();
        if self.output >= n {
            out.push(Violation::DanglingReference {
                gate: "OUTPUT".into(),
                target: self.output,
            });
        }
        for g in &self.gates {
            if let Some((a, b)) = g.op.operands() {
                for t in [a, b] {
                    if t >= n {
                        out.push(Violation::DanglingReference {
                            gate: g.name.clone(),
                            target: t,
                        });
                    }
                }
                if let Op::Mul(a, b) = g.op {
                    if a < n && b < n && !self.is_input(a) && !self.is_input(b) {
                        out.push(Violation::NotSkew(g.name.clone()));
                    }
                }
            }
        }
        if out.iter().all(|v| !matches!(v, Violation::DanglingReference { .. })) {
            for id in self.cyclic_gates() {
                out.push(Violation::Cycle(self.gates[id].name.clone()));
            }
        }
        out
    }

    /// Gates that lie on a cycle (all references assumed in range).
    fn cyclic_gates(&self) -> Vec<GateId> {
        // Kahn's algorithm on the reversed edges; whatever is never freed is
        // on a cycle or only reaches one.
        let n = self.gates.len();
        let mut pending = vec![0usize; n];
        let mut users: Vec<Vec<GateId>> = vec![Vec::new(); n];
        for (id, g) in self.gates.iter().enumerate() {
            if let Some((a, b)) = g.op.operands() {
                pending[id] = if a == b { 1 } else { 2 };
                users[a].push(id);
                if a != b {
                    users[b].push(id);
                }
            }
        }
        let mut ready: Vec<GateId> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut done = vec![false; n];
        while let Some(g) = ready.pop() {
            done[g] = true;
            for &u in &users[g] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(u);
                }
            }
        }
        // Report only gates actually on a cycle: a gate is cyclic if it can
        // reach itself through unfinished gates.
        let stuck: Vec<GateId> = (0..n).filter(|&i| !done[i]).collect();
        stuck
            .into_iter()
            .filter(|&g| self.reaches(g, g, &done))
            .collect()
    }

    fn reaches(&self, from: GateId, target: GateId, done: &[bool]) -> bool {
        let mut seen = vec![false; self.gates.len()];
        let mut stack: Vec<GateId> = Vec::new();
        if let Some((a, b)) = self.gates[from].op.operands() {
            stack.extend([a, b]);
        }
        while let Some(g) = stack.pop() {
            if g == target {
                return true;
            }
            if done[g] || seen[g] {
                continue;
            }
            seen[g] = true;
            if let Some((a, b)) = self.gates[g].op.operands() {
                stack.extend([a, b]);
            }
        }
        false
    }

    /// Gates reachable from the output, operands before users.
    pub fn topo_order(&self) -> Result<Vec<GateId>> {
        let n = self.gates.len();
        if self.output >= n {
            return Err(Error::InvalidCircuit("output gate does not exist".into()));
        }
        // 0 = unvisited, 1 = on stack, 2 = finished
        let mut state = vec![0u8; n];
        let mut order = Vec::new();
        let mut stack: Vec<(GateId, bool)> = vec![(self.output, false)];
        while let Some((g, expanded)) = stack.pop() {
            if expanded {
                state[g] = 2;
                order.push(g);
                continue;
            }
            match state[g] {
                2 => continue,
                1 => {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {} lies on a cycle",
                        self.gates[g].name
                    )))
                }
                _ => {}
            }
            state[g] = 1;
            stack.push((g, true));
            if let Some((a, b)) = self.gates[g].op.operands() {
                for c in [b, a] {
                    if c >= n {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {} refers to a missing gate",
                            self.gates[g].name
                        )));
                    }
                    match state[c] {
                        0 => stack.push((c, false)),
                        1 => {
                            return Err(Error::InvalidCircuit(format!(
                                "gate {} lies on a cycle",
                                self.gates[c].name
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(order)
    }

    /// Evaluate over a semiring, mapping each reachable leaf through `leaf`.
    pub fn evaluate<S: Semiring>(
        &self,
        sr: &S,
        mut leaf: impl FnMut(&L) -> S::Elem,
    ) -> Result<S::Elem> {
        let order = self.topo_order()?;
        let mut values: Vec<Option<S::Elem>> = vec![None; self.gates.len()];
        let get = |values: &[Option<S::Elem>], g: GateId| -> S::Elem {
            values[g].clone().expect("operands are evaluated first")
        };
        for g in order {
            let v = match &self.gates[g].op {
                Op::Input(l) => leaf(l),
                Op::Add(a, b) => sr.add(&get(&values, *a), &get(&values, *b)),
                Op::Mul(a, b) => sr.mul(&get(&values, *a), &get(&values, *b)),
            };
            values[g] = Some(v);
        }
        Ok(values[self.output].take().expect("output is evaluated"))
    }

    /// Same structure with every leaf transformed.
    pub fn map_leaves<M>(&self, mut f: impl FnMut(&L) -> M) -> SkewCircuit<M> {
        SkewCircuit {
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    name: g.name.clone(),
                    op: match &g.op {
                        Op::Input(l) => Op::Input(f(l)),
                        Op::Add(a, b) => Op::Add(*a, *b),
                        Op::Mul(a, b) => Op::Mul(*a, *b),
                    },
                })
                .collect(),
            names: self.names.clone(),
            output: self.output,
        }
    }
}

/// A skew circuit over `R[x_1, ..., x_k]` whose input gates hold polynomials
/// with binary exponents.
///
/// Coefficients are integers; over F_p they are reduced when the circuit is
/// evaluated, so the same circuit can be tested over several rings.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerfulSkewCircuit {
    nvars: usize,
    graph: SkewCircuit<SparsePoly>,
}

impl PowerfulSkewCircuit {
    pub fn new(nvars: usize) -> Self {
        assert!(nvars >= 1, "a circuit needs at least one variable");
        PowerfulSkewCircuit {
            nvars,
            graph: SkewCircuit::new(),
        }
    }

    pub fn from_graph(nvars: usize, graph: SkewCircuit<SparsePoly>) -> Self {
        PowerfulSkewCircuit { nvars, graph }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn graph(&self) -> &SkewCircuit<SparsePoly> {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut SkewCircuit<SparsePoly> {
        &mut self.graph
    }

    pub fn gates(&self) -> &[Gate<SparsePoly>] {
        self.graph.gates()
    }

    pub fn output(&self) -> GateId {
        self.graph.output()
    }

    pub fn set_output(&mut self, g: GateId) {
        self.graph.set_output(g)
    }

    /// Add an input gate; the polynomial is padded to the circuit's variables.
    pub fn input(&mut self, p: SparsePoly) -> GateId {
        assert!(p.nvars() <= self.nvars, "polynomial has too many variables");
        let p = if p.nvars() < self.nvars {
            p.with_nvars(self.nvars)
        } else {
            p
        };
        self.graph.input(p)
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.graph.add(a, b)
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.graph.mul(a, b)
    }

    /// Circuit size: input gates cost the bit size of their polynomial,
    /// internal gates cost one.
    pub fn size(&self) -> u64 {
        self.gates()
            .iter()
            .map(|g| match &g.op {
                Op::Input(p) => p.size(),
                _ => 1,
            })
            .sum()
    }

    /// Every structural problem, empty for a valid circuit.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.graph.violations();
        for g in self.gates() {
            if let Op::Input(p) = &g.op {
                if p.nvars() > self.nvars {
                    out.push(Violation::VariableOutOfRange {
                        gate: g.name.clone(),
                        nvars: self.nvars,
                    });
                } else if p.nvars() < self.nvars
                    || *p != SparsePoly::new(p.nvars(), p.terms().to_vec())
                {
                    out.push(Violation::NonCanonical(g.name.clone()));
                }
            }
        }
        out
    }

    /// `Ok` iff [`validate`](Self::validate) finds nothing.
    pub fn check(&self) -> Result<()> {
        if self.graph.is_empty() {
            return Err(Error::InvalidCircuit("circuit has no gates".into()));
        }
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidCircuit(v.to_string())),
        }
    }

    /// The same circuit with every input polynomial transformed.
    pub fn map_inputs(&self, nvars: usize, f: impl FnMut(&SparsePoly) -> SparsePoly) -> Self {
        PowerfulSkewCircuit {
            nvars,
            graph: self.graph.map_leaves(f),
        }
    }
}
