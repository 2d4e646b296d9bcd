use std::collections::BTreeMap;

use super::{Op, PowerfulSkewCircuit, Semiring};
use crate::error::{Error, Result};
use crate::polyring::SparsePoly;

/// An edge-labelled DAG with a source and a sink; its value is the sum over
/// all source-to-sink paths of the product of the labels along the path.
///
/// Nodes are `0..n`. Parallel edges are merged by adding their labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerfulBP {
    nvars: usize,
    nodes: usize,
    edges: BTreeMap<(usize, usize), SparsePoly>,
    source: usize,
    sink: usize,
}

impl PowerfulBP {
    pub fn new(nvars: usize, nodes: usize, source: usize, sink: usize) -> Self {
        PowerfulBP {
            nvars,
            nodes,
            edges: BTreeMap::new(),
            source,
            sink,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), SparsePoly> {
        &self.edges
    }

    /// Add `label` to the edge `u -> v`, creating it if needed.
    pub fn add_edge(&mut self, u: usize, v: usize, label: SparsePoly) {
        let label = if label.nvars() < self.nvars {
            label.with_nvars(self.nvars)
        } else {
            label
        };
        match self.edges.remove(&(u, v)) {
            None => {
                self.edges.insert((u, v), label);
            }
            Some(old) => {
                let mut terms = old.terms().to_vec();
                terms.extend_from_slice(label.terms());
                let sum = SparsePoly::new(self.nvars.max(label.nvars()), terms);
                self.edges.insert((u, v), sum);
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBranchingProgram(m));
        if self.nodes == 0 {
            return bad("no nodes".into());
        }
        if self.source >= self.nodes || self.sink >= self.nodes {
            return bad("source or sink out of range".into());
        }
        if self.source == self.sink && self.nodes != 1 {
            return bad("source equals sink".into());
        }
        for (&(u, v), label) in &self.edges {
            if u >= self.nodes || v >= self.nodes {
                return bad(format!("edge {} -> {} leaves the node range", u + 1, v + 1));
            }
            if label.nvars() > self.nvars {
                return bad(format!("edge {} -> {} uses too many variables", u + 1, v + 1));
            }
        }
        self.topo_order().map(|_| ())
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.nodes];
        for &(u, v) in self.edges.keys() {
            succ[u].push(v);
        }
        succ
    }

    /// All nodes, each before its successors.
    fn topo_order(&self) -> Result<Vec<usize>> {
        let succ = self.successors();
        let mut indeg = vec![0usize; self.nodes];
        for &(_, v) in self.edges.keys() {
            indeg[v] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(v);
                }
            }
        }
        if order.len() != self.nodes {
            return Err(Error::InvalidBranchingProgram("graph has a cycle".into()));
        }
        Ok(order)
    }

    /// Path-sum value by dynamic programming in reverse topological order.
    pub fn evaluate<S: Semiring>(
        &self,
        sr: &S,
        mut label: impl FnMut(&SparsePoly) -> S::Elem,
    ) -> Result<S::Elem> {
        let order = self.topo_order()?;
        let mut to_sink: Vec<S::Elem> = vec![sr.zero(); self.nodes];
        to_sink[self.sink] = sr.one();
        let mut out_edges: Vec<Vec<(usize, &SparsePoly)>> = vec![Vec::new(); self.nodes];
        for (&(u, v), l) in &self.edges {
            out_edges[u].push((v, l));
        }
        for &u in order.iter().rev() {
            if u == self.sink {
                continue;
            }
            let mut acc = sr.zero();
            for &(v, l) in &out_edges[u] {
                acc = sr.add(&acc, &sr.mul(&label(l), &to_sink[v]));
            }
            to_sink[u] = acc;
        }
        Ok(to_sink[self.source].clone())
    }

    /// `(sum_{i=0}^{n} M^i)[s, t]` for the labelled adjacency matrix `M`.
    ///
    /// The powers are accumulated row by row: row `s` of `M^i` is row `s` of
    /// `M^{i-1}` times `M`. Independent of [`evaluate`](Self::evaluate); kept
    /// as a cross-check.
    pub fn evaluate_matrix<S: Semiring>(
        &self,
        sr: &S,
        mut label: impl FnMut(&SparsePoly) -> S::Elem,
    ) -> S::Elem {
        let n = self.nodes;
        let mut matrix: Vec<Vec<(usize, S::Elem)>> = vec![Vec::new(); n];
        for (&(u, v), l) in &self.edges {
            matrix[u].push((v, label(l)));
        }
        let mut row: Vec<S::Elem> = vec![sr.zero(); n];
        row[self.source] = sr.one();
        let mut total = row[self.sink].clone();
        for _ in 1..=n {
            let mut next: Vec<S::Elem> = vec![sr.zero(); n];
            for (k, entries) in matrix.iter().enumerate() {
                for (j, m) in entries {
                    next[*j] = sr.add(&next[*j], &sr.mul(&row[k], m));
                }
            }
            row = next;
            total = sr.add(&total, &row[self.sink]);
        }
        total
    }

    /// Equivalent circuit: the sink is the constant 1 and every other node
    /// computes `sum over edges (u, v) of label(u, v) * W(v)`.
    pub fn to_circuit(&self) -> Result<PowerfulSkewCircuit> {
        self.check()?;
        let order = self.topo_order()?;
        let mut c = PowerfulSkewCircuit::new(self.nvars.max(1));
        let mut out_edges: Vec<Vec<(usize, &SparsePoly)>> = vec![Vec::new(); self.nodes];
        for (&(u, v), l) in &self.edges {
            out_edges[u].push((v, l));
        }
        let nv = c.nvars();
        let mut gate: Vec<Option<usize>> = vec![None; self.nodes];
        gate[self.sink] = Some(c.input(SparsePoly::one(nv)));
        for &u in order.iter().rev() {
            if u == self.sink {
                continue;
            }
            let mut acc: Option<usize> = None;
            for &(v, l) in &out_edges[u] {
                let Some(gv) = gate[v] else { continue };
                let lg = c.input(l.clone());
                let term = c.mul(lg, gv);
                acc = Some(match acc {
                    None => term,
                    Some(a) => c.add(a, term),
                });
            }
            gate[u] = Some(match acc {
                Some(a) => a,
                None => c.input(SparsePoly::zero(nv)),
            });
        }
        c.set_output(gate[self.source].expect("every node gets a gate"));
        Ok(c)
    }

    /// Equivalent branching program of a skew circuit: one node per gate
    /// reachable from the output, plus a sink.
    pub fn from_circuit(c: &PowerfulSkewCircuit) -> Result<PowerfulBP> {
        c.check()?;
        let order = c.graph().topo_order()?;
        let mut node = vec![usize::MAX; c.gates().len()];
        // Output first so that it becomes node 0.
        for (i, &g) in order.iter().rev().enumerate() {
            node[g] = i;
        }
        let sink = order.len();
        let nv = c.nvars();
        let mut bp = PowerfulBP::new(nv, order.len() + 1, node[c.output()], sink);
        let one = SparsePoly::one(nv);
        for &g in &order {
            let u = node[g];
            match &c.gates()[g].op {
                Op::Input(p) => bp.add_edge(u, sink, p.clone()),
                Op::Add(a, b) => {
                    bp.add_edge(u, node[*a], one.clone());
                    bp.add_edge(u, node[*b], one.clone());
                }
                Op::Mul(a, b) => {
                    let (input, other) = match &c.gates()[*a].op {
                        Op::Input(p) => (p, *b),
                        _ => match &c.gates()[*b].op {
                            Op::Input(p) => (p, *a),
                            _ => unreachable!("checked circuits are skew"),
                        },
                    };
                    bp.add_edge(u, node[other], input.clone());
                }
            }
        }
        Ok(bp)
    }

    /// Text form: `NODE n`, `EDGE u v <poly>` (1-based), `SOURCE s`, `SINK t`.
    pub fn to_text(&self) -> String {
        let mut s = format!("NODE {}\n", self.nodes);
        for (&(u, v), l) in &self.edges {
            s.push_str(&format!("EDGE {} {} {}\n", u + 1, v + 1, l));
        }
        s.push_str(&format!("SOURCE {}\nSINK {}\n", self.source + 1, self.sink + 1));
        s
    }
}
