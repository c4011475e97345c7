use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::chimera::ChimeraTopology;
use crate::darcy::Shape;
use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Real;

/// Ferromagnetic coupling that holds a chain together.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStrength {
    /// This multiple of the largest logical coefficient touching the chain.
    Relative(f64),
    Absolute(f64),
}

impl Default for ChainStrength {
    fn default() -> Self {
        ChainStrength::Relative(1.5)
    }
}

/// Logical variable `i` is carried by the qubits `chains[i]`. Physical QUBOs
/// built by [`embed_qubo`] number their variables by walking the chains in
/// order, so variable `p` is qubit [`Embedding::qubits`]`()[p]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub topology: ChimeraTopology,
    pub chains: Vec<Vec<usize>>,
    pub chain_strength: ChainStrength,
    offsets: Vec<usize>,
    trees: Vec<Vec<(usize, usize)>>,
}

impl Embedding {
    /// Checks that chains are disjoint and connected.
    pub fn new(topology: ChimeraTopology, chains: Vec<Vec<usize>>, chain_strength: ChainStrength) -> Result<Self> {
        let mut owner = vec![usize::MAX; topology.num_qubits()];
        let mut offsets = vec![0];
        let mut trees = Vec::with_capacity(chains.len());
        for (i, chain) in chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(Error::Embedding(format!("chain {i} is empty")));
            }
            for &q in chain {
                if q >= owner.len() || !topology.active[q] {
                    return Err(Error::Embedding(format!("chain {i} uses unavailable qubit {q}")));
                }
                if owner[q] != usize::MAX {
                    return Err(Error::Embedding(format!("qubit {q} is shared by chains {} and {i}", owner[q])));
                }
                owner[q] = i;
            }
            let tree = spanning_tree(&topology, chain);
            if tree.len() + 1 != chain.len() {
                return Err(Error::Embedding(format!("chain {i} is not connected")));
            }
            trees.push(tree);
            offsets.push(offsets[i] + chain.len());
        }
        Ok(Self { topology, chains, chain_strength, offsets, trees })
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Physical variable range of logical variable `i`.
    pub fn span(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.chains.concat()
    }

    pub fn with_chain_strength(mut self, s: ChainStrength) -> Self {
        self.chain_strength = s;
        self
    }

    /// `{chain_strength, chains: {"i": [qubits]}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let chains: BTreeMap<String, &Vec<usize>> =
            self.chains.iter().enumerate().map(|(i, c)| (i.to_string(), c)).collect();
        json!({ "chain_strength": self.chain_strength, "chains": chains })
    }
}

fn spanning_tree(t: &ChimeraTopology, chain: &[usize]) -> Vec<(usize, usize)> {
    let mut seen = vec![false; chain.len()];
    let mut edges = Vec::new();
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for b in 0..chain.len() {
            if !seen[b] && t.has_edge(chain[a], chain[b]) {
                seen[b] = true;
                edges.push((chain[a], chain[b]));
                stack.push(b);
            }
        }
    }
    edges
}

/// Longest path through the qubits of `allot` that starts at `entry` and
/// ends at `exit` when those are given.
fn cell_path(t: &ChimeraTopology, allot: &[usize], entry: Option<usize>, exit: Option<usize>) -> Vec<usize> {
    fn grow(
        t: &ChimeraTopology,
        allot: &[usize],
        exit: Option<usize>,
        path: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Vec<usize>,
    ) {
        let last = *path.last().unwrap();
        if exit.is_none_or(|e| e == last) && path.len() > best.len() {
            *best = path.clone();
        }
        if best.len() == allot.len() || exit == Some(last) {
            return;
        }
        for (i, &q) in allot.iter().enumerate() {
            if !used[i] && t.has_edge(last, q) {
                used[i] = true;
                path.push(q);
                grow(t, allot, exit, path, used, best);
                path.pop();
                used[i] = false;
            }
        }
    }
    let starts: Vec<usize> = match entry {
        Some(e) => vec![e],
        None => allot.to_vec(),
    };
    let mut best = Vec::new();
    for s in starts {
        let mut used: Vec<bool> = allot.iter().map(|&q| q == s).collect();
        let mut path = vec![s];
        grow(t, allot, exit, &mut path, &mut used, &mut best);
        if best.len() == allot.len() {
            break;
        }
    }
    best
}

struct Visit {
    row: usize,
    col: usize,
    entry: Option<usize>,
    exit: Option<usize>,
    /// `None` means the whole cell.
    allot: Option<Vec<usize>>,
}

/// A long simple path through the topology.
///
/// Single rows and columns are walked straight through. Two-wide grids zigzag
/// and visit every qubit. Larger grids cross each interior cell twice: once
/// along a row on `R_0, R_1, L_0` and once along a column on
/// `L_1, L_2, L_3, R_2, R_3`. The border cells are turning points and are
/// visited completely, so a 16 x 16 chip leaves only one corner cell unused.
pub fn long_path(t: &ChimeraTopology) -> Vec<usize> {
    let (m, n) = (t.rows, t.cols);
    let l = |r, c, k| t.left(r, c, k);
    let rq = |r, c, k| t.right(r, c, k);
    let mut v: Vec<Visit> = Vec::new();
    let full = |row, col, entry, exit, v: &mut Vec<Visit>| v.push(Visit { row, col, entry, exit, allot: None });
    if m == 1 || n == 1 {
        let len = m.max(n);
        for i in 0..len {
            let (r, c) = if m == 1 { (0, i) } else { (i, 0) };
            let port = |r, c, k| if m == 1 { rq(r, c, k) } else { l(r, c, k) };
            let entry = (i > 0).then(|| port(r, c, (i - 1) % 2));
            let exit = (i + 1 < len).then(|| port(r, c, i % 2));
            full(r, c, entry, exit, &mut v);
        }
    } else if m == 2 || n == 2 {
        // zigzag across the short side
        let long = if m == 2 { n } else { m };
        let mut prev: Option<(usize, usize)> = None;
        for i in 0..long {
            for j in 0..2 {
                let s = if i % 2 == 0 { j } else { 1 - j };
                let (r, c) = if m == 2 { (s, i) } else { (i, s) };
                let entry = prev.map(|(pr, _)| if pr == r { rq(r, c, 0) } else { l(r, c, 0) });
                prev = Some((r, c));
                v.push(Visit { row: r, col: c, entry, exit: None, allot: None });
            }
        }
        for i in 0..v.len() - 1 {
            let (a, b) = ((v[i].row, v[i].col), (v[i + 1].row, v[i + 1].col));
            v[i].exit = Some(if a.0 == b.0 { rq(a.0, a.1, 0) } else { l(a.0, a.1, 0) });
        }
    } else {
        let kh = |c: usize| c % 2;
        let kv = |r: usize| 1 + r % 2;
        full(0, 0, None, Some(l(0, 0, 0)), &mut v);
        let mut edge = 0;
        for r in 1..m - 1 {
            let cols: Vec<usize> = if (r - 1) % 2 == 0 { (0..n).collect() } else { (0..n).rev().collect() };
            for (i, &c) in cols.iter().enumerate() {
                let entry = if i == 0 { l(r, c, 0) } else { rq(r, c, kh(cols[i - 1].min(c))) };
                let exit = if i == n - 1 { l(r, c, 0) } else { rq(r, c, kh(cols[i + 1].min(c))) };
                let allot = (i > 0 && i < n - 1).then(|| vec![entry, l(r, c, 0), exit]);
                v.push(Visit { row: r, col: c, entry: Some(entry), exit: Some(exit), allot });
            }
            edge = cols[n - 1];
        }
        full(m - 1, edge, Some(l(m - 1, edge, 0)), Some(rq(m - 1, edge, 0)), &mut v);
        let other = if edge == 0 { n - 1 } else { 0 };
        let cols: Vec<usize> = if edge == 0 { (1..n - 1).collect() } else { (1..n - 1).rev().collect() };
        let end_row = if cols.len() % 2 == 1 { 0 } else { m - 1 };
        let corner_free = end_row == m - 1 || other == n - 1;
        for (t_idx, &c) in cols.iter().enumerate() {
            let rows: Vec<usize> = if t_idx % 2 == 0 { (0..m).rev().collect() } else { (0..m).collect() };
            let last_col = t_idx + 1 == cols.len();
            for (i, &r) in rows.iter().enumerate() {
                let entry = if i == 0 { rq(r, c, 0) } else { l(r, c, kv(rows[i - 1].min(r))) };
                let exit = if i + 1 < m {
                    Some(l(r, c, kv(rows[i + 1].min(r))))
                } else if !last_col || corner_free {
                    Some(rq(r, c, 0))
                } else {
                    None
                };
                let allot = (i > 0 && i + 1 < m).then(|| vec![entry, rq(r, c, 2), l(r, c, 3), rq(r, c, 3), exit.unwrap()]);
                v.push(Visit { row: r, col: c, entry: Some(entry), exit, allot });
            }
        }
        if corner_free {
            full(end_row, other, Some(rq(end_row, other, 0)), None, &mut v);
        }
    }
    let mut path = Vec::with_capacity(t.num_qubits());
    for visit in &v {
        let allot = visit
            .allot
            .clone()
            .unwrap_or_else(|| (0..8).map(|i| t.qubit(visit.row, visit.col, i / 4, i % 4)).collect());
        path.extend(cell_path(t, &allot, visit.entry, visit.exit));
    }
    path
}

/// Consecutive logical variables on adjacent qubits of one long path.
pub fn embed_1d_chain(n: usize, topology: &ChimeraTopology) -> Result<Embedding> {
    let path = long_path(topology);
    if n > path.len() {
        return Err(Error::Capacity(format!(
            "a chain of {n} does not fit; the longest constructed path has {} qubits",
            path.len()
        )));
    }
    let chains = path[..n].iter().map(|&q| vec![q]).collect();
    Embedding::new(topology.clone(), chains, ChainStrength::default())
}

/// One unit cell per measured node of an `N x N` grid, carrying the four
/// permeability links around it.
///
/// Cell `(r, c)` holds node `(c, r)`. The x-link between cell columns
/// `c - 1` and `c` runs over `R_{(c+1) % 2}` in both cells, anchored at `L_2`
/// in the left cell and `L_3` in the right one. The y-link between cell rows
/// `r - 1` and `r` runs over `L_{(r+1) % 2}`, anchored at `R_2` below and
/// `R_3` above. Links on the border only touch one cell and get two qubits.
pub fn embed_2d_unit_cells(n: usize, topology: &ChimeraTopology) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::param("grid must have at least one node"));
    }
    if topology.rows < n || topology.cols < n {
        return Err(Error::Capacity(format!(
            "{n} x {n} grid needs at least {n} x {n} cells, topology has {} x {}",
            topology.rows, topology.cols
        )));
    }
    let shape = Shape::square(n);
    let mut chains = vec![Vec::new(); shape.link_count()];
    for j in 0..n {
        for i in 0..=n {
            let k = (i + 1) % 2;
            let chain = &mut chains[shape.x_link(i, j)];
            if i > 0 {
                chain.extend([topology.left(j, i - 1, 2), topology.right(j, i - 1, k)]);
            }
            if i < n {
                chain.extend([topology.right(j, i, k), topology.left(j, i, 3)]);
            }
        }
    }
    for j in 0..=n {
        for i in 0..n {
            let k = (j + 1) % 2;
            let chain = &mut chains[shape.y_link(i, j)];
            if j > 0 {
                chain.extend([topology.right(j - 1, i, 2), topology.left(j - 1, i, k)]);
            }
            if j < n {
                chain.extend([topology.left(j, i, k), topology.right(j, i, 3)]);
            }
        }
    }
    Embedding::new(topology.clone(), chains, ChainStrength::default())
}

/// Physical QUBO: linear terms spread evenly over each chain, each logical
/// coupler placed on one physical coupler, and `s (x_u + x_v - 2 x_u x_v)`
/// along a spanning tree of every chain.
pub fn embed_qubo<S: Real>(q: &Qubo<S>, e: &Embedding) -> Result<Qubo<S>> {
    if q.n() != e.num_logical() {
        return Err(Error::Embedding(format!("{} variables for {} chains", q.n(), e.num_logical())));
    }
    let mut phys = Qubo::new(e.num_physical());
    phys.set_offset(*q.offset());
    let mut index = BTreeMap::new();
    for (i, chain) in e.chains.iter().enumerate() {
        for (k, &qb) in chain.iter().enumerate() {
            index.insert(qb, e.span(i).start + k);
        }
    }
    let mut incident = vec![S::zero(); q.n()];
    for (i, a) in q.linear_terms() {
        let share = *a / S::from_count(e.chains[i].len());
        for p in e.span(i) {
            phys.add_linear(p, share);
        }
        incident[i] = incident[i].max(a.abs());
    }
    for (i, j, b) in q.quadratic_terms() {
        let (u, v) = e.chains[i]
            .iter()
            .flat_map(|&u| e.chains[j].iter().map(move |&v| (u, v)))
            .find(|&(u, v)| e.topology.has_edge(u, v))
            .ok_or_else(|| Error::Embedding(format!("no coupler realizes ({i}, {j})")))?;
        phys.add_quadratic(index[&u], index[&v], *b);
        incident[i] = incident[i].max(b.abs());
        incident[j] = incident[j].max(b.abs());
    }
    let global = q.max_abs_coefficient();
    for (i, tree) in e.trees.iter().enumerate() {
        let s = match e.chain_strength {
            ChainStrength::Absolute(s) => S::lit(s),
            ChainStrength::Relative(f) => {
                let base = if incident[i] > S::zero() { incident[i] } else { global };
                S::lit(f) * base
            }
        };
        for &(u, v) in tree {
            let (pu, pv) = (index[&u], index[&v]);
            phys.add_linear(pu, s);
            phys.add_linear(pv, s);
            phys.add_quadratic(pu, pv, -(s + s));
        }
    }
    Ok(phys)
}
