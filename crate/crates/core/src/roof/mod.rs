//! Roof duality: a max-flow lower bound and variable fixing.

mod flow;
mod posiform;

pub use posiform::{to_posiform, Literal, Posiform, Term};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::{Real, Scalar};
use flow::FlowGraph;

const SOURCE: usize = 0;
const SINK: usize = 1;

fn node(l: Literal) -> usize {
    2 + 2 * l.var + l.negated as usize
}

/// Which fixes [`fix_variables`] reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Persistency {
    /// Literals reachable from the source in the residual network. These
    /// hold in every minimizer.
    #[default]
    Strong,
    /// Strong fixes plus an assignment of the remaining strongly connected
    /// components. These hold in at least one minimizer.
    Weak,
}

struct Network<S> {
    n: usize,
    graph: FlowGraph<S>,
    constant: S,
    eps: S,
    flow: S,
    touched: Vec<bool>,
}

impl<S: Real> Network<S> {
    fn solve(q: &Qubo<S>) -> Self {
        let p = to_posiform(q);
        let n = p.n;
        let mut graph = FlowGraph::new(2 * n + 2);
        let mut mirrors = Vec::with_capacity(p.terms.len());
        let mut touched = vec![false; n];
        let half = S::lit(0.5);
        let mut max_cap = S::zero();
        for t in &p.terms {
            let (a, b) = match *t {
                Term::Unary(u, c) => {
                    touched[u.var] = true;
                    max_cap = max_cap.max(c * half);
                    (graph.add_arc(node(u), SINK, c * half), graph.add_arc(SOURCE, node(u) ^ 1, c * half))
                }
                Term::Pair(u, v, c) => {
                    touched[u.var] = true;
                    touched[v.var] = true;
                    max_cap = max_cap.max(c * half);
                    (graph.add_arc(node(u), node(v) ^ 1, c * half), graph.add_arc(node(v), node(u) ^ 1, c * half))
                }
            };
            mirrors.push((a, b));
        }
        let eps = max_cap * S::lit(1e-12);
        let flow = graph.max_flow(SOURCE, SINK, eps);
        // Average with the mirror image so the residual network is symmetric
        // under complementation.
        for &(a, b) in &mirrors {
            let f = (graph.arcs[a].flow + graph.arcs[b].flow) * half;
            for e in [a, b] {
                graph.arcs[e].flow = f;
                graph.arcs[e ^ 1].flow = -f;
            }
        }
        Network { n, graph, constant: p.constant, eps, flow, touched }
    }

    fn bound(&self) -> S {
        self.constant + self.flow
    }

    fn fixes(&self, mode: Persistency) -> BTreeMap<usize, u8> {
        let adj = self.graph.residual_adjacency(self.eps);
        let nodes = adj.len();
        let mut reach = vec![false; nodes];
        reach[SOURCE] = true;
        let mut stack = vec![SOURCE];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !reach[v] {
                    reach[v] = true;
                    stack.push(v);
                }
            }
        }
        let mut fixes = BTreeMap::new();
        for i in 0..self.n {
            let (p, m) = (node(Literal::pos(i)), node(Literal::neg(i)));
            if !self.touched[i] || reach[p] == reach[m] {
                continue;
            }
            fixes.insert(i, reach[p] as u8);
        }
        if mode == Persistency::Weak {
            let alive: Vec<bool> = (0..nodes)
                .map(|v| v >= 2 && !reach[v] && !reach[v ^ 1] && self.touched[(v - 2) / 2])
                .collect();
            let comp = tarjan(&adj, &alive);
            for i in 0..self.n {
                let (p, m) = (node(Literal::pos(i)), node(Literal::neg(i)));
                if alive[p] && comp[p] != comp[m] {
                    // components are numbered sinks first
                    fixes.insert(i, (comp[p] < comp[m]) as u8);
                }
            }
        }
        fixes
    }
}

/// Iterative Tarjan over the nodes marked alive; returns component ids in
/// reverse topological order of the condensation.
fn tarjan(adj: &[Vec<usize>], alive: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut k)) = call.last_mut() {
            if *k < adj[u].len() {
                let v = adj[u][*k];
                *k += 1;
                if !alive[v] {
                    continue;
                }
                if index[v] == usize::MAX {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == u {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Lower bound on the minimum of `q`.
pub fn roof_dual_bound<S: Real>(q: &Qubo<S>) -> S {
    Network::solve(q).bound()
}

/// A QUBO restricted to the variables left free by a partial assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<S: Scalar> {
    pub fixes: BTreeMap<usize, u8>,
    /// Over `free.len()` variables; keeps the original offset.
    pub qubo: Qubo<S>,
    /// Original index of each reduced variable.
    pub free: Vec<usize>,
    /// Energy contributed by the fixed variables.
    pub extra_offset: S,
    pub dynamic_range_before: Option<f64>,
    pub dynamic_range_after: Option<f64>,
}

impl<S: Scalar> Reduction<S> {
    /// Full assignment from one of the reduced problem.
    pub fn expand(&self, y: &[u8]) -> Vec<u8> {
        let mut x = vec![0u8; self.free.len() + self.fixes.len()];
        for (&i, &v) in &self.fixes {
            x[i] = v;
        }
        for (k, &i) in self.free.iter().enumerate() {
            x[i] = y[k];
        }
        x
    }
}

/// Substitutes fixed values; `E(x) = reduced(x_free) + extra_offset` for
/// every `x` extending the fixes.
pub fn apply_fixes<S: Scalar>(q: &Qubo<S>, fixes: &[(usize, u8)]) -> Result<Reduction<S>> {
    let n = q.n();
    let mut fixed = BTreeMap::new();
    for &(i, v) in fixes {
        if i >= n || v > 1 {
            return Err(Error::param(format!("fix ({i}, {v}) is out of range")));
        }
        if let Some(old) = fixed.insert(i, v) {
            if old != v {
                return Err(Error::param(format!("conflicting fixes for variable {i}")));
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains_key(i)).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in free.iter().enumerate() {
        index[i] = k;
    }
    let mut red = Qubo::new(free.len());
    red.set_offset(q.offset().clone());
    let mut extra = S::zero();
    for (i, a) in q.linear_terms() {
        match fixed.get(&i) {
            Some(1) => extra = extra + a.clone(),
            Some(_) => {}
            None => red.add_linear(index[i], a.clone()),
        }
    }
    for (i, j, b) in q.quadratic_terms() {
        match (fixed.get(&i), fixed.get(&j)) {
            (Some(1), Some(1)) => extra = extra + b.clone(),
            (Some(1), None) => red.add_linear(index[j], b.clone()),
            (None, Some(1)) => red.add_linear(index[i], b.clone()),
            (None, None) => red.add_quadratic(index[i], index[j], b.clone()),
            _ => {}
        }
    }
    Ok(Reduction {
        fixes: fixed,
        dynamic_range_before: q.dynamic_range(),
        dynamic_range_after: red.dynamic_range(),
        qubo: red,
        free,
        extra_offset: extra,
    })
}

/// Outcome of roof-dual preprocessing.
#[derive(Clone, Debug, PartialEq)]
pub struct FixReport<S: Scalar> {
    pub reduction: Reduction<S>,
    pub bound: S,
    pub fixed_fraction: f64,
}

impl<S: Scalar> FixReport<S> {
    pub fn fixes(&self) -> &BTreeMap<usize, u8> {
        &self.reduction.fixes
    }

    pub fn reduced(&self) -> &Qubo<S> {
        &self.reduction.qubo
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fixes: BTreeMap<String, u8> = self.reduction.fixes.iter().map(|(i, v)| (i.to_string(), *v)).collect();
        serde_json::json!({
            "fixes": fixes,
            "bound": self.bound.approx(),
            "fixed_fraction": self.fixed_fraction,
            "dynamic_range_before": self.reduction.dynamic_range_before,
            "dynamic_range_after": self.reduction.dynamic_range_after,
        })
    }
}

/// Fixes every variable whose optimal value roof duality can certify.
/// Variables without any nonzero coefficient are left free.
pub fn fix_variables<S: Real>(q: &Qubo<S>, mode: Persistency) -> FixReport<S> {
    let net = Network::solve(q);
    let fixes: Vec<(usize, u8)> = net.fixes(mode).into_iter().collect();
    let fixed_fraction = if q.n() == 0 { 1.0 } else { fixes.len() as f64 / q.n() as f64 };
    let reduction = apply_fixes(q, &fixes).expect("fixes come from the same problem");
    FixReport { reduction, bound: net.bound(), fixed_fraction }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_of_trivial_problems() {
        assert_eq!(roof_dual_bound(&Qubo::<f64>::new(3)), 0.0);
        let mut q = Qubo::<f64>::new(1);
        q.add_linear(0, -3.0);
        assert_eq!(roof_dual_bound(&q), -3.0);
    }

    #[test]
    fn zero_qubo_fixes_nothing() {
        let r = fix_variables(&Qubo::<f64>::new(4), Persistency::Weak);
        assert!(r.fixes().is_empty());
        assert_eq!(r.fixed_fraction, 0.0);
    }

    #[test]
    fn unary_problem_is_fully_fixed() {
        let mut q = Qubo::<f64>::new(3);
        q.add_linear(0, -1.0);
        q.add_linear(1, 2.0);
        q.add_linear(2, -0.5);
        let r = fix_variables(&q, Persistency::Strong);
        assert_eq!(r.fixes().iter().map(|(&i, &v)| (i, v)).collect::<Vec<_>>(), vec![(0, 1), (1, 0), (2, 1)]);
        assert_eq!(r.bound, -1.5);
        let v = r.to_json();
        assert_eq!(v["fixes"]["1"], 0);
        assert_eq!(v["fixed_fraction"], 1.0);
    }

    #[test]
    fn apply_fixes_edges() {
        let mut q = Qubo::<f64>::new(3);
        q.set_offset(0.5);
        q.add_linear(0, 1.0);
        q.add_quadratic(0, 2, -2.0);
        let r = apply_fixes(&q, &[]).unwrap();
        assert_eq!(r.qubo, q);
        assert_eq!(r.extra_offset, 0.0);
        let r = apply_fixes(&q, &[(0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(r.qubo.n(), 0);
        assert_eq!(*r.qubo.offset() + r.extra_offset, q.energy(&[1, 0, 1]).unwrap());
        assert!(apply_fixes(&q, &[(0, 1), (0, 0)]).is_err());
        assert!(apply_fixes(&q, &[(3, 1)]).is_err());
        assert!(apply_fixes(&q, &[(1, 2)]).is_err());
    }

    #[test]
    fn frustrated_triangle_has_no_strong_fixes() {
        let mut q = Qubo::<f64>::new(3);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            q.add_quadratic(i, j, 2.0);
        }
        for i in 0..3 {
            q.add_linear(i, -1.0);
        }
        let r = fix_variables(&q, Persistency::Strong);
        assert!(r.fixes().is_empty());
        assert!(r.bound <= -1.0);
    }
}
