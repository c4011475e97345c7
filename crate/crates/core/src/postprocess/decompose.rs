use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Scalar;

/// Bags over variable ids, joined into a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks vertex and edge coverage and the running intersection property
    /// against the graph `edges` on `vars`.
    pub fn is_valid_for(&self, vars: &[usize], edges: &[(usize, usize)]) -> bool {
        let covers = |pred: &dyn Fn(&Vec<usize>) -> bool| self.bags.iter().any(pred);
        if !vars.iter().all(|v| covers(&|b| b.contains(v))) {
            return false;
        }
        if !edges.iter().all(|(u, v)| covers(&|b| b.contains(u) && b.contains(v))) {
            return false;
        }
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        // bags holding each variable must be connected in the forest
        vars.iter().all(|v| {
            let holding: Vec<usize> = (0..self.bags.len()).filter(|&b| self.bags[b].contains(v)).collect();
            let mut seen = vec![false; self.bags.len()];
            let mut stack = vec![holding[0]];
            seen[holding[0]] = true;
            let mut count = 0;
            while let Some(b) = stack.pop() {
                count += 1;
                for &c in &adj[b] {
                    if !seen[c] && self.bags[c].contains(v) {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
            count == holding.len()
        })
    }
}

/// A variable subset with an elimination order and the tree it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    pub vars: Vec<usize>,
    /// Elimination order; `bags[k]` belongs to `order[k]`.
    pub order: Vec<usize>,
    pub tree: TreeDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub max_width: usize,
    pub subsets: Vec<Subset>,
    /// Subsets containing each variable.
    pub coverage: Vec<Vec<usize>>,
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (a, &x) in nb.iter().enumerate() {
        for &y in &nb[a + 1..] {
            if !adj[x].contains(&y) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy min-fill elimination that drops a vertex whenever nothing can be
/// eliminated within `max_width`. Covered vertices are dropped before
/// uncovered ones, highest degree first, and `seed` is never dropped.
/// Returns the kept vertices in elimination order.
fn greedy_pass(graph: &[Vec<usize>], max_width: usize, seed: usize, covered: &[bool]) -> Vec<usize> {
    let n = graph.len();
    let mut adj: Vec<BTreeSet<usize>> = graph.iter().map(|row| row.iter().copied().collect()).collect();
    let mut fill: Vec<usize> = (0..n).map(|v| fill_in(&adj, v)).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::new();
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| alive[v] && adj[v].len() <= max_width)
            .min_by_key(|&v| (fill[v], adj[v].len(), v));
        let (v, eliminate) = match next {
            Some(v) => (v, true),
            None => {
                let victim = (0..n)
                    .filter(|&v| alive[v] && v != seed)
                    .max_by_key(|&v| (covered[v], adj[v].len(), Reverse(v)))
                    .expect("the seed alone always fits");
                (victim, false)
            }
        };
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        alive[v] = false;
        for &x in &nb {
            adj[x].remove(&v);
            if eliminate {
                for &y in &nb {
                    if x != y {
                        adj[x].insert(y);
                    }
                }
            }
        }
        adj[v].clear();
        if eliminate {
            order.push(v);
        }
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        for &x in &nb {
            touched.extend(adj[x].iter().copied());
        }
        for u in touched {
            fill[u] = fill_in(&adj, u);
        }
    }
    order
}

/// Eliminates the subgraph induced by `order` in that order and records
/// the bags, each joined to the bag of its earliest later neighbour.
fn induced_tree(graph: &[Vec<usize>], order: &[usize]) -> TreeDecomposition {
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut later: Vec<BTreeSet<usize>> = order
        .iter()
        .enumerate()
        .map(|(k, v)| graph[*v].iter().filter_map(|u| pos.get(u).copied()).filter(|&p| p > k).collect())
        .collect();
    let mut bags = Vec::with_capacity(order.len());
    let mut edges = Vec::new();
    for k in 0..order.len() {
        let nb: Vec<usize> = later[k].iter().copied().collect();
        if let Some(&parent) = nb.first() {
            edges.push((k, parent));
            for &x in &nb[1..] {
                later[parent].insert(x);
            }
        }
        let mut bag = vec![order[k]];
        bag.extend(nb.iter().map(|&p| order[p]));
        bags.push(bag);
    }
    TreeDecomposition { bags, edges }
}

/// Covers the interaction graph of `q` with subsets of treewidth at most
/// `max_width`.
///
/// Each subset comes from one greedy min-fill pass over the whole graph
/// that drops vertices it cannot eliminate within the bound, protecting the
/// lowest uncovered variable and preferring to drop variables that an
/// earlier subset already covers. Passes repeat until every variable is
/// covered, so subsets overlap.
pub fn decompose_low_treewidth<S: Scalar>(q: &Qubo<S>, max_width: usize) -> Result<Decomposition> {
    if max_width == 0 {
        return Err(Error::param("max_width must be at least 1"));
    }
    let n = q.n();
    let graph: Vec<Vec<usize>> = q.adjacency().into_iter().map(|row| row.into_iter().map(|(j, _)| j).collect()).collect();
    let mut covered = vec![false; n];
    let mut subsets = Vec::new();
    let mut coverage = vec![Vec::new(); n];
    while let Some(seed) = covered.iter().position(|c| !c) {
        let order = greedy_pass(&graph, max_width, seed, &covered);
        let tree = induced_tree(&graph, &order);
        debug_assert!(tree.width() <= max_width);
        let id = subsets.len();
        for &v in &order {
            covered[v] = true;
            coverage[v].push(id);
        }
        let mut vars = order.clone();
        vars.sort_unstable();
        subsets.push(Subset { vars, order, tree });
    }
    Ok(Decomposition { max_width, subsets, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_is_one_subset() {
        let mut q = Qubo::<f64>::new(300);
        for i in 0..299 {
            q.add_quadratic(i, i + 1, 1.0);
        }
        let d = decompose_low_treewidth(&q, 1).unwrap();
        assert_eq!(d.subsets.len(), 1);
        assert_eq!(d.subsets[0].tree.width(), 1);
        let edges: Vec<(usize, usize)> = (0..299).map(|i| (i, i + 1)).collect();
        let vars: Vec<usize> = (0..300).collect();
        assert!(d.subsets[0].tree.is_valid_for(&vars, &edges));
    }

    #[test]
    fn zero_width_is_rejected() {
        assert!(decompose_low_treewidth(&Qubo::<f64>::new(2), 0).is_err());
    }

    #[test]
    fn triangle_needs_width_two() {
        let mut q = Qubo::<f64>::new(3);
        q.add_quadratic(0, 1, 1.0);
        q.add_quadratic(1, 2, 1.0);
        q.add_quadratic(0, 2, 1.0);
        assert_eq!(decompose_low_treewidth(&q, 2).unwrap().subsets.len(), 1);
        let d = decompose_low_treewidth(&q, 1).unwrap();
        assert!(d.subsets.len() > 1);
        assert!(d.subsets.iter().all(|s| s.tree.width() <= 1));
    }
}
