//! Dinic max-flow over floating-point capacities.

use std::collections::VecDeque;

use crate::scalar::Real;

#[derive(Clone, Debug)]
pub(crate) struct Arc<S> {
    pub to: usize,
    pub cap: S,
    pub flow: S,
}

/// Arcs are stored in pairs: `2k` is the forward arc, `2k + 1` its reverse
/// with zero capacity.
#[derive(Clone, Debug)]
pub(crate) struct FlowGraph<S> {
    pub arcs: Vec<Arc<S>>,
    pub out: Vec<Vec<usize>>,
}

impl<S: Real> FlowGraph<S> {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    /// Returns the index of the forward arc.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: S) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: S::zero() });
        self.arcs.push(Arc { to: from, cap: S::zero(), flow: S::zero() });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    pub fn tail(&self, arc: usize) -> usize {
        self.arcs[arc ^ 1].to
    }

    fn residual(&self, arc: usize) -> S {
        let a = &self.arcs[arc];
        a.cap - a.flow
    }

    fn push(&mut self, arc: usize, amount: S) {
        self.arcs[arc].flow += amount;
        self.arcs[arc ^ 1].flow -= amount;
    }

    /// Maximum `s`-`t` flow; arcs with residual at most `eps` count as saturated.
    pub fn max_flow(&mut self, s: usize, t: usize, eps: S) -> S {
        let n = self.out.len();
        let mut total = S::zero();
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.out[u] {
                    let v = self.arcs[e].to;
                    if level[v] == usize::MAX && self.residual(e) > eps {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            next.iter_mut().for_each(|i| *i = 0);
            // blocking flow, walking augmenting paths iteratively
            let mut path: Vec<usize> = Vec::new();
            let mut u = s;
            loop {
                if u == t {
                    let amount = path.iter().map(|&e| self.residual(e)).fold(S::infinity(), S::min);
                    let mut cut = path.len();
                    for (k, &e) in path.iter().enumerate() {
                        self.push(e, amount);
                        if cut == path.len() && self.residual(e) <= eps {
                            cut = k;
                        }
                    }
                    total += amount;
                    path.truncate(cut);
                    u = path.last().map_or(s, |&e| self.arcs[e].to);
                    continue;
                }
                let mut advanced = false;
                while next[u] < self.out[u].len() {
                    let e = self.out[u][next[u]];
                    let v = self.arcs[e].to;
                    if level[v] == level[u] + 1 && self.residual(e) > eps {
                        path.push(e);
                        u = v;
                        advanced = true;
                        break;
                    }
                    next[u] += 1;
                }
                if advanced {
                    continue;
                }
                if u == s {
                    break;
                }
                level[u] = usize::MAX;
                let e = path.pop().unwrap();
                u = self.tail(e);
                next[u] += 1;
            }
        }
    }

    /// Residual adjacency: `u -> v` whenever flow can still be pushed.
    pub fn residual_adjacency(&self, eps: S) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.out.len()];
        for (u, list) in self.out.iter().enumerate() {
            for &e in list {
                if self.residual(e) > eps {
                    adj[u].push(self.arcs[e].to);
                }
            }
        }
        adj
    }
}
