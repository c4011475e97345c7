use serde_json::json;

use crate::error::{Error, Result};

/// Chimera graph: an `M x N` grid of `K_{4,4}` unit cells.
///
/// Qubit `((r * N + c) * 2 + side) * 4 + k` is index `k` on side 0 (`L`,
/// coupled vertically to the same `L_k` in the cells above and below) or
/// side 1 (`R`, coupled horizontally to the same `R_k` left and right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChimeraTopology {
    pub rows: usize,
    pub cols: usize,
    pub active: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitSite {
    pub row: usize,
    pub col: usize,
    pub side: usize,
    pub k: usize,
}

pub fn build_chimera(rows: usize, cols: usize) -> Result<ChimeraTopology> {
    if rows == 0 || cols == 0 {
        return Err(Error::param("Chimera grid needs at least one cell"));
    }
    Ok(ChimeraTopology { rows, cols, active: vec![true; 8 * rows * cols] })
}

impl ChimeraTopology {
    pub fn num_qubits(&self) -> usize {
        8 * self.rows * self.cols
    }

    pub fn qubit(&self, row: usize, col: usize, side: usize, k: usize) -> usize {
        ((row * self.cols + col) * 2 + side) * 4 + k
    }

    pub fn left(&self, row: usize, col: usize, k: usize) -> usize {
        self.qubit(row, col, 0, k)
    }

    pub fn right(&self, row: usize, col: usize, k: usize) -> usize {
        self.qubit(row, col, 1, k)
    }

    pub fn site(&self, q: usize) -> QubitSite {
        let k = q % 4;
        let side = (q / 4) % 2;
        let cell = q / 8;
        QubitSite { row: cell / self.cols, col: cell % self.cols, side, k }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.num_qubits() || v >= self.num_qubits() || !self.active[u] || !self.active[v] {
            return false;
        }
        let (a, b) = (self.site(u), self.site(v));
        if a.row == b.row && a.col == b.col {
            return a.side != b.side;
        }
        if a.side != b.side || a.k != b.k {
            return false;
        }
        match a.side {
            0 => a.col == b.col && a.row.abs_diff(b.row) == 1,
            _ => a.row == b.row && a.col.abs_diff(b.col) == 1,
        }
    }

    /// Every coupler once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                for i in 0..4 {
                    for j in 0..4 {
                        out.push((self.left(r, c, i), self.right(r, c, j)));
                    }
                    if r + 1 < self.rows {
                        out.push((self.left(r, c, i), self.left(r + 1, c, i)));
                    }
                    if c + 1 < self.cols {
                        out.push((self.right(r, c, i), self.right(r, c + 1, i)));
                    }
                }
            }
        }
        out.retain(|&(u, v)| self.active[u] && self.active[v]);
        out
    }

    pub fn neighbours(&self, q: usize) -> Vec<usize> {
        let s = self.site(q);
        let mut out: Vec<usize> = (0..4).map(|j| self.qubit(s.row, s.col, 1 - s.side, j)).collect();
        if s.side == 0 {
            if s.row > 0 {
                out.push(self.left(s.row - 1, s.col, s.k));
            }
            if s.row + 1 < self.rows {
                out.push(self.left(s.row + 1, s.col, s.k));
            }
        } else {
            if s.col > 0 {
                out.push(self.right(s.row, s.col - 1, s.k));
            }
            if s.col + 1 < self.cols {
                out.push(self.right(s.row, s.col + 1, s.k));
            }
        }
        out.retain(|&v| self.active[q] && self.active[v]);
        out
    }

    /// `{rows, cols, qubits, edges: [[u, v], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "qubits": self.num_qubits(),
            "edges": self.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let t = build_chimera(1, 1).unwrap();
        assert_eq!(t.num_qubits(), 8);
        assert_eq!(t.edges().len(), 16);
        let t = build_chimera(2, 2).unwrap();
        let inter = t.edges().len() - 4 * 16;
        assert_eq!(inter, 16);
        assert_eq!(build_chimera(16, 16).unwrap().num_qubits(), 2048);
        assert!(build_chimera(0, 3).is_err());
    }

    #[test]
    fn edges_agree_with_adjacency_test() {
        let t = build_chimera(3, 2).unwrap();
        let edges = t.edges();
        let mut count = 0;
        for u in 0..t.num_qubits() {
            for v in u + 1..t.num_qubits() {
                if t.has_edge(u, v) {
                    count += 1;
                    assert!(edges.contains(&(u, v)));
                }
            }
            for v in t.neighbours(u) {
                assert!(t.has_edge(u, v));
            }
        }
        assert_eq!(count, edges.len());
    }
}
