use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `C_{M,N,L}`: an `M × N` grid of `K_{L,L}` unit cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraShape {
    pub m: usize,
    pub n: usize,
    pub l: usize,
}

impl ChimeraShape {
    /// Linear index of qubit `k` on `shore` (0 vertical, 1 horizontal) of cell `(row, col)`.
    pub fn index(&self, row: usize, col: usize, shore: usize, k: usize) -> usize {
        ((row * self.n + col) * 2 + shore) * self.l + k
    }

    pub fn coordinates(&self, q: usize) -> (usize, usize, usize, usize) {
        let k = q % self.l;
        let rest = q / self.l;
        let shore = rest % 2;
        let cell = rest / 2;
        (cell / self.n, cell % self.n, shore, k)
    }

    pub fn num_qubits(&self) -> usize {
        self.m * self.n * 2 * self.l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardwareGraph {
    pub shape: ChimeraShape,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Undirected edges `(u, v)`, `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl HardwareGraph {
    pub fn num_qubits(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Named device topologies.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "2000Q" | "dw2000q" => chimera(16, 16, 4),
            "dw2x" => chimera(12, 12, 4),
            _ => Err(Error::InvalidParams(format!("unknown hardware preset `{name}`"))),
        }
    }
}

/// Builds the Chimera graph: complete bipartite cells, vertical couplers
/// between shore-0 qubits of vertically adjacent cells and horizontal
/// couplers between shore-1 qubits of horizontally adjacent cells.
pub fn chimera(m: usize, n: usize, l: usize) -> Result<HardwareGraph> {
    if m == 0 || n == 0 || l == 0 {
        return Err(Error::InvalidParams(format!("Chimera dimensions must be >= 1, got {m}x{n}x{l}")));
    }
    let shape = ChimeraShape { m, n, l };
    let mut edges = Vec::with_capacity(m * n * l * l + 2 * m * n * l);
    for r in 0..m {
        for c in 0..n {
            for a in 0..l {
                for b in 0..l {
                    edges.push((shape.index(r, c, 0, a), shape.index(r, c, 1, b)));
                }
                if r + 1 < m {
                    edges.push((shape.index(r, c, 0, a), shape.index(r + 1, c, 0, a)));
                }
                if c + 1 < n {
                    edges.push((shape.index(r, c, 1, a), shape.index(r, c + 1, 1, a)));
                }
            }
        }
    }
    edges.sort_unstable();
    let mut adjacency = vec![Vec::new(); shape.num_qubits()];
    for &(u, v) in &edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for a in &mut adjacency {
        a.sort_unstable();
    }
    Ok(HardwareGraph {
        shape,
        adjacency,
        edges,
    })
}
