//! Randomized chain-growth minor embedding.
//!
//! Work happens on a square block of cells just large enough for a clique
//! of the logical size, placed at a random offset on the chip. Logical
//! vertices are placed in a randomized breadth-first order; each gets the
//! root qubit minimizing the summed path cost to its placed neighbours'
//! chains, plus the cheapest paths from the root to each of them. The first
//! sketch lets chains overlap freely. Rip-up passes then price a qubit held
//! by `k` other chains at `base^k`, which pushes chains apart. If sharing
//! persists, the attempt falls back to a native clique layout. Finally,
//! redundant qubits are pruned and chains re-grown through free qubits
//! where that does not make them longer.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chimera::{ChimeraShape, HardwareGraph};
use crate::error::{read_file, write_file};
use crate::{Error, Result};

pub const DEFAULT_TRIES: usize = 5;
const REFINE_PASSES: usize = 2;
const MAX_PASSES: usize = 30;
const STALL_PASSES: usize = 3;
const MAX_PRICE: u64 = 1 << 40;
const UNREACHED: u64 = u64::MAX;

/// Chains of physical qubits, indexed by logical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn num_physical(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn max_chain_len(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every violated embedding property; empty for a valid embedding of
    /// the logical graph on `num_vars` vertices with `edges`.
    pub fn violations(&self, num_vars: usize, edges: &[(usize, usize)], hw: &HardwareGraph) -> Vec<String> {
        let mut out = Vec::new();
        if self.chains.len() != num_vars {
            out.push(format!("{} chains for {num_vars} logical variables", self.chains.len()));
            return out;
        }
        let mut owner = vec![usize::MAX; hw.num_qubits()];
        for (v, chain) in self.chains.iter().enumerate() {
            if chain.is_empty() {
                out.push(format!("chain {v} is empty"));
            }
            for &q in chain {
                if q >= hw.num_qubits() {
                    out.push(format!("chain {v} uses missing qubit {q}"));
                } else if owner[q] != usize::MAX {
                    out.push(format!("qubit {q} shared by chains {} and {v}", owner[q]));
                } else {
                    owner[q] = v;
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (v, chain) in self.chains.iter().enumerate() {
            let mut seen = vec![chain[0]];
            let mut queue = VecDeque::from([chain[0]]);
            while let Some(q) = queue.pop_front() {
                for &w in &hw.adjacency[q] {
                    if owner[w] == v && !seen.contains(&w) {
                        seen.push(w);
                        queue.push_back(w);
                    }
                }
            }
            if seen.len() != chain.len() {
                out.push(format!("chain {v} is not connected"));
            }
        }
        for &(a, b) in edges {
            let covered = self.chains[a]
                .iter()
                .any(|&q| hw.adjacency[q].iter().any(|&w| owner[w] == b));
            if !covered {
                out.push(format!("no coupler between chains {a} and {b}"));
            }
        }
        out
    }

    pub fn is_valid(&self, num_vars: usize, edges: &[(usize, usize)], hw: &HardwareGraph) -> bool {
        self.violations(num_vars, edges, hw).is_empty()
    }
}

/// JSON form: logical index → sorted physical qubits, plus the topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDocument {
    pub topology: ChimeraShape,
    pub chains: BTreeMap<usize, Vec<usize>>,
}

impl EmbeddingDocument {
    pub fn new(embedding: &Embedding, hw: &HardwareGraph) -> Self {
        Self {
            topology: hw.shape,
            chains: embedding.chains.iter().cloned().enumerate().collect(),
        }
    }

    pub fn embedding(&self) -> Result<Embedding> {
        let chains: Vec<Vec<usize>> = self.chains.values().cloned().collect();
        if self.chains.keys().copied().ne(0..chains.len()) {
            return Err(Error::Embedding("chain keys must be 0..n".into()));
        }
        Ok(Embedding { chains })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_file(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Best of `tries` randomized attempts (fewest physical qubits; earliest
/// attempt on ties). Deterministic in `seed`.
pub fn find_embedding(
    num_vars: usize,
    edges: &[(usize, usize)],
    hw: &HardwareGraph,
    tries: usize,
    seed: u64,
) -> Result<Embedding> {
    if tries == 0 {
        return Err(Error::InvalidParams("tries must be >= 1".into()));
    }
    if num_vars > hw.num_qubits() {
        return Err(Error::Embedding(format!(
            "{num_vars} logical variables exceed {} qubits",
            hw.num_qubits()
        )));
    }
    let mut adj = vec![Vec::new(); num_vars];
    for &(a, b) in edges {
        if a >= num_vars || b >= num_vars || a == b {
            return Err(Error::InvalidParams(format!("bad logical edge ({a}, {b})")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let best = (0..tries)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            attempt(&adj, hw, &mut rng).map(|e| (e.num_physical(), t, e))
        })
        .min_by_key(|(size, t, _)| (*size, *t));
    match best {
        Some((_, _, e)) => {
            debug_assert!(e.is_valid(num_vars, edges, hw), "{:?}", e.violations(num_vars, edges, hw));
            Ok(e)
        }
        None => Err(Error::Embedding(format!(
            "no valid embedding of {num_vars} variables found in {tries} tries"
        ))),
    }
}

fn attempt(adj: &[Vec<usize>], hw: &HardwareGraph, rng: &mut ChaCha8Rng) -> Option<Embedding> {
    let s = hw.shape;
    let side = adj.len().div_ceil(s.l) + 1;
    let (rows, cols) = (side.min(s.m), side.min(s.n));
    let block = super::chimera::chimera(rows, cols, s.l).ok()?;
    let (r0, c0) = (rng.gen_range(0..=s.m - rows), rng.gen_range(0..=s.n - cols));
    let chains = place(adj, &block, rng)?;
    let chains = chains
        .into_iter()
        .map(|chain| {
            let mut mapped: Vec<usize> = chain
                .into_iter()
                .map(|q| {
                    let (r, c, shore, k) = block.shape.coordinates(q);
                    s.index(r0 + r, c0 + c, shore, k)
                })
                .collect();
            mapped.sort_unstable();
            mapped
        })
        .collect();
    Some(Embedding { chains })
}

fn place(adj: &[Vec<usize>], hw: &HardwareGraph, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let mut placer = Placer::new(adj, hw);
    let mut order = placer.placement_order(rng);
    if !placer.negotiate(&mut order, rng) {
        placer = Placer::new(adj, hw);
        if !placer.seed_clique(rng) {
            return None;
        }
    }
    placer.prune(rng);
    placer.refine(&mut order, rng);
    placer.prune(rng);
    Some(placer.chains)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    /// Every qubit costs 1, so chains overlap freely.
    Sketch,
    /// A qubit held by `k` other chains costs `base^k`.
    Negotiate,
    /// Held qubits are off limits.
    Strict,
}

struct Placer<'a> {
    adj: &'a [Vec<usize>],
    hw: &'a HardwareGraph,
    /// Number of chains currently holding each qubit.
    usage: Vec<u32>,
    chains: Vec<Vec<usize>>,
    stage: Stage,
    base: u64,
}

impl<'a> Placer<'a> {
    fn new(adj: &'a [Vec<usize>], hw: &'a HardwareGraph) -> Self {
        let s = hw.shape;
        Self {
            adj,
            hw,
            usage: vec![0; hw.num_qubits()],
            chains: vec![Vec::new(); adj.len()],
            stage: Stage::Sketch,
            base: 2 * (s.m + s.n) as u64,
        }
    }

    /// Overlapping sketch, then rip-up passes under overlap pricing until
    /// no qubit is shared or progress stalls. True on success.
    fn negotiate(&mut self, order: &mut [usize], rng: &mut ChaCha8Rng) -> bool {
        self.stage = Stage::Sketch;
        for &v in order.iter() {
            let chain = self.grow(v, rng).expect("unrestricted growth always succeeds");
            self.assign(v, chain);
        }
        self.stage = Stage::Negotiate;
        let mut best = u32::MAX;
        let mut stalled = 0;
        for _ in 0..MAX_PASSES {
            order.shuffle(rng);
            for &v in order.iter() {
                let old = std::mem::take(&mut self.chains[v]);
                self.release(&old);
                let chain = self.grow(v, rng).expect("priced growth always succeeds");
                self.assign(v, chain);
            }
            let now = self.overfill();
            if now == 0 {
                return true;
            }
            if now < best {
                best = now;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_PASSES {
                    break;
                }
            }
        }
        false
    }

    /// Passes over a disjoint placement: a re-grown chain replaces the old
    /// one only if it avoids all other chains and is no longer.
    fn refine(&mut self, order: &mut [usize], rng: &mut ChaCha8Rng) {
        self.stage = Stage::Strict;
        for _ in 0..REFINE_PASSES {
            order.shuffle(rng);
            for &v in order.iter() {
                let old = std::mem::take(&mut self.chains[v]);
                self.release(&old);
                match self.grow(v, rng) {
                    Some(chain) if chain.len() <= old.len() => self.assign(v, chain),
                    _ => self.assign(v, old),
                }
            }
        }
    }

    /// Drops qubits a chain does not need: the rest stays connected and
    /// still touches every neighbouring chain.
    fn prune(&mut self, rng: &mut ChaCha8Rng) {
        let mut owner = vec![usize::MAX; self.hw.num_qubits()];
        for (v, chain) in self.chains.iter().enumerate() {
            for &q in chain {
                owner[q] = v;
            }
        }
        let mut order: Vec<usize> = (0..self.chains.len()).collect();
        order.shuffle(rng);
        loop {
            let mut changed = false;
            for &v in &order {
                let mut candidates = self.chains[v].clone();
                candidates.shuffle(rng);
                for q in candidates {
                    if self.chains[v].len() > 1 && self.removable(v, q, &owner) {
                        self.chains[v].retain(|&x| x != q);
                        self.usage[q] -= 1;
                        owner[q] = usize::MAX;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn removable(&self, v: usize, q: usize, owner: &[usize]) -> bool {
        let rest: Vec<usize> = self.chains[v].iter().copied().filter(|&x| x != q).collect();
        let touches = |u: usize| rest.iter().any(|&a| self.hw.adjacency[a].iter().any(|&b| owner[b] == u));
        if !self.adj[v].iter().all(|&u| touches(u)) {
            return false;
        }
        let mut seen = vec![rest[0]];
        let mut stack = vec![rest[0]];
        while let Some(a) = stack.pop() {
            for &b in &self.hw.adjacency[a] {
                if owner[b] == v && b != q && !seen.contains(&b) {
                    seen.push(b);
                    stack.push(b);
                }
            }
        }
        seen.len() == rest.len()
    }

    /// Native clique layout: chain `(g, t)` runs down column `g` on shore 0
    /// to row `g`, then along row `g` on shore 1. Any `k·L` vertices fit in
    /// a `k × k` block; vertices get random slots.
    fn seed_clique(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let s = self.hw.shape;
        let n = self.adj.len();
        let k = n.div_ceil(s.l).max(1);
        if k > s.m || k > s.n {
            return false;
        }
        let (r0, c0) = (rng.gen_range(0..=s.m - k), rng.gen_range(0..=s.n - k));
        let mut slots: Vec<usize> = (0..k * s.l).collect();
        slots.shuffle(rng);
        for v in 0..n {
            let (g, t) = (slots[v] / s.l, slots[v] % s.l);
            let mut chain: Vec<usize> = (0..=g).map(|r| s.index(r0 + r, c0 + g, 0, t)).collect();
            chain.extend((g..k).map(|c| s.index(r0 + g, c0 + c, 1, t)));
            self.assign(v, chain);
        }
        true
    }

    fn overfill(&self) -> u32 {
        self.usage.iter().map(|&u| u.saturating_sub(1)).sum()
    }

    fn assign(&mut self, v: usize, chain: Vec<usize>) {
        for &q in &chain {
            self.usage[q] += 1;
        }
        self.chains[v] = chain;
    }

    fn release(&mut self, chain: &[usize]) {
        for &q in chain {
            self.usage[q] -= 1;
        }
    }

    /// Price of adding a qubit to a chain; `None` when it may not be used.
    fn cost(&self, q: usize) -> Option<u64> {
        match (self.stage, self.usage[q]) {
            (_, 0) | (Stage::Sketch, _) => Some(1),
            (Stage::Negotiate, k) => Some(self.base.saturating_pow(k).min(MAX_PRICE)),
            (Stage::Strict, _) => None,
        }
    }

    fn placement_order(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut starts: Vec<usize> = (0..n).collect();
        starts.shuffle(rng);
        let mut order = Vec::with_capacity(n);
        for s in starts {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                let mut next: Vec<usize> = self.adj[v].iter().copied().filter(|&w| !seen[w]).collect();
                next.shuffle(rng);
                for w in next {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Cheapest-path costs from `sources`, charging each entered qubit its price.
    fn distances(&self, sources: &[usize]) -> (Vec<u64>, Vec<usize>) {
        let nq = self.hw.num_qubits();
        let mut dist = vec![UNREACHED; nq];
        let mut parent = vec![usize::MAX; nq];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0;
            heap.push(Reverse((0, s)));
        }
        while let Some(Reverse((d, q))) = heap.pop() {
            if d > dist[q] {
                continue;
            }
            for &w in &self.hw.adjacency[q] {
                let Some(c) = self.cost(w) else { continue };
                let nd = d + c;
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = q;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        (dist, parent)
    }

    /// Cheapest root plus a path from it to each placed neighbour's chain;
    /// `None` if no admissible root reaches them all.
    fn grow(&self, v: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let placed: Vec<usize> = self.adj[v]
            .iter()
            .copied()
            .filter(|&u| !self.chains[u].is_empty())
            .collect();
        if placed.is_empty() {
            return self.seed_qubit(rng).map(|q| vec![q]);
        }
        let searches: Vec<(Vec<u64>, Vec<usize>)> = placed
            .iter()
            .map(|&u| self.distances(&self.chains[u]))
            .collect();

        let mut best_cost = UNREACHED;
        let mut roots = Vec::new();
        for q in 0..self.hw.num_qubits() {
            let Some(own) = self.cost(q) else { continue };
            let mut total = own;
            for (dist, _) in &searches {
                if dist[q] == UNREACHED {
                    total = UNREACHED;
                    break;
                }
                if dist[q] > 0 {
                    total += dist[q] - own;
                }
            }
            if total < best_cost {
                best_cost = total;
                roots.clear();
            }
            if total == best_cost && total != UNREACHED {
                roots.push(q);
            }
        }
        let root = *roots.choose(rng)?;
        let mut chain = vec![root];
        for (dist, parent) in &searches {
            let mut q = root;
            while dist[q] > 0 && dist[parent[q]] > 0 {
                q = parent[q];
                if !chain.contains(&q) {
                    chain.push(q);
                }
            }
        }
        Some(chain)
    }

    /// Root for a vertex without placed neighbours: near the block centre
    /// for the first vertex, otherwise the cheapest qubit next to the placement.
    fn seed_qubit(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let used: Vec<usize> = (0..self.hw.num_qubits()).filter(|&q| self.usage[q] > 0).collect();
        if used.is_empty() {
            let s = self.hw.shape;
            return Some(s.index(s.m / 2, s.n / 2, rng.gen_range(0..2), rng.gen_range(0..s.l)));
        }
        let (dist, _) = self.distances(&used);
        (0..self.hw.num_qubits())
            .filter(|&q| self.usage[q] == 0 && dist[q] != UNREACHED)
            .min_by_key(|&q| (dist[q], q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::chimera;

    fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect()
    }

    #[test]
    fn edge_on_unit_cell() {
        let hw = chimera(1, 1, 4).unwrap();
        let e = find_embedding(2, &[(0, 1)], &hw, 5, 1).unwrap();
        assert_eq!(e.num_physical(), 2);
        let shores: Vec<usize> = e.chains.iter().map(|c| hw.shape.coordinates(c[0]).2).collect();
        assert_ne!(shores[0], shores[1]);
    }

    #[test]
    fn k5_on_unit_cell_is_valid() {
        let hw = chimera(1, 1, 4).unwrap();
        let edges = complete(5);
        let e = find_embedding(5, &edges, &hw, 10, 3).unwrap();
        assert!(e.is_valid(5, &edges, &hw), "{:?}", e.violations(5, &edges, &hw));
        assert!(e.max_chain_len() <= 2);
    }

    #[test]
    fn checker_flags_each_violation() {
        let hw = chimera(1, 1, 4).unwrap();
        let edges = [(0, 1)];
        let shared = Embedding { chains: vec![vec![0], vec![0]] };
        assert!(shared.violations(2, &edges, &hw)[0].contains("shared"));
        let split = Embedding { chains: vec![vec![0, 1], vec![4]] };
        assert!(split.violations(2, &edges, &hw).iter().any(|v| v.contains("not connected")));
        let apart = Embedding { chains: vec![vec![0], vec![1]] };
        assert!(apart.violations(2, &edges, &hw).iter().any(|v| v.contains("no coupler")));
        let empty = Embedding { chains: vec![vec![], vec![4]] };
        assert!(!empty.is_valid(2, &edges, &hw));
    }

    #[test]
    fn deterministic_and_fails_cleanly() {
        let hw = chimera(4, 4, 4).unwrap();
        let edges = complete(10);
        let a = find_embedding(10, &edges, &hw, 3, 9).unwrap();
        assert_eq!(a, find_embedding(10, &edges, &hw, 3, 9).unwrap());
        assert!(a.is_valid(10, &edges, &hw));
        let tiny = chimera(1, 1, 2).unwrap();
        assert!(matches!(
            find_embedding(8, &complete(8), &tiny, 2, 0),
            Err(Error::Embedding(_))
        ));
    }

    #[test]
    fn document_round_trip() {
        let hw = chimera(2, 2, 4).unwrap();
        let e = find_embedding(4, &complete(4), &hw, 2, 0).unwrap();
        let doc = EmbeddingDocument::new(&e, &hw);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"0\":["));
        let back: EmbeddingDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.embedding().unwrap(), e);
    }
}
