//! Chain-coupled physical Ising models and majority-vote readout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chimera::HardwareGraph;
use super::embedding::Embedding;
use crate::qubo::IsingModel;
use crate::{Error, Result};

/// Chain coupling in units of the largest logical coefficient magnitude.
pub const DEFAULT_CHAIN_STRENGTH: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedIsing {
    /// Model over every hardware qubit; qubits outside all chains carry no terms.
    pub ising: IsingModel,
    pub j_f: f64,
    pub embedding: Embedding,
    /// Largest logical coefficient magnitude; intra-chain couplings are `j_f * normalization`.
    pub normalization: f64,
    pub num_chain_edges: usize,
}

impl EmbeddedIsing {
    pub fn chain_coupling(&self) -> f64 {
        self.j_f * self.normalization
    }

    /// Energy added by the chain couplers to any chain-uniform state.
    pub fn chain_shift(&self) -> f64 {
        self.num_chain_edges as f64 * self.chain_coupling()
    }

    /// Copies each logical spin onto its chain; idle qubits read +1.
    pub fn physical_state(&self, logical: &[i8]) -> Vec<i8> {
        let mut s = vec![1; self.ising.len()];
        for (chain, &v) in self.embedding.chains.iter().zip(logical) {
            for &q in chain {
                s[q] = v;
            }
        }
        s
    }

    pub fn num_physical(&self) -> usize {
        self.embedding.num_physical()
    }
}

/// Builds the physical model: each field split equally over its chain,
/// each logical coupling on the first available chain-to-chain coupler,
/// and `j_f * max|logical coefficient|` on every coupler inside a chain.
pub fn embed_ising(ising: &IsingModel, embedding: &Embedding, hw: &HardwareGraph, j_f: f64) -> Result<EmbeddedIsing> {
    if !(j_f < 0.0) || !j_f.is_finite() {
        return Err(Error::InvalidParams(format!("chain strength must be negative, got {j_f}")));
    }
    let logical_edges: Vec<(usize, usize)> = ising.j.keys().copied().collect();
    let problems = embedding.violations(ising.len(), &logical_edges, hw);
    if !problems.is_empty() {
        return Err(Error::Embedding(problems.join("; ")));
    }
    let mut owner = vec![usize::MAX; hw.num_qubits()];
    for (v, chain) in embedding.chains.iter().enumerate() {
        for &q in chain {
            owner[q] = v;
        }
    }
    let max = ising.max_abs_coeff();
    let normalization = if max > 0.0 { max } else { 1.0 };

    let mut phys = IsingModel::new(hw.num_qubits());
    phys.offset = ising.offset;
    for (v, chain) in embedding.chains.iter().enumerate() {
        let share = ising.h[v] / chain.len() as f64;
        for &q in chain {
            phys.h[q] = share;
        }
    }
    for (&(a, b), &value) in &ising.j {
        let (u, w) = embedding.chains[a]
            .iter()
            .find_map(|&u| hw.adjacency[u].iter().find(|&&w| owner[w] == b).map(|&w| (u, w)))
            .expect("coverage checked above");
        phys.add_coupling(u, w, value);
    }
    let coupling = j_f * normalization;
    let mut num_chain_edges = 0;
    for (v, chain) in embedding.chains.iter().enumerate() {
        for &q in chain {
            for &w in &hw.adjacency[q] {
                if w > q && owner[w] == v {
                    phys.add_coupling(q, w, coupling);
                    num_chain_edges += 1;
                }
            }
        }
    }
    Ok(EmbeddedIsing {
        ising: phys,
        j_f,
        embedding: embedding.clone(),
        normalization,
        num_chain_edges,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unembedded {
    pub state: Vec<i8>,
    pub chain_break_fraction: f64,
}

/// Majority vote per chain; exact ties are settled by a coin seeded with `seed`.
pub fn unembed(physical: &[i8], embedding: &Embedding, seed: u64) -> Unembedded {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut broken = 0usize;
    let state: Vec<i8> = embedding
        .chains
        .iter()
        .map(|chain| {
            let sum: i64 = chain.iter().map(|&q| i64::from(physical[q])).sum();
            if sum.unsigned_abs() as usize != chain.len() {
                broken += 1;
            }
            match sum.signum() {
                1 => 1,
                -1 => -1,
                _ => {
                    if rng.gen_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                }
            }
        })
        .collect();
    let chain_break_fraction = if state.is_empty() {
        0.0
    } else {
        broken as f64 / state.len() as f64
    };
    Unembedded {
        state,
        chain_break_fraction,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::Rng;

    use super::*;
    use crate::embed::{chimera, find_embedding};

    fn spins(bits: u64, n: usize) -> Vec<i8> {
        (0..n).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect()
    }

    fn random_ising(n: usize, seed: u64, density: f64) -> IsingModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = IsingModel::new(n);
        for h in &mut m.h {
            *h = f64::from(rng.gen_range(-4i32..=4));
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    m.add_coupling(a, b, f64::from(rng.gen_range(1i32..=5) * if rng.gen_bool(0.5) { 1 } else { -1 }));
                }
            }
        }
        m.offset = 2.5;
        m
    }

    #[test]
    fn singleton_chains_are_isomorphic() {
        let hw = chimera(1, 1, 4).unwrap();
        let mut m = IsingModel::new(2);
        m.h = vec![1.0, -2.0];
        m.add_coupling(0, 1, 3.0);
        let e = Embedding { chains: vec![vec![0], vec![4]] };
        let em = embed_ising(&m, &e, &hw, -1.0).unwrap();
        assert_eq!(em.num_chain_edges, 0);
        assert_eq!(em.ising.h[0], 1.0);
        assert_eq!(em.ising.h[4], -2.0);
        assert_eq!(em.ising.j.len(), 1);
        assert_eq!(em.ising.j[&(0, 4)], 3.0);
        assert_eq!(em.normalization, 3.0);
    }

    #[test]
    fn field_split_over_two_qubit_chain() {
        let hw = chimera(1, 1, 4).unwrap();
        let mut m = IsingModel::new(1);
        m.h[0] = 3.0;
        let e = Embedding { chains: vec![vec![0, 4]] };
        let em = embed_ising(&m, &e, &hw, -2.0).unwrap();
        assert_eq!(em.ising.h[0], 1.5);
        assert_eq!(em.ising.h[4], 1.5);
        assert_eq!(em.ising.j[&(0, 4)], -6.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let hw = chimera(1, 1, 4).unwrap();
        let mut m = IsingModel::new(2);
        m.add_coupling(0, 1, 1.0);
        let apart = Embedding { chains: vec![vec![0], vec![1]] };
        assert!(matches!(embed_ising(&m, &apart, &hw, -1.0), Err(Error::Embedding(_))));
        let ok = Embedding { chains: vec![vec![0], vec![4]] };
        assert!(embed_ising(&m, &ok, &hw, 0.5).is_err());
        assert!(embed_ising(&m, &ok, &hw, 0.0).is_err());
    }

    #[test]
    fn majority_vote() {
        let e = Embedding { chains: vec![vec![0, 1, 2], vec![3]] };
        let u = unembed(&[1, 1, -1, -1], &e, 0);
        assert_eq!(u.state, vec![1, -1]);
        assert_eq!(u.chain_break_fraction, 0.5);
        let uniform = unembed(&[-1, -1, -1, 1], &e, 0);
        assert_eq!(uniform.state, vec![-1, 1]);
        assert_eq!(uniform.chain_break_fraction, 0.0);
    }

    #[test]
    fn ties_follow_the_seed() {
        let e = Embedding { chains: (0..32).map(|k| vec![2 * k, 2 * k + 1]).collect() };
        let phys: Vec<i8> = (0..64).map(|q| if q % 2 == 0 { 1 } else { -1 }).collect();
        let a = unembed(&phys, &e, 5);
        assert_eq!(a, unembed(&phys, &e, 5));
        assert_eq!(a.chain_break_fraction, 1.0);
        assert!(a.state.contains(&1) && a.state.contains(&-1));
    }

    #[test]
    fn strong_chains_preserve_ground_states() {
        let hw = chimera(2, 2, 4).unwrap();
        let mut checked = 0;
        for seed in 0..24 {
            let n = 5 + (seed as usize % 4);
            let m = random_ising(n, seed, 0.5);
            let edges: Vec<_> = m.j.keys().copied().collect();
            let e = find_embedding(n, &edges, &hw, 5, seed).unwrap();
            if e.max_chain_len() > 3 || e.num_physical() > 18 {
                continue;
            }
            checked += 1;
            let total: f64 = m.h.iter().chain(m.j.values()).map(|v| v.abs()).sum();
            let em = embed_ising(&m, &e, &hw, -2.0 * total / m.max_abs_coeff()).unwrap();

            let logical_min = (0..1u64 << n)
                .map(|b| m.energy(&spins(b, n)))
                .fold(f64::INFINITY, f64::min);
            let used: Vec<usize> = e.chains.iter().flatten().copied().collect();
            let mut phys = vec![1i8; hw.num_qubits()];
            let mut best = (f64::INFINITY, Vec::new());
            for b in 0..1u64 << used.len() {
                for (k, &q) in used.iter().enumerate() {
                    phys[q] = if b >> k & 1 == 1 { 1 } else { -1 };
                }
                let energy = em.ising.energy(&phys);
                if energy < best.0 {
                    best = (energy, phys.clone());
                }
            }
            let u = unembed(&best.1, &e, 0);
            assert_eq!(u.chain_break_fraction, 0.0);
            assert!((m.energy(&u.state) - logical_min).abs() < 1e-9);
            assert!((best.0 - em.chain_shift() - logical_min).abs() < 1e-9);
        }
        assert!(checked >= 8, "only {checked} embeddings small enough");
    }

    proptest! {
        #[test]
        fn uniform_states_shift_by_a_constant(seed in 0u64..500, bits in any::<u64>()) {
            let hw = chimera(2, 2, 4).unwrap();
            let n = 6;
            let m = random_ising(n, seed, 0.5);
            let edges: Vec<_> = m.j.keys().copied().collect();
            let e = find_embedding(n, &edges, &hw, 2, seed).unwrap();
            let em = embed_ising(&m, &e, &hw, -1.0).unwrap();
            let logical = spins(bits, n);
            let phys = em.physical_state(&logical);
            let diff = em.ising.energy(&phys) - m.energy(&logical);
            prop_assert!((diff - em.chain_shift()).abs() < 1e-9);
            let back = unembed(&phys, &e, bits);
            prop_assert_eq!(back.state, logical);
            prop_assert_eq!(back.chain_break_fraction, 0.0);
        }
    }
}
