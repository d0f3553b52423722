//! Reduction of a full-day schedule to small, transfer-coupled instances.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Flight, FlightGateInstance};
use crate::{Error, Result};

pub const DEFAULT_SPLIT_THRESHOLD: i64 = 120;
pub const DEFAULT_TURNAROUND_GAP: i64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOptions {
    /// Stays strictly longer than this (minutes) are split.
    pub threshold: i64,
    /// Minutes the aircraft spends away from the gate between the halves.
    pub gap: i64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_SPLIT_THRESHOLD,
            gap: DEFAULT_TURNAROUND_GAP,
        }
    }
}

/// Replaces every long stay by an arriving and a departing flight.
///
/// Both halves get `(dwell - gap) / 2` minutes at the gate (at least one).
/// The early half keeps `t_in` and the arriving passengers, the late half
/// keeps `t_out` and the departing passengers. A transfer edge to another
/// flight goes to the early half when that flight's stay is centred no
/// earlier than the split flight's, otherwise to the late half. The halves
/// share no transfers, so all passenger totals are preserved.
pub fn split_long_stays(
    inst: &FlightGateInstance,
    opts: SplitOptions,
) -> Result<FlightGateInstance> {
    if opts.threshold <= 0 || opts.gap < 0 {
        return Err(Error::InvalidParams(format!(
            "split threshold must be > 0 and gap >= 0, got {} and {}",
            opts.threshold, opts.gap
        )));
    }
    let nf = inst.num_flights();
    // (early index, late index); equal when the flight is kept whole
    let mut halves = Vec::with_capacity(nf);
    let mut flights = Vec::with_capacity(nf);
    for f in &inst.flights {
        let dwell = f.t_out - f.t_in;
        if dwell > opts.threshold {
            let half = ((dwell - opts.gap) / 2).max(1);
            let early = flights.len();
            flights.push(Flight {
                id: format!("{}.1", f.id),
                t_in: f.t_in,
                t_out: f.t_in + half,
                n_arr: f.n_arr,
                n_dep: 0,
            });
            flights.push(Flight {
                id: format!("{}.2", f.id),
                t_in: f.t_out - half,
                t_out: f.t_out,
                n_arr: 0,
                n_dep: f.n_dep,
            });
            halves.push((early, early + 1));
        } else {
            halves.push((flights.len(), flights.len()));
            flights.push(f.clone());
        }
    }

    let centre = |i: usize| inst.flights[i].t_in + inst.flights[i].t_out;
    let side = |i: usize, other: usize| {
        let (early, late) = halves[i];
        if centre(other) >= centre(i) {
            early
        } else {
            late
        }
    };
    let mut n_trans = vec![vec![0u32; flights.len()]; flights.len()];
    for (i, k, n) in inst.transfer_edges() {
        let (a, b) = (side(i, k), side(k, i));
        n_trans[a][b] += n;
        n_trans[b][a] += n;
    }

    Ok(FlightGateInstance {
        flights,
        gates: inst.gates.clone(),
        n_trans,
        t_gate: inst.t_gate.clone(),
        t_buf: inst.t_buf,
    })
}

/// Keeps only flights with at least one transfer passenger.
pub fn drop_no_transfer_flights(inst: &FlightGateInstance) -> FlightGateInstance {
    let keep: Vec<usize> = (0..inst.num_flights())
        .filter(|&i| inst.transfer_degree(i) > 0)
        .collect();
    inst.induced(&keep)
}

fn transfer_adjacency(inst: &FlightGateInstance) -> Vec<Vec<usize>> {
    inst.n_trans
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Flight index sets of the transfer-graph components, ordered by smallest member.
pub fn component_members(inst: &FlightGateInstance) -> Vec<Vec<usize>> {
    let adj = transfer_adjacency(inst);
    let mut seen = vec![false; inst.num_flights()];
    let mut out = Vec::new();
    for start in 0..inst.num_flights() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// One sub-instance per connected component of the transfer graph.
pub fn connected_components(inst: &FlightGateInstance) -> Vec<FlightGateInstance> {
    component_members(inst)
        .iter()
        .map(|m| inst.induced(m))
        .collect()
}

/// Induced sub-instance on `target_size` flights grown from a random start
/// by randomized breadth-first expansion along transfer edges.
pub fn random_cut(
    inst: &FlightGateInstance,
    seed: u64,
    target_size: usize,
) -> Result<FlightGateInstance> {
    let nf = inst.num_flights();
    if target_size == 0 || target_size > nf {
        return Err(Error::OutOfRange {
            what: "target_size",
            value: target_size as i64,
            range: format!("[1, {nf}]"),
        });
    }
    let adj = transfer_adjacency(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; nf];
    let mut queued = vec![false; nf];
    let mut frontier: Vec<usize> = Vec::new();
    let mut members = Vec::with_capacity(target_size);
    while members.len() < target_size {
        let v = if frontier.is_empty() {
            // disconnected input: restart from a fresh vertex
            let rest: Vec<usize> = (0..nf).filter(|&v| !chosen[v]).collect();
            rest[rng.gen_range(0..rest.len())]
        } else {
            frontier.swap_remove(rng.gen_range(0..frontier.len()))
        };
        chosen[v] = true;
        members.push(v);
        for &w in &adj[v] {
            if !chosen[w] && !queued[w] {
                queued[w] = true;
                frontier.push(w);
            }
        }
    }
    members.sort_unstable();
    Ok(inst.induced(&members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{flight, gate};
    use crate::instance::{generate, GeneratorParams};

    fn chain_instance(n: usize, edges: &[(usize, usize, u32)]) -> FlightGateInstance {
        let mut n_trans = vec![vec![0; n]; n];
        for &(i, j, c) in edges {
            n_trans[i][j] = c;
            n_trans[j][i] = c;
        }
        FlightGateInstance {
            flights: (0..n)
                .map(|i| flight(&format!("f{i}"), 60 * i as i64, 60 * i as i64 + 50, 1, 1))
                .collect(),
            gates: vec![gate("g0", 1.0, 1.0), gate("g1", 2.0, 2.0)],
            n_trans,
            t_gate: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            t_buf: 5,
        }
    }

    #[test]
    fn long_stay_is_split() {
        let mut inst = chain_instance(2, &[(0, 1, 4)]);
        inst.flights[0].t_in = 0;
        inst.flights[0].t_out = 300;
        let out = split_long_stays(&inst, SplitOptions::default()).unwrap();
        assert_eq!(out.num_flights(), 3);
        assert_eq!((out.flights[0].t_in, out.flights[0].t_out), (0, 120));
        assert_eq!((out.flights[1].t_in, out.flights[1].t_out), (180, 300));
        assert_eq!(out.flights[0].n_arr + out.flights[1].n_arr, 1);
        assert_eq!(out.flights[0].n_dep + out.flights[1].n_dep, 1);
        assert_eq!(out.n_trans[0][1], 0);
        let total: u32 = out.n_trans.iter().flatten().sum();
        assert_eq!(total, 8);
        assert!(out.validate().is_empty());
    }

    #[test]
    fn short_stay_unchanged() {
        let mut inst = chain_instance(1, &[]);
        inst.flights[0].t_out = inst.flights[0].t_in + 90;
        let out = split_long_stays(&inst, SplitOptions::default()).unwrap();
        assert_eq!(out, inst);
    }

    #[test]
    fn split_count_matches_filter() {
        let inst = generate(11, 40, 8, &GeneratorParams::default()).unwrap();
        let long = inst
            .flights
            .iter()
            .filter(|f| f.t_out - f.t_in > 120)
            .count();
        let out = split_long_stays(&inst, SplitOptions::default()).unwrap();
        assert_eq!(out.num_flights(), inst.num_flights() + long);
        assert!(out.validate().is_empty());
    }

    #[test]
    fn drops_isolated_flight() {
        let inst = chain_instance(3, &[(0, 1, 2)]);
        let out = drop_no_transfer_flights(&inst);
        assert_eq!(out.num_flights(), 2);
        assert_eq!(out.flights[1].id, "f1");
        let all = chain_instance(3, &[(0, 1, 2), (1, 2, 1)]);
        assert_eq!(drop_no_transfer_flights(&all), all);
    }

    #[test]
    fn drop_matches_degree_filter() {
        let params = GeneratorParams::airport_day(89);
        let inst = generate(5, 89, 35, &params).unwrap();
        let out = drop_no_transfer_flights(&inst);
        let expected: Vec<&str> = inst
            .flights
            .iter()
            .enumerate()
            .filter(|(i, _)| inst.n_trans[*i].iter().any(|&n| n > 0))
            .map(|(_, f)| f.id.as_str())
            .collect();
        let got: Vec<&str> = out.flights.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn two_cliques() {
        let mut edges = vec![];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            edges.push((i, j, 1));
        }
        for i in 3..7 {
            for j in (i + 1)..7 {
                edges.push((i, j, 2));
            }
        }
        let comps = connected_components(&chain_instance(7, &edges));
        let sizes: Vec<usize> = comps.iter().map(|c| c.num_flights()).collect();
        assert_eq!(sizes, vec![3, 4]);
    }

    #[test]
    fn connected_graph_is_one_component() {
        let inst = chain_instance(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let comps = connected_components(&inst);
        assert_eq!(comps, vec![inst]);
    }

    #[test]
    fn cut_bounds() {
        let inst = chain_instance(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]);
        assert_eq!(random_cut(&inst, 3, 5).unwrap(), inst);
        assert_eq!(random_cut(&inst, 3, 1).unwrap().num_flights(), 1);
        assert!(random_cut(&inst, 3, 0).is_err());
        assert!(random_cut(&inst, 3, 6).is_err());
    }

    #[test]
    fn cut_is_connected_and_deterministic() {
        let edges: Vec<_> = (0..19).map(|i| (i, i + 1, 1)).chain([(0, 10, 3), (5, 15, 2)]).collect();
        let inst = chain_instance(20, &edges);
        let cut = random_cut(&inst, 9, 8).unwrap();
        assert_eq!(cut.num_flights(), 8);
        assert_eq!(component_members(&cut).len(), 1);
        assert_eq!(cut, random_cut(&inst, 9, 8).unwrap());
    }
}
