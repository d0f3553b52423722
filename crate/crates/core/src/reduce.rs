//! Precision reduction by bin packing.
//!
//! Passenger counts are quantized into `{0, …, N_p}` with equal-frequency
//! bins over the multiset of positive counts (zero stays zero, the largest
//! count lands in bin `N_p`). Walking times are mapped to levels
//! `{1, …, N_t}` by randomized, order-preserving rounding of their rank, with
//! the longest time pinned to `N_t`. Schedule timestamps are left untouched,
//! so the forbidden pairs and the transfer graph do not change.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instance::{Assignment, FlightGateInstance};
use crate::solve::ExactResult;
use crate::{Error, Result};

/// Passenger-bin grid used for the approximation-ratio study.
pub const RATIO_STUDY_NP: [u32; 7] = [2, 3, 6, 7, 8, 9, 10];
/// Passenger-bin and time-level grid used for annealing.
pub const ANNEAL_GRID: [u32; 4] = [2, 3, 6, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinPackConfig {
    pub n_p: u32,
    pub n_t: u32,
    pub seed: u64,
}

impl BinPackConfig {
    pub fn new(n_p: u32, n_t: u32, seed: u64) -> Result<Self> {
        if n_p == 0 || n_t == 0 {
            return Err(Error::InvalidParams(format!(
                "bin counts must be >= 1, got n_p={n_p} n_t={n_t}"
            )));
        }
        Ok(Self { n_p, n_t, seed })
    }
}

/// Equal-frequency bin of every distinct positive value.
fn quantile_bins(values: &[u32], bins: u32) -> BTreeMap<u32, u32> {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &v in values.iter().filter(|&&v| v > 0) {
        *counts.entry(v).or_default() += 1;
    }
    let total: u64 = counts.values().sum();
    let mut below = 0u64;
    let mut map = BTreeMap::new();
    for (v, c) in counts {
        below += c;
        // ceil(F(v) · bins) with F the empirical distribution function
        let bin = (below * u64::from(bins)).div_ceil(total);
        map.insert(v, bin as u32);
    }
    map
}

/// Order-preserving random levels for the distinct positive times.
fn time_levels(values: &[f64], levels: u32, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    let mut distinct: Vec<f64> = values.iter().copied().filter(|&t| t > 0.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let m = distinct.len();
    let mut out = Vec::with_capacity(m);
    let mut prev = 1u32;
    for (k, &t) in distinct.iter().enumerate() {
        let level = if k + 1 == m {
            levels
        } else {
            let r = 1.0 + k as f64 * f64::from(levels - 1) / (m - 1) as f64;
            let floor = r.floor();
            let up = rng.gen_bool(r - floor);
            let l = floor as u32 + u32::from(up);
            l.clamp(prev, levels)
        };
        prev = level;
        out.push((t, f64::from(level)));
    }
    out
}

pub fn bin_pack(inst: &FlightGateInstance, cfg: &BinPackConfig) -> FlightGateInstance {
    let mut passengers: Vec<u32> = Vec::new();
    for f in &inst.flights {
        passengers.push(f.n_arr);
        passengers.push(f.n_dep);
    }
    passengers.extend(inst.transfer_edges().into_iter().map(|(_, _, n)| n));
    let pbins = quantile_bins(&passengers, cfg.n_p);
    let pmap = |v: u32| if v == 0 { 0 } else { pbins[&v] };

    let mut times: Vec<f64> = Vec::new();
    for g in &inst.gates {
        times.push(g.t_arr);
        times.push(g.t_dep);
    }
    times.extend(inst.t_gate.iter().flatten().copied());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let levels = time_levels(&times, cfg.n_t, &mut rng);
    let tmap = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let k = levels
            .binary_search_by(|(v, _)| v.total_cmp(&t))
            .expect("every positive time has a level");
        levels[k].1
    };

    let mut out = inst.clone();
    for f in &mut out.flights {
        f.n_arr = pmap(f.n_arr);
        f.n_dep = pmap(f.n_dep);
    }
    for row in &mut out.n_trans {
        for n in row.iter_mut() {
            *n = pmap(*n);
        }
    }
    for g in &mut out.gates {
        g.t_arr = tmap(g.t_arr);
        g.t_dep = tmap(g.t_dep);
    }
    for row in &mut out.t_gate {
        for t in row.iter_mut() {
            *t = tmap(*t);
        }
    }
    out
}

/// `R = T(x̂) / T(x)` where `x` optimizes the original instance, `x̂` the
/// binned one, and `T` is always the original objective.
pub fn approximation_ratio<S>(
    original: &FlightGateInstance,
    binned: &FlightGateInstance,
    exact_solver: S,
) -> Result<f64>
where
    S: Fn(&FlightGateInstance) -> Result<ExactResult> + Sync,
{
    let (best, best_binned) = rayon::join(|| exact_solver(original), || exact_solver(binned));
    let (best, best_binned) = (best?, best_binned?);
    ratio_of(original, &best.assignment, &best_binned.assignment)
}

/// Ratio from already-solved assignments.
pub fn ratio_of(
    original: &FlightGateInstance,
    optimum: &Assignment,
    binned_optimum: &Assignment,
) -> Result<f64> {
    let denom = original.total_transit_time(optimum);
    let numer = original.total_transit_time(binned_optimum);
    if denom == 0.0 {
        return if numer == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::ZeroOptimum(numer))
        };
    }
    let r = numer / denom;
    assert!(r >= 1.0, "binned optimum beats the true optimum: R = {r}");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{flight, gate};
    use crate::instance::{generate, GeneratorParams};
    use crate::solve::exact_assignment;
    use proptest::prelude::*;

    #[test]
    fn endpoint_bins() {
        let m = quantile_bins(&[0, 10, 20], 2);
        assert_eq!(m[&10], 1);
        assert_eq!(m[&20], 2);
    }

    #[test]
    fn identity_when_already_binned() {
        let mut inst = generate(4, 3, 3, &GeneratorParams::default()).unwrap();
        inst.flights[0].n_arr = 1;
        inst.flights[0].n_dep = 2;
        inst.flights[1].n_arr = 3;
        inst.flights[1].n_dep = 4;
        inst.flights[2].n_arr = 5;
        inst.flights[2].n_dep = 6;
        for row in &mut inst.n_trans {
            row.iter_mut().for_each(|n| *n = 0);
        }
        let out = bin_pack(&inst, &BinPackConfig::new(6, 10, 1).unwrap());
        assert_eq!(out.flights, inst.flights);
    }

    #[test]
    fn preserves_structure() {
        let inst = generate(8, 10, 5, &GeneratorParams::default()).unwrap();
        let out = bin_pack(&inst, &BinPackConfig::new(3, 2, 5).unwrap());
        assert!(out.validate().is_empty());
        assert_eq!(out.forbidden_pairs(), inst.forbidden_pairs());
        for (a, b) in inst.n_trans.iter().flatten().zip(out.n_trans.iter().flatten()) {
            assert_eq!(*a == 0, *b == 0);
        }
        let max_t = out.t_gate.iter().flatten().copied().fold(0.0, f64::max);
        assert_eq!(max_t.max(out.gates.iter().map(|g| g.t_arr.max(g.t_dep)).fold(0.0, f64::max)), 2.0);
        assert_eq!(bin_pack(&inst, &BinPackConfig::new(3, 2, 5).unwrap()), out);
    }

    #[test]
    fn identical_instances_have_unit_ratio() {
        let inst = generate(5, 4, 3, &GeneratorParams::default()).unwrap();
        assert_eq!(approximation_ratio(&inst, &inst, exact_assignment).unwrap(), 1.0);
    }

    #[test]
    fn zero_optimum_conventions() {
        // no arriving/departing passengers: sharing a gate costs nothing
        let inst = FlightGateInstance {
            flights: vec![flight("a", 0, 10, 0, 0), flight("b", 20, 30, 0, 0)],
            gates: vec![gate("x", 1.0, 1.0), gate("y", 2.0, 2.0)],
            n_trans: vec![vec![0, 3], vec![3, 0]],
            t_gate: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            t_buf: 0,
        };
        let shared = Assignment::new(vec![0, 0]);
        assert_eq!(ratio_of(&inst, &shared, &shared).unwrap(), 1.0);
        assert!(matches!(
            ratio_of(&inst, &shared, &Assignment::new(vec![0, 1])),
            Err(Error::ZeroOptimum(v)) if v == 6.0
        ));
    }

    fn brute_force(i: &FlightGateInstance) -> (f64, Assignment) {
        let mut best = (f64::INFINITY, Assignment::new(vec![]));
        for a in 0..i.num_gates() {
            for b in 0..i.num_gates() {
                let g = Assignment::new(vec![a, b]);
                let t = i.total_transit_time(&g);
                if i.is_feasible(&g) && t < best.0 {
                    best = (t, g);
                }
            }
        }
        best
    }

    #[test]
    fn collapsed_transfer_times_lose_optimality() {
        // Flight b overlaps a, which sits at gate x. Originally b prefers y
        // (5 + 2*5*2 = 25) over z (1 + 2*5*3 = 31). When the x-y and x-z
        // walks land on the same level, the binned optimum moves b to z.
        let inst = FlightGateInstance {
            flights: vec![flight("a", 0, 10, 0, 100), flight("b", 5, 30, 0, 1)],
            gates: vec![gate("x", 1.0, 1.0), gate("y", 1.0, 5.0), gate("z", 1.0, 1.0)],
            n_trans: vec![vec![0, 5], vec![5, 0]],
            t_gate: vec![
                vec![0.0, 2.0, 3.0],
                vec![2.0, 0.0, 4.0],
                vec![3.0, 4.0, 0.0],
            ],
            t_buf: 0,
        };
        let (opt, _) = brute_force(&inst);
        assert_eq!(opt, 125.0);
        let seed = (0..32)
            .find(|&s| {
                let b = bin_pack(&inst, &BinPackConfig::new(2, 2, s).unwrap());
                b.t_gate[0][1] == b.t_gate[0][2]
            })
            .expect("some seed collapses the two walks");
        let binned = bin_pack(&inst, &BinPackConfig::new(2, 2, seed).unwrap());
        let (_, binned_opt) = brute_force(&binned);
        let expected = inst.total_transit_time(&binned_opt) / opt;
        assert_eq!(expected, 131.0 / 125.0);
        let r = approximation_ratio(&inst, &binned, exact_assignment).unwrap();
        assert_eq!(r, expected);
        assert_eq!(exact_assignment(&inst).unwrap().objective, opt);
    }

    proptest! {
        #[test]
        fn binning_is_monotone_and_bounded(
            seed in 0u64..500,
            n_p in 1u32..12,
            n_t in 1u32..12,
        ) {
            let inst = generate(seed, 6, 4, &GeneratorParams::default()).unwrap();
            let out = bin_pack(&inst, &BinPackConfig::new(n_p, n_t, seed).unwrap());
            let mut pax = vec![];
            for (a, b) in inst.flights.iter().zip(&out.flights) {
                pax.push((a.n_arr, b.n_arr));
                pax.push((a.n_dep, b.n_dep));
            }
            for (ra, rb) in inst.n_trans.iter().zip(&out.n_trans) {
                pax.extend(ra.iter().copied().zip(rb.iter().copied()));
            }
            for &(a, b) in &pax {
                prop_assert!(b <= n_p);
                prop_assert_eq!(a == 0, b == 0);
                for &(c, d) in &pax {
                    if a <= c { prop_assert!(b <= d); }
                }
            }
            let mut times = vec![];
            for (a, b) in inst.gates.iter().zip(&out.gates) {
                times.push((a.t_arr, b.t_arr));
                times.push((a.t_dep, b.t_dep));
            }
            for (ra, rb) in inst.t_gate.iter().zip(&out.t_gate) {
                times.extend(ra.iter().copied().zip(rb.iter().copied()));
            }
            let mut distinct_levels: Vec<f64> = vec![];
            for &(a, b) in &times {
                if a > 0.0 {
                    prop_assert!((1.0..=f64::from(n_t)).contains(&b));
                    distinct_levels.push(b);
                }
                for &(c, d) in &times {
                    if a <= c { prop_assert!(b <= d); }
                }
            }
            distinct_levels.sort_by(f64::total_cmp);
            distinct_levels.dedup();
            prop_assert!(distinct_levels.len() <= n_t as usize);
            let distinct_pax: std::collections::BTreeSet<u32> =
                pax.iter().map(|p| p.1).filter(|&v| v > 0).collect();
            prop_assert!(distinct_pax.len() <= n_p as usize);
            prop_assert_eq!(out.forbidden_pairs(), inst.forbidden_pairs());
        }
    }
}
