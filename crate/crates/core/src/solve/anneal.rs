//! Metropolis simulated annealing over Ising spins.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qubo::IsingModel;
use crate::{Error, Result};

/// Nominal hardware anneal time in microseconds.
pub const T_ANNEAL_US: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub sweeps: usize,
    /// Inverse-temperature endpoints; derived from the model when `None`.
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            num_reads: 1000,
            sweeps: 1000,
            beta_range: None,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.sweeps == 0 {
            return Err(Error::InvalidParams("num_reads and sweeps must be >= 1".into()));
        }
        if let Some((b0, b1)) = self.beta_range {
            if !(b0 > 0.0 && b0 < b1 && b1.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "beta range must satisfy 0 < start < end, got ({b0}, {b1})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: Vec<i8>,
    pub energy: f64,
    pub multiplicity: usize,
}

/// Distinct states ordered by energy, then state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
}

/// Run metadata written next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealMetadata {
    pub seed: u64,
    pub num_reads: usize,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub wall_time_s: f64,
}

impl SampleSet {
    /// Groups raw reads, computing every energy from `model`.
    pub fn from_reads(model: &IsingModel, reads: Vec<Vec<i8>>) -> Self {
        let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
        for r in reads {
            *counts.entry(r).or_default() += 1;
        }
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(state, multiplicity)| Sample {
                energy: model.energy(&state),
                state,
                multiplicity,
            })
            .collect();
        samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.state.cmp(&b.state)));
        Self { samples }
    }

    pub fn num_reads(&self) -> usize {
        self.samples.iter().map(|s| s.multiplicity).sum()
    }

    pub fn lowest(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with columns `state,energy,multiplicity`; spins written as `1` (+1) and `0` (−1).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["state", "energy", "multiplicity"])?;
        for s in &self.samples {
            let bits: String = s.state.iter().map(|&v| if v > 0 { '1' } else { '0' }).collect();
            out.write_record([bits, s.energy.to_string(), s.multiplicity.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut samples = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |msg: &str| Error::Parse {
                line: line + 2,
                msg: msg.to_string(),
            };
            let state = rec
                .get(0)
                .ok_or_else(|| bad("missing state"))?
                .chars()
                .map(|c| match c {
                    '1' => Ok(1),
                    '0' => Ok(-1),
                    _ => Err(bad("state must be a bitstring")),
                })
                .collect::<Result<Vec<i8>>>()?;
            let energy = rec
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("bad energy"))?;
            let multiplicity = rec
                .get(2)
                .and_then(|v| v.parse().ok())
                .filter(|&m: &usize| m >= 1)
                .ok_or_else(|| bad("multiplicity must be >= 1"))?;
            samples.push(Sample {
                state,
                energy,
                multiplicity,
            });
        }
        Ok(Self { samples })
    }
}

/// `(ln 2 / max|c|, ln(100 n) / min|c|)` over nonzero coefficients, `n`
/// counting spins that carry a field or coupling.
pub fn default_beta_range(model: &IsingModel) -> (f64, f64) {
    let n = model.active_spins().iter().filter(|a| **a).count().max(1);
    match model.min_abs_coeff() {
        Some(min) => (
            std::f64::consts::LN_2 / model.max_abs_coeff(),
            (100.0 * n as f64).ln() / min,
        ),
        None => (0.1, 1.0),
    }
}

struct Csr {
    start: Vec<usize>,
    nbr: Vec<(usize, f64)>,
}

fn adjacency(model: &IsingModel) -> Csr {
    let n = model.len();
    let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(a, b), &v) in &model.j {
        lists[a].push((b, v));
        lists[b].push((a, v));
    }
    let mut start = Vec::with_capacity(n + 1);
    let mut nbr = Vec::new();
    for l in lists {
        start.push(nbr.len());
        nbr.extend(l);
    }
    start.push(nbr.len());
    Csr { start, nbr }
}

/// Independent single-spin-flip Metropolis anneals along a geometric
/// inverse-temperature schedule.
///
/// Read `r` draws from its own ChaCha stream of `seed`, so results do not
/// depend on how reads are scheduled across threads. Spins without field or
/// couplings are drawn at random once and never swept.
pub fn simulated_anneal(model: &IsingModel, params: &AnnealParams) -> Result<SampleSet> {
    params.validate()?;
    let (b0, b1) = params.beta_range.unwrap_or_else(|| default_beta_range(model));
    let sweeps = params.sweeps;
    let schedule: Vec<f64> = (0..sweeps)
        .map(|t| {
            if sweeps == 1 {
                b1
            } else {
                b0 * (b1 / b0).powf(t as f64 / (sweeps - 1) as f64)
            }
        })
        .collect();
    let csr = adjacency(model);
    let active: Vec<usize> = model
        .active_spins()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.then_some(i))
        .collect();

    let reads: Vec<Vec<i8>> = (0..params.num_reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(read as u64);
            anneal_once(model, &csr, &active, &schedule, &mut rng)
        })
        .collect();
    Ok(SampleSet::from_reads(model, reads))
}

fn anneal_once(
    model: &IsingModel,
    csr: &Csr,
    active: &[usize],
    schedule: &[f64],
    rng: &mut ChaCha8Rng,
) -> Vec<i8> {
    let mut s: Vec<i8> = (0..model.len())
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    for &beta in schedule {
        for &i in active {
            let mut local = model.h[i];
            for &(j, v) in &csr.nbr[csr.start[i]..csr.start[i + 1]] {
                local += v * f64::from(s[j]);
            }
            let delta = -2.0 * f64::from(s[i]) * local;
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                s[i] = -s[i];
            }
        }
    }
    s
}

/// Fraction of reads with energy at most `optimal_energy + atol`.
pub fn success_probability(samples: &SampleSet, optimal_energy: f64, atol: f64) -> f64 {
    let total = samples.num_reads();
    if total == 0 {
        return 0.0;
    }
    let hits: usize = samples
        .samples
        .iter()
        .filter(|s| s.energy <= optimal_energy + atol)
        .map(|s| s.multiplicity)
        .sum();
    hits as f64 / total as f64
}

/// Optimality tolerance relative to the largest coefficient magnitude.
pub fn default_atol(max_abs_coeff: f64) -> f64 {
    1e-9 * max_abs_coeff
}

/// Anneal time needed to see the optimum with 99% certainty,
/// `ln(0.01) / ln(1 − p) · t_anneal`. `p >= 1` gives `t_anneal`, `p <= 0`
/// gives infinity.
pub fn time_to_solution(p: f64, t_anneal: f64) -> f64 {
    if p >= 1.0 {
        t_anneal
    } else if p <= 0.0 || p.is_nan() {
        f64::INFINITY
    } else {
        (1.0f64 - 0.99).ln() / (1.0 - p).ln() * t_anneal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(reads: usize, seed: u64) -> AnnealParams {
        AnnealParams {
            num_reads: reads,
            sweeps: 100,
            beta_range: None,
            seed,
        }
    }

    #[test]
    fn single_spin_ground_state() {
        let mut m = IsingModel::new(1);
        m.h[0] = -2.0;
        m.offset = 0.5;
        let s = simulated_anneal(&m, &params(50, 1)).unwrap();
        assert_eq!(s.samples.len(), 1);
        assert_eq!(s.samples[0].state, vec![1]);
        assert_eq!(s.samples[0].energy, -1.5);
        assert_eq!(s.num_reads(), 50);
    }

    #[test]
    fn ferromagnetic_pair_finds_both_ground_states() {
        let mut m = IsingModel::new(2);
        m.add_coupling(0, 1, -1.0);
        let s = simulated_anneal(&m, &params(200, 2)).unwrap();
        let states: Vec<&Vec<i8>> = s.samples.iter().map(|x| &x.state).collect();
        assert_eq!(states, vec![&vec![-1, -1], &vec![1, 1]]);
        assert!(s.samples.iter().all(|x| x.energy == -1.0));
    }

    #[test]
    fn deterministic_and_energies_exact() {
        let mut m = IsingModel::new(6);
        for i in 0..6 {
            m.h[i] = 0.3 * i as f64 - 0.7;
            m.add_coupling(i, (i + 1) % 6, if i % 2 == 0 { 1.0 } else { -0.6 });
        }
        let a = simulated_anneal(&m, &params(64, 7)).unwrap();
        let b = simulated_anneal(&m, &params(64, 7)).unwrap();
        assert_eq!(a, b);
        for s in &a.samples {
            assert_eq!(s.energy, m.energy(&s.state));
        }
        let p = success_probability(&a, a.lowest().unwrap().energy, 0.0);
        assert!(p >= 1.0 / 64.0);
    }

    #[test]
    fn rejects_bad_params() {
        let m = IsingModel::new(1);
        let mut p = params(0, 0);
        assert!(simulated_anneal(&m, &p).is_err());
        p.num_reads = 1;
        p.beta_range = Some((2.0, 1.0));
        assert!(simulated_anneal(&m, &p).is_err());
    }

    #[test]
    fn success_counting() {
        let mk = |hits: usize, misses: usize| SampleSet {
            samples: vec![
                Sample { state: vec![1], energy: -1.0, multiplicity: hits },
                Sample { state: vec![-1], energy: 1.0, multiplicity: misses },
            ]
            .into_iter()
            .filter(|s| s.multiplicity > 0)
            .collect(),
        };
        assert_eq!(success_probability(&mk(1000, 0), -1.0, 0.0), 1.0);
        assert_eq!(success_probability(&mk(0, 1000), -1.0, 0.0), 0.0);
        assert_eq!(success_probability(&mk(137, 863), -1.0, 0.0), 0.137);
    }

    #[test]
    fn tts_formula() {
        assert_eq!(time_to_solution(0.99, 20.0), 20.0);
        assert_eq!(time_to_solution(1.0, 20.0), 20.0);
        assert_eq!(time_to_solution(0.0, 20.0), f64::INFINITY);
        let direct = 20.0 * 0.01f64.ln() / 0.5f64.ln();
        assert!((time_to_solution(0.5, 20.0) - direct).abs() < 1e-12);
        assert!((direct - 132.877).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip() {
        let set = SampleSet {
            samples: vec![
                Sample { state: vec![1, -1, 1], energy: -2.5, multiplicity: 3 },
                Sample { state: vec![-1, -1, 1], energy: 0.25, multiplicity: 1 },
            ],
        };
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("state,energy,multiplicity\n101,-2.5,3\n"));
        assert_eq!(SampleSet::read_csv(buf.as_slice()).unwrap(), set);
    }
}
