//! Corpus runs: bin-packing ratios, embedding overhead and precision, and
//! annealing success over chain strengths, penalty factors and bin grids.
//!
//! A run is driven by an [`ExperimentConfig`] (TOML). Every random choice is
//! derived from the master seed, and the derived seeds are written into the
//! records, so any row can be recomputed on its own. Wall-clock times go to a
//! separate `timings.csv` so that `records.csv` is byte-for-byte reproducible.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{embed_ising, find_embedding, unembed, EmbeddedIsing, Embedding, HardwareGraph};
use crate::error::write_file;
use crate::instance::{
    component_members, drop_no_transfer_flights, generate, random_cut, split_long_stays,
    GeneratorParams, SplitOptions, DEFAULT_TURNAROUND_GAP,
};
use crate::qubo::{
    coeff_ratio_ising, coeff_ratio_qubo, compile, default_epsilon, to_ising, worst_case_weights,
    IsingModel, PenaltyWeights,
};
use crate::reduce::{bin_pack, ratio_of, BinPackConfig, ANNEAL_GRID, RATIO_STUDY_NP};
use crate::solve::{
    default_atol, exact_assignment, minimizer_is_feasible, simulated_anneal, time_to_solution,
    tune_penalties_capped, AnnealParams, T_ANNEAL_US,
};
use crate::{Assignment, Error, FlightGateInstance, Result};

/// Flights and gates drawn for the synthetic airport day. Splitting long
/// stays and dropping flights without transfers leaves roughly 90 flights.
pub const AIRPORT_FLIGHTS: usize = 120;
pub const AIRPORT_GATES: usize = 35;
/// Default `|F|·|G|` bound for the bin-packing and annealing studies.
pub const SIZE_LIMIT: usize = 100;
pub const JF_GRID: [f64; 6] = [-5.0, -2.0, -1.0, -0.5, -0.2, -0.1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CorpusSpec {
    /// Components and random cuts of a generated airport day.
    Extract {
        #[serde(default = "default_airport_flights")]
        flights: usize,
        #[serde(default = "default_airport_gates")]
        gates: usize,
        #[serde(default = "default_split_threshold")]
        split_threshold: i64,
        #[serde(default = "default_min_flights")]
        min_flights: usize,
        #[serde(default = "default_max_size")]
        max_flights: usize,
        #[serde(default = "default_max_size")]
        max_gates: usize,
        /// Extra instances cut from the largest component.
        #[serde(default)]
        random_cuts: usize,
    },
    /// Independent generator draws, `per_size` per `[flights, gates]` pair.
    Generated {
        sizes: Vec<[usize; 2]>,
        #[serde(default = "one")]
        per_size: usize,
    },
    /// Instance JSON files; the file stem is the instance id.
    Files { paths: Vec<PathBuf> },
}

fn default_airport_flights() -> usize {
    AIRPORT_FLIGHTS
}
fn default_airport_gates() -> usize {
    AIRPORT_GATES
}
fn default_split_threshold() -> i64 {
    crate::instance::DEFAULT_SPLIT_THRESHOLD
}
fn default_min_flights() -> usize {
    3
}
fn default_max_size() -> usize {
    16
}
fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinPackStudy {
    pub enabled: bool,
    pub n_p: Vec<u32>,
    pub n_t: Vec<u32>,
    /// Only instances with `|F|·|G| < size_limit` are binned.
    pub size_limit: usize,
}

impl Default for BinPackStudy {
    fn default() -> Self {
        Self {
            enabled: true,
            n_p: RATIO_STUDY_NP.to_vec(),
            n_t: ANNEAL_GRID.to_vec(),
            size_limit: SIZE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyMode {
    WorstCase,
    Bisection,
}

impl PenaltyMode {
    fn label(self) -> &'static str {
        match self {
            Self::WorstCase => "worst-case",
            Self::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenaltyConfig {
    /// Weights behind the precision metrics of the embedding study.
    pub embedding: PenaltyMode,
    /// Weights for annealing runs; factors apply to either mode.
    pub anneal: PenaltyMode,
    /// `(f_one, f_not)` multipliers of the base weights.
    pub factors: Vec<[f64; 2]>,
    /// Gap above the transfer bound; per-instance default when absent.
    pub epsilon: Option<f64>,
    /// Largest model solved by enumeration inside the feasibility oracle.
    pub enum_cap: usize,
    /// Bisection is skipped (worst-case weights used) above this many variables.
    pub bisection_max_vars: usize,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            embedding: PenaltyMode::Bisection,
            anneal: PenaltyMode::WorstCase,
            factors: vec![[1.0, 1.0], [0.5, 1.0], [1.0, 0.5], [0.5, 0.5]],
            epsilon: None,
            enum_cap: 16,
            bisection_max_vars: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingStudy {
    pub enabled: bool,
    /// Hardware preset name.
    pub topology: String,
    pub tries: usize,
    /// Larger models are recorded as skipped.
    pub max_logical: usize,
}

impl Default for EmbeddingStudy {
    fn default() -> Self {
        Self {
            enabled: true,
            topology: "2000Q".into(),
            tries: crate::embed::DEFAULT_TRIES,
            max_logical: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealStudy {
    pub enabled: bool,
    pub n_p: Vec<u32>,
    pub n_t: Vec<u32>,
    pub num_reads: usize,
    pub sweeps: usize,
    pub beta_range: Option<(f64, f64)>,
    /// Largest logical model that is annealed.
    pub max_logical: usize,
    /// Chain strength for every annealed instance, in units of the largest
    /// logical coefficient.
    pub j_f: f64,
    /// Chain strengths for the sweep instances.
    pub j_f_grid: Vec<f64>,
    /// How many eligible instances (in id order) get the full chain-strength sweep.
    pub sweep_instances: usize,
    pub t_anneal_us: f64,
}

impl Default for AnnealStudy {
    fn default() -> Self {
        Self {
            enabled: true,
            n_p: ANNEAL_GRID.to_vec(),
            n_t: ANNEAL_GRID.to_vec(),
            num_reads: 1000,
            sweeps: 1000,
            beta_range: None,
            max_logical: 40,
            j_f: -1.0,
            j_f_grid: JF_GRID.to_vec(),
            sweep_instances: 1,
            t_anneal_us: T_ANNEAL_US,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub jobs: usize,
    pub corpus: CorpusSpec,
    #[serde(default)]
    pub binpack: BinPackStudy,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub embedding: EmbeddingStudy,
    #[serde(default)]
    pub anneal: AnnealStudy,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&crate::error::read_file(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let b = &self.binpack;
        if b.enabled && (b.n_p.is_empty() || b.n_t.is_empty()) {
            return bad("bin-packing grids must be nonempty".into());
        }
        let a = &self.anneal;
        if a.enabled {
            if a.n_p.is_empty() || a.n_t.is_empty() || a.j_f_grid.is_empty() {
                return bad("annealing grids must be nonempty".into());
            }
            if a.num_reads == 0 || a.sweeps == 0 {
                return bad("num_reads and sweeps must be >= 1".into());
            }
            if !(a.t_anneal_us > 0.0) {
                return bad(format!("t_anneal_us must be > 0, got {}", a.t_anneal_us));
            }
            if let Some(&j) = a.j_f_grid.iter().chain([&a.j_f]).find(|j| !(**j < 0.0)) {
                return bad(format!("chain strengths must be negative, got {j}"));
            }
        }
        if b.n_p.iter().chain(&b.n_t).chain(&a.n_p).chain(&a.n_t).any(|&v| v == 0) {
            return bad("bin counts must be >= 1".into());
        }
        let p = &self.penalty;
        if p.factors.is_empty() || p.factors.iter().flatten().any(|f| !(*f > 0.0)) {
            return bad("penalty factors must be nonempty and positive".into());
        }
        if p.epsilon.is_some_and(|e| !(e > 0.0)) {
            return bad("epsilon must be > 0".into());
        }
        if self.embedding.enabled || a.enabled {
            HardwareGraph::preset(&self.embedding.topology)?;
            if self.embedding.tries == 0 {
                return bad("embedding tries must be >= 1".into());
            }
        }
        match &self.corpus {
            CorpusSpec::Extract {
                flights,
                gates,
                min_flights,
                max_flights,
                max_gates,
                ..
            } => {
                if *flights == 0 || *gates == 0 || *min_flights == 0 || min_flights > max_flights || *max_gates < 1 {
                    return bad("extract corpus needs flights, gates >= 1 and 1 <= min_flights <= max_flights".into());
                }
            }
            CorpusSpec::Generated { sizes, .. } => {
                if sizes.iter().flatten().any(|&v| v == 0) {
                    return bad("generated sizes must be >= 1".into());
                }
            }
            CorpusSpec::Files { .. } => {}
        }
        Ok(())
    }
}

/// A named corpus member.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusInstance {
    pub id: String,
    pub instance: FlightGateInstance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Binpack,
    Embedding,
    Anneal,
}

/// One row of `records.csv`. Fields that do not apply to a study are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub study: Study,
    pub num_flights: usize,
    pub num_gates: usize,
    pub n_logical: usize,
    pub n_p: Option<u32>,
    pub n_t: Option<u32>,
    pub bin_seed: Option<u64>,
    pub penalty: Option<String>,
    pub f_one: Option<f64>,
    pub f_not: Option<f64>,
    pub lambda_one: Option<f64>,
    pub lambda_not: Option<f64>,
    pub n_physical: Option<usize>,
    pub max_chain: Option<usize>,
    pub embed_seed: Option<u64>,
    pub c_qubo: Option<f64>,
    pub c_ising: Option<f64>,
    pub c_ising_embedded: Option<f64>,
    pub j_f: Option<f64>,
    pub anneal_seed: Option<u64>,
    pub num_reads: Option<usize>,
    pub p: Option<f64>,
    pub t_anneal_us: Option<f64>,
    pub t99_us: Option<f64>,
    pub chain_break: Option<f64>,
    /// Optimal objective: of the original instance for bin-packing rows, of
    /// the binned instance for annealing rows.
    pub optimum: Option<f64>,
    /// Bin-packing rows: original objective of the binned optimum. Annealing
    /// rows: objective of the lowest-energy read when it is feasible.
    pub best_objective: Option<f64>,
    pub r: Option<f64>,
    /// `ok`, `skipped: …` or `error: …`.
    pub status: String,
}

impl RunRecord {
    fn new(c: &CorpusInstance, study: Study) -> Self {
        Self {
            instance: c.id.clone(),
            study,
            num_flights: c.instance.num_flights(),
            num_gates: c.instance.num_gates(),
            n_logical: c.instance.num_vars(),
            n_p: None,
            n_t: None,
            bin_seed: None,
            penalty: None,
            f_one: None,
            f_not: None,
            lambda_one: None,
            lambda_not: None,
            n_physical: None,
            max_chain: None,
            embed_seed: None,
            c_qubo: None,
            c_ising: None,
            c_ising_embedded: None,
            j_f: None,
            anneal_seed: None,
            num_reads: None,
            p: None,
            t_anneal_us: None,
            t99_us: None,
            chain_break: None,
            optimum: None,
            best_objective: None,
            r: None,
            status: "ok".into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Numeric field by column name; `Ok(None)` when the field is empty.
    pub fn value(&self, key: &str) -> Result<Option<f64>> {
        let u = |v: usize| Some(v as f64);
        Ok(match key {
            "num_flights" => u(self.num_flights),
            "num_gates" => u(self.num_gates),
            "n_logical" => u(self.n_logical),
            "n_p" => self.n_p.map(f64::from),
            "n_t" => self.n_t.map(f64::from),
            "f_one" => self.f_one,
            "f_not" => self.f_not,
            "lambda_one" => self.lambda_one,
            "lambda_not" => self.lambda_not,
            "n_physical" => self.n_physical.map(|v| v as f64),
            "max_chain" => self.max_chain.map(|v| v as f64),
            "c_qubo" => self.c_qubo,
            "c_ising" => self.c_ising,
            "c_ising_embedded" => self.c_ising_embedded,
            "j_f" => self.j_f,
            "num_reads" => self.num_reads.map(|v| v as f64),
            "p" => self.p,
            "t_anneal_us" => self.t_anneal_us,
            "t99_us" => self.t99_us,
            "chain_break" => self.chain_break,
            "optimum" => self.optimum,
            "best_objective" => self.best_objective,
            "r" => self.r,
            _ => return Err(Error::UnknownKey(key.to_string())),
        })
    }

    fn sort_key(&self, other: &Self) -> Ordering {
        let f = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        self.instance
            .cmp(&other.instance)
            .then(self.study.cmp(&other.study))
            .then(self.n_p.cmp(&other.n_p))
            .then(self.n_t.cmp(&other.n_t))
            .then(f(self.f_one, other.f_one))
            .then(f(self.f_not, other.f_not))
            .then(f(self.j_f, other.j_f))
    }
}

/// Wall time of one record, kept apart from the reproducible columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub instance: String,
    pub study: Study,
    pub n_p: Option<u32>,
    pub n_t: Option<u32>,
    pub f_one: Option<f64>,
    pub f_not: Option<f64>,
    pub j_f: Option<f64>,
    pub wall_s: f64,
}

impl Timing {
    fn of(r: &RunRecord, wall_s: f64) -> Self {
        Self {
            instance: r.instance.clone(),
            study: r.study,
            n_p: r.n_p,
            n_t: r.n_t,
            f_one: r.f_one,
            f_not: r.f_not,
            j_f: r.j_f,
            wall_s,
        }
    }
}

/// Result of annealing an embedded model and reading it out logically.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    /// Fraction of reads whose un-embedded state reaches the optimum.
    pub success_probability: f64,
    pub t99_us: f64,
    /// Broken chains per chain, averaged over reads.
    pub chain_break_fraction: f64,
    /// Lowest logical energy among the un-embedded reads.
    pub best_energy: f64,
    pub best_state: Vec<i8>,
    pub num_reads: usize,
}

/// Anneals the physical model, majority-votes every read back to logical
/// spins and scores it against `optimal_energy` of the logical model.
pub fn anneal_embedded(
    logical: &IsingModel,
    embedded: &EmbeddedIsing,
    params: &AnnealParams,
    optimal_energy: f64,
    t_anneal_us: f64,
) -> Result<AnnealOutcome> {
    let samples = simulated_anneal(&embedded.ising, params)?;
    let atol = default_atol(logical.max_abs_coeff().max(1.0));
    let total = samples.num_reads();
    let mut hits = 0usize;
    let mut broken = 0.0;
    let mut best: Option<(f64, Vec<i8>)> = None;
    for (k, s) in samples.samples.iter().enumerate() {
        let u = unembed(&s.state, &embedded.embedding, mix(params.seed, &[k as u64]));
        let e = logical.energy(&u.state);
        if e <= optimal_energy + atol {
            hits += s.multiplicity;
        }
        broken += u.chain_break_fraction * s.multiplicity as f64;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, u.state));
        }
    }
    let (best_energy, best_state) = best.expect("at least one read");
    let p = hits as f64 / total as f64;
    Ok(AnnealOutcome {
        success_probability: p,
        t99_us: time_to_solution(p, t_anneal_us),
        chain_break_fraction: broken / total as f64,
        best_energy,
        best_state,
        num_reads: total,
    })
}

/// SplitMix64 finalizer folded over `parts`.
fn mix(seed: u64, parts: &[u64]) -> u64 {
    let step = |mut z: u64| {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    parts.iter().fold(step(seed), |acc, &p| step(acc ^ step(p)))
}

fn id_seed(seed: u64, id: &str, tag: u64) -> u64 {
    let mut parts: Vec<u64> = id.bytes().map(u64::from).collect();
    parts.push(tag);
    mix(seed, &parts)
}

const TAG_SCHEDULE: u64 = 1;
const TAG_BIN: u64 = 2;
const TAG_EMBED: u64 = 3;
const TAG_ANNEAL: u64 = 4;

/// The full airport day of an extract corpus, after splitting long stays.
pub fn airport_schedule(config: &ExperimentConfig) -> Result<Option<FlightGateInstance>> {
    let CorpusSpec::Extract {
        flights,
        gates,
        split_threshold,
        ..
    } = &config.corpus
    else {
        return Ok(None);
    };
    let day = generate(
        mix(config.seed, &[TAG_SCHEDULE]),
        *flights,
        *gates,
        &GeneratorParams::airport_day(*flights),
    )?;
    let split = split_long_stays(
        &day,
        SplitOptions {
            threshold: *split_threshold,
            gap: DEFAULT_TURNAROUND_GAP,
        },
    )?;
    Ok(Some(split))
}

/// Keeps a random subset of gates sized between the fewest gates that fit
/// the schedule and `min(max_gates, |F|)`.
fn pick_gates(inst: &FlightGateInstance, max_gates: usize, rng: &mut ChaCha8Rng) -> Option<FlightGateInstance> {
    let greedy = inst.greedy_assignment()?;
    let mut used = greedy.gate_of.clone();
    used.sort_unstable();
    used.dedup();
    let lo = used.len().max(2);
    let hi = max_gates.min(inst.num_flights()).min(inst.num_gates());
    if lo > hi {
        return None;
    }
    let g = rng.gen_range(lo..=hi);
    let mut all: Vec<usize> = (0..inst.num_gates()).collect();
    all.shuffle(rng);
    let mut keep = all[..g].to_vec();
    keep.sort_unstable();
    let sub = inst.with_gates(&keep);
    sub.greedy_assignment().map(|_| sub)
}

/// Builds the corpus in id order.
pub fn build_corpus(config: &ExperimentConfig) -> Result<Vec<CorpusInstance>> {
    let mut out = Vec::new();
    match &config.corpus {
        CorpusSpec::Extract {
            min_flights,
            max_flights,
            max_gates,
            random_cuts,
            ..
        } => {
            let split = airport_schedule(config)?.expect("extract corpus");
            let day = drop_no_transfer_flights(&split);
            let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, &[TAG_SCHEDULE, 1]));
            let members = component_members(&day);
            for (k, m) in members.iter().enumerate() {
                if m.len() < *min_flights || m.len() > *max_flights {
                    continue;
                }
                if let Some(inst) = pick_gates(&day.induced(m), *max_gates, &mut rng) {
                    out.push(CorpusInstance {
                        id: format!("cc{k:03}"),
                        instance: inst,
                    });
                }
            }
            let largest = members.iter().max_by_key(|m| (m.len(), std::cmp::Reverse(m[0])));
            if let Some(largest) = largest.filter(|m| m.len() >= *min_flights) {
                let big = day.induced(largest);
                for k in 0..*random_cuts {
                    let size = rng.gen_range(*min_flights..=(*max_flights).min(big.num_flights()));
                    let cut = random_cut(&big, rng.gen(), size)?;
                    if let Some(inst) = pick_gates(&cut, *max_gates, &mut rng) {
                        out.push(CorpusInstance {
                            id: format!("cut{k:03}"),
                            instance: inst,
                        });
                    }
                }
            }
        }
        CorpusSpec::Generated { sizes, per_size } => {
            for &[f, g] in sizes {
                for k in 0..*per_size {
                    let id = format!("gen-f{f:02}-g{g:02}-{k:02}");
                    let inst = generate(id_seed(config.seed, &id, 0), f, g, &GeneratorParams::default())?;
                    out.push(CorpusInstance { id, instance: inst });
                }
            }
        }
        CorpusSpec::Files { paths } => {
            for p in paths {
                let id = p
                    .file_stem()
                    .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
                let inst = FlightGateInstance::load(p)?;
                inst.ensure_valid()?;
                out.push(CorpusInstance { id, instance: inst });
            }
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::InvalidParams(format!("duplicate instance id `{}`", w[0].id)));
    }
    Ok(out)
}

fn epsilon_for(config: &ExperimentConfig, inst: &FlightGateInstance) -> f64 {
    config.penalty.epsilon.unwrap_or_else(|| default_epsilon(inst))
}

fn base_weights(
    config: &ExperimentConfig,
    inst: &FlightGateInstance,
    mode: PenaltyMode,
) -> Result<(PenaltyWeights, PenaltyMode)> {
    let eps = epsilon_for(config, inst);
    if mode == PenaltyMode::Bisection && inst.num_vars() <= config.penalty.bisection_max_vars {
        Ok((tune_penalties_capped(inst, eps, config.penalty.enum_cap)?, mode))
    } else {
        Ok((worst_case_weights(inst, eps), PenaltyMode::WorstCase))
    }
}

fn error_status(e: &Error) -> String {
    format!("error: {e}")
}

fn small_enough(c: &CorpusInstance, limit: usize) -> bool {
    c.instance.num_vars() < limit
}

fn binpack_records(config: &ExperimentConfig, c: &CorpusInstance) -> Vec<(RunRecord, f64)> {
    let study = &config.binpack;
    if !study.enabled || !small_enough(c, study.size_limit) {
        return Vec::new();
    }
    let started = Instant::now();
    let optimum = exact_assignment(&c.instance);
    let opt_time = started.elapsed().as_secs_f64();
    let mut out = Vec::new();
    for &n_p in &study.n_p {
        for &n_t in &study.n_t {
            let started = Instant::now();
            let mut r = RunRecord::new(c, Study::Binpack);
            let seed = id_seed(config.seed, &c.id, mix(TAG_BIN, &[u64::from(n_p), u64::from(n_t)]));
            r.n_p = Some(n_p);
            r.n_t = Some(n_t);
            r.bin_seed = Some(seed);
            let result = (|| {
                let opt = optimum.as_ref().map_err(|e| Error::Infeasible(e.to_string()))?;
                let binned = bin_pack(&c.instance, &BinPackConfig::new(n_p, n_t, seed)?);
                let best = exact_assignment(&binned)?;
                r.optimum = Some(opt.objective);
                r.best_objective = Some(c.instance.total_transit_time(&best.assignment));
                ratio_of(&c.instance, &opt.assignment, &best.assignment)
            })();
            match result {
                Ok(v) => r.r = Some(v),
                Err(e) => r.status = error_status(&e),
            }
            out.push((r, opt_time + started.elapsed().as_secs_f64()));
        }
    }
    out
}

struct InstanceEmbedding {
    embedding: Embedding,
    seed: u64,
}

fn embedding_record(
    config: &ExperimentConfig,
    c: &CorpusInstance,
    hw: &HardwareGraph,
) -> (Option<InstanceEmbedding>, Option<(RunRecord, f64)>) {
    let started = Instant::now();
    let mut r = RunRecord::new(c, Study::Embedding);
    let seed = id_seed(config.seed, &c.id, TAG_EMBED);
    r.embed_seed = Some(seed);
    let inst = &c.instance;
    // the worst-case pattern contains the couplings of every binned or reweighted model
    let pattern = compile(inst, &worst_case_weights(inst, epsilon_for(config, inst)));
    let edges = pattern.interaction_edges();
    let mut found = None;
    if inst.num_vars() > config.embedding.max_logical {
        r.status = format!("skipped: {} variables above max_logical", inst.num_vars());
    } else {
        match find_embedding(inst.num_vars(), &edges, hw, config.embedding.tries, seed) {
            Ok(e) => {
                r.n_physical = Some(e.num_physical());
                r.max_chain = Some(e.max_chain_len());
                found = Some(InstanceEmbedding { embedding: e, seed });
            }
            Err(e) => r.status = error_status(&e),
        }
    }
    let metrics = (|| -> Result<()> {
        let mode = if r.is_ok() {
            config.penalty.embedding
        } else {
            PenaltyMode::WorstCase
        };
        let (w, used) = base_weights(config, inst, mode)?;
        r.penalty = Some(used.label().into());
        r.lambda_one = Some(w.lambda_one);
        r.lambda_not = Some(w.lambda_not);
        let q = compile(inst, &w);
        r.c_qubo = Some(coeff_ratio_qubo(&q)?);
        let ising = to_ising(&q);
        r.c_ising = Some(coeff_ratio_ising(&ising)?);
        if let Some(f) = &found {
            let j_f = config.anneal.j_f;
            let emb = embed_ising(&ising, &f.embedding, hw, j_f)?;
            r.j_f = Some(j_f);
            r.c_ising_embedded = Some(coeff_ratio_ising(&emb.ising)?);
        }
        Ok(())
    })();
    if let (Err(e), true) = (metrics, r.is_ok()) {
        r.status = error_status(&e);
    }
    if !config.embedding.enabled {
        return (found, None);
    }
    let t = started.elapsed().as_secs_f64();
    (found, Some((r, t)))
}

fn spins(x: &[u8]) -> Vec<i8> {
    x.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect()
}

fn anneal_records(
    config: &ExperimentConfig,
    c: &CorpusInstance,
    hw: &HardwareGraph,
    embedding: Option<&InstanceEmbedding>,
    sweep: bool,
) -> Vec<(RunRecord, f64)> {
    let a = &config.anneal;
    let mut out = Vec::new();
    let j_fs: Vec<f64> = if sweep { a.j_f_grid.clone() } else { vec![a.j_f] };
    let original = exact_assignment(&c.instance).map_err(|e| e.to_string());
    for &n_p in &a.n_p {
        for &n_t in &a.n_t {
            let bin_seed = id_seed(config.seed, &c.id, mix(TAG_BIN, &[u64::from(n_p), u64::from(n_t)]));
            let binned = BinPackConfig::new(n_p, n_t, bin_seed).map(|cfg| bin_pack(&c.instance, &cfg));
            let optimum = binned.as_ref().map_err(|e| e.to_string()).and_then(|b| {
                exact_assignment(b).map_err(|e| e.to_string())
            });
            let base = binned.as_ref().map_err(|e| e.to_string()).and_then(|b| {
                base_weights(config, b, config.penalty.anneal).map_err(|e| e.to_string())
            });
            for &[f_one, f_not] in &config.penalty.factors {
                let started = Instant::now();
                let template = {
                    let mut r = RunRecord::new(c, Study::Anneal);
                    r.n_p = Some(n_p);
                    r.n_t = Some(n_t);
                    r.bin_seed = Some(bin_seed);
                    r.f_one = Some(f_one);
                    r.f_not = Some(f_not);
                    r.embed_seed = embedding.map(|e| e.seed);
                    r.n_physical = embedding.map(|e| e.embedding.num_physical());
                    r.max_chain = embedding.map(|e| e.embedding.max_chain_len());
                    r
                };
                // prepared once per factor pair, shared by every chain strength
                let prepared = (|| -> std::result::Result<_, String> {
                    let emb = embedding.ok_or("error: no embedding")?;
                    let binned = binned.as_ref().map_err(error_status)?;
                    let opt = optimum.clone().map_err(|e| format!("error: {e}"))?;
                    let (w, used) = base.clone().map_err(|e| format!("error: {e}"))?;
                    let w = w.scaled(f_one, f_not);
                    if (f_one, f_not) != (1.0, 1.0) {
                        let ok = minimizer_is_feasible(binned, &w, config.penalty.enum_cap)
                            .map_err(|e| error_status(&e))?;
                        if !ok {
                            return Err("skipped: penalized minimum infeasible".into());
                        }
                    }
                    let q = compile(binned, &w);
                    let ising = to_ising(&q);
                    let x = opt.assignment.to_binary(binned.num_gates());
                    let opt_energy = ising.energy(&spins(&x));
                    Ok((emb, binned, w, used, q, ising, opt, opt_energy))
                })();
                for &j_f in &j_fs {
                    let mut r = template.clone();
                    r.j_f = Some(j_f);
                    match &prepared {
                        Err(status) => r.status = status.clone(),
                        Ok((emb, binned, w, used, q, ising, opt, opt_energy)) => {
                            r.penalty = Some(used.label().into());
                            r.lambda_one = Some(w.lambda_one);
                            r.lambda_not = Some(w.lambda_not);
                            r.optimum = Some(opt.objective);
                            let seed = id_seed(
                                config.seed,
                                &c.id,
                                mix(
                                    TAG_ANNEAL,
                                    &[
                                        u64::from(n_p),
                                        u64::from(n_t),
                                        f_one.to_bits(),
                                        f_not.to_bits(),
                                        j_f.to_bits(),
                                    ],
                                ),
                            );
                            r.anneal_seed = Some(seed);
                            let res = (|| -> Result<()> {
                                r.c_qubo = Some(coeff_ratio_qubo(q)?);
                                r.c_ising = Some(coeff_ratio_ising(ising)?);
                                let physical = embed_ising(ising, &emb.embedding, hw, j_f)?;
                                r.c_ising_embedded = Some(coeff_ratio_ising(&physical.ising)?);
                                let params = AnnealParams {
                                    num_reads: a.num_reads,
                                    sweeps: a.sweeps,
                                    beta_range: a.beta_range,
                                    seed,
                                };
                                let o = anneal_embedded(ising, &physical, &params, *opt_energy, a.t_anneal_us)?;
                                r.num_reads = Some(o.num_reads);
                                r.p = Some(o.success_probability);
                                r.t_anneal_us = Some(a.t_anneal_us);
                                r.t99_us = Some(o.t99_us);
                                r.chain_break = Some(o.chain_break_fraction);
                                let x: Vec<u8> = o.best_state.iter().map(|&v| u8::from(v > 0)).collect();
                                r.best_objective = Assignment::from_binary(&x, binned.num_flights(), binned.num_gates())
                                    .filter(|b| binned.is_feasible(b))
                                    .map(|b| binned.total_transit_time(&b));
                                if let Ok(orig) = &original {
                                    r.r = Some(ratio_of(&c.instance, &orig.assignment, &opt.assignment)?);
                                }
                                Ok(())
                            })();
                            if let Err(e) = res {
                                r.status = error_status(&e);
                            }
                        }
                    }
                    let t = started.elapsed().as_secs_f64();
                    out.push((r, t));
                }
            }
        }
    }
    out
}

/// All records and wall times of a run, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub timings: Vec<Timing>,
}

/// Runs every enabled study over `corpus`. Per-instance failures end up in
/// the `status` column; only configuration problems are errors.
pub fn run_on(config: &ExperimentConfig, corpus: &[CorpusInstance]) -> Result<RunOutput> {
    config.validate()?;
    let hw = HardwareGraph::preset(&config.embedding.topology)?;
    let need_embedding = config.embedding.enabled || config.anneal.enabled;
    let anneal_ok = |c: &CorpusInstance| {
        config.anneal.enabled
            && small_enough(c, config.binpack.size_limit)
            && c.instance.num_vars() <= config.anneal.max_logical
    };
    let mut sweep_ids: Vec<&str> = corpus
        .iter()
        .filter(|c| anneal_ok(c))
        .map(|c| c.id.as_str())
        .collect();
    sweep_ids.sort_unstable();
    sweep_ids.truncate(config.anneal.sweep_instances);
    let work = || {
        corpus
            .par_iter()
            .map(|c| {
                let mut rows = binpack_records(config, c);
                if need_embedding {
                    let (emb, rec) = embedding_record(config, c, &hw);
                    rows.extend(rec);
                    if anneal_ok(c) {
                        let sweep = sweep_ids.contains(&c.id.as_str());
                        rows.extend(anneal_records(config, c, &hw, emb.as_ref(), sweep));
                    }
                }
                rows
            })
            .collect::<Vec<_>>()
    };
    let rows: Vec<(RunRecord, f64)> = if config.jobs == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(work)
    }
    .into_iter()
    .flatten()
    .collect();
    let mut rows = rows;
    rows.sort_by(|a, b| a.0.sort_key(&b.0));
    let timings = rows.iter().map(|(r, t)| Timing::of(r, *t)).collect();
    Ok(RunOutput {
        records: rows.into_iter().map(|(r, _)| r).collect(),
        timings,
    })
}

/// Builds the corpus and runs every study on it.
pub fn run_corpus(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let corpus = build_corpus(config)?;
    Ok(run_on(config, &corpus)?.records)
}

/// One row of a percentile table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileRow {
    pub x: f64,
    pub count: usize,
    /// One value per requested percentile, in request order.
    pub values: Vec<f64>,
}

/// Linear-interpolation percentile (`q` in `[0, 100]`) of sorted data.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Per distinct `x` value, the requested percentiles of `y`. Only `ok`
/// records with both fields present take part.
pub fn percentiles(records: &[RunRecord], x_key: &str, y_key: &str, ps: &[f64]) -> Result<Vec<PercentileRow>> {
    if let Some(&q) = ps.iter().find(|q| !(0.0..=100.0).contains(*q)) {
        return Err(Error::InvalidParams(format!("percentile {q} not in [0, 100]")));
    }
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    let probe = RunRecord::new(
        &CorpusInstance {
            id: String::new(),
            instance: FlightGateInstance {
                flights: vec![],
                gates: vec![],
                n_trans: vec![],
                t_gate: vec![],
                t_buf: 0,
            },
        },
        Study::Binpack,
    );
    probe.value(x_key)?;
    probe.value(y_key)?;
    for r in records.iter().filter(|r| r.is_ok()) {
        if let (Some(x), Some(y)) = (r.value(x_key)?, r.value(y_key)?) {
            // order-preserving key for f64
            let bits = x.to_bits();
            let key = if x.is_sign_negative() { !bits } else { bits | 1 << 63 };
            groups.entry(key).or_insert((x, Vec::new())).1.push(y);
        }
    }
    Ok(groups
        .into_values()
        .map(|(x, mut ys)| {
            ys.sort_by(f64::total_cmp);
            PercentileRow {
                x,
                count: ys.len(),
                values: ps.iter().map(|&q| percentile_sorted(&ys, q)).collect(),
            }
        })
        .collect())
}

pub const QUARTILES: [f64; 3] = [25.0, 50.0, 75.0];

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// `records.csv` contents.
pub fn records_csv(records: &[RunRecord]) -> Result<Vec<u8>> {
    if records.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RECORD_COLUMNS)?;
        return w.into_inner().map_err(|e| Error::Io(e.into_error()));
    }
    csv_bytes(records)
}

pub const RECORD_COLUMNS: [&str; 30] = [
    "instance",
    "study",
    "num_flights",
    "num_gates",
    "n_logical",
    "n_p",
    "n_t",
    "bin_seed",
    "penalty",
    "f_one",
    "f_not",
    "lambda_one",
    "lambda_not",
    "n_physical",
    "max_chain",
    "embed_seed",
    "c_qubo",
    "c_ising",
    "c_ising_embedded",
    "j_f",
    "anneal_seed",
    "num_reads",
    "p",
    "t_anneal_us",
    "t99_us",
    "chain_break",
    "optimum",
    "best_objective",
    "r",
    "status",
];

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = crate::error::read_file(path)?;
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn table_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn quartile_header(lead: &[&str], stem: &str) -> Vec<String> {
    lead.iter()
        .map(|s| s.to_string())
        .chain(["count".to_string()])
        .chain(QUARTILES.iter().map(|q| format!("{stem}_p{q}")))
        .collect()
}

/// Approximation ratio quartiles per `(n_p, n_t)` and the share of exact hits.
pub fn fig2_binpack(records: &[RunRecord]) -> Result<Vec<u8>> {
    let mut groups: BTreeMap<(u32, u32), Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok() && r.study == Study::Binpack) {
        if let (Some(n_p), Some(n_t), Some(v)) = (r.n_p, r.n_t, r.r) {
            groups.entry((n_p, n_t)).or_default().push(v);
        }
    }
    let mut header = quartile_header(&["n_p", "n_t"], "r");
    header.push("frac_exact".into());
    let rows: Vec<Vec<String>> = groups
        .into_iter()
        .map(|((n_p, n_t), mut rs)| {
            rs.sort_by(f64::total_cmp);
            let exact = rs.iter().filter(|&&v| v == 1.0).count() as f64 / rs.len() as f64;
            let mut row = vec![n_p.to_string(), n_t.to_string(), rs.len().to_string()];
            row.extend(QUARTILES.iter().map(|&q| fmt(percentile_sorted(&rs, q))));
            row.push(fmt(exact));
            row
        })
        .collect();
    table_csv(&header, &rows)
}

/// `|F|` and `|G|` of every instance in the bin-packing study.
pub fn fig2_sizes(records: &[RunRecord]) -> Result<Vec<u8>> {
    let sizes: BTreeMap<&str, (usize, usize)> = records
        .iter()
        .filter(|r| r.study == Study::Binpack)
        .map(|r| (r.instance.as_str(), (r.num_flights, r.num_gates)))
        .collect();
    let rows: Vec<Vec<String>> = sizes
        .into_iter()
        .map(|(id, (f, g))| vec![id.to_string(), f.to_string(), g.to_string()])
        .collect();
    table_csv(&["instance".into(), "num_flights".into(), "num_gates".into()], &rows)
}

/// Logical and physical qubits and coefficient ratios per instance.
pub fn fig3_embedding(records: &[RunRecord]) -> Result<Vec<u8>> {
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    let rows: Vec<Vec<String>> = records
        .iter()
        .filter(|r| r.study == Study::Embedding)
        .map(|r| {
            vec![
                r.instance.clone(),
                r.num_flights.to_string(),
                r.num_gates.to_string(),
                r.n_logical.to_string(),
                r.n_physical.map(|v| v.to_string()).unwrap_or_default(),
                r.max_chain.map(|v| v.to_string()).unwrap_or_default(),
                r.penalty.clone().unwrap_or_default(),
                opt(r.c_qubo),
                opt(r.c_ising),
                opt(r.c_ising_embedded),
                r.status.clone(),
            ]
        })
        .collect();
    let header = [
        "instance",
        "num_flights",
        "num_gates",
        "n_logical",
        "n_physical",
        "max_chain",
        "penalty",
        "c_qubo",
        "c_ising",
        "c_ising_embedded",
        "status",
    ];
    table_csv(&header.map(String::from), &rows)
}

fn anneal_ok(records: &[RunRecord]) -> impl Iterator<Item = &RunRecord> {
    records.iter().filter(|r| r.is_ok() && r.study == Study::Anneal)
}

/// Success probability and chain-break quartiles against chain strength,
/// per sweep instance.
pub fn fig4_jf_sweep(records: &[RunRecord]) -> Result<Vec<u8>> {
    let mut per_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in anneal_ok(records) {
        per_instance.entry(r.instance.as_str()).or_default().push(r);
    }
    let mut header = quartile_header(&["instance", "j_f"], "p");
    header.extend(QUARTILES.iter().map(|q| format!("chain_break_p{q}")));
    let mut rows = Vec::new();
    for (id, rs) in per_instance {
        let owned: Vec<RunRecord> = rs.into_iter().cloned().collect();
        let p = percentiles(&owned, "j_f", "p", &QUARTILES)?;
        if p.len() < 2 {
            continue;
        }
        let cb = percentiles(&owned, "j_f", "chain_break", &QUARTILES)?;
        for (a, b) in p.iter().zip(&cb) {
            let mut row = vec![id.to_string(), fmt(a.x), a.count.to_string()];
            row.extend(a.values.iter().map(|&v| fmt(v)));
            row.extend(b.values.iter().map(|&v| fmt(v)));
            rows.push(row);
        }
    }
    table_csv(&header, &rows)
}

fn operating_point(records: &[RunRecord]) -> Option<f64> {
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for r in anneal_ok(records) {
        if let Some(j) = r.j_f {
            counts.entry(j.to_bits()).or_insert((j, 0)).1 += 1;
        }
    }
    counts
        .into_values()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.total_cmp(&a.0)))
        .map(|(j, _)| j)
}

fn at_operating_point(records: &[RunRecord]) -> Vec<&RunRecord> {
    let j = operating_point(records);
    anneal_ok(records).filter(|r| r.j_f == j).collect()
}

/// Best success probability over penalty factors against the embedded
/// coefficient ratio, per binned instance, at the common chain strength.
pub fn fig4_success_vs_cising(records: &[RunRecord]) -> Result<Vec<u8>> {
    let mut best: BTreeMap<(&str, u32, u32), &RunRecord> = BTreeMap::new();
    for r in at_operating_point(records) {
        let key = (r.instance.as_str(), r.n_p.unwrap_or(0), r.n_t.unwrap_or(0));
        let e = best.entry(key).or_insert(r);
        if r.p > e.p {
            *e = r;
        }
    }
    let rows: Vec<Vec<String>> = best
        .into_iter()
        .map(|((id, n_p, n_t), r)| {
            vec![
                id.to_string(),
                n_p.to_string(),
                n_t.to_string(),
                r.num_flights.to_string(),
                fmt(r.f_one.unwrap_or(f64::NAN)),
                fmt(r.f_not.unwrap_or(f64::NAN)),
                fmt(r.c_ising_embedded.unwrap_or(f64::NAN)),
                fmt(r.p.unwrap_or(f64::NAN)),
            ]
        })
        .collect();
    let header = ["instance", "n_p", "n_t", "num_flights", "f_one", "f_not", "c_ising_embedded", "p_max"];
    table_csv(&header.map(String::from), &rows)
}

/// Time-to-solution and embedded coefficient ratio quartiles against `|F|`,
/// using the best run per binned instance.
pub fn fig5_tts(records: &[RunRecord]) -> Result<Vec<u8>> {
    let mut best: BTreeMap<(&str, u32, u32), (usize, f64, f64)> = BTreeMap::new();
    for r in at_operating_point(records) {
        let key = (r.instance.as_str(), r.n_p.unwrap_or(0), r.n_t.unwrap_or(0));
        let t99 = r.t99_us.unwrap_or(f64::INFINITY);
        let c = r.c_ising_embedded.unwrap_or(f64::NAN);
        let e = best.entry(key).or_insert((r.num_flights, t99, c));
        e.1 = e.1.min(t99);
        e.2 = e.2.max(c);
    }
    let mut by_f: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (f, t, c) in best.into_values() {
        let g = by_f.entry(f).or_default();
        g.0.push(t);
        g.1.push(c);
    }
    let mut header = quartile_header(&["num_flights"], "t99_us");
    header.extend(QUARTILES.iter().map(|q| format!("c_ising_embedded_p{q}")));
    let rows: Vec<Vec<String>> = by_f
        .into_iter()
        .map(|(f, (mut t, mut c))| {
            t.sort_by(f64::total_cmp);
            c.sort_by(f64::total_cmp);
            let mut row = vec![f.to_string(), t.len().to_string()];
            row.extend(QUARTILES.iter().map(|&q| fmt(percentile_sorted(&t, q))));
            row.extend(QUARTILES.iter().map(|&q| fmt(percentile_sorted(&c, q))));
            row
        })
        .collect();
    table_csv(&header, &rows)
}

/// Time at the airport of every flight in the schedule.
pub fn fig1_schedule(schedule: &FlightGateInstance) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = schedule
        .flights
        .iter()
        .enumerate()
        .map(|(i, f)| {
            vec![
                f.id.clone(),
                f.t_in.to_string(),
                f.t_out.to_string(),
                f.n_arr.to_string(),
                f.n_dep.to_string(),
                schedule.transfer_degree(i).to_string(),
            ]
        })
        .collect();
    let header = ["flight", "t_in", "t_out", "n_arr", "n_dep", "transfer_passengers"];
    table_csv(&header.map(String::from), &rows)
}

/// Edges of the transfer graph.
pub fn fig1_transfers(schedule: &FlightGateInstance) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = schedule
        .transfer_edges()
        .into_iter()
        .map(|(i, j, n)| vec![schedule.flights[i].id.clone(), schedule.flights[j].id.clone(), n.to_string()])
        .collect();
    table_csv(&["from".into(), "to".into(), "passengers".into()], &rows)
}

/// Runs the experiment and writes every artifact into `config.output_dir`.
pub fn run_and_write(config: &ExperimentConfig) -> Result<RunOutput> {
    let dir = &config.output_dir;
    let corpus = build_corpus(config)?;
    for c in &corpus {
        c.instance.save(&dir.join("instances").join(format!("{}.json", c.id)))?;
    }
    let out = run_on(config, &corpus)?;
    write_file(&dir.join("config.toml"), config.to_toml())?;
    write_file(&dir.join("records.csv"), records_csv(&out.records)?)?;
    write_file(&dir.join("timings.csv"), csv_bytes(&out.timings)?)?;
    write_file(&dir.join("fig2_binpack.csv"), fig2_binpack(&out.records)?)?;
    write_file(&dir.join("fig2_sizes.csv"), fig2_sizes(&out.records)?)?;
    write_file(&dir.join("fig3_embedding.csv"), fig3_embedding(&out.records)?)?;
    write_file(&dir.join("fig4_jf_sweep.csv"), fig4_jf_sweep(&out.records)?)?;
    write_file(&dir.join("fig4_success_vs_cising.csv"), fig4_success_vs_cising(&out.records)?)?;
    write_file(&dir.join("fig5_tts.csv"), fig5_tts(&out.records)?)?;
    if let Some(schedule) = airport_schedule(config)? {
        write_file(&dir.join("fig1_schedule.csv"), fig1_schedule(&schedule)?)?;
        write_file(&dir.join("fig1_transfers.csv"), fig1_transfers(&schedule)?)?;
    }
    Ok(out)
}
