//! The `fgq` command line. Stages exchange files: instances as JSON, models
//! in the QUBO/Ising text formats, embeddings as JSON, samples as CSV.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::embed::{embed_ising, find_embedding, unembed, EmbeddingDocument, HardwareGraph};
use crate::error::{read_file, write_file};
use crate::experiment::{self, ExperimentConfig, QUARTILES};
use crate::instance::{
    connected_components, drop_no_transfer_flights, generate, random_cut, split_long_stays,
    GeneratorParams, SplitOptions,
};
use crate::qubo::{
    coeff_ratio_ising, coeff_ratio_qubo, compile, default_epsilon, looks_like_ising, to_ising,
    worst_case_weights, IsingModel, PenaltyWeights, Qubo,
};
use crate::reduce::{approximation_ratio, bin_pack, BinPackConfig};
use crate::solve::{
    default_beta_range, exact_assignment, exact_qubo_min, simulated_anneal, tune_penalties,
    AnnealMetadata, AnnealParams,
};
use crate::{Error, FlightGateInstance, Result};

#[derive(Debug, Parser)]
#[command(name = "fgq", version, about = "Flight gate assignment as QUBO: instances, compilation, embedding and annealing")]
struct Cli {
    /// Summary format printed on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every randomized step of the command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Primary output file (directory for `extract` and `experiment`).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Penalty {
    WorstCase,
    Bisection,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a synthetic instance.
    Generate {
        #[arg(long)]
        flights: usize,
        #[arg(long)]
        gates: usize,
        /// Sparse transfers, as in a full airport day.
        #[arg(long)]
        airport_day: bool,
    },
    /// Split long stays and cut a schedule into transfer-connected instances.
    Extract {
        schedule: PathBuf,
        #[arg(long, default_value_t = crate::instance::DEFAULT_SPLIT_THRESHOLD)]
        split_threshold: i64,
        #[arg(long, default_value_t = crate::instance::DEFAULT_TURNAROUND_GAP)]
        gap: i64,
        /// Components with fewer flights are dropped.
        #[arg(long, default_value_t = 1)]
        min_flights: usize,
        /// Emit one random cut of this many flights instead of the components.
        #[arg(long)]
        cut: Option<usize>,
    },
    /// Bin-pack passenger counts and walking times.
    Binpack {
        instance: PathBuf,
        #[arg(long)]
        n_p: u32,
        #[arg(long)]
        n_t: u32,
        /// Also solve both instances exactly and report the approximation ratio.
        #[arg(long)]
        ratio: bool,
    },
    /// Compile an instance to QUBO (or Ising) text.
    Compile {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Penalty::WorstCase)]
        penalty: Penalty,
        /// Margin above the transfer bound; instance default when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        f_one: f64,
        #[arg(long, default_value_t = 1.0)]
        f_not: f64,
        /// Write the Ising form instead of the QUBO.
        #[arg(long)]
        ising: bool,
    },
    /// Optimal assignment of an instance, or the minimum of a QUBO/Ising file.
    SolveExact { input: PathBuf },
    /// Minimal penalty weights by bisection.
    TunePenalty {
        instance: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Minor-embed a QUBO/Ising model into a Chimera device.
    Embed {
        model: PathBuf,
        #[arg(long, default_value = "2000Q")]
        topology: String,
        #[arg(long, default_value_t = crate::embed::DEFAULT_TRIES)]
        tries: usize,
        /// Chain coupling in units of the largest logical coefficient.
        #[arg(long, default_value_t = crate::embed::DEFAULT_CHAIN_STRENGTH, allow_hyphen_values = true)]
        chain_strength: f64,
        /// Also write the physical Ising model here.
        #[arg(long)]
        physical: Option<PathBuf>,
    },
    /// Simulated annealing of a QUBO/Ising model, optionally through an embedding.
    Anneal {
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        reads: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long)]
        beta_start: Option<f64>,
        #[arg(long)]
        beta_end: Option<f64>,
        /// Embedding JSON; samples are then un-embedded by majority vote.
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[arg(long, default_value_t = crate::embed::DEFAULT_CHAIN_STRENGTH, allow_hyphen_values = true)]
        chain_strength: f64,
    },
    /// Run the corpus studies described by a TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; overrides the config.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Percentile table of one record column against another.
    Report {
        records: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_delimiter = ',', default_values_t = QUARTILES.to_vec())]
        percentiles: Vec<f64>,
        /// Restrict to one study (binpack, embedding, anneal).
        #[arg(long)]
        study: Option<String>,
    },
}

/// Parses `std::env::args` and runs the command; returns the exit status.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_instance(path: &Path) -> Result<FlightGateInstance> {
    let inst = FlightGateInstance::load(path)?;
    inst.ensure_valid()?;
    Ok(inst)
}

enum Model {
    Qubo(Qubo),
    Ising(IsingModel),
}

impl Model {
    fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        if looks_like_ising(&text) {
            IsingModel::from_text(&text).map(Model::Ising)
        } else {
            Qubo::from_text(&text).map(Model::Qubo)
        }
    }

    fn ising(&self) -> IsingModel {
        match self {
            Model::Qubo(q) => to_ising(q),
            Model::Ising(m) => m.clone(),
        }
    }
}

/// Writes `contents` to `-o` when given, otherwise returns them for stdout.
fn artifact(cli: &Cli, contents: String) -> Result<Option<String>> {
    match &cli.output {
        Some(p) => {
            write_file(p, contents)?;
            Ok(None)
        }
        None => Ok(Some(contents)),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn summary(format: Format, fields: Map<String, Value>) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&Value::Object(fields))? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(fields.keys())?;
            w.write_record(fields.values().map(cell))?;
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                .expect("csv is utf-8")
        }
        Format::Text => fields
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", cell(v)))
            .collect(),
    })
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("summaries are objects"),
    }
}

fn epsilon_or_default(inst: &FlightGateInstance, eps: Option<f64>) -> Result<f64> {
    match eps {
        Some(e) if !(e > 0.0) => Err(Error::InvalidParams(format!("epsilon must be > 0, got {e}"))),
        Some(e) => Ok(e),
        None => Ok(default_epsilon(inst)),
    }
}

fn dispatch(cli: &Cli) -> Result<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::Generate {
            flights,
            gates,
            airport_day,
        } => {
            let params = if *airport_day {
                GeneratorParams::airport_day(*flights)
            } else {
                GeneratorParams::default()
            };
            let inst = generate(cli.seed, *flights, *gates, &params)?;
            Ok(artifact(cli, inst.to_json()? + "\n")?.unwrap_or_default())
        }
        Command::Extract {
            schedule,
            split_threshold,
            gap,
            min_flights,
            cut,
        } => {
            let inst = load_instance(schedule)?;
            let split = split_long_stays(
                &inst,
                SplitOptions {
                    threshold: *split_threshold,
                    gap: *gap,
                },
            )?;
            let kept = drop_no_transfer_flights(&split);
            let parts: Vec<(String, FlightGateInstance)> = match cut {
                Some(size) => vec![(format!("cut-{size}"), random_cut(&kept, cli.seed, *size)?)],
                None => connected_components(&kept)
                    .into_iter()
                    .filter(|c| c.num_flights() >= *min_flights)
                    .enumerate()
                    .map(|(k, c)| (format!("cc{k:03}"), c))
                    .collect(),
            };
            let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut written = Vec::new();
            for (name, part) in &parts {
                let path = dir.join(format!("{name}.json"));
                part.save(&path)?;
                written.push(json!({
                    "file": path.display().to_string(),
                    "flights": part.num_flights(),
                    "gates": part.num_gates(),
                }));
            }
            let sizes: Vec<usize> = parts.iter().map(|(_, p)| p.num_flights()).collect();
            summary(
                fmt,
                object(json!({
                    "flights_after_split": split.num_flights(),
                    "flights_with_transfers": kept.num_flights(),
                    "transfer_edges": kept.transfer_edges().len(),
                    "instances": parts.len(),
                    "instance_flights": sizes,
                })),
            )
        }
        Command::Binpack {
            instance,
            n_p,
            n_t,
            ratio,
        } => {
            let inst = load_instance(instance)?;
            let binned = bin_pack(&inst, &BinPackConfig::new(*n_p, *n_t, cli.seed)?);
            let json = binned.to_json()? + "\n";
            let mut fields = object(json!({ "n_p": n_p, "n_t": n_t, "seed": cli.seed }));
            if *ratio {
                let r = approximation_ratio(&inst, &binned, exact_assignment)?;
                fields.insert("r".into(), json!(r));
            }
            match artifact(cli, json)? {
                Some(doc) if !*ratio => Ok(doc),
                _ => summary(fmt, fields),
            }
        }
        Command::Compile {
            instance,
            penalty,
            epsilon,
            f_one,
            f_not,
            ising,
        } => {
            let inst = load_instance(instance)?;
            let eps = epsilon_or_default(&inst, *epsilon)?;
            let base = match penalty {
                Penalty::WorstCase => worst_case_weights(&inst, eps),
                Penalty::Bisection => tune_penalties(&inst, eps)?,
            };
            if !(*f_one > 0.0 && *f_not > 0.0) {
                return Err(Error::InvalidParams("penalty factors must be > 0".into()));
            }
            let w = base.scaled(*f_one, *f_not);
            let q = compile(&inst, &w);
            let text = if *ising { to_ising(&q).to_text() } else { q.to_text() };
            match artifact(cli, text)? {
                Some(text) => Ok(text),
                None => summary(
                    fmt,
                    object(json!({
                        "num_vars": q.n,
                        "lambda_one": w.lambda_one,
                        "lambda_not": w.lambda_not,
                        "epsilon": w.epsilon,
                        "c_qubo": coeff_ratio_qubo(&q).ok(),
                        "c_ising": coeff_ratio_ising(&to_ising(&q)).ok(),
                    })),
                ),
            }
        }
        Command::SolveExact { input } => {
            let fields = if input.extension().is_some_and(|e| e == "json") {
                let inst = load_instance(input)?;
                let r = exact_assignment(&inst)?;
                let gates: Vec<&str> = r
                    .assignment
                    .gate_of
                    .iter()
                    .map(|&g| inst.gates[g].id.as_str())
                    .collect();
                json!({
                    "objective": r.objective,
                    "assignment": gates,
                    "proven_optimal": r.proven_optimal,
                    "nodes": r.nodes_explored,
                })
            } else {
                let q = match Model::load(input)? {
                    Model::Qubo(q) => q,
                    Model::Ising(_) => {
                        return Err(Error::InvalidParams("solve-exact expects a QUBO file or an instance".into()))
                    }
                };
                let (x, e) = exact_qubo_min(&q)?;
                let bits: String = x.iter().map(|b| char::from(b'0' + b)).collect();
                json!({ "energy": e, "state": bits })
            };
            let text = summary(fmt, object(fields))?;
            Ok(artifact(cli, text)?.unwrap_or_default())
        }
        Command::TunePenalty { instance, epsilon } => {
            let inst = load_instance(instance)?;
            let eps = epsilon_or_default(&inst, *epsilon)?;
            let wc = worst_case_weights(&inst, eps);
            let w: PenaltyWeights = tune_penalties(&inst, eps)?;
            let text = summary(
                fmt,
                object(json!({
                    "lambda_one": w.lambda_one,
                    "lambda_not": w.lambda_not,
                    "worst_case_lambda_one": wc.lambda_one,
                    "worst_case_lambda_not": wc.lambda_not,
                    "epsilon": eps,
                })),
            )?;
            Ok(artifact(cli, text)?.unwrap_or_default())
        }
        Command::Embed {
            model,
            topology,
            tries,
            chain_strength,
            physical,
        } => {
            let logical = Model::load(model)?.ising();
            let hw = HardwareGraph::preset(topology)?;
            let edges: Vec<(usize, usize)> = logical.j.keys().copied().collect();
            let e = find_embedding(logical.len(), &edges, &hw, *tries, cli.seed)?;
            let emb = embed_ising(&logical, &e, &hw, *chain_strength)?;
            if let Some(p) = physical {
                emb.ising.save(p)?;
            }
            let doc = serde_json::to_string_pretty(&EmbeddingDocument::new(&e, &hw))? + "\n";
            match artifact(cli, doc)? {
                Some(doc) => Ok(doc),
                None => summary(
                    fmt,
                    object(json!({
                        "n_logical": logical.len(),
                        "n_physical": e.num_physical(),
                        "max_chain": e.max_chain_len(),
                        "c_ising": coeff_ratio_ising(&logical).ok(),
                        "c_ising_embedded": coeff_ratio_ising(&emb.ising).ok(),
                    })),
                ),
            }
        }
        Command::Anneal {
            model,
            reads,
            sweeps,
            beta_start,
            beta_end,
            embedding,
            chain_strength,
        } => {
            let logical = Model::load(model)?.ising();
            let beta_range = match (beta_start, beta_end) {
                (Some(a), Some(b)) => Some((*a, *b)),
                (None, None) => None,
                _ => return Err(Error::InvalidParams("give both --beta-start and --beta-end".into())),
            };
            let params = AnnealParams {
                num_reads: *reads,
                sweeps: *sweeps,
                beta_range,
                seed: cli.seed,
            };
            let started = Instant::now();
            let (samples, sampled_model, chain_break) = match embedding {
                None => (simulated_anneal(&logical, &params)?, logical.clone(), None),
                Some(path) => {
                    let doc = EmbeddingDocument::load(path)?;
                    let hw = crate::embed::chimera(doc.topology.m, doc.topology.n, doc.topology.l)?;
                    let e = doc.embedding()?;
                    let emb = embed_ising(&logical, &e, &hw, *chain_strength)?;
                    let phys = simulated_anneal(&emb.ising, &params)?;
                    let mut reads_out = Vec::with_capacity(phys.num_reads());
                    let mut broken = 0.0;
                    for (k, s) in phys.samples.iter().enumerate() {
                        let u = unembed(&s.state, &e, cli.seed ^ k as u64);
                        broken += u.chain_break_fraction * s.multiplicity as f64;
                        reads_out.extend(std::iter::repeat_n(u.state, s.multiplicity));
                    }
                    let frac = broken / phys.num_reads() as f64;
                    (
                        crate::solve::SampleSet::from_reads(&logical, reads_out),
                        emb.ising,
                        Some(frac),
                    )
                }
            };
            let (b0, b1) = beta_range.unwrap_or_else(|| default_beta_range(&sampled_model));
            let meta = AnnealMetadata {
                seed: cli.seed,
                num_reads: *reads,
                sweeps: *sweeps,
                beta_start: b0,
                beta_end: b1,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            let mut csv_out = Vec::new();
            samples.write_csv(&mut csv_out)?;
            let csv_text = String::from_utf8(csv_out).expect("csv is utf-8");
            let lowest = samples.lowest().map(|s| s.energy);
            match &cli.output {
                Some(p) => {
                    write_file(p, csv_text)?;
                    let mut meta_path = p.clone().into_os_string();
                    meta_path.push(".meta.json");
                    write_file(Path::new(&meta_path), serde_json::to_string_pretty(&meta)? + "\n")?;
                    summary(
                        fmt,
                        object(json!({
                            "num_reads": samples.num_reads(),
                            "distinct_states": samples.samples.len(),
                            "lowest_energy": lowest,
                            "chain_break_fraction": chain_break,
                        })),
                    )
                }
                None => Ok(csv_text),
            }
        }
        Command::Experiment { config, jobs } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(j) = jobs {
                cfg.jobs = *j;
            }
            if let Some(o) = &cli.output {
                cfg.output_dir = o.clone();
            }
            let out = experiment::run_and_write(&cfg)?;
            let failed = out.records.iter().filter(|r| r.status.starts_with("error")).count();
            let skipped = out.records.iter().filter(|r| r.status.starts_with("skipped")).count();
            summary(
                fmt,
                object(json!({
                    "output_dir": cfg.output_dir.display().to_string(),
                    "records": out.records.len(),
                    "errors": failed,
                    "skipped": skipped,
                })),
            )
        }
        Command::Report {
            records,
            x,
            y,
            percentiles,
            study,
        } => {
            let mut rs = experiment::read_records(records)?;
            if let Some(s) = study {
                rs.retain(|r| serde_json::to_value(r.study).is_ok_and(|v| v == json!(s)));
            }
            let table = experiment::percentiles(&rs, x, y, percentiles)?;
            let header: Vec<String> = [x.clone(), "count".into()]
                .into_iter()
                .chain(percentiles.iter().map(|q| format!("{y}_p{q}")))
                .collect();
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|r| {
                    [r.x.to_string(), r.count.to_string()]
                        .into_iter()
                        .chain(r.values.iter().map(|v| v.to_string()))
                        .collect()
                })
                .collect();
            let text = match fmt {
                Format::Json => {
                    let objs: Vec<Value> = table
                        .iter()
                        .map(|r| {
                            let mut m = Map::new();
                            m.insert(x.clone(), json!(r.x));
                            m.insert("count".into(), json!(r.count));
                            for (q, v) in percentiles.iter().zip(&r.values) {
                                m.insert(format!("{y}_p{q}"), json!(v));
                            }
                            Value::Object(m)
                        })
                        .collect();
                    serde_json::to_string_pretty(&objs)? + "\n"
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(&header)?;
                    for r in &rows {
                        w.write_record(r)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                        .expect("csv is utf-8")
                }
                Format::Text => std::iter::once(header.join("\t"))
                    .chain(rows.iter().map(|r| r.join("\t")))
                    .map(|l| l + "\n")
                    .collect(),
            };
            Ok(artifact(cli, text)?.unwrap_or_default())
        }
    }
}
