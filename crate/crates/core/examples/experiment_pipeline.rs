//! A small end-to-end corpus run, followed by a percentile table of success
//! probability against chain strength.

use flight_gate_qubo::experiment::{percentiles, run_and_write, ExperimentConfig, QUARTILES};

const CONFIG: &str = r#"
seed = 3
output_dir = "target/example-experiment"

[corpus]
kind = "generated"
sizes = [[3, 2], [4, 3]]
per_size = 2

[binpack]
n_p = [2, 3]
n_t = [2, 3]

[embedding]
tries = 2

[anneal]
n_p = [3]
n_t = [3]
num_reads = 200
sweeps = 200
sweep_instances = 4
"#;

fn main() -> flight_gate_qubo::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let out = run_and_write(&cfg)?;
    println!("{} records written to {}", out.records.len(), cfg.output_dir.display());
    println!("    J_F  count     p25     p50     p75");
    for row in percentiles(&out.records, "j_f", "p", &QUARTILES)? {
        println!(
            "{:>7}  {:>5}  {:>6.3}  {:>6.3}  {:>6.3}",
            row.x, row.count, row.values[0], row.values[1], row.values[2]
        );
    }
    Ok(())
}
