//! Approximation ratio of bin-packed instances over a few grid points.

use flight_gate_qubo::instance::{generate, GeneratorParams};
use flight_gate_qubo::reduce::{approximation_ratio, bin_pack, BinPackConfig};
use flight_gate_qubo::solve::exact_assignment;

fn main() -> flight_gate_qubo::Result<()> {
    for seed in 0..4 {
        let inst = generate(seed, 6, 4, &GeneratorParams::default())?;
        let mut line = format!("instance {seed}:");
        for (n_p, n_t) in [(2, 2), (3, 3), (6, 6), (10, 10)] {
            let binned = bin_pack(&inst, &BinPackConfig::new(n_p, n_t, seed)?);
            let r = approximation_ratio(&inst, &binned, exact_assignment)?;
            line += &format!("  R({n_p},{n_t}) = {r:.4}");
        }
        println!("{line}");
    }
    Ok(())
}
