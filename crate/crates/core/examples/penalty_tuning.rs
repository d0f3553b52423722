//! Worst-case penalty weights against the smallest weights found by bisection.

use flight_gate_qubo::instance::{generate, GeneratorParams};
use flight_gate_qubo::qubo::worst_case_weights;
use flight_gate_qubo::solve::tune_penalties;

fn main() -> flight_gate_qubo::Result<()> {
    println!("seed  worst-case (one, not)  bisection (one, not)");
    for seed in 0..8 {
        let inst = generate(seed, 4, 3, &GeneratorParams::default())?;
        let wc = worst_case_weights(&inst, 1.0);
        let tuned = tune_penalties(&inst, 1.0)?;
        println!(
            "{seed:>4}  ({:>6}, {:>6})        ({:>6}, {:>6})",
            wc.lambda_one, wc.lambda_not, tuned.lambda_one, tuned.lambda_not
        );
    }
    Ok(())
}
