//! Compiles a small instance with worst-case penalty weights and checks the
//! QUBO and Ising energies of the optimal assignment against its objective.

use flight_gate_qubo::instance::{generate, GeneratorParams};
use flight_gate_qubo::qubo::{coeff_ratio_ising, coeff_ratio_qubo, compile, to_ising, worst_case_weights};
use flight_gate_qubo::solve::exact_assignment;

fn main() -> flight_gate_qubo::Result<()> {
    let inst = generate(11, 4, 3, &GeneratorParams::default())?;
    let w = worst_case_weights(&inst, 1.0);
    let q = compile(&inst, &w);
    let ising = to_ising(&q);
    println!("lambda_one = {}, lambda_not = {}", w.lambda_one, w.lambda_not);
    println!("{} variables, C_QUBO = {:.1}, C_Ising = {:.1}", q.n, coeff_ratio_qubo(&q)?, coeff_ratio_ising(&ising)?);

    let best = exact_assignment(&inst)?;
    let x = best.assignment.to_binary(inst.num_gates());
    let s: Vec<i8> = x.iter().map(|&b| 2 * b as i8 - 1).collect();
    println!("objective {} | QUBO energy {} | Ising energy {}", best.objective, q.energy(&x), ising.energy(&s));
    print!("{}", q.to_text().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
