//! Simulated annealing through a Chimera embedding at several chain strengths.

use flight_gate_qubo::embed::{chimera, embed_ising, find_embedding};
use flight_gate_qubo::experiment::anneal_embedded;
use flight_gate_qubo::instance::{generate, GeneratorParams};
use flight_gate_qubo::qubo::{compile, to_ising, worst_case_weights};
use flight_gate_qubo::reduce::{bin_pack, BinPackConfig};
use flight_gate_qubo::solve::{exact_assignment, AnnealParams, T_ANNEAL_US};

fn main() -> flight_gate_qubo::Result<()> {
    let inst = bin_pack(&generate(4, 4, 3, &GeneratorParams::default())?, &BinPackConfig::new(3, 3, 4)?);
    let q = compile(&inst, &worst_case_weights(&inst, 1.0));
    let ising = to_ising(&q);
    let best = exact_assignment(&inst)?;
    let spins: Vec<i8> = best.assignment.to_binary(inst.num_gates()).iter().map(|&b| 2 * b as i8 - 1).collect();
    let optimum = ising.energy(&spins);

    let hw = chimera(16, 16, 4)?;
    let e = find_embedding(q.n, &q.interaction_edges(), &hw, 5, 0)?;
    println!("{} logical spins on {} qubits, optimum {optimum}", q.n, e.num_physical());
    let params = AnnealParams { num_reads: 300, sweeps: 300, beta_range: None, seed: 9 };
    println!("   J_F        p    T99 (us)  chain breaks");
    for j_f in [-5.0, -2.0, -1.0, -0.5, -0.2, -0.1] {
        let physical = embed_ising(&ising, &e, &hw, j_f)?;
        let o = anneal_embedded(&ising, &physical, &params, optimum, T_ANNEAL_US)?;
        println!("{j_f:>6}  {:>7.3}  {:>10.1}  {:>12.4}", o.success_probability, o.t99_us, o.chain_break_fraction);
    }
    Ok(())
}
