//! Embeds a compiled instance into the 2048-qubit Chimera graph and checks
//! the chains.

use flight_gate_qubo::embed::{chimera, embed_ising, find_embedding};
use flight_gate_qubo::instance::{generate, GeneratorParams};
use flight_gate_qubo::qubo::{coeff_ratio_ising, compile, to_ising, worst_case_weights};

fn main() -> flight_gate_qubo::Result<()> {
    let hw = chimera(16, 16, 4)?;
    println!("C(16,16,4): {} qubits, {} couplers", hw.num_qubits(), hw.edges.len());
    for (f, g) in [(3, 3), (4, 4), (6, 4)] {
        let inst = generate(1, f, g, &GeneratorParams::default())?;
        let q = compile(&inst, &worst_case_weights(&inst, 1.0));
        let edges = q.interaction_edges();
        let e = find_embedding(q.n, &edges, &hw, 5, 1)?;
        let physical = embed_ising(&to_ising(&q), &e, &hw, -1.0)?;
        println!(
            "{f} flights x {g} gates: {} logical -> {} physical, longest chain {}, valid {}, C_Ising embedded {:.1}",
            q.n,
            e.num_physical(),
            e.max_chain_len(),
            e.is_valid(q.n, &edges, &hw),
            coeff_ratio_ising(&physical.ising)?
        );
    }
    Ok(())
}
