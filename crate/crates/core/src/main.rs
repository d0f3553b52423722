fn main() {
    std::process::exit(flight_gate_qubo::cli::main());
}
