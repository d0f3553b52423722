//! Draws an airport day, splits long stays and lists the transfer-connected
//! instances that come out of it.

use flight_gate_qubo::instance::{
    connected_components, drop_no_transfer_flights, generate, random_cut, split_long_stays,
    GeneratorParams, SplitOptions,
};

fn main() -> flight_gate_qubo::Result<()> {
    let day = generate(2017, 120, 35, &GeneratorParams::airport_day(120))?;
    let split = split_long_stays(&day, SplitOptions::default())?;
    let kept = drop_no_transfer_flights(&split);
    println!(
        "{} flights drawn, {} after splitting, {} with transfers ({} transfer edges)",
        day.num_flights(),
        split.num_flights(),
        kept.num_flights(),
        kept.transfer_edges().len()
    );

    let mut parts = connected_components(&kept);
    parts.sort_by_key(|p| std::cmp::Reverse(p.num_flights()));
    let sizes: Vec<usize> = parts.iter().map(|p| p.num_flights()).collect();
    println!("component sizes: {sizes:?}");

    let cut = random_cut(&parts[0], 5, 8.min(parts[0].num_flights()))?;
    let flights: Vec<&str> = cut.flights.iter().map(|f| f.id.as_str()).collect();
    println!("random cut of the largest component: {flights:?}");
    Ok(())
}
