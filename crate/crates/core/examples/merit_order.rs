//! Merit order of one fixture hour with the plant's bid, and where the
//! adjusted net demand lands on it.
//!
//! cargo run --example merit_order [hour] > merit.csv

use std::path::Path;

use rep_market::metrics::{adjusted_net_demand, merit_order, write_merit_order};
use rep_market::scenario::load_scenario;
use rep_market::sim::Simulator;

fn main() -> rep_market::error::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/six_bus");
    let scn = load_scenario(&dir.join("scenario.toml"), &dir)?;
    let hour: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let sim = Simulator::new(&scn)?;
    let net = sim.bidder_network(hour)?;
    let stack = merit_order(&net);
    write_merit_order(&stack, std::io::stdout())?;

    let renewables: Vec<&String> = scn.timeseries.res_available.keys().collect();
    let production: Vec<f64> = renewables.iter().map(|g| scn.timeseries.available(g, hour).unwrap_or(0.0)).collect();
    let capacity: Vec<f64> = renewables.iter().map(|g| scn.network.generator(g).map_or(0.0, |g| g.p_max)).collect();
    let and = adjusted_net_demand(&scn.timeseries.loads[hour], &production, &capacity);

    let mut filled = 0.0;
    for e in &stack {
        filled += e.width;
        if filled >= and {
            eprintln!("hour {hour}: adjusted net demand {and:.1} MW, marginal piece {} at {} $/MWh", e.generator, e.alpha);
            break;
        }
    }
    Ok(())
}
