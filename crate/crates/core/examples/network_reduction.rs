//! Reduces the six-bus fixture and clears one hour under each network model.

use std::path::Path;

use rep_market::opf::{reduce_network, NetworkMode};
use rep_market::scenario::load_scenario;
use rep_market::sim::Simulator;

fn main() -> rep_market::error::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/six_bus");
    let mut scn = load_scenario(&dir.join("scenario.toml"), &dir)?;
    let hour: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(49);

    let zonal = reduce_network(&scn.network, NetworkMode::Zonal)?;
    println!("zonal interfaces:");
    for b in &zonal.network.branches {
        println!("  region {} - region {}: {} MW", b.from, b.to, b.limit_mw);
    }

    for mode in [NetworkMode::Nodal, NetworkMode::Zonal, NetworkMode::CopperPlate] {
        scn.network_mode = mode;
        let sim = Simulator::new(&scn)?;
        let rec = sim.bidder_hour(hour)?;
        let lmps: Vec<String> = sim
            .network()
            .buses
            .iter()
            .zip(&rec.outcome.lmp)
            .map(|(b, l)| format!("{}={l:.2}", b.id))
            .collect();
        println!("{mode:>6}: objective {:>10.1} $, LMPs {}", rec.outcome.objective, lmps.join(" "));
    }
    Ok(())
}
