//! Simulates the fixture week with the plant bidding and prints the report.
//!
//! cargo run --release --example simulate_six_bus [out_dir]

use std::path::{Path, PathBuf};

use rep_market::metrics::SimulationReport;
use rep_market::scenario::load_scenario;
use rep_market::sim::{write_records, Simulator};

fn main() -> rep_market::error::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/six_bus");
    let scn = load_scenario(&dir.join("scenario.toml"), &dir)?;
    let sim = Simulator::new(&scn)?;

    let base = sim.run_base()?;
    let records = sim.run_bidder()?;
    let report = SimulationReport::build("bidder", &records, &scn)?
        .with_baseline(&SimulationReport::build("base", &base, &scn)?);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));

    if let Some(out) = std::env::args().nth(1).map(PathBuf::from) {
        write_records(&out, sim.network(), &records)?;
        println!("hourly results written to {}", out.display());
    }
    Ok(())
}
