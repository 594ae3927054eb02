//! Bidder versus fixed consumption at a low and a high hydrogen price,
//! each relative to the grid without the electrolyzer.

use std::path::Path;

use rep_market::metrics::SimulationReport;
use rep_market::scenario::{load_scenario, HydrogenPrice};
use rep_market::sim::Simulator;

fn pct(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{:+.1}%", v * 100.0))
}

fn main() -> rep_market::error::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/six_bus");
    println!(
        "{:>6} {:>7} {:>12} {:>9} {:>12} {:>9} {:>11} {:>9} {:>12}",
        "$/kg", "run", "cost $", "d cost", "curtail MWh", "d emis", "profit $", "load MW", "avg LMP"
    );
    for price in [1.5, 6.0] {
        let mut scn = load_scenario(&dir.join("scenario.toml"), &dir)?;
        scn.rep.hydrogen_price = HydrogenPrice::Constant(price);
        let sim = Simulator::new(&scn)?;
        let base = SimulationReport::build("base", &sim.run_base()?, &scn)?;
        let bidder = sim.run_bidder()?;
        let fixed = sim.run_fixed(&bidder)?;
        for (name, recs) in [("bidder", &bidder), ("fixed", &fixed)] {
            let r = SimulationReport::build(name, recs, &scn)?.with_baseline(&base);
            let d = r.deltas.as_ref().expect("baseline set");
            println!(
                "{price:>6} {name:>7} {:>12.0} {:>9} {:>12.1} {:>9} {:>11.0} {:>9.1} {:>12.2}",
                r.total_cost_of_generation,
                pct(d.total_cost_of_generation),
                r.total_curtailment,
                pct(d.total_emissions),
                r.rep_profit,
                r.rep_avg_load,
                r.rep_avg_lmp
            );
        }
    }
    Ok(())
}
